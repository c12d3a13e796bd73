import numpy as np
import pytest

from fisherbound.errors import DomainError
from fisherbound.fop import bkm, bridge, rld, sld, tilde, wy, wyd
from fisherbound.means import scalar_mean
from fisherbound.purelimit import (
    DEFAULT_EPSILONS,
    RadialFamily,
    member,
    pure_equalities,
    radial_limit_sweep,
    top_projector,
)
from fisherbound.states import random_observable, random_pure, random_state


@pytest.fixture
def pure3(rng):
    return random_pure(rng, 3)


class TestFamily:
    def test_member_spectrum(self, pure3):
        fam = RadialFamily(pure3)
        for eps in DEFAULT_EPSILONS:
            d = member(fam, eps)
            assert d.faithful
            np.testing.assert_allclose(d.eigenvalues, [eps / 2, eps / 2, 1 - eps], atol=1e-14)
            np.testing.assert_allclose(top_projector(d), pure3.matrix, atol=1e-10)

    def test_epsilon_range(self, pure3):
        fam = RadialFamily(pure3)
        with pytest.raises(DomainError):
            member(fam, 0.0)
        with pytest.raises(DomainError):
            member(fam, 0.5)

    def test_validation(self, pure3, rng):
        with pytest.raises(DomainError):
            RadialFamily(random_state(rng, 3))
        with pytest.raises(DomainError):
            RadialFamily(pure3, (1e-3, 1e-2))
        with pytest.raises(DomainError):
            RadialFamily(pure3, mixer="other")


class TestPureEqualities:
    def test_regular(self, regular_f, pure3, rng):
        a, b = random_observable(rng, 3), random_observable(rng, 3)
        rep = pure_equalities(pure3, regular_f, a, b)
        assert rep.verdict == "equality"
        for key in ("product_diff", "skew_diff_a", "skew_diff_b", "corr_diff"):
            assert rep.details[key] <= 1e-9

    def test_non_regular_has_zero_skew(self, pure3, rng):
        a, b = random_observable(rng, 3), random_observable(rng, 3)
        for f in (rld(), bkm()):
            rep = pure_equalities(pure3, f, a, b)
            assert rep.rhs == 0.0
            assert rep.details["skew_diff_a"] > 1e-3

    def test_requires_pure(self, rng):
        with pytest.raises(DomainError):
            pure_equalities(random_state(rng, 2), sld(), np.eye(2), np.eye(2))

    def test_product_rule(self, pure3, rng):
        p = pure3.matrix
        a, b = random_observable(rng, 3), random_observable(rng, 3)
        lhs = np.trace((p @ a @ p) @ (p @ b @ p))
        rhs = np.trace(p @ a @ p) * np.trace(p @ b @ p)
        assert lhs == pytest.approx(rhs)

    def test_boundary_extension_of_tilde_mean(self, any_f):
        y = np.array([0.1, 0.5, 1.0])
        m = scalar_mean(tilde(any_f), 0.0, y)
        if any_f.regular:
            np.testing.assert_array_equal(m, 0.0)
        else:
            np.testing.assert_allclose(m, y / 2)
        # continuity at the boundary; the approach can be as slow as x**beta
        edge = float(scalar_mean(tilde(any_f), 0.0, 0.5))
        errs = [abs(scalar_mean(tilde(any_f), 10.0**-k, 0.5) - edge) for k in (4, 8, 12, 16)]
        assert all(b <= a for a, b in zip(errs, errs[1:]))
        assert errs[-1] < 1e-2


class TestRadialSweep:
    def test_sld_converges_to_pure_value(self, pure3, rng):
        a, b = random_observable(rng, 3), random_observable(rng, 3)
        sweep = radial_limit_sweep(RadialFamily(pure3), [sld()], a, b)
        assert sweep.residuals_monotone()
        assert sweep.residuals[0, -1] <= 1e-3 * sweep.scale
        assert len(sweep.rows) == len(DEFAULT_EPSILONS)

    def test_spread_shrinks(self, pure3, rng):
        a, b = random_observable(rng, 3), random_observable(rng, 3)
        sweep = radial_limit_sweep(RadialFamily(pure3), [sld(), wy(), wyd(0.25), bridge(0.75)], a, b)
        assert sweep.spread_monotone()
        assert sweep.residuals_monotone()

    def test_slow_rate_for_small_beta(self, pure3, rng):
        # q_f(eps) approaches the limit roughly like eps**beta, so WYD(0.25) lags far behind SLD
        a, b = random_observable(rng, 3), random_observable(rng, 3)
        sweep = radial_limit_sweep(RadialFamily(pure3), [sld(), wyd(0.25)], a, b)
        r = sweep.residuals[:, -1]
        assert r[1] > 100 * r[0]
        assert not sweep.converged()

    def test_proportional_observables(self, pure3, rng):
        b = random_observable(rng, 3)
        sweep = radial_limit_sweep(RadialFamily(pure3), [sld(), wy()], 2 * b + np.eye(3), b)
        assert np.abs(sweep.q).max() < 1e-10
        assert sweep.limit == pytest.approx(0.0, abs=1e-12)

    def test_rejects_non_regular(self, pure3):
        with pytest.raises(DomainError):
            radial_limit_sweep(RadialFamily(pure3), [sld(), bkm()], np.eye(3), np.eye(3))
