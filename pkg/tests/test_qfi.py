import numpy as np
import pytest

from fisherbound.errors import DomainError, InternalConsistencyError, SingularStateError
from fisherbound.fop import catalog, sld, tilde, wy, wyd
from fisherbound.means import scalar_mean
from fisherbound.qfi import (
    MetricContext,
    area,
    c_correlation,
    clamp_nonnegative,
    f_correlation,
    inner,
    norm_squared,
    re_correlation,
    require_faithful,
    skew_information,
    variance_split,
)
from fisherbound.states import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    DensityMatrix,
    center,
    commutator_expectation,
    commutator_tangent,
    random_observable,
    random_pure,
    random_state,
    variance,
)

from conftest import random_triple, two_level


def _mpow(rho, p):
    sd = rho.spec
    return sd.from_eigenbasis(np.diag(sd.eigenvalues**p))


class TestMetric:
    def test_commuting_tangent_gives_inverse_weight(self, any_f, rng):
        rho = random_state(rng, 3)
        u = rho.spec.eigenvectors
        d = rng.normal(size=3)
        a = (u * d) @ u.conj().T
        a -= np.trace(a) / 3 * np.eye(3)
        expected = np.trace(np.linalg.inv(rho.matrix) @ a @ a).real
        assert inner(MetricContext(rho, any_f), a, a) == pytest.approx(expected, rel=1e-10)

    def test_maximally_mixed_qubit(self, any_f):
        ctx = MetricContext(DensityMatrix(np.eye(2) / 2), any_f)
        assert inner(ctx, SIGMA_Z, SIGMA_Z) == pytest.approx(4.0)

    def test_symmetric(self, any_f, rng):
        rho = random_state(rng, 4)
        u = commutator_tangent(rho, random_observable(rng, 4))
        v = commutator_tangent(rho, random_observable(rng, 4))
        ctx = MetricContext(rho, any_f)
        assert inner(ctx, u, v) == pytest.approx(inner(ctx, v, u), abs=1e-10)
        assert norm_squared(ctx, u) > 0

    def test_requires_faithful(self, rng):
        ctx = MetricContext(random_pure(rng, 3), sld())
        u = commutator_tangent(ctx.rho, random_observable(rng, 3))
        with pytest.raises(SingularStateError):
            inner(ctx, u, u)
        with pytest.raises(DomainError):
            require_faithful(ctx.rho, "test")

    def test_metric_ordering(self, rng):
        # larger ftilde means a smaller f(0)/f, hence a smaller (f(0) times the) metric
        rho, a, _ = random_triple(rng, 3)
        u = commutator_tangent(rho, a)
        vals = [f.f_at_zero * norm_squared(MetricContext(rho, f), u) for f in (sld(), wy(), wyd(0.25))]
        assert vals[0] >= vals[1] >= vals[2]

    def test_monotone_under_partial_trace(self, any_f, rng):
        rho = random_state(rng, 4)
        u = commutator_tangent(rho, random_observable(rng, 4))

        def ptrace(m):
            return np.einsum("ijkj->ik", m.reshape(2, 2, 2, 2))

        small = DensityMatrix(ptrace(rho.matrix))
        before = norm_squared(MetricContext(rho, any_f), u)
        after = norm_squared(MetricContext(small, any_f), ptrace(u))
        assert after <= before * (1 + 1e-10)


class TestArea:
    def test_proportional(self, regular_f, rng):
        rho = random_state(rng, 3)
        u = commutator_tangent(rho, random_observable(rng, 3))
        assert area(MetricContext(rho, regular_f), u, 2.5 * u) == pytest.approx(0.0, abs=1e-6)

    def test_bounded_by_norms(self, regular_f, rng):
        rho, a, b = random_triple(rng, 4)
        ctx = MetricContext(rho, regular_f)
        u, v = commutator_tangent(rho, a), commutator_tangent(rho, b)
        assert area(ctx, u, v) <= np.sqrt(norm_squared(ctx, u) * norm_squared(ctx, v)) * (1 + 1e-12)

    @pytest.mark.parametrize("l1", [0.6, 0.75, 0.9])
    def test_two_level_area_equals_correlation_form(self, regular_f, l1):
        rho = two_level(l1)
        a, b = -SIGMA_Y, SIGMA_X
        ctx = MetricContext(rho, regular_f)
        lhs = 0.5 * regular_f.f_at_zero * area(ctx, commutator_tangent(rho, a), commutator_tangent(rho, b))
        ia, ib = skew_information(ctx, a), skew_information(ctx, b)
        rc = re_correlation(ctx, a, b)
        assert rc == pytest.approx(0.0, abs=1e-15)
        assert lhs == pytest.approx(np.sqrt(ia * ib - rc * rc), rel=1e-12)
        assert lhs > 0


class TestSkewInformation:
    def test_metric_identity(self, regular_f, rng):
        rho, a, _ = random_triple(rng, 4)
        ctx = MetricContext(rho, regular_f)
        via_metric = 0.5 * regular_f.f_at_zero * norm_squared(ctx, commutator_tangent(rho, a))
        assert skew_information(ctx, a) == pytest.approx(via_metric, rel=1e-10)

    def test_re_correlation_is_metric_inner_product(self, regular_f, rng):
        rho, a, b = random_triple(rng, 3)
        ctx = MetricContext(rho, regular_f)
        g = inner(ctx, commutator_tangent(rho, a), commutator_tangent(rho, b))
        assert re_correlation(ctx, a, b) == pytest.approx(0.5 * regular_f.f_at_zero * g, rel=1e-9, abs=1e-12)

    def test_correlation_real_and_imaginary_parts(self, any_f, rng):
        rho, a, b = random_triple(rng, 3)
        ctx = MetricContext(rho, any_f)
        corr = f_correlation(ctx, a, b)
        assert corr.real == pytest.approx(re_correlation(ctx, a, b), abs=1e-12)
        assert corr.imag == pytest.approx(commutator_expectation(rho, a, b).imag / 2, abs=1e-12)
        assert f_correlation(ctx, a, a).real == pytest.approx(skew_information(ctx, a), abs=1e-12)

    @pytest.mark.parametrize("beta", [0.1, 0.25, 0.3, 0.49])
    def test_wyd_trace_formula(self, beta, rng):
        rho, a, _ = random_triple(rng, 3)
        rb, rb1 = _mpow(rho, beta), _mpow(rho, 1 - beta)
        expected = -0.5 * np.trace((rb @ a - a @ rb) @ (rb1 @ a - a @ rb1)).real
        assert skew_information(MetricContext(rho, wyd(beta)), a) == pytest.approx(expected, abs=1e-9)

    def test_pure_state_equals_variance(self, regular_f, rng):
        rho = random_pure(rng, 3)
        a = random_observable(rng, 3)
        assert skew_information(MetricContext(rho, regular_f), a) == pytest.approx(variance(rho, a), abs=1e-9)

    def test_wyd_pure_example(self, rng):
        rho = random_pure(rng, 3)
        a = random_observable(rng, 3)
        assert abs(skew_information(MetricContext(rho, wyd(0.3)), a) - variance(rho, a)) <= 1e-9

    def test_commuting_observable_has_no_skew(self, any_f, rng):
        rho = random_state(rng, 3)
        u = rho.spec.eigenvectors
        a = (u * rng.normal(size=3)) @ u.conj().T
        assert skew_information(MetricContext(rho, any_f), a) == pytest.approx(0.0, abs=1e-12)

    def test_non_regular_has_no_skew(self, rng):
        rho, a, _ = random_triple(rng, 3)
        for key in ("rld", "bkm", "sqrt", "wyd:-0.5"):
            f = [g for g in catalog() if g.label == key][0]
            assert skew_information(MetricContext(rho, f), a) == 0.0


class TestCCorrelation:
    @pytest.mark.parametrize("l1", [0.6, 0.75])
    def test_two_level_value(self, regular_f, l1):
        rho = two_level(l1)
        g = tilde(regular_f)
        expected = 2 * scalar_mean(g, l1, 1 - l1)
        assert c_correlation(rho, g, -SIGMA_Y) == pytest.approx(expected, rel=1e-12)

    def test_pure_state_vanishes(self, regular_f, rng):
        rho = random_pure(rng, 4)
        a, b = random_observable(rng, 4), random_observable(rng, 4)
        assert c_correlation(rho, tilde(regular_f), a, b) == pytest.approx(0.0, abs=1e-12)

    def test_arithmetic_on_commuting_is_variance(self, rng):
        rho = random_state(rng, 3)
        u = rho.spec.eigenvectors
        a = (u * rng.normal(size=3)) @ u.conj().T
        assert c_correlation(rho, sld(), a) == pytest.approx(variance(rho, a), rel=1e-12)

    def test_uncentered(self, rng):
        rho, a, b = random_triple(rng, 3)
        raw = c_correlation(rho, sld(), a, b, centered=False)
        assert raw == pytest.approx(0.5 * np.trace(rho.matrix @ (a @ b + b @ a)).real)


class TestVarianceSplit:
    def test_two_level_sld(self):
        q, c = variance_split(MetricContext(two_level(0.75), sld()), -SIGMA_Y)
        assert q == pytest.approx(0.25)
        assert c == pytest.approx(0.75)

    def test_sums_to_variance(self, any_f, rng):
        rho, a, _ = random_triple(rng, 4)
        q, c = variance_split(MetricContext(rho, any_f), a)
        assert q + c == pytest.approx(variance(rho, a), rel=1e-12)

    def test_pure(self, regular_f, rng):
        rho = random_pure(rng, 3)
        a = random_observable(rng, 3)
        q, c = variance_split(MetricContext(rho, regular_f), a)
        assert c == pytest.approx(0.0, abs=1e-12)
        assert q == pytest.approx(variance(rho, a))

    def test_scalar_observable(self, any_f, rng):
        rho = random_state(rng, 3)
        assert variance_split(MetricContext(rho, any_f), 2.0 * np.eye(3)) == (0.0, 0.0)


class TestClamp:
    def test_small_negative(self):
        assert clamp_nonnegative(-1e-12) == 0.0
        assert clamp_nonnegative(0.3) == 0.3

    def test_large_negative(self):
        with pytest.raises(InternalConsistencyError):
            clamp_nonnegative(-1e-3, what="x")

    def test_center_helper(self, rng):
        rho, a, _ = random_triple(rng, 3)
        assert np.trace(rho.matrix @ center(rho, a)).real == pytest.approx(0.0, abs=1e-14)
