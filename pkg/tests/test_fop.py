import math

import numpy as np
import pytest

from fisherbound.errors import DomainError, ParameterError
from fisherbound.fop import (
    CATALOG_KEYS,
    FunctionGrid,
    Kind,
    bkm,
    bridge,
    catalog,
    check_axioms,
    custom,
    default_grid,
    default_grid_listing,
    eval_f,
    f_zero,
    from_key,
    rld,
    sld,
    sqrt_fn,
    tilde,
    tilde_leq,
    wy,
    wyd,
)


class TestEvaluation:
    def test_sld_at_three(self):
        assert eval_f(sld(), 3) == pytest.approx(2.0, abs=1e-15)

    def test_wy_at_four(self):
        assert eval_f(wy(), 4) == pytest.approx(2.25, abs=1e-15)

    def test_bkm_normalized(self):
        assert eval_f(bkm(), 1.0) == 1.0

    def test_wyd_removable_singularity(self):
        assert eval_f(wyd(0.25), 1 + 1e-9) == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize("beta", [0.1, 0.25, 0.49, -0.5])
    def test_wyd_series_matches_closed_form_off_the_series_radius(self, beta):
        # just outside the series radius both branches must agree to high accuracy
        from mpmath import mp, mpf

        mp.dps = 40
        for x in (1 - 2e-6, 1 + 2e-6, 1 + 5e-7, 1 - 5e-7):
            b = mpf(beta)
            xm = mpf(x)
            ref = b * (1 - b) * (xm - 1) ** 2 / ((xm**b - 1) * (xm ** (1 - b) - 1))
            assert eval_f(wyd(beta), x) == pytest.approx(float(ref), rel=1e-12)

    def test_bkm_against_high_precision(self):
        from mpmath import mp, mpf, log

        mp.dps = 40
        for x in (1e-4, 0.5, 1 - 1e-7, 1 + 3e-7, 7.0, 1e4):
            ref = (mpf(x) - 1) / log(mpf(x))
            assert eval_f(bkm(), x) == pytest.approx(float(ref), rel=1e-12)

    def test_vectorized(self, any_f):
        x = np.array([0.5, 1.0, 2.0])
        out = eval_f(any_f, x)
        assert out.shape == (3,)
        assert out[1] == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("bad", [0.0, -1.0])
    def test_nonpositive_argument(self, bad):
        with pytest.raises(DomainError):
            eval_f(sld(), bad)


class TestFZero:
    def test_table_values(self):
        assert f_zero(sld()) == 0.5
        assert f_zero(wy()) == 0.25
        assert f_zero(wyd(0.25)) == 0.1875
        assert f_zero(rld()) == 0.0
        assert f_zero(bkm()) == 0.0
        assert f_zero(wyd(-0.5)) == 0.0
        assert f_zero(sqrt_fn()) == 0.0

    def test_bridge_value(self):
        assert f_zero(bridge(0.75)) == pytest.approx(0.5 ** (4 / 3))

    def test_consistent_with_small_x(self, any_f):
        # convergence can be as slow as x**0.1 or 1/log(x), so check the trend
        errs = [abs(eval_f(any_f, 10.0**-k) - any_f.f_at_zero) for k in (4, 8, 12, 16)]
        assert all(b <= a for a, b in zip(errs, errs[1:]))
        assert errs[-1] < 0.03

    def test_regular_flag(self):
        assert sld().regular and wy().regular and wyd(0.1).regular and bridge(0.5).regular
        assert not rld().regular and not bkm().regular and not sqrt_fn().regular
        assert not wyd(-0.5).regular


class TestParameters:
    @pytest.mark.parametrize("beta", [0.0, 0.51, -1.0, 1.0, math.nan])
    def test_wyd_out_of_range(self, beta):
        with pytest.raises(ParameterError):
            wyd(beta)

    @pytest.mark.parametrize("gamma", [0.49, 1.01])
    def test_bridge_out_of_range(self, gamma):
        with pytest.raises(ParameterError):
            bridge(gamma)

    def test_wyd_half_is_wy(self):
        x = default_grid().array
        np.testing.assert_allclose(eval_f(wyd(0.5), x), eval_f(wy(), x), rtol=1e-12)

    def test_bridge_endpoints(self):
        x = default_grid().array
        np.testing.assert_allclose(eval_f(bridge(1.0), x), eval_f(sld(), x), rtol=1e-14)
        np.testing.assert_allclose(eval_f(bridge(0.5), x), eval_f(wy(), x), rtol=1e-12)


class TestTilde:
    def test_examples(self):
        assert eval_f(tilde(sld()), 3) == pytest.approx(1.5)
        assert eval_f(tilde(wy()), 4) == pytest.approx(2.0)
        assert eval_f(tilde(rld()), 3) == pytest.approx(2.0)

    def test_regular_goes_to_non_regular(self, any_f):
        assert tilde(any_f).regular is not any_f.regular

    def test_non_regular_gives_arithmetic(self):
        x = default_grid().array
        for f in (rld(), bkm(), sqrt_fn(), wyd(-0.5)):
            np.testing.assert_allclose(eval_f(tilde(f), x), (1 + x) / 2, rtol=1e-15)

    def test_wyd_closed_form(self):
        x = default_grid().array
        for b in (0.1, 0.25, 0.49):
            np.testing.assert_allclose(eval_f(tilde(wyd(b)), x), (x**b + x ** (1 - b)) / 2,
                                       rtol=1e-10)

    def test_tilde_satisfies_axioms(self, any_f):
        assert check_axioms(tilde(any_f)).ok

    def test_listing_has_44_entries(self):
        assert len(default_grid_listing()) == 44
        assert len(default_grid()) == 43


class TestOrdering:
    def test_sld_below_wy(self):
        assert tilde_leq(sld(), wy())

    def test_reflexive(self, any_f):
        assert tilde_leq(any_f, any_f)

    def test_wyd_not_below_wy(self):
        assert not tilde_leq(wyd(0.25), wy())
        assert tilde_leq(wy(), wyd(0.25))

    def test_chain(self):
        chain = [sld(), wy(), wyd(0.25), wyd(0.1), rld()]
        for f, g in zip(chain, chain[1:]):
            assert tilde_leq(f, g)

    def test_inconsistent_custom_is_caught(self):
        # a custom f whose f(0) contradicts its values breaks the equivalence
        liar = custom(lambda x: (1 + x) / 2, 0.5, "liar")
        fake = custom(lambda x: (1 + x) / 2, 0.0, "fake")
        assert tilde_leq(liar, fake)


class TestAxioms:
    def test_catalog_passes(self, any_f):
        rep = check_axioms(any_f)
        assert rep.ok
        assert -rep.lhs <= 1e-12

    def test_bkm_and_negative_wyd(self):
        assert check_axioms(bkm()).ok
        assert check_axioms(wyd(-0.5)).ok

    def test_square_fails_symmetry(self):
        rep = check_axioms(custom(lambda x: x**2, 0.0, "square"))
        assert not rep.ok
        assert rep.details["symmetry"] > 1e-3
        assert rep.details["verified_operator_monotone"] is False


class TestCatalog:
    def test_keys_roundtrip(self):
        for k in CATALOG_KEYS:
            assert from_key(k).label == k

    def test_tilde_key(self):
        f = from_key("tilde:sld")
        assert f.kind is Kind.TILDE
        assert eval_f(f, 3) == pytest.approx(1.5)

    @pytest.mark.parametrize("key", ["nope", "wyd:x", "foo:1"])
    def test_unknown_keys(self, key):
        with pytest.raises(KeyError):
            from_key(key)

    def test_regular_only(self):
        assert all(f.regular for f in catalog(regular_only=True))
        assert len(catalog()) == len(CATALOG_KEYS)


class TestGrid:
    def test_must_increase(self):
        with pytest.raises((DomainError, ValueError)):
            FunctionGrid((1.0, 0.5))

    def test_must_be_positive(self):
        with pytest.raises((DomainError, ValueError)):
            FunctionGrid((0.0, 1.0))
