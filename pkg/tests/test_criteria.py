import json

import numpy as np
import numpy.testing as npt
import pytest

from splitdicke import criteria
from splitdicke.criteria import (
    CRITERIA,
    appendix_criteria,
    entanglement_main,
    evaluate,
    evaluate_all,
    first_moment_criterion,
    reid_criterion,
    steering_normalized,
    steering_raw,
    uncertainty_obs1,
)
from splitdicke.exceptions import DegenerateStateError, InvalidArgumentError
from splitdicke.moments import GainVector, moment_set
from splitdicke.schemas import CRITERION_REPORT, validate
from splitdicke.splitting import random_separable, split_binomial, split_exact
from splitdicke.states import dicke, one_axis_twisted, polarized, product_dicke, random_symmetric


class TestUncertainty:
    @pytest.mark.parametrize("state", [dicke(4), polarized(4, "z"), polarized(9, "x")])
    def test_saturating_states(self, state):
        rep = uncertainty_obs1(state)
        npt.assert_allclose(rep.lhs, 0.25, atol=1e-12)
        assert not rep.violated

    def test_dicke_example(self):
        rep = uncertainty_obs1(dicke(4))
        assert rep.components["factor_z"] == pytest.approx(0.25)
        assert rep.components["var_C"] + rep.components["var_S"] == pytest.approx(1.0)

    @pytest.mark.parametrize("n", [10, 21])
    def test_random_states(self, n, rng):
        for _ in range(200):
            rep = uncertainty_obs1(random_symmetric(n, rng))
            assert rep.lhs >= 0.25 - 1e-12

    def test_binomial_split_matches_symmetric(self):
        a = uncertainty_obs1(one_axis_twisted(30, 0.1))
        b = uncertainty_obs1(split_binomial(one_axis_twisted(30, 0.1)))
        npt.assert_allclose(a.lhs, b.lhs, rtol=1e-10)


class TestSteering:
    def test_dicke_violates(self):
        rep = steering_raw(split_binomial(dicke(100)))
        assert rep.violated and rep.ratio < 1
        assert set(rep.gains) == {"x", "y", "z"}

    def test_product_dicke_not_violated(self):
        rep = steering_raw(product_dicke(100))
        assert not rep.violated
        npt.assert_allclose(rep.ratio, 1.0, rtol=0.05)
        # the optimal gains vanish for a product state
        npt.assert_allclose(list(rep.gains.values()), 0, atol=1e-12)

    def test_polarized_z_zero_gain(self):
        rep = steering_raw(split_exact(polarized(100, "z"), 50), gains="zero")
        npt.assert_allclose(rep.ratio, 1.0, rtol=0.05)
        assert not rep.violated

    def test_fallback_is_flagged(self):
        rep = steering_raw(split_exact(polarized(20, "z"), 10), gains="auto")
        assert "gain_fallback:z" in rep.notes
        assert rep.gains["z"] == 0.0

    def test_normalized_large_dicke(self):
        rep = steering_normalized(split_binomial(dicke(1000)), gains="auto")
        npt.assert_allclose(rep.ratio, 4 / 1000, rtol=0.1)

    def test_normalized_product_dicke(self):
        rep = steering_normalized(product_dicke(1000), gains="auto")
        npt.assert_allclose([rep.components["V_a"], rep.components["E_a"], rep.ratio], 1.0, rtol=0.1)

    @pytest.mark.parametrize("gains", [None, "zero", GainVector(-0.5, -0.5, 0.5), (1, 1, 1)])
    def test_gain_forms(self, gains):
        rep = steering_normalized(split_binomial(dicke(20)), gains=gains)
        assert rep.gains is not None

    def test_bad_gains(self):
        with pytest.raises(InvalidArgumentError):
            steering_raw(split_binomial(dicke(8)), gains="best")
        with pytest.raises(InvalidArgumentError):
            steering_normalized(split_binomial(dicke(8)), gains="auto", variant="planar")

    def test_reid_inapplicable_for_dicke(self):
        rep = reid_criterion(split_binomial(dicke(100)))
        assert rep.rhs == 0 and rep.ratio is None and not rep.violated
        assert any("inapplicable" in n for n in rep.notes)

    def test_reid_coherent_saturation(self):
        rep = reid_criterion(split_exact(polarized(100, "x"), 50), gains="zero")
        npt.assert_allclose(rep.ratio, 1.0, rtol=1e-9)
        assert not rep.violated

    def test_reid_detects_squeezing(self):
        rep = reid_criterion(split_binomial(one_axis_twisted(200, 0.05)))
        assert rep.violated


class TestEntanglement:
    def test_dicke_normalized(self):
        rep = entanglement_main(split_binomial(dicke(1000)), "normalized")
        npt.assert_allclose(rep.ratio, 1 / 1000, rtol=0.1)

    def test_polarized_z(self):
        rep = entanglement_main(split_binomial(polarized(100, "z")), "normalized")
        npt.assert_allclose(rep.ratio, 50, rtol=0.1)
        assert not rep.violated

    def test_polarized_x_near_saturation(self):
        rep = entanglement_main(split_binomial(polarized(1000, "x")), "normalized")
        npt.assert_allclose(rep.ratio, 1, rtol=0.02)

    def test_hierarchy(self):
        # steering bound sits about four times below the entanglement bound
        state = split_binomial(dicke(1000))
        ms = moment_set(state)
        ratio = entanglement_main(state, "normalized", ms).rhs / steering_normalized(state, moments=ms).rhs
        assert 3.5 <= ratio <= 4.5

    @pytest.mark.parametrize("make", [
        lambda rng: split_exact(dicke(10), 5), lambda rng: split_binomial(polarized(9, "x")),
        lambda rng: split_binomial(one_axis_twisted(12, 0.2)), lambda rng: random_separable(8, 3, rng),
        lambda rng: product_dicke(8), lambda rng: split_exact(random_symmetric(9, rng), 4),
    ])
    def test_bound_orderings(self, make, rng):
        state = make(rng)
        ms = moment_set(state)
        raw = entanglement_main(state, "raw", ms).rhs
        sq = entanglement_main(state, "sqrt", ms).rhs
        ab = entanglement_main(state, "abs", ms).rhs
        assert sq >= raw - 1e-10 and raw >= 0
        assert ab <= sq + 1e-10
        nsq = entanglement_main(state, "normalized-sqrt", ms).rhs
        nab = entanglement_main(state, "normalized-abs", ms).rhs
        assert nab <= nsq + 1e-10

    @pytest.mark.parametrize("make", [
        lambda rng: split_exact(dicke(10), 5), lambda rng: split_binomial(one_axis_twisted(40, 0.1)),
        lambda rng: random_separable(8, 3, rng, "binomial"), lambda rng: product_dicke(12),
    ])
    def test_planar_matches_xy(self, make, rng):
        state = make(rng)
        ms = moment_set(state)
        a, b = entanglement_main(state, "normalized", ms), entanglement_main(state, "planar", ms)
        npt.assert_allclose([a.lhs, a.rhs], [b.lhs, b.rhs], atol=1e-10)
        s, p = steering_normalized(state, moments=ms), steering_normalized(state, variant="planar", moments=ms)
        npt.assert_allclose([s.lhs, s.rhs], [p.lhs, p.rhs], atol=1e-10)

    def test_components_recombine(self, rng):
        state = split_binomial(one_axis_twisted(60, 0.08))
        for rep in evaluate_all(state, [c for c in CRITERIA if c not in ("appendix-correlation",)]):
            c = rep.components
            if "factor_z" in c and "factor_xy" in c:
                npt.assert_allclose(c["factor_z"] * c["factor_xy"], rep.lhs, rtol=1e-12)
            if "factor_z" in c and "V_a" in c:
                npt.assert_allclose(c["factor_z"] * c["V_a"], rep.lhs, rtol=1e-12)
                npt.assert_allclose(c["E_a"] / 4, rep.rhs, rtol=1e-12)

    def test_unknown_variant(self):
        with pytest.raises(InvalidArgumentError):
            entanglement_main(product_dicke(8), "cubic")


class TestFirstMoment:
    def test_dicke_inapplicable(self):
        for v in ("summed", "giovannetti"):
            rep = first_moment_criterion(split_binomial(dicke(20)), v)
            assert rep.ratio is None and not rep.violated

    def test_polarized_x_not_violated(self):
        rep = first_moment_criterion(split_binomial(polarized(100, "x")), "summed")
        assert rep.ratio >= 1

    def test_giovannetti_axis(self):
        rep = first_moment_criterion(split_binomial(polarized(40, "x")), "giovannetti")
        assert "V=J_y" in rep.notes
        rep_y = first_moment_criterion(split_binomial(polarized(40, "y")), "giovannetti")
        assert "V=J_x" in rep_y.notes
        with pytest.raises(InvalidArgumentError):
            first_moment_criterion(split_binomial(polarized(4, "x")), "giovannetti", axis="z")


class TestAppendix:
    def test_correlation_binomial(self):
        rep = appendix_criteria(split_binomial(dicke(100)), "correlation-binomial")
        npt.assert_allclose([rep.lhs, rep.rhs], [631.25, 618.75], rtol=1e-12)
        assert rep.violated and rep.direction == "upper"

    def test_correlation_needs_single_sector(self):
        with pytest.raises(InvalidArgumentError):
            appendix_criteria(split_binomial(dicke(10)), "correlation")
        rep = appendix_criteria(split_exact(dicke(10), 5), "correlation")
        npt.assert_allclose(rep.rhs, 2.5 * 2.5)

    def test_dicke_variance(self):
        exact = appendix_criteria(split_exact(dicke(100), 50), "dicke-variance")
        npt.assert_allclose(exact.lhs, 100 / 8 * 98 / 99 * 2, rtol=1e-12)
        assert exact.violated
        binom = appendix_criteria(split_binomial(dicke(100)), "dicke-variance")
        assert abs(binom.lhs - binom.rhs) <= 1e-8 and not binom.violated

    def test_singlet(self):
        rep = appendix_criteria(product_dicke(8), "singlet")
        assert not rep.violated


class TestBundles:
    def test_every_criterion_report_validates(self):
        state = split_binomial(one_axis_twisted(24, 0.1))
        reports = evaluate_all(state)
        names = {r.criterion for r in reports}
        assert names == set(CRITERIA) - {"appendix-correlation"}
        for r in reports:
            validate(json.loads(r.to_json()), CRITERION_REPORT)

    def test_explicit_list_raises(self):
        with pytest.raises(InvalidArgumentError):
            evaluate_all(split_binomial(dicke(8)), ["appendix-correlation"])

    def test_unknown_name(self):
        with pytest.raises(InvalidArgumentError):
            evaluate(product_dicke(8), "bell")

    def test_degenerate_uncertainty(self):
        from splitdicke.states import SectorState
        from splitdicke.spin import SpinSector
        with pytest.raises(DegenerateStateError):
            uncertainty_obs1(SectorState(SpinSector(0, 0), np.ones((1, 1))))

    def test_violation_flag_matches_sides(self, rng):
        for rep in evaluate_all(split_binomial(one_axis_twisted(40, 0.05))):
            if rep.direction == "lower" and rep.ratio is not None:
                assert rep.violated == (rep.lhs < rep.rhs * (1 - criteria.SATURATION_RTOL))


class TestSeparable:
    @pytest.mark.parametrize("sectors", ["single", "binomial"])
    @pytest.mark.parametrize("kind", ["haar", "coherent"])
    def test_no_violation(self, sectors, kind, rng):
        names = [c for c in CRITERIA if c != "uncertainty"]
        for _ in range(15):
            state = random_separable(8, 5, rng, sectors, kind=kind)
            for rep in evaluate_all(state, "all"):
                if rep.criterion in names:
                    assert not rep.violated, rep.criterion
