"""Finite-shot readout simulation: expectations, sampling, assembly."""

import numpy as np
import pytest

import ecdwitness as ew
from ecdwitness.shotsim import (LAYOUT_ONE_QUBIT, LAYOUT_TWO_QUBIT,
                                MeasurementPlan)


def balanced_plan(**kw):
    pts = ew.PhaseSpacePointSet.from_single_list(ew.fock_bell_points(np.pi / 4))
    defaults = dict(points=pts, shots=2000, confidence=0.95,
                    layout=LAYOUT_ONE_QUBIT, seed=0)
    defaults.update(kw)
    return MeasurementPlan(**defaults)


class TestEcdExpectations:
    def test_zero_displacement(self):
        st = ew.make_state("fock_bell", theta=np.pi / 4)
        out = ew.ecd_expectations(st, (np.zeros(1), np.zeros(1)))
        assert out["x"] == pytest.approx(1.0, abs=1e-12)
        assert out["y"] == pytest.approx(0.0, abs=1e-12)

    def test_vacuum_single_mode(self):
        vac = ew.make_state("vacuum", modes=2)
        xi = 0.7
        out = ew.ecd_expectations(vac, (np.array([xi]), np.array([0j])))
        assert out["x"] == pytest.approx(np.exp(-xi ** 2 / 2), abs=1e-12)
        assert out["y"] == pytest.approx(0.0, abs=1e-12)

    def test_layout_equivalence(self):
        # both circuits reconstruct the same complex matrix element
        st = ew.make_state("fock_bell", theta=np.pi / 4)
        rng = np.random.default_rng(17)
        for _ in range(5):
            xi_a = rng.standard_normal() + 1j * rng.standard_normal()
            xi_b = rng.standard_normal() + 1j * rng.standard_normal()
            one = ew.ecd_expectations(st, ([xi_a], [xi_b]), LAYOUT_ONE_QUBIT)
            two = ew.ecd_expectations(st, ([xi_a], [xi_b]), LAYOUT_TWO_QUBIT)
            assert one["value"] == pytest.approx(two["value"], abs=1e-10)

    def test_two_qubit_correlators_bounded(self):
        st = ew.make_state("cat2", beta=1.0)
        out = ew.ecd_expectations(st, ([0.3 + 0.1j], [0.2j]), LAYOUT_TWO_QUBIT)
        for key in ("xx", "xy", "yx", "yy"):
            assert abs(out[key]) <= 1 + 1e-12


class TestSampling:
    def test_radius_formula(self):
        # the unit-range textbook half-width sqrt(ln 40 / 10^4) = 0.0192 is
        # doubled for the +-1 outcome range; without the factor the empirical
        # coverage lands near 85% instead of the promised 95%
        assert ew.hoeffding_radius(5000, 0.95) == pytest.approx(
            2 * np.sqrt(np.log(40) / 10000), abs=1e-12)
        assert ew.hoeffding_radius(5000, 0.95) == pytest.approx(0.0384, abs=1e-4)

    def test_single_shot_estimator_extreme(self):
        st = ew.make_state("fock_bell", theta=np.pi / 4)
        plan = balanced_plan(shots=1)
        for rec in ew.sample(plan, st):
            assert rec.estimator in (-1.0, 1.0)

    def test_many_shots_concentrate(self):
        vac = ew.make_state("vacuum", modes=2)
        pts = ew.PhaseSpacePointSet.from_single_list([0j, 0.5 + 0j])
        plan = MeasurementPlan(points=pts, shots=10 ** 6, confidence=0.95, seed=1)
        recs = ew.sample(plan, vac)
        truth = np.exp(-0.125)  # e^{-|0.5|^2/2} on both modes -> e^{-0.25}... per mode
        truth = np.exp(-2 * 0.125)
        x_rec = [r for r in recs if r.setting.basis == "x"][0]
        assert abs(x_rec.estimator - truth) < 3 * x_rec.radius

    def test_seeded_and_order_independent(self):
        st = ew.make_state("fock_bell", theta=np.pi / 4)
        plan = balanced_plan(seed=9)
        r1 = ew.sample(plan, st)
        r2 = ew.sample(plan, st)
        assert all(a.plus_count == b.plus_count for a, b in zip(r1, r2))

    def test_setting_counts(self):
        plan = balanced_plan()
        counts = plan.setting_counts()
        n = plan.points.n_points
        assert counts["raw"] == 1 * n * (n - 1)
        assert counts["deduplicated"] == n * (n - 1) // 2 * 2
        assert counts["deduplicated"] <= counts["raw"]
        plan2 = balanced_plan(layout=LAYOUT_TWO_QUBIT)
        assert plan2.setting_counts()["raw"] == 2 * n * (n - 1)


class TestAssembly:
    def test_exact_records_match_exact_matrix(self):
        st = ew.make_state("fock_bell", theta=np.pi / 4)
        pts = ew.PhaseSpacePointSet.from_single_list(
            ew.fock_bell_points(np.pi / 4))
        for layout in (LAYOUT_ONE_QUBIT, LAYOUT_TWO_QUBIT):
            plan = MeasurementPlan(points=pts, shots=100, layout=layout)
            recs = ew.exact_records(plan, st)
            measured = ew.assemble_measured_witness(recs, pts)
            exact = ew.build_C2(st, pts)
            assert np.abs(measured.entries - exact.entries).max() < 1e-12
            assert ew.propagate_error(measured.error_radii) == 0.0

    def test_finite_shot_certification_of_cat(self):
        st = ew.make_state("cat2", beta=2.0)
        pts = ew.PhaseSpacePointSet.from_single_list(ew.cat_points(2.0))
        plan = MeasurementPlan(points=pts, shots=10 ** 4, confidence=0.95,
                               seed=7)
        recs = ew.sample(plan, st)
        res = ew.evaluate(ew.assemble_measured_witness(recs, pts))
        assert res.certified

    def test_inflated_radii_block_certification(self):
        st = ew.make_state("cat2", beta=2.0)
        pts = ew.PhaseSpacePointSet.from_single_list(ew.cat_points(2.0))
        plan = MeasurementPlan(points=pts, shots=20, confidence=0.9999, seed=3)
        recs = ew.sample(plan, st)
        res = ew.evaluate(ew.assemble_measured_witness(recs, pts))
        assert res.delta > res.value
        assert not res.certified

    def test_missing_records_rejected(self):
        st = ew.make_state("fock_bell", theta=np.pi / 4)
        pts = ew.PhaseSpacePointSet.from_single_list(
            ew.fock_bell_points(np.pi / 4))
        plan = balanced_plan()
        recs = ew.sample(plan, st)[:-1]
        with pytest.raises(ValueError):
            ew.assemble_measured_witness(recs, pts)

    def test_jsonl_roundtrip(self):
        st = ew.make_state("fock_bell", theta=np.pi / 4)
        plan = balanced_plan(shots=50)
        recs = ew.sample(plan, st)
        text = ew.records_to_jsonl(recs)
        back = ew.records_from_jsonl(text)
        assert len(back) == len(recs)
        assert all(a.plus_count == b.plus_count for a, b in zip(recs, back))
        assert all(a.setting.entry == b.setting.entry for a, b in zip(recs, back))


class TestCalibration:
    def test_coverage_against_truth(self):
        # fraction of entries within their radius stays above confidence - 2%
        st = ew.make_state("fock_bell", theta=np.pi / 4)
        pts = ew.PhaseSpacePointSet.from_single_list(
            ew.fock_bell_points(np.pi / 4))
        exact = {}
        for j in range(4):
            for k in range(j + 1, 4):
                xi_a = pts.pairs[j][0] - pts.pairs[k][0]
                xi_b = pts.pairs[j][1] - pts.pairs[k][1]
                z = ew.char_fn(st, np.concatenate([xi_a, xi_b]))
                exact[(j, k)] = z
        hits = total = 0
        for seed in range(150):
            plan = MeasurementPlan(points=pts, shots=400, confidence=0.95,
                                   seed=seed)
            for rec in ew.sample(plan, st):
                truth = exact[rec.setting.entry]
                target = truth.real if rec.setting.basis == "x" else truth.imag
                hits += abs(rec.estimator - target) <= rec.radius
                total += 1
        assert hits / total >= 0.93

    def test_no_false_certification_of_separable_states(self):
        from tests.test_charwig import _random_separable
        rng = np.random.default_rng(99)
        pts = ew.PhaseSpacePointSet.from_single_list(
            ew.fock_bell_points(np.pi / 4))
        for trial in range(120):
            rho = _random_separable(rng, (12, 12))
            plan = MeasurementPlan(points=pts, shots=250, confidence=0.95,
                                   seed=trial)
            recs = ew.sample(plan, rho)
            res = ew.evaluate(ew.assemble_measured_witness(recs, pts))
            assert not res.certified
