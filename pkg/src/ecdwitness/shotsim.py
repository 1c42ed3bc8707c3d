"""Finite-shot simulation of the conditional-displacement readout circuits.

A control qubit prepared in |+> picks up the displacement's characteristic
value: <sigma_x> + i <sigma_y> = tr[rho D].  One chained qubit covers both
parties (with a sign flip on the first argument from composing the two
controlled displacements); two local qubits reconstruct the same complex
number from four two-qubit correlators.  Only the outcome probabilities are
simulated, never the qubit dynamics.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .charwig import char_fn
from .fock import DensityOperator, PureState
from .witness import PhaseSpacePointSet, WitnessMatrix, assemble_measured

LAYOUT_ONE_QUBIT = "one_qubit"
LAYOUT_TWO_QUBIT = "two_qubit"


@dataclass(frozen=True)
class MeasurementSetting:
    """One circuit configuration: an entry (j, k) and a basis label."""

    entry: tuple[int, int]
    basis: str  # one qubit: "x"|"y"; two qubits: "xx"|"xy"|"yx"|"yy"
    layout: str = LAYOUT_ONE_QUBIT


@dataclass(frozen=True)
class MeasurementPlan:
    points: PhaseSpacePointSet
    shots: int = 10000
    confidence: float = 0.95
    layout: str = LAYOUT_ONE_QUBIT
    seed: int = 0

    def __post_init__(self):
        if self.shots < 1:
            raise ValueError("need at least one shot per setting")
        if not 0.0 < self.confidence < 1.0:
            raise ValueError("confidence must lie in (0, 1)")
        if self.layout not in (LAYOUT_ONE_QUBIT, LAYOUT_TWO_QUBIT):
            raise ValueError(f"unknown layout {self.layout!r}")

    def settings(self) -> list[MeasurementSetting]:
        bases = ("x", "y") if self.layout == LAYOUT_ONE_QUBIT \
            else ("xx", "xy", "yx", "yy")
        out = []
        n = self.points.n_points
        for j in range(n):
            for k in range(j + 1, n):
                for b in bases:
                    out.append(MeasurementSetting((j, k), b, self.layout))
        return out

    def setting_counts(self) -> dict:
        """Reported setting budget: the n_q N(N-1) count and the dedup count.

        The raw count charges every ordered pair; conjugate symmetry halves
        it, which is what `settings()` actually enumerates.
        """
        n = self.points.n_points
        n_q = 1 if self.layout == LAYOUT_ONE_QUBIT else 2
        return {"raw": n_q * n * (n - 1), "deduplicated": len(self.settings())}


@dataclass(frozen=True)
class MeasurementRecord:
    setting: MeasurementSetting
    shots: int
    plus_count: int
    estimator: float
    radius: float

    def __post_init__(self):
        if abs(self.estimator) > 1.0 + 1e-12:
            raise ValueError("estimator out of range")
        if self.radius < 0:
            raise ValueError("radius must be nonnegative")


def hoeffding_radius(shots: int, confidence: float) -> float:
    """Guaranteed half-width for a mean of +-1 outcomes.

    Hoeffding for variables of range (b - a) gives
    t = (b - a) sqrt(ln(2 / (1 - confidence)) / (2 shots)); the +-1 outcomes
    span range 2, so the unit-range textbook half-width doubles.  (The
    unit-range value would under-cover the +-1 estimator by design.)
    """
    return float(2.0 * np.sqrt(np.log(2.0 / (1.0 - confidence)) / (2.0 * shots)))


def ecd_expectations(state: PureState | DensityOperator, xi_pair,
                     layout: str = LAYOUT_ONE_QUBIT) -> dict:
    """Ideal qubit expectation values for one displacement-pair setting.

    Both layouts reconstruct the same complex value
    z = tr[rho D_A(xi^A) D_B(xi^B)]:

    - one chained qubit measures <sx> = Re z, <sy> = Im z directly (the first
      chained gate carries a negated argument to cancel the composition sign);
    - two local qubits give the four correlators, combined as
      Re z = <sx sx> - <sy sy>, Im z = <sx sy> + <sy sx>.
    """
    xi_a, xi_b = xi_pair
    xi_a = np.atleast_1d(np.asarray(xi_a, complex))
    xi_b = np.atleast_1d(np.asarray(xi_b, complex))
    z = char_fn(state, np.concatenate([xi_a, xi_b]), check=False)
    if layout == LAYOUT_ONE_QUBIT:
        return {"x": z.real, "y": z.imag, "value": z}
    if layout == LAYOUT_TWO_QUBIT:
        # w = tr[rho D_A(xi^A) D_B(-xi^B)] enters the individual correlators
        w = char_fn(state, np.concatenate([xi_a, -xi_b]), check=False)
        corr = {
            "xx": 0.5 * (z + w).real,
            "yy": 0.5 * (w - z).real,
            "xy": 0.5 * (z - w).imag,
            "yx": 0.5 * (z + w).imag,
        }
        corr["value"] = complex(corr["xx"] - corr["yy"],
                                corr["xy"] + corr["yx"])
        return corr
    raise ValueError(f"unknown layout {layout!r}")


def _setting_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed,
                                                        spawn_key=(index,)))


def sample(plan: MeasurementPlan,
           state: PureState | DensityOperator) -> list[MeasurementRecord]:
    """Draw +-1 outcomes for every setting; estimators are sample means.

    Each setting gets its own RNG stream derived from (seed, setting index),
    so results do not depend on evaluation order.
    """
    records = []
    radius = hoeffding_radius(plan.shots, plan.confidence)
    for idx, setting in enumerate(plan.settings()):
        j, k = setting.entry
        xi_a = plan.points.pairs[j][0] - plan.points.pairs[k][0]
        xi_b = plan.points.pairs[j][1] - plan.points.pairs[k][1]
        expectations = ecd_expectations(state, (xi_a, xi_b), setting.layout)
        mean = float(np.clip(expectations[setting.basis], -1.0, 1.0))
        rng = _setting_rng(plan.seed, idx)
        plus = int(rng.binomial(plan.shots, (1.0 + mean) / 2.0))
        est = 2.0 * plus / plan.shots - 1.0
        records.append(MeasurementRecord(setting, plan.shots, plus, est, radius))
    return records


def exact_records(plan: MeasurementPlan,
                  state: PureState | DensityOperator) -> list[MeasurementRecord]:
    """Infinite-shot idealization: estimator = truth, radius = 0."""
    records = []
    for setting in plan.settings():
        j, k = setting.entry
        xi_a = plan.points.pairs[j][0] - plan.points.pairs[k][0]
        xi_b = plan.points.pairs[j][1] - plan.points.pairs[k][1]
        val = float(ecd_expectations(state, (xi_a, xi_b), setting.layout)[setting.basis])
        plus = int(round((1.0 + val) / 2.0 * plan.shots))
        records.append(MeasurementRecord(setting, plan.shots, plus, val, 0.0))
    return records


def assemble_measured_witness(records: list[MeasurementRecord],
                              points: PhaseSpacePointSet) -> WitnessMatrix:
    """Combine per-setting records into a measured-mode witness matrix.

    The complex entry estimate combines the basis estimators of its setting
    group; its radius is the quadrature sum of the real and imaginary radii.
    """
    n = points.n_points
    grouped: dict = {}
    for rec in records:
        grouped.setdefault(rec.setting.entry, {})[rec.setting.basis] = rec
    entries = {}
    radii = np.zeros((n, n))
    for j in range(n):
        for k in range(j + 1, n):
            if (j, k) not in grouped:
                raise ValueError(f"no records for entry ({j}, {k})")
            group = grouped[(j, k)]
            if set(group) == {"x", "y"}:
                re, im = group["x"].estimator, group["y"].estimator
                r_re, r_im = group["x"].radius, group["y"].radius
            elif set(group) == {"xx", "xy", "yx", "yy"}:
                re = group["xx"].estimator - group["yy"].estimator
                im = group["xy"].estimator + group["yx"].estimator
                r_re = group["xx"].radius + group["yy"].radius
                r_im = group["xy"].radius + group["yx"].radius
            else:
                raise ValueError(f"incomplete basis set for entry ({j}, {k}): "
                                 f"{sorted(group)}")
            entries[(j, k)] = complex(re, im)
            radii[j, k] = radii[k, j] = float(np.hypot(r_re, r_im))
    return assemble_measured(entries, n, radii)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def records_to_jsonl(records: list[MeasurementRecord]) -> str:
    lines = []
    for rec in records:
        lines.append(json.dumps({
            "setting": {"entry": list(rec.setting.entry),
                        "basis": rec.setting.basis,
                        "layout": rec.setting.layout},
            "shots": rec.shots,
            "plus_count": rec.plus_count,
            "estimator": rec.estimator,
            "radius": rec.radius,
        }, sort_keys=True))
    return "\n".join(lines) + "\n"


def records_from_jsonl(text: str) -> list[MeasurementRecord]:
    records = []
    for line in text.strip().splitlines():
        obj = json.loads(line)
        setting = MeasurementSetting(tuple(obj["setting"]["entry"]),
                                     obj["setting"]["basis"],
                                     obj["setting"]["layout"])
        records.append(MeasurementRecord(setting, int(obj["shots"]),
                                         int(obj["plus_count"]),
                                         float(obj["estimator"]),
                                         float(obj["radius"])))
    return records
