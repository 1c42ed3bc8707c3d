"""Bochner-type witness matrices and the certified bounds they yield.

The single-party matrix has entries tr[rho D(xi_j - xi_k)]/N; a negative
minimum eigenvalue certifies Wigner negativity and its magnitude lower bounds
the negativity volume.  The two-party variant uses symplectically paired
displacement arguments and additionally lower bounds the distance-based
entanglement measures.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .charwig import char_fn_batch
from .fock import DensityOperator, PureState
from .symplectic import SymplecticMap, identity_map, pair_points

PAIRING_TOL = 1e-10


class MatrixKind(Enum):
    C = "C"
    C2 = "C2"


class MatrixMode(Enum):
    EXACT = "exact"
    MEASURED = "measured"


@dataclass(frozen=True, eq=False)
class PhaseSpacePointSet:
    """N symplectically paired phase-space points (xi^A_k, xi^B_k)."""

    pairs: tuple
    lam: SymplecticMap

    def __post_init__(self):
        pairs = tuple((np.atleast_1d(np.asarray(a, complex)),
                       np.atleast_1d(np.asarray(b, complex)))
                      for a, b in self.pairs)
        if len(pairs) < 2:
            raise ValueError("need at least two points")
        ok, resid = self.lam.validate()
        if not ok:
            raise ValueError(f"pairing map not symplectic (residual {resid:.2e})")
        for xi_a, xi_b in pairs:
            mapped = self.lam.apply(xi_b)
            if np.abs(mapped - xi_a).max() > PAIRING_TOL:
                raise ValueError("pair violates the symplectic pairing constraint")
        object.__setattr__(self, "pairs", pairs)

    @property
    def n_points(self) -> int:
        return len(self.pairs)

    @property
    def modes_per_party(self) -> int:
        return len(self.pairs[0][0])

    @classmethod
    def from_single_list(cls, points, lam: SymplecticMap | None = None):
        """Points shared by both parties (the Lambda = identity shorthand)."""
        points = [np.atleast_1d(np.asarray(p, complex)) for p in points]
        m = len(points[0])
        if lam is None:
            lam = identity_map(m)
            return cls(tuple((p, p.copy()) for p in points), lam)
        return cls(tuple(pair_points(points, lam)), lam)

    def xi_a(self) -> np.ndarray:
        return np.stack([a for a, _ in self.pairs])

    def xi_b(self) -> np.ndarray:
        return np.stack([b for _, b in self.pairs])

    def max_displacement(self) -> float:
        """Largest |xi_j - xi_k| over parties and pairs (ECD drive amplitude)."""
        worst = 0.0
        for side in (self.xi_a(), self.xi_b()):
            diff = side[:, None, :] - side[None, :, :]
            worst = max(worst, float(np.abs(diff).max()))
        return worst


@dataclass(frozen=True, eq=False)
class WitnessMatrix:
    """N x N Hermitian matrix of characteristic-function values / N."""

    entries: np.ndarray
    kind: MatrixKind
    mode: MatrixMode = MatrixMode.EXACT
    error_radii: np.ndarray | None = None

    def __post_init__(self):
        ent = np.asarray(self.entries, dtype=complex)
        n = ent.shape[0]
        if ent.shape != (n, n):
            raise ValueError("entries must be square")
        if self.mode is MatrixMode.EXACT:
            if np.abs(ent - ent.conj().T).max() > 1e-12:
                raise ValueError("exact witness matrix must be Hermitian")
        if np.abs(np.diag(ent) - 1.0 / n).max() > 1e-14:
            raise ValueError("diagonal entries must equal 1/N")
        radii = self.error_radii
        if radii is None:
            radii = np.zeros((n, n))
        radii = np.asarray(radii, dtype=float)
        if radii.shape != (n, n) or (radii < 0).any():
            raise ValueError("error radii must be a nonnegative N x N array")
        ent.setflags(write=False)
        radii.setflags(write=False)
        object.__setattr__(self, "entries", ent)
        object.__setattr__(self, "error_radii", radii)

    @property
    def n_points(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True, eq=False)
class WitnessResult:
    """Minimum eigenvalue, the certified bound value, and the error radius."""

    lambda_min: float
    value: float
    delta: float
    certified: bool
    min_eigenvector: np.ndarray
    kind: MatrixKind
    bound_targets: tuple[str, ...] = ()

    def __post_init__(self):
        if abs(self.value - max(0.0, -self.lambda_min)) > 1e-12:
            raise ValueError("value must equal max(0, -lambda_min)")
        if self.certified != (self.value > self.delta):
            raise ValueError("certified must mean value > delta")


C_BOUND_TARGETS = ("wigner_negativity_volume", "trace_distance_negativity")
C2_BOUND_TARGETS = C_BOUND_TARGETS + ("separable_distance", "ppt_distance")


def build_C(state: PureState | DensityOperator, points,
            check: bool = True) -> WitnessMatrix:
    """Single-party witness matrix over a plain list of points."""
    pts = [np.atleast_1d(np.asarray(p, complex)) for p in points]
    n = len(pts)
    if n < 2:
        raise ValueError("need at least two points")
    stack = np.stack(pts)
    diff = (stack[:, None, :] - stack[None, :, :]).reshape(n * n, -1)
    vals = char_fn_batch(state, diff, check=check).reshape(n, n) / n
    idx = np.arange(n)
    vals[idx, idx] = 1.0 / n
    vals = 0.5 * (vals + vals.conj().T)  # exact-mode symmetry at roundoff level
    return WitnessMatrix(vals, MatrixKind.C)


def build_C2(state: PureState | DensityOperator, point_set: PhaseSpacePointSet,
             check: bool = True) -> WitnessMatrix:
    """Two-party witness matrix over symplectically paired points."""
    m = point_set.modes_per_party
    if state.space.num_modes != 2 * m:
        raise ValueError("state mode count must be twice the per-party point size")
    n = point_set.n_points
    xa, xb = point_set.xi_a(), point_set.xi_b()
    da = (xa[:, None, :] - xa[None, :, :]).reshape(n * n, m)
    db = (xb[:, None, :] - xb[None, :, :]).reshape(n * n, m)
    vals = char_fn_batch(state, np.concatenate([da, db], axis=1),
                         check=check).reshape(n, n) / n
    idx = np.arange(n)
    vals[idx, idx] = 1.0 / n
    vals = 0.5 * (vals + vals.conj().T)
    return WitnessMatrix(vals, MatrixKind.C2)


def evaluate(matrix: WitnessMatrix) -> WitnessResult:
    """Minimum eigenvalue and the certified value max(0, -lambda_min)."""
    lam, vec = np.linalg.eigh(matrix.entries)
    v = _fix_eigvec_phase(vec[:, 0])
    value = max(0.0, -float(lam[0]))
    delta = propagate_error(matrix.error_radii)
    targets = C2_BOUND_TARGETS if matrix.kind is MatrixKind.C2 else C_BOUND_TARGETS
    return WitnessResult(lambda_min=float(lam[0]), value=value, delta=delta,
                         certified=value > delta, min_eigenvector=v,
                         kind=matrix.kind, bound_targets=targets)


def _fix_eigvec_phase(v: np.ndarray) -> np.ndarray:
    """Deterministic gauge: first largest-magnitude component real positive."""
    mags = np.abs(v)
    k = int(np.flatnonzero(np.isclose(mags, mags.max()))[0])
    phase = v[k] / abs(v[k]) if abs(v[k]) > 0 else 1.0
    return v / phase


def propagate_error(error_radii) -> float:
    """delta = max_j sum_{k != j} delta_{j,k} / N.

    The radii are per-entry bounds on the measured expectation values (scale
    of N * entries); the Gershgorin row sum of the perturbation matrix then
    bounds the eigenvalue shift.
    """
    radii = np.asarray(error_radii, dtype=float)
    if radii.ndim != 2 or radii.shape[0] != radii.shape[1]:
        raise ValueError("error radii must be square")
    if (radii < 0).any():
        raise ValueError("error radii must be nonnegative")
    n = radii.shape[0]
    off = radii.copy()
    np.fill_diagonal(off, 0.0)
    return float(off.sum(axis=1).max() / n)


def assemble_measured(upper_entries: dict, n: int, error_radii=None) -> WitnessMatrix:
    """Build a measured-mode matrix from estimates of the j < k entries.

    `upper_entries[(j, k)]` holds the estimated expectation value (NOT divided
    by N).  The diagonal is filled with 1/N exactly and the lower triangle by
    conjugation, never by symmetrizing measured values.
    """
    ent = np.zeros((n, n), dtype=complex)
    for j in range(n):
        ent[j, j] = 1.0 / n
        for k in range(j + 1, n):
            if (j, k) not in upper_entries:
                raise ValueError(f"missing measured entry ({j}, {k})")
            ent[j, k] = upper_entries[(j, k)] / n
            ent[k, j] = np.conj(ent[j, k])
    radii = np.zeros((n, n)) if error_radii is None else np.asarray(error_radii, float)
    return WitnessMatrix(ent, MatrixKind.C2, mode=MatrixMode.MEASURED,
                         error_radii=radii)


def certify(state_or_entries, points=None, error_radii=None,
            check: bool = True) -> WitnessResult:
    """Run the witness end to end.

    Exact route: pass a state plus a PhaseSpacePointSet (or plain point list
    for the single-party matrix).  Measured route: pass the dict of upper
    triangle estimates with `points` an integer N, plus the radii.
    """
    if isinstance(state_or_entries, dict):
        if not isinstance(points, int):
            raise ValueError("measured route needs the point count N")
        matrix = assemble_measured(state_or_entries, points, error_radii)
        return evaluate(matrix)
    state = state_or_entries
    if isinstance(points, PhaseSpacePointSet):
        matrix = build_C2(state, points, check=check)
    else:
        matrix = build_C(state, points, check=check)
    if error_radii is not None:
        matrix = WitnessMatrix(matrix.entries, matrix.kind, matrix.mode,
                               np.asarray(error_radii, float))
    return evaluate(matrix)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def matrix_to_json(matrix: WitnessMatrix) -> str:
    return json.dumps({
        "N": matrix.n_points,
        "kind": matrix.kind.value,
        "mode": matrix.mode.value,
        "entries": [[float(z.real), float(z.imag)]
                    for z in matrix.entries.reshape(-1)],
        "radii": [float(r) for r in matrix.error_radii.reshape(-1)],
    }, sort_keys=True)


def matrix_from_json(text: str) -> WitnessMatrix:
    obj = json.loads(text)
    n = int(obj["N"])
    ent = np.array([complex(re, im) for re, im in obj["entries"]]).reshape(n, n)
    radii = np.array(obj["radii"], dtype=float).reshape(n, n)
    return WitnessMatrix(ent, MatrixKind(obj["kind"]),
                         MatrixMode(obj["mode"]), radii)


def result_to_json(result: WitnessResult) -> str:
    return json.dumps({
        "lambda_min": result.lambda_min,
        "value": result.value,
        "delta": result.delta,
        "certified": result.certified,
        "kind": result.kind.value,
        "bound_targets": list(result.bound_targets),
        "min_eigenvector": [[float(z.real), float(z.imag)]
                            for z in result.min_eigenvector],
    }, sort_keys=True)
