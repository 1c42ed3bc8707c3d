"""Closed-form entanglement and negativity measures used to validate the witness.

For a pure bipartite state with Schmidt coefficients p_k, the trace distance
to the separable set is 2 sqrt(1 - max_k p_k) and the partial-transpose
distance is (sum_k sqrt(p_k))^2 - 1.  Mixed states only get the PT trace-norm
expression, reported with an explicit "conjectured" label since its equality
with the geometric measure is unproven in general.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .charwig import partial_transpose
from .fock import DensityOperator, PureState


@dataclass(frozen=True, eq=False)
class SchmidtSpectrum:
    """Descending Schmidt coefficients p_k (squared singular values)."""

    coefficients: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.coefficients, dtype=float)
        if (p < -1e-12).any():
            raise ValueError("Schmidt coefficients must be nonnegative")
        p = np.sort(np.clip(p, 0.0, None))[::-1]
        if abs(p.sum() - 1.0) > 1e-10:
            raise ValueError(f"Schmidt coefficients sum to {p.sum()}, not 1")
        p.setflags(write=False)
        object.__setattr__(self, "coefficients", p)


def schmidt(psi: PureState, modes_a=None) -> SchmidtSpectrum:
    """Schmidt spectrum over the bipartition (modes_a | rest)."""
    if not isinstance(psi, PureState):
        raise TypeError("Schmidt decomposition needs a pure state")
    m = psi.space.num_modes
    if modes_a is None:
        modes_a = tuple(range(m // 2))
    modes_a = tuple(sorted(set(int(x) for x in np.atleast_1d(modes_a))))
    if not modes_a or len(modes_a) >= m:
        raise ValueError("bipartition must be a nonempty proper subset")
    modes_b = tuple(mm for mm in range(m) if mm not in modes_a)
    t = psi.amplitudes.reshape(psi.space.cutoffs)
    t = np.transpose(t, modes_a + modes_b)
    da = int(np.prod([psi.space.cutoffs[mm] for mm in modes_a]))
    s = np.linalg.svd(t.reshape(da, -1), compute_uv=False)
    p = s ** 2
    return SchmidtSpectrum(p / p.sum())


def e_sep(psi: PureState, modes_a=None) -> float:
    """Trace distance from a pure state to the separable set: 2 sqrt(1 - max p_k)."""
    p = schmidt(psi, modes_a).coefficients
    return float(2.0 * np.sqrt(max(0.0, 1.0 - p[0])))


def e_ppt(state: PureState | DensityOperator, modes_b=None) -> float:
    """PT-distance measure.

    Pure states use the Schmidt closed form (sum sqrt(p_k))^2 - 1.  Mixed
    states return tr|rho^{T_B}| - 1, the PT negativity, which is the
    conjectured value of the same geometric measure.
    """
    if isinstance(state, PureState):
        modes_a = None if modes_b is None else tuple(
            m for m in range(state.space.num_modes)
            if m not in set(np.atleast_1d(modes_b)))
        p = schmidt(state, modes_a).coefficients
        return float(np.sum(np.sqrt(p)) ** 2 - 1.0)
    if modes_b is None:
        m = state.space.num_modes
        modes_b = tuple(range(m // 2, m))
    eig = np.linalg.eigvalsh(partial_transpose(state, modes_b))
    return float(max(0.0, np.sum(np.abs(eig)) - 1.0))


def pt_negativity(state: PureState | DensityOperator, modes_b=None) -> float:
    """tr|rho^{T_B}| - 1 computed from the matrix route (works for any state)."""
    if isinstance(state, PureState):
        state = state.density()
    if modes_b is None:
        m = state.space.num_modes
        modes_b = tuple(range(m // 2, m))
    eig = np.linalg.eigvalsh(partial_transpose(state, modes_b))
    return float(max(0.0, np.sum(np.abs(eig)) - 1.0))


MIXED_PPT_LABEL = "PT negativity (conjectured geometric PT distance)"


def n_tr_fock_bounds() -> float:
    """Trace-distance Wigner negativity of the single-photon family.

    The lower bound 1 from the half-fidelity argument is saturated by the
    Wigner-nonnegative mixture (|0><0| + |1><1|)/2 (x) |0><0|, so the value
    is exactly 1 for every member of the family.
    """
    return 1.0
