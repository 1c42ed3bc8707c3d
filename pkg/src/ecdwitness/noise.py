"""Photon-loss channel for the robustness studies.

The channel mixes each targeted mode with a vacuum ancilla on a beamsplitter
of transmissivity 1 - eta and traces the ancilla out.  The implementation uses
the Kraus sum K_n = sqrt(eta^n / n!) (1 - eta)^{n_hat / 2} a^n, which is
exactly trace preserving on the truncated space; the explicit dilation is kept
as a small-cutoff test oracle.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import expm
from scipy.special import gammaln

from .fock import (DensityOperator, FockSpace, PureState, TruncationWarning,
                   _apply_axis, _destroy_block, as_density)


@dataclass(frozen=True)
class LossChannel:
    eta: float
    modes: tuple[int, ...] | None = None  # None = all modes

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError("loss parameter must lie in [0, 1]")
        if self.modes is not None:
            object.__setattr__(self, "modes",
                               tuple(sorted(set(int(m) for m in self.modes))))


@lru_cache(maxsize=None)
def _kraus_blocks(d: int, eta: float) -> tuple:
    a = _destroy_block(d)
    damp = np.diag((1.0 - eta) ** (np.arange(d) / 2.0))
    ops = []
    a_pow = np.eye(d, dtype=complex)
    for n in range(d):
        coef = np.sqrt(eta ** n / np.exp(gammaln(n + 1.0)))
        if coef > 0:
            ops.append(coef * (damp @ a_pow))
        a_pow = a @ a_pow
    return tuple(ops)


def apply_loss(state: PureState | DensityOperator,
               channel: LossChannel | float) -> DensityOperator:
    """Photon loss on the requested modes; output is always a density operator."""
    if not isinstance(channel, LossChannel):
        channel = LossChannel(float(channel))
    rho = as_density(state)
    if channel.eta == 0.0:
        return rho
    modes = channel.modes if channel.modes is not None \
        else tuple(range(rho.space.num_modes))
    dims = rho.space.cutoffs
    m = rho.space.num_modes
    t = rho.matrix.reshape(dims + dims)
    for mode in modes:
        d = dims[mode]
        out = np.zeros_like(t)
        for k in _kraus_blocks(d, channel.eta):
            tmp = _apply_axis(t, k, mode)
            out += _apply_axis(tmp, k.conj(), m + mode)
        t = out
    mat = t.reshape(rho.space.dim, rho.space.dim)
    drift = abs(np.trace(mat).real - 1.0)
    if drift > 1e-6:
        warnings.warn(f"loss channel drifted the trace by {drift:.2e}; "
                      "cutoff too small", TruncationWarning, stacklevel=2)
    mat = 0.5 * (mat + mat.conj().T)
    mat = mat / np.trace(mat).real
    return DensityOperator(rho.space, mat, family=rho.family,
                           params={**rho.params, "loss_eta": channel.eta},
                           validate=rho.validate)


def apply_loss_dilation(state: PureState | DensityOperator, eta: float,
                        env_cutoff: int | None = None) -> DensityOperator:
    """Loss via the beamsplitter dilation with a vacuum ancilla per mode.

    Test oracle for `apply_loss`; feasible only at small cutoffs because the
    ancilla doubles the space, one mode at a time.
    """
    from .fock import destroy, partial_trace

    rho = as_density(state)
    if eta == 0.0:
        return rho
    phi = np.arcsin(np.sqrt(eta))
    m = rho.space.num_modes
    out = rho
    for mode in range(m):
        dims = out.space.cutoffs
        de = env_cutoff or dims[mode]
        joint = FockSpace(dims + (de,))
        anc = np.zeros((de, de), dtype=complex)
        anc[0, 0] = 1.0
        big = DensityOperator(joint, np.kron(out.matrix, anc), validate=False)
        a = destroy(joint, mode)
        b = destroy(joint, m)  # the appended ancilla
        u = expm(phi * (a @ b.conj().T - a.conj().T @ b))
        rotated = u @ big.matrix @ u.conj().T
        big = DensityOperator(joint, 0.5 * (rotated + rotated.conj().T),
                              validate=False)
        out = partial_trace(big, modes_out=[m])
    mat = out.matrix / np.trace(out.matrix).real
    return DensityOperator(out.space, mat)
