"""Truncated Fock-space states and the operator algebra built on them.

Everything here is dense: the problem sizes this package targets (one or two
modes, a few dozen levels each) never justify sparse storage.  Displacement
matrices use the associated-Laguerre closed form rather than exponentiating a
truncated generator, so their matrix elements are exact for any cutoff.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import expm, logm
from scipy.special import eval_genlaguerre, gammaln

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-10
PSD_TOL = 1e-10
NORM_TOL = 1e-12
TAIL_TOL = 1e-10
MIN_CUTOFF = 12


class TruncationWarning(UserWarning):
    """Raised (as a warning) when a result is unreliable at the current cutoff."""


@dataclass(frozen=True)
class FockSpace:
    """Tensor product of per-mode truncated Fock spaces."""

    cutoffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.cutoffs) < 1:
            raise ValueError("need at least one mode")
        if any(int(d) < 1 for d in self.cutoffs):
            raise ValueError("cutoffs must be positive")
        object.__setattr__(self, "cutoffs", tuple(int(d) for d in self.cutoffs))

    @property
    def num_modes(self) -> int:
        return len(self.cutoffs)

    @property
    def dim(self) -> int:
        return int(np.prod(self.cutoffs))

    def occupations(self) -> np.ndarray:
        """(dim, M) array of occupation numbers in index order."""
        return _occupations(self.cutoffs)


@lru_cache(maxsize=None)
def _occupations(cutoffs: tuple[int, ...]) -> np.ndarray:
    grids = np.indices(cutoffs).reshape(len(cutoffs), -1).T
    grids.setflags(write=False)
    return grids


@lru_cache(maxsize=None)
def _destroy_block(d: int) -> np.ndarray:
    a = np.diag(np.sqrt(np.arange(1, d)), 1).astype(complex)
    a.setflags(write=False)
    return a


def destroy(space: FockSpace, mode: int) -> np.ndarray:
    """Annihilation operator of one mode, embedded on the full space."""
    return embed_mode_operator(space, mode, _destroy_block(space.cutoffs[mode]))


def embed_mode_operator(space: FockSpace, mode: int, block: np.ndarray) -> np.ndarray:
    """kron(I, ..., block, ..., I) with `block` acting on `mode`."""
    out = np.eye(1, dtype=complex)
    for m, d in enumerate(space.cutoffs):
        out = np.kron(out, block if m == mode else np.eye(d))
    return out


@lru_cache(maxsize=None)
def parity_diagonal(cutoffs: tuple[int, ...]) -> np.ndarray:
    occ = _occupations(cutoffs)
    p = (-1.0) ** occ.sum(axis=1)
    p.setflags(write=False)
    return p


@lru_cache(maxsize=None)
def number_diagonal(cutoffs: tuple[int, ...]) -> np.ndarray:
    n = _occupations(cutoffs).sum(axis=1).astype(float)
    n.setflags(write=False)
    return n


def _tail_mass(populations: np.ndarray, cutoffs: tuple[int, ...]) -> float:
    """Population sitting on the highest Fock level of any mode."""
    occ = _occupations(cutoffs)
    top = np.zeros(len(occ), dtype=bool)
    for m, d in enumerate(cutoffs):
        top |= occ[:, m] == d - 1
    return float(np.real(populations[top].sum()))


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized state vector on a truncated Fock space."""

    space: FockSpace
    amplitudes: np.ndarray
    family: str | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape[0] != self.space.dim:
            raise ValueError("amplitude vector does not match space dimension")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalized: |norm - 1| = {abs(norm - 1.0):.3e}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def tail_mass(self) -> float:
        return _tail_mass(np.abs(self.amplitudes) ** 2, self.space.cutoffs)

    def mean_photon(self) -> float:
        n = number_diagonal(self.space.cutoffs)
        return float(np.sum(n * np.abs(self.amplitudes) ** 2))

    def density(self) -> "DensityOperator":
        rho = np.outer(self.amplitudes, self.amplitudes.conj())
        return DensityOperator(self.space, rho, family=self.family, params=dict(self.params))


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Dense density matrix with Hermiticity / trace / positivity guarantees."""

    space: FockSpace
    matrix: np.ndarray
    family: str | None = None
    params: dict = field(default_factory=dict)
    validate: bool = True

    def __post_init__(self):
        rho = np.asarray(self.matrix, dtype=complex)
        if rho.shape != (self.space.dim, self.space.dim):
            raise ValueError("matrix does not match space dimension")
        if self.validate:
            herm = np.abs(rho - rho.conj().T).max()
            if herm > HERMITICITY_TOL:
                raise ValueError(f"matrix not Hermitian: max |rho - rho^dag| = {herm:.3e}")
            tr = np.trace(rho).real
            if abs(tr - 1.0) > TRACE_TOL:
                raise ValueError(f"trace(rho) = {tr} is not 1")
            lam_min = float(np.linalg.eigvalsh(rho)[0])
            if lam_min < -PSD_TOL:
                raise ValueError(f"matrix not positive semidefinite: lambda_min = {lam_min:.3e}")
        rho.setflags(write=False)
        object.__setattr__(self, "matrix", rho)

    @property
    def tail_mass(self) -> float:
        return _tail_mass(np.real(np.diag(self.matrix)), self.space.cutoffs)

    def mean_photon(self) -> float:
        n = number_diagonal(self.space.cutoffs)
        return float(np.sum(n * np.real(np.diag(self.matrix))))

    def purity(self) -> float:
        return float(np.real(np.sum(self.matrix * self.matrix.T)))


def as_density(state: PureState | DensityOperator) -> DensityOperator:
    return state if isinstance(state, DensityOperator) else state.density()


# ---------------------------------------------------------------------------
# displacement, beamsplitter, squeezing
# ---------------------------------------------------------------------------

def displacement_block(d: int, xi: complex) -> np.ndarray:
    """Single-mode d x d displacement matrix D(xi) = exp(xi a^dag - xi^* a).

    Matrix elements come from the associated-Laguerre closed form, so they are
    exact for every (m, n) regardless of the cutoff.
    """
    return displacement_block_batch(d, np.array([xi], dtype=complex))[0]


def displacement_block_batch(d: int, xis: np.ndarray) -> np.ndarray:
    """(P, d, d) stack of single-mode displacement matrices."""
    xis = np.asarray(xis, dtype=complex).reshape(-1)
    m, n = np.indices((d, d))
    k = np.abs(m - n)
    lo = np.minimum(m, n)
    x = (np.abs(xis) ** 2)[:, None, None]
    lag = eval_genlaguerre(lo[None, :, :], k[None, :, :], x)
    logpref = 0.5 * (gammaln(lo + 1) - gammaln(np.maximum(m, n) + 1))
    pref = np.exp(logpref[None, :, :] - x / 2)
    base = np.where(m[None, :, :] >= n[None, :, :],
                    xis[:, None, None], -np.conj(xis)[:, None, None])
    base = np.where(k[None, :, :] == 0, 1.0 + 0j, base)
    return pref * base ** k[None, :, :] * lag


def displacement_column_defect(d: int, xi: complex) -> float:
    """Worst deviation of a column norm of D(xi) from 1.

    Columns of the exact infinite-dimensional operator are orthonormal; the
    closed-form truncation keeps the elements exact but drops rows above the
    cutoff, so a column norm below 1 flags that the operator would push
    population past the cutoff.
    """
    block = displacement_block(d, xi)
    return float(np.abs(np.linalg.norm(block, axis=0) - 1.0).max())


def displacement_matrix(space: FockSpace, mode: int, xi: complex,
                        check: bool = False, tol: float = 1e-8) -> np.ndarray:
    """Single-mode displacement embedded on the full space."""
    if not np.isfinite(xi):
        raise ValueError("displacement argument must be finite")
    if not 0 <= mode < space.num_modes:
        raise ValueError("mode index out of range")
    if check:
        defect = displacement_column_defect(space.cutoffs[mode], xi)
        if defect > tol:
            warnings.warn(
                f"displacement D({xi}) loses norm {defect:.2e} at cutoff "
                f"{space.cutoffs[mode]}", TruncationWarning, stacklevel=2)
    return embed_mode_operator(space, mode, displacement_block(space.cutoffs[mode], xi))


def multimode_displacement(space: FockSpace, xis, check: bool = False) -> np.ndarray:
    """D(xi_1) (x) D(xi_2) (x) ... in mode order."""
    xis = np.asarray(xis, dtype=complex).reshape(-1)
    if xis.shape[0] != space.num_modes:
        raise ValueError("need one displacement per mode")
    out = np.eye(1, dtype=complex)
    for m, d in enumerate(space.cutoffs):
        if check:
            defect = displacement_column_defect(d, xis[m])
            if defect > 1e-8:
                warnings.warn(f"mode {m}: displacement loses norm {defect:.2e}",
                              TruncationWarning, stacklevel=2)
        out = np.kron(out, displacement_block(d, xis[m]))
    return out


def beamsplitter(space: FockSpace, modes: tuple[int, int], theta: float) -> np.ndarray:
    """Beamsplitter unitary B(theta) with B(theta)|1,0> = cos(theta)|1,0> + sin(theta)|0,1>.

    Number-conserving, so the dense exponential is taken at the native cutoffs.
    """
    i, j = modes
    if i == j:
        raise ValueError("beamsplitter needs two distinct modes")
    ai, aj = destroy(space, i), destroy(space, j)
    gen = ai @ aj.conj().T - ai.conj().T @ aj
    return expm(theta * gen)


def squeeze(space: FockSpace, mode: int, r: float, r_max: float = 2.0,
            tail_tol: float = 1e-8) -> np.ndarray:
    """Single-mode squeeze S(r) = exp[(r/2)(a^2 - a^dag^2)] on the full space.

    Built by exponentiating at an enlarged working cutoff (2x + 10 levels) and
    projecting back, since the generator is not number-conserving.  A tail-mass
    check on S(r)|0> flags cutoffs that are too small for the requested r.
    """
    if abs(r) > r_max:
        raise ValueError(f"|r| = {abs(r)} exceeds r_max = {r_max}")
    d = space.cutoffs[mode]
    big = 2 * d + 10
    a = _destroy_block(big)
    block_big = expm((r / 2) * (a @ a - a.conj().T @ a.conj().T))
    sq_vac = block_big[:, 0]
    tail = float(np.sum(np.abs(sq_vac[d:]) ** 2))
    if tail > tail_tol:
        warnings.warn(
            f"squeeze(r={r}) pushes {tail:.2e} of the vacuum past cutoff {d}",
            TruncationWarning, stacklevel=2)
    return embed_mode_operator(space, mode, block_big[:d, :d])


# ---------------------------------------------------------------------------
# state constructors
# ---------------------------------------------------------------------------

def _fix_phase(amps: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude amplitude real positive (reproducible tests)."""
    k = int(np.argmax(np.abs(amps)))
    ph = amps[k] / abs(amps[k]) if abs(amps[k]) > 0 else 1.0
    return amps / ph


def _coherent_amps(d: int, beta: complex) -> np.ndarray:
    n = np.arange(d)
    log_mag = -abs(beta) ** 2 / 2 + n * np.log(abs(beta)) - 0.5 * gammaln(n + 1.0) \
        if abs(beta) > 0 else np.where(n == 0, 0.0, -np.inf)
    phase = np.exp(1j * n * np.angle(beta)) if abs(beta) > 0 else np.ones(d)
    return np.exp(log_mag) * phase


def _coherent_cutoff(beta: complex) -> int:
    nbar = abs(beta) ** 2
    d = int(np.ceil(nbar + 8 * np.sqrt(nbar + 1) + 8))
    return max(d, MIN_CUTOFF)


def _pstmsv_cutoff(r: float) -> int:
    if r == 0:
        return MIN_CUTOFF
    t2 = np.tanh(abs(r)) ** 2
    # geometric tail of the n tanh^{2n} weights
    d = MIN_CUTOFF
    while (d + 1) * t2 ** d / (1 - t2) ** 2 > TAIL_TOL and d < 400:
        d += 1
    return d + 4


def make_state(kind: str, cutoffs: tuple[int, ...] | None = None,
               **params) -> PureState | DensityOperator:
    """Build one of the named state families.

    kinds: vacuum, fock, coherent, thermal, fock_bell (theta), cat1 (beta),
    cat2 (beta), pstmsv (r).  Cutoffs are auto-chosen for tail mass < 1e-10
    with a floor of 12 levels per mode unless given explicitly.
    """
    kind = kind.replace("-", "_").lower()
    if kind == "vacuum":
        modes = int(params.get("modes", 1))
        space = FockSpace(cutoffs or (MIN_CUTOFF,) * modes)
        amps = np.zeros(space.dim, dtype=complex)
        amps[0] = 1.0
        return PureState(space, amps, family="vacuum", params={})

    if kind == "fock":
        ns = tuple(int(n) for n in np.atleast_1d(params["n"]))
        space = FockSpace(cutoffs or tuple(max(n + 2, MIN_CUTOFF) for n in ns))
        amps = np.zeros(space.dim, dtype=complex)
        amps[np.ravel_multi_index(ns, space.cutoffs)] = 1.0
        return PureState(space, amps, family="fock", params={"n": ns})

    if kind == "coherent":
        betas = np.atleast_1d(np.asarray(params["beta"], dtype=complex))
        space = FockSpace(cutoffs or tuple(_coherent_cutoff(b) for b in betas))
        amps = np.eye(1, dtype=complex)[0]
        for m, b in enumerate(betas):
            amps = np.kron(amps, _coherent_amps(space.cutoffs[m], b))
        amps = _fix_phase(amps / np.linalg.norm(amps))
        return PureState(space, amps, family="coherent", params={"beta": betas.tolist()})

    if kind == "thermal":
        nbar = float(params["nbar"])
        if nbar < 0:
            raise ValueError("mean photon number must be nonnegative")
        if cutoffs is None:
            d = MIN_CUTOFF
            if nbar > 0:
                x = nbar / (1 + nbar)
                while x ** d > TAIL_TOL and d < 300:
                    d += 1
            cutoffs = (d + 2,)
        space = FockSpace(cutoffs)
        n = np.arange(space.cutoffs[0])
        p = (nbar / (1 + nbar)) ** n / (1 + nbar) if nbar > 0 else np.where(n == 0, 1.0, 0.0)
        p = p / p.sum()
        return DensityOperator(space, np.diag(p).astype(complex),
                               family="thermal", params={"nbar": nbar})

    if kind == "fock_bell":
        theta = float(params["theta"])
        space = FockSpace(cutoffs or (MIN_CUTOFF, MIN_CUTOFF))
        amps = np.zeros(space.dim, dtype=complex)
        amps[np.ravel_multi_index((1, 0), space.cutoffs)] = np.cos(theta)
        amps[np.ravel_multi_index((0, 1), space.cutoffs)] = np.sin(theta)
        amps = _fix_phase(amps / np.linalg.norm(amps))
        return PureState(space, amps, family="fock_bell", params={"theta": theta})

    if kind == "cat1":
        beta = complex(params["beta"])
        space = FockSpace(cutoffs or (_coherent_cutoff(beta),))
        plus = _coherent_amps(space.cutoffs[0], beta)
        minus = _coherent_amps(space.cutoffs[0], -beta)
        amps = plus + minus
        amps = _fix_phase(amps / np.linalg.norm(amps))
        return PureState(space, amps, family="cat1", params={"beta": beta})

    if kind == "cat2":
        beta = complex(params["beta"])
        d = _coherent_cutoff(beta)
        space = FockSpace(cutoffs or (d, d))
        cp = _coherent_amps(space.cutoffs[0], beta)
        cm = _coherent_amps(space.cutoffs[0], -beta)
        dp = _coherent_amps(space.cutoffs[1], beta)
        dm = _coherent_amps(space.cutoffs[1], -beta)
        amps = np.kron(cp, dp) + np.kron(cm, dm)
        amps = _fix_phase(amps / np.linalg.norm(amps))
        return PureState(space, amps, family="cat2", params={"beta": beta})

    if kind == "pstmsv":
        r = float(params["r"])
        d = _pstmsv_cutoff(r)
        space = FockSpace(cutoffs or (d, d))
        d1, d2 = space.cutoffs
        psi = np.zeros((d1, d2), dtype=complex)
        if r == 0.0:
            # (a1 + a2)|TMSV(0)> vanishes; the normalized r -> 0 limit is the
            # balanced single-photon state.
            psi[1, 0] = psi[0, 1] = 1.0
        else:
            t = np.tanh(r)
            for n in range(1, min(d1, d2)):
                amp = t ** n * np.sqrt(n)
                psi[n - 1, n] += amp
                psi[n, n - 1] += amp
        nrm = np.linalg.norm(psi)
        if nrm == 0:
            raise ValueError("photon subtraction annihilated the state")
        amps = _fix_phase(psi.reshape(-1) / nrm)
        return PureState(space, amps, family="pstmsv", params={"r": r})

    raise ValueError(f"unknown state kind {kind!r}")


# ---------------------------------------------------------------------------
# partial trace and Gaussian-unitary application
# ---------------------------------------------------------------------------

def partial_trace(rho: DensityOperator, modes_out) -> DensityOperator:
    """Trace out the given modes; remaining modes keep their original order."""
    modes_out = sorted(set(int(m) for m in np.atleast_1d(modes_out)))
    M = rho.space.num_modes
    if not modes_out or len(modes_out) >= M:
        raise ValueError("modes_out must be a nonempty proper subset")
    dims = rho.space.cutoffs
    t = rho.matrix.reshape(dims + dims)
    for k, m in enumerate(modes_out):
        ax = m - k  # axes shift as traced axes are removed
        t = np.trace(t, axis1=ax, axis2=ax + (M - k))
    keep = tuple(d for m, d in enumerate(dims) if m not in modes_out)
    dim = int(np.prod(keep))
    out = t.reshape(dim, dim)
    out = 0.5 * (out + out.conj().T)
    return DensityOperator(FockSpace(keep), out, validate=rho.validate)


def _apply_axis(t: np.ndarray, op: np.ndarray, axis: int) -> np.ndarray:
    moved = np.moveaxis(t, axis, 0)
    shape = moved.shape
    res = op @ moved.reshape(shape[0], -1)
    return np.moveaxis(res.reshape((op.shape[0],) + shape[1:]), 0, axis)


def apply_unitary(state: PureState | DensityOperator, u: np.ndarray):
    """U|psi> or U rho U^dag on the full space.

    Truncated gates can be sub-unitary at roundoff level; the output is
    renormalized, with a warning once the defect stops looking like roundoff.
    """
    if isinstance(state, PureState):
        v = u @ state.amplitudes
        norm = np.linalg.norm(v)
        if abs(norm - 1.0) > 1e-6:
            warnings.warn(f"gate application lost norm {abs(norm - 1.0):.2e}",
                          TruncationWarning, stacklevel=2)
        return PureState(state.space, v / norm)
    rho = u @ state.matrix @ u.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    tr = np.trace(rho).real
    if abs(tr - 1.0) > 1e-6:
        warnings.warn(f"gate application drifted the trace by {abs(tr - 1.0):.2e}",
                      TruncationWarning, stacklevel=2)
    return DensityOperator(state.space, rho / tr, validate=state.validate)


def _quadratic_generator(lam: np.ndarray):
    """Split log(Lambda) into the (A, B) blocks of a quadratic Hamiltonian.

    For H = sum A_mn a_m^dag a_n + (1/2) sum (B_mn a_m^dag a_n^dag + h.c.),
    the Heisenberg map of U = exp(-iH) is exp(X) with
    X = [[-iA, -iB], [iB*, iA*]].
    """
    m = lam.shape[0] // 2
    x = logm(np.asarray(lam, dtype=complex))
    a = 1j * x[:m, :m]
    b = 1j * x[:m, m:]
    a = 0.5 * (a + a.conj().T)
    b = 0.5 * (b + b.T)
    x_struct = np.block([[-1j * a, -1j * b], [1j * b.conj(), 1j * a.conj()]])
    resid = np.abs(expm(x_struct) - lam).max()
    if resid > 1e-9:
        raise ValueError(
            f"could not realize the symplectic map from a quadratic generator "
            f"(residual {resid:.2e}); compose it from simpler maps instead")
    return a, b


def gaussian_unitary(space: FockSpace, lam: np.ndarray,
                     displacement=None) -> np.ndarray:
    """Dense unitary U with U^dag a_vec U = Lambda (a_vec, a_vec^dag) + alpha0.

    Passive maps (no a^dag a^dag part) conserve photon number and are exact on
    the native space.  Active maps should go through
    `apply_gaussian_map`, which enlarges the working cutoff first.
    """
    a_blk, b_blk = _quadratic_generator(np.asarray(lam, dtype=complex))
    m = space.num_modes
    h = np.zeros((space.dim, space.dim), dtype=complex)
    ops = [destroy(space, i) for i in range(m)]
    for i in range(m):
        for j in range(m):
            if a_blk[i, j] != 0:
                h += a_blk[i, j] * (ops[i].conj().T @ ops[j])
            if b_blk[i, j] != 0:
                h += 0.5 * b_blk[i, j] * (ops[i].conj().T @ ops[j].conj().T)
                h += 0.5 * np.conj(b_blk[i, j]) * (ops[j] @ ops[i])
    evals, evecs = np.linalg.eigh(h)
    u = (evecs * np.exp(-1j * evals)) @ evecs.conj().T
    if displacement is not None:
        alpha0 = np.asarray(displacement, dtype=complex).reshape(-1)
        dmat = multimode_displacement(space, alpha0)
        u = dmat @ u
    return u


def _is_passive(lam: np.ndarray) -> bool:
    m = lam.shape[0] // 2
    return bool(np.abs(lam[:m, m:]).max() < 1e-12)


def apply_gaussian_map(state: PureState | DensityOperator, lam: np.ndarray,
                       displacement=None, tail_tol: float = 1e-8,
                       project: bool = True):
    """Apply the Gaussian unitary realizing the symplectic map `lam`.

    Passive maps enlarge each cutoff to the total-excitation reach (so mode
    mixing cannot clip joint photon-number sectors); active maps enlarge to
    2x + 10 levels.  The result is projected back to the original space with a
    tail-mass check unless `project=False`, in which case it stays on the
    enlarged working space (useful when a partial trace follows).
    """
    lam = np.asarray(lam, dtype=complex)
    space = state.space
    m = space.num_modes
    e_blk, f_blk = lam[:m, :m], lam[:m, m:]
    mixes = np.abs(e_blk - np.diag(np.diag(e_blk))).max() > 1e-12 if m > 1 else False
    reach = sum(space.cutoffs) - m + 1
    work_dims = []
    for i, d in enumerate(space.cutoffs):
        squeezed = np.abs(f_blk[i, :]).max() > 1e-12 or np.abs(f_blk[:, i]).max() > 1e-12
        wd = d
        if squeezed:
            wd = 2 * d + 10
        elif mixes:
            wd = min(reach, 2 * d + 10)
        work_dims.append(wd)
    work = FockSpace(tuple(work_dims))
    big = _embed(state, work)
    u = gaussian_unitary(work, lam, displacement)
    out = apply_unitary(big, u)
    if not project:
        return out
    return _project(out, space, tail_tol)


def _embed(state, work: FockSpace):
    dims, wdims = state.space.cutoffs, work.cutoffs
    if dims == wdims:
        return state
    if isinstance(state, PureState):
        t = np.zeros(wdims, dtype=complex)
        t[tuple(slice(0, d) for d in dims)] = state.amplitudes.reshape(dims)
        return PureState(work, t.reshape(-1))
    t = np.zeros(wdims + wdims, dtype=complex)
    t[tuple(slice(0, d) for d in dims + dims)] = state.matrix.reshape(dims + dims)
    return DensityOperator(work, t.reshape(work.dim, work.dim), validate=False)


def _project(state, space: FockSpace, tail_tol: float):
    wdims = state.space.cutoffs
    dims = space.cutoffs
    if wdims == dims:
        return state
    sl = tuple(slice(0, d) for d in dims)
    if isinstance(state, PureState):
        block = state.amplitudes.reshape(wdims)[sl].reshape(-1)
        lost = 1.0 - float(np.sum(np.abs(block) ** 2))
        if lost > tail_tol:
            warnings.warn(f"projection lost {lost:.2e} of the state",
                          TruncationWarning, stacklevel=3)
        return PureState(space, block / np.linalg.norm(block))
    block = state.matrix.reshape(wdims + wdims)[sl + sl].reshape(space.dim, space.dim)
    lost = 1.0 - float(np.trace(block).real)
    if lost > tail_tol:
        warnings.warn(f"projection lost {lost:.2e} of the trace",
                      TruncationWarning, stacklevel=3)
    block = 0.5 * (block + block.conj().T) / np.trace(block).real
    return DensityOperator(space, block, validate=False)


def mode_rotation_to_collective(rho: PureState | DensityOperator, lam: np.ndarray,
                                tail_tol: float = 1e-8):
    """U rho U^dag for the Gaussian unitary realizing the symplectic map `lam`.

    The map acts on all modes jointly; the non-symplectic case is rejected.
    """
    from .symplectic import SymplecticMap  # local import to avoid a cycle

    smap = lam if isinstance(lam, SymplecticMap) else SymplecticMap(np.asarray(lam, complex))
    ok, resid = smap.validate()
    if not ok:
        raise ValueError(f"map is not symplectic (residual {resid:.2e})")
    return apply_gaussian_map(rho, smap.matrix, tail_tol=tail_tol)
