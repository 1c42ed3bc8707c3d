"""Gradient-based maximization of the witness value over phase-space points.

The minimum eigenvalue of the witness matrix is driven down along its
Wirtinger gradient with respect to the party-A points; the pairing map stays
fixed and the B points follow it.  A backtracking line search keeps the
iteration monotone; the plain fixed-step update is recovered by setting the
backtracking factor to 1.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .charwig import char_fn_batch
from .fock import _destroy_block
from .symplectic import SymplecticMap
from .witness import PhaseSpacePointSet, build_C, build_C2, evaluate

DEGENERACY_GAP = 1e-10


@dataclass(frozen=True)
class OptimizerConfig:
    step: float = 0.05
    max_iters: int = 2000
    grad_norm_threshold: float = 1e-7
    backtrack: float = 0.5
    restarts: int = 8
    jitter: float = 0.1
    seed: int = 0
    min_step: float = 1e-12

    def __post_init__(self):
        if self.step <= 0 or self.max_iters < 0 or self.grad_norm_threshold <= 0:
            raise ValueError("step, max_iters, grad_norm_threshold must be positive")
        if not 0 < self.backtrack <= 1:
            raise ValueError("backtracking factor must lie in (0, 1]")
        if self.restarts < 1:
            raise ValueError("need at least one restart")


@dataclass
class OptimizerTrace:
    iterations: list = field(default_factory=list)  # (iter, lambda_min, grad_norm, step)
    converged: bool = False
    degenerate_steps: int = 0
    restart_index: int = 0

    def record(self, it, lam, grad_norm, step):
        self.iterations.append((int(it), float(lam), float(grad_norm), float(step)))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["iter", "lambda_min", "grad_norm", "step"])
            for row in self.iterations:
                writer.writerow([row[0]] + [f"{v:.12e}" for v in row[1:]])


def _witness_and_gradient(state, point_set: PhaseSpacePointSet):
    """lambda_min, its eigenvector, and d(lambda_min)/d(xi_k^A*) per point/mode.

    Entry derivatives chain through both parties: the A argument directly and
    the B argument through the fixed pairing map (xi^B, xi^B*) =
    Lambda^{-1} (xi^A, xi^A*).  A state with as many modes as one party gets
    the single-party matrix instead (its B chain simply drops out).
    """
    n = point_set.n_points
    m = point_set.modes_per_party
    single_party = state.space.num_modes == m
    xa, xb = point_set.xi_a(), point_set.xi_b()
    da = (xa[:, None, :] - xa[None, :, :]).reshape(n * n, m)
    if single_party:
        args = da
    else:
        db = (xb[:, None, :] - xb[None, :, :]).reshape(n * n, m)
        args = np.concatenate([da, db], axis=1)
    cvals = char_fn_batch(state, args, check=False).reshape(n, n) / n
    idx = np.arange(n)
    cvals[idx, idx] = 1.0 / n
    cmat = 0.5 * (cvals + cvals.conj().T)
    lam, vec = np.linalg.eigh(cmat)
    gap = float(lam[1] - lam[0]) if n > 1 else np.inf
    v = vec[:, 0]

    # per-entry derivative traces with respect to each displacement argument
    t_total = np.zeros((n, n, m), dtype=complex)
    for mu in range(m):  # A-party arguments: only the conjugate side enters
        expect = _derivative_trace(state, args, mu, True).reshape(n, n) / n
        expect[idx, idx] = 0.0
        t_total[:, :, mu] += expect
    if not single_party:
        ginv = point_set.lam.inverse()
        g_blk, h_blk = ginv.blocks
        for nu in range(m):  # B-party arguments chain through the pairing map
            for conj_side in (False, True):
                coef_row = np.conj(g_blk)[nu] if conj_side else h_blk[nu]
                if np.abs(coef_row).max() == 0.0:
                    continue
                expect = _derivative_trace(state, args, m + nu,
                                           conj_side).reshape(n, n) / n
                expect[idx, idx] = 0.0
                for alpha in range(m):
                    t_total[:, :, alpha] += coef_row[alpha] * expect
    grad = np.empty((n, m), dtype=complex)
    for alpha in range(m):
        t = t_total[:, :, alpha]
        grad[:, alpha] = v.conj() * (t @ v) - v * (t.T @ v.conj())
    return cmat, float(lam[0]), v, grad, gap


def _derivative_trace(state, args, mu: int, conj_side: bool) -> np.ndarray:
    """tr[rho d(D_1 x ... x D_2m)/d(arg_mu or arg_mu*)] over the batch.

    dD/d(xi*) = (xi/2 - a) D and dD/d(xi) = (a^dag - xi*/2) D on the affected
    mode; the other factors are untouched.
    """
    space = state.space
    from .fock import displacement_block_batch

    blocks = []
    for mm, d in enumerate(space.cutoffs):
        blk = displacement_block_batch(d, args[:, mm])
        if mm == mu:
            a = _destroy_block(d)
            if conj_side:
                blk = (args[:, mm, None, None] / 2.0) * blk \
                    - np.einsum('ij,pjk->pik', a, blk)
            else:
                blk = np.einsum('ij,pjk->pik', a.conj().T, blk) \
                    - (np.conj(args[:, mm])[:, None, None] / 2.0) * blk
        blocks.append(blk)
    from .charwig import _contract_displacements
    return _contract_displacements(state, blocks)


def grad_lambda_min(state, point_set: PhaseSpacePointSet):
    """Wirtinger gradient of lambda_min w.r.t. each xi_k^A (pairing map fixed).

    Returns (gradient (N, m) array, degenerate flag).  With a degenerate
    minimum eigenvalue the deterministic tie-broken eigenvector defines a
    subgradient, which is flagged but still usable.
    """
    _, _, _, grad, gap = _witness_and_gradient(state, point_set)
    return grad, gap <= DEGENERACY_GAP


def _repair(xi_a: np.ndarray, lam: SymplecticMap) -> PhaseSpacePointSet:
    inv = lam.inverse()
    pairs = tuple((xi_a[k].copy(), inv.apply(xi_a[k])) for k in range(xi_a.shape[0]))
    return PhaseSpacePointSet(pairs, lam)


def optimize(state, initial: PhaseSpacePointSet,
             config: OptimizerConfig | None = None):
    """Maximize the witness value by gradient descent on lambda_min.

    Runs `config.restarts` descents (the first from `initial`, the rest from
    jittered copies) and returns (best point set, WitnessResult, trace of the
    best restart).  Deterministic for a fixed config.  States with as many
    modes as one party are optimized under the single-party matrix.
    """
    config = config or OptimizerConfig()
    rng = np.random.default_rng(config.seed)
    best = None
    for restart in range(config.restarts):
        xa0 = initial.xi_a().copy()
        if restart > 0:
            xa0 = xa0 + config.jitter * (
                rng.standard_normal(xa0.shape) + 1j * rng.standard_normal(xa0.shape))
        pts, lam, trace = _descend(state, _repair(xa0, initial.lam), config)
        trace.restart_index = restart
        if best is None or lam < best[1] - 1e-15:
            best = (pts, lam, trace)
    pts, lam, trace = best
    if state.space.num_modes == pts.modes_per_party:
        result = evaluate(build_C(state, list(pts.xi_a()), check=False))
    else:
        result = evaluate(build_C2(state, pts, check=False))
    return pts, result, trace


def _descend(state, point_set: PhaseSpacePointSet, config: OptimizerConfig):
    trace = OptimizerTrace()
    lam_map = point_set.lam
    xa = point_set.xi_a().copy()
    cur = point_set
    _, lam, _, grad, gap = _witness_and_gradient(state, cur)
    if gap <= DEGENERACY_GAP:
        trace.degenerate_steps += 1
    for it in range(config.max_iters):
        gnorm2 = float(np.sum(np.abs(grad) ** 2))
        if gnorm2 < config.grad_norm_threshold:
            trace.converged = True
            break
        if config.backtrack >= 1.0:
            # plain fixed-step update, accepted unconditionally
            xa = xa - config.step * grad
            cur = _repair(xa, lam_map)
            _, lam, _, grad, gap = _witness_and_gradient(state, cur)
            if gap <= DEGENERACY_GAP:
                trace.degenerate_steps += 1
            trace.record(it, lam, np.sqrt(gnorm2), config.step)
            continue
        step = config.step
        accepted = False
        while step >= config.min_step:
            cand_xa = xa - step * grad
            cand = _repair(cand_xa, lam_map)
            _, cand_lam, _, cand_grad, gap = _witness_and_gradient(state, cand)
            if cand_lam < lam:
                xa, cur, lam, grad = cand_xa, cand, cand_lam, cand_grad
                if gap <= DEGENERACY_GAP:
                    trace.degenerate_steps += 1
                trace.record(it, lam, np.sqrt(gnorm2), step)
                accepted = True
                break
            step *= config.backtrack
        if not accepted:
            break  # no decrease along the gradient at any step size
    return cur, lam, trace


# ---------------------------------------------------------------------------
# initial point sets
# ---------------------------------------------------------------------------

def fock_bell_reference_point(theta: float) -> complex:
    """Fitted optimum for the beamsplit single-photon family at angle theta."""
    u = np.pi / 4 - theta
    return complex(
        2531 / 2745 + (453 / 2083) * u ** 2,
        813 / 1217 + np.cos((1249 / 171) * u + (2179 / 215) * u ** 4) / 1313,
    )


def fock_bell_points(theta: float) -> list[complex]:
    """{+-Re[xi0], +-i Im[xi0]} for the single-photon family."""
    xi0 = fock_bell_reference_point(theta)
    return [xi0.real + 0j, -xi0.real + 0j, 1j * xi0.imag, -1j * xi0.imag]


def cat_points(beta: complex) -> list[complex]:
    """{+-xi_p, +-xi_m} with xi_pm = beta +- i pi / (8 beta^*)."""
    beta = complex(beta)
    if beta == 0:
        raise ValueError("cat points need a nonzero amplitude")
    off = 1j * np.pi / (8 * np.conj(beta))
    return [beta + off, -(beta + off), beta - off, -(beta - off)]


def pstmsv_points(r: float) -> list[complex]:
    """Squeeze-adapted single-photon points Re -> e^r Re, Im -> e^-r Im.

    This is the direction that leaves the witness value of the
    photon-subtracted two-mode squeezed vacuum equal to the theta = pi/4
    single-photon value.
    """
    return [p.real * np.exp(r) + 1j * p.imag * np.exp(-r)
            for p in fock_bell_points(np.pi / 4)]


def ring_points(n: int, mean_photon: float) -> list[complex]:
    """Origin plus n - 1 points evenly spaced on a ring of radius 1/sqrt(<n>+1)."""
    radius = 1.0 / np.sqrt(mean_photon + 1.0)
    return [0j] + [radius * np.exp(2j * np.pi * k / (n - 1)) for k in range(n - 1)]


def hex_disk_points(n: int, radius: float) -> list[complex]:
    """Triangular-lattice fill of a disk, densest set of about n points.

    Aimed at weak, spread-out Wigner negativity (strong loss), where the
    witness needs many interfering displacement differences.
    """
    if n < 2:
        raise ValueError("need at least two points")
    # choose the lattice constant so the disk holds about n sites
    ell = radius * np.sqrt(2 * np.pi / (np.sqrt(3) * n))
    pts = []
    reach = int(np.ceil(radius / ell)) + 2
    for i in range(-reach, reach + 1):
        for j in range(-reach, reach + 1):
            z = ell * (i + 0.5 * j + 1j * j * np.sqrt(3) / 2)
            if abs(z) <= radius + 1e-12:
                pts.append(z)
    pts.sort(key=lambda z: (abs(z), np.angle(z)))
    return pts[:n] if len(pts) >= n else pts


def heuristic_init(family: str, n: int, params: dict | None = None,
                   lam: SymplecticMap | None = None) -> PhaseSpacePointSet:
    """Family-specific starting points for the optimizer.

    Closed forms exist for the three example families at n = 4; anything else
    falls back to the origin-plus-ring layout sized by the mean photon number
    (params["mean_photon"], default 1).  family="hex_disk" gives the dense
    disk layout with params["radius"].
    """
    params = dict(params or {})
    if n < 2:
        raise ValueError("need at least two points")
    family = family.replace("-", "_").lower()
    if family == "fock_bell" and n == 4:
        pts = fock_bell_points(float(params.get("theta", np.pi / 4)))
    elif family in ("cat", "cat2") and n == 4:
        pts = cat_points(complex(params.get("beta", 2.0)))
    elif family == "pstmsv" and n == 4:
        pts = pstmsv_points(float(params.get("r", 0.0)))
    elif family == "hex_disk":
        pts = hex_disk_points(n, float(params.get("radius", 4.0)))
    else:
        pts = ring_points(n, float(params.get("mean_photon", 1.0)))
    return PhaseSpacePointSet.from_single_list([np.array([p]) for p in pts], lam)
