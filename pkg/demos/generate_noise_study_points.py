"""Regenerate the frozen measurement-point sets used by the photon-loss study.

The loss study needs two kinds of point sets:

* "naive" sets optimized for the lossless target states, whose detection
  range under loss is then scanned as-is;
* per-loss re-optimized sets, built from a dense triangular-lattice disk whose
  radius is selected by the witness value itself.

The naive sets produced here are frozen into `ecdwitness.noisestudy`.  Run
this script to reproduce them from scratch; it prints the Python literals.
"""

import numpy as np

import ecdwitness as ew
from ecdwitness.optimizer import OptimizerConfig, optimize

SEED = 20240811


def fock_naive(n_points=40, iters=220, seed=SEED):
    bell = ew.make_state("fock_bell", theta=np.pi / 4)
    ring = ew.ring_points(n_points, mean_photon=1.0)
    init = ew.PhaseSpacePointSet.from_single_list([np.array([p]) for p in ring])
    cfg = OptimizerConfig(step=0.05, max_iters=iters, restarts=2, jitter=0.15,
                          seed=seed, grad_norm_threshold=1e-10)
    pts, res, _ = optimize(bell, init, cfg)
    return pts, res


def cat_naive(beta=2.0, iters=200, seed=SEED):
    cat = ew.make_state("cat2", beta=beta)
    fringe = np.pi / (2 * np.sqrt(2) * 2 * beta)  # fringe period of the + mode cat
    base = ew.cat_points(beta)
    extras = []
    for x in (-beta, 0.0, beta, 2 * beta):
        for k in (-1.5, 0.5):
            extras.append(x + 1j * fringe * k)
    init_pts = (base + extras)[:12]
    init = ew.PhaseSpacePointSet.from_single_list([np.array([p]) for p in init_pts])
    cfg = OptimizerConfig(step=0.05, max_iters=iters, restarts=2, jitter=0.1,
                          seed=seed, grad_norm_threshold=1e-10)
    pts, res, _ = optimize(cat, init, cfg)
    return pts, res


def scan(state, pts, etas):
    vals = []
    for eta in etas:
        noisy = ew.apply_loss(state, eta)
        vals.append(ew.evaluate(ew.build_C2(noisy, pts, check=False)).value)
    return vals


def _print_literal(name, pts):
    arr = pts.xi_a()[:, 0]
    print(f"{name} = [")
    for z in arr:
        print(f"    complex({z.real!r}, {z.imag!r}),")
    print("]")


if __name__ == "__main__":
    etas = [0.0, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45, 0.49]

    pts, res = fock_naive()
    print(f"# fock naive: E_C(lossless) = {res.value:.6f}")
    bell = ew.make_state("fock_bell", theta=np.pi / 4)
    print("# loss scan:", [f"{v:.2e}" for v in scan(bell, pts, etas)])
    _print_literal("FOCK_NAIVE_POINTS", pts)

    pts, res = cat_naive()
    print(f"# cat naive: E_C(lossless) = {res.value:.6f}")
    cat = ew.make_state("cat2", beta=2.0)
    print("# loss scan:", [f"{v:.2e}" for v in scan(cat, pts, etas)])
    _print_literal("CAT_NAIVE_POINTS", pts)
