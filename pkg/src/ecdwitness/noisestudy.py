"""Point sets and helpers for the photon-loss robustness study.

The "naive" sets below were optimized once for the lossless target states
(gradient descent from an origin-plus-ring / fringe-ladder start, seed
20240811; see demos/generate_noise_study_points.py to regenerate) and are then
reused unchanged on the noisy states.  Re-optimization for a characterized
noise level selects among dense lattice layouts by the witness value itself,
optionally polished by a short descent.
"""

from __future__ import annotations

import numpy as np

from .optimizer import OptimizerConfig, hex_disk_points, optimize
from .witness import PhaseSpacePointSet, build_C2, evaluate

FOCK_NAIVE_POINTS = [
    complex(-0.10775119820117358, 0.017787092383695746),
    complex(0.747833660411057, 0.18962716806631394),
    complex(0.9301589428936621, 0.013543723842864711),
    complex(0.7873026637916893, 0.28161388809169474),
    complex(0.5483240119062059, 0.3697475567220297),
    complex(0.2953468581739027, 0.23555255736335143),
    complex(0.3978952908917284, 0.853589205894216),
    complex(0.276564069390168, 0.5971297387283817),
    complex(0.34754335811278053, 0.44910046626839695),
    complex(0.4177154285496566, 0.9131184515790297),
    complex(-0.174233926561332, 0.906839641497797),
    complex(0.026465491206400262, 0.723927194703205),
    complex(-0.278761018809351, 0.4290927908013213),
    complex(-0.04577686726517332, 0.9007856461734646),
    complex(-0.1305414009666629, 0.7478792355508461),
    complex(-0.4192235134676147, 0.6011091454287782),
    complex(-0.3836805440126241, 0.6203838814784108),
    complex(-0.5347649175561028, 0.7030021575364033),
    complex(-0.8150323078155087, 0.27683265838941035),
    complex(-0.8723358966740838, 0.22827124599082677),
    complex(-0.7505414417574869, -0.03489123786950742),
    complex(-0.4272063089662555, 0.043465212693870714),
    complex(-0.9458983677845179, -0.12706520542014224),
    complex(-0.7938510434530932, -0.4592054519341607),
    complex(-1.0388437446202887, -0.446788068892348),
    complex(-0.26818406022029884, -0.3938830396563706),
    complex(-0.2430828968068571, -0.5706408509003706),
    complex(-0.040233835167946784, -0.3548364086705939),
    complex(-0.37646238663818893, -0.7462694853611437),
    complex(-0.2757129436676442, -0.9275878149996191),
    complex(-0.17834155005838842, -0.8317893766894516),
    complex(0.4764290914187498, -0.8963609566129266),
    complex(0.5246659318489648, -0.9359178461838032),
    complex(0.32378455188465777, -0.5226439278609837),
    complex(0.234232971201891, -0.37427442213945133),
    complex(0.37156217105985817, -0.3458104623487793),
    complex(0.8142519308399342, -0.4872432316454017),
    complex(0.9599481415321233, -0.21404140925442788),
    complex(0.7216466554728891, -0.024719096499645613),
    complex(0.5514540268984511, -0.23751268362990446),
]

CAT_NAIVE_POINTS = [
    complex(1.99999780956063, 0.25774504298534895),
    complex(-2.0000180432191708, -0.14117914744296756),
    complex(1.9999722075561799, -0.14117783397791275),
    complex(-2.0000101370991854, 0.2577447205648526),
    complex(-2.0000112207073064, -0.39668321835608517),
    complex(-2.000011995970501, 0.0024357952661563627),
    complex(1.1952613566886189e-05, -0.41651997697197857),
    complex(1.2525881278245832e-05, 0.1388398221393847),
    complex(1.9999882806250922, -0.39668338124546126),
    complex(1.999994751849626, 0.002436134458856813),
    complex(4.000018883547825, -0.41651811642348135),
    complex(4.000054985361978, 0.13883942446369585),
]


def _as_set(points) -> PhaseSpacePointSet:
    return PhaseSpacePointSet.from_single_list([np.array([p]) for p in points])


def fock_naive_set() -> PhaseSpacePointSet:
    """40-point set optimized for the lossless balanced single-photon state."""
    return _as_set(FOCK_NAIVE_POINTS)


def cat_naive_set() -> PhaseSpacePointSet:
    """12-point set optimized for the lossless two-mode cat at beta = 2."""
    return _as_set(CAT_NAIVE_POINTS)


def cat_fringe_points(n: int, beta: float) -> list[complex]:
    """Columns at the cat lobes with ladders spanning the interference fringes."""
    period = np.pi / (4.0 * beta)
    columns = (-beta, 0.0, beta, 2.0 * beta)
    rungs = max(1, n // len(columns))
    pts = [x + 1j * period * (k - (rungs - 1) / 2)
           for x in columns for k in range(rungs)]
    return pts[:n]


def reoptimized_candidates(state) -> list[PhaseSpacePointSet]:
    """Candidate layouts for a noisy state, keyed off its family tag."""
    family = getattr(state, "family", None)
    if family == "cat2":
        beta = abs(complex(state.params.get("beta", 2.0)))
        sets = [_as_set(cat_fringe_points(n, beta)) for n in (12, 24)]
        sets.append(cat_naive_set())
        return sets
    sets = [_as_set(hex_disk_points(73, r)) for r in (3.0, 4.0, 5.0, 6.0)]
    sets.append(fock_naive_set())
    return sets


def reoptimized_set(state, descent_iters: int = 0,
                    seed: int = 0) -> PhaseSpacePointSet:
    """Point set adapted to a characterized noisy state.

    Scans the candidate layouts by their witness value on `state` (the
    eigenvector search inside the witness already optimizes the weights) and
    optionally polishes the winner with a short gradient descent.
    """
    best, best_val = None, -np.inf
    for cand in reoptimized_candidates(state):
        val = evaluate(build_C2(state, cand, check=False)).value
        if val > best_val:
            best, best_val = cand, val
    if descent_iters > 0 and best is not None:
        cfg = OptimizerConfig(max_iters=descent_iters, restarts=1, seed=seed,
                              grad_norm_threshold=1e-12)
        best, _, _ = optimize(state, best, cfg)
    return best


def fig2_dense_points(n: int = 100, radius: float = 5.5) -> PhaseSpacePointSet:
    """Fixed dense disk used for the large-N witness column of the angle sweep."""
    return _as_set(hex_disk_points(n, radius))
