"""Command-line surface: witness runs, figure-data reproduction, point
optimization, finite-shot measurement simulation, and state inspection.

Exit codes separate "ran correctly" from the scientific outcome: 0 means the
command completed (whether or not entanglement was certified), 2 flags a
configuration error, 3 a truncation-reliability failure.  Certification lives
in the JSON output.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import noisestudy
from .charwig import cat_ntr_lower_bound, negativity_volume
from .fock import TruncationWarning, make_state
from .measures import e_ppt, e_sep, n_tr_fock_bounds, pt_negativity, schmidt
from .noise import apply_loss
from .optimizer import (OptimizerConfig, cat_points, fock_bell_points,
                        heuristic_init, optimize, pstmsv_points)
from .shotsim import (MeasurementPlan, assemble_measured_witness,
                      records_to_jsonl, sample)
from .symplectic import points_from_json, points_to_json
from .witness import (PhaseSpacePointSet, build_C2, evaluate, matrix_to_json,
                      result_to_json)

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_TRUNCATION = 3


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# config handling
# ---------------------------------------------------------------------------

STATE_DEFAULTS = {"family": "fock_bell", "theta": np.pi / 4, "beta": 2.0,
                  "r": 0.5, "n": (1, 0), "nbar": 1.0, "cutoffs": None}


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    schema = cfg.get("schema", SCHEMA_VERSION)
    if schema != SCHEMA_VERSION:
        raise ConfigError(f"unsupported config schema {schema}")
    return cfg


def build_state(cfg: dict):
    sc = {**{"family": "fock_bell"}, **cfg.get("state", {})}
    family = str(sc.get("family", "fock_bell")).replace("-", "_")
    kwargs = {}
    if family == "fock_bell":
        kwargs["theta"] = float(sc.get("theta", np.pi / 4))
    elif family in ("cat2", "cat1", "coherent"):
        kwargs["beta"] = complex(sc.get("beta", 2.0))
    elif family == "pstmsv":
        kwargs["r"] = float(sc.get("r", 0.5))
    elif family == "fock":
        kwargs["n"] = tuple(int(x) for x in sc.get("n", (1, 0)))
    elif family == "thermal":
        kwargs["nbar"] = float(sc.get("nbar", 1.0))
    elif family == "vacuum":
        kwargs["modes"] = int(sc.get("modes", 2))
    else:
        raise ConfigError(f"unknown state family {family!r}")
    cutoffs = sc.get("cutoffs")
    if cutoffs is not None:
        cutoffs = tuple(int(d) for d in cutoffs)
    try:
        state = make_state(family, cutoffs=cutoffs, **kwargs)
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"cannot build state: {exc}") from exc
    eta = float(cfg.get("noise", {}).get("eta", 0.0))
    if eta > 0.0:
        state = apply_loss(state, eta)
    return state


def build_points(cfg: dict, state) -> PhaseSpacePointSet:
    pc = cfg.get("points", {"source": "paper"})
    source = pc.get("source", "paper")
    if source == "paper":
        family = getattr(state, "family", None) or cfg.get("state", {}).get("family")
        family = str(family).replace("-", "_")
        if family == "fock_bell":
            pts = fock_bell_points(float(state.params.get(
                "theta", cfg.get("state", {}).get("theta", np.pi / 4))))
        elif family == "cat2":
            pts = cat_points(complex(state.params.get(
                "beta", cfg.get("state", {}).get("beta", 2.0))))
        elif family == "pstmsv":
            pts = pstmsv_points(float(state.params.get(
                "r", cfg.get("state", {}).get("r", 0.5))))
        else:
            raise ConfigError(f"no reference points for family {family!r}")
        return PhaseSpacePointSet.from_single_list([np.array([p]) for p in pts])
    if source == "file":
        path = pc.get("path")
        if not path:
            raise ConfigError("points.source=file needs points.path")
        pairs, lam = points_from_json(Path(path).read_text())
        return PhaseSpacePointSet(tuple(pairs), lam)
    if source in ("ring", "generic", "hex_disk"):
        fam = "hex_disk" if source == "hex_disk" else "generic"
        params = {"mean_photon": state.mean_photon(),
                  "radius": float(pc.get("radius", 4.0))}
        return heuristic_init(fam, int(pc.get("n", 4)), params)
    if source == "optimize":
        init = heuristic_init(str(pc.get("init", "generic")), int(pc.get("n", 4)),
                              {"mean_photon": state.mean_photon(),
                               "radius": float(pc.get("radius", 4.0)),
                               **cfg.get("state", {})})
        opt_cfg = optimizer_config(cfg)
        pts, _, _ = optimize(state, init, opt_cfg)
        return pts
    raise ConfigError(f"unknown points source {source!r}")


def optimizer_config(cfg: dict) -> OptimizerConfig:
    oc = cfg.get("optimizer", {})
    try:
        return OptimizerConfig(
            step=float(oc.get("step", 0.05)),
            max_iters=int(oc.get("max_iters", 2000)),
            grad_norm_threshold=float(oc.get("grad_norm_threshold", 1e-7)),
            backtrack=float(oc.get("backtrack", 0.5)),
            restarts=int(oc.get("restarts", 8)),
            jitter=float(oc.get("jitter", 0.1)),
            seed=int(oc.get("seed", cfg.get("seed", 0))),
        )
    except ValueError as exc:
        raise ConfigError(f"bad optimizer config: {exc}") from exc


def _write_json(path: Path, payload) -> None:
    text = payload if isinstance(payload, str) else json.dumps(payload, sort_keys=True,
                                                               indent=2)
    path.write_text(text + ("\n" if not text.endswith("\n") else ""))


def _write_meta(out: Path, name: str, cfg: dict, extra: dict | None = None) -> None:
    meta = {"schema": SCHEMA_VERSION, "command": name, "config": cfg}
    if extra:
        meta.update(extra)
    _write_json(out / f"{name}_meta.json", _json_safe(meta))


def _json_safe(obj):
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_witness(cfg: dict, out: Path) -> int:
    state = build_state(cfg)
    points = build_points(cfg, state)
    matrix = build_C2(state, points)
    result = evaluate(matrix)
    _write_json(out / "witness_matrix.json", matrix_to_json(matrix))
    _write_json(out / "witness_result.json", result_to_json(result))
    _write_json(out / "witness_points.json",
                points_to_json(points.pairs, points.lam))
    _write_meta(out, "witness", cfg, {
        "max_displacement": points.max_displacement(),
        "certified": result.certified,
    })
    return EXIT_OK


def cmd_state_info(cfg: dict, out: Path) -> int:
    state = build_state(cfg)
    info = {
        "family": getattr(state, "family", None),
        "params": _json_safe(dict(getattr(state, "params", {}))),
        "cutoffs": list(state.space.cutoffs),
        "dim": state.space.dim,
        "num_modes": state.space.num_modes,
        "tail_mass": state.tail_mass,
        "mean_photon": state.mean_photon(),
        "pure": not hasattr(state, "purity"),
    }
    if hasattr(state, "purity"):
        info["purity"] = state.purity()
    if state.space.num_modes == 2 and not hasattr(state, "purity"):
        spec = schmidt(state)
        info["schmidt_spectrum"] = [float(p) for p in spec.coefficients[:12]]
        info["e_sep"] = e_sep(state)
        info["e_ppt"] = e_ppt(state)
    _write_json(out / "state_info.json", info)
    _write_meta(out, "state_info", cfg)
    return EXIT_OK


def cmd_optimize(cfg: dict, out: Path) -> int:
    state = build_state(cfg)
    pc = cfg.get("points", {})
    init = build_points({**cfg, "points": {**pc, "source": pc.get("init_source", "paper")}},
                        state) if pc.get("init_source") else \
        heuristic_init(str(pc.get("init", getattr(state, "family", "generic") or "generic")),
                       int(pc.get("n", 4)),
                       {"mean_photon": state.mean_photon(),
                        "radius": float(pc.get("radius", 4.0)),
                        **{k: v for k, v in cfg.get("state", {}).items()
                           if k != "family"}})
    opt_cfg = optimizer_config(cfg)
    pts, result, trace = optimize(state, init, opt_cfg)
    _write_json(out / "xi_opt.json", points_to_json(pts.pairs, pts.lam))
    _write_json(out / "optimize_result.json", result_to_json(result))
    trace.to_csv(out / "trace.csv")
    _write_meta(out, "optimize", cfg, {
        "converged": trace.converged,
        "restart_index": trace.restart_index,
        "iterations": len(trace.iterations),
    })
    return EXIT_OK


def cmd_measure(cfg: dict, out: Path) -> int:
    state = build_state(cfg)
    points = build_points(cfg, state)
    pc = cfg.get("plan", {})
    plan = MeasurementPlan(
        points=points,
        shots=int(pc.get("shots", 10000)),
        confidence=float(pc.get("confidence", 0.95)),
        layout=str(pc.get("layout", "one_qubit")),
        seed=int(pc.get("seed", cfg.get("seed", 0))),
    )
    records = sample(plan, state)
    matrix = assemble_measured_witness(records, points)
    result = evaluate(matrix)
    (out / "records.jsonl").write_text(records_to_jsonl(records))
    _write_json(out / "witness_matrix.json", matrix_to_json(matrix))
    _write_json(out / "witness_result.json", result_to_json(result))
    _write_meta(out, "measure", cfg, {
        "setting_counts": plan.setting_counts(),
        "certified": result.certified,
    })
    return EXIT_OK


# ---------------------------------------------------------------------------
# figure reproduction
# ---------------------------------------------------------------------------

def _csv_write(path: Path, header: list[str], rows: list[list[float]]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([f"{v:.12e}" for v in row])


def _fig2_row(args) -> list[float]:
    theta, n100_pairs = args
    state = make_state("fock_bell", theta=theta)
    pts4 = PhaseSpacePointSet.from_single_list(
        [np.array([p]) for p in fock_bell_points(theta)])
    ec4 = evaluate(build_C2(state, pts4, check=False)).value
    if n100_pairs is not None:
        pts100 = PhaseSpacePointSet.from_single_list(
            [np.array([p]) for p in n100_pairs])
        ec100 = evaluate(build_C2(state, pts100, check=False)).value
    else:
        ec100 = float("nan")
    nv = 2 * np.exp(-0.5) - 1
    esep = e_sep(state)
    eppt = e_ppt(state)
    return [theta, ec4, ec100, nv, n_tr_fock_bounds(), esep, eppt,
            pts4.max_displacement()]


def _fig3_row(args) -> list[float]:
    r, _ = args
    state = make_state("pstmsv", r=r)
    pts = PhaseSpacePointSet.from_single_list(
        [np.array([p]) for p in pstmsv_points(r)])
    ec = evaluate(build_C2(state, pts, check=False)).value
    nv = 2 * np.exp(-0.5) - 1
    return [r, ec, nv, n_tr_fock_bounds(), e_sep(state), e_ppt(state),
            pts.max_displacement()]


def _fig4_row(args) -> list[float]:
    beta, grid_points = args
    state = make_state("cat2", beta=beta)
    pts = PhaseSpacePointSet.from_single_list(
        [np.array([p]) for p in cat_points(beta)])
    ec = evaluate(build_C2(state, pts, check=False)).value
    nv, _ = negativity_volume(state, points=grid_points)
    ntr_lb = cat_ntr_lower_bound(beta, points=201)
    return [beta, ec, nv, ntr_lb, e_sep(state), e_ppt(state),
            pts.max_displacement()]


def _fig5_row(args) -> list[float]:
    eta, family = args
    if family == "fock_bell":
        state = make_state("fock_bell", theta=np.pi / 4)
        naive = noisestudy.fock_naive_set()
        reduced = make_state("fock", n=(1,))
    else:
        state = make_state("cat2", beta=2.0)
        naive = noisestudy.cat_naive_set()
        reduced = make_state("cat1", beta=2.0 * np.sqrt(2))
    noisy = apply_loss(state, eta)
    ec_naive = evaluate(build_C2(noisy, naive, check=False)).value
    reopt = noisestudy.reoptimized_set(noisy)
    ec_opt = evaluate(build_C2(noisy, reopt, check=False)).value if reopt is not None \
        else ec_naive
    ec_opt = max(ec_opt, ec_naive)
    noisy_reduced = apply_loss(reduced, eta)
    nv, _ = negativity_volume(noisy_reduced, points=201)
    ptn = pt_negativity(noisy)
    return [eta, ec_naive, ec_opt, nv, ptn]


_FIG_WORKERS = {"fig2": _fig2_row, "fig3": _fig3_row, "fig4": _fig4_row,
                "fig5": _fig5_row}


def cmd_reproduce(cfg: dict, out: Path, figure: str, threads: int = 1) -> int:
    rc = cfg.get("reproduce", {})
    if figure == "fig2":
        n_sweep = int(rc.get("sweep_points", 51))
        thetas = np.linspace(0.0, np.pi / 2, n_sweep)
        if rc.get("n100", True):
            n100 = noisestudy.fig2_dense_points(int(rc.get("n100_points", 100)),
                                                float(rc.get("n100_radius", 5.5)))
        else:
            n100 = None
        jobs = [(float(t), n100) for t in thetas]
        header = ["theta", "E_C_N4", "E_C_N100", "N_V", "N_tr", "E_SEP",
                  "E_PPT", "max_displacement"]
        files = {"fig2.csv": jobs}
    elif figure == "fig3":
        n_sweep = int(rc.get("sweep_points", 31))
        jobs = [(float(r), None) for r in np.linspace(0.0, 1.5, n_sweep)]
        header = ["r", "E_C_N4", "N_V", "N_tr", "E_SEP", "E_PPT",
                  "max_displacement"]
        files = {"fig3.csv": jobs}
    elif figure == "fig4":
        n_sweep = int(rc.get("sweep_points", 40))
        betas = np.linspace(0.1, 4.0, n_sweep)
        gp = int(rc.get("grid_points", 201))
        jobs = [(float(b), gp) for b in betas]
        header = ["beta", "E_C_N4", "N_V", "N_tr_lower_bound", "E_SEP",
                  "E_PPT", "max_displacement"]
        files = {"fig4.csv": jobs}
    elif figure == "fig5":
        etas = rc.get("etas", [round(0.035 * k, 4) for k in range(15)])
        header = ["eta", "E_C_naive", "E_C_reoptimized", "N_V",
                  "PT_negativity"]
        files = {
            "fig5_fock.csv": [(float(e), "fock_bell") for e in etas],
            "fig5_cat.csv": [(float(e), "cat2") for e in etas],
        }
    else:
        raise ConfigError(f"unknown figure {figure!r}")

    worker = _FIG_WORKERS[figure]
    for fname, jobs in files.items():
        if threads > 1:
            with ProcessPoolExecutor(max_workers=threads) as pool:
                rows = list(pool.map(worker, jobs))
        else:
            rows = [worker(j) for j in jobs]
        rows.sort(key=lambda row: row[0])
        _csv_write(out / fname, header, rows)
    _write_meta(out, f"reproduce_{figure}", cfg, {"threads": threads})
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ecdwitness",
        description="Characteristic-function witnesses of Wigner negativity "
                    "and non-Gaussian entanglement")
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="RNG seed override")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker processes for sweeps")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("witness", help="build and evaluate a witness matrix")
    rep = sub.add_parser("reproduce", help="write figure-data CSVs")
    rep.add_argument("figure", choices=["fig2", "fig3", "fig4", "fig5"])
    sub.add_parser("optimize", help="optimize the phase-space points")
    sub.add_parser("measure", help="simulate finite-shot readout")
    sub.add_parser("state-info", help="inspect a state family member")
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg["seed"] = args.seed
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with warnings.catch_warnings():
            warnings.simplefilter("error", TruncationWarning)
            if args.command == "witness":
                return cmd_witness(cfg, out)
            if args.command == "reproduce":
                return cmd_reproduce(cfg, out, args.figure, threads=args.threads)
            if args.command == "optimize":
                return cmd_optimize(cfg, out)
            if args.command == "measure":
                return cmd_measure(cfg, out)
            if args.command == "state-info":
                return cmd_state_info(cfg, out)
            raise ConfigError(f"unknown command {args.command}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TruncationWarning as exc:
        print(f"truncation reliability failure: {exc}", file=sys.stderr)
        return EXIT_TRUNCATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
