"""Command-line front end: instance generation, solving, the GW baseline,
warm starts, haplotype phasing, and the benchmark sweep.

Every command is deterministic given explicit seeds and echoes its full
configuration into the output for provenance. Exit codes: 0 success,
1 runtime/numeric failure, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import time

import numpy as np

from . import graphs
from .gw import GwConfig, gw_runs, gw_solve
from .perturb import EdvqeConfig, edvqe_solve, warm_start_solve
from . import phasing as ph


class ConfigError(Exception):
    pass


def _load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None


def _edvqe_config(path) -> EdvqeConfig:
    if path is None:
        return EdvqeConfig()
    try:
        return EdvqeConfig.from_dict(_load_json(path))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad solver config {path}: {exc}") from None


def _write_json(payload, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_gen(args) -> int:
    family = "regular" if args.family == "regular3" else args.family
    if family == "complete":
        g = graphs.gen_complete(args.n, args.seed, args.w_min, args.w_max,
                                integer_weights=args.integer_weights)
    elif family == "cluster":
        g = graphs.gen_cluster(args.n, args.community_size,
                               (args.intra_min, args.intra_max),
                               (args.inter_min, args.inter_max),
                               args.p_inter, args.seed,
                               integer_weights=args.integer_weights)
    else:
        g = graphs.gen_regular(args.n, args.degree, args.seed,
                               args.w_min, args.w_max,
                               integer_weights=args.integer_weights)
    graphs.write_graph(g, args.out)
    print(f"wrote {g.n_vertices} vertices, {g.n_edges} edges to {args.out}")
    return 0


def cmd_solve(args) -> int:
    g = graphs.read_graph(args.graph)
    config = _edvqe_config(args.config)
    t0 = time.perf_counter()
    result = edvqe_solve(g, config, seed=args.seed)
    payload = result.to_dict(config)
    payload["graph"] = {"path": args.graph, "n_vertices": g.n_vertices,
                        "n_edges": g.n_edges}
    payload["wall_time_s"] = time.perf_counter() - t0
    _write_json(payload, args.out)
    print(f"best cut {result.best.cut:.6f} after {result.iterations_run} outer "
          f"iterations -> {args.out}")
    return 0


def _gw_config(args) -> GwConfig:
    return GwConfig(rank=args.rank, projections=args.projections)


def cmd_gw(args) -> int:
    g = graphs.read_graph(args.graph)
    config = _gw_config(args)
    t0 = time.perf_counter()
    runs = gw_runs(g, config, seed=args.seed, runs=args.runs)
    best_cuts = [a.cut for a, _ in runs]
    best_idx = int(np.argmax(best_cuts))
    payload = {
        "graph": {"path": args.graph, "n_vertices": g.n_vertices,
                  "n_edges": g.n_edges},
        "config": config.to_dict(),
        "seed": args.seed,
        "runs": [r for _, r in runs],
        "best_cut": best_cuts[best_idx],
        "best_bits": runs[best_idx][0].bitstring(),
        "normalized_avg_cut": graphs.normalized_avg_cut(best_cuts, g.n_edges),
        "wall_time_s": time.perf_counter() - t0,
    }
    _write_json(payload, args.out)
    print(f"GW best cut {payload['best_cut']:.6f} over {args.runs} runs "
          f"(R={args.projections}) -> {args.out}")
    return 0


def cmd_warmstart(args) -> int:
    g = graphs.read_graph(args.graph)
    config = _edvqe_config(args.config)
    t0 = time.perf_counter()
    if args.initial:
        with open(args.initial, "r", encoding="utf-8") as fh:
            bits = [int(c) for c in fh.read().strip()]
        start = graphs.CutAssignment.from_bits(g, bits)
        gw_info = None
    else:
        gw_config = GwConfig(projections=args.gw_projections)
        runs = gw_runs(g, gw_config, seed=args.seed, runs=args.gw_runs)
        best_idx = int(np.argmax([a.cut for a, _ in runs]))
        start = runs[best_idx][0]
        gw_info = {"config": gw_config.to_dict(), "runs": args.gw_runs,
                   "best_cut": start.cut}
    result = warm_start_solve(g, start, config, seed=args.seed)
    payload = result.to_dict(config)
    payload["warm_start"] = gw_info or {"initial_file": args.initial,
                                        "best_cut": start.cut}
    payload["wall_time_s"] = time.perf_counter() - t0
    _write_json(payload, args.out)
    print(f"warm start {start.cut:.6f} -> refined {result.best.cut:.6f} "
          f"-> {args.out}")
    return 0


def cmd_phase(args) -> int:
    frags = ph.load_fragments(args.fragments)
    truth = ph.read_truth(args.truth) if args.truth else None
    if args.solver == "gw":
        solver_config = GwConfig()
    elif args.solver == "edvqe":
        solver_config = _edvqe_config(args.config)
    else:
        solver_config = None
    t0 = time.perf_counter()
    result = ph.phase(frags, solver=args.solver, solver_config=solver_config,
                      seed=args.seed, graph_mode=args.graph_mode,
                      truth_h1=truth, warm_start=args.warm_start)
    payload = result.to_dict()
    payload["solver"] = args.solver
    payload["graph_mode"] = args.graph_mode
    payload["seed"] = args.seed
    payload["n_sites"] = frags.n_sites
    payload["wall_time_s"] = time.perf_counter() - t0
    _write_json(payload, args.out)
    if args.haplotypes_out:
        for name, hap in (("h1", payload["h1"]), ("h2", payload["h2"])):
            with open(f"{args.haplotypes_out}.{name}.txt", "w",
                      encoding="utf-8") as fh:
                fh.write(hap + "\n")
    print(f"phased {frags.n_reads} reads: MEC {result.mec}, completeness "
          f"{result.completeness:.3f} -> {args.out}")
    return 0


def cmd_synth(args) -> int:
    frags, truth = ph.gen_synthetic_diploid(args.sites, args.reads,
                                            args.read_len, args.error_rate,
                                            seed=args.seed)
    ph.write_fragments(frags, args.out)
    if args.truth_out:
        ph.write_truth(truth, args.truth_out)
    print(f"wrote {frags.n_reads} reads x {frags.n_sites} sites to {args.out}")
    return 0


# ---------------------------------------------------------------------------
# benchmark sweep
# ---------------------------------------------------------------------------

_BENCH_COLUMNS = ["family", "n", "metric", "R", "A_bar", "delta_cns1",
                  "delta_qp2", "pct_cns1", "pct_qp2", "per_run_cuts",
                  "wall_time_s", "status"]


def _bench_graph(family, n, graph_seed, spec):
    if family == "complete":
        return graphs.gen_complete(n, graph_seed)
    if family == "cluster":
        return graphs.gen_cluster(n, spec.get("community_size", 10),
                                  tuple(spec.get("intra_range", (5.0, 10.0))),
                                  tuple(spec.get("inter_range", (1.0, 3.0))),
                                  spec.get("p_inter", 0.3), graph_seed)
    if family in ("regular", "regular3"):
        return graphs.gen_regular(n, spec.get("degree", 3), graph_seed)
    raise ConfigError(f"unknown graph family {family!r}")


def _row(family, n, metric, r_value, a_bar, deltas, cuts, wall, status="ok"):
    d_cns1, d_qp2, p_cns1, p_qp2 = deltas if deltas else ("", "", "", "")
    return {
        "family": family, "n": n, "metric": metric, "R": r_value,
        "A_bar": a_bar, "delta_cns1": d_cns1, "delta_qp2": d_qp2,
        "pct_cns1": p_cns1, "pct_qp2": p_qp2,
        "per_run_cuts": ";".join(f"{c:.10g}" for c in cuts),
        "wall_time_s": f"{wall:.3f}", "status": status,
    }


def run_bench(spec: dict) -> list[dict]:
    """Execute a benchmark spec and return CSV rows.

    Per (family, n): one GW row per projection count in ``r_list`` (A-bar over
    the run seeds' best cuts) and Initial/CNS1/QP2 rows decomposing the solver
    trajectory, plus an optional WarmStart row. Failures are recorded in the
    row's status column instead of aborting the sweep.
    """
    family = spec.get("family", "complete")
    sizes = spec.get("sizes", [])
    if not sizes:
        raise ConfigError("bench spec needs non-empty 'sizes'")
    run_seeds = spec.get("run_seeds", list(range(10)))
    if not run_seeds:
        raise ConfigError("bench spec needs non-empty 'run_seeds'")
    graph_seed = spec.get("graph_seed", 3587)
    r_list = spec.get("r_list", [1])
    gw_config_base = spec.get("gw", {})
    solver_config = EdvqeConfig.from_dict(spec.get("edvqe", {}))
    rows: list[dict] = []

    for n in sizes:
        g = _bench_graph(family, n, graph_seed, spec)
        m = g.n_edges
        for r in r_list:
            t0 = time.perf_counter()
            try:
                gw_config = GwConfig.from_dict({**gw_config_base, "projections": r})
                cuts = []
                for seed in run_seeds:
                    best, _ = gw_solve(g, gw_config, seed=seed)
                    cuts.append(best.cut)
                a_bar = graphs.normalized_avg_cut(cuts, m)
                rows.append(_row(family, n, f"GW(R={r})", r, f"{a_bar:.6f}",
                                 None, cuts, time.perf_counter() - t0))
            except Exception as exc:  # keep sweeping, record the failure
                rows.append(_row(family, n, f"GW(R={r})", r, "", None, [],
                                 time.perf_counter() - t0, f"error: {exc}"))
        t0 = time.perf_counter()
        try:
            stage_cuts = {"Initial": [], "CNS1": [], "QP2": []}
            for seed in run_seeds:
                result = edvqe_solve(g, solver_config, seed=seed)
                c_init, c_cns1, c_final = result.stage_cuts()
                stage_cuts["Initial"].append(c_init)
                stage_cuts["CNS1"].append(c_cns1)
                stage_cuts["QP2"].append(c_final)
            wall = time.perf_counter() - t0
            a_init = graphs.normalized_avg_cut(stage_cuts["Initial"], m)
            a_cns1 = graphs.normalized_avg_cut(stage_cuts["CNS1"], m)
            a_qp2 = graphs.normalized_avg_cut(stage_cuts["QP2"], m)
            deltas = (f"{a_cns1 - a_init:.6f}", f"{a_qp2 - a_cns1:.6f}",
                      f"{100.0 * (a_cns1 - a_init) / a_init:.4f}" if a_init else "",
                      f"{100.0 * (a_qp2 - a_cns1) / a_cns1:.4f}" if a_cns1 else "")
            for metric, a_bar in (("Initial", a_init), ("CNS1", a_cns1),
                                  ("QP2", a_qp2)):
                rows.append(_row(family, n, metric, "", f"{a_bar:.6f}", deltas,
                                 stage_cuts[metric], wall))
        except Exception as exc:
            for metric in ("Initial", "CNS1", "QP2"):
                rows.append(_row(family, n, metric, "", "", None, [],
                                 time.perf_counter() - t0, f"error: {exc}"))
        if spec.get("warm_start", False):
            t0 = time.perf_counter()
            try:
                r_max = max(r_list)
                gw_config = GwConfig.from_dict({**gw_config_base,
                                                "projections": r_max})
                cuts = []
                for seed in run_seeds:
                    runs = gw_runs(g, gw_config, seed=seed, runs=len(run_seeds))
                    start = max((a for a, _ in runs), key=lambda a: a.cut)
                    refined = warm_start_solve(g, start, solver_config, seed=seed)
                    cuts.append(refined.best.cut)
                a_bar = graphs.normalized_avg_cut(cuts, m)
                rows.append(_row(family, n, "WarmStart", r_max, f"{a_bar:.6f}",
                                 None, cuts, time.perf_counter() - t0))
            except Exception as exc:
                rows.append(_row(family, n, "WarmStart", "", "", None, [],
                                 time.perf_counter() - t0, f"error: {exc}"))
    return rows


def cmd_bench(args) -> int:
    spec = _load_json(args.spec)
    rows = run_bench(spec)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=_BENCH_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    bad = sum(1 for r in rows if r["status"] != "ok")
    print(f"wrote {len(rows)} rows to {args.out}"
          + (f" ({bad} with errors)" if bad else ""))
    return 1 if bad else 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="edvqe",
                                     description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a benchmark graph")
    p.add_argument("family", choices=["complete", "cluster", "regular", "regular3"])
    p.add_argument("n", type=int)
    p.add_argument("seed", type=int)
    p.add_argument("out")
    p.add_argument("--w-min", type=float, default=1.0)
    p.add_argument("--w-max", type=float, default=10.0)
    p.add_argument("--integer-weights", action="store_true")
    p.add_argument("--community-size", type=int, default=10)
    p.add_argument("--intra-min", type=float, default=5.0)
    p.add_argument("--intra-max", type=float, default=10.0)
    p.add_argument("--inter-min", type=float, default=1.0)
    p.add_argument("--inter-max", type=float, default=3.0)
    p.add_argument("--p-inter", type=float, default=0.3)
    p.add_argument("--degree", type=int, default=3)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="run the full solver on a graph file")
    p.add_argument("graph")
    p.add_argument("out")
    p.add_argument("--config", help="solver config JSON")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("gw", help="Goemans-Williamson baseline")
    p.add_argument("graph")
    p.add_argument("out")
    p.add_argument("--projections", type=int, default=100)
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--rank", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gw)

    p = sub.add_parser("warmstart", help="refine a GW (or given) start")
    p.add_argument("graph")
    p.add_argument("out")
    p.add_argument("--config", help="solver config JSON")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--initial", help="file holding a 0/1 assignment string")
    p.add_argument("--gw-projections", type=int, default=1000)
    p.add_argument("--gw-runs", type=int, default=10)
    p.set_defaults(func=cmd_warmstart)

    p = sub.add_parser("phase", help="haplotype phasing from a fragment file")
    p.add_argument("fragments")
    p.add_argument("out")
    p.add_argument("--truth", help="truth haplotype file")
    p.add_argument("--solver", choices=["edvqe", "gw", "brute"], default="edvqe")
    p.add_argument("--config", help="solver config JSON (edvqe solver)")
    p.add_argument("--graph-mode", choices=["signed", "discordant"],
                   default="signed")
    p.add_argument("--warm-start", action="store_true",
                   help="seed the edvqe solver from GW roundings")
    p.add_argument("--haplotypes-out", metavar="PREFIX",
                   help="also write PREFIX.h1.txt / PREFIX.h2.txt")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_phase)

    p = sub.add_parser("synth", help="generate synthetic diploid fragments")
    p.add_argument("out")
    p.add_argument("--sites", type=int, default=60)
    p.add_argument("--reads", type=int, default=150)
    p.add_argument("--read-len", type=int, default=8)
    p.add_argument("--error-rate", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--truth-out")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("bench", help="benchmark sweep from a spec JSON")
    p.add_argument("spec")
    p.add_argument("out")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
