"""Command-line front end: generation, verification, factor/tour
construction, sampling statistics, entropy checks, and benchmark runs.

Exit codes: 0 success, 2 validation failure, 3 infeasible size, 4 I/O.
All randomised subcommands require an explicit --seed so every run is
replayable; identical (instance, config, seed) produce byte-identical
JSON apart from wall-clock fields.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .entropy import chain_rule_check, check_skew_lemma, reveal_audit
from .errors import (
    BadParameters,
    CycleFactorError,
    FormatMismatch,
    GraphDisconnected,
    ParseError,
    SizeLimitExceeded,
)
from .exact import build_report
from .graphs import (
    RegularDigraph,
    UndirectedRegularGraph,
    double_undirected,
    gen_family,
    gen_random_regular_digraph,
    graph_to_text,
    read_graph,
    require_valid,
    write_graph,
)
from .sampling import SamplerConfig, min_cycle_factor
from .transforms import (
    to_path_factor,
    to_tour,
    to_undirected_cycle_factor,
    verify_path_factor,
    verify_tour,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INFEASIBLE = 3
EXIT_IO = 4

FAMILIES = ("complete_loops", "clique_union", "cycle", "complete_bipartite_like")


def instance_hash(g) -> str:
    return hashlib.sha256(graph_to_text(g).encode()).hexdigest()[:16]


def cycle_bound(n: int, d: int) -> dict:
    """The expected-cycle bound in both logarithm conventions."""
    return {
        "base2": 4.0 * n / d * (math.log2(d) + 1.0),
        "natural": 4.0 * n / d * (math.log(d) + 1.0),
    }


def _sampler_config(args, seed: int) -> SamplerConfig:
    return SamplerConfig(
        backend=args.backend,
        mcmc_steps=args.mcmc_steps,
        num_samples=args.samples,
        seed=seed,
    )


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, sort_keys=True)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _load_graph(path: str):
    try:
        return read_graph(path)
    except FileNotFoundError as e:
        raise _Exit(EXIT_IO, f"cannot read {path}: {e}")
    except (ParseError, FormatMismatch) as e:
        raise _Exit(EXIT_INVALID, f"bad graph file {path}: {e}")


class _Exit(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        self.message = message


def cmd_gen(args) -> int:
    if args.family == "random":
        if args.seed is None:
            raise _Exit(EXIT_INVALID, "gen random requires --seed")
        g = gen_random_regular_digraph(
            args.n,
            args.d,
            args.seed,
            allow_loops=not args.no_loops,
            allow_digons=not args.no_digons,
        )
    else:
        g = gen_family(args.family, args.n, args.d)
    try:
        write_graph(g, args.out)
    except OSError as e:
        raise _Exit(EXIT_IO, f"cannot write {args.out}: {e}")
    return EXIT_OK


def cmd_verify(args) -> int:
    g = _load_graph(args.path)
    if isinstance(g, UndirectedRegularGraph):
        g = double_undirected(g)
    try:
        report = build_report(g)
    except SizeLimitExceeded as e:
        print(f"infeasible: {e}; try the sampling subcommands instead", file=sys.stderr)
        return EXIT_INFEASIBLE
    rows = [(b.name, b.lhs, b.rhs, b.holds) for b in report.bound_audit]
    loss_cap = report.n / report.d * math.log2(math.e * report.d)
    rows.append(("entropy_loss_nonnegative", 0.0, report.entropy_loss, report.entropy_loss >= -1e-9))
    rows.append(("entropy_loss_upper", report.entropy_loss, loss_cap, report.entropy_loss <= loss_cap + 1e-9))
    audit_note = None
    if g.n <= 6:
        try:
            audit = reveal_audit(g)
            rows.append(("reveal_uniformity", 0.0, 0.0, audit.uniform))
            rows.append(("reveal_loss_agreement", audit.loss_gap, 1e-6, audit.loss_gap <= 1e-6))
        except SizeLimitExceeded:
            audit_note = "reveal audit skipped (too many factors)"
    if args.format == "json":
        _emit(
            {
                "report": json.loads(report.to_json()),
                "checks": [
                    {"name": n, "lhs": l, "rhs": r, "holds": h} for n, l, r, h in rows
                ],
            },
            args.out,
        )
    else:
        print(f"n={report.n} d={report.d} factors={report.matching_count} "
              f"E[cycles]={report.expected_cycles} loss={report.entropy_loss:.6f}")
        for name, lhs, rhs, holds in rows:
            print(f"{'PASS' if holds else 'FAIL'}  {name:28s} lhs={lhs:.6g} rhs={rhs:.6g}")
        if audit_note:
            print(audit_note)
    return EXIT_OK if all(r[3] for r in rows) else EXIT_INVALID


def _factor_payload(g: RegularDigraph, args) -> tuple[dict, object]:
    cfg = _sampler_config(args, args.seed)
    result = min_cycle_factor(g, cfg)
    payload = {
        "instance_hash": instance_hash(g),
        "seed": args.seed,
        "backend": result.backend,
        "steps": cfg.resolve_steps(g) if result.backend == "mcmc" else 0,
        "cycle_counts": list(result.cycle_counts),
        "cycle_count": result.best_count,
        "sigma": list(result.factor.sigma),
        "cycles": [list(c) for c in result.factor.cycles],
        "cycle_bound": cycle_bound(g.n, g.d),
    }
    return payload, result.factor


def cmd_cyclefactor(args) -> int:
    g = _load_graph(args.path)
    if isinstance(g, UndirectedRegularGraph):
        g = double_undirected(g)
    payload, factor = _factor_payload(g, args)
    if not factor.is_factor_of(g):
        raise _Exit(EXIT_INVALID, "sampled object failed independent re-validation")
    _emit(payload, args.out)
    return EXIT_OK


def cmd_pathfactor(args) -> int:
    g = _load_graph(args.path)
    if not isinstance(g, UndirectedRegularGraph):
        raise _Exit(EXIT_INVALID, "path-factor construction needs an undirected graph")
    payload, factor = _factor_payload(double_undirected(g), args)
    cycles = to_undirected_cycle_factor(factor, g)
    pf = to_path_factor(cycles, g)
    check = verify_path_factor(pf, g)
    if not check.ok:
        raise _Exit(EXIT_INVALID, f"path-factor failed re-validation: {check.violations}")
    payload.update({"paths": [list(p) for p in pf.paths], "path_count": pf.num_paths})
    _emit(payload, args.out)
    return EXIT_OK


def cmd_tour(args) -> int:
    g = _load_graph(args.path)
    if not isinstance(g, UndirectedRegularGraph):
        raise _Exit(EXIT_INVALID, "tour construction needs an undirected graph")
    payload, factor = _factor_payload(double_undirected(g), args)
    cycles = to_undirected_cycle_factor(factor, g)
    try:
        tour = to_tour(cycles, g)
    except GraphDisconnected as e:
        raise _Exit(EXIT_INVALID, str(e))
    check = verify_tour(tour, g)
    if not check.ok:
        raise _Exit(EXIT_INVALID, f"tour failed re-validation: {check.violations}")
    payload.update(
        {
            "walk": list(tour.walk),
            "length": tour.length,
            "length_bound": g.n + 2 * (len(cycles) - 1),
        }
    )
    _emit(payload, args.out)
    return EXIT_OK


def cmd_sample_stats(args) -> int:
    g = _load_graph(args.path)
    if isinstance(g, UndirectedRegularGraph):
        g = double_undirected(g)
    cfg = _sampler_config(args, args.seed)
    result = min_cycle_factor(g, cfg)
    counts = result.cycle_counts
    _emit(
        {
            "instance_hash": instance_hash(g),
            "seed": args.seed,
            "backend": result.backend,
            "steps": cfg.resolve_steps(g) if result.backend == "mcmc" else 0,
            "cycle_counts": list(counts),
            "mean": sum(counts) / len(counts),
            "min": min(counts),
            "max": max(counts),
            "cycle_bound": cycle_bound(g.n, g.d),
        },
        args.out,
    )
    return EXIT_OK


def cmd_entropy_check(args) -> int:
    rng = random.Random(args.seed)
    failures = 0
    for s in range(2, args.max_support + 1):
        for _ in range(args.trials):
            weights = [-math.log(1.0 - rng.random()) for _ in range(s)]
            total = sum(weights)
            probs = [w / total for w in weights]
            if not check_skew_lemma(probs).holds:
                failures += 1
    for _ in range(args.trials):
        rows = rng.randrange(2, 6)
        cols = rng.randrange(2, 6)
        weights = [-math.log(1.0 - rng.random()) for _ in range(rows * cols)]
        total = sum(weights)
        joint = [
            [weights[r * cols + c] / total for c in range(cols)] for r in range(rows)
        ]
        if not chain_rule_check(joint).holds:
            failures += 1
    _emit(
        {
            "seed": args.seed,
            "trials_per_support": args.trials,
            "max_support": args.max_support,
            "failures": failures,
        },
        args.out,
    )
    return EXIT_OK if failures == 0 else EXIT_INVALID


def _bench_instance(desc: dict, config: dict) -> tuple[str, object]:
    if "path" in desc:
        g = read_graph(desc["path"])
    elif desc.get("family") == "random":
        g = gen_random_regular_digraph(desc["n"], desc["d"], desc["seed"])
    else:
        g = gen_family(desc["family"], desc["n"], desc["d"])
    require_valid(g)
    return instance_hash(g), g


def _bench_outputs(g, config: dict) -> dict:
    outputs: dict = {}
    digraph = double_undirected(g) if isinstance(g, UndirectedRegularGraph) else g
    if digraph.n <= int(config.get("oracle_max_n", 8)):
        report = build_report(digraph)
        outputs["oracle"] = json.loads(report.to_json())
    cfg = SamplerConfig(
        backend=config.get("backend", "auto"),
        mcmc_steps=config.get("mcmc_steps"),
        num_samples=config.get("samples"),
        seed=config.get("seed", 0),
    )
    result = min_cycle_factor(digraph, cfg)
    outputs["cycle_counts"] = list(result.cycle_counts)
    outputs["min_cycles"] = result.best_count
    outputs["backend"] = result.backend
    if isinstance(g, UndirectedRegularGraph):
        cycles = to_undirected_cycle_factor(result.factor, g)
        pf = to_path_factor(cycles, g)
        if not verify_path_factor(pf, g).ok:
            raise BadParameters("path-factor failed re-validation")
        outputs["path_count"] = pf.num_paths
        if g.is_connected():
            tour = to_tour(cycles, g)
            if not verify_tour(tour, g).ok:
                raise BadParameters("tour failed re-validation")
            outputs["tour_length"] = tour.length
    return outputs


def cmd_bench(args) -> int:
    try:
        manifest = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise _Exit(EXIT_IO, f"cannot read manifest: {e}")
    except json.JSONDecodeError as e:
        raise _Exit(EXIT_INVALID, f"bad manifest: {e}")
    config = manifest.get("config", {})
    instances = manifest.get("instances", [])
    out_path = Path(args.out) if args.out else Path("bench_results.ndjson")
    config_hash = hashlib.sha256(
        json.dumps(config, sort_keys=True).encode()
    ).hexdigest()[:16]

    existing = set()
    if out_path.exists():
        for line in out_path.read_text(encoding="utf-8").splitlines():
            if line.strip():
                rec = json.loads(line)
                existing.add((rec["instance_hash"], rec["config_hash"], rec["seed"]))

    workers = max(1, int(os.environ.get("CYCLEFACTOR_THREADS", "1")))

    def run_one(desc: dict):
        ih, g = _bench_instance(desc, config)
        seed = config.get("seed", 0)
        key = (ih, config_hash, seed)
        if key in existing:
            return None
        start = time.monotonic()
        outputs = _bench_outputs(g, config)
        wall_ms = int((time.monotonic() - start) * 1000)
        return {
            "instance": desc,
            "instance_hash": ih,
            "config": config,
            "config_hash": config_hash,
            "seed": seed,
            "outputs": outputs,
            "wall_ms": wall_ms,
            "version": __version__,
        }

    errors = []
    records = []
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(run_one, desc) for desc in instances]
        for desc, fut in zip(instances, futures):
            try:
                rec = fut.result()
            except CycleFactorError as e:
                errors.append({"instance": desc, "error": str(e)})
                continue
            if rec is not None:
                records.append(rec)

    try:
        with out_path.open("a", encoding="utf-8") as fh:
            for rec in records:
                fh.write(json.dumps(rec, sort_keys=True) + "\n")
    except OSError as e:
        raise _Exit(EXIT_IO, f"cannot write results: {e}")

    if args.format == "csv" and records:
        csv_path = out_path.with_suffix(".csv")
        fields = ["instance_hash", "config_hash", "seed", "min_cycles", "path_count", "tour_length"]
        with csv_path.open("w", encoding="utf-8") as fh:
            fh.write(",".join(fields) + "\n")
            for rec in records:
                row = [
                    rec["instance_hash"],
                    rec["config_hash"],
                    str(rec["seed"]),
                    str(rec["outputs"].get("min_cycles", "")),
                    str(rec["outputs"].get("path_count", "")),
                    str(rec["outputs"].get("tour_length", "")),
                ]
                fh.write(",".join(row) + "\n")

    if errors:
        print(json.dumps({"partial_failures": errors}, sort_keys=True), file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cyclefactor",
        description="Cycle-factors with few cycles: generators, exact verification, samplers, path-factors, and tours.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_sampler_flags(p, need_seed=True):
        p.add_argument("--seed", type=int, required=need_seed, help="64-bit RNG seed")
        p.add_argument("--backend", choices=("exact", "mcmc", "auto"), default="auto")
        p.add_argument("--samples", type=int, default=None, help="number of independent draws")
        p.add_argument("--mcmc-steps", type=int, default=None, help="chain burn-in budget")
        p.add_argument("--out", default=None, help="output path (default stdout)")

    p = sub.add_parser("gen", help="generate a graph file")
    p.add_argument("family", choices=FAMILIES + ("random",))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--no-loops", action="store_true")
    p.add_argument("--no-digons", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", help="exact bound audits on a small instance")
    p.add_argument("path")
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("cyclefactor", help="sample a cycle-factor with few cycles")
    p.add_argument("path")
    add_sampler_flags(p)
    p.set_defaults(func=cmd_cyclefactor)

    p = sub.add_parser("pathfactor", help="construct a path-factor of an undirected graph")
    p.add_argument("path")
    add_sampler_flags(p)
    p.set_defaults(func=cmd_pathfactor)

    p = sub.add_parser("tour", help="construct a short tour of a connected graph")
    p.add_argument("path")
    add_sampler_flags(p)
    p.set_defaults(func=cmd_tour)

    p = sub.add_parser("sample-stats", help="cycle-count statistics over k draws")
    p.add_argument("path")
    add_sampler_flags(p)
    p.set_defaults(func=cmd_sample_stats)

    p = sub.add_parser("entropy-check", help="random checks of the entropy lemmas")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--max-support", type=int, default=16)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_entropy_check)

    p = sub.add_parser("bench", help="run a benchmark manifest")
    p.add_argument("manifest")
    p.add_argument("--out", default=None, help="NDJSON results path")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _Exit as e:
        print(e.message, file=sys.stderr)
        return e.code
    except SizeLimitExceeded as e:
        print(str(e), file=sys.stderr)
        return EXIT_INFEASIBLE
    except (BadParameters, CycleFactorError) as e:
        print(str(e), file=sys.stderr)
        return EXIT_INVALID
    except OSError as e:
        print(str(e), file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
