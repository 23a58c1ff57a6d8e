"""Command-line front end: generate, build, eval, query, compare.

Exit codes: 0 success, 1 usage error, 2 soundness assertion, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import hashlib
import io
import json
import math
import secrets
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .evaluation import SoundnessError, evaluate, sample_pairs, verify_two_hop_cover
from .generators import generate_er, chung_lu_power_law
from .graph import EdgeListError, Graph, load_edge_list, write_edge_list
from .labeling import (
    BallVolume,
    BuildConfig,
    EdgeBoundary,
    Fixed,
    build,
    theoretical_params,
)
from .labels import LabelFormatError, deserialize_labels, query_distance, query_lookup_count, serialize_labels

EXIT_OK, EXIT_USAGE, EXIT_ASSERT, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _digest(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _resolve_seed(seed: int | None) -> int:
    return secrets.randbits(32) if seed is None else seed


def _write_manifest(output: str, command: str, params: dict, inputs: list[str] = ()) -> None:
    manifest = {
        "command": command,
        "params": params,
        "inputs": {p: _digest(p) for p in inputs},
        "tool_version": __version__,
        "created_at": _dt.datetime.now(_dt.timezone.utc).isoformat(),
    }
    Path(output + ".manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _load_graph(path: str, directed: bool) -> Graph:
    with open(path, "rb") as fh:
        return load_edge_list(fh, directed)


def _load_labels(path: str):
    return deserialize_labels(Path(path).read_bytes())


# ---------------------------------------------------------------------------
# generate


def cmd_generate(args) -> int:
    seed = _resolve_seed(args.seed)
    params = {"model": args.model, "n": args.n, "seed": seed}
    if args.model == "er":
        p = 2 * math.log(args.n) / args.n if args.p == "auto" else float(args.p)
        if not 0 <= p <= 1:
            raise UsageError("p must lie in [0, 1]")
        params["p"] = p
        graph = generate_er(args.n, p, seed)
    else:
        if (args.nu is None) == (args.x_min is None):
            raise UsageError("chung-lu needs exactly one of --nu and --x-min")
        params.update(beta=args.beta, nu=args.nu, x_min=args.x_min)
        try:
            graph = chung_lu_power_law(args.n, args.beta, seed, nu=args.nu, x_min=args.x_min)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    header = " ".join(f"{k}={v}" for k, v in params.items())
    with open(args.output, "wb") as fh:
        write_edge_list(graph, fh, header=f"landmark-sketch generate {header}\nvertices={graph.n} edges={graph.num_edges}")
    _write_manifest(args.output, "generate", params)
    return EXIT_OK


# ---------------------------------------------------------------------------
# build


def _config_from_args(graph: Graph, args) -> tuple[BuildConfig, dict]:
    extra = {}
    rule_flags = [args.radius is not None, args.threshold is not None, args.ball_volume is not None, args.theory]
    if sum(rule_flags) > 1:
        raise UsageError("choose one of --radius, --threshold, --ball-volume, --theory")
    if args.algo != "approx" and (args.theory or args.threshold is not None or args.ball_volume is not None):
        raise UsageError("radius rules only apply to --algo approx")
    if args.algo == "approx":
        H = args.H or 0
        if args.theory:
            if args.beta is None or args.nu is None:
                raise UsageError("--theory needs --beta and --nu")
            params = theoretical_params(graph, args.beta, args.nu)
            H, rule = params.H, params.radius_rule()
            extra = {"theory_K": params.K, "theory_delta": params.delta, "beta": args.beta, "nu": args.nu}
        elif args.threshold is not None:
            rule = EdgeBoundary(args.threshold, args.shift)
        elif args.ball_volume is not None:
            rule = BallVolume(args.ball_volume)
        else:
            rule = Fixed(2 if args.radius is None else args.radius)
        if H > graph.n:
            raise UsageError(f"--H {H} exceeds n={graph.n}")
        return BuildConfig("approx", "degree", H, rule), extra
    seed = None
    if args.algo == "das-sarma" or (args.algo == "tz" and args.selection == "uniform"):
        seed = _resolve_seed(args.seed)
    return BuildConfig(
        args.algo,
        "degree",
        args.H or 0,
        selection=args.selection,
        repetitions=args.repetitions,
        seed=seed,
    ), extra


def _timed_build(graph: Graph, config: BuildConfig):
    start = time.perf_counter()
    labels = build(graph, config)
    return labels, time.perf_counter() - start


def cmd_build(args) -> int:
    graph = _load_graph(args.graph, args.directed)
    config, extra = _config_from_args(graph, args)
    labels, wall = _timed_build(graph, config)
    Path(args.output).write_bytes(serialize_labels(labels))
    params = {**config.to_dict(), **extra, "directed": args.directed, "build_wall_time": wall}
    _write_manifest(args.output, "build", params, [args.graph])
    print(f"built {config.algorithm}: {labels.total_landmarks} entries, {labels.total_landmarks / max(graph.n, 1):.2f}/vertex, {wall:.3f}s")
    return EXIT_OK


# ---------------------------------------------------------------------------
# eval / query


def _emit_reports(reports, fmt: str, output: str | None) -> None:
    if fmt == "json":
        body = [r.to_flat_dict() for r in reports]
        text = json.dumps(body[0] if len(body) == 1 else body, indent=2) + "\n"
    else:
        buf = io.StringIO()
        columns: list[str] = []
        for r in reports:
            columns += [c for c in r.csv_columns() if c not in columns]
        writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for r in reports:
            writer.writerow(r.to_flat_dict())
        text = buf.getvalue()
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_eval(args) -> int:
    graph = _load_graph(args.graph, args.directed)
    labels = _load_labels(args.labels)
    if labels.n != graph.n or labels.directed != graph.directed:
        raise UsageError(
            f"label file (n={labels.n}, directed={labels.directed}) does not match graph "
            f"(n={graph.n}, directed={graph.directed})"
        )
    seed = _resolve_seed(args.seed)
    pairs = sample_pairs(graph, args.pairs, seed)
    report = evaluate(labels, graph, pairs, config={"pair_seed": seed, "labels": Path(args.labels).name})
    if args.verify_cover:
        check = verify_two_hop_cover(labels, graph)
        report.config["two_hop_cover"] = check.holds
        report.config["first_violation"] = None if check.holds else " ".join(map(str, check.first_violation))
    _emit_reports([report], args.format, args.output)
    if args.output:
        _write_manifest(args.output, "eval", {"pairs": args.pairs, "seed": seed}, [args.graph, args.labels])
    return EXIT_OK


def cmd_query(args) -> int:
    labels = _load_labels(args.labels)
    x, y = args.x, args.y
    if args.graph:
        graph = _load_graph(args.graph, labels.directed)
        index = {int(v): i for i, v in enumerate(graph.original_ids.tolist())}
        if x not in index or y not in index:
            raise UsageError("vertex id not present in the graph")
        x, y = index[x], index[y]
    if not (0 <= x < labels.n and 0 <= y < labels.n):
        raise UsageError(f"vertex ids must lie in [0, {labels.n})")
    d = query_distance(labels, x, y)
    print(f"distance {'unreachable' if d >= 2**32 - 1 else d} lookups {query_lookup_count(labels, x, y)}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# compare


_SPEC_KEYS = {"H", "radius", "threshold", "shift", "volume", "selection", "r", "seed", "theory", "beta", "nu"}


def parse_config_spec(spec: str, graph: Graph) -> BuildConfig:
    """Parse ``algo[:key=value,...]``, e.g. ``approx:H=800,radius=2`` or ``das-sarma:r=5,seed=1``."""
    algo, _, rest = spec.partition(":")
    opts: dict[str, str] = {}
    for item in filter(None, rest.split(",")):
        key, sep, value = item.partition("=")
        if not sep or key not in _SPEC_KEYS:
            raise UsageError(f"bad config option {item!r} in {spec!r}")
        opts[key] = value
    ns = argparse.Namespace(
        algo=algo,
        H=int(opts["H"]) if "H" in opts else None,
        radius=int(opts["radius"]) if "radius" in opts else None,
        threshold=float(opts["threshold"]) if "threshold" in opts else None,
        shift=int(opts.get("shift", 1)),
        ball_volume=int(opts["volume"]) if "volume" in opts else None,
        theory=opts.get("theory", "0") in ("1", "true", "yes"),
        beta=float(opts["beta"]) if "beta" in opts else None,
        nu=float(opts["nu"]) if "nu" in opts else None,
        selection=opts.get("selection", "degree"),
        repetitions=int(opts.get("r", 5)),
        seed=int(opts["seed"]) if "seed" in opts else None,
    )
    if algo not in ("pruned", "approx", "tz", "das-sarma"):
        raise UsageError(f"unknown algorithm {algo!r}")
    return _config_from_args(graph, ns)[0]


def parse_h_sweep(text: str) -> list[int]:
    """``start:doubling:stop`` -> ``[start, 2*start, ...]`` up to ``stop``."""
    try:
        start, mode, stop = text.split(":")
        start, stop = int(start), int(stop)
    except ValueError:
        raise UsageError(f"bad --H-sweep {text!r}; expected start:doubling:stop") from None
    if mode != "doubling" or start < 1 or stop < start:
        raise UsageError(f"bad --H-sweep {text!r}; expected start:doubling:stop")
    values = []
    while start <= stop:
        values.append(start)
        start *= 2
    return values


def cmd_compare(args) -> int:
    graph = _load_graph(args.graph, args.directed)
    configs = [parse_config_spec(s, graph) for s in args.config or []]
    if args.H_sweep:
        for H in parse_h_sweep(args.H_sweep):
            configs.append(BuildConfig("approx", "degree", min(H, graph.n), Fixed(args.radius)))
    if len(configs) < 2:
        raise UsageError("compare needs at least two configurations")
    seed = _resolve_seed(args.seed)
    pairs = sample_pairs(graph, args.pairs, seed)
    reports = []
    for config in configs:
        labels, wall = _timed_build(graph, config)
        reports.append(evaluate(labels, graph, pairs, wall, {**config.to_dict(), "pair_seed": seed}))
    _emit_reports(reports, args.format, args.output)
    if args.output:
        _write_manifest(args.output, "compare", {"configs": [c.to_dict() for c in configs], "seed": seed}, [args.graph])
    return EXIT_OK


# ---------------------------------------------------------------------------


def _add_build_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--H", type=int, default=None, help="global landmark count")
    p.add_argument("--radius", type=int, default=None, help="fixed local-ball radius (approx; default 2)")
    p.add_argument("--threshold", type=float, default=None, help="edge-boundary threshold for the radius")
    p.add_argument("--shift", type=int, default=1, choices=(0, 1), help="edge-boundary level offset")
    p.add_argument("--ball-volume", type=int, default=None, help="target ball size for the radius")
    p.add_argument("--theory", action="store_true", help="derive H and the radius rule from --beta/--nu")
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--nu", type=float, default=None)
    p.add_argument("--selection", choices=("degree", "uniform"), default="degree", help="tz global landmark choice")
    p.add_argument("--repetitions", type=int, default=5, help="das-sarma repetitions")
    p.add_argument("--seed", type=int, default=None)


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="landmark-sketch", description=__doc__.splitlines()[0])
    parser.add_argument("--threads", type=int, default=None, help="cap on worker threads")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("generate", help="write a random graph as an edge list")
    gen.add_argument("model", choices=("er", "chung-lu"))
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--p", default="auto", help="edge probability or 'auto' for 2 ln(n)/n")
    gen.add_argument("--beta", type=float, default=2.5)
    gen.add_argument("--nu", type=float, default=None)
    gen.add_argument("--x-min", type=float, default=None)
    gen.add_argument("--seed", type=int, default=None)
    gen.add_argument("-o", "--output", required=True)
    gen.set_defaults(func=cmd_generate)

    b = sub.add_parser("build", help="build a label file")
    b.add_argument("graph")
    b.add_argument("--algo", choices=("pruned", "approx", "tz", "das-sarma"), required=True)
    b.add_argument("--directed", action="store_true")
    _add_build_options(b)
    b.add_argument("-o", "--output", required=True)
    b.set_defaults(func=cmd_build)

    e = sub.add_parser("eval", help="score a label file on sampled pairs")
    e.add_argument("graph")
    e.add_argument("labels")
    e.add_argument("--directed", action="store_true")
    e.add_argument("--pairs", type=int, default=2000)
    e.add_argument("--seed", type=int, default=None)
    e.add_argument("--format", choices=("json", "csv"), default="json")
    e.add_argument("--verify-cover", action="store_true", help="all-pairs 2-hop cover check (small graphs)")
    e.add_argument("-o", "--output", default=None)
    e.set_defaults(func=cmd_eval)

    q = sub.add_parser("query", help="estimate one distance")
    q.add_argument("labels")
    q.add_argument("x", type=int)
    q.add_argument("y", type=int)
    q.add_argument("--graph", default=None, help="interpret x, y as ids from this edge list")
    q.set_defaults(func=cmd_query)

    c = sub.add_parser("compare", help="build and score several configurations on one pair sample")
    c.add_argument("graph")
    c.add_argument("--config", action="append", help="algo[:key=value,...], repeatable")
    c.add_argument("--H-sweep", dest="H_sweep", default=None, help="start:doubling:stop approx rows")
    c.add_argument("--radius", type=int, default=2, help="radius for --H-sweep rows")
    c.add_argument("--directed", action="store_true")
    c.add_argument("--pairs", type=int, default=2000)
    c.add_argument("--seed", type=int, default=None)
    c.add_argument("--format", choices=("json", "csv"), default="csv")
    c.add_argument("-o", "--output", default=None)
    c.set_defaults(func=cmd_compare)
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = make_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if args.threads:
        import numba

        numba.set_num_threads(max(1, min(args.threads, numba.config.NUMBA_NUM_THREADS)))
    try:
        return args.func(args)
    except SoundnessError as exc:
        print(f"soundness violation: {exc}", file=sys.stderr)
        return EXIT_ASSERT
    # malformed files subclass ValueError, so they must be caught first
    except (OSError, EdgeListError, LabelFormatError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
