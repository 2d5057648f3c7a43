"""Command-line surface: build optimal codes, encode/decode files, benchmark.

Exit codes: 0 success, 2 usage, 3 data/solver error, 4 solver time limit.
The solver time limit (seconds) can be set with the AIFV_TIME_LIMIT
environment variable.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

from .analysis import stationary
from .errors import AifvError, CapExceeded, TimeLimitExceeded
from .framing import MODE_EOF, MODE_LENGTH, parse_container, write_container
from .huffman import huffman_pair_rate, huffman_rate
from .ip_model import default_depth
from .model import (
    BINARY,
    TERNARY,
    SourceDistribution,
    deserialize_code,
    entropy,
    family_distribution,
    kary_two_tree,
    make_distribution,
    serialize_code,
)
from .optimizer import optimize, trace_csv
from .solver import brute_force_pair

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_TIMEOUT = 4

DEFAULT_EOF_LABEL = "<EOF>"
DEFAULT_EOF_PROB = Fraction(1, 2 ** 16)


def read_distribution_file(path: str) -> SourceDistribution:
    """One 'label value' pair per line; values are rationals or decimals,
    parsed exactly; '#' starts a comment."""
    labels, probs = [], []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise AifvError(f"{path}:{lineno}: expected 'label value', got {raw!r}")
        try:
            probs.append(Fraction(parts[1]))
        except (ValueError, ZeroDivisionError) as exc:
            raise AifvError(f"{path}:{lineno}: bad probability {parts[1]!r}") from exc
        labels.append(parts[0])
    return make_distribution(labels, probs)


def _family_from_args(args) -> object:
    if args.family == "binary":
        return BINARY
    if args.family == "ternary":
        return TERNARY
    return kary_two_tree(args.arity, args.j)


def _time_limit() -> float | None:
    raw = os.environ.get("AIFV_TIME_LIMIT")
    return float(raw) if raw else None


def _with_eof(dist: SourceDistribution, label: str, prob: Fraction) -> SourceDistribution:
    if label in dist.symbols:
        raise AifvError(f"EOF label {label!r} collides with the alphabet")
    scale = 1 - prob
    return make_distribution(
        list(dist.symbols) + [label],
        [p * scale for p in dist.probs] + [prob],
    )


def cmd_build(args) -> int:
    dist = read_distribution_file(args.distribution)
    family = _family_from_args(args)
    eof_symbol = None
    if args.eof:
        eof_symbol = args.eof_label
        dist = _with_eof(dist, eof_symbol, Fraction(args.eof_prob))
    cost = Fraction(args.cost) if args.cost is not None else None
    result = optimize(
        dist,
        family,
        depth=args.depth,
        initial_cost=cost,
        single_pass=args.no_iterate,
        time_limit=_time_limit(),
    )
    code = result.code
    final = result.trace[-1]
    chain = stationary(code, dist)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    extra = {"eof_symbol": eof_symbol} if eof_symbol else None
    (out_dir / "code.json").write_text(serialize_code(code, extra))
    (out_dir / "trace.csv").write_text(trace_csv(result.trace))
    summary = {
        "family": family.label(),
        "alphabet_size": dist.size,
        "depth": args.depth or default_depth(family, dist),
        "entropy": entropy(dist, family.arity),
        "L0": str(final.L0),
        "L1": str(final.L1),
        "q0": str(final.q0),
        "q1": str(final.q1),
        "Q": [str(q) for q in chain.Q],
        "L_AIFV": str(final.L_aifv),
        "L_AIFV_float": float(final.L_aifv),
        "iterations": result.iterations,
        "solver_nodes": result.solver_nodes,
        "wall_time_s": result.wall_time,
        "eof_symbol": eof_symbol,
    }
    (out_dir / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    print(f"L_AIFV = {final.L_aifv} ({float(final.L_aifv):.6f}) "
          f"after {result.iterations} iteration(s); wrote {out_dir}/code.json")
    return EXIT_OK


def cmd_encode(args) -> int:
    code_obj = json.loads(Path(args.code).read_text())
    code = deserialize_code(Path(args.code).read_text())
    message = list(Path(args.input).read_text())
    if args.framing == "eof":
        eof_symbol = code_obj.get("eof_symbol")
        if eof_symbol is None:
            raise AifvError("code.json carries no eof_symbol; rebuild with --eof")
        blob = write_container(code, message, MODE_EOF, eof_symbol)
    else:
        blob = write_container(code, message, MODE_LENGTH)
    Path(args.output).write_bytes(blob)
    print(f"{len(message)} symbols -> {len(blob)} bytes")
    return EXIT_OK


def cmd_decode(args) -> int:
    parsed = parse_container(Path(args.input).read_bytes())
    if args.code:
        expected = deserialize_code(Path(args.code).read_text())
        if expected != parsed.code:
            raise AifvError("container was written with a different code")
    Path(args.output).write_text("".join(parsed.message))
    print(f"decoded {len(parsed.message)} symbols")
    return EXIT_OK


def _parse_range(text: str) -> range:
    lo, _, hi = text.partition(":")
    return range(int(lo), int(hi or lo) + 1)


def cmd_bench(args) -> int:
    family = _family_from_args(args)
    time_limit = _time_limit()
    rows = []
    for n in _parse_range(args.n_range):
        dist = family_distribution(args.dist, n)
        h = entropy(dist, family.arity)
        l_h = huffman_rate(dist, family.arity)
        try:
            l_h_x2 = huffman_pair_rate(dist, family.arity)
        except CapExceeded:
            l_h_x2 = ""
        start = time.monotonic()
        result = optimize(dist, family, depth=args.depth, time_limit=time_limit)
        wall = time.monotonic() - start
        l_aifv = result.l_aifv
        assert h <= float(l_aifv) <= float(l_h) + 1e-12
        rows.append({
            "family": family.label(),
            "n": n,
            "dist": args.dist,
            "H": repr(h),
            "L_H": str(l_h),
            "L_H_X2": str(l_h_x2),
            "L_AIFV": str(l_aifv),
            "iterations": result.iterations,
            "solver_nodes": result.solver_nodes,
            "wall_time_s": f"{wall:.3f}",
        })
        print(f"{family.label()} {args.dist} n={n}: "
              f"H={h:.4f} L_H={float(l_h):.4f} L_AIFV={float(l_aifv):.4f} "
              f"({result.iterations} iter)")
    fieldnames = list(rows[0].keys())
    with open(args.out, "w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=fieldnames)
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {args.out}")
    if args.plot:
        _render_plot(rows, args.plot)
        print(f"wrote {args.plot}")
    return EXIT_OK


def _render_plot(rows, path: str) -> None:
    """Normalized compression rate (L / H) against alphabet size."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    ns = [row["n"] for row in rows]
    h = [float(Fraction(row["H"])) if "/" in row["H"] else float(row["H"]) for row in rows]
    series = [("L_H", "Huffman", "o"), ("L_AIFV", "AIFV", "s"),
              ("L_H_X2", "Huffman on pairs", "^")]
    fig, ax = plt.subplots(figsize=(6, 4))
    for key, label, marker in series:
        ys = []
        for row, hv in zip(rows, h):
            if row[key] == "":
                break
            ys.append(float(Fraction(row[key])) / hv)
        else:
            ax.plot(ns, ys, marker=marker, label=label)
    ax.set_xlabel("alphabet size")
    ax.set_ylabel("rate / entropy")
    ax.set_title(f"{rows[0]['family']} codes on {rows[0]['dist']}")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def cmd_oracle(args) -> int:
    dist = read_distribution_file(args.distribution)
    family = _family_from_args(args)
    depth = args.depth
    oracle_code, oracle_value = brute_force_pair(dist, family, depth)
    result = optimize(dist, family, depth=depth, time_limit=_time_limit())
    built = result.l_aifv
    print(f"brute force : L_AIFV = {oracle_value} ({float(oracle_value):.6f})")
    print(f"optimizer   : L_AIFV = {built} ({float(built):.6f})")
    if oracle_value == built:
        print("AGREE")
        return EXIT_OK
    print("DISAGREE (this is a bug)")
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aifv",
        description="Optimal almost-instantaneous FV codes, baselines, and benchmarks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_family(p):
        p.add_argument("--family", choices=["binary", "ternary", "kary"], default="binary")
        p.add_argument("--arity", type=int, default=4, help="K for --family kary")
        p.add_argument("--j", type=int, default=1, help="children per incomplete node (kary)")

    p = sub.add_parser("build", help="construct the optimal tree pair for a distribution")
    p.add_argument("distribution", help="file of 'label probability' lines")
    add_family(p)
    p.add_argument("--depth", type=int, default=None, help="depth bound D")
    p.add_argument("--cost", default=None, help="initial cost (exact rational)")
    p.add_argument("--no-iterate", action="store_true", help="single solve at the seed cost")
    p.add_argument("--eof", action="store_true", help="extend the alphabet with an EOF symbol")
    p.add_argument("--eof-label", default=DEFAULT_EOF_LABEL)
    p.add_argument("--eof-prob", default=str(DEFAULT_EOF_PROB))
    p.add_argument("--out", default="aifv-out", help="output directory")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("encode", help="encode a text file into a container")
    p.add_argument("code", help="code.json from `aifv build`")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--framing", choices=["length", "eof"], default="length")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="decode a container back to text")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--code", default=None, help="cross-check against this code.json")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("bench", help="sweep benchmark distributions and write CSV")
    add_family(p)
    p.add_argument("--dist", choices=["P0", "P1", "P2"], default="P0")
    p.add_argument("--n-range", default="4:8", help="inclusive range, e.g. 4:10")
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--out", default="bench.csv")
    p.add_argument("--plot", default=None, help="also render a PNG figure here")
    p.add_argument("--seed", type=int, default=0, help="seed for any sampled checks")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("oracle", help="diff the optimizer against brute force (small inputs)")
    p.add_argument("distribution")
    add_family(p)
    p.add_argument("--depth", type=int, default=4)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TimeLimitExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TIMEOUT
    except (AifvError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
