"""Command-line entry point: ``qudit-unruh {capacity,block,verify,oracle-compare}``."""

from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .fock import QuditState
from .infotheory import Z_MAX, private_quantum_capacity, quantum_capacity
from .series import TruncationError
from .unruh import (
    BlockDump,
    ChannelSpec,
    DumpRecord,
    ORDERING_TAG,
    complementary_block,
    output_block,
    truncation_level,
    write_block_dump,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
CSV_HEADER = "d,z,Q_bits,Qp_bits,Qp_dits,terms,tail_bound"
# value columns (indices into a full row) kept by each --quantity choice
QUANTITIES = {"both": (2, 3, 4), "Q": (2,), "Qp": (3,), "Qp-dits": (4,)}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


@dataclass(frozen=True)
class SweepConfig:
    ds: tuple[int, ...]
    z_values: tuple[float, ...]
    tol: float = 1e-12
    out: str | None = None
    jobs: int = 1
    quantity: str = "both"

    def __post_init__(self):
        if self.quantity not in QUANTITIES:
            raise UsageError(f"--quantity must be one of {', '.join(QUANTITIES)}")
        if not self.ds or any(d < 2 for d in self.ds):
            raise UsageError("every d must be >= 2")
        if any(not 0 <= z <= Z_MAX for z in self.z_values):
            raise UsageError(f"z values must lie in [0, {Z_MAX}]")
        if self.tol <= 0:
            raise UsageError("--tol must be positive")


def parse_z_grid(text: str) -> tuple[float, ...]:
    """``start:stop:points`` -> evenly spaced values, endpoints included."""
    try:
        start, stop, points = text.split(":")
        start, stop, points = float(start), float(stop), int(points)
    except ValueError:
        raise UsageError(f"bad --z-grid {text!r}; expected start:stop:points") from None
    if points < 2:
        raise UsageError("--z-grid needs at least 2 points")
    if not (0 <= start <= Z_MAX and 0 <= stop <= Z_MAX):
        raise UsageError(f"--z-grid must lie within [0, {Z_MAX}]")
    return tuple(float(z) for z in np.linspace(start, stop, points))


def parse_ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise UsageError(f"bad integer list {text!r}") from None


def parse_floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise UsageError(f"bad number list {text!r}") from None


def parse_beta(text: str, d: int | None = None) -> QuditState:
    """Comma-separated complex amplitudes such as ``0.6,0.8j`` or ``0.5+0.5j,0.5-0.5j``."""
    try:
        vals = [complex(x.strip().replace(" ", "")) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad --beta {text!r}; expected comma-separated re+imj values") from None
    if d is not None and len(vals) != d:
        raise UsageError(f"--beta has {len(vals)} amplitudes but d={d}")
    try:
        return QuditState.normalized(vals, atol=1e-6)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _fmt(x: float) -> str:
    return format(x, "#.12g")


def _row(args: tuple[int, float, float]) -> str:
    d, z, tol = args
    q = quantum_capacity(d, z, tol)
    qp = private_quantum_capacity(d, z, tol)
    return ",".join([
        str(d), _fmt(z), _fmt(q.value), _fmt(qp.value), _fmt(qp.value / math.log2(d)),
        str(q.series_terms_used), format(q.tail_bound, ".3e"),
    ])


def _select(line: str, quantity: str) -> str:
    cols = line.split(",")
    keep = (0, 1) + QUANTITIES[quantity] + (5, 6)
    return ",".join(cols[i] for i in keep)


def csv_header(quantity: str = "both") -> str:
    return _select(CSV_HEADER, quantity)


def sweep_rows(cfg: SweepConfig) -> list[str]:
    work = [(d, z, cfg.tol) for d in cfg.ds for z in cfg.z_values]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(cfg.jobs) as pool:
            rows = list(pool.map(_row, work, chunksize=16))
    else:
        rows = [_row(w) for w in work]
    return [_select(r, cfg.quantity) for r in rows]


def _open_out(path: str | None):
    if path in (None, "-"):
        return sys.stdout, False
    try:
        return open(path, "w", encoding="utf-8", newline="\n"), True
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from None


def cmd_capacity(ns) -> int:
    z_values = parse_floats(ns.z) if ns.z else parse_z_grid(ns.z_grid)
    cfg = SweepConfig(parse_ints(ns.d), z_values, ns.tol, ns.out, ns.jobs, ns.quantity)
    rows = sweep_rows(cfg)
    fh, close = _open_out(cfg.out)
    try:
        fh.write(csv_header(cfg.quantity) + "\n")
        for r in rows:
            fh.write(r + "\n")
    finally:
        if close:
            fh.close()
    return EXIT_OK


def cmd_block(ns) -> int:
    d, k = parse_ints(ns.d)[0], ns.k
    if k < 1:
        raise UsageError("--k must be >= 1")
    beta = parse_beta(ns.beta, d)
    make = output_block if ns.side == "A" else complementary_block
    m = make(d, k, beta)
    dump = BlockDump(d, None, ns.side, ORDERING_TAG, 0.0, [DumpRecord(k, 1.0, m)])
    fh, close = _open_out(ns.out)
    try:
        write_block_dump(fh, dump)
    finally:
        if close:
            fh.close()
    return EXIT_OK


def cmd_verify(ns) -> int:
    from .verify import run_suite

    try:
        reports = run_suite(ns.suite, ns.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    ok = True
    for rep in reports:
        print(rep.table())
        print(f"{rep.suite}: {'PASS' if rep.passed else 'FAIL'} ({rep.cases} cases, {rep.seconds:.1f}s)\n")
        ok &= rep.passed
    print("ALL PASS" if ok else "FAILURES PRESENT")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_oracle_compare(ns) -> int:
    from .verify import oracle_distance

    d = parse_ints(ns.d)[0]
    z = parse_floats(ns.z)[0] if ns.z else 0.5
    if not 0 <= z < 1:
        raise UsageError("--z must lie in [0, 1)")
    beta = parse_beta(ns.beta, d) if ns.beta else QuditState.random(d, ns.seed)
    try:
        spec = ChannelSpec(d, z, tail_epsilon=ns.tail)
        K, tail = truncation_level(spec)
        dist = oracle_distance(d, z, beta, ns.tail)
    except (ValueError, TruncationError) as exc:
        raise UsageError(str(exc)) from None
    print(f"d={d} z={_fmt(z)} sectors={K}")
    print("beta=" + ",".join(f"{c.real:.6g}{c.imag:+.6g}j" for c in beta.beta))
    print(f"{'k':>5}  trace_distance")
    for k, v in dist.per_sector.items():
        print(f"{k:>5}  {v:.3e}")
    print(f"total_distance {dist.total:.3e}{'' if dist.exact else ' (upper bound)'}")
    print(f"uncaptured_trace {tail:.3e}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qudit-unruh", description="Qudit Unruh channel: capacities, blocks and checks.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("capacity", help="sweep Q and Qp over a z grid, CSV output")
    c.add_argument("--d", default="2,3,5,10", help="comma-separated mode counts")
    c.add_argument("--z-grid", default="0:0.99:100", help="start:stop:points")
    c.add_argument("--z", help="explicit comma-separated z values (overrides --z-grid)")
    c.add_argument("--tol", type=float, default=1e-12, help="series tail tolerance")
    c.add_argument("--out", help="CSV path (default stdout)")
    c.add_argument("--jobs", type=int, default=1, help="worker processes")
    c.add_argument("--quantity", choices=tuple(QUANTITIES), default="both", help="value columns to emit")
    c.set_defaults(func=cmd_capacity)

    b = sub.add_parser("block", help="dump one unnormalized output block")
    b.add_argument("--d", required=True)
    b.add_argument("--k", type=int, required=True)
    b.add_argument("--beta", required=True, help="comma-separated re+imj amplitudes")
    b.add_argument("--side", choices=("A", "C"), default="A")
    b.add_argument("--out")
    b.set_defaults(func=cmd_block)

    v = sub.add_parser("verify", help="run property suites")
    v.add_argument("--suite", default="all")
    v.add_argument("--seed", type=int, default=None, help="override the suite's fixed seed")
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("oracle-compare", help="brute-force squeezer vs closed form")
    o.add_argument("--d", default="2")
    o.add_argument("--z")
    o.add_argument("--beta")
    o.add_argument("--tail", type=float, default=1e-8)
    o.add_argument("--seed", type=int, default=0, help="seed for a random beta")
    o.set_defaults(func=cmd_oracle_compare)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        return ns.func(ns)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
