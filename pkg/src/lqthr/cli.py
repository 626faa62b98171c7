"""Command-line front end: ``lqthr {curve,table,verify,plotscript}``.

Exit codes: 0 success, 2 numerical failure (a curve point failed or a table
cell is out of tolerance), 3 I/O error, 4 usage error.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import LqthrError
from .nullspace_check import ProblemInstance, verify_condition
from .special_math import QuadratureSpec
from .tables import TABLES
from .width_bound import CurvePoint, ThresholdKind, curve, worker_count

EXIT_OK, EXIT_NUMERIC, EXIT_IO, EXIT_USAGE = 0, 2, 3, 4
CSV_FIELDS = ("beta", "alpha", "nu", "gamma", "xtilde", "objective")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def parse_grid(text: str) -> list[float]:
    """``start:stop:count`` -> evenly spaced betas, strictly increasing in (0, 1)."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid must look like start:stop:count, got {text!r}")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise UsageError(f"bad grid {text!r}: {exc}") from None
    if count < 1:
        raise UsageError("grid count must be at least 1")
    if count == 1:
        if start != stop:
            raise UsageError("a one-point grid needs start == stop")
        grid = [start]
    else:
        if not start < stop:
            raise UsageError("grid start must be below stop")
        grid = [float(v) for v in np.linspace(start, stop, count)]
    if not all(0.0 < b < 1.0 for b in grid):
        raise UsageError("grid values must lie strictly inside (0, 1)")
    return grid


@dataclass
class RunConfig:
    kind: ThresholdKind
    q: float
    beta_grid: list[float]
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    seed: int = 0
    output_path: str | None = None
    format: str = "csv"

    def __post_init__(self):
        if not 0.0 <= self.q <= 1.0:
            raise UsageError(f"q must lie in [0, 1], got {self.q}")
        if any(b >= c for b, c in zip(self.beta_grid, self.beta_grid[1:])):
            raise UsageError("beta grid must be strictly increasing")

    @property
    def separator(self) -> str:
        return "\t" if self.format == "tsv" else ","


def _num(v) -> str:
    if v is None or (isinstance(v, float) and not np.isfinite(v)):
        return ""
    return f"{v:.6f}"


def format_rows(points: list[CurvePoint], sep: str = ",") -> str:
    lines = [sep.join(CSV_FIELDS)]
    errors = []
    for p in points:
        if p.ok:
            vals = (p.beta, p.alpha, p.duals.nu, p.duals.gamma, p.x_mag, p.objective)
        else:
            vals = (p.beta, None, None, None, None, None)
            errors.append(f"#error beta={p.beta:.6f}: {p.error}")
        lines.append(sep.join(_num(v) for v in vals))
    return "\n".join(lines + errors) + "\n"


def read_curve_csv(text: str, sep: str = ",") -> tuple[list[dict], list[str]]:
    """Parse curve output into row dicts (floats or None) and comment lines."""
    lines = text.splitlines()
    if not lines or tuple(lines[0].split(sep)) != CSV_FIELDS:
        raise ValueError("missing or malformed curve header")
    rows, comments = [], []
    for line in lines[1:]:
        if line.startswith("#"):
            comments.append(line)
            continue
        cells = line.split(sep)
        if len(cells) != len(CSV_FIELDS):
            raise ValueError(f"bad row: {line!r}")
        rows.append({f: (float(c) if c else None) for f, c in zip(CSV_FIELDS, cells)})
    return rows, comments


def write_curve_csv(rows: list[dict], comments: list[str] = (), sep: str = ",") -> str:
    out = [sep.join(CSV_FIELDS)]
    out += [sep.join(_num(r.get(f)) for f in CSV_FIELDS) for r in rows]
    return "\n".join(out + list(comments)) + "\n"


def _emit(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def cmd_curve(config: RunConfig, workers: int | None = None) -> int:
    points = curve(config.kind, config.q, config.beta_grid, config.quadrature, workers)
    text = format_rows(points, config.separator)
    _emit(text, config.output_path)
    return EXIT_OK if all(p.ok for p in points) else EXIT_NUMERIC


def cmd_table(table_id: str, workers: int | None = None, out=None) -> int:
    out = out or sys.stdout
    if table_id not in TABLES:
        raise UsageError(f"unknown table {table_id!r}; choose from {', '.join(TABLES)}")
    table = TABLES[table_id]
    points = curve(table.kind, table.q, [r.beta for r in table.rows], workers=workers)
    print(f"# {table.caption} (tolerance {table.tolerance})", file=out)
    print("beta,ref_alpha,alpha,delta,status", file=out)
    passed = True
    for row, p in zip(table.rows, points):
        if p.ok:
            delta = p.alpha - row.alpha
            ok = abs(delta) <= table.tolerance
            print(f"{row.beta:.4f},{row.alpha:.4f},{p.alpha:.6f},{delta:+.6f},{'ok' if ok else 'FAIL'}", file=out)
        else:
            ok = False
            print(f"{row.beta:.4f},{row.alpha:.4f},,,FAIL #error {p.error}", file=out)
        passed &= ok
    print(f"# result={'pass' if passed else 'fail'}", file=out)
    return EXIT_OK if passed else EXIT_NUMERIC


def parse_matrix(text: str) -> np.ndarray:
    """Rows separated by ';', entries by ','.  Used as a fixed-matrix hook."""
    try:
        rows = [[float(v) for v in r.split(",")] for r in text.split(";")]
        return np.array(rows, dtype=float)
    except ValueError as exc:
        raise UsageError(f"bad matrix {text!r}: {exc}") from None


def cmd_verify(n: int, m: int, k: int, q: float, samples: int, seed: int, kind,
               refine: bool = False, matrix: str | None = None, out=None) -> int:
    out = out or sys.stdout
    if not (0 < m < n and 1 <= k <= m) or samples < 1 or not 0.0 <= q <= 1.0:
        raise UsageError(f"invalid dimensions or parameters: n={n}, m={m}, k={k}, samples={samples}, q={q}")
    if matrix is not None:
        a = parse_matrix(matrix)
        if a.shape != (m, n):
            raise UsageError(f"matrix shape {a.shape} does not match m={m}, n={n}")
        instance = ProblemInstance.from_matrix(a, k)
    else:
        instance = ProblemInstance.gaussian(n, m, k, seed)
    report = verify_condition(instance, kind, q, samples, refine=refine, seed=seed,
                              workers=worker_count())
    for line in [f"n={n}", f"m={m}", f"k={k}", f"q={q}", f"seed={seed}"] + report.lines():
        print(line, file=out)
    return EXIT_OK


def cmd_plotscript(csv_paths: list[str], out: str | None = None) -> int:
    if not csv_paths:
        raise OSError("no input CSV files given")
    for p in csv_paths:
        if not Path(p).is_file():
            raise OSError(f"missing input file: {p}")
    lines = [
        "# gnuplot script: threshold curves in the (alpha, beta) plane",
        'set datafile separator ","',
        'set xlabel "alpha = m/n"',
        'set ylabel "beta = k/n"',
        "set xrange [0:1]",
        "set yrange [0:*]",
        "set key top left",
        "set grid",
    ]
    series = [f"'{p}' using 2:1 every ::1 with lines lw 2 title \"{Path(p).stem}\"" for p in csv_paths]
    lines.append("plot " + ", \\\n     ".join(series))
    _emit("\n".join(lines) + "\n", out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lqthr", description="lq-minimization recovery threshold bounds")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("curve", help="compute alpha(beta) along a beta grid")
    c.add_argument("--kind", required=True, choices=[k.value for k in ThresholdKind])
    c.add_argument("--q", type=float, required=True)
    c.add_argument("--beta", required=True, help="grid start:stop:count")
    c.add_argument("--nodes", type=int, default=QuadratureSpec.node_count)
    c.add_argument("--truncation", type=float, default=QuadratureSpec.truncation)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out", default=None, help="output path (default stdout)")
    c.add_argument("--format", choices=("csv", "tsv"), default="csv")
    c.add_argument("--workers", type=int, default=None)

    t = sub.add_parser("table", help="recompute a published table and compare")
    t.add_argument("table_id")
    t.add_argument("--workers", type=int, default=None)

    v = sub.add_parser("verify", help="Monte Carlo null-space condition check")
    v.add_argument("--n", type=int, required=True)
    v.add_argument("--m", type=int, required=True)
    v.add_argument("--k", type=int, required=True)
    v.add_argument("--q", type=float, required=True)
    v.add_argument("--samples", type=int, default=10000)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--kind", choices=[k.value for k in ThresholdKind], default="sectional")
    v.add_argument("--refine", action="store_true")
    v.add_argument("--matrix", default=None, help="fixed A as 'a,b;c,d' instead of a random one")

    p = sub.add_parser("plotscript", help="emit a gnuplot script for curve CSVs")
    p.add_argument("csv", nargs="*")
    p.add_argument("--out", default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse usage errors and --help
        return int(exc.code or 0)
    try:
        if args.command == "curve":
            spec = QuadratureSpec(node_count=args.nodes, truncation=args.truncation)
            config = RunConfig(ThresholdKind(args.kind), args.q, parse_grid(args.beta), spec,
                               args.seed, args.out, args.format)
            if args.out not in (None, "-"):
                parent = Path(args.out).resolve().parent
                if not parent.is_dir() or not os.access(parent, os.W_OK):
                    raise OSError(f"cannot write to {args.out}")
            return cmd_curve(config, args.workers)
        if args.command == "table":
            return cmd_table(args.table_id, args.workers)
        if args.command == "verify":
            return cmd_verify(args.n, args.m, args.k, args.q, args.samples, args.seed,
                              args.kind, args.refine, args.matrix)
        return cmd_plotscript(args.csv, args.out)
    except UsageError as exc:
        print(f"lqthr: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (LqthrError, ValueError) as exc:
        print(f"lqthr: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"lqthr: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    raise SystemExit(main())
