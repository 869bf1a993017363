"""Command-line interface: ``circindep {test,sample,bench,adjust}``.

Exit status is 0 on success, 1 for usage or validation errors and 2 for
numerical failures (degenerate variance, singular covariance).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import datetime as _dt
import hashlib
import json
import secrets
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .circular import PairedCircSample, lag_pairs, wrap_angle
from .cosine import cosine_test
from .exceptions import ConfigError, ReplicateError
from .models import MODELS
from .multi import MultiOrderSpec, multi_test
from .omnibus import PermutationPlan, permutation_test
from .power import BenchConfig, CosineTestSpec, MultiTestSpec, OmnibusTestSpec, by_correction, empirical_power

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2
DEFAULT_B = 10_000


class UsageError(ValueError):
    """Bad arguments or input; exit status 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ------------------------------------------------------------ CSV input


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def read_numeric_csv(text: str, min_columns: int = 1):
    """Parse comma-separated numbers.

    Blank lines and lines starting with ``#`` are skipped. A first data line
    with a non-numeric cell is taken as the header.

    Returns
    -------
    header : list of str or None
    rows : ndarray, shape (n_rows, n_columns)
    """
    header = None
    rows = []
    width = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        cells = [c.strip() for c in next(csv.reader([line]))]
        if header is None and not rows and not all(_is_number(c) for c in cells):
            header = cells
            width = len(cells)
            continue
        if width is None:
            width = len(cells)
        if len(cells) != width:
            raise UsageError(f"line {lineno}: expected {width} fields, found {len(cells)}")
        try:
            values = [float(c) for c in cells]
        except ValueError:
            raise UsageError(f"line {lineno}: non-numeric value in {line.strip()!r}") from None
        if not all(np.isfinite(values)):
            raise UsageError(f"line {lineno}: non-finite value in {line.strip()!r}")
        rows.append(values)
    if not rows:
        raise UsageError("input contains no data rows")
    if width < min_columns:
        raise UsageError(f"expected at least {min_columns} column(s), found {width}")
    return header, np.array(rows, dtype=float)


def _read_input(path: str) -> tuple[bytes, str]:
    if path == "-":
        raw = sys.stdin.buffer.read()
    else:
        try:
            raw = Path(path).read_bytes()
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return raw, raw.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise UsageError(f"{path} is not UTF-8: {exc}") from None


def ingest(text: str, *, degrees=False, axial=False, lag=None, columns=(0, 1)) -> PairedCircSample:
    """Turn CSV text into a paired sample.

    Angles are converted from degrees if requested, doubled if axial and
    wrapped to ``[-pi, pi)``. With ``lag = k`` the pairs are
    ``(x[i], x[i + k])`` from the first selected column.
    """
    _, data = read_numeric_csv(text)

    def prepare(col):
        if col >= data.shape[1]:
            raise UsageError(f"column {col} requested but input has {data.shape[1]} column(s)")
        x = data[:, col]
        if degrees:
            x = np.deg2rad(x)
        if axial:
            x = 2.0 * x
        return wrap_angle(x)

    if lag is not None:
        if lag < 1:
            raise UsageError(f"--lag must be at least 1, got {lag}")
        x = prepare(columns[0])
        if x.size - lag < 2:
            raise UsageError(f"lag {lag} leaves {max(x.size - lag, 0)} pair(s); need at least 2")
        return lag_pairs(x, lag)
    if data.shape[1] < 2:
        raise UsageError("single-column input needs --lag")
    s = PairedCircSample(prepare(columns[0]), prepare(columns[1]))
    if s.n < 2:
        raise UsageError("need at least 2 pairs")
    return s


# --------------------------------------------------------- option parsing


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def parse_cosine(text: str) -> CosineTestSpec:
    vals = _int_list(text)
    if len(vals) != 2:
        raise UsageError(f"--cosine expects R1,R2, got {text!r}")
    return CosineTestSpec(*vals)


def parse_multi(text: str) -> MultiTestSpec:
    """``1,-1,1,1`` (cosine pairs) or ``c=1,-1;s=1,1``."""
    if "=" not in text:
        return MultiTestSpec(MultiOrderSpec(rc=_int_list(text)))
    parts = {}
    for chunk in text.split(";"):
        key, _, val = chunk.partition("=")
        key = key.strip()
        if key not in ("c", "s"):
            raise UsageError(f"--multi parts must be c=... or s=..., got {chunk!r}")
        parts[key] = _int_list(val)
    return MultiTestSpec(MultiOrderSpec(rc=parts.get("c", ()), rs=parts.get("s", ())))


def _battery(args):
    tests = [parse_cosine(t) for t in args.cosine or ()]
    tests += [parse_multi(t) for t in args.multi or ()]
    tests += [OmnibusTestSpec(lam) for lam in args.omnibus or ()]
    if not tests:
        tests = [
            CosineTestSpec(1, 1),
            CosineTestSpec(1, -1),
            MultiTestSpec(MultiOrderSpec(rc=[1, -1, 1, 1])),
            OmnibusTestSpec(0.1),
            OmnibusTestSpec(1.0),
        ]
    return tests


def _resolve_seed(seed):
    return secrets.randbits(64) if seed is None else seed


def _write(text: str, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


# ------------------------------------------------------------- commands


def _run_one(spec, s, B, seed, center):
    if isinstance(spec, CosineTestSpec):
        return cosine_test(s, (spec.r1, spec.r2), center=center)
    if isinstance(spec, MultiTestSpec):
        return multi_test(s, spec.spec, center=center)
    return permutation_test(s, spec.lam, PermutationPlan(B=B, seed=seed))


def cmd_test(args, argv) -> int:
    raw, text = _read_input(args.input)
    s = ingest(text, degrees=args.degrees, axial=args.axial, lag=args.lag, columns=tuple(args.columns))
    tests = _battery(args)
    seed = _resolve_seed(args.seed)
    results = []
    status = EXIT_OK
    for spec in tests:
        try:
            res = _run_one(spec, s, args.B, seed, not args.no_center)
            results.append({"label": spec.label, **res.to_dict()})
        except ArithmeticError as exc:
            results.append({"label": spec.label, "error": f"{type(exc).__name__}: {exc}"})
            status = EXIT_NUMERIC
    record = {
        "command": list(argv),
        "input_sha256": hashlib.sha256(raw).hexdigest(),
        "seed": seed,
        "version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds") if args.timestamp else None,
        "n": s.n,
        "preprocessing": {
            "degrees": args.degrees,
            "axial": args.axial,
            "lag": args.lag,
            "columns": list(args.columns),
            "center": not args.no_center,
        },
        "results": results,
    }
    _write(json.dumps(record, indent=2) + "\n", args.output)
    if status != EXIT_OK:
        print("error: at least one test failed numerically; see the 'error' fields", file=sys.stderr)
    return status


def _model_params(pairs):
    out = {}
    for item in pairs or ():
        key, sep, val = item.partition("=")
        if not sep:
            raise UsageError(f"--param expects NAME=VALUE, got {item!r}")
        key = key.strip()
        if key == "interaction":
            out[key] = val.strip()
            continue
        try:
            out[key] = float(val)
        except ValueError:
            raise UsageError(f"--param {key}: not a number: {val!r}") from None
    return out


def cmd_sample(args, argv) -> int:
    if args.n < 1:
        raise UsageError(f"-n must be a positive integer, got {args.n}")
    cls = MODELS[args.model]
    params = _model_params(args.param)
    names = [f.name for f in dataclasses.fields(cls)]
    unknown = set(params) - set(names)
    if unknown:
        raise UsageError(f"unknown parameter(s) for {args.model}: {sorted(unknown)}")
    model = cls(**params)
    seed = _resolve_seed(args.seed)
    s = model.sample(args.n, seed)
    desc = " ".join(f"{k}={getattr(model, k)}" for k in names)
    lines = [f"# circindep sample {model.name} {desc} n={args.n} seed={seed}", "theta1,theta2"]
    lines += [f"{a!r},{b!r}" for a, b in zip(s.theta1.tolist(), s.theta2.tolist())]
    _write("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def shipped_configs() -> list[str]:
    return sorted(p.name[:-5] for p in resources.files("circindep").joinpath("configs").iterdir() if p.name.endswith(".json"))


def _config_path(name: str):
    p = Path(name)
    if p.exists():
        return p
    shipped = resources.files("circindep").joinpath("configs", f"{name}.json")
    if shipped.is_file():
        return shipped
    raise UsageError(f"no config file {name!r}; shipped configs: {', '.join(shipped_configs())}")


def cmd_bench(args, argv) -> int:
    path = _config_path(args.config)
    cfg = BenchConfig.from_json(path)
    table = empirical_power(cfg, workers=args.workers)
    stem = Path(str(path)).stem
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{stem}.csv").write_text(table.to_csv(), encoding="utf-8")
    (out / f"{stem}.json").write_text(table.to_json(), encoding="utf-8")
    if not args.quiet:
        sys.stdout.write(table.to_csv())
    return EXIT_OK


def cmd_adjust(args, argv) -> int:
    _, text = _read_input(args.input)
    header, data = read_numeric_csv(text)
    if data.shape[1] != 1:
        raise UsageError(f"expected one column of p-values, found {data.shape[1]}")
    p = data[:, 0]
    # map each data row back to its line number for error messages
    data_lines = [
        i
        for i, line in enumerate(text.splitlines(), start=1)
        if line.strip() and not line.lstrip().startswith("#")
    ]
    if header is not None:
        data_lines = data_lines[1:]
    bad = np.flatnonzero((p < 0) | (p > 1))
    if bad.size:
        i = int(bad[0])
        raise UsageError(f"line {data_lines[i]}: p-value {float(p[i])!r} is outside [0, 1]")
    adjusted = by_correction(p)
    name = header[0] if header else "p_value"
    lines = [f"{name},p_by"] + [f"{a:.12g},{b:.12g}" for a, b in zip(p, adjusted)]
    _write("\n".join(lines) + "\n", args.output)
    return EXIT_OK


# ----------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="circindep", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"circindep {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("test", help="run independence tests on a CSV of angles")
    t.add_argument("input", help="CSV file, or - for stdin")
    t.add_argument("--degrees", action="store_true", help="input angles are in degrees")
    t.add_argument("--axial", action="store_true", help="double axial angles before testing")
    t.add_argument("--lag", type=int, help="pair x[i] with x[i+LAG] from a single column")
    t.add_argument("--columns", type=_int_list, default=[0, 1], help="0-based columns to use (default 0,1)")
    t.add_argument("--cosine", action="append", metavar="R1,R2", help="cosine test at a frequency pair")
    t.add_argument("--multi", action="append", metavar="SPEC", help="multi-order test, e.g. 1,-1,1,1 or c=1,-1;s=1,1")
    t.add_argument("--omnibus", action="append", type=float, metavar="LAMBDA", help="omnibus test with Poisson weight LAMBDA")
    t.add_argument("-B", type=int, default=DEFAULT_B, help=f"permutations for omnibus tests (default {DEFAULT_B})")
    t.add_argument("--seed", type=int, help="seed for the permutations (random if omitted; always recorded)")
    t.add_argument("--no-center", action="store_true", help="skip centring before the cosine and multi tests")
    t.add_argument("--timestamp", action="store_true", help="record the wall-clock time (breaks byte-identical reruns)")
    t.add_argument("-o", "--output", help="write the JSON record here instead of stdout")
    t.set_defaults(func=cmd_test)

    s = sub.add_parser("sample", help="draw a sample from a toroidal model")
    s.add_argument("model", choices=sorted(MODELS))
    s.add_argument("-n", type=int, required=True, help="number of pairs")
    s.add_argument("--param", action="append", metavar="NAME=VALUE", help="model parameter, repeatable")
    s.add_argument("--seed", type=int)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_sample)

    b = sub.add_parser("bench", help="Monte Carlo size/power table from a JSON config")
    b.add_argument("config", help="config file or the name of a shipped config")
    b.add_argument("--output-dir", default=".", help="directory for <config>.csv and <config>.json")
    b.add_argument("--workers", type=int, default=1, help="worker processes (results do not depend on it)")
    b.add_argument("-q", "--quiet", action="store_true", help="do not echo the CSV table")
    b.set_defaults(func=cmd_bench)

    a = sub.add_parser("adjust", help="Benjamini-Yekutieli adjustment of a column of p-values")
    a.add_argument("input")
    a.add_argument("-o", "--output")
    a.set_defaults(func=cmd_adjust)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, argv)
    except ReplicateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC if isinstance(exc.__cause__, ArithmeticError) else EXIT_USAGE
    except ArithmeticError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UsageError, ConfigError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
