"""Command-line surface for the package.

Subcommands: constants | sum | eval | verify | threshold | class-bound |
compare.  Every command honors --format {text, structured, tabular}
(human-readable lines, JSON, or CSV) and --output for writing to a file.

Exit codes: 0 = all checks passed, 1 = a certain violation (or a falsified
claim) was found, 2 = configuration, input, or capacity error.

Precision resolution order: --precision flag, then the DIVISUM_PRECISION
environment variable, then the config file, then the built-in 256 bits.
A config file (--config, JSON) mirrors the shared flags one-to-one with
keys precision, segment_size, workers, format, output.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from contextlib import nullcontext
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from divisum.class_bounds import (
    BatchRow,
    NumberFieldInput,
    batch_class_bounds,
    class_bound_for_field,
    write_batch_csv,
)
from divisum.enclosure import Enclosure
from divisum.errors import DivisumError, DomainError
from divisum.formulas import (
    S1_exact,
    S2_exact,
    S3_exact,
    S1_approx,
    S2_approx,
    S3_approx,
    default_table,
    delta_of_x,
    envelope,
    main_term_d4,
    main_term_dsq,
    prior_bound,
    theorem_specs,
)
from divisum.kernels import (
    DEFAULT_SEGMENT_SIZE,
    Kind,
    stream_summatory,
    summatory_d4_exact,
    summatory_d_exact,
    summatory_dsq_exact,
)
from divisum.verifier import (
    compare_prior_bounds,
    find_threshold,
    verify_delta_alpha,
    verify_envelope,
    verify_s1_constant,
    verify_s2_checkpoints,
)

__all__ = ["RunConfig", "main"]

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_CONFIG = 2

_SPEC_ALIASES = {
    "thm1": "d4-full",
    "thm1.1": "d4-full",
    "thm13": "dsq-full",
    "thm1.3": "dsq-full",
}

_SIEVE_SUM_CAP = 10**8

_KINDS = {"d": Kind.D, "d4": Kind.D4, "dsq": Kind.DSQ}

_EXACT_OPS = {
    Kind.D: summatory_d_exact,
    Kind.D4: summatory_d4_exact,
    Kind.DSQ: summatory_dsq_exact,
}


@dataclass(frozen=True)
class RunConfig:
    """Shared runtime knobs, resolved from flags / env / config file."""

    precision_bits: int = 256
    segment_size: int = DEFAULT_SEGMENT_SIZE
    workers: int = 1
    output_format: str = "text"
    output_path: str | None = None

    def validate(self) -> None:
        if self.precision_bits < 64:
            raise DomainError("precision_bits must be at least 64")
        if self.segment_size < 2**10:
            raise DomainError("segment_size must be at least 1024")
        if self.workers < 1:
            raise DomainError("workers must be at least 1")
        if self.output_format not in ("text", "structured", "tabular"):
            raise DomainError(f"unknown output format {self.output_format!r}")


# -- argument plumbing --------------------------------------------------------


def _int_arg(text: str) -> int:
    """Integer flag value; accepts underscores and exact scientific forms
    like 1e7."""
    s = text.replace("_", "")
    try:
        return int(s)
    except ValueError:
        f = float(s)
        if f != int(f):
            raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
        return int(f)


def _x_arg(text: str):
    """Evaluation point: integer, rational p/q, or decimal."""
    s = text.replace("_", "")
    try:
        return int(s)
    except ValueError:
        pass
    if "/" in s:
        return Fraction(s)
    return float(s)


def _shared_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--precision", type=_int_arg, default=None,
                   help="enclosure working precision in bits (default 256)")
    p.add_argument("--segment-size", type=_int_arg, default=None,
                   help="scan segment length (default 2^22)")
    p.add_argument("--workers", type=_int_arg, default=None,
                   help="parallel scan workers (default: logical cores)")
    p.add_argument("--format", choices=("text", "structured", "tabular"),
                   default=None, help="output format (default text)")
    p.add_argument("--output", default=None, metavar="PATH",
                   help="write output to PATH instead of stdout")
    p.add_argument("--config", default=None, metavar="FILE",
                   help="JSON file of shared-flag defaults")


_CONFIG_KEYS = ("precision", "segment_size", "workers", "format", "output")


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    file_cfg: dict = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            file_cfg = json.load(fh)
        unknown = set(file_cfg) - set(_CONFIG_KEYS)
        if unknown:
            raise DomainError(f"unknown config keys: {sorted(unknown)}")

    def pick(flag, key, fallback):
        if flag is not None:
            return flag
        if key in file_cfg:
            return file_cfg[key]
        return fallback

    env_prec = os.environ.get("DIVISUM_PRECISION")
    if args.precision is not None:
        precision = args.precision
    elif env_prec:
        precision = int(env_prec)
    else:
        precision = file_cfg.get("precision", 256)
    cfg = RunConfig(
        precision_bits=int(precision),
        segment_size=int(pick(args.segment_size, "segment_size", DEFAULT_SEGMENT_SIZE)),
        workers=int(pick(args.workers, "workers", os.cpu_count() or 1)),
        output_format=str(pick(args.format, "format", "text")),
        output_path=pick(args.output, "output", None),
    )
    cfg.validate()
    return cfg


def _open_out(cfg: RunConfig):
    if cfg.output_path:
        return open(cfg.output_path, "w", encoding="utf-8", newline="")
    return nullcontext(sys.stdout)


def _enclosure_obj(e: Enclosure) -> dict:
    return {"mid": e.mid, "rad": e.rad,
            "lower": float(e.lower_exact()), "upper": float(e.upper_exact())}


# -- constants ----------------------------------------------------------------


def _cmd_constants(args, cfg: RunConfig) -> int:
    table = default_table(cfg.precision_bits)
    rows = []
    for name, value, formula in table.entries():
        if isinstance(value, Enclosure):
            rows.append((name, f"{value.mid:.18g}", f"{value.rad:.3e}", formula))
        else:
            rows.append((name, str(value), "0", formula))
    with _open_out(cfg) as fh:
        if cfg.output_format == "structured":
            obj = {
                name: (
                    _enclosure_obj(v) | {"formula": f}
                    if isinstance(v, Enclosure)
                    else {"value": str(v), "formula": f}
                )
                for name, v, f in table.entries()
            }
            obj["precision_bits"] = table.precision_bits
            json.dump(obj, fh, indent=2, sort_keys=True)
            fh.write("\n")
        elif cfg.output_format == "tabular":
            w = csv.writer(fh)
            w.writerow(["name", "value", "radius", "formula"])
            w.writerows(rows)
        else:
            fh.write(f"constants table at {table.precision_bits} bits\n")
            for name, val, rad, formula in rows:
                fh.write(f"  {name:<14} {val:<42} rad {rad:<10}  {formula}\n")
    return EXIT_OK


# -- exact sums ---------------------------------------------------------------


def _sieve_sum(kind: Kind, x: int, segment_size: int) -> int:
    if x > _SIEVE_SUM_CAP:
        raise DomainError(
            f"sieve method walks every integer; use identity above {_SIEVE_SUM_CAP:.0e}"
        )
    holder = [0]

    def visitor(n: int, running: int) -> None:
        if n == x:
            holder[0] = running

    stream_summatory(kind, x, visitor, segment_size=segment_size)
    return holder[0]


def _cmd_sum(args, cfg: RunConfig) -> int:
    kind = _KINDS[args.kind]
    x = args.x
    values: dict[str, int] = {}
    if args.method in ("identity", "both"):
        values["identity"] = _EXACT_OPS[kind](x).value
    if args.method in ("sieve", "both"):
        values["sieve"] = _sieve_sum(kind, x, cfg.segment_size)
    agree = len(set(values.values())) == 1
    with _open_out(cfg) as fh:
        if cfg.output_format == "structured":
            json.dump({"kind": args.kind, "x": x, **values, "agree": agree}, fh)
            fh.write("\n")
        elif cfg.output_format == "tabular":
            w = csv.writer(fh)
            w.writerow(["kind", "x", "method", "value"])
            for m, v in values.items():
                w.writerow([args.kind, x, m, v])
        else:
            for m, v in values.items():
                fh.write(f"sum {args.kind} up to {x} ({m}): {v}\n")
            if args.method == "both":
                fh.write("methods agree\n" if agree else "METHODS DISAGREE\n")
    return EXIT_OK if agree else EXIT_VIOLATION


# -- formula evaluation -------------------------------------------------------


def _eval_registry(table):
    specs = theorem_specs(table)
    p = table.precision_bits
    return {
        "main-d4": lambda x: main_term_d4(x, table),
        "main-dsq": lambda x: main_term_dsq(x, table),
        "env-d4": lambda x: envelope(specs["d4-full"], x, p),
        "env-dsq": lambda x: envelope(specs["dsq-full"], x, p),
        "delta": lambda x: delta_of_x(x, table),
        "s1": lambda x: S1_exact(x, p),
        "s2": lambda x: S2_exact(x, p),
        "s3": lambda x: S3_exact(x, p),
        "s1-approx": lambda x: S1_approx(x, table),
        "s2-approx": lambda x: S2_approx(x, table),
        "s3-approx": lambda x: S3_approx(x, table),
        "hall": lambda x: prior_bound("hall", x, 4, table),
        "lounge": lambda x: prior_bound("lounge", x, 4, table),
        "games": lambda x: prior_bound("games", x, 4, table),
        "kitchen": lambda x: prior_bound("kitchen", x, 4, table),
    }


def _cmd_eval(args, cfg: RunConfig) -> int:
    table = default_table(cfg.precision_bits)
    fn = _eval_registry(table)[args.quantity]
    result = fn(args.x)
    with _open_out(cfg) as fh:
        if isinstance(result, Enclosure):
            if cfg.output_format == "structured":
                json.dump({"quantity": args.quantity, "x": float(args.x),
                           **_enclosure_obj(result)}, fh)
                fh.write("\n")
            elif cfg.output_format == "tabular":
                w = csv.writer(fh)
                w.writerow(["quantity", "x", "mid", "rad"])
                w.writerow([args.quantity, float(args.x), repr(result.mid), repr(result.rad)])
            else:
                fh.write(f"{args.quantity}({args.x}) = {result.mid:.15g}  "
                         f"(radius {result.rad:.3e})\n")
        else:  # ApproxResult
            if cfg.output_format == "structured":
                json.dump({"quantity": args.quantity, "x": float(args.x),
                           "main": _enclosure_obj(result.main),
                           "radius": _enclosure_obj(result.radius),
                           "certified": result.certified}, fh)
                fh.write("\n")
            elif cfg.output_format == "tabular":
                w = csv.writer(fh)
                w.writerow(["quantity", "x", "main_mid", "radius_mid", "certified"])
                w.writerow([args.quantity, float(args.x), repr(result.main.mid),
                            repr(result.radius.mid), result.certified])
            else:
                note = "" if result.certified else "  [x below certified range]"
                fh.write(f"{args.quantity}({args.x}) = {result.main.mid:.15g} "
                         f"+/- {result.radius.mid:.6g}{note}\n")
    return EXIT_OK


# -- verification -------------------------------------------------------------


def _report_text(fh, report) -> None:
    fh.write(f"spec            {report.spec_name}\n")
    fh.write(f"range           [{report.range[0]}, {report.range[1]}]\n")
    fh.write(f"checked         {report.checked}\n")
    nviol = len(report.violations) + report.violations_overflow
    fh.write(f"violations      {nviol}\n")
    fh.write(f"max ratio       {report.max_ratio:.9f} at x = {report.max_ratio_at}\n")
    fh.write(f"escalations     {report.precision_escalations}\n")
    fh.write(f"wall time       {report.wall_time:.2f} s\n")
    for v in report.violations:
        d = v.to_dict()
        fh.write(f"  x={v.x} ({v.side}): sum {v.lhs} outside "
                 f"[{d['rhs_lo']:.4f}, {d['rhs_hi']:.4f}], ratio {v.ratio:.6f}\n")
    if report.violations_overflow:
        fh.write(f"  ... and {report.violations_overflow} more\n")


def _emit_report(cfg: RunConfig, report) -> int:
    with _open_out(cfg) as fh:
        if cfg.output_format == "structured":
            fh.write(report.to_json())
            fh.write("\n")
        elif cfg.output_format == "tabular":
            report.write_csv(fh)
        else:
            _report_text(fh, report)
    clean = not report.violations and not report.violations_overflow
    return EXIT_OK if clean else EXIT_VIOLATION


def _s2_points(frm: int, to: int, count: int) -> list[int]:
    pts = np.geomspace(frm, to, count)
    return sorted(set(int(round(p)) for p in pts))


def _cmd_verify(args, cfg: RunConfig) -> int:
    name = _SPEC_ALIASES.get(args.spec.lower(), args.spec.lower())
    specs = theorem_specs(default_table(cfg.precision_bits))
    table = default_table(cfg.precision_bits)
    common = dict(table=table, segment_size=cfg.segment_size, workers=cfg.workers)
    if name in specs:
        spec = specs[name]
        frm = args.frm if args.frm is not None else (2 if spec.two_sided else spec.threshold)
        to = args.to if args.to is not None else (10**7 if spec.two_sided else 10**5)
        report = verify_envelope(spec, frm, to, **common)
    elif name == "delta":
        frm = args.frm if args.frm is not None else table.x0
        to = args.to if args.to is not None else 10**7
        report = verify_delta_alpha(frm, to, **common)
    elif name == "s1":
        to = args.to if args.to is not None else 6 * 10**5 - 1
        report = verify_s1_constant(to, table=table, segment_size=cfg.segment_size)
    elif name == "s2":
        frm = args.frm if args.frm is not None else table.x0
        to = args.to if args.to is not None else 10**7
        report = verify_s2_checkpoints(
            _s2_points(frm, to, args.points), table=table,
            segment_size=cfg.segment_size,
        )
    else:
        known = sorted(list(specs) + ["delta", "s1", "s2"] + list(_SPEC_ALIASES))
        raise DomainError(f"unknown spec {args.spec!r}; choose from {', '.join(known)}")
    return _emit_report(cfg, report)


def _cmd_threshold(args, cfg: RunConfig) -> int:
    specs = theorem_specs(default_table(cfg.precision_bits))
    name = args.spec.lower()
    if name not in specs:
        raise DomainError(f"unknown spec {args.spec!r}; choose from {', '.join(sorted(specs))}")
    spec = specs[name]
    result = find_threshold(
        spec, args.limit, table=default_table(cfg.precision_bits),
        segment_size=cfg.segment_size, workers=cfg.workers,
    )
    with _open_out(cfg) as fh:
        if cfg.output_format == "structured":
            json.dump(result.to_dict(), fh, sort_keys=True)
            fh.write("\n")
        elif cfg.output_format == "tabular":
            w = csv.writer(fh)
            w.writerow(["spec", "scan_limit", "threshold", "last_violation", "crossing"])
            w.writerow([result.spec_name, result.scan_limit, result.threshold,
                        result.last_violation, result.crossing])
        else:
            fh.write(f"{result.spec_name}: threshold {result.threshold}")
            if result.last_violation is not None:
                fh.write(f" (last violation at {result.last_violation}, "
                         f"clears at {result.crossing:.6f})")
            fh.write("\n")
    return EXIT_OK if result.threshold == spec.threshold else EXIT_VIOLATION


# -- class bounds -------------------------------------------------------------


def _cmd_class_bound(args, cfg: RunConfig) -> int:
    if args.batch:
        with open(args.batch, "r", encoding="utf-8", newline="") as src:
            rows = list(batch_class_bounds(src, cfg.precision_bits))
        with _open_out(cfg) as fh:
            errors = write_batch_csv(rows, fh)
        return EXIT_CONFIG if errors else EXIT_OK
    if args.nk is None or args.r2 is None or args.disc is None:
        raise DomainError("single mode needs --nk, --r2 and --disc (or use --batch)")
    r1 = args.r1 if args.r1 is not None else args.nk - 2 * args.r2
    disc = Fraction(args.disc) if "/" in args.disc else int(args.disc)
    field = NumberFieldInput(args.nk, r1, args.r2, disc, args.label or "")
    result = class_bound_for_field(field, cfg.precision_bits)
    with _open_out(cfg) as fh:
        if cfg.output_format == "structured":
            obj = {
                "label": field.label, "n_K": field.n_K, "r1": field.r1,
                "r2": field.r2, "abs_disc": str(field.abs_disc),
                "b": _enclosure_obj(result.b),
                "bound_exact": result.bound_exact,
                "bound_formula": None if result.bound_formula is None
                else _enclosure_obj(result.bound_formula),
                "method_note": result.method_note,
            }
            json.dump(obj, fh, indent=2, sort_keys=True)
            fh.write("\n")
        elif cfg.output_format == "tabular":
            row = BatchRow(
                field.label,
                (str(field.n_K), str(field.r1), str(field.r2), str(field.abs_disc)),
                result, None,
            )
            write_batch_csv([row], fh)
        else:
            fh.write(f"Minkowski bound b = {result.b.mid:.10g} "
                     f"(radius {result.b.rad:.3e})\n")
            fh.write(f"class-number bound (exact sum): {result.bound_exact}\n")
            if result.bound_formula is not None:
                fh.write(f"closed-form cap: {result.bound_formula.mid:.6g}\n")
            fh.write(result.method_note + "\n")
    return EXIT_OK


# -- prior-bound comparison ---------------------------------------------------


def _cmd_compare(args, cfg: RunConfig) -> int:
    xs = args.x or [10.0, 100.0, 10**4, 10**6]
    rows = compare_prior_bounds(xs, default_table(cfg.precision_bits))
    all_sharper = all(r.d4_sharper for r in rows)
    with _open_out(cfg) as fh:
        if cfg.output_format == "structured":
            json.dump([r.__dict__ for r in rows], fh, indent=2, sort_keys=True)
            fh.write("\n")
        elif cfg.output_format == "tabular":
            w = csv.writer(fh)
            w.writerow(["x", "d4_exact", "d4_bound_upper", "hall", "lounge",
                        "games", "dsq_exact", "dsq_bound_upper", "kitchen",
                        "d4_sharper"])
            for r in rows:
                w.writerow([r.x, r.d4_exact, repr(r.d4_bound_upper), repr(r.hall),
                            repr(r.lounge), "" if r.games is None else repr(r.games),
                            r.dsq_exact, repr(r.dsq_bound_upper), repr(r.kitchen),
                            r.d4_sharper])
        else:
            hdr = (f"{'x':>12}  {'d4 sum':>14}  {'new bound':>12}  {'HALL':>12}  "
                   f"{'LOUNGE':>12}  {'GAMES':>12}  sharper\n")
            fh.write(hdr)
            for r in rows:
                games = "n/a" if r.games is None else f"{r.games:.5g}"
                exact = "-" if r.d4_exact is None else str(r.d4_exact)
                fh.write(f"{r.x:>12g}  {exact:>14}  {r.d4_bound_upper:>12.5g}  "
                         f"{r.hall:>12.5g}  {r.lounge:>12.5g}  {games:>12}  "
                         f"{'yes' if r.d4_sharper else 'NO'}\n")
    return EXIT_OK if all_sharper else EXIT_VIOLATION


# -- entry point --------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="divisum",
        description="Certified divisor-sum bounds: constants, exact sums, "
                    "exhaustive verification, class-number caps.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constants", help="print the certified constants table")
    _shared_flags(p)

    p = sub.add_parser("sum", help="exact summatory value")
    p.add_argument("kind", choices=sorted(_KINDS))
    p.add_argument("x", type=_int_arg)
    p.add_argument("--method", choices=("sieve", "identity", "both"),
                   default="identity")
    _shared_flags(p)

    p = sub.add_parser("eval", help="evaluate a closed-form quantity at x")
    p.add_argument("quantity",
                   choices=["main-d4", "main-dsq", "env-d4", "env-dsq", "delta",
                            "s1", "s2", "s3", "s1-approx", "s2-approx",
                            "s3-approx", "hall", "lounge", "games", "kitchen"])
    p.add_argument("x", type=_x_arg)
    _shared_flags(p)

    p = sub.add_parser("verify", help="exhaustively verify a bound over a range")
    p.add_argument("spec", help="d4-full | dsq-full | d4-clean | dsq-clean-quarter | "
                                "dsq-clean-unit | delta | s1 | s2 (aliases thm1, thm1.3)")
    p.add_argument("--from", dest="frm", type=_int_arg, default=None)
    p.add_argument("--to", dest="to", type=_int_arg, default=None)
    p.add_argument("--points", type=_int_arg, default=100,
                   help="checkpoint count for the s2 spot check")
    _shared_flags(p)

    p = sub.add_parser("threshold", help="recover the least X from which a "
                                         "one-sided bound holds")
    p.add_argument("spec")
    p.add_argument("--limit", type=_int_arg, default=10**5)
    _shared_flags(p)

    p = sub.add_parser("class-bound", help="Minkowski bound and class-number cap")
    p.add_argument("--nk", type=_int_arg, default=None)
    p.add_argument("--r1", type=_int_arg, default=None)
    p.add_argument("--r2", type=_int_arg, default=None)
    p.add_argument("--disc", default=None, help="|discriminant| (integer or p/q)")
    p.add_argument("--label", default=None)
    p.add_argument("--batch", default=None, metavar="FILE",
                   help="process a CSV of fields (label,n_K,r1,r2,abs_disc)")
    _shared_flags(p)

    p = sub.add_parser("compare", help="tabulate the new bounds against prior ones")
    p.add_argument("x", nargs="*", type=float)
    _shared_flags(p)

    return top


_DISPATCH = {
    "constants": _cmd_constants,
    "sum": _cmd_sum,
    "eval": _cmd_eval,
    "verify": _cmd_verify,
    "threshold": _cmd_threshold,
    "class-bound": _cmd_class_bound,
    "compare": _cmd_compare,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve_config(args)
        return _DISPATCH[args.command](args, cfg)
    except DivisumError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
