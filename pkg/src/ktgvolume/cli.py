"""Command-line front end.

Exit codes: 0 success, 1 bad input, 2 an internal consistency check failed.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import jonesengine as je
from . import octgeom as og
from .ktgmodel import BadTarget, DomainError, ParseError, augment, parse_sequence, validate

EXIT_OK, EXIT_INPUT, EXIT_CHECK = 0, 1, 2


class InputError(Exception):
    pass


def _read_sequence(args):
    if args.dsl is not None:
        text = args.dsl
    elif args.file in (None, "-"):
        text = sys.stdin.read()
    else:
        text = Path(args.file).read_text(encoding="utf-8")
    seq = parse_sequence(text, check=False, split_components=args.split)
    if getattr(args, "rings", None) is not None:
        seq = augment(seq, args.rings)
    return seq


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError as exc:
        raise InputError(f"not a list of integers: {text!r}") from exc


def _check_parity(Ns, allow_even):
    if not Ns:
        raise InputError("empty N range")
    bad = [N for N in Ns if N < 1 or (N % 2 == 0 and not allow_even)]
    if bad:
        raise InputError(f"N={bad[0]} rejected (N must be positive and odd unless --allow-even)")


def _emit(args, text: str):
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _fmt(z: complex) -> str:
    return f"{z.real!r}{'+' if z.imag >= 0 else '-'}{abs(z.imag)!r}j"


# ---------------------------------------------------------------------------

def cmd_validate(args) -> int:
    seq = _read_sequence(args)
    rep = validate(seq)
    out = "\n".join(rep.lines()) + "\n"
    if args.format == "json":
        s = rep.stats
        out = json.dumps({
            "ok": rep.ok, "t": s.t, "u": s.u, "theta": s.theta, "r": s.r,
            "per_unzip_rings": list(s.per_unzip_rings), "twist_at_unzip": list(s.twist_at_unzip),
            "error": None if rep.ok else str(rep.error),
        }, sort_keys=True) + "\n"
    _emit(args, out)
    if not rep.ok:
        print(f"error: {rep.error}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def cmd_jones(args) -> int:
    seq = _read_sequence(args)
    rep = validate(seq)
    if not rep.ok:
        raise rep.error
    Ns = _int_list(args.N)
    _check_parity(Ns, args.allow_even)
    records = []
    lines = []
    expr = None
    for N in Ns:
        vals = {}
        if args.method in ("multisum", "both"):
            expr = expr or je.build_expression(seq, args.mode)
            if args.at == "generic":
                f = je.eval_generic(expr, N, normalize=True)
                lines.append(f"N={N} multisum generic {f}")
                continue
            vals["multisum"] = je.eval_at_root(expr, N)
        if args.method in ("closed", "both"):
            vals["closed_form"] = je.augmented_closed_form(seq, N)
        for method, v in vals.items():
            records.append(je.result_record(seq, N, v, method))
            lines.append(f"N={N} {method} {_fmt(v)}")
        if len(vals) == 2:
            a, b = vals["multisum"], vals["closed_form"]
            rel = abs(a - b) / max(abs(b), 1e-300) if b != 0 else abs(a)
            lines.append(f"N={N} discrepancy {rel!r}")
    if args.format == "json":
        _emit(args, je.records_json(records) + "\n")
    elif args.format == "csv":
        rows = ["sequence_hash,N,method,value_re,value_im"]
        rows += [f"{r['sequence_hash']},{r['N']},{r['method']},{r['value_re']!r},{r['value_im']!r}"
                 for r in records]
        _emit(args, "\n".join(rows) + "\n")
    else:
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    seq = _read_sequence(args)
    rep = validate(seq)
    if not rep.ok:
        raise rep.error
    Ns = _int_list(args.Nlist) if args.Nlist else list(range(3, args.Nmax + 1, 1 if args.allow_even else 2))
    _check_parity(Ns, args.allow_even)
    report = je.verify_conjecture(seq, Ns, multisum_max_N=args.multisum_max)
    if args.format == "json":
        _emit(args, json.dumps(report.as_dict(), indent=2, sort_keys=True) + "\n")
    else:
        lines = [f"target 2(t+1)Vol(Oct) = {report.target!r}  (t={report.t})"]
        for r in report.rows:
            if r.lhs is None:
                lines.append(f"N={r.N} J_N=0")
            else:
                lines.append(f"N={r.N} lhs={r.lhs!r} error={r.error!r}")
        lines.append(f"odd-N errors strictly decreasing: {report.odd_errors_decreasing}")
        if report.original_fails:
            lines.append("original volume conjecture: fails (J_N = 0 for even N)")
        lines.append(f"so(3) volume conjecture: {'supported' if report.so3_supported else 'not supported'}")
        lines.extend(report.notes)
        _emit(args, "\n".join(lines) + "\n")
    if any(r.multisum_check is not None and r.multisum_check > 1e-9 for r in report.rows):
        return EXIT_CHECK
    return EXIT_OK


def cmd_volume(args) -> int:
    seq = _read_sequence(args)
    rep = validate(seq)
    if not rep.ok:
        raise rep.error
    v = og.volume(seq)
    if args.format == "json":
        _emit(args, json.dumps(vars(v), sort_keys=True) + "\n")
    else:
        _emit(args, f"octahedra {v.octahedra}\nhyperbolic volume {v.hyperbolic_piece_volume!r}\n"
                    f"seifert pieces {v.seifert_pieces}\ntotal volume {v.total_volume!r}\n")
    return EXIT_OK


def cmd_gluing(args) -> int:
    seq = _read_sequence(args)
    rep = validate(seq)
    if not rep.ok:
        raise rep.error
    g = og.build_gluing(seq)
    report = og.verify_gluing(g)
    if args.format == "json":
        _emit(args, og.gluing_json(g) + "\n")
    else:
        _emit(args, report.summary() + "\n")
    return EXIT_OK if report.ok else EXIT_CHECK


def cmd_asymptotics(args) -> int:
    Ns = _int_list(args.Nlist)
    _check_parity(Ns, False)
    rows = og.asymptotic_series(Ns)
    if args.format == "json":
        _emit(args, json.dumps(rows, indent=2) + "\n")
    else:
        _emit(args, og.asymptotics_csv(rows))
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ktgvolume", description="Colored Jones values and volumes of KTGs.")
    sub = p.add_subparsers(dest="command", required=True)

    def seq_args(sp):
        sp.add_argument("file", nargs="?", help="DSL file ('-' or omitted for stdin)")
        sp.add_argument("--dsl", help="inline DSL text instead of a file")
        sp.add_argument("--split", type=int, default=1, help="declared split components")
        sp.add_argument("--rings", type=int, help="set every unzip to this many rings")
        sp.add_argument("--out", help="write output here instead of stdout")

    sp = sub.add_parser("validate", help="parse, replay and print move statistics")
    seq_args(sp)
    sp.add_argument("--format", choices=("text", "json"), default="text")
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("jones", help="normalized colored Jones values")
    seq_args(sp)
    sp.add_argument("--N", default="3", help="color or comma separated colors")
    sp.add_argument("--method", choices=("multisum", "closed", "both"), default="multisum")
    sp.add_argument("--at", choices=("root", "generic"), default="root")
    sp.add_argument("--mode", choices=("strict", "lenient"), default="strict")
    sp.add_argument("--allow-even", action="store_true")
    sp.add_argument("--format", choices=("text", "json", "csv"), default="text")
    sp.set_defaults(func=cmd_jones)

    sp = sub.add_parser("verify", help="so(3) volume conjecture report")
    seq_args(sp)
    sp.add_argument("--Nmax", type=int, default=51)
    sp.add_argument("--Nlist")
    sp.add_argument("--multisum-max", type=int, default=7, help="cross-check the closed form up to this N")
    sp.add_argument("--allow-even", action="store_true")
    sp.add_argument("--format", choices=("text", "json"), default="text")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("volume", help="hyperbolic volume of the augmented graph outside")
    seq_args(sp)
    sp.add_argument("--format", choices=("text", "json"), default="text")
    sp.set_defaults(func=cmd_volume)

    sp = sub.add_parser("gluing", help="build and check the octahedral gluing")
    seq_args(sp)
    sp.add_argument("--format", choices=("text", "json"), default="text")
    sp.set_defaults(func=cmd_gluing)

    sp = sub.add_parser("asymptotics", help="(2 pi / N) log sixj_N against 2 Vol(Oct)")
    sp.add_argument("--Nlist", default="101,501,1001,2001")
    sp.add_argument("--out")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.set_defaults(func=cmd_asymptotics)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, BadTarget, DomainError, InputError, je.NotAugmented, og.NotAugmented,
            je.TwistedUnzip, je.BudgetExceeded, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (og.GluingConflict, je.UnexpectedPole) as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
