"""Command-line interface: qdissect {verify, dissect, ranks, cusps, series, eval}."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

log = logging.getLogger("qdissect")

EXIT_OK = 0
EXIT_VIOLATED = 1
EXIT_INCONCLUSIVE = 2
EXIT_ERROR = 3

RANKS_CAP = 400
SERIES_CAP = 2000


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2, which is reserved for "inconclusive"
    def error(self, message):
        raise UsageError(message)


# -- output helpers ---------------------------------------------------------------------------------


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _table(header: Sequence[str], rows: Sequence[Sequence], fmt: str) -> str:
    if fmt == "json":
        return json.dumps([dict(zip(header, map(_jsonable, r))) for r in rows], indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return buf.getvalue()
    widths = [max(len(str(h)), *(len(str(r[i])) for r in rows)) if rows else len(str(h)) for i, h in enumerate(header)]
    lines = ["  ".join(str(h).ljust(w) for h, w in zip(header, widths))]
    lines += ["  ".join(str(v).ljust(w) for v, w in zip(r, widths)) for r in rows]
    return "\n".join(l.rstrip() for l in lines) + "\n"


def _jsonable(v):
    if isinstance(v, (int, str, bool)) or v is None:
        return v
    return str(v)


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a rational number: {text!r}") from exc


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise UsageError(f"not a complex number: {text!r}") from exc


def _positive(name: str, v: int) -> int:
    if v < 1:
        raise UsageError(f"{name} must be positive")
    return v


# -- subcommands -------------------------------------------------------------------------------------


def cmd_verify(args) -> int:
    from .verifier.certificate import INCONCLUSIVE, PROVEN, VIOLATED, verify_mod7
    from .verifier.expand import dissection_check, nonholo_cancellation
    from .verifier.mutations import perturb_term
    from .verifier.terms import build_identity_terms, load_identity_text

    T = _fraction(args.precision)
    if T <= 0:
        raise UsageError("precision must be positive")
    _positive("--jobs", args.jobs)
    if args.terms:
        terms = load_identity_text(Path(args.terms).read_text(), check_digest=not args.no_digest, name=args.terms)
    else:
        terms = build_identity_terms()
    if args.mutate_term is not None:
        if not 0 <= args.mutate_term < len(terms):
            raise UsageError(f"--mutate-term must be in 0..{len(terms) - 1}")
        terms = perturb_term(terms, args.mutate_term)
    cert = verify_mod7(T, terms, jobs=args.jobs, timestamp=not args.deterministic)
    _emit(cert.to_json(), args.output)
    checks_ok = True
    if not args.skip_checks:
        dis = dissection_check(args.dissect_n)
        non = nonholo_cancellation(args.nonholo_n)
        checks_ok = dis.ok and non.ok
        print(f"dissection through q^{args.dissect_n}: {'ok' if dis.ok else 'FAILED'}", file=sys.stderr)
        print(f"non-holomorphic cancellation n <= {args.nonholo_n}: {'ok' if non.ok else 'FAILED'}", file=sys.stderr)
    print(f"budget {cert.budget}, V {cert.V}, verdict {cert.verdict}: {cert.reason}", file=sys.stderr)
    if cert.verdict == VIOLATED or not checks_ok:
        return EXIT_VIOLATED
    if cert.verdict == INCONCLUSIVE:
        return EXIT_INCONCLUSIVE
    assert cert.verdict == PROVEN
    return EXIT_OK


def cmd_dissect(args) -> int:
    from .verifier.expand import A_components, R_series, dissection_check

    _positive("--n", args.n)
    if args.show is not None:
        if not 0 <= args.show <= 6:
            raise UsageError("--show takes a residue 0..6")
        s = R_series(args.show, args.terms)
        rows = [(int(e), *(A_components(c) or ("?", "?", "?"))) for e, c in s.items()]
        _emit(_table(["n", "x", "y", "z"], rows, args.format), args.output)
        return EXIT_OK
    rep = dissection_check(args.n)
    if args.format == "json":
        _emit(json.dumps(rep.to_dict(), indent=2) + "\n", args.output)
    else:
        rows = [("O vs sum q^d R_d(q^7)", rep.matches)]
        rows += [(k, v) for k, v in rep.to_dict()["rank_differences"].items()]
        rows.append(("R_1,0(0) closed form", rep.closed_form_matches))
        _emit(_table(["check", "ok"], rows, args.format), args.output)
    return EXIT_OK if rep.ok else EXIT_VIOLATED


def cmd_ranks(args) -> int:
    from .ranks import rank_difference_series, rank_table

    if args.diff:
        try:
            r, s, d = (int(x) for x in args.diff.split(","))
        except ValueError as exc:
            raise UsageError("--diff takes r,s,d") from exc
        n = _positive("--terms", args.terms)
        if args.modulus * (n - 1) + d > RANKS_CAP:
            raise UsageError(f"table size exceeds the cap {RANKS_CAP}")
        ser = rank_difference_series(r, s, d, n, args.modulus)
        rows = [(k, ser.coefficient(k).as_rational()) for k in range(n)]
        _emit(_table(["n", "coefficient"], rows, args.format), args.output)
        return EXIT_OK
    if args.n is None:
        raise UsageError("ranks needs --n or --diff")
    if not 0 <= args.n <= RANKS_CAP:
        raise UsageError(f"--n must be in 0..{RANKS_CAP}")
    table = rank_table(args.n)
    rows = []
    for n in range(args.n + 1):
        if args.modulus_table:
            t = args.modulus_table
            rows += [(n, k, table.N_mod(k, t, n)) for k in range(t)]
        else:
            rows += [(nn, m, c) for nn, m, c in table.rows() if nn == n]
        rows.append((n, "total", table.pbar(n)))
    header = ["n", f"k_mod_{args.modulus_table}" if args.modulus_table else "rank", "count"]
    _emit(_table(header, rows, args.format), args.output)
    return EXIT_OK


def _read_cusp_table(path: str):
    from .cusps import Cusp

    out = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#") or row[0].strip().lower() == "cusp":
                continue
            try:
                out.append((Cusp.parse(row[0]), int(row[1])))
            except (ValueError, IndexError) as exc:
                raise UsageError(f"bad row in {path}: {row}") from exc
    return out


def cmd_cusps(args) -> int:
    from .cusps import cusp_representatives, group_index, match_tables, parse_group

    G = parse_group(args.group)
    reps = cusp_representatives(G)
    if args.compare:
        problems = match_tables(G, _read_cusp_table(args.compare))
        for p in problems:
            print(p, file=sys.stderr)
        print(f"{len(reps)} classes; comparison {'matches' if not problems else 'differs'}", file=sys.stderr)
        return EXIT_OK if not problems else EXIT_VIOLATED
    rows = [(str(z), w) for z, w in reps]
    _emit(_table(["cusp", "width"], rows, args.format), args.output)
    print(f"{len(reps)} cusps, widths sum to {sum(w for _, w in reps)}, index {group_index(G)}", file=sys.stderr)
    return EXIT_OK


def _series(args):
    from .exactmath import CycloRing
    from .mock.holomorphic import M_series, N7_series, N_series, P_series, calM_series
    from .qseries import eta_series
    from .ranks import O_at_root

    T = _fraction(args.T)
    if T <= 0 or T > SERIES_CAP:
        raise UsageError(f"-T must be in (0, {SERIES_CAP}]")
    ring = CycloRing(args.conductor) if args.conductor else None
    name, a, c = args.name, args.a, args.c
    if name in ("O", "P", "N", "calM", "M") and (c < 2 or 2 * a % c == 0):
        raise UsageError("need c >= 2 with c not dividing 2a")
    if name == "O":
        return O_at_root(a, c, int(T) + (T.denominator != 1), ring)
    if name == "P":
        return P_series(a, c, T, ring)
    if name == "N":
        return N_series(a, c, T, ring)
    if name == "calM":
        return calM_series(a, c, T, ring)
    if name == "M":
        return M_series(a, c, _positive("--m", args.m), T, ring)
    if name == "N7":
        if not 1 <= args.k <= 6:
            raise UsageError("--k must be in 1..6")
        return N7_series(args.k, T, ring)
    return eta_series(_positive("--m", args.m), T, ring or CycloRing(1))


def cmd_series(args) -> int:
    from .qseries import format_cyclo

    s = _series(args)
    if args.format == "json":
        _emit(s.to_json() + "\n", args.output)
    else:
        rows = [(e, format_cyclo(c)) for e, c in s.items()]
        _emit(_table(["exponent", "coefficient"], rows, args.format), args.output)
    return EXIT_OK


def cmd_eval(args) -> int:
    from .mock import numeric

    tau = _complex(args.tau)
    if tau.imag <= 0:
        raise UsageError("tau must lie in the upper half plane")
    name = args.name
    if name == "eta":
        val = numeric.eta(tau)
    elif name == "theta":
        val = numeric.theta(_complex(args.z), tau)
    elif name == "mu":
        val = numeric.mu(_complex(args.u), _complex(args.v), tau)
    elif name == "mutilde":
        val = numeric.mutilde(_complex(args.u), _complex(args.v), tau)
    elif name == "R":
        val = numeric.R(_complex(args.u), tau)
    elif name == "N":
        val = numeric.N_numeric(args.a, args.c, tau)
    else:
        val = numeric.M_numeric(args.a, args.c, tau)
    rows = [(name, repr(tau), f"{val.real:.15g}", f"{val.imag:.15g}")]
    _emit(_table(["function", "tau", "real", "imag"], rows, args.format), args.output)
    return EXIT_OK


# -- parser ---------------------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qdissect", description="Exact q-series engine and valence-formula verifier.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, fmt="text"):
        sp.add_argument("-o", "--output", help="write to this file instead of stdout")
        sp.add_argument("--format", choices=("json", "csv", "text"), default=fmt)
        sp.add_argument("--jobs", type=int, default=1, help="worker processes")
        sp.add_argument("--deterministic", action="store_true", help="omit timestamps")

    v = sub.add_parser("verify", help="certify the weight-0 identity by the valence formula")
    common(v, "json")
    v.add_argument("--precision", default="130", help="expansion truncation T (exponents below T)")
    v.add_argument("--terms", help="alternative identity table file")
    v.add_argument("--no-digest", action="store_true", help="accept a table without a matching checksum")
    v.add_argument("--mutate-term", type=int, help="test hook: corrupt one term before verifying")
    v.add_argument("--skip-checks", action="store_true", help="skip the dissection and cancellation checks")
    v.add_argument("--dissect-n", type=int, default=150)
    v.add_argument("--nonholo-n", type=int, default=50)
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("dissect", help="compare the 7-dissection with the rank generating function")
    common(d)
    d.add_argument("--n", type=int, default=150)
    d.add_argument("--show", type=int, help="print the A-components of R_d for this residue")
    d.add_argument("--terms", type=int, default=20, help="number of coefficients for --show")
    d.set_defaults(func=cmd_dissect)

    r = sub.add_parser("ranks", help="overpartition rank counts")
    common(r, "csv")
    r.add_argument("--n", type=int)
    r.add_argument("--mod", dest="modulus_table", type=int, help="group ranks by residue mod this")
    r.add_argument("--diff", help="r,s,d: coefficients of sum (N(r,t,tn+d) - N(s,t,tn+d)) q^n")
    r.add_argument("--terms", type=int, default=10)
    r.add_argument("--t", dest="modulus", type=int, default=7)
    r.set_defaults(func=cmd_ranks)

    c = sub.add_parser("cusps", help="cusp representatives and widths")
    common(c)
    c.add_argument("--group", default="G0(98)&G1(14)")
    c.add_argument("--compare", help="CSV file of cusp,width rows to match against")
    c.set_defaults(func=cmd_cusps)

    s = sub.add_parser("series", help="exact q-expansions")
    common(s)
    s.add_argument("name", choices=("O", "P", "N", "calM", "M", "N7", "eta"))
    s.add_argument("-T", default="20")
    s.add_argument("--a", type=int, default=1)
    s.add_argument("--c", type=int, default=7)
    s.add_argument("--m", type=int, default=1)
    s.add_argument("--k", type=int, default=1)
    s.add_argument("--conductor", type=int, help="override the coefficient field Q(zeta_n)")
    s.set_defaults(func=cmd_series)

    e = sub.add_parser("eval", help="double-precision evaluation")
    common(e)
    e.add_argument("name", choices=("eta", "theta", "mu", "mutilde", "R", "N", "M"))
    e.add_argument("--tau", required=True)
    e.add_argument("--z", default="0.1")
    e.add_argument("--u", default="0.1")
    e.add_argument("--v", default="0.2")
    e.add_argument("--a", type=int, default=1)
    e.add_argument("--c", type=int, default=7)
    e.set_defaults(func=cmd_eval)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"qdissect: {exc}", file=sys.stderr)
        return EXIT_ERROR
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    cache = os.environ.get("QDISSECT_CACHE")
    if cache:
        log.info("memoizing term expansions in %s", cache)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"qdissect: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"qdissect: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except ValueError as exc:
        # group parse errors and other malformed input
        print(f"qdissect: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
