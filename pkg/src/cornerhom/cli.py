"""``cornerhom`` command line: TSV on stdout, diagnostics on stderr.

Exit codes: 0 success, 2 input error, 3 budget exhausted, 4 engine defect.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from pathlib import Path

from gmpy2 import mpq

from .complexes import homology_dims
from .corners import build_L, cellular_cohomology, laurent_cohomology_formula, minimal_faces, validate
from .errors import CornerHomError, EngineDefect, InputError
from .evaluator import (cosphere_model, d1_check, eval_hc, eval_hh_laurent, eval_hp, eval_quotient_and_traces,
                        load_manifest, s1_hh)
from .hochschild import (algebra_from_table, circle_ring, hochschild_complex, laurent_algebra,
                         polynomial_algebra)
from .poisson import Patch, random_monomial_form, verify_identities
from .spectral import page_dims

log = logging.getLogger("cornerhom")


def _emit(rows):
    for r in rows:
        print("\t".join(str(x) for x in r))


def _load(args):
    if not args.manifest:
        raise InputError("--manifest is required")
    return load_manifest(args.manifest)


def cmd_validate(args):
    m = _load(args)
    M = m["M"]
    info = validate(M, m["X"])
    _emit([("key", "value"), ("name", M.name), ("dim", M.dim), ("faces", len(M.faces)),
           ("hyperfaces", len(M.hyperfaces)), ("minimal_faces", minimal_faces(M)["count"]),
           ("X", ",".join(m["X"]) or "-"), ("cells", "yes" if M.has_cells else "no"),
           ("ok", "yes" if info["valid"] else "no")])


def cmd_cohomology(args):
    m = _load(args)
    M = m["M"]
    if args.relative:
        if not m["X"]:
            raise InputError("--relative needs a nonempty X in the manifest")
        if args.route != "cellular":
            log.info("relative cohomology is computed cellularly only")
        h = cellular_cohomology(build_L(M), m["X"])
        _emit([("degree", "cellular_rel")] + [(q, h.get(q, 0)) for q in range(M.dim + 1)])
        return
    routes = {}
    if args.route in ("formula", "both"):
        routes["formula"] = laurent_cohomology_formula(M)
    if args.route in ("cellular", "both"):
        routes["cellular"] = cellular_cohomology(build_L(M))
    if args.route == "both" and any(routes["formula"].get(q, 0) != routes["cellular"].get(q, 0)
                                    for q in range(M.dim + 1)):
        raise EngineDefect(f"face formula {routes['formula']} != cellular {routes['cellular']}")
    _emit([("degree",) + tuple(routes)] +
          [(q,) + tuple(r.get(q, 0) for r in routes.values()) for q in range(M.dim + 1)])


def cmd_evaluate(args):
    m = _load(args)
    cm = cosphere_model(m["M"], m["assumptions"])
    X = m["X"]
    th = args.theorem
    if th == "hp":
        r = eval_hp(cm, args.variant, X)
        _emit([("parity", "dim"), ("even", r["even"]), ("odd", r["odd"])])
    elif th == "hh":
        if args.variant != "laurent":
            raise InputError("--theorem hh is stated for the Laurent variant only")
        r = eval_hh_laurent(cm, X)
        _emit([("q", "dim")] + sorted(r.items()))
    elif th == "hc":
        top = args.qmax if args.qmax is not None else int(m["budgets"].get("q_max", 2 * cm.n + 2))
        rows = [("m", "dim", "periodic_checked")]
        for k in range(top + 1):
            r = eval_hc(cm, X, k)
            rows.append((k, r["dim"], "yes" if r["checked"] else "no"))
        _emit(rows)
    elif th in ("quotient", "traces"):
        r = eval_quotient_and_traces(cm, X)
        print(r["note"], file=sys.stderr)
        if th == "quotient":
            _emit([("q", "dim")] + sorted(r["quotient_hh_dims"].items()))
        else:
            _emit([("key", "value"), ("trace_count", r["trace_count"]), ("h_top_dim", r["h_top_dim"]),
                   ("asserted", "yes" if r["asserted"] else "no")])


def _table_algebra(path):
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        n = int(doc["dim"])
        table = {}
        for i, j, k, c in doc["table"]:
            table.setdefault((int(i), int(j)), {})[int(k)] = mpq(str(c))
    except (OSError, KeyError, ValueError, TypeError, json.JSONDecodeError) as e:
        raise InputError(f"algebra file {path}: {e}") from None
    return algebra_from_table(n, table, unit=doc.get("unit"), commutative=bool(doc.get("commutative", False)),
                              name=str(doc.get("name", Path(path).stem)))


def cmd_hochschild(args):
    qmax = args.qmax
    if args.builtin == "s1-symbols":
        if args.weight != 0:
            raise InputError("the S^1 symbol model is computed at Fourier weight 0")
        r = s1_hh(q_max=qmax)
        log.info("degeneration page %s", r["degeneration_page"])
        _emit([("q", "dim")] + sorted(r["dims"].items()))
        return
    if args.algebra:
        A = _table_algebra(args.algebra)
    elif args.builtin == "polynomial":
        A = polynomial_algebra(max(args.weight, 0) + qmax + 2)
    elif args.builtin == "laurent":
        A = laurent_algebra(args.pole_bound, args.weight)
    elif args.builtin == "circle-ring":
        A = circle_ring(abs(args.weight) + qmax + 2)
    else:
        raise InputError("give --algebra PATH or --builtin")
    f = hochschild_complex(A, args.weight, qmax + 1)
    h = homology_dims(f.c)
    _emit([("q", "dim")] + [(q, h[q]) for q in range(qmax + 1)])


def cmd_spectral(args):
    if args.builtin != "s1-symbols":
        raise InputError("only --builtin s1-symbols is available")
    r = s1_hh(q_max=args.qmax)
    f = r["filtered"]
    lo, hi = r["window"][0]
    cells = page_dims(f, args.page)
    rows = [("k", "h", "q", "dim")]
    for (k, h), d in sorted(cells.items()):
        if lo < k < hi and k + h <= args.qmax and d:
            rows.append((k, h, k + h, d))
    _emit(rows)


def cmd_poisson(args):
    try:
        cs = [int(x) for x in args.c.split(",") if x]
    except ValueError:
        raise InputError(f"--c must be a comma-separated list of integers, got {args.c!r}") from None
    if not 1 <= args.n <= 3 or not 0 <= args.k <= args.n:
        raise InputError("need 1 <= n <= 3 and 0 <= k <= n")
    rng = random.Random(args.seed)
    rows = [("c", "checked", "ok")]
    for c in cs:
        p = Patch(args.n, args.k, (c,) * args.k)
        sample = [random_monomial_form(rng, p) for _ in range(args.samples)]
        r = verify_identities(p, sample)
        rows.append((c, r["checked"], "yes" if r["ok"] else "no"))
    _emit(rows)


def cmd_d1(args):
    r = d1_check(args.samples, args.seed)
    _emit([("key", "value"), ("checked", r["checked"]), ("ok", "yes" if r["ok"] else "no")])


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cornerhom", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true", help="diagnostics on stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a manifest")
    p.add_argument("--manifest", required=True)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("cohomology", help="Laurent-de Rham cohomology dims of a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--relative", action="store_true", help="relative to the manifest's X")
    p.add_argument("--route", choices=("formula", "cellular", "both"), default="both")
    p.set_defaults(fn=cmd_cohomology)

    p = sub.add_parser("evaluate", help="theorem right-hand sides")
    p.add_argument("--manifest", required=True)
    p.add_argument("--theorem", choices=("hp", "hh", "hc", "quotient", "traces"), required=True)
    p.add_argument("--variant", choices=("full", "order0", "laurent"), default="laurent")
    p.add_argument("--qmax", type=int, default=None, help="largest m for --theorem hc")
    p.set_defaults(fn=cmd_evaluate)

    p = sub.add_parser("hochschild", help="Hochschild homology of an algebra window")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--algebra", help="JSON structure-constant table")
    g.add_argument("--builtin", choices=("s1-symbols", "polynomial", "laurent", "circle-ring"))
    p.add_argument("--weight", type=int, default=0)
    p.add_argument("--qmax", type=int, default=2)
    p.add_argument("--pole-bound", type=int, default=4)
    p.set_defaults(fn=cmd_hochschild)

    p = sub.add_parser("spectral", help="spectral-sequence pages of the S^1 symbol model")
    p.add_argument("--builtin", choices=("s1-symbols",), required=True)
    p.add_argument("--page", type=int, default=2)
    p.add_argument("--qmax", type=int, default=2)
    p.set_defaults(fn=cmd_spectral)

    p = sub.add_parser("poisson-check", help="Poisson and Hodge identities on random forms")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--c", default="1,2")
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_poisson)

    p = sub.add_parser("d1-check", help="first differential of the symbol model versus delta")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_d1)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="cornerhom: %(message)s")
    try:
        args.fn(args)
    except CornerHomError as e:
        print(f"cornerhom: {type(e).__name__}: {e}", file=sys.stderr)
        return e.exit_code
    return 0


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
