"""Command-line interface.

Exit status: 0 on success or a consistent network, 1 for an inconsistent
network, a missing scenario or a verification mismatch, 2 for usage and
parse errors.
"""

from __future__ import annotations

import argparse
import sys
from itertools import combinations

from . import lattice
from .derivation import derive_composition, derive_je, verify_pd, verify_table_by_derivation
from .endpoints import RatInterval, classify, oracle_table, parse_rational, verify_jepd
from .relations import (
    COMPOSITION_TABLE,
    ORDER,
    ParseError,
    RelationSet,
    compose,
    converse_set,
    parse_relation_token,
    table_to_csv,
    table_to_markdown,
)
from .network import format_realization, parse_network, path_consistency, realize, solve


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="allenkit", description="Allen interval algebra toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("compose", help="composition table entry")
    p.add_argument("r1")
    p.add_argument("r2")

    p = sub.add_parser("converse", help="converse of a relation set")
    p.add_argument("relations", nargs="+")

    p = sub.add_parser("table", help="print or re-verify the composition table")
    p.add_argument("--format", choices=("csv", "md"), default="csv")
    p.add_argument("--verify", choices=("oracle", "derivation", "both"))

    p = sub.add_parser("classify", help="relation between two rational intervals")
    for name in ("s1", "e1", "s2", "e2"):
        p.add_argument(name)

    p = sub.add_parser("derive", help="derive a composition from the meets axioms")
    p.add_argument("r1")
    p.add_argument("r2")
    p.add_argument("--tree", action="store_true", help="print the full derivation tree")

    sub.add_parser("jepd", help="check joint exhaustiveness and pairwise disjointness")

    p = sub.add_parser("closure", help="algebraic closure of a network file")
    p.add_argument("file")
    p.add_argument("--all", action="store_true", help="also list universal edges")

    p = sub.add_parser("solve", help="find an atomic scenario of a network file")
    p.add_argument("file")
    p.add_argument("--realize", action="store_true", help="also print integer endpoints")

    p = sub.add_parser("lattice", help="conceptual neighbourhood lattice")
    lsub = p.add_subparsers(dest="lattice_command", parser_class=_Parser)
    q = lsub.add_parser("neighbors")
    q.add_argument("r")
    q = lsub.add_parser("connected")
    q.add_argument("relations", nargs="*")
    q = lsub.add_parser("distance")
    q.add_argument("r1")
    q.add_argument("r2")
    return parser


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _cmd_table(args, out) -> int:
    if not args.verify:
        out.write(table_to_csv() if args.format == "csv" else table_to_markdown())
        return 0
    lines, ok = [], True
    if args.verify in ("oracle", "both"):
        got = oracle_table()
        same = sum(got[k] == v for k, v in COMPOSITION_TABLE.items())
        ok &= same == 169
        lines.append(f"{same}/169 oracle {'OK' if same == 169 else 'MISMATCH'}")
    if args.verify in ("derivation", "both"):
        report = verify_table_by_derivation()
        ok &= report.ok
        lines.append(report.summary())
        for m in report.mismatches:
            print(m, file=sys.stderr)
    out.write(", ".join(lines) + "\n")
    return 0 if ok else 1


def _cmd_jepd(out) -> int:
    model = verify_jepd()
    refuted, failures = 0, []
    for r1, r2 in combinations(ORDER, 2):
        try:
            verify_pd(r1, r2)
            refuted += 1
        except Exception as exc:  # report every failing pair, not just the first
            failures.append(f"{r1} {r2}: {exc}")
    je = derive_je()
    je_ok = je.conclusions().is_full and all(
        leaf.conclusion is not None for leaf in je.leaves()
    )
    out.write(f"model: {model.checked.get('configs', 0)} order types, "
              f"{len(model.violations)} violations\n")
    out.write(f"PD: {refuted}/78 pairs refuted\n")
    out.write(f"JE: {len(je.conclusions())}/13 relations derived\n")
    for line in model.violations + failures:
        print(line, file=sys.stderr)
    return 0 if model.ok and not failures and je_ok else 1


def _cmd_lattice(args, out) -> int:
    cmd = args.lattice_command
    if cmd is None:
        out.write(lattice.adjacency_text())
    elif cmd == "neighbors":
        out.write(f"{lattice.neighbors(parse_relation_token(args.r))}\n")
    elif cmd == "connected":
        rs = RelationSet.parse(args.relations)
        out.write("connected\n" if lattice.is_connected(rs) else "disconnected\n")
    else:
        r1, r2 = parse_relation_token(args.r1), parse_relation_token(args.r2)
        out.write(f"{lattice.conceptual_distance(r1, r2)}\n")
    return 0


def run(argv: list[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        if args.command == "compose":
            out.write(f"{compose(parse_relation_token(args.r1), parse_relation_token(args.r2))}\n")
        elif args.command == "converse":
            out.write(f"{converse_set(RelationSet.parse(args.relations))}\n")
        elif args.command == "table":
            return _cmd_table(args, out)
        elif args.command == "classify":
            s1, e1, s2, e2 = (parse_rational(x) for x in (args.s1, args.e1, args.s2, args.e2))
            try:
                p, q = RatInterval(s1, e1), RatInterval(s2, e2)
            except ValueError as exc:
                raise ParseError(str(exc)) from None
            out.write(f"{classify(p, q)}\n")
        elif args.command == "derive":
            tree = derive_composition(parse_relation_token(args.r1), parse_relation_token(args.r2))
            out.write(tree.render() if args.tree else f"{tree.conclusions()}\n")
        elif args.command == "jepd":
            return _cmd_jepd(out)
        elif args.command == "closure":
            closed = path_consistency(parse_network(_read(args.file)))
            if closed is None:
                out.write("INCONSISTENT\n")
                return 1
            out.write(closed.to_text(include_universal=args.all))
        elif args.command == "solve":
            scenario = solve(parse_network(_read(args.file)))
            if scenario is None:
                out.write("NO SCENARIO\n")
                return 1
            out.write(scenario.to_text(include_universal=True))
            if args.realize:
                out.write(format_realization(realize(scenario)))
        elif args.command == "lattice":
            return _cmd_lattice(args, out)
    except (ParseError, OSError) as exc:
        print(f"allenkit: error: {exc}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
