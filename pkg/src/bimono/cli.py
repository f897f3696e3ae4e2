"""Command-line front end.

One verb per subsystem: enumeration dumps, the two cumulant directions,
moment- and transform-level convolution, product-space queries, positivity
verdicts, limit pipelines, and a reproduction harness for the worked
fixtures.  Output is deterministic JSON with exact rationals; computation
failures exit 1 with a JSON error object, usage problems exit 2.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Any

from . import jsonio
from .convolution import convolve, grid_convolve
from .cumulants import cumulant_table_from_moments, moment_from_cumulants
from .distributions import (
    GridDistribution,
    WordDistribution,
    grid_from_measure,
    word_from_grid,
)
from .errors import BimonoError, InvalidInputError
from .limits import LimitSpec, limit_pipeline
from .partitions import (
    chi_intervals,
    chi_order,
    enumerate_bm,
    enumerate_bnc,
    pi_chi_omega,
    validate_chi,
)
from .positivity import det_exact, moment_matrix, psd_check
from .series import cauchy_from_grid
from .type2 import LocalOperator, PointedSpace, type2_moment

MAX_ORDER = 16
MAX_BOUND = 12


def _load_json(path: str | None) -> Any:
    if path is None or path == "-":
        return json.load(sys.stdin)
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _emit(doc: dict[str, Any], out: str | None = None) -> None:
    text = jsonio.dumps(doc) + "\n"
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _parse_omega(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise InvalidInputError(f"omega must be comma-separated integers: {text!r}")


def cmd_partitions(args: argparse.Namespace) -> int:
    chi = validate_chi(args.chi)
    if args.omega is not None:
        blocks = pi_chi_omega(chi, _parse_omega(args.omega))
        _emit(
            jsonio.envelope(
                "run-partition",
                {"chi": chi, "blocks": jsonio.blocks_to_json(blocks)},
            )
        )
        return 0
    if args.intervals:
        _emit(
            jsonio.envelope(
                "intervals",
                {"chi": chi, "intervals": jsonio.blocks_to_json(chi_intervals(chi))},
            )
        )
        return 0
    if args.bm:
        for op in enumerate_bm(chi, args.bound):
            sys.stdout.write(
                json.dumps(jsonio.ordered_partition_to_json(op), sort_keys=True)
                + "\n"
            )
        return 0
    if args.bnc:
        for blocks in enumerate_bnc(chi, args.bound):
            sys.stdout.write(
                json.dumps({"blocks": jsonio.blocks_to_json(blocks)}, sort_keys=True)
                + "\n"
            )
        return 0
    _emit(
        jsonio.envelope(
            "chi",
            {
                "chi": chi,
                "order": list(chi_order(chi)),
                "bnc_count": len(enumerate_bnc(chi, args.bound)),
                "bm_count": len(enumerate_bm(chi, args.bound)),
            },
        )
    )
    return 0


def cmd_moments_to_cumulants(args: argparse.Namespace) -> int:
    dist = jsonio.distribution_from_json(_load_json(args.infile))
    if isinstance(dist, GridDistribution):
        dist = word_from_grid(dist)
    max_len = args.max_len if args.max_len is not None else dist.max_len
    table = cumulant_table_from_moments(dist, max_len)
    _emit(jsonio.cumulant_table_to_json(table))
    return 0


def cmd_cumulants_to_moments(args: argparse.Namespace) -> int:
    table = jsonio.cumulant_table_from_json(_load_json(args.infile))
    if args.chi:
        patterns = [validate_chi(args.chi)]
    else:
        patterns = sorted(table.entries, key=lambda p: (len(p), p))
    moments = {p: jsonio.rat(moment_from_cumulants(table, p)) for p in patterns}
    _emit(jsonio.envelope("moments", {"moments": moments}))
    return 0


def cmd_convolve(args: argparse.Namespace) -> int:
    if args.infile:
        if len(args.infile) != 2:
            raise InvalidInputError("convolve needs exactly two inputs")
        first = jsonio.distribution_from_json(_load_json(args.infile[0]))
        second = jsonio.distribution_from_json(_load_json(args.infile[1]))
    else:
        doc = jsonio.check_schema(_load_json(None))
        first = jsonio.distribution_from_json(doc["first"])
        second = jsonio.distribution_from_json(doc["second"])
    if isinstance(first, GridDistribution) != isinstance(second, GridDistribution):
        raise InvalidInputError("convolve inputs must both be grids or both words")
    if isinstance(first, GridDistribution):
        _emit(jsonio.grid_to_json(grid_convolve(first, second)), args.out)
    else:
        _emit(jsonio.word_dist_to_json(convolve(first, second)), args.out)
    return 0


def cmd_transform(args: argparse.Namespace) -> int:
    dist = jsonio.distribution_from_json(_load_json(args.infile))
    if isinstance(dist, WordDistribution):
        raise InvalidInputError("transform expects a grid distribution")
    series = cauchy_from_grid(dist)
    if args.table:
        sys.stdout.write(jsonio.series_table_text(series) + "\n")
    else:
        _emit(jsonio.series2_to_json(series))
    return 0


def cmd_type2(args: argparse.Namespace) -> int:
    spaces_doc = jsonio.check_schema(_load_json(args.spaces))
    spaces = [PointedSpace(int(s["dim"])) for s in spaces_doc["spaces"]]
    word_doc = jsonio.check_schema(_load_json(args.word))
    word = []
    for letter in word_doc["word"]:
        op = LocalOperator.from_rows(int(letter["family"]), letter["matrix"])
        word.append((op.family, str(letter["side"]), op))
    value = type2_moment(spaces, word)
    _emit(jsonio.envelope("type2-moment", {"value": jsonio.rat(value)}))
    return 0


def cmd_psd_check(args: argparse.Namespace) -> int:
    if args.grid:
        grid = jsonio.grid_from_json(_load_json(args.grid))
        matrix = moment_matrix(grid, args.degree)
    else:
        matrix = jsonio.matrix_from_json(_load_json(args.infile))
    verdict = psd_check(matrix)
    body = jsonio.verdict_to_json(verdict)
    body["determinant"] = jsonio.rat(det_exact(matrix))
    _emit(jsonio.envelope("psd-verdict", body))
    return 0


def cmd_limit(args: argparse.Namespace) -> int:
    if args.kind == "clt":
        spec = LimitSpec.clt(args.alpha, args.beta, args.gamma)
    elif args.kind == "poisson":
        spec = LimitSpec.poisson(args.lam, args.alpha, args.beta)
    else:
        if not args.tau:
            raise InvalidInputError("compound kind needs --tau")
        measure = jsonio.measure_from_json(_load_json(args.tau))
        spec = LimitSpec.compound(args.lam, measure)
    result = limit_pipeline(spec, args.order, args.matrix_degree)
    body = {
        "kind": args.kind,
        "moments": jsonio.grid_to_json(result["moments"]),
        "determinant": jsonio.rat(result["determinant"]),
        "verdict": jsonio.verdict_to_json(result["verdict"]),
    }
    _emit(jsonio.envelope("limit", body))
    return 0


def _paper_fixtures() -> list[tuple[str, bool, str]]:
    from .distributions import AtomicPlanarMeasure

    checks: list[tuple[str, bool, str]] = []

    chi = "".join(
        "L" if j in {1, 3, 5, 7, 8, 11} else "R" for j in range(1, 13)
    )
    omega = tuple(1 if j in {1, 2, 3, 4, 6, 8, 11, 12} else 2 for j in range(1, 13))
    got = pi_chi_omega(chi, omega)
    want = [(1, 3), (2, 4, 6), (5, 7), (8, 11, 12), (9, 10)]
    checks.append(
        (
            "run partition of the twelve-letter example",
            sorted(got) == sorted(want),
            f"{sorted(got)}",
        )
    )

    mu = AtomicPlanarMeasure.from_atoms([(0, 1, Fraction(1, 2)), (1, 0, Fraction(1, 2))])
    grid = grid_from_measure(mu, 2)
    summed = grid_convolve(grid, grid)
    matrix = moment_matrix(summed, 1)
    x1_expected = [
        ["1", "1", "1", "1/2"],
        ["1", "3/2", "1/2", "5/8"],
        ["1", "1/2", "3/2", "5/8"],
        ["1/2", "5/8", "5/8", "3/4"],
    ]
    x1_got = [[str(x) for x in row] for row in matrix.entries]
    checks.append(("moment matrix of the two-point sum", x1_got == x1_expected, f"{x1_got}"))
    d1 = det_exact(matrix)
    checks.append(("its determinant is -1/32", d1 == Fraction(-1, 32), str(d1)))

    tau = AtomicPlanarMeasure.from_atoms([(1, 1, 15), (-1, 1, 15), (1, -1, 15)])
    pipeline = limit_pipeline(LimitSpec.compound(1, tau), 3, 1)
    moments = pipeline["moments"]
    expected_cells = {
        (0, 0): Fraction(1),
        (1, 0): Fraction(15),
        (0, 1): Fraction(15),
        (2, 0): Fraction(270),
        (1, 1): Fraction(210),
        (0, 2): Fraction(270),
        (2, 1): Fraction(7455, 2),
        (1, 2): Fraction(7455, 2),
        (2, 2): Fraction(131715, 2),
    }
    cells_ok = all(moments.moment(m, n) == v for (m, n), v in expected_cells.items())
    checks.append(
        (
            "compound Poisson moments through order (2,2)",
            cells_ok,
            str({k: str(moments.moment(*k)) for k in expected_cells}),
        )
    )
    d2 = pipeline["determinant"]
    checks.append(("its determinant is -857250", d2 == -857250, str(d2)))
    checks.append(
        ("neither matrix is positive semidefinite",
         not psd_check(matrix).is_psd and not pipeline["verdict"].is_psd,
         "")
    )
    return checks


def cmd_reproduce_paper(_args: argparse.Namespace) -> int:
    checks = _paper_fixtures()
    failed = 0
    for name, ok, detail in checks:
        sys.stdout.write(f"{'PASS' if ok else 'FAIL'}  {name}\n")
        if not ok:
            sys.stdout.write(f"      got: {detail}\n")
            failed += 1
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bimono",
        description="exact bi-monotonic independence toolkit",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("partitions", help="enumerations attached to a chi word")
    p.add_argument("--chi", required=True, help="word over {L, R}, e.g. LRL")
    p.add_argument("--bnc", action="store_true", help="list bi-non-crossing partitions")
    p.add_argument("--bm", action="store_true", help="list bi-monotonic ordered partitions")
    p.add_argument("--intervals", action="store_true", help="list chi-intervals")
    p.add_argument("--omega", help="comma-separated family labels for the run partition")
    p.add_argument("--bound", type=int, default=MAX_BOUND, help="enumeration bound")
    p.set_defaults(func=cmd_partitions)

    p = sub.add_parser("moments-to-cumulants", help="cumulant table of a distribution")
    p.add_argument("--in", dest="infile", help="word or grid distribution JSON")
    p.add_argument("--max-len", type=int, help="table length cap")
    p.set_defaults(func=cmd_moments_to_cumulants)

    p = sub.add_parser("cumulants-to-moments", help="moments from a cumulant table")
    p.add_argument("--in", dest="infile", help="cumulant table JSON")
    p.add_argument("--chi", help="single pattern to evaluate")
    p.set_defaults(func=cmd_cumulants_to_moments)

    p = sub.add_parser("convolve", help="bi-monotonic convolution of two inputs")
    p.add_argument("--in", dest="infile", nargs=2, help="two distribution files")
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_convolve)

    p = sub.add_parser("transform", help="two-variable Cauchy transform of a grid")
    p.add_argument("--in", dest="infile", help="grid distribution JSON")
    p.add_argument("--table", action="store_true", help="aligned text instead of JSON")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("type2", help="product-space moment of an operator word")
    p.add_argument("--spaces", required=True, help="spaces JSON")
    p.add_argument("--word", required=True, help="word JSON")
    p.set_defaults(func=cmd_type2)

    p = sub.add_parser("psd-check", help="exact positivity verdict")
    p.add_argument("--in", dest="infile", help="matrix JSON")
    p.add_argument("--grid", help="grid JSON (build the moment matrix)")
    p.add_argument("--degree", type=int, default=1, help="moment matrix degree")
    p.set_defaults(func=cmd_psd_check)

    p = sub.add_parser("limit", help="limit-theorem pipeline")
    p.add_argument("--kind", required=True, choices=("clt", "poisson", "compound"))
    p.add_argument("--alpha", default="1")
    p.add_argument("--beta", default="1")
    p.add_argument("--gamma", default="0")
    p.add_argument("--lam", default="1")
    p.add_argument("--tau", help="atomic measure JSON (compound kind)")
    p.add_argument("--order", type=int, default=6)
    p.add_argument("--matrix-degree", type=int, default=1)
    p.set_defaults(func=cmd_limit)

    p = sub.add_parser("reproduce-paper", help="check the worked fixtures")
    p.set_defaults(func=cmd_reproduce_paper)

    return parser


def _validate_limits(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    order = getattr(args, "order", None)
    if order is not None and not (1 <= order <= MAX_ORDER):
        parser.error(f"--order must lie in 1..{MAX_ORDER}")
    bound = getattr(args, "bound", None)
    if bound is not None and not (1 <= bound <= MAX_BOUND):
        parser.error(f"--bound must lie in 1..{MAX_BOUND}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _validate_limits(parser, args)
    try:
        return args.func(args)
    except BimonoError as exc:
        _emit(
            jsonio.envelope(
                "error",
                {"error": {"type": type(exc).__name__, "message": str(exc)}},
            )
        )
        return 1


if __name__ == "__main__":
    sys.exit(main())
