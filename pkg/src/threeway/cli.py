"""Command-line experiment driver.

``--dataset`` takes one edge list (a selfjoin: R, S and T are role-tagged
copies of it) or three edge lists read as R, S and T.

    threeway run --algo 2-3J --dataset graph.txt
    threeway run --algo 1-3J --k1 2 --k2 3 --dataset r.txt s.txt t.txt
    threeway curve --dataset graph.txt --ks 1,4,9,16 --output curve.csv
    threeway crossover --dataset graph.txt

Exit codes: 0 success, 1 usage error, 2 unreadable or malformed input,
3 skew or size abort.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import asdict

from . import aggregate, costmodel, joins
from .engine import DEFAULT_GROUP_CAP, pipeline_cost
from .errors import ConfigurationError, EdgeListParseError, IntegrityError, SkewError
from .relation import WEIGHT_TYPES, read_edge_list

log = logging.getLogger("threeway")

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_ABORT = 0, 1, 2, 3

ALGORITHMS = ("2way", "2-3J", "1-3J", "2-3JA", "1-3JA", "triangles", "crossover")
GRID_ALGORITHMS = ("1-3J", "1-3JA")
DEFAULT_MAX_RECORDS = 10**7

CURVE_COLUMNS = ("k", "k1", "k2", "analytic_1_3J", "measured_1_3J", "analytic_2_3J", "measured_2_3J")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text):
    try:
        values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _k_range(text):
    # start:stop[:step], stop exclusive
    try:
        values = list(range(*[int(x) for x in text.split(":")]))
    except (ValueError, TypeError):
        raise argparse.ArgumentTypeError(f"expected start:stop[:step], got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return values


def build_parser():
    parser = _Parser(prog="threeway", description="Instrumented three-way joins on an in-process MapReduce engine.")
    parser.add_argument("-v", "--verbose", action="store_true")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dataset", required=True, nargs="+", metavar="PATH",
                        help="one edge list (selfjoin) or three (R S T)")
    common.add_argument("--seed", type=int, default=0, help="hash seed for the reducer grid")
    common.add_argument("--default-weight", type=int, default=1)
    common.add_argument("--weights", choices=sorted(WEIGHT_TYPES), default="int")
    common.add_argument("--dedupe", action="store_true", help="drop repeated (src, dst) edges")
    loops = common.add_mutually_exclusive_group()
    loops.add_argument("--drop-self-loops", dest="self_loops", action="store_const", const="drop")
    loops.add_argument("--keep-self-loops", dest="self_loops", action="store_const", const="keep")
    common.add_argument("--reducers", type=int, default=joins.DEFAULT_REDUCERS, help="reducers for cascade rounds")
    common.add_argument("--workers", type=int, default=1, help="engine threads")
    common.add_argument("--group-cap", type=int, default=DEFAULT_GROUP_CAP)
    common.add_argument("--max-records", type=int, default=DEFAULT_MAX_RECORDS,
                        help="refuse runs whose materialised join would exceed this many records")
    common.add_argument("--output", help="report path (JSON for run/crossover, CSV for curve)")
    common.add_argument("--cores-per-machine", type=int, default=8)

    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", parents=[common], help="run one algorithm and report its counters")
    run.add_argument("--algo", required=True, choices=ALGORITHMS)
    run.add_argument("--k", type=int, help="total reducers, split by the optimal grid")
    run.add_argument("--k1", type=int)
    run.add_argument("--k2", type=int)

    curve = sub.add_parser("curve", parents=[common], help="CSV of 1,3J and 2,3J cost against reducer count")
    sweep = curve.add_mutually_exclusive_group(required=True)
    sweep.add_argument("--ks", type=_int_list, help="comma-separated reducer counts")
    sweep.add_argument("--k-range", type=_k_range, dest="ks", help="start:stop[:step]")

    sub.add_parser("crossover", parents=[common], help="reducer count where 1,3J overtakes 2,3J")
    return parser


def load_relations(args, drop_loops_default=False):
    """Read ``--dataset`` into role-tagged ``(R, S, T)``."""
    paths = args.dataset
    if len(paths) not in (1, 3):
        raise UsageError(f"--dataset takes 1 or 3 paths, got {len(paths)}")
    drop = drop_loops_default if args.self_loops is None else args.self_loops == "drop"
    rels = []
    for path in paths:
        rel = read_edge_list(path, default_weight=args.default_weight, weight_type=args.weights)
        if args.dedupe:
            rel = rel.deduplicated()
        if drop:
            rel = rel.without_self_loops()
        rels.append(rel)
    if len(rels) == 1:
        rels *= 3
    return tuple(rel.renamed(name) for rel, name in zip(rels, "RST"))


def resolve_grid(args, R, T):
    explicit = args.k1 is not None or args.k2 is not None
    if args.algo not in GRID_ALGORITHMS and args.algo != "triangles":
        if explicit or args.k is not None:
            raise UsageError(f"--algo {args.algo} takes no grid; --k/--k1/--k2 apply to 1-3J and 1-3JA")
        return None
    if explicit and args.k is not None:
        raise UsageError("give either --k or --k1/--k2, not both")
    if explicit:
        if args.k1 is None or args.k2 is None:
            raise UsageError("--k1 and --k2 must be given together")
        return joins.ReducerGrid(args.k1, args.k2, args.seed)
    if args.k is not None:
        return joins.optimal_grid(max(len(R), 1), max(len(T), 1), args.k, args.seed)
    if args.algo == "triangles":
        return None
    raise UsageError(f"--algo {args.algo} needs a grid: --k or --k1/--k2")


def _check_size(label, size, cap):
    if size > cap:
        raise SkewError(f"{label} would materialise {size} records, above --max-records {cap}", size=size, cap=cap)


def _engine_opts(args):
    return {"workers": args.workers, "group_cap": args.group_cap}


def _ratio(num, den):
    return num / den if den else None


def _base(args, algo, R, S, T, report):
    return {
        "algorithm": algo,
        "dataset": list(args.dataset),
        "r": len(R),
        "s": len(S),
        "t": len(T),
        "per_round": [asdict(st) for st in report.per_round],
        "paper_cost": report.paper_cost,
        "full_cost": report.full_cost,
        "counted_rounds": report.counted_rounds,
    }


def execute_run(args, R, S, T):
    """Run ``args.algo`` and return a JSON-ready report dict."""
    algo = args.algo
    if algo == "crossover":
        return execute_crossover(args, R, S, T)
    grid = resolve_grid(args, R, T)
    opts = _engine_opts(args)
    cap = args.max_records
    j_size = joins.join_size_two_way(R, S)
    _check_size("R join S", j_size, cap)

    if algo == "2way":
        out, stats = joins.two_way_join(R, S, args.reducers, **opts)
        result = _base(args, algo, R, S, T, pipeline_cost([stats]))
        result["output_size"] = len(out)
        return result

    if algo == "triangles":
        if len(args.dataset) != 1:
            raise UsageError("triangles takes a single dataset")
        if any(t.v != 1 for t in R):
            raise UsageError("triangles needs binary (all-1) weights")
        via = "1-3JA" if grid is not None else "2-3JA"
        if via == "1-3JA":
            _check_size("R join S join T", joins.join_size_three_way(R, S, T), cap)
        diag, report = aggregate.diagonal_sum(R, via, grid, **opts)
        if diag % 3:
            raise IntegrityError(f"diagonal sum {diag} is not divisible by 3; the graph has self-loops")
        result = _base(args, algo, R, S, T, report)
        result.update(via=via, diagonal_sum=diag, triangles=diag // 3)
        return result

    r3_size = joins.join_size_three_way(R, S, T)
    if algo != "2-3JA":
        _check_size("R join S join T", r3_size, cap)

    if algo == "2-3J":
        out, report = joins.cascade_three_way(R, S, T, args.reducers, **opts)
        result = _base(args, algo, R, S, T, report)
        result.update(output_size=len(out), j=report.per_round[0].output_records)
    elif algo == "1-3J":
        out, report = joins.one_round_three_way(R, S, T, grid, **opts)
        result = _base(args, algo, R, S, T, report)
        result.update(output_size=len(out), k1=grid.k1, k2=grid.k2, k=grid.k)
    elif algo == "2-3JA":
        cells, report = aggregate.matmul_2_3JA(R, S, T, args.reducers, **opts)
        r1, r2, joined = (report.per_round[i].output_records for i in range(3))
        result = _base(args, algo, R, S, T, report)
        result.update(
            output_size=len(cells),
            r_prime=r1,
            r_double_prime=r2,
            r_triple_prime=r3_size,
            second_join_output=joined,
            shrink_ratio=_ratio(r2, r1),
            final_output_ratio=_ratio(joined, r3_size),
        )
    else:  # 1-3JA
        cells, report = aggregate.matmul_1_3JA(R, S, T, grid, args.reducers, **opts)
        result = _base(args, algo, R, S, T, report)
        result.update(
            output_size=len(cells),
            r_triple_prime=report.per_round[0].output_records,
            k1=grid.k1, k2=grid.k2, k=grid.k,
        )
    return result


def execute_crossover(args, R, S, T):
    if not (len(R) and len(S) and len(T)):
        raise UsageError("crossover needs non-empty relations")
    _check_size("R join S", joins.join_size_two_way(R, S), args.max_records)
    _, stats = joins.two_way_join(R, S, args.reducers, **_engine_opts(args))
    r, s, t, j = len(R), len(S), len(T), stats.output_records
    k_real, (k1, k2) = costmodel.crossover_reducers(r, s, t, j)
    return {
        "algorithm": "crossover",
        "dataset": list(args.dataset),
        "r": r,
        "s": s,
        "t": t,
        "j": j,
        "j_over_r": j / r,
        "k_real": k_real,
        "k1": k1,
        "k2": k2,
        "k": k1 * k2,
        "cores_per_machine": args.cores_per_machine,
        "machines": costmodel.machines_needed(k1 * k2, args.cores_per_machine),
    }


def curve_rows(R, S, T, ks, seed=0, **opts):
    """One row per reducer count with analytic and measured 1,3J and 2,3J costs.

    The cascade is re-run with ``k`` reducers per row, so its constancy in
    ``k`` is measured, not assumed.
    """
    r, s, t = len(R), len(S), len(T)
    analytic_2 = costmodel.cost_2_3J(r, s, t, joins.join_size_two_way(R, S))
    rows = []
    for k in ks:
        grid = joins.optimal_grid(max(r, 1), max(t, 1), k, seed)
        _, rep1 = joins.one_round_three_way(R, S, T, grid, **opts)
        _, rep2 = joins.cascade_three_way(R, S, T, k, **opts)
        rows.append({
            "k": k,
            "k1": grid.k1,
            "k2": grid.k2,
            "analytic_1_3J": costmodel.cost_1_3J(r, s, t, grid.k1, grid.k2),
            "measured_1_3J": rep1.paper_cost,
            "analytic_2_3J": analytic_2,
            "measured_2_3J": rep2.paper_cost,
        })
    return rows


def write_curve_csv(rows, fh):
    writer = csv.DictWriter(fh, fieldnames=CURVE_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)


def read_curve_csv(fh):
    return [{k: int(v) for k, v in row.items()} for row in csv.DictReader(fh)]


def _summary(result, out):
    if "triangles" in result:
        print(f"triangles: {result['triangles']}", file=out)
    for key, value in result.items():
        if key not in ("per_round", "triangles"):
            print(f"{key}: {value}", file=out)
    for st in result.get("per_round", []):
        print(f"  round {st['name']}: read={st['tuples_read']} shuffled={st['tuples_shuffled']} "
              f"output={st['output_records']}", file=out)


def _write_json(path, payload):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def main(argv=None, stdout=None):
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "curve":
            if any(k < 1 for k in args.ks):
                raise UsageError("reducer counts must be >= 1")
            R, S, T = load_relations(args)
            rows = curve_rows(R, S, T, args.ks, args.seed, **_engine_opts(args))
            if args.output:
                with open(args.output, "w", encoding="utf-8", newline="") as fh:
                    write_curve_csv(rows, fh)
            else:
                write_curve_csv(rows, stdout)
            return EXIT_OK
        if args.command == "crossover":
            R, S, T = load_relations(args)
            result = execute_crossover(args, R, S, T)
        else:
            R, S, T = load_relations(args, drop_loops_default=args.algo == "triangles")
            result = execute_run(args, R, S, T)
        _summary(result, stdout)
        if args.output:
            _write_json(args.output, result)
    except (UsageError, ConfigurationError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (EdgeListParseError, IntegrityError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SkewError as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        return EXIT_ABORT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
