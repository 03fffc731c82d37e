"""
contclust - continuous clustering and facility location by round-or-cut.

This file handles the command line: the solve, exact, gen and bench subcommands and their
exit codes.

.............................................................................
contclust was developed as a desk-scale testbed for ball-variable LP relaxations
     Original release October 2026

Licensed under the MIT license.

"""

import argparse
import csv
import io as _stdio
import logging
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from ._configs import (KINDS, KIND_UFL, NORMS, ENUMERATION_BUDGET, EXIT_OK, EXIT_INPUT_ERROR, EXIT_INFEASIBLE,
                       EXIT_LIMIT, SolverConfig)
from .contclust_exceptions import ContclustException, InstanceFormatError, TooLarge, CutLimitExceeded
from .core_metric import random_points, clustered_points
from .hardness_gen import embed, planted_partition_graph
from .io import (InstanceFile, read_instance, read_graph, write_graph, write_solution, solution_to_dict, dumps,
                 hardness_instance_file, problem_for)
from .oracle import exact_solve, certify, factor_for
from .results import Infeasible
from .round_or_cut import solve_instance

logger = logging.getLogger('contclust')

BENCH_COLUMNS = ['instance', 'kind', 'n', 'k/λ', 'exact_opt', 'alg_cost', 'ratio', 'factor_bound', 'cuts',
                 'iterations', 'wall_ms', 'status']

NA = 'NA'


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with the input-error code (argparse would use 2, which means infeasible here)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT_ERROR, f'[ERROR]: {message}\n')


def _emit(text, output=None):
    if output is None:
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding='utf-8')


####################################################################################################
#
#
def cmd_solve(args):
    try:
        instance_file = read_instance(args.instance)
    except InstanceFormatError as e:
        logger.error(str(e))
        return EXIT_INPUT_ERROR

    spec = instance_file.problem
    if args.kind is not None and args.kind != spec.kind:
        logger.error(f"{args.instance}: --kind {args.kind} does not match the instance's problem kind '{spec.kind}'")
        return EXIT_INPUT_ERROR

    inst = instance_file.instance
    try:
        result, trace = solve_instance(inst, spec, instance_file.config)
    except CutLimitExceeded as e:
        logger.error(str(e))
        if args.trace and e.trace is not None:
            Path(args.trace).write_text(e.trace.to_csv())
        return EXIT_LIMIT
    except ContclustException as e:
        logger.error(f'{e.__class__.__name__}: {e}')
        return EXIT_LIMIT

    if args.trace:
        Path(args.trace).write_text(trace.to_csv())
    if args.dump_lp and trace.pool is not None:
        Path(args.dump_lp).write_text(trace.pool.to_lp_text())

    if isinstance(result, Infeasible):
        logger.error(f'{args.instance}: certified infeasible ({result.reason})')
        return EXIT_INFEASIBLE

    slack = max(0.0, result.certificate.bound - factor_for(spec) * result.opt_g)
    logger.info('certificate:\n%s', certify(inst, spec, result, result.opt_g, slack=slack))

    if args.output:
        write_solution(result, args.output)
    else:
        _emit(dumps(solution_to_dict(result)))
    return EXIT_OK


def cmd_exact(args):
    try:
        instance_file = read_instance(args.instance)
    except InstanceFormatError as e:
        logger.error(str(e))
        return EXIT_INPUT_ERROR

    try:
        result = exact_solve(instance_file.instance, instance_file.problem, budget=args.budget)
    except TooLarge as e:
        logger.error(str(e))
        return EXIT_LIMIT

    if isinstance(result, Infeasible):
        logger.error(f'{args.instance}: {result.reason}')
        return EXIT_INFEASIBLE

    _emit(f"value: {result.value!r}\ncenters: {' '.join(str(c) for c in result.centers)}\n"
          f"enumerated: {result.enumerated}\n")
    return EXIT_OK


####################################################################################################
#
#
def _generated_instance(args):
    if args.n < 1:
        raise ContclustException('--n must be a positive integer')
    if args.dim < 1:
        raise ContclustException('--dim must be a positive integer')
    if args.extra < 0:
        raise ContclustException('--extra must be nonnegative')

    if args.subkind == 'random':
        points = random_points(args.n, dim=args.dim, extra=args.extra, rng=args.seed)
        norm = args.norm
    else:
        points = clustered_points(args.n, dim=args.dim, extra=args.extra, centers=args.centers, spread=args.spread,
                                  rng=args.seed)
        norm = '2'

    problem = problem_for(args.kind, args.n, k=args.k, lam=args.lam, p=args.p, m=args.m, radius=args.radius)
    problem.validate(args.n)
    return InstanceFile.from_points(points, norm, range(args.n), problem, SolverConfig(seed=args.seed))


def cmd_gen(args):
    try:
        if args.subkind == 'hardness':
            if args.graph is None and args.planted is None:
                raise ContclustException('hardness instances need --graph or --planted')
            if args.graph is not None:
                G = read_graph(args.graph)
            else:
                G, _ = planted_partition_graph(args.planted, edge_prob=args.edge_prob, seed=args.seed)
                if args.graph_output:
                    write_graph(G, args.graph_output)
            instance_file = hardness_instance_file(embed(G, args.eps))
        else:
            instance_file = _generated_instance(args)
    except ContclustException as e:
        logger.error(str(e))
        return EXIT_INPUT_ERROR

    _emit(dumps(instance_file.to_dict()), args.output)
    return EXIT_OK


####################################################################################################
#
#
def _fmt(x):
    if x is None:
        return NA
    if isinstance(x, float):
        return repr(x)
    return str(x)


def bench_row(path, budget=ENUMERATION_BUDGET):
    """
    Solves one instance file and, when it is small enough, its exact optimum. Never raises;
    failures end up in the status column.

    """
    row = dict.fromkeys(BENCH_COLUMNS, NA)
    row['instance'] = Path(path).name

    try:
        instance_file = read_instance(path)
    except InstanceFormatError as e:
        logger.warning(str(e))
        row['status'] = 'parse_error'
        return row

    inst, spec = instance_file.instance, instance_file.problem
    row['kind'] = spec.kind
    row['n'] = str(inst.n)
    row['k/λ'] = _fmt(spec.lam if spec.kind == KIND_UFL else spec.k)
    row['factor_bound'] = _fmt(float(factor_for(spec)))

    start = time.perf_counter()
    try:
        result, _ = solve_instance(inst, spec, instance_file.config)
    except CutLimitExceeded:
        row['status'] = 'cut_limit'
        return row
    except ContclustException as e:
        logger.warning(f'{path}: {e.__class__.__name__}: {e}')
        row['status'] = 'error'
        return row
    row['wall_ms'] = _fmt(round(1000.0 * (time.perf_counter() - start), 3))

    try:
        exact = exact_solve(inst, spec, budget=budget)
    except TooLarge:
        exact = None

    if isinstance(result, Infeasible):
        row['status'] = 'infeasible' if exact is None or isinstance(exact, Infeasible) else 'missed_feasible'
        return row

    row['alg_cost'] = _fmt(float(result.cost))
    row['cuts'] = str(result.certificate.cuts_added)
    row['iterations'] = str(result.certificate.iterations)
    row['status'] = 'ok' if result.certificate.fairness_ok else 'unfair'

    if exact is not None and not isinstance(exact, Infeasible):
        row['exact_opt'] = _fmt(float(exact.value))
        if exact.value > 0:
            row['ratio'] = _fmt(float(result.cost) / exact.value)
        else:
            row['ratio'] = _fmt(1.0 if result.cost <= 0 else math.inf)

        slack = factor_for(spec) * exact.value / inst.n ** 2 + 1e-4
        report = certify(inst, spec, result, exact.value, slack=slack)
        if any(c.name == 'factor' for c in report.failures):
            row['status'] = 'bound_exceeded'

    return row


def bench_rows(paths, jobs=1, budget=ENUMERATION_BUDGET):
    """Rows in the order of ``paths``; with jobs > 1 instances run in worker processes."""
    if jobs <= 1 or len(paths) <= 1:
        return [bench_row(p, budget) for p in paths]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(bench_row, paths, [budget] * len(paths)))


def cmd_bench(args):
    directory = Path(args.directory)
    if not directory.is_dir():
        logger.error(f'{directory}: not a directory')
        return EXIT_INPUT_ERROR
    if args.jobs < 1:
        logger.error('--jobs must be a positive integer')
        return EXIT_INPUT_ERROR

    paths = sorted(str(p) for p in directory.glob('*.json'))
    rows = bench_rows(paths, jobs=args.jobs, budget=args.budget)

    buffer = _stdio.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=BENCH_COLUMNS, lineterminator='\n')
    writer.writeheader()
    writer.writerows(rows)
    _emit(buffer.getvalue(), args.output)

    for row in rows:
        logger.info('%s: %s', row['instance'], row['status'])
    return EXIT_OK


####################################################################################################
#
#
def build_parser():
    parser = _Parser(prog='contclust', description='Continuous clustering and facility location by round-or-cut.')
    parser.add_argument('--verbose', action='store_true', help='report progress ([INFO] messages)')
    parser.add_argument('--debug', action='store_true', help='report every admitted cut ([DEBUG] messages)')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('solve', help='solve an instance file')
    p.add_argument('instance')
    p.add_argument('--kind', choices=KINDS, help='fail unless the instance has this problem kind')
    p.add_argument('-o', '--output', help='solution file (default: standard output)')
    p.add_argument('--trace', help='write the per-guess search trace as CSV')
    p.add_argument('--dump-lp', help='write the accepted constraint pool in LP text form')
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser('exact', help='exact optimum by enumeration')
    p.add_argument('instance')
    p.add_argument('--budget', type=int, default=ENUMERATION_BUDGET, help='largest number of center sets to try')
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser('gen', help='generate an instance file')
    p.add_argument('subkind', choices=['random', 'euclidean', 'hardness'])
    p.add_argument('--n', type=int, default=8)
    p.add_argument('--dim', type=int, default=2)
    p.add_argument('--norm', choices=list(NORMS), default='2')
    p.add_argument('--extra', type=int, default=0, help='candidate points beyond the clients')
    p.add_argument('--centers', type=int, default=3, help='cluster centers (euclidean)')
    p.add_argument('--spread', type=float, default=0.05, help='cluster standard deviation (euclidean)')
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--kind', choices=KINDS, default=KIND_UFL)
    p.add_argument('--k', type=int)
    p.add_argument('--p', type=int)
    p.add_argument('--m', type=int)
    p.add_argument('--lam', type=float)
    p.add_argument('--radius', type=float, help='fairness radius of every client (default: inf)')
    p.add_argument('--graph', help='edge list (hardness)')
    p.add_argument('--planted', type=int, help='vertices of a planted-partition graph (hardness)')
    p.add_argument('--edge-prob', type=float, default=0.5)
    p.add_argument('--graph-output', help='write the planted graph as an edge list')
    p.add_argument('--eps', type=float, default=0.1)
    p.add_argument('-o', '--output')
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser('bench', help='solve every *.json instance of a directory and compare with the exact optimum')
    p.add_argument('directory')
    p.add_argument('--jobs', type=int, default=1)
    p.add_argument('--budget', type=int, default=ENUMERATION_BUDGET)
    p.add_argument('-o', '--output', help='CSV file (default: standard output)')
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)

    level = logging.DEBUG if args.debug else logging.INFO if args.verbose else logging.WARNING
    logging.basicConfig(format='[%(levelname)s]: %(message)s')
    logger.setLevel(level)

    return args.func(args)


if __name__ == '__main__':
    sys.exit(main())
