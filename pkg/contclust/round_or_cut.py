"""
contclust - continuous clustering and facility location by round-or-cut.

This file handles the outer driver: the LP-solve / round-or-cut loop at a fixed optimum
guess, the search over guesses, and solve_instance which wraps both with validation and
rescaling.

.............................................................................
contclust was developed as a desk-scale testbed for ball-variable LP relaxations
     Original release October 2026

Licensed under the MIT license.

Be kind to each other.

"""

import logging
from dataclasses import dataclass, replace

import numpy as np

from ._configs import SolverConfig, KIND_UFL, KIND_FAIR, KIND_KP, KIND_KCWO
from .contclust_exceptions import ContclustException, AllCoincident, CutLimitExceeded, NumericalFailure
from .core_metric import build_grid, validate_metric, rescale, objective_value
from .lp_engine import build_base, solve_lp, FAMILY_FAIR, FAMILY_KCWO
from .results import Accept, Cut, Infeasible, ProbeRecord, SearchTrace
from .solver_fair import attempt_round_fair
from .solver_kcwo import attempt_round_kcwo
from .solver_kp import attempt_round_kp
from .solver_ufl import attempt_round_ufl

logger = logging.getLogger(__name__)

ORACLES = {KIND_UFL: attempt_round_ufl,
           KIND_FAIR: attempt_round_fair,
           KIND_KP: attempt_round_kp,
           KIND_KCWO: attempt_round_kcwo}

# cut families whose right-hand side does not depend on opt_g
RETAINED_FAMILIES = (FAMILY_FAIR, FAMILY_KCWO)


@dataclass
class Probe:
    """Outcome of iterate at one guess: Accept or Infeasible, its trace row and the final pool."""
    outcome: object
    record: ProbeRecord
    pool: object


####################################################################################################
#
#
def iterate(inst, spec, grid, opt_g, oracle=None, cuts=(), config=None):
    """
    Round-or-cut at a fixed optimum guess.

    Solves the pool, hands the LP point to the rounding oracle, and either stops on Accept or
    adds the returned cut and solves again. Every non-final iteration adds one new cut.

    Parameters
    ----------
    inst : MetricInstance

    spec : ProblemSpec

    grid : RadiusGrid

    opt_g : float

    oracle : callable or None
        ``oracle(inst, spec, sol, opt_g)`` returning Accept or Cut. Defaults to the rounding
        oracle of the problem kind.

    cuts : iterable of SepCut
        Cuts carried over from earlier guesses.

    config : SolverConfig or None

    Returns
    -------
    Probe
        ``outcome`` is Accept or Infeasible.

    Raises
    ------
    CutLimitExceeded
        After the configured number of LP solves.

    """
    config = (config or SolverConfig()).resolved(inst.n)
    oracle = oracle or ORACLES[spec.kind]
    objective = 'feasibility' if spec.kind == KIND_KCWO else 'cost'

    pool = build_base(inst, spec, grid, opt_g)
    for cut in cuts:
        pool.add_cut(cut)

    record = ProbeRecord(opt_g=float(opt_g))
    cap = config.cap_for(inst.n, grid.max_size)

    while record.iterations < cap:
        record.iterations += 1
        sol = solve_lp(pool, objective)

        if isinstance(sol, Infeasible):
            record.status = 'infeasible'
            logger.info('opt_g=%.6g: infeasible after %d iterations, %d cuts', opt_g, record.iterations, record.cuts)
            return Probe(sol, record, pool)

        outcome = oracle(inst, spec, sol, opt_g)

        if isinstance(outcome, Accept):
            solution = outcome.solution.with_counts(record.cuts, record.iterations)
            record.status = 'accept'
            record.cost = solution.cost
            logger.info('opt_g=%.6g: accepted cost %.6g after %d iterations, %d cuts', opt_g, solution.cost,
                        record.iterations, record.cuts)
            return Probe(Accept(solution), record, pool)

        if not isinstance(outcome, Cut):
            raise ContclustException(f'rounding oracle returned {type(outcome).__name__}, expected Accept or Cut')

        if not pool.add_cut(outcome.cut):
            raise NumericalFailure(f'{outcome.cut.family} cut regenerated with violation {outcome.violation:.3g}')
        record.cuts += 1
        logger.debug('opt_g=%.6g: %s cut over %d balls, violation %.3g', opt_g, outcome.cut.family,
                     len(outcome.cut.balls), outcome.violation)

    record.status = 'cut_limit'
    raise CutLimitExceeded(f'no decision at opt_g={opt_g:.6g} after {cap} LP solves ({record.cuts} cuts)',
                           record=record)


####################################################################################################
#
#
def upper_bound(inst, spec, grid):
    """A guess no smaller than the optimum (when the instance is feasible)."""
    n = inst.n
    diam = inst.client_diameter
    if spec.kind == KIND_UFL:
        return spec.lam + n * diam
    if spec.kind == KIND_KP:
        return n * (2.0 * diam) ** spec.p
    return float(np.sum(grid.r_max))


def default_grid_builder(config):
    def builder(inst, spec, extra=()):
        if config.mesh and spec.kind != KIND_KCWO:
            return build_grid(inst, spec, config.eps_grid, config.eps_abs, extra=extra)
        return build_grid(inst, spec, extra=extra)
    return builder


def kcwo_guesses(inst):
    """Sorted distinct {d(v,x)/2, d(v,x)} over clients v and candidate points x."""
    block = inst.dist[np.ix_(np.asarray(inst.clients, dtype=int), np.asarray(inst.candidate_points, dtype=int))]
    return [float(g) for g in np.unique(np.concatenate([block.ravel(), block.ravel() / 2.0]))]


def _run_guess(inst, spec, grid, opt_g, carried, config, trace):
    """iterate at one guess plus its trace row; a cut_limit row is recorded before the error propagates."""
    try:
        result = iterate(inst, spec, grid, opt_g, cuts=carried, config=config)
    except CutLimitExceeded as e:
        if e.record is not None:
            trace.probes.append(e.record)
        e.trace = trace
        raise
    trace.probes.append(result.record)
    return result


def search(inst, spec, grid_builder=None, config=None):
    """
    Searches the optimum guess.

    Sum objectives (ufl, fair_kmedian, kp) bisect on [0, hi], probing hi first, until
    hi <= (1 + 1/n^2) lo + eps_abs; the cheapest accepted solution is returned. kcwo walks
    the sorted candidate radii and returns the first accepted one.

    Parameters
    ----------
    inst : MetricInstance

    spec : ProblemSpec

    grid_builder : callable or None
        ``grid_builder(inst, spec, extra)`` returning a RadiusGrid.

    config : SolverConfig or None

    Returns
    -------
    tuple
        (Solution or Infeasible, SearchTrace)

    """
    config = (config or SolverConfig()).resolved(inst.n)
    grid_builder = grid_builder or default_grid_builder(config)
    trace = SearchTrace(kind=spec.kind)

    if spec.kind == KIND_KCWO:
        return _search_kcwo(inst, spec, grid_builder, config, trace)

    grid = grid_builder(inst, spec)
    n = inst.n
    carried = []
    best = None

    def probe(opt_g):
        nonlocal carried, best
        result = _run_guess(inst, spec, grid, opt_g, carried, config, trace)
        if config.retain_cuts:
            carried = result.pool.cut_list(RETAINED_FAMILIES)
        if isinstance(result.outcome, Accept):
            sol = result.outcome.solution
            if best is None or sol.cost < best.cost:
                best = sol
                trace.pool = result.pool
            return sol
        return None

    hi = upper_bound(inst, spec, grid)
    first = probe(hi)
    if first is None:
        logger.info('no solution at the upper bound %.6g; the instance is infeasible', hi)
        return Infeasible(reason=f'infeasible at the upper bound opt_g={hi:.6g}'), trace

    hi = min(hi, first.cost)
    lo = 0.0
    logger.info('bisecting opt_g on [%.6g, %.6g]', lo, hi)
    while hi > (1.0 + 1.0 / n ** 2) * lo + config.eps_abs:
        mid = 0.5 * (lo + hi)
        accepted = probe(mid)
        if accepted is None:
            lo = mid
        else:
            hi = max(lo, min(mid, accepted.cost))

    trace.chosen_opt_g = best.opt_g
    trace.solution = best
    return best, trace


def _search_kcwo(inst, spec, grid_builder, config, trace):
    guesses = kcwo_guesses(inst)
    grid = grid_builder(inst, spec, guesses)
    carried = []
    for g in guesses:
        result = _run_guess(inst, spec, grid, g, carried, config, trace)
        if config.retain_cuts:
            carried = result.pool.cut_list(RETAINED_FAMILIES)
        if isinstance(result.outcome, Accept):
            trace.chosen_opt_g = g
            trace.solution = result.outcome.solution
            trace.pool = result.pool
            return result.outcome.solution, trace
    return Infeasible(reason='every candidate radius was rejected'), trace


####################################################################################################
#
#
def _to_original_units(trace, unit):
    for record in trace.probes:
        record.opt_g /= unit
        if record.cost is not None:
            record.cost /= unit


def solve_instance(inst, spec, config=None):
    """
    Validates, rescales, searches and maps the result back to the original units.

    Returns
    -------
    tuple
        (Solution or Infeasible, SearchTrace)

    Raises
    ------
    CutLimitExceeded
        Its ``trace`` holds every guess tried so far, in the original units.

    """
    config = config or SolverConfig()
    spec.validate(inst.n)
    if inst.n < 1:
        raise ContclustException('the instance has no clients')

    problems = validate_metric(inst)
    if problems:
        shown = '; '.join(problems[:5])
        more = f' (and {len(problems) - 5} more)' if len(problems) > 5 else ''
        raise ContclustException(f'invalid metric: {shown}{more}')

    scale = 1.0
    work_inst, work_spec = inst, spec
    if inst.n >= 2:
        try:
            work_inst, scale, aspect = rescale(inst)
            work_spec = spec.scaled(scale)
            logger.info('rescaled distances by %.6g (aspect ratio %.6g)', scale, aspect)
        except AllCoincident:
            logger.warning('all clients coincide; solving without rescaling')

    unit = scale ** spec.power
    try:
        result, trace = search(work_inst, work_spec, config=config)
    except CutLimitExceeded as e:
        if e.trace is not None:
            _to_original_units(e.trace, unit)
        raise
    _to_original_units(trace, unit)

    if isinstance(result, Infeasible):
        return result, trace

    served = result.served if spec.kind == KIND_KCWO else None
    cost = objective_value(inst, spec, result.centers, served)
    certificate = replace(result.certificate, bound=result.certificate.bound / unit)
    result = replace(result, cost=cost, opt_g=result.opt_g / unit, certificate=certificate)
    trace.chosen_opt_g = result.opt_g
    trace.solution = result
    return result, trace
