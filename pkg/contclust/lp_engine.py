"""
contclust - continuous clustering and facility location by round-or-cut.

This file handles the LP side: variables, constraints, the per-problem base constraint
builders, the cut pool and the solve_lp contract (scipy's HiGHS backend).

.............................................................................
contclust was developed as a desk-scale testbed for ball-variable LP relaxations
     Original release October 2026

Licensed under the MIT license.

Be kind to each other.

"""

import itertools
import logging
import math
from dataclasses import dataclass
from types import MappingProxyType

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from ._configs import TAU_LP, TAU_CUT, LP_METHOD, KIND_UFL, KIND_FAIR, KIND_KP, KIND_KCWO
from .contclust_exceptions import (ContclustException, GridMissingRadius, NumericalFailure, InvariantBreach)
from .core_metric import center_distances
from .results import Infeasible

logger = logging.getLogger(__name__)

FAMILY_UFL = 'UFL_ALPHA'
FAMILY_FAIR = 'FAIR'
FAMILY_KCWO = 'KCWO'


####################################################################################################
#
#    variables
#
@dataclass(frozen=True)
class CostVar:
    """C_v (ufl, fair) or the surrogate U_v = C_v^p (kp)."""
    v: int

    def __str__(self):
        return f'C[{self.v}]'


@dataclass(frozen=True)
class BallVar:
    """y(v, rho_t): number of open centers within grid radius t of client v."""
    v: int
    t: int

    def __str__(self):
        return f'y[{self.v},{self.t}]'


@dataclass(frozen=True)
class ShadowVar:
    """min(y(v, rho_t), 1) as read by the integral constraint."""
    v: int
    t: int

    def __str__(self):
        return f'w[{self.v},{self.t}]'


@dataclass(frozen=True)
class CovVar:
    v: int

    def __str__(self):
        return f'cov[{self.v}]'


_VAR_ORDER = {CostVar: 0, BallVar: 1, ShadowVar: 2, CovVar: 3}


def _var_key(var):
    if isinstance(var, (BallVar, ShadowVar)):
        return (_VAR_ORDER[type(var)], var.v, var.t)
    return (_VAR_ORDER[type(var)], var.v, 0)


def _bounds(var):
    if isinstance(var, (ShadowVar, CovVar)):
        return (0.0, 1.0)
    return (0.0, None)


####################################################################################################
#
#
@dataclass(frozen=True)
class LinearConstraint:
    """
    sum(coef * var) {<=, >=} rhs. ``tag`` records where the row came from (a base family
    name or a cut family).

    """
    terms: tuple
    sense: str
    rhs: float
    tag: str = ''

    def __post_init__(self):
        terms = tuple((var, float(coef)) for var, coef in self.terms)
        object.__setattr__(self, 'terms', terms)

        if self.sense not in ('<=', '>='):
            raise ContclustException(f"constraint sense must be '<=' or '>=', got '{self.sense}'")

        seen = set()
        for var, coef in terms:
            if var in seen:
                raise ContclustException(f'variable {var} appears twice in constraint [{self.tag}]')
            if not math.isfinite(coef):
                raise ContclustException(f'non-finite coefficient on {var} in constraint [{self.tag}]')
            seen.add(var)

        if not math.isfinite(self.rhs):
            raise ContclustException(f'non-finite right-hand side in constraint [{self.tag}]')

    def lhs(self, sol):
        return sum(coef * sol.value(var) for var, coef in self.terms)

    def violation(self, sol):
        """Positive amount by which ``sol`` breaks the constraint."""
        lhs = self.lhs(sol)
        if self.sense == '<=':
            return lhs - self.rhs
        return self.rhs - lhs

    def scale(self):
        return max([1.0, abs(self.rhs)] + [abs(c) for _, c in self.terms])

    def __str__(self):
        body = ' + '.join(f'{coef:g}*{var}' for var, coef in self.terms) or '0'
        return f'{self.tag}: {body} {self.sense} {self.rhs:g}'


####################################################################################################
#
#
@dataclass(frozen=True)
class SepCut:
    """
    A disjoint-ball constraint produced by a failed rounding.

    ``balls`` is a tuple of (client, grid index, radius). FAIR and KCWO cuts read
    sum y(j, rho_j) <= k; UFL_ALPHA cuts read lam * sum y(j, rho_j) + sum_v C_v <= opt_g.

    """
    family: str
    balls: tuple
    k: int = None
    lam: float = None
    opt_g: float = None

    def __post_init__(self):
        object.__setattr__(self, 'balls', tuple(sorted((int(j), int(t), float(r)) for j, t, r in self.balls)))
        clients = [j for j, _, _ in self.balls]
        if len(set(clients)) != len(clients):
            raise ContclustException(f'{self.family} cut lists a client twice')

    @property
    def key(self):
        return (self.family, tuple((j, t) for j, t, _ in self.balls))

    def to_constraint(self, n):
        if self.family == FAMILY_UFL:
            terms = [(BallVar(j, t), self.lam) for j, t, _ in self.balls if self.lam != 0]
            terms += [(CostVar(v), 1.0) for v in range(n)]
            return LinearConstraint(terms, '<=', self.opt_g, tag=FAMILY_UFL)
        terms = [(BallVar(j, t), 1.0) for j, t, _ in self.balls]
        return LinearConstraint(terms, '<=', float(self.k), tag=self.family)

    def is_disjoint(self, inst):
        """
        Pairwise ball disjointness, d(j,j') > rho_j + rho_j' for every family.

        """
        cd = inst.client_dist
        for (j, _, rj), (jj, _, rjj) in itertools.combinations(self.balls, 2):
            if cd[j, jj] - (rj + rjj) <= 0:
                return False
        return True


def check_cut_violated(sol, cut):
    """
    Signed violation of ``cut`` at ``sol``; positive means violated.

    """
    ysum = sum(sol.ball(j, t) for j, t, _ in cut.balls)
    if cut.family == FAMILY_UFL:
        return cut.lam * ysum + float(np.sum(sol.u)) - cut.opt_g
    return ysum - cut.k


####################################################################################################
#
#
class FractionalSolution:
    """
    An LP point. Read-only snapshot: ``values`` maps VarIndex -> float and, when the grid
    is known, per-client arrays ``y`` (ball masses along the grid), ``u`` (cost variables)
    and ``cov`` are precomputed.

    """

    def __init__(self, values, grid=None, n=None):
        self.values = MappingProxyType(dict(values))
        self.grid = grid

        if n is None:
            n = grid.n if grid is not None else 1 + max((var.v for var in values), default=-1)
        self.n = n

        y = []
        for v in range(n):
            size = grid.size(v) if grid is not None else 0
            y.append(np.array([self.values.get(BallVar(v, t), 0.0) for t in range(size)]))
        self.y = tuple(y)
        self.u = np.array([self.values.get(CostVar(v), 0.0) for v in range(n)])
        self.cov = np.array([self.values.get(CovVar(v), 0.0) for v in range(n)])

    def value(self, var):
        return self.values.get(var, 0.0)

    def ball(self, v, t):
        return float(self.y[v][t])

    def cost(self, v):
        return float(self.u[v])


####################################################################################################
#
#
class ConstraintPool:
    """
    Base constraints plus the cuts admitted so far, keyed by their canonical key. Adding
    a cut whose key is already present does nothing.

    """

    def __init__(self, base=(), tau_cut=TAU_CUT, inst=None, spec=None, grid=None, opt_g=None):
        self.base = list(base)
        self.cuts = {}
        self.tau_cut = tau_cut
        self.inst = inst
        self.spec = spec
        self.grid = grid
        self.opt_g = opt_g

    def __len__(self):
        return len(self.base) + len(self.cuts)

    @property
    def n(self):
        if self.grid is not None:
            return self.grid.n
        return None

    def add_cut(self, cut):
        """
        Inserts ``cut`` unless its key is already stored. Returns True when the pool grew.

        """
        if cut.key in self.cuts:
            return False

        if self.inst is not None and not cut.is_disjoint(self.inst):
            raise InvariantBreach(f'{cut.family} cut over clients {[j for j, _, _ in cut.balls]} has overlapping balls')

        self.cuts[cut.key] = (cut, cut.to_constraint(self.inst.n if self.inst is not None else self.n))
        return True

    def cut_list(self, families=None):
        return [cut for cut, _ in self.cuts.values() if families is None or cut.family in families]

    def constraints(self):
        return self.base + [row for _, row in self.cuts.values()]

    def variables(self):
        found = set()
        for row in self.constraints():
            for var, _ in row.terms:
                found.add(var)
        return sorted(found, key=_var_key)

    def violations(self, sol, tol=TAU_LP):
        """Every (tag, amount) violated by more than ``tol`` (scaled by the row magnitude)."""
        bad = []
        for row in self.constraints():
            amount = row.violation(sol)
            if amount > tol * row.scale():
                bad.append((row.tag, amount))
        return bad

    def to_lp_text(self):
        return '\n'.join(str(row) for row in self.constraints()) + '\n'


####################################################################################################
#
#
def _require(grid, v, rho, what):
    t = grid.index_of(v, rho)
    if t is None:
        raise GridMissingRadius(f'{what} {rho:g} is not on the grid of client {v}')
    return t


def _integral_rows(grid, v, p):
    """
    Right-endpoint integral constraint for client v, written with shadow variables:

        U_v + sum_t (rho_{t+1}^p - rho_t^p) * w(v, t+1) >= rho_T^p,   w(v,t) <= y(v,t)

    """
    radii = grid.radii[v]
    powered = radii ** p
    rows = []
    terms = [(CostVar(v), 1.0)]
    for t in range(1, len(radii)):
        terms.append((ShadowVar(v, t), float(powered[t] - powered[t - 1])))
        rows.append(LinearConstraint([(ShadowVar(v, t), 1.0), (BallVar(v, t), -1.0)], '<=', 0.0, tag='shadow'))
    rows.insert(0, LinearConstraint(terms, '>=', float(powered[-1]), tag='integral'))
    return rows


def build_base(inst, spec, grid, opt_g):
    """
    Base constraints of the ball-variable LP for the given problem and optimum guess.

    Per client: concentric monotonicity along the grid; the right-endpoint integral
    constraint (ufl, fair, kp); anchoring y(v, R_max) >= 1 (ufl, kp, and fair clients with
    no radius); then per kind:

    * ufl: sum C_v <= opt_g
    * fair_kmedian: sum C_v <= opt_g, y(v, r(v)) >= 1, and for every ordered client pair
      y(u, rho') >= y(v, r(v)) with rho' the smallest grid radius >= d(u,v) + r(v)
    * kp: sum U_v <= opt_g
    * kcwo: y(v, opt_g) >= cov_v and sum cov_v >= m

    Parameters
    ----------
    inst : MetricInstance

    spec : ProblemSpec

    grid : RadiusGrid

    opt_g : float

    Returns
    -------
    ConstraintPool

    Raises
    ------
    GridMissingRadius
        When a fairness radius, a half-distance or opt_g (kcwo) is not on a grid.

    """
    n = inst.n
    p = spec.power
    rows = []

    for v in range(n):
        for t in range(grid.size(v) - 1):
            rows.append(LinearConstraint([(BallVar(v, t), 1.0), (BallVar(v, t + 1), -1.0)], '<=', 0.0,
                                         tag='monotone'))

    if spec.kind in (KIND_FAIR, KIND_KP):
        cd = inst.client_dist
        for v in range(n):
            for u in range(n):
                if u != v and cd[v, u] / 2.0 <= grid.r_max[v]:
                    _require(grid, v, cd[v, u] / 2.0, 'half-distance')

    if spec.kind == KIND_KCWO:
        for v in range(n):
            t = _require(grid, v, opt_g, 'guess')
            rows.append(LinearConstraint([(BallVar(v, t), 1.0), (CovVar(v), -1.0)], '>=', 0.0, tag='coverage'))
        rows.append(LinearConstraint([(CovVar(v), 1.0) for v in range(n)], '>=', float(spec.m), tag='served'))
        return ConstraintPool(rows, inst=inst, spec=spec, grid=grid, opt_g=opt_g)

    for v in range(n):
        rows.extend(_integral_rows(grid, v, p))

    for v in range(n):
        if spec.kind == KIND_FAIR and math.isfinite(spec.radii[v]):
            t = _require(grid, v, spec.radii[v], 'fairness radius')
            rows.append(LinearConstraint([(BallVar(v, t), 1.0)], '>=', 1.0, tag='fair_radius'))
        else:
            rows.append(LinearConstraint([(BallVar(v, grid.size(v) - 1), 1.0)], '>=', 1.0, tag='anchor'))

    if spec.kind == KIND_FAIR:
        rows.extend(_pair_rows(inst, spec, grid))

    rows.append(LinearConstraint([(CostVar(v), 1.0) for v in range(n)], '<=', float(opt_g), tag='budget'))

    return ConstraintPool(rows, inst=inst, spec=spec, grid=grid, opt_g=opt_g)


def _pair_rows(inst, spec, grid):
    """Non-concentric monotonicity: B(v, r(v)) is inside B(u, d(u,v) + r(v))."""
    cd = inst.client_dist
    rows = []
    for v in range(inst.n):
        r = spec.radii[v]
        if not math.isfinite(r):
            continue
        tv = grid.index_of(v, r)
        for u in range(inst.n):
            if u == v:
                continue
            tu = grid.smallest_at_least(u, cd[u, v] + r)
            if tu is None:
                continue
            rows.append(LinearConstraint([(BallVar(u, tu), 1.0), (BallVar(v, tv), -1.0)], '>=', 0.0, tag='pair'))
    return rows


####################################################################################################
#
#
def solve_lp(pool, objective='cost'):
    """
    Solves the LP defined by ``pool``.

    Parameters
    ----------
    pool : ConstraintPool

    objective : str
        'cost' minimizes the sum of the CostVar columns, 'feasibility' uses a zero objective.

    Returns
    -------
    FractionalSolution or Infeasible

    Raises
    ------
    NumericalFailure
        When the backend reports anything other than optimal or infeasible, or its point
        breaks a constraint by more than the LP tolerance.

    """
    if objective not in ('cost', 'feasibility'):
        raise ContclustException(f"objective must be 'cost' or 'feasibility', got '{objective}'")

    rows = pool.constraints()
    variables = pool.variables()
    column = {var: i for i, var in enumerate(variables)}

    data, ri, ci, rhs = [], [], [], []
    for r, row in enumerate(rows):
        sign = 1.0 if row.sense == '<=' else -1.0
        for var, coef in row.terms:
            data.append(sign * coef)
            ri.append(r)
            ci.append(column[var])
        rhs.append(sign * row.rhs)

    c = np.zeros(len(variables))
    if objective == 'cost':
        for var, i in column.items():
            if isinstance(var, CostVar):
                c[i] = 1.0

    a_ub = sparse.csr_matrix((data, (ri, ci)), shape=(len(rows), len(variables))) if rows else None
    b_ub = np.array(rhs) if rows else None

    if not variables:
        return FractionalSolution({}, grid=pool.grid, n=pool.n)

    res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=[_bounds(var) for var in variables], method=LP_METHOD,
                  options={'primal_feasibility_tolerance': 1e-9, 'dual_feasibility_tolerance': 1e-9})

    if res.status == 2:
        logger.debug('LP infeasible (%d rows, %d columns)', len(rows), len(variables))
        return Infeasible(reason='LP pool has no feasible point')

    if res.status != 0:
        raise NumericalFailure(f'LP backend failed with status {res.status}: {res.message}')

    sol = FractionalSolution({var: float(res.x[i]) for var, i in column.items()}, grid=pool.grid, n=pool.n)

    worst = pool.violations(sol, tol=TAU_LP)
    if worst:
        tag, amount = max(worst, key=lambda item: item[1])
        raise NumericalFailure(f'LP point violates [{tag}] by {amount:.3g}')

    return sol


####################################################################################################
#
#
def integral_point(inst, spec, grid, centers, opt_g=None):
    """
    The LP point induced by opening ``centers`` (point ids, any candidate points):
    C_v = d(v,S)^p, y(v,rho) = 1 iff d(v,S) <= rho, cov_v = 1 iff d(v,S) <= opt_g.

    Every base constraint and every well-formed cut holds at this point when the cost of
    ``centers`` is at most opt_g.

    """
    d, _ = center_distances(inst, centers)
    p = spec.power
    values = {}
    for v in range(inst.n):
        values[CostVar(v)] = float(d[v] ** p)
        for t, rho in enumerate(grid.radii[v]):
            hit = 1.0 if d[v] <= rho + 1e-9 * max(1.0, rho) else 0.0
            values[BallVar(v, t)] = hit
            if t > 0:
                values[ShadowVar(v, t)] = hit
        if spec.kind == KIND_KCWO:
            values[CovVar(v)] = 1.0 if d[v] <= opt_g + 1e-9 * max(1.0, opt_g) else 0.0
    return FractionalSolution(values, grid=grid, n=inst.n)


def markov_holds(sol, v, t, p, tau):
    """U_v >= rho_t^p * (1 - y(v, rho_t)) - tau."""
    rho = sol.grid.radius(v, t)
    return sol.cost(v) >= rho ** p * (1.0 - sol.ball(v, t)) - tau


def markov_tolerance(n, r_max, p):
    return n * TAU_LP * max(1.0, float(r_max) ** p)
