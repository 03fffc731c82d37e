"""
contclust - continuous clustering and facility location by round-or-cut.

This file holds the result records passed between the rounding oracles, the round-or-cut
driver, the exact oracle and the command line.

.............................................................................
contclust was developed as a desk-scale testbed for ball-variable LP relaxations
     Original release October 2026

Licensed under the MIT license.

"""

import csv
import io as _stdio
from dataclasses import dataclass, field, replace

TRACE_COLUMNS = ['opt_g', 'iterations', 'cuts', 'status', 'cost']


@dataclass(frozen=True)
class Infeasible:
    """
    Certified infeasibility: an LP pool with no point, a guess below the optimum, or an
    instance (fair / kcwo) with no feasible solution at all. Returned, never raised.

    """
    reason: str = ''


@dataclass(frozen=True)
class Certificate:
    """
    What a rounding oracle proved about the solution it accepted.

    ``bound`` is the value the cost was checked against (factor * opt_g plus the slack
    terms). ``fairness_ok`` is True for problems without fairness radii.

    """
    factor_bound: float
    bound: float
    fairness_ok: bool = True
    cuts_added: int = 0
    iterations: int = 0


@dataclass(frozen=True)
class Solution:
    """
    An integral solution.

    centers : tuple of point ids (always clients: the solvers only open within C)
    assignment : per client (in client order) the point id of the center serving it
    served : point ids of the served clients (kcwo only, empty otherwise)
    cost : objective value recomputed from raw distances
    opt_g : the optimum guess the solution was certified against

    """
    centers: tuple
    assignment: tuple
    cost: float
    opt_g: float
    certificate: Certificate
    served: tuple = ()

    def with_counts(self, cuts_added, iterations):
        return replace(self, certificate=replace(self.certificate, cuts_added=cuts_added, iterations=iterations))


@dataclass(frozen=True)
class Accept:
    solution: Solution


@dataclass(frozen=True)
class Cut:
    cut: object
    violation: float


@dataclass
class ProbeRecord:
    """One row of a SearchTrace: what happened at a single opt_g."""
    opt_g: float
    iterations: int = 0
    cuts: int = 0
    status: str = ''
    cost: float = None


@dataclass
class SearchTrace:
    """
    Per-guess record of a search. ``cuts`` counts are cumulative within a probe, so they
    never decrease across its iterations.

    ``pool`` is the constraint pool of the accepted probe, in the units the search ran in.

    """
    kind: str
    probes: list = field(default_factory=list)
    chosen_opt_g: float = None
    solution: Solution = None
    pool: object = None

    def to_csv(self):
        buffer = _stdio.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=TRACE_COLUMNS, lineterminator='\n')
        writer.writeheader()
        for p in self.probes:
            writer.writerow({'opt_g': repr(float(p.opt_g)),
                             'iterations': p.iterations,
                             'cuts': p.cuts,
                             'status': p.status,
                             'cost': '' if p.cost is None else repr(float(p.cost))})
        return buffer.getvalue()
