"""
contclust
Continuous clustering and facility location (UFL, fair k-median, (k,p)-clustering and
k-center with outliers) by round-or-cut over ball-variable LP relaxations.
"""
# Add imports here
import logging
import os

from . import io as _io
from . import oracle as _oracle
from . import round_or_cut as _round_or_cut
from ._configs import SolverConfig, KINDS
from .contclust_exceptions import ContclustException, InstanceFormatError
from .core_metric import (MetricInstance, ProblemSpec, validate_metric, instance_from_points, random_points,
                          clustered_points)
from .hardness_gen import Graph, embed, completeness_solution, greedy_matching, planted_partition_graph
from .io import InstanceFile, read_instance, write_instance, read_solution, write_solution, read_graph, write_graph
from .results import Infeasible, Solution, Certificate

__version__ = '0.1.0'


_ROOT = os.path.abspath(os.path.dirname(__file__))
def _get_data(path):
    """
    This function is used for getting the absolute path for loading
    test data. Pay no attention to the code behind the curtain.

    """
    return os.path.join(_ROOT, 'data', path)


def _set_verbosity(verbose):
    """
    verbose=True logs INFO records to standard error as ``[INFO]: ...`` lines through one
    package handler; verbose=False detaches it again.

    """
    logger = logging.getLogger(__name__)
    ours = [h for h in logger.handlers if getattr(h, '_contclust_verbose', False)]
    if verbose:
        if not ours:
            handler = logging.StreamHandler()
            handler.setFormatter(logging.Formatter('[%(levelname)s]: %(message)s'))
            handler._contclust_verbose = True
            logger.addHandler(handler)
        logger.setLevel(logging.INFO)
    else:
        for handler in ours:
            logger.removeHandler(handler)
        logger.setLevel(logging.NOTSET)


def solve(inst, spec, config=None, verbose=False):
    """
    ``solve`` is the main user-facing function of **contclust**. It validates the metric,
    rescales distances, runs the round-or-cut search for the problem described by ``spec``
    and returns the certified solution in the instance's own units.

    The simplest usage is

    >>> inst = instance_from_points(points)
    >>> sol = solve(inst, ProblemSpec.ufl(1.0))

    Parameters
    ------------
    inst : MetricInstance
        Finite metric with its client set; centers are opened among the clients.

    spec : ProblemSpec
        One of ``ProblemSpec.ufl(lam)``, ``ProblemSpec.fair(k, radii)``,
        ``ProblemSpec.kp(k, p)`` or ``ProblemSpec.kcwo(k, m)``.

    config : SolverConfig
        [**Default = None**] Grid spacing, iteration cap and cut retention. None uses the
        defaults (grid spacing 1/n^2).

    verbose : bool
        [**Default = False**] If True, progress of the search (one line per optimum guess)
        is logged at INFO level.

    Returns
    ----------
    Solution or Infeasible
        Infeasible is only returned for fair k-median instances where no k centers meet
        every radius (and for kcwo when no radius is accepted).

    """
    _io.check_inputs(inst=inst, spec=spec, config=config, verbose=verbose)
    _set_verbosity(verbose)
    result, _ = _round_or_cut.solve_instance(inst, spec, config)
    return result


def solve_with_trace(inst, spec, config=None, verbose=False):
    """As ``solve`` but also returns the SearchTrace (one row per optimum guess probed)."""
    _io.check_inputs(inst=inst, spec=spec, config=config, verbose=verbose)
    _set_verbosity(verbose)
    return _round_or_cut.solve_instance(inst, spec, config)


def exact_solve(inst, spec, budget=_oracle.ENUMERATION_BUDGET, verbose=False):
    """
    Exact optimum by enumerating center sets drawn from the candidate points. Raises
    TooLarge when more than ``budget`` sets would be needed.

    """
    _io.check_inputs(inst=inst, spec=spec, verbose=verbose, budget=budget)
    _set_verbosity(verbose)
    return _oracle.exact_solve(inst, spec, budget=budget)


def certify(inst, spec, solution, opt_g, slack=0.0, radius_slack=0.0):
    """Recomputes ``solution``'s cost and lists every guarantee it meets or misses."""
    _io.check_inputs(inst=inst, spec=spec)
    return _oracle.certify(inst, spec, solution, opt_g, slack=slack, radius_slack=radius_slack)
