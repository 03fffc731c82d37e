"""
Unit and regression test for the contclust package.
"""

# Import package, test suite, and other packages as needed
import logging
import os
import sys

import pytest

import contclust
from contclust import ProblemSpec, SolverConfig
from contclust.contclust_exceptions import ContclustException, TooLarge


def test_contclust_imported():
    """Sample test, will always pass so long as import statement worked"""
    assert "contclust" in sys.modules
    assert contclust.__version__ == '0.1.0'


def test_get_data():
    assert os.path.isdir(contclust._get_data('test_data'))
    assert os.path.isfile(contclust._get_data('test_data/ufl_two.json'))


def test_solve(ufl_two):
    sol = contclust.solve(ufl_two, ProblemSpec.ufl(1.0))
    assert 2.0 <= sol.cost <= 4.64
    assert sol.certificate.factor_bound > 2.31


def test_solve_with_trace(path3):
    sol, trace = contclust.solve_with_trace(path3, ProblemSpec.kp(1, 1), config=SolverConfig(seed=2))
    assert trace.solution is sol
    assert trace.chosen_opt_g == sol.opt_g
    assert len(sol.centers) == 1


def test_solve_checks_inputs(ufl_two):
    with pytest.raises(ContclustException):
        contclust.solve(ufl_two, ProblemSpec.ufl(1.0), verbose='x')
    with pytest.raises(ContclustException):
        contclust.solve([[0.0, 1.0], [1.0, 0.0]], ProblemSpec.ufl(1.0))
    with pytest.raises(ContclustException):
        contclust.solve(ufl_two, 'ufl')


def test_exact_and_certify(path3):
    spec = ProblemSpec.kp(1, 1)
    exact = contclust.exact_solve(path3, spec)
    assert exact.value == 2.0

    sol = contclust.solve(path3, spec)
    report = contclust.certify(path3, spec, sol, exact.value, slack=8.0 * 2.0 / 9.0 + 1e-4)
    assert report.passed

    with pytest.raises(TooLarge):
        contclust.exact_solve(path3, spec, budget=1)


def test_verbose_logs_info_lines_once(ufl_two, capsys):
    logger = logging.getLogger('contclust')
    try:
        contclust.solve(ufl_two, ProblemSpec.ufl(1.0), verbose=True)
        contclust.solve(ufl_two, ProblemSpec.ufl(1.0), verbose=True)
        assert len(logger.handlers) == 1
        err = capsys.readouterr().err
        assert '[INFO]: opt_g=' in err
    finally:
        contclust.solve(ufl_two, ProblemSpec.ufl(1.0))

    assert logger.handlers == []
    assert logger.level == logging.NOTSET
    assert '[INFO]' not in capsys.readouterr().err
