"""
contclust - continuous clustering and facility location by round-or-cut.

This file handles the input and output (instance, solution and graph files), including
validation of input arguments.

.............................................................................
contclust was developed as a desk-scale testbed for ball-variable LP relaxations
     Original release October 2026

Licensed under the MIT license.

Be kind to each other.

"""

import json
import logging
import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from ._configs import KINDS, KIND_UFL, KIND_FAIR, KIND_KP, KIND_KCWO, NORMS, SolverConfig
from .contclust_exceptions import ContclustException, InstanceFormatError
from .core_metric import MetricInstance, ProblemSpec, instance_from_points, validate_metric
from .hardness_gen import Graph
from .results import Certificate, Solution

logger = logging.getLogger(__name__)

# problem-section keys as written in files, mapped to ProblemSpec fields
PROBLEM_KEYS = {'lambda': 'lam', 'k': 'k', 'radii': 'radii', 'p': 'p', 'm': 'm'}

METRIC_EXPLICIT = 'explicit'
METRIC_LP_NORM = 'lp_norm'

_VERTEX_DIRECTIVE = re.compile(r'^#\s*vertices\s+(\d+)\s*$')


def check_inputs(inst=None, spec=None, config=None, verbose=False, budget=None):
    """
    Function that performs sanity validation for the arguments of the public entry points.
    If arguments do not match the expected types or ranges this function throws a
    ContclustException.

    Parameters
    ------------
    inst : ?
        Checks it's a MetricInstance (if provided)

    spec : ?
        Checks it's a ProblemSpec that is valid for the instance (if provided)

    config : ?
        Checks it's a SolverConfig (if provided)

    verbose : ?
        Checks it's a bool

    budget : ?
        Checks it's a positive integer (if provided)

    Returns
    ---------
        No return - stateless function that checks things are OK

    """
    if inst is not None and not isinstance(inst, MetricInstance):
        raise ContclustException("keyword 'inst' must be a MetricInstance")

    if spec is not None:
        if not isinstance(spec, ProblemSpec):
            raise ContclustException("keyword 'spec' must be a ProblemSpec")
        if inst is not None:
            spec.validate(inst.n)

    if config is not None and not isinstance(config, SolverConfig):
        raise ContclustException("keyword 'config' must be a SolverConfig")

    if type(verbose) != bool:
        raise ContclustException("keyword 'verbose' must be a boolean")

    if budget is not None:
        if not isinstance(budget, (int, np.integer)) or isinstance(budget, bool) or budget < 1:
            raise ContclustException("keyword 'budget' must be a positive integer")


####################################################################################################
#
#
def _line_of(text, key):
    """1-based line of the first occurrence of the JSON key ``key``, or None."""
    match = re.search(f'"{re.escape(key)}"\\s*:', text)
    if match is None:
        return None
    return text.count('\n', 0, match.start()) + 1


def _encode_radius(r):
    return 'inf' if math.isinf(r) else r


def _decode_radius(r):
    if isinstance(r, str):
        if r.strip().lower() in ('inf', 'infinity'):
            return math.inf
        raise ContclustException(f"radius must be a number or 'inf', got '{r}'")
    if isinstance(r, bool) or not isinstance(r, (int, float)):
        raise ContclustException(f"radius must be a number or 'inf', got {r!r}")
    return float(r)


@dataclass(frozen=True)
class InstanceFile:
    """
    An instance document.

    metric : {'type': 'explicit', 'matrix': [[...]]} or {'type': 'lp_norm', 'p': '1'|'2'|'inf', 'points': [[...]]}
    clients : point indices of the clients, in client order
    problem : ProblemSpec
    config : SolverConfig

    Every point of the metric is a candidate point. lp_norm metrics are materialized into a
    distance matrix once, by ``instance``.

    """
    metric: dict
    clients: tuple
    problem: ProblemSpec
    config: SolverConfig = field(default_factory=SolverConfig)

    @classmethod
    def from_matrix(cls, matrix, clients, problem, config=None):
        matrix = [[float(x) for x in row] for row in np.asarray(matrix, dtype=float)]
        return cls(metric={'type': METRIC_EXPLICIT, 'matrix': matrix}, clients=tuple(int(c) for c in clients),
                   problem=problem, config=config or SolverConfig())

    @classmethod
    def from_points(cls, points, norm, clients, problem, config=None):
        points = [[float(x) for x in row] for row in np.atleast_2d(np.asarray(points, dtype=float))]
        return cls(metric={'type': METRIC_LP_NORM, 'p': norm, 'points': points},
                   clients=tuple(int(c) for c in clients), problem=problem, config=config or SolverConfig())

    @cached_property
    def instance(self):
        if self.metric['type'] == METRIC_EXPLICIT:
            return MetricInstance(dist=np.asarray(self.metric['matrix'], dtype=float), clients=self.clients)
        return instance_from_points(self.metric['points'], norm=self.metric['p'], clients=self.clients)

    def to_dict(self):
        problem = {'kind': self.problem.kind}
        for key, name in PROBLEM_KEYS.items():
            value = getattr(self.problem, name)
            if value is None:
                continue
            problem[key] = [_encode_radius(r) for r in value] if name == 'radii' else value

        document = {'metric': self.metric, 'clients': list(self.clients), 'problem': problem}
        config = self.config.to_dict()
        if config:
            document['config'] = config
        return document


def _parse_metric(metric):
    if not isinstance(metric, dict):
        raise ContclustException("'metric' must be a mapping")

    kind = metric.get('type')
    if kind == METRIC_EXPLICIT:
        if set(metric) != {'type', 'matrix'}:
            raise ContclustException("an explicit metric has exactly the keys 'type' and 'matrix'")
        matrix = np.asarray(metric['matrix'], dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] == 0:
            raise ContclustException(f'distance matrix must be square and nonempty, got shape {matrix.shape}')
        return {'type': METRIC_EXPLICIT, 'matrix': matrix.tolist()}, matrix.shape[0]

    if kind == METRIC_LP_NORM:
        if set(metric) != {'type', 'p', 'points'}:
            raise ContclustException("an lp_norm metric has exactly the keys 'type', 'p' and 'points'")
        norm = str(metric['p'])
        if norm not in NORMS:
            raise ContclustException(f"lp_norm 'p' must be one of {', '.join(NORMS)}, got '{norm}'")
        points = np.asarray(metric['points'], dtype=float)
        if points.ndim != 2 or points.shape[0] == 0:
            raise ContclustException(f'points must be a nonempty list of coordinate lists, got shape {points.shape}')
        return {'type': METRIC_LP_NORM, 'p': norm, 'points': points.tolist()}, points.shape[0]

    raise ContclustException(f"metric type must be '{METRIC_EXPLICIT}' or '{METRIC_LP_NORM}', got '{kind}'")


def _parse_problem(problem):
    if not isinstance(problem, dict):
        raise ContclustException("'problem' must be a mapping")

    kind = problem.get('kind')
    if kind not in KINDS:
        raise ContclustException(f"problem kind must be one of {', '.join(KINDS)}, got '{kind}'")

    values = {}
    for key, value in problem.items():
        if key == 'kind':
            continue
        if key not in PROBLEM_KEYS:
            raise ContclustException(f"unknown problem key '{key}'")
        if key == 'radii':
            if not isinstance(value, list):
                raise ContclustException("'radii' must be a list")
            value = tuple(_decode_radius(r) for r in value)
        elif key == 'lambda':
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ContclustException(f"'lambda' must be a number, got {value!r}")
            value = float(value)
        else:
            if isinstance(value, bool) or not isinstance(value, int):
                raise ContclustException(f"'{key}' must be an integer, got {value!r}")
        values[PROBLEM_KEYS[key]] = value

    return ProblemSpec(kind=kind, **values)


def parse_instance(document, filename=None, text=''):
    """
    Builds and validates an InstanceFile from an already decoded document. Errors are
    raised as InstanceFormatError pointing at the line of the offending section.

    """
    def fail(message, key):
        raise InstanceFormatError(message, filename=filename, line=_line_of(text, key))

    if not isinstance(document, dict):
        fail('an instance document must be a mapping', 'metric')

    unknown = sorted(set(document) - {'metric', 'clients', 'problem', 'config'})
    if unknown:
        fail(f"unknown top-level keys: {', '.join(unknown)}", unknown[0])
    for key in ('metric', 'clients', 'problem'):
        if key not in document:
            fail(f"missing required section '{key}'", 'metric')

    try:
        metric, point_count = _parse_metric(document['metric'])
    except (ContclustException, ValueError, TypeError) as e:
        fail(str(e), 'metric')

    clients = document['clients']
    if not isinstance(clients, list) or any(isinstance(c, bool) or not isinstance(c, int) for c in clients):
        fail("'clients' must be a list of integer point indices", 'clients')
    if not clients:
        fail('the instance has no clients', 'clients')
    for c in clients:
        if not 0 <= c < point_count:
            fail(f'client {c} is out of range for {point_count} points', 'clients')
    if len(set(clients)) != len(clients):
        fail('clients contain duplicates', 'clients')

    try:
        problem = _parse_problem(document['problem'])
        problem.validate(len(clients))
    except ContclustException as e:
        fail(str(e), 'problem')

    try:
        config = SolverConfig.from_dict(document.get('config'))
    except (ContclustException, TypeError) as e:
        fail(str(e), 'config')

    result = InstanceFile(metric=metric, clients=tuple(clients), problem=problem, config=config)

    try:
        problems = validate_metric(result.instance)
    except ContclustException as e:
        fail(str(e), 'metric')
    if problems:
        fail(f'invalid metric: {problems[0]}', 'metric')

    return result


def read_instance(filename):
    """
    Reads an instance file (JSON).

    Parameters
    ------------
    filename : str or Path

    Returns
    ----------
    InstanceFile

    Raises
    ----------
    InstanceFormatError
        On unreadable files, malformed JSON or invalid content, with file name and line.

    """
    filepath = Path(filename)
    try:
        text = filepath.read_text()
    except (FileNotFoundError, IsADirectoryError, PermissionError) as e:
        raise InstanceFormatError(f'unable to read file ({e.__class__.__name__})', filename=str(filename))

    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceFormatError(e.msg, filename=str(filename), line=e.lineno)

    result = parse_instance(document, filename=str(filename), text=text)
    logger.info('read %s instance with %d clients from %s', result.problem.kind, len(result.clients), filename)
    return result


def dumps(document):
    return json.dumps(document, indent=2, sort_keys=True) + '\n'


def write_instance(instance_file, filename):
    Path(filename).write_text(dumps(instance_file.to_dict()))


####################################################################################################
#
#
def solution_to_dict(solution):
    cert = solution.certificate
    return {'centers': list(solution.centers),
            'assignment': list(solution.assignment),
            'served': list(solution.served),
            'cost': float(solution.cost),
            'opt_g_used': float(solution.opt_g),
            'certificate': {'factor_bound': float(cert.factor_bound),
                            'bound': float(cert.bound),
                            'fairness_ok': bool(cert.fairness_ok),
                            'cuts_added': int(cert.cuts_added),
                            'iterations': int(cert.iterations)}}


def solution_from_dict(document, filename=None):
    try:
        cert = document['certificate']
        certificate = Certificate(factor_bound=float(cert['factor_bound']),
                                  bound=float(cert.get('bound', math.nan)),
                                  fairness_ok=bool(cert['fairness_ok']),
                                  cuts_added=int(cert['cuts_added']),
                                  iterations=int(cert['iterations']))
        return Solution(centers=tuple(int(c) for c in document['centers']),
                        assignment=tuple(int(a) for a in document['assignment']),
                        cost=float(document['cost']),
                        opt_g=float(document['opt_g_used']),
                        certificate=certificate,
                        served=tuple(int(s) for s in document.get('served', ())))
    except (KeyError, TypeError, ValueError) as e:
        raise InstanceFormatError(f'malformed solution document ({e.__class__.__name__}: {e})', filename=filename)


def write_solution(solution, filename):
    Path(filename).write_text(dumps(solution_to_dict(solution)))


def read_solution(filename):
    filepath = Path(filename)
    try:
        document = json.loads(filepath.read_text())
    except json.JSONDecodeError as e:
        raise InstanceFormatError(e.msg, filename=str(filename), line=e.lineno)
    except FileNotFoundError:
        raise InstanceFormatError('unable to find file', filename=str(filename))
    return solution_from_dict(document, filename=str(filename))


####################################################################################################
#
#
def read_graph(filename):
    """
    Reads an edge list: one ``u v`` pair of 0-indexed vertices per line. Lines starting with
    '#' are comments; a ``# vertices N`` comment fixes the vertex count (otherwise it is the
    largest index plus one).

    """
    filepath = Path(filename)
    try:
        lines = filepath.read_text().splitlines()
    except FileNotFoundError:
        raise InstanceFormatError('unable to find file', filename=str(filename))

    n = None
    edges = []
    for number, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith('#'):
            directive = _VERTEX_DIRECTIVE.match(stripped)
            if directive:
                n = int(directive.group(1))
            continue

        fields = stripped.split()
        if len(fields) != 2:
            raise InstanceFormatError(f"expected 'u v', found {len(fields)} fields", filename=str(filename),
                                      line=number)
        try:
            u, v = int(fields[0]), int(fields[1])
        except ValueError:
            raise InstanceFormatError(f"vertex ids must be integers, got '{stripped}'", filename=str(filename),
                                      line=number)
        if u == v or u < 0 or v < 0:
            raise InstanceFormatError(f'invalid edge ({u},{v})', filename=str(filename), line=number)
        edges.append((u, v))

    try:
        return Graph.from_edges(edges, n=n)
    except ContclustException as e:
        raise InstanceFormatError(str(e), filename=str(filename))


def write_graph(G, filename):
    lines = [f'# vertices {G.n}'] + [f'{u} {v}' for u, v in G.edges]
    Path(filename).write_text('\n'.join(lines) + '\n')


def hardness_instance_file(emb):
    """InstanceFile for an embedded hardness instance (l_inf points, lambda = eps n)."""
    points = np.vstack([emb.points, emb.facilities])
    return InstanceFile.from_points(points, 'inf', range(emb.points.shape[0]), emb.spec)


def problem_for(kind, n, k=None, lam=None, p=None, m=None, radius=None):
    """ProblemSpec of ``kind`` for n clients, filling in the parameters the kind needs."""
    if kind == KIND_UFL:
        return ProblemSpec.ufl(1.0 if lam is None else lam)
    k = 1 if k is None else k
    if kind == KIND_FAIR:
        return ProblemSpec.fair(k, [math.inf if radius is None else radius] * n)
    if kind == KIND_KP:
        return ProblemSpec.kp(k, 1 if p is None else p)
    if kind == KIND_KCWO:
        return ProblemSpec.kcwo(k, n if m is None else m)
    raise ContclustException(f"problem kind must be one of {', '.join(KINDS)}, got '{kind}'")
