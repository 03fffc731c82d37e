"""
contclust - continuous clustering and facility location by round-or-cut.

This file handles the graph-to-l_inf reduction for lambda-UFL: embedding a graph's vertices
as clients, building the four-facility solution from an independent 4-partition, the greedy
matching bound, and the (partial) soundness checks.

.............................................................................
contclust was developed as a desk-scale testbed for ball-variable LP relaxations
     Original release October 2026

Licensed under the MIT license.

Be kind to each other.

"""

import logging
from dataclasses import dataclass

import networkx as nx
import numpy as np

from ._configs import ENUMERATION_BUDGET
from .contclust_exceptions import ContclustException, InvariantBreach, NotIndependent
from .core_metric import MetricInstance, ProblemSpec, instance_from_points, validate_metric
from .oracle import exact_solve

logger = logging.getLogger(__name__)

PARTS = 4


####################################################################################################
#
#
@dataclass(frozen=True)
class Graph:
    """
    Simple undirected graph on vertices 0..n-1. Every edge is stored once, oriented from the
    lower to the higher vertex index, and edges are kept sorted.

    """
    n: int
    edges: tuple

    @classmethod
    def from_edges(cls, edges, n=None):
        oriented = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ContclustException(f'self-loop at vertex {u}')
            if u < 0 or v < 0:
                raise ContclustException(f'negative vertex index in edge ({u},{v})')
            oriented.add((min(u, v), max(u, v)))

        top = max((v for _, v in oriented), default=-1) + 1
        if n is None:
            n = top
        elif n < top:
            raise ContclustException(f'edge endpoint {top - 1} is outside a graph on {n} vertices')

        return cls(n=int(n), edges=tuple(sorted(oriented)))

    @property
    def vertices(self):
        return tuple(range(self.n))

    def to_networkx(self):
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return g

    def is_independent(self, vertices):
        return not any(self.to_networkx().subgraph(vertices).edges)


@dataclass(frozen=True, eq=False)
class EmbeddedInstance:
    """
    The reduction's l_inf instance.

    points : client coordinates A(v), one column per edge, entries in {-2, 0, 2}
    facilities : extra candidate points (rows), possibly empty
    eps : the reduction parameter
    instance : materialized metric; clients are points 0..n-1, candidates are all points

    """
    points: np.ndarray
    facilities: np.ndarray
    eps: float
    instance: MetricInstance

    @property
    def lam(self):
        return self.eps * self.points.shape[0]

    @property
    def spec(self):
        return ProblemSpec.ufl(self.lam)


####################################################################################################
#
#
def client_points(G):
    """A(v)(e) = 2 if v is the tail of e, -2 if v is its head, 0 otherwise."""
    A = np.zeros((G.n, len(G.edges)))
    for e, (u, v) in enumerate(G.edges):
        A[u, e] = 2.0
        A[v, e] = -2.0
    return A


def embed(G, eps, facilities=None):
    """
    Embeds ``G`` as a lambda-UFL instance in l_inf with lambda = eps * n.

    Adjacent vertices end up at distance 4, all other pairs at distance at most 2; both
    facts and the metric axioms are checked on the materialized matrix.

    Parameters
    ----------
    G : Graph

    eps : float
        In (0, 1).

    facilities : array or None
        Extra candidate points appended after the clients.

    Returns
    -------
    EmbeddedInstance

    """
    if not 0 < eps < 1:
        raise ContclustException(f'eps must lie in (0, 1), got {eps}')
    if not G.edges:
        raise ContclustException('the graph needs at least one edge')

    A = client_points(G)
    extra = np.zeros((0, A.shape[1])) if facilities is None else np.atleast_2d(np.asarray(facilities, dtype=float))
    inst = instance_from_points(np.vstack([A, extra]), norm='inf', clients=range(G.n))

    problems = validate_metric(inst)
    if problems:
        raise InvariantBreach(f'embedded instance is not a metric: {problems[0]}')

    cd = inst.client_dist
    adjacent = np.zeros((G.n, G.n), dtype=bool)
    for u, v in G.edges:
        adjacent[u, v] = adjacent[v, u] = True
    off = ~np.eye(G.n, dtype=bool)
    if not np.all(cd[adjacent] == 4.0) or np.any(cd[off & ~adjacent] > 2.0):
        raise InvariantBreach('embedded distances do not separate edges (4) from non-edges (<= 2)')

    return EmbeddedInstance(points=A, facilities=extra, eps=float(eps), instance=inst)


####################################################################################################
#
#
@dataclass(frozen=True)
class CompletenessResult:
    """
    facilities : the points s_1..s_4 (rows)
    distances : d(A(v), s_i), shape (n, 4)
    connection, opening, cost : cost split of opening all four facilities
    bound : (1 + 6 eps) n
    size_condition : every part has at least (1 - eps) n / 4 vertices

    """
    facilities: np.ndarray
    distances: np.ndarray
    connection: float
    opening: float
    cost: float
    bound: float
    size_condition: bool


def _padded_parts(G, parts):
    parts = [sorted(int(v) for v in part) for part in parts]
    if len(parts) > PARTS:
        raise ContclustException(f'at most {PARTS} parts, got {len(parts)}')
    parts = parts + [[] for _ in range(PARTS - len(parts))]

    seen = set()
    for i, part in enumerate(parts):
        for v in part:
            if not 0 <= v < G.n:
                raise ContclustException(f'vertex {v} in part {i} is not in the graph')
            if v in seen:
                raise ContclustException(f'vertex {v} appears in two parts')
            seen.add(v)
        if not G.is_independent(part):
            raise NotIndependent(f'part {i} contains an edge')
    return parts


def facility_points(G, parts):
    """s_i(e) = 1 if the tail of e is in V_i, -1 if the head is, 0 otherwise."""
    S = np.zeros((PARTS, len(G.edges)))
    member = {v: i for i, part in enumerate(parts) for v in part}
    for e, (u, v) in enumerate(G.edges):
        if u in member:
            S[member[u], e] = 1.0
        if v in member:
            S[member[v], e] = -1.0
    return S


def completeness_solution(G, parts, eps):
    """
    Opens the four facilities s_1..s_4 built from an independent partition and prices it.

    Own-part clients are within distance 1 of their facility, every other client within 3.
    When every part holds at least (1 - eps) n / 4 vertices, the total cost is checked to be
    at most (1 + 6 eps) n.

    Parameters
    ----------
    G : Graph

    parts : list of vertex lists
        Up to four pairwise disjoint independent sets; missing parts are empty.

    eps : float

    Returns
    -------
    CompletenessResult

    Raises
    ------
    NotIndependent
        When a part contains an edge.

    """
    parts = _padded_parts(G, parts)
    A = client_points(G)
    S = facility_points(G, parts)
    n = G.n
    lam = eps * n

    dist = np.abs(A[:, None, :] - S[None, :, :]).max(axis=2) if A.shape[1] else np.zeros((n, PARTS))

    for i, part in enumerate(parts):
        for v in part:
            if dist[v, i] > 1.0:
                raise InvariantBreach(f'vertex {v} is at distance {dist[v, i]:g} > 1 from its own facility {i}')
    if np.any(dist > 3.0):
        raise InvariantBreach('a client is farther than 3 from some facility')

    connection = float(dist.min(axis=1).sum())
    opening = PARTS * lam
    cost = connection + opening
    bound = (1.0 + 6.0 * eps) * n
    size_condition = all(len(part) >= (1.0 - eps) * n / PARTS for part in parts)

    if size_condition:
        if connection > (1.0 + 2.0 * eps) * n + 1e-9:
            raise InvariantBreach(f'connection cost {connection:g} exceeds (1 + 2 eps) n = {(1 + 2 * eps) * n:g}')
        if cost > bound + 1e-9:
            raise InvariantBreach(f'completeness cost {cost:g} exceeds (1 + 6 eps) n = {bound:g}')

    return CompletenessResult(facilities=S, distances=dist, connection=connection, opening=opening, cost=cost,
                              bound=bound, size_condition=size_condition)


####################################################################################################
#
#
def greedy_matching(G, W, eps_prime=None, no_large_is=False):
    """
    Greedy maximal matching inside G[W], edges taken in sorted order.

    When the caller certifies (``no_large_is``) that G has no independent set of eps' n
    vertices, the matching is checked to have at least (|W| - eps' n) / 2 edges.

    Returns
    -------
    list of (u, v) edges

    """
    W = sorted(set(int(v) for v in W))
    sub = nx.Graph()
    sub.add_nodes_from(W)
    sub.add_edges_from(sorted(e for e in G.edges if e[0] in sub and e[1] in sub))
    matching = sorted(tuple(sorted(e)) for e in nx.maximal_matching(sub))

    if no_large_is:
        if eps_prime is None:
            raise ContclustException("'eps_prime' is required when 'no_large_is' is set")
        if len(matching) < (len(W) - eps_prime * G.n) / 2.0:
            raise InvariantBreach(f'matching of size {len(matching)} in a set of {len(W)} vertices although G has '
                                  f'no independent set of {eps_prime * G.n:g} vertices')
    return matching


def matching_lower_bound(G, clusters, eps):
    """
    Lower bound on the cost of any solution whose clusters are ``clusters``: one opening
    cost eps*n per nonempty cluster plus 4 per matched edge inside each cluster (two
    adjacent clients are 4 apart, so together they pay at least 4 to any shared center).

    """
    lam = eps * G.n
    total = 0.0
    for cluster in clusters:
        if len(cluster) == 0:
            continue
        total += lam + 4.0 * len(greedy_matching(G, cluster))
    return total


@dataclass(frozen=True)
class SoundnessReport:
    """Exact lambda-UFL optimum over a restricted candidate set; a partial check only."""
    restricted_opt: float
    threshold: float
    candidates: int
    label: str = 'partial'

    @property
    def passed(self):
        return self.restricted_opt >= self.threshold


def restricted_soundness_check(G, eps, parts=None, budget=ENUMERATION_BUDGET):
    """
    Exact optimum restricted to clients, the s-points of ``parts`` (when given) and the
    coordinate-wise medians of all clients and of every part, compared with (2 - eps) n.

    Raises TooLarge when the enumeration exceeds ``budget``.

    """
    A = client_points(G)
    extra = [np.median(A, axis=0)]
    if parts is not None:
        padded = _padded_parts(G, parts)
        extra.extend(facility_points(G, padded))
        extra.extend(np.median(A[part], axis=0) for part in padded if part)

    extra = np.unique(np.vstack(extra), axis=0)
    emb = embed(G, eps, facilities=extra)
    result = exact_solve(emb.instance, emb.spec, budget=budget)
    threshold = (2.0 - eps) * G.n
    logger.info('restricted optimum %.6g against (2 - eps) n = %.6g over %d candidates', result.value, threshold,
                len(emb.instance.candidate_points))
    return SoundnessReport(restricted_opt=result.value, threshold=threshold,
                           candidates=len(emb.instance.candidate_points))


####################################################################################################
#
#
def planted_partition_graph(n, edge_prob=0.5, seed=0):
    """
    Random graph with a planted independent 4-partition: vertex v belongs to part v mod 4
    and every pair from different parts is an edge with probability ``edge_prob``. At least
    one edge is always present.

    Returns
    -------
    tuple
        (Graph, list of four parts)

    """
    if n < 2:
        raise ContclustException('a planted partition graph needs at least 2 vertices')

    rng = np.random.default_rng(seed)
    parts = [list(range(i, n, PARTS)) for i in range(PARTS)]
    edges = [(u, v) for u in range(n) for v in range(u + 1, n)
             if u % PARTS != v % PARTS and rng.random() < edge_prob]
    if not edges:
        edges = [(0, 1)]
    return Graph.from_edges(edges, n=n), parts
