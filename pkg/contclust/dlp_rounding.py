"""
contclust - continuous clustering and facility location by round-or-cut.

This file handles rounding of the consolidated representative LP: padding the masses to an
integral total, pairwise shifting to a {1/2, 1} solution, and the forest rounding that opens
one level class of every tree.

.............................................................................
contclust was developed as a desk-scale testbed for ball-variable LP relaxations
     Original release October 2026

Licensed under the MIT license.

Be kind to each other.

"""

import logging
from dataclasses import dataclass, replace

import networkx as nx

from ._configs import SNAP_TOL, TAU_CUT
from .contclust_exceptions import ContclustException, InvariantBreach, CycleNotPair

logger = logging.getLogger(__name__)


####################################################################################################
#
#
@dataclass(frozen=True)
class DlpInput:
    """
    Consolidated LP over representatives.

    reps : client positions of the representatives
    weights : |child(j)| per representative
    neighbor : position (in ``reps``) of the nearest other representative s(j); a lone
        representative is its own neighbor
    dist : c_j = d(j, s(j))
    masses : z_j; the assignment is x_jj = z_j and x_s(j)j = 1 - z_j
    k : budget
    p : distance power of the objective

    """
    reps: tuple
    weights: tuple
    neighbor: tuple
    dist: tuple
    masses: tuple
    k: int
    p: int = 1

    def __len__(self):
        return len(self.reps)

    def unit_costs(self):
        return [w * c ** self.p for w, c in zip(self.weights, self.dist)]

    def cost(self):
        """sum_j w_j (1 - z_j) c_j^p"""
        return float(sum(wc * (1.0 - z) for wc, z in zip(self.unit_costs(), self.masses)))


@dataclass(frozen=True)
class DlpSolution:
    """
    Integral solution. ``opened`` and ``assignment`` hold positions in the input's ``reps``;
    every representative is assigned to itself or to its neighbor.

    """
    z: tuple
    opened: tuple
    assignment: tuple

    def cost(self, inp):
        return float(sum(wc for wc, i, a in zip(inp.unit_costs(), range(len(inp)), self.assignment) if a != i))


def _snap(z):
    if abs(z - 0.5) <= SNAP_TOL:
        return 0.5
    if z >= 1.0 - SNAP_TOL:
        return 1.0
    return z


def _is_fractional(z):
    return 0.5 < z < 1.0


def fractional_count(masses):
    """Number of masses strictly between 1/2 and 1; the progress measure of round_half."""
    return sum(1 for z in masses if _is_fractional(z))


####################################################################################################
#
#
def pad(inp):
    """
    Raises masses toward 1 until they sum to min(k, |reps|). The largest w_j c_j^p is lifted
    first, ties by position in ``reps`` (picking order).

    Parameters
    ----------
    inp : DlpInput
        Masses must sum to at most k.

    Returns
    -------
    DlpInput
        Same representatives with padded masses.

    """
    total = sum(inp.masses)
    if total > inp.k + 10 * TAU_CUT:
        raise ContclustException(f'masses sum to {total:.6g} which exceeds the budget k={inp.k}')

    deficit = min(inp.k, len(inp)) - total
    masses = list(inp.masses)
    unit = inp.unit_costs()
    for i in sorted(range(len(masses)), key=lambda i: (-unit[i], i)):
        if deficit <= 0:
            break
        lift = min(1.0 - masses[i], deficit)
        masses[i] += lift
        deficit -= lift

    return replace(inp, masses=tuple(_snap(z) for z in masses))


####################################################################################################
#
#
def round_half(inp):
    """
    Shifts mass between pairs of fractional representatives until every mass is 1/2 or 1.

    The representative with the smaller w_j c_j^p gives mass to the other, so the weighted
    cost never goes up, the total is unchanged, and masses already at 1 are never touched.
    Each pass makes at least one more mass integral.

    Parameters
    ----------
    inp : DlpInput
        Masses in [1/2, 1] with an integral total.

    Returns
    -------
    DlpInput
        Masses in {1/2, 1}.

    """
    masses = [_snap(z) for z in inp.masses]
    total = sum(masses)
    if abs(total - round(total)) > 1e-6 * max(1, len(masses)):
        raise ContclustException(f'masses must sum to an integer, got {total:.9g}')

    for i, z in enumerate(masses):
        if z < 0.5 - SNAP_TOL or z > 1.0 + SNAP_TOL:
            raise ContclustException(f'mass of representative {i} is {z:.6g}, outside [1/2, 1]')

    unit = inp.unit_costs()
    remaining = fractional_count(masses)

    while True:
        frac = [i for i, z in enumerate(masses) if _is_fractional(z)]
        if len(frac) < 2:
            break

        lo, hi = frac[0], frac[1]
        if unit[hi] < unit[lo]:
            lo, hi = hi, lo

        delta = min(masses[lo] - 0.5, 1.0 - masses[hi])
        masses[lo] = _snap(masses[lo] - delta)
        masses[hi] = _snap(masses[hi] + delta)

        now = fractional_count(masses)
        if now >= remaining:
            raise InvariantBreach('pairwise rounding made no progress')
        remaining = now

    for i, z in enumerate(masses):
        if _is_fractional(z):
            # the total is integral, so the last fractional mass sits on 1/2 or 1 up to rounding
            nearest = 0.5 if z < 0.75 else 1.0
            if abs(z - nearest) > 1e-6 * max(1, len(masses)):
                raise InvariantBreach(f'representative {i} kept fractional mass {z:.9g}')
            masses[i] = nearest

    return replace(inp, masses=tuple(masses))


####################################################################################################
#
#
def _levels(component, inp, forest):
    """
    Root and level of every member of a tree component. A component without a root contains
    exactly one mutual-nearest pair; its lower-indexed member j hangs below root s(j).

    """
    sub = forest.subgraph(component)
    roots = [i for i in component if sub.out_degree(i) == 0]

    if len(roots) == 1:
        root = roots[0]
    elif not roots:
        cycle = [u for u, _ in nx.find_cycle(sub, source=min(component))]
        if len(cycle) != 2:
            raise CycleNotPair(f'nearest-representative cycle of length {len(cycle)}: {sorted(cycle)}')
        j = min(cycle)
        root = inp.neighbor[j]
    else:
        raise InvariantBreach(f'component with {len(roots)} roots')

    tree = nx.DiGraph()
    tree.add_nodes_from(component)
    for i in component:
        parent = inp.neighbor[i]
        if i != root and parent in component:
            tree.add_edge(parent, i)

    return nx.single_source_shortest_path_length(tree, root)


def round_forest(inp):
    """
    Rounds {1/2, 1} masses to an integral solution with at most k open representatives.

    Mass-1 representatives are opened. The remaining ones point at their neighbor when the
    neighbor also has mass 1/2; this graph is a forest once one edge of every mutual-nearest
    pair is dropped. Opening either the even or the odd levels of a tree covers every member
    by itself or its neighbor. Every tree starts on its smaller level class, then trees move
    to the cheaper class while the budget allows.

    Parameters
    ----------
    inp : DlpInput
        Masses in {1/2, 1}.

    Returns
    -------
    DlpSolution

    """
    R = len(inp)
    ones = {i for i in range(R) if inp.masses[i] == 1.0}
    halves = [i for i in range(R) if i not in ones]

    for i in halves:
        if inp.masses[i] != 0.5:
            raise ContclustException(f'representative {i} has mass {inp.masses[i]}, expected 1/2 or 1')

    forest = nx.DiGraph()
    forest.add_nodes_from(halves)
    for i in halves:
        s = inp.neighbor[i]
        if s != i and s not in ones:
            forest.add_edge(i, s)

    unit = inp.unit_costs()
    components = sorted((sorted(c) for c in nx.weakly_connected_components(forest)), key=lambda c: c[0])

    options = []
    for comp in components:
        levels = _levels(comp, inp, forest)
        even = [i for i in comp if levels[i] % 2 == 0]
        odd = [i for i in comp if levels[i] % 2 == 1]
        sides = []
        for side in (even, odd):
            chosen = set(side)
            sides.append((len(side), sum(unit[i] for i in comp if i not in chosen), side))
        # smaller class first, then cheaper, then even
        sides.sort(key=lambda s: (s[0], s[1]))
        options.append(sides)

    budget = inp.k - len(ones) - sum(sides[0][0] for sides in options)
    if budget < 0:
        raise InvariantBreach(f'forest rounding needs {inp.k - budget} centers with k={inp.k}')

    pick = [0] * len(options)
    upgrades = []
    for idx, sides in enumerate(options):
        (size0, cost0, _), (size1, cost1, _) = sides
        if cost1 < cost0:
            upgrades.append((cost1 - cost0, idx, size1 - size0))
    for _, idx, extra in sorted(upgrades):
        if extra <= budget:
            pick[idx] = 1
            budget -= extra

    opened = set(ones)
    for sides, choice in zip(options, pick):
        opened.update(sides[choice][2])

    assignment = []
    for i in range(R):
        if i in opened:
            assignment.append(i)
        elif inp.neighbor[i] in opened:
            assignment.append(inp.neighbor[i])
        else:
            raise InvariantBreach(f'representative {i} and its neighbor are both closed')

    if len(opened) > inp.k:
        raise InvariantBreach(f'opened {len(opened)} representatives with k={inp.k}')

    logger.debug('forest rounding: %d trees, %d opened of %d representatives', len(options), len(opened), R)
    return DlpSolution(z=tuple(1 if i in opened else 0 for i in range(R)),
                       opened=tuple(sorted(opened)),
                       assignment=tuple(assignment))


def round_dlp(inp):
    """pad, round_half and round_forest in sequence."""
    return round_forest(round_half(pad(inp)))
