"""Zero-sum signed measures over a finite space and their transport norm.

The norm of a zero-sum vector is the least cost of moving its positive
part onto its negative part, with the distance as unit cost. Two
independent routes compute it:

* :func:`free_norm_primal` solves the transportation problem directly
  with a network simplex (northwest-corner start, Bland pivoting), and
  returns an optimal plan. Because distances satisfy the triangle
  inequality, shipping along direct arcs is optimal, so the bipartite
  formulation loses nothing.
* :func:`free_norm_dual` maximizes the pairing against the vector over
  all functions with difference quotients at most 1, as a linear
  program, and returns a maximizing function.

Strong duality makes the two values agree; their agreement on random
instances is part of the acceptance suite, so neither route may be
rewritten in terms of the other.

The unit ball of the span of the molecules is the convex hull of the
molecules and their negatives. All geometric questions about it are
answered by membership/feasibility linear programs; the polytope is
never enumerated.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence
from weakref import WeakKeyDictionary

import numpy as np
from scipy.optimize import linprog

from ._parallel import thread_map
from .errors import InvariantFailure, NotZeroSum, SpaceMismatch
from .lipschitz import LipschitzFunction
from .metric_core import PointedMetricSpace, PointPair

ZERO_SUM_REL = 1e-12
LP_FEAS_TOL = 1e-9
_LP_OPTIONS = {
    "primal_feasibility_tolerance": LP_FEAS_TOL,
    "dual_feasibility_tolerance": LP_FEAS_TOL,
}


@dataclass(frozen=True, eq=False)
class FreeVector:
    """A zero-sum real vector of point masses."""

    space: PointedMetricSpace
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float).copy()
        if c.shape != (self.space.n,):
            raise ValueError(f"expected {self.space.n} coefficients, got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        total = float(c.sum())
        if abs(total) > ZERO_SUM_REL * max(float(np.abs(c).sum()), 1e-300):
            raise NotZeroSum(total)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_point_masses(cls, space: PointedMetricSpace,
                          masses: dict[int, float]) -> "FreeVector":
        """Span of point evaluations, balanced at the base point.

        Any leftover total mass is placed on the base point, which does
        not change the vector's action on functions vanishing there.
        """
        c = np.zeros(space.n)
        for i, m in masses.items():
            c[int(i)] += float(m)
        c[space.base] -= c.sum()
        return cls(space, c)

    def __add__(self, other: "FreeVector") -> "FreeVector":
        self._check_same(other)
        return FreeVector(self.space, self.coeffs + other.coeffs)

    def __sub__(self, other: "FreeVector") -> "FreeVector":
        self._check_same(other)
        return FreeVector(self.space, self.coeffs - other.coeffs)

    def __mul__(self, a: float) -> "FreeVector":
        return FreeVector(self.space, self.coeffs * float(a))

    __rmul__ = __mul__

    def _check_same(self, other: "FreeVector") -> None:
        if other.space is not self.space:
            raise SpaceMismatch()


@dataclass(frozen=True)
class Molecule:
    """The normalized difference of two point evaluations."""

    space: PointedMetricSpace
    pair: PointPair

    def to_free_vector(self) -> FreeVector:
        c = np.zeros(self.space.n)
        scale = 1.0 / self.space.d(self.pair.x, self.pair.y)
        c[self.pair.x] = scale
        c[self.pair.y] = -scale
        return FreeVector(self.space, c)


def molecule(space: PointedMetricSpace, x: int, y: int) -> Molecule:
    return Molecule(space, PointPair(x, y))


def pairing(f: LipschitzFunction, mu: FreeVector) -> float:
    """Duality pairing: the sum of f(x) * mu(x)."""
    if f.space is not mu.space:
        raise SpaceMismatch()
    return float(np.dot(f.values, mu.coeffs))


class FlowResult(NamedTuple):
    value: float
    plan: tuple[tuple[int, int, float], ...]


class DualResult(NamedTuple):
    value: float
    maximizer: LipschitzFunction


# ---------------------------------------------------------------------------
# primal: transportation network simplex
# ---------------------------------------------------------------------------

_SIMPLEX_CAP = 200_000


def _northwest_corner(p: np.ndarray, q: np.ndarray):
    """Initial basic feasible plan with exactly m+n-1 basic cells."""
    m, n = p.size, q.size
    alloc = {}
    basis = []
    p_rem = p.copy()
    q_rem = q.copy()
    i = j = 0
    for _ in range(m + n - 1):
        a = min(p_rem[i], q_rem[j])
        basis.append((i, j))
        alloc[(i, j)] = a
        p_rem[i] -= a
        q_rem[j] -= a
        if i == m - 1 and j == n - 1:
            break
        if (p_rem[i] <= q_rem[j] and i < m - 1) or j == n - 1:
            i += 1
        else:
            j += 1
    return alloc, basis


def _tree_duals(basis, cost, m, n):
    """Node potentials from the basis tree, rooted at row 0 with u[0]=0."""
    u = np.full(m, np.nan)
    v = np.full(n, np.nan)
    by_row = [[] for _ in range(m)]
    by_col = [[] for _ in range(n)]
    for (i, j) in basis:
        by_row[i].append(j)
        by_col[j].append(i)
    u[0] = 0.0
    stack = [("r", 0)]
    while stack:
        kind, k = stack.pop()
        if kind == "r":
            for j in by_row[k]:
                if np.isnan(v[j]):
                    v[j] = cost[k, j] - u[k]
                    stack.append(("c", j))
        else:
            for i in by_col[k]:
                if np.isnan(u[i]):
                    u[i] = cost[i, k] - v[k]
                    stack.append(("r", i))
    if np.any(np.isnan(u)) or np.any(np.isnan(v)):
        raise InvariantFailure("transportation basis is not a spanning tree")
    return u, v


def _find_cycle(basis, enter, m):
    """Path in the basis tree from the entering arc's row to its column."""
    adj: dict[int, list[tuple[int, tuple[int, int]]]] = {}
    for (i, j) in basis:
        r, c = i, m + j
        adj.setdefault(r, []).append((c, (i, j)))
        adj.setdefault(c, []).append((r, (i, j)))
    start, goal = enter[0], m + enter[1]
    parent = {start: (None, None)}
    queue = [start]
    while queue:
        node = queue.pop(0)
        if node == goal:
            break
        for nxt, arc in adj.get(node, []):
            if nxt not in parent:
                parent[nxt] = (node, arc)
                queue.append(nxt)
    if goal not in parent:
        raise InvariantFailure("entering arc does not close a cycle")
    path_arcs = []
    node = goal
    while node != start:
        prev, arc = parent[node]
        path_arcs.append(arc)
        node = prev
    return path_arcs[::-1]  # from row-side to column-side


def _transport(p: np.ndarray, q: np.ndarray, cost: np.ndarray):
    """Optimal transportation plan by network simplex with Bland pivoting."""
    m, n = p.size, q.size
    alloc, basis = _northwest_corner(p, q)
    pivot_eps = 1e-13 * (1.0 + float(cost.max(initial=0.0)))
    basis_set = set(basis)
    for _ in range(_SIMPLEX_CAP):
        u, v = _tree_duals(basis, cost, m, n)
        reduced = cost - u[:, None] - v[None, :]
        entering = None
        flat = np.flatnonzero(reduced.ravel() < -pivot_eps)
        for f in flat:  # Bland: smallest index first
            cand = (int(f) // n, int(f) % n)
            if cand not in basis_set:
                entering = cand
                break
        if entering is None:
            break
        path = _find_cycle(basis, entering, m)
        # entering arc is +; arcs along the tree path alternate -, +, -, ...
        minus_arcs = path[0::2]
        theta = min(alloc[a] for a in minus_arcs)
        leaving = min(a for a in minus_arcs if alloc[a] == theta)
        for k, a in enumerate(path):
            alloc[a] += theta if k % 2 else -theta
        alloc[entering] = theta
        alloc.pop(leaving)
        basis[basis.index(leaving)] = entering
        basis_set.discard(leaving)
        basis_set.add(entering)
    else:
        raise InvariantFailure("transportation simplex exceeded its pivot cap")
    value = float(sum(a * cost[i, j] for (i, j), a in alloc.items()))
    return value, alloc


def free_norm_primal(mu: FreeVector) -> FlowResult:
    """Transport norm via min-cost flow from positive to negative part.

    Returns the optimal value and one optimal plan as (source point,
    target point, mass) triples sorted by index.
    """
    c = mu.coeffs
    pos = np.flatnonzero(c > 0)
    neg = np.flatnonzero(c < 0)
    if pos.size == 0 or neg.size == 0:
        return FlowResult(0.0, ())
    p = c[pos].astype(float)
    q = -c[neg].astype(float)
    cost = mu.space.dist[np.ix_(pos, neg)]
    value, alloc = _transport(p, q, cost)
    plan = tuple(
        sorted(
            (int(pos[i]), int(neg[j]), float(a))
            for (i, j), a in alloc.items()
            if a > 0.0
        )
    )
    return FlowResult(value, plan)


# ---------------------------------------------------------------------------
# dual: Lipschitz-constrained maximization LP
# ---------------------------------------------------------------------------

def _pair_constraint_matrix(n: int, base: int) -> np.ndarray:
    """Rows f(i) - f(j) <= d(i,j) over ordered pairs, base column removed."""
    rows = []
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            row = np.zeros(n)
            row[i] += 1.0
            row[j] -= 1.0
            rows.append(row)
    a = np.array(rows)
    return np.delete(a, base, axis=1)


def free_norm_dual(mu: FreeVector) -> DualResult:
    """Transport norm as the best pairing against a 1-Lipschitz function.

    Maximizes sum f * mu subject to f(i) - f(j) <= d(i,j) for all ordered
    pairs, with f pinned to 0 at the base point. Returns the value and
    one maximizer.
    """
    space = mu.space
    n = space.n
    a_ub = _pair_constraint_matrix(n, space.base)
    b_ub = np.array([space.d(i, j) for i in range(n) for j in range(n) if i != j])
    obj = -np.delete(mu.coeffs, space.base)
    res = linprog(obj, A_ub=a_ub, b_ub=b_ub, bounds=(None, None),
                  method="highs", options=_LP_OPTIONS)
    if res.status != 0:
        raise InvariantFailure(f"dual norm LP failed with status {res.status}")
    values = np.insert(res.x, space.base, 0.0)
    return DualResult(-float(res.fun), LipschitzFunction(space, values))


def molecule_distance(a: Molecule, b: Molecule) -> float:
    """Transport norm of the difference of two molecules."""
    if a.space is not b.space:
        raise SpaceMismatch()
    return free_norm_primal(a.to_free_vector() - b.to_free_vector()).value


# ---------------------------------------------------------------------------
# vertex oracle and norming sets
# ---------------------------------------------------------------------------

FACE_PAIRING_TOL = 1e-9


def _ordered_pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    grid = ~np.eye(n, dtype=bool)
    u, v = np.nonzero(grid)
    return u, v


def exposing_function(space: PointedMetricSpace, pair: PointPair) -> np.ndarray:
    """The norm-one function (d(., y) - d(., x)) / 2, which pairs to
    exactly 1 with the pair's molecule."""
    return 0.5 * (space.dist[:, pair.y] - space.dist[:, pair.x])


def face_support_mask(h: np.ndarray, u: np.ndarray, v: np.ndarray,
                      d_uv: np.ndarray) -> np.ndarray:
    """Columns allowed to carry weight in a convex combination equal to
    the molecule exposed by h.

    Any convex combination of points pairing at most 1 with h can itself
    pair to 1 only if every support point pairs to exactly 1, so columns
    pairing strictly below 1 are dropped. True support columns pair to 1
    in exact arithmetic; the threshold only absorbs rounding.
    """
    with np.errstate(divide="ignore", invalid="ignore"):
        pairing = np.where(d_uv > 0, (h[u] - h[v]) / d_uv, 0.0)
    return pairing >= 1.0 - FACE_PAIRING_TOL


def _molecule_rhs(space: PointedMetricSpace, pair: PointPair) -> np.ndarray:
    b = np.zeros(space.n + 1)
    s = 1.0 / space.d(pair.x, pair.y)
    b[pair.x] = s
    b[pair.y] = -s
    b[space.n] = 1.0
    return b


class ExtremeResult(NamedTuple):
    is_extreme: bool
    certificate: tuple[tuple[tuple[int, int], float], ...] | None


def _vertex_test(space, pair) -> ExtremeResult:
    """Feasibility LP: is the pair's molecule a convex combination of the
    other molecules (negatives included via the reversed pairs)?

    Candidates are first restricted to the face exposed by the pair's
    distance-difference function, which preserves the decision exactly
    and keeps the LP small.
    """
    n = space.n
    u, v = _ordered_pairs(n)
    d_uv = space.dist[u, v]
    keep = face_support_mask(exposing_function(space, pair), u, v, d_uv)
    keep &= ~((u == pair.x) & (v == pair.y))
    idx = np.flatnonzero(keep)
    if idx.size == 0:
        return ExtremeResult(True, None)
    uk, vk, dk = u[idx], v[idx], d_uv[idx]
    cols = np.zeros((n + 1, idx.size))
    cols[uk, np.arange(idx.size)] = 1.0 / dk
    cols[vk, np.arange(idx.size)] -= 1.0 / dk
    cols[n, :] = 1.0
    res = linprog(np.zeros(idx.size), A_eq=cols, b_eq=_molecule_rhs(space, pair),
                  bounds=(0.0, None), method="highs", options=_LP_OPTIONS)
    if res.status == 2:
        return ExtremeResult(True, None)
    if res.status != 0:
        raise InvariantFailure(f"vertex LP failed with status {res.status}")
    support = [
        ((int(uk[k]), int(vk[k])), float(w))
        for k, w in enumerate(res.x) if w > 1e-10
    ]
    return ExtremeResult(False, tuple(support))


def is_extreme_molecule(space: PointedMetricSpace, pair: PointPair) -> ExtremeResult:
    """Vertex test for a molecule on the unit ball polytope.

    The ball is the convex hull of all molecules and their negatives, so
    the molecule is a vertex exactly when it is not a convex combination
    of the others; the test is a feasibility LP, and the combination is
    returned as a certificate in the negative case.
    """
    return _vertex_test(space, pair)


_extreme_cache: WeakKeyDictionary = WeakKeyDictionary()


def extreme_molecules(space: PointedMetricSpace) -> list[PointPair]:
    """All pairs (canonical order x < y) whose molecule is a vertex.

    Never empty: a polytope has vertices and every vertex of the ball is
    itself a molecule or the negative of one. Results are cached per
    space instance (spaces are immutable).
    """
    cached = _extreme_cache.get(space)
    if cached is not None:
        return list(cached)
    candidates = list(space.pairs())
    results = thread_map(lambda pr: _vertex_test(space, pr), candidates)
    found = [pr for pr, res in zip(candidates, results) if res.is_extreme]
    if not found:
        raise InvariantFailure("polytope reported no vertices")
    _extreme_cache[space] = list(found)
    return found


class NormingResult(NamedTuple):
    is_norming: bool
    failing_vertex: PointPair | None


def is_norming(space: PointedMetricSpace, pairs: Sequence[PointPair]) -> NormingResult:
    """Does the hull of +-molecules over the given pairs contain every
    vertex of the full unit ball?

    Checked by one membership LP per vertex; the first vertex outside
    the hull is reported in the negative case.
    """
    if not pairs:
        raise ValueError("the pair set must be nonempty")
    n = space.n
    signed: list[tuple[int, int]] = []
    for pr in pairs:
        signed.append(pr.as_tuple())
        signed.append((pr.y, pr.x))
    u = np.array([s[0] for s in signed])
    v = np.array([s[1] for s in signed])
    d_uv = space.dist[u, v]

    def member(vertex: PointPair) -> bool:
        keep = face_support_mask(exposing_function(space, vertex), u, v, d_uv)
        idx = np.flatnonzero(keep)
        if idx.size == 0:
            return False
        cols = np.zeros((n + 1, idx.size))
        cols[u[idx], np.arange(idx.size)] = 1.0 / d_uv[idx]
        cols[v[idx], np.arange(idx.size)] -= 1.0 / d_uv[idx]
        cols[n, :] = 1.0
        res = linprog(np.zeros(idx.size), A_eq=cols,
                      b_eq=_molecule_rhs(space, vertex),
                      bounds=(0.0, None), method="highs", options=_LP_OPTIONS)
        if res.status == 2:
            return False
        if res.status != 0:
            raise InvariantFailure(f"norming LP failed with status {res.status}")
        return True

    vertices = extreme_molecules(space)
    results = thread_map(member, vertices)
    for vertex, ok in zip(vertices, results):
        if not ok:
            return NormingResult(False, vertex)
    return NormingResult(True, None)
