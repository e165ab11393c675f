"""Base-preserving Lipschitz maps and isometry certification.

A map is a total image table between two spaces. Composition against
functions and the induced push-forward on zero-sum vectors are adjoint
to each other, which is why the operator norm of the composition
operator equals the Lipschitz constant of the map.

Two independent certification algorithms decide whether composition
against a norm-one map preserves every function's norm:

* the dual route searches, for every extreme molecule pair (x, y) of
  the codomain, for a preimage pair realizing the same distance;
* the primal route checks, vertex by vertex, that the codomain unit
  ball is contained in the push-forward image of the domain unit ball,
  by LP feasibility over convex combinations of pushed molecules.

The two routes are provably equivalent, so the ``both`` method fails
loudly on disagreement: that outcome falsifies the implementation,
never the mathematics.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, NamedTuple, Sequence

import numpy as np
from scipy.optimize import linprog

from ._parallel import thread_map
from .errors import (
    BasePointNotPreserved,
    InvariantFailure,
    MapNormExceedsOne,
    MethodDisagreement,
    NotNorming,
    SpaceMismatch,
)
from .freespace import (
    FreeVector,
    exposing_function,
    extreme_molecules,
    face_support_mask,
    is_norming,
)
from .lipschitz import LipschitzFunction
from .metric_core import PointedMetricSpace, PointPair, intermediate_points

PRIMAL_FEAS_TOL = 1e-8
_PRIMAL_OPTIONS = {
    "primal_feasibility_tolerance": PRIMAL_FEAS_TOL,
    "dual_feasibility_tolerance": PRIMAL_FEAS_TOL,
}


class MapNorm(NamedTuple):
    value: float
    witness: tuple[int, int] | None


@dataclass(frozen=True, eq=False)
class LipschitzMap:
    """A base-preserving map given by one codomain index per domain point."""

    domain: PointedMetricSpace
    codomain: PointedMetricSpace
    image: tuple[int, ...]

    def __post_init__(self):
        img = tuple(int(i) for i in self.image)
        if len(img) != self.domain.n:
            raise ValueError(f"image table must have {self.domain.n} entries")
        if any(not (0 <= i < self.codomain.n) for i in img):
            raise ValueError("image table contains out-of-range indices")
        if img[self.domain.base] != self.codomain.base:
            raise BasePointNotPreserved(img[self.domain.base], self.codomain.base)
        object.__setattr__(self, "image", img)

    def __call__(self, x: int) -> int:
        return self.image[x]

    def norm_with_witness(self) -> MapNorm:
        img = np.asarray(self.image)
        dn = self.domain.dist
        dm = self.codomain.dist[np.ix_(img, img)]
        with np.errstate(divide="ignore", invalid="ignore"):
            q = dm / dn
        q[np.eye(self.domain.n, dtype=bool)] = -1.0
        flat = int(np.argmax(q))
        i, j = divmod(flat, self.domain.n)
        value = float(q[i, j])
        if value <= 0.0:
            return MapNorm(0.0, None)
        return MapNorm(value, (min(i, j), max(i, j)))


def identity_map(space: PointedMetricSpace) -> LipschitzMap:
    return LipschitzMap(space, space, tuple(range(space.n)))


def compose_maps(outer: LipschitzMap, inner: LipschitzMap) -> LipschitzMap:
    """The map sending x to outer(inner(x))."""
    if inner.codomain is not outer.domain:
        raise SpaceMismatch("inner map's codomain is not the outer map's domain")
    return LipschitzMap(inner.domain, outer.codomain,
                        tuple(outer.image[i] for i in inner.image))


def operator_norm(phi: LipschitzMap) -> float:
    """Lipschitz constant of the map, which equals the operator norm of
    composition against it (adjointness)."""
    return phi.norm_with_witness().value


def push_forward(phi: LipschitzMap, mu: FreeVector) -> FreeVector:
    """Image of a zero-sum vector under the map's linearization.

    Coefficients are aggregated over fibers; the zero sum is preserved
    and the operation is linear in the vector.
    """
    if mu.space is not phi.domain:
        raise SpaceMismatch("vector does not live over the map's domain")
    out = np.zeros(phi.codomain.n)
    np.add.at(out, np.asarray(phi.image), mu.coeffs)
    return FreeVector(phi.codomain, out)


def compose(phi: LipschitzMap, f: LipschitzFunction) -> LipschitzFunction:
    """Pull a function on the codomain back along the map."""
    if f.space is not phi.codomain:
        raise SpaceMismatch("function does not live over the map's codomain")
    img = np.asarray(phi.image)
    values = f.values[img] - f.values[phi.image[phi.domain.base]]
    return LipschitzFunction(phi.domain, values, normalize=False)


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IsometryCertificate:
    """Outcome of one certification run.

    A negative verdict always carries a failing pair. A positive dual
    verdict carries one preimage witness per checked pair. ``scope``
    records whether the pair set decides both directions (the default,
    all extreme molecules) or only suffices for the positive direction
    (a caller-supplied norming set).
    """

    verdict: str  # "isometric" | "not_isometric"
    method: str  # "dual_preimage" | "primal_polytope"
    scope: str = "necessary_and_sufficient"
    witnesses: tuple[dict[str, Any], ...] = ()
    failing_pair: tuple[int, int] | None = None
    tolerances: dict[str, float] = field(default_factory=dict)
    notes: str = ""

    @property
    def isometric(self) -> bool:
        return self.verdict == "isometric"

    def to_dict(self) -> dict[str, Any]:
        return {
            "verdict": self.verdict,
            "method": self.method,
            "scope": self.scope,
            "witnesses": list(self.witnesses),
            "failing_pair": list(self.failing_pair) if self.failing_pair else None,
            "tolerances": dict(self.tolerances),
            "notes": self.notes,
        }


@dataclass(frozen=True)
class AgreementReport:
    """Both certificates from a ``method=both`` run, with equal verdicts."""

    verdict: str
    dual: IsometryCertificate
    primal: IsometryCertificate

    @property
    def isometric(self) -> bool:
        return self.verdict == "isometric"

    def to_dict(self) -> dict[str, Any]:
        return {
            "verdict": self.verdict,
            "dual": self.dual.to_dict(),
            "primal": self.primal.to_dict(),
        }


def _cert_tol(phi: LipschitzMap) -> float:
    return max(phi.domain.tol, phi.codomain.tol)


def _check_map_norm(phi: LipschitzMap, tol: float) -> MapNorm:
    norm = phi.norm_with_witness()
    if norm.value > 1.0 + tol:
        raise MapNormExceedsOne(norm.value, norm.witness)
    return norm


def _first_extreme_by_betweenness(space: PointedMetricSpace) -> PointPair:
    # representative only; verdicts never depend on this shortcut
    for pair in space.pairs():
        if not intermediate_points(space, pair):
            return pair
    raise InvariantFailure("no strict pair found in a validated space")


def _norm_deficit_certificate(phi: LipschitzMap, norm: MapNorm, method: str,
                              tol: float) -> IsometryCertificate:
    return IsometryCertificate(
        verdict="not_isometric",
        method=method,
        failing_pair=_first_extreme_by_betweenness(phi.codomain).as_tuple(),
        tolerances={"tol_metric": tol},
        notes=f"operator norm {norm.value!r} is strictly below one",
    )


def certify_isometry_dual(
    phi: LipschitzMap,
    pairs: Sequence[PointPair] | None = None,
    tol: float | None = None,
) -> IsometryCertificate:
    """Preimage-distance criterion over a norming pair set.

    For every pair (x, y) in the set (default: all extreme molecule
    pairs of the codomain) a preimage pair (x', y') with equal distance
    up to the metric tolerance must exist; since the map is norm-one,
    d(x', y') >= d(x, y) always, so the bound is the attained form of
    the ratio-one condition. With the default pair set the verdict is
    conclusive in both directions; a caller-supplied set must be
    norming, and then only the positive direction is conclusive.
    """
    if tol is None:
        tol = _cert_tol(phi)
    norm = _check_map_norm(phi, tol)
    if norm.value < 1.0 - tol:
        return _norm_deficit_certificate(phi, norm, "dual_preimage", tol)

    codomain = phi.codomain
    if pairs is None:
        pair_list = extreme_molecules(codomain)
        scope = "necessary_and_sufficient"
    else:
        pair_list = list(pairs)
        norming = is_norming(codomain, pair_list)
        if not norming.is_norming:
            raise NotNorming(norming.failing_vertex.as_tuple())
        scope = "sufficient_only"

    img = np.asarray(phi.image)
    witnesses = []
    for pair in pair_list:
        xs = np.flatnonzero(img == pair.x)
        ys = np.flatnonzero(img == pair.y)
        if xs.size == 0 or ys.size == 0:
            return IsometryCertificate(
                verdict="not_isometric", method="dual_preimage", scope=scope,
                failing_pair=pair.as_tuple(),
                tolerances={"tol_metric": tol},
                notes="pair has no preimage on one side",
            )
        block = phi.domain.dist[np.ix_(xs, ys)]
        k = int(np.argmin(block))
        i, j = divmod(k, ys.size)
        best = float(block[i, j])
        target = codomain.d(pair.x, pair.y)
        if best > target + tol:
            return IsometryCertificate(
                verdict="not_isometric", method="dual_preimage", scope=scope,
                failing_pair=pair.as_tuple(),
                tolerances={"tol_metric": tol},
                notes=f"best preimage distance {best!r} exceeds {target!r}",
            )
        witnesses.append({
            "pair": pair.as_tuple(),
            "preimage": (int(xs[i]), int(ys[j])),
            "codomain_distance": target,
            "domain_distance": best,
        })
    return IsometryCertificate(
        verdict="isometric", method="dual_preimage", scope=scope,
        witnesses=tuple(witnesses), tolerances={"tol_metric": tol},
    )


def certify_isometry_primal(
    phi: LipschitzMap, tol: float | None = None
) -> IsometryCertificate:
    """Polytope-containment criterion, vertex by vertex.

    Composition against the map is isometric exactly when the
    push-forward image of the domain unit ball covers the codomain unit
    ball; both balls are polytopes, so it is enough to reach every
    extreme molecule of the codomain by a convex combination of pushed
    domain molecules (an LP feasibility problem per vertex).
    """
    if tol is None:
        tol = _cert_tol(phi)
    norm = _check_map_norm(phi, tol)
    if norm.value < 1.0 - tol:
        return _norm_deficit_certificate(phi, norm, "primal_polytope", tol)

    domain, codomain = phi.domain, phi.codomain
    n_dom, n_cod = domain.n, codomain.n
    grid = ~np.eye(n_dom, dtype=bool)
    u, v = np.nonzero(grid)
    d_uv = domain.dist[u, v]
    img = np.asarray(phi.image)
    img_u, img_v = img[u], img[v]

    vertices = extreme_molecules(codomain)

    def reachable(vertex: PointPair) -> bool:
        # only pushed molecules on the face exposed by the vertex can carry
        # weight; pairing 1 is exact for true support, so filtering is safe
        h = exposing_function(codomain, vertex)
        keep = face_support_mask(h, img_u, img_v, d_uv)
        idx = np.flatnonzero(keep)
        if idx.size == 0:
            return False
        cols = np.zeros((n_cod + 1, idx.size))
        ar = np.arange(idx.size)
        np.add.at(cols, (img_u[idx], ar), 1.0 / d_uv[idx])
        np.add.at(cols, (img_v[idx], ar), -1.0 / d_uv[idx])
        cols[n_cod, :] = 1.0
        b = np.zeros(n_cod + 1)
        s = 1.0 / codomain.d(vertex.x, vertex.y)
        b[vertex.x] = s
        b[vertex.y] = -s
        b[n_cod] = 1.0
        res = linprog(np.zeros(idx.size), A_eq=cols, b_eq=b,
                      bounds=(0.0, None), method="highs", options=_PRIMAL_OPTIONS)
        if res.status == 2:
            return False
        if res.status != 0:
            raise InvariantFailure(f"primal vertex LP failed with status {res.status}")
        return True

    results = thread_map(reachable, vertices)
    for vertex, ok in zip(vertices, results):
        if not ok:
            return IsometryCertificate(
                verdict="not_isometric", method="primal_polytope",
                failing_pair=vertex.as_tuple(),
                tolerances={"tol_metric": tol, "lp_feasibility": PRIMAL_FEAS_TOL},
                notes="codomain vertex is outside the pushed unit ball",
            )
    return IsometryCertificate(
        verdict="isometric", method="primal_polytope",
        witnesses=tuple({"pair": v.as_tuple()} for v in vertices),
        tolerances={"tol_metric": tol, "lp_feasibility": PRIMAL_FEAS_TOL},
    )


def certify_isometry(
    phi: LipschitzMap,
    method: str = "both",
    pairs: Sequence[PointPair] | None = None,
    tol: float | None = None,
):
    """Run one or both certifiers; with ``both``, verdicts must agree.

    Disagreement raises :class:`MethodDisagreement` carrying both
    certificates; it indicates an implementation bug and is surfaced
    loudly rather than resolved silently.
    """
    if method == "dual":
        return certify_isometry_dual(phi, pairs=pairs, tol=tol)
    if method == "primal":
        return certify_isometry_primal(phi, tol=tol)
    if method != "both":
        raise ValueError(f"unknown certification method {method!r}")
    dual = certify_isometry_dual(phi, pairs=pairs, tol=tol)
    primal = certify_isometry_primal(phi, tol=tol)
    if dual.verdict != primal.verdict:
        raise MethodDisagreement(dual, primal)
    return AgreementReport(dual.verdict, dual, primal)
