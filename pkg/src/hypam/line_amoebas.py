"""Amoebas of projective lines.

A line in Q has empty amoeba (its points are all boundary points); a line
tangent to Q has a horosphere; a line meeting Q in two points (alpha_i, beta_i)
has a cylinder about the geodesic beta_1 beta_2, degenerating to the
geodesic itself when alpha_2 is antipodal to alpha_1.
"""
import logging
from dataclasses import dataclass, field
from typing import ClassVar, Dict, List, Sequence, Tuple

import numpy as np
from scipy.optimize import least_squares

from hypam.core_proj import (CP1Point, Line, ProjPoint, QKind, QuadricPoint, _rank_one_data,
                             left_mul, p_real_involution, right_mul, spherical_distance)
from hypam.errors import EmptyAmoeba, InputError, InternalConsistencyError
from hypam.hyperbolic import (AbsPoint, HPoint, busemann, dist_to_geodesic, fibonacci_sphere,
                              isometry_apply, kappa, mobius_abs, to_ball)
from hypam.settings import tolerances

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LineAmoebaClass:
    kind: ClassVar[str] = ""

    def params(self) -> Dict[str, object]:
        return {}

    def describe(self) -> Dict[str, object]:
        return {"class": self.kind, **self.params()}


@dataclass(frozen=True)
class EmptyPlusRuling(LineAmoebaClass):
    """Line of constant image: the whole line maps to one boundary point."""
    point: AbsPoint
    kind: ClassVar[str] = "empty_plus_ruling"

    def params(self):
        return {"point": self.point.label()}


@dataclass(frozen=True)
class EmptyMinusRuling(LineAmoebaClass):
    """Line of constant kernel: the line maps onto the absolute."""
    kind: ClassVar[str] = "empty_minus_ruling"


@dataclass(frozen=True)
class Horosphere(LineAmoebaClass):
    center: AbsPoint
    basepoint: HPoint
    kind: ClassVar[str] = "horosphere"

    def params(self):
        return {"center": self.center.label(), "basepoint": [float(c) for c in self.basepoint.coords],
                "level": busemann(self.center, self.basepoint)}


@dataclass(frozen=True)
class Cylinder(LineAmoebaClass):
    axis: Tuple[AbsPoint, AbsPoint]
    radius: float
    kind: ClassVar[str] = "cylinder"

    def params(self):
        return {"axis": [q.label() for q in self.axis], "radius": self.radius}


@dataclass(frozen=True)
class Geodesic(LineAmoebaClass):
    endpoints: Tuple[AbsPoint, AbsPoint]
    kind: ClassVar[str] = "geodesic"

    def params(self):
        return {"endpoints": [q.label() for q in self.endpoints]}


@dataclass(frozen=True)
class PointCloud:
    points: Tuple[HPoint, ...]
    params: Tuple[CP1Point, ...] = ()
    metadata: Dict[str, object] = field(default_factory=dict)

    def __len__(self):
        return len(self.points)

    def ball_array(self) -> np.ndarray:
        if not self.points:
            return np.zeros((0, 3))
        return np.array([to_ball(x).v for x in self.points])


def _fibonacci_params(n: int) -> List[CP1Point]:
    return [AbsPoint(v).cp1 for v in fibonacci_sphere(n)]


def _away_from_roots(l: Line, params: Sequence[CP1Point], margin: float) -> List[CP1Point]:
    roots = l.qdata.roots
    return [p for p in params if all(spherical_distance(p, r) > margin for r in roots)]


def probe_params(l: Line, n: int) -> List[CP1Point]:
    """n deterministic pencil parameters well away from the Q-roots."""
    candidates = _away_from_roots(l, _fibonacci_params(4 * n + 8), margin=0.2)
    return candidates[:n]


def classify_line(l: Line) -> LineAmoebaClass:
    tol = tolerances()
    qd = l.qdata
    if qd.kind is QKind.ON_QUADRIC_PLUS:
        return EmptyPlusRuling(AbsPoint.from_cp1(_rank_one_data(l.frame[0]).beta))
    if qd.kind is QKind.ON_QUADRIC_MINUS:
        return EmptyMinusRuling()
    if qd.kind is QKind.TANGENT:
        center = AbsPoint.from_cp1(qd.qpoints[0].beta)
        return Horosphere(center=center, basepoint=kappa(l.point(qd.roots[0].antipode())))

    first, second = qd.qpoints
    axis = (AbsPoint.from_cp1(first.beta), AbsPoint.from_cp1(second.beta))
    gap = spherical_distance(second.alpha, first.alpha.antipode())
    if gap < tol.eps_antipode:
        return Geodesic(endpoints=axis)

    radii = np.array([dist_to_geodesic(kappa(l.point(p)), axis) for p in probe_params(l, 17)])
    spread = float(np.abs(radii - radii[0]).max())
    if spread > tol.radius_check:
        raise InternalConsistencyError(f"Cylinder radii disagree by {spread:.3e}")
    logger.debug("Transverse line: antipodal gap %.3e, radius %.12g", gap, radii[0])
    if radii[0] <= tol.eps_geo:
        return Geodesic(endpoints=axis)
    return Cylinder(axis=axis, radius=float(radii[0]))


def _uniform_params(rng: np.random.Generator, n: int) -> List[CP1Point]:
    z = rng.standard_normal((n, 2)) + 1j * rng.standard_normal((n, 2))
    return [CP1Point(row) for row in z]


def sample_line_amoeba(l: Line, n: int, seed: int) -> PointCloud:
    """kappa-images of n pencil points drawn uniformly on CP^1."""
    if l.kind.on_quadric:
        raise EmptyAmoeba("A line contained in Q has no points off Q")
    if n < 0:
        raise InputError(f"Sample count must be non-negative, got {n}")
    rng = np.random.default_rng(seed)
    margin = tolerances().eps_root
    params: List[CP1Point] = []
    while len(params) < n:
        params.extend(_away_from_roots(l, _uniform_params(rng, n - len(params)), margin))
    points = tuple(kappa(l.point(p)) for p in params)
    meta = {"generator": "sample_line_amoeba", "kind": l.kind.value, "seed": seed, "count": n}
    return PointCloud(points=points, params=tuple(params), metadata=meta)


def cylinder_radius_curve(q1: CP1Point, sweep: Sequence[float],
                          betas: Tuple[CP1Point, CP1Point] = (CP1Point((1.0, 0.0)), CP1Point((0.0, 1.0)))
                          ) -> List[float]:
    """Radius of the line through (q1, betas[0]) and (q2, betas[1]) as q2 leaves the antipode of q1.

    q2 is placed at spherical distance s from the antipode, on the great
    circle towards q1. The radius is increasing in s and unbounded as s -> pi.
    """
    far = q1.antipode().vector
    near = q1.vector
    radii = []
    for s in sweep:
        if not 0.0 < s < np.pi:
            raise InputError(f"Spherical distances must lie in (0, pi), got {s}")
        q2 = CP1Point(np.cos(s / 2.0) * far + np.sin(s / 2.0) * near)
        line = Line(QuadricPoint(q1, betas[0]).to_proj(), QuadricPoint(q2, betas[1]).to_proj())
        found = classify_line(line)
        radii.append(found.radius if isinstance(found, Cylinder) else 0.0)
    return radii


def translate_line(l: Line, A: ProjPoint, side: str = "left") -> Line:
    p, q = l.basis
    if side == "left":
        return Line(left_mul(A, p), left_mul(A, q))
    if side == "right":
        return Line(right_mul(p, A), right_mul(q, A))
    raise InputError(f"side must be 'left' or 'right', got {side!r}")


def tangent_line_through(z0: ProjPoint, direction) -> Line:
    """The line through a point of Q along the tangent-plane part of ``direction``."""
    a, b, c, d = z0.entries
    grad = np.array([d, -c, -b, a])
    D = np.asarray(direction, dtype=complex)
    D = D - (grad @ D) / (grad @ np.conj(grad)) * np.conj(grad)
    return Line(z0, ProjPoint(D))


def is_p_real_line(l: Line) -> bool:
    """Whether the P-real involution maps the line onto itself."""
    images = [p_real_involution(ProjPoint(row)) for row in l.frame]
    return all(l.contains(img, eps=1e-9) for img in images)


def kappa_fiber(l: Line, target: HPoint, starts: int = 16, seed: int = 0,
                residual: float = 1e-10) -> List[CP1Point]:
    """Distinct pencil parameters whose kappa-image is ``target``."""
    if l.kind.on_quadric:
        raise EmptyAmoeba("A line contained in Q has no points off Q")
    rng = np.random.default_rng(seed)
    f0, f1 = l.frame

    def mismatch(w: np.ndarray) -> np.ndarray:
        point = ProjPoint((w[0] + 1j * w[1]) * f0 + f1)
        return kappa(point).coords - target.coords

    found: List[CP1Point] = []
    for _ in range(starts):
        w0 = rng.standard_normal(2)
        try:
            fit = least_squares(mismatch, w0, xtol=1e-15, ftol=1e-15, gtol=1e-15)
        except Exception as exc:  # pencil walked onto Q
            logger.debug("Fiber search start abandoned: %s", exc)
            continue
        if np.linalg.norm(fit.fun) > residual:
            continue
        param = CP1Point((fit.x[0] + 1j * fit.x[1], 1.0))
        if all(spherical_distance(param, other) > 1e-6 for other in found):
            found.append(param)
    return found


def transported(cls: LineAmoebaClass, A: ProjPoint) -> LineAmoebaClass:
    """The class of the left translate A.l predicted from the class of l."""
    if isinstance(cls, EmptyPlusRuling):
        return EmptyPlusRuling(mobius_abs(A, cls.point))
    if isinstance(cls, Horosphere):
        return Horosphere(mobius_abs(A, cls.center), isometry_apply(A, cls.basepoint))
    if isinstance(cls, Cylinder):
        return Cylinder(tuple(mobius_abs(A, q) for q in cls.axis), cls.radius)
    if isinstance(cls, Geodesic):
        return Geodesic(tuple(mobius_abs(A, q) for q in cls.endpoints))
    return cls


def busemann_range(cloud: PointCloud, center: AbsPoint) -> float:
    values = [busemann(center, x) for x in cloud.points]
    return float(max(values) - min(values)) if values else 0.0


def axis_distance_spread(cloud: PointCloud, axis: Tuple[AbsPoint, AbsPoint]) -> float:
    values = np.array([dist_to_geodesic(x, axis) for x in cloud.points])
    return float(values.std()) if values.size else 0.0


def _same_pair(p: Sequence[AbsPoint], q: Sequence[AbsPoint], atol: float) -> bool:
    def close(x, y):
        return np.linalg.norm(x.xi - y.xi) < atol
    return (close(p[0], q[0]) and close(p[1], q[1])) or (close(p[0], q[1]) and close(p[1], q[0]))


def same_amoeba(first: LineAmoebaClass, second: LineAmoebaClass, atol: float = 1e-7) -> bool:
    """Whether two classes describe the same subset of the compactified H^3."""
    if type(first) is not type(second):
        return False
    if isinstance(first, EmptyPlusRuling):
        return np.linalg.norm(first.point.xi - second.point.xi) < atol
    if isinstance(first, Horosphere):
        if np.linalg.norm(first.center.xi - second.center.xi) >= atol:
            return False
        levels = busemann(first.center, first.basepoint) - busemann(first.center, second.basepoint)
        return abs(levels) < atol
    if isinstance(first, Cylinder):
        return _same_pair(first.axis, second.axis, atol) and abs(first.radius - second.radius) < atol
    if isinstance(first, Geodesic):
        return _same_pair(first.endpoints, second.endpoints, atol)
    return True
