"""Tropical curves, H^3-floor diagrams and the convergence of rescaled amoebas.

The commutative side works with parameterized graphs in R^n; the hyperbolic
side realizes a floor diagram as a union of concentric spheres, points and
radial segments in the closed Poincare ball and compares it with kappa_t
images of a family of curves.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import mpmath
import numpy as np
from scipy.spatial import cKDTree

from hypam.core_proj import Line, ProjPoint, QuadricPoint
from hypam.errors import (BadScale, DimensionMismatch, EmptyCloud, InputError, InvalidDiagram,
                          ZeroCoordinate)
from hypam.hyperbolic import PolarCoord, fibonacci_sphere, kappa_t_precise
from hypam.line_amoebas import PointCloud
from hypam.settings import settings, tolerances

logger = logging.getLogger(__name__)

_GEOMETRY_TOL = 1e-9


# --- tropical curves in R^n -------------------------------------------------

@dataclass(frozen=True)
class TropicalVertex:
    position: Tuple[float, ...]
    genus: int = 0


@dataclass(frozen=True)
class TropicalEdge:
    """An edge with primitive integer direction and weight.

    ``start``/``end`` index vertices; a leaf has ``end=None`` and runs from
    ``start`` along ``direction``. An edge with no endpoints is a whole line
    through ``anchor``.
    """
    start: Optional[int]
    end: Optional[int]
    direction: Tuple[int, ...]
    weight: int = 1
    length: float = math.inf
    anchor: Optional[Tuple[float, ...]] = None

    @property
    def is_line(self) -> bool:
        return self.start is None and self.end is None

    @property
    def slope(self) -> np.ndarray:
        return self.weight * np.asarray(self.direction, dtype=int)


@dataclass(frozen=True)
class TropicalCurveGraph:
    dim: int
    vertices: Tuple[TropicalVertex, ...] = ()
    edges: Tuple[TropicalEdge, ...] = ()

    def outgoing(self, v: int) -> List[np.ndarray]:
        """Weighted slopes of the edges at v, oriented away from v."""
        slopes = []
        for e in self.edges:
            if e.start == v:
                slopes.append(e.slope)
            if e.end == v:
                slopes.append(-e.slope)
        return slopes

    def position(self, v: int) -> np.ndarray:
        return np.asarray(self.vertices[v].position, dtype=float)


def validate_tropical_curve(g: TropicalCurveGraph) -> List[str]:
    """Balancing, genus and edge-geometry violations; empty when g is a tropical curve."""
    violations: List[str] = []
    for i, v in enumerate(g.vertices):
        if len(v.position) != g.dim:
            violations.append(f"vertex {i}: position has dimension {len(v.position)}, expected {g.dim}")
        if v.genus < 0:
            violations.append(f"vertex {i}: negative genus")
    for k, e in enumerate(g.edges):
        if len(e.direction) != g.dim:
            violations.append(f"edge {k}: direction has dimension {len(e.direction)}")
            continue
        if not any(e.direction) or math.gcd(*(abs(int(c)) for c in e.direction)) != 1:
            violations.append(f"edge {k}: direction {e.direction} is not primitive")
        if e.weight < 1:
            violations.append(f"edge {k}: weight must be positive")
        for end in (e.start, e.end):
            if end is not None and not 0 <= end < len(g.vertices):
                violations.append(f"edge {k}: unknown vertex {end}")
        if e.is_line and (e.anchor is None or len(e.anchor) != g.dim):
            violations.append(f"edge {k}: a line needs an anchor point")
        if e.start is not None and e.end is not None and 0 <= e.start < len(g.vertices) \
                and 0 <= e.end < len(g.vertices):
            if not 0 < e.length < math.inf:
                violations.append(f"edge {k}: bounded edge needs a finite positive length")
                continue
            unit = np.asarray(e.direction, dtype=float) / np.linalg.norm(e.direction)
            gap = g.position(e.end) - g.position(e.start) - e.length * unit
            if np.linalg.norm(gap) > _GEOMETRY_TOL * max(1.0, e.length):
                violations.append(f"edge {k}: endpoints are not at distance {e.length} along {e.direction}")
        elif not e.is_line and e.length != math.inf:
            violations.append(f"edge {k}: a leaf has infinite length")
    if violations:
        return violations

    for i, v in enumerate(g.vertices):
        slopes = g.outgoing(i)
        if len(slopes) == 1 and v.genus == 0:
            violations.append(f"vertex {i}: 1-valent vertex of genus 0")
        if slopes:
            total = np.sum(slopes, axis=0)
            if np.any(total != 0):
                violations.append(f"vertex {i}: unbalanced, slopes sum to {tuple(int(x) for x in total)}")
    return violations


def tropical_degree(g: TropicalCurveGraph) -> int:
    """Sum over unbounded ends of the largest slope coordinate, or 0 if none is positive."""
    ends: List[np.ndarray] = []
    for e in g.edges:
        if e.is_line:
            ends.extend([e.slope, -e.slope])
        elif e.end is None:
            ends.append(e.slope)
    return int(sum(max(0, int(u.max())) for u in ends))


def log_t(z: Sequence[complex], t: float) -> np.ndarray:
    if not t > 1:
        raise BadScale(f"Scale must exceed 1, got {t}")
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise ZeroCoordinate(f"log_t is undefined at a zero coordinate: {z!r}")
    return np.log(np.abs(z)) / np.log(t)


def trop_limit(sequence: Sequence[Tuple[float, complex]], tol: float = 1e-2) -> Optional[float]:
    """Tropical limit lim log_{t_k} |z_k| of a scaled sequence.

    The tail is fitted by L + c / log t_k; the fitted L is returned when the
    fit is tight, +-inf for a tail running off monotonically and None when the
    tail oscillates.
    """
    if not sequence:
        raise InputError("trop_limit needs a nonempty sequence")
    ts = np.array([float(t) for t, _ in sequence])
    if np.any(ts <= 1):
        raise BadScale("All scales must exceed 1")
    mods = np.array([abs(complex(z)) for _, z in sequence])
    tail = max(3, len(sequence) // 2)
    ts, mods = ts[-tail:], mods[-tail:]
    if np.all(mods == 0):
        return -math.inf
    if np.any(mods == 0):
        return None
    values = np.log(mods) / np.log(ts)
    if len(values) < 3:
        return float(values[-1])

    steps = np.diff(values)
    if abs(values[-1]) > 1e6 and (np.all(steps > 0) or np.all(steps < 0)):
        return math.copysign(math.inf, values[-1])

    x = 1.0 / np.log(ts)
    slope, limit = np.polyfit(x, values, 1)
    residual = float(np.sqrt(np.mean((values - (limit + slope * x)) ** 2)))
    logger.debug("Tropical limit fit %.6g (residual %.3e)", limit, residual)
    if residual > tol * max(1.0, abs(limit)):
        return None
    return float(limit)


@dataclass(frozen=True)
class EdgeCircle:
    """A geodesic circle of the torus (S^1)^n: basepoint angles and integer direction."""
    basepoint: Tuple[float, ...]
    direction: Tuple[int, ...]


def _edge_segment(g: TropicalCurveGraph, e: TropicalEdge, reach: float) -> Tuple[np.ndarray, np.ndarray]:
    u = np.asarray(e.direction, dtype=float)
    if e.is_line:
        anchor = np.asarray(e.anchor, dtype=float)
        return anchor - reach * u, anchor + reach * u
    start = g.position(e.start)
    if e.end is None:
        return start, start + reach * u
    return start, g.position(e.end)


def build_psi(trop: TropicalCurveGraph, vertex_coamoebas: Mapping[int, np.ndarray],
              edge_circles: Mapping[int, EdgeCircle], samples: int = 32,
              reach: float = 5.0) -> np.ndarray:
    """Sample the union of {h(v)} x Arg_v and h(E) x (circle of E) in R^n x (S^1)^n.

    Returns an array of shape (N, 2n): positions followed by angles in [0, 2 pi).
    """
    n = trop.dim
    rows: List[np.ndarray] = []
    for v, cloud in vertex_coamoebas.items():
        cloud = np.atleast_2d(np.asarray(cloud, dtype=float))
        if cloud.size == 0:
            continue
        if not 0 <= v < len(trop.vertices) or cloud.shape[1] != n:
            raise DimensionMismatch(f"Coamoeba of vertex {v} does not fit a curve in R^{n}")
        position = np.broadcast_to(trop.position(v), cloud.shape)
        rows.append(np.hstack([position, np.mod(cloud, 2 * np.pi)]))

    for k, circle in edge_circles.items():
        if not 0 <= k < len(trop.edges):
            raise DimensionMismatch(f"No edge {k}")
        e = trop.edges[k]
        delta = np.asarray(circle.direction, dtype=int)
        if len(circle.basepoint) != n or delta.shape != (n,):
            raise DimensionMismatch(f"Circle of edge {k} does not live in (S^1)^{n}")
        u = np.asarray(e.direction, dtype=int)
        if not (np.array_equal(delta, u) or np.array_equal(delta, -u)):
            raise DimensionMismatch(f"Circle direction {tuple(delta)} does not match edge slope {tuple(u)}")
        p0, p1 = _edge_segment(trop, e, reach)
        s = np.linspace(0.0, 1.0, samples)[:, None]
        theta = 2 * np.pi * np.arange(samples)[:, None] / samples
        positions = p0 + s * (p1 - p0)
        angles = np.mod(np.asarray(circle.basepoint) + theta * delta, 2 * np.pi)
        grid = np.hstack([np.repeat(positions, samples, axis=0), np.tile(angles, (samples, 1))])
        rows.append(grid)

    if not rows:
        return np.zeros((0, 2 * n))
    return np.vstack(rows)


# --- floor diagrams in the closed ball ---------------------------------------

@dataclass(frozen=True)
class FloorVertex:
    """A vertex of width r in [0, inf]; zero-width vertices carry a degree, others a bidegree."""
    width: float
    bidegree: Optional[Tuple[int, int]] = None
    delta: Optional[int] = None

    @property
    def zero(self) -> bool:
        return self.width == 0


@dataclass(frozen=True)
class FloorEdge:
    v1: int
    v2: int
    phi: Tuple[float, float, float]
    weight: int = 1


@dataclass(frozen=True)
class FloorDiagram:
    degree: int
    vertices: Tuple[FloorVertex, ...] = ()
    edges: Tuple[FloorEdge, ...] = ()

    def adjacent(self, v: int) -> List[FloorEdge]:
        return [e for e in self.edges if v in (e.v1, e.v2)]

    def vertex_angle(self, v: int) -> Optional[np.ndarray]:
        edges = self.adjacent(v)
        return np.asarray(edges[0].phi, dtype=float) if edges else None


def divergence(diagram: FloorDiagram, v: int) -> int:
    """Weights towards wider vertices minus weights towards narrower ones."""
    width = diagram.vertices[v].width
    total = 0
    for e in diagram.adjacent(v):
        other = diagram.vertices[e.v2 if e.v1 == v else e.v1].width
        total += e.weight if other > width else -e.weight
    return total


def validate_floor_diagram(diagram: FloorDiagram) -> List[str]:
    violations: List[str] = []
    vertices = diagram.vertices
    if diagram.degree < 0:
        violations.append(f"degree {diagram.degree} is negative")
    for i, v in enumerate(vertices):
        if math.isnan(v.width) or v.width < 0:
            violations.append(f"vertex {i}: width {v.width} outside [0, inf]")
            continue
        if v.zero:
            if v.delta is None or v.delta < 0 or v.bidegree is not None:
                violations.append(f"vertex {i}: a zero-width vertex needs a degree and no bidegree")
        elif v.bidegree is None or len(v.bidegree) != 2 or min(v.bidegree) < 0 or v.delta is not None:
            violations.append(f"vertex {i}: a vertex of positive width needs a bidegree and no degree")
    for k, e in enumerate(diagram.edges):
        if not (0 <= e.v1 < len(vertices) and 0 <= e.v2 < len(vertices)):
            violations.append(f"edge {k}: unknown vertex")
            continue
        if vertices[e.v1].width == vertices[e.v2].width:
            violations.append(f"edge {k}: connects vertices of equal width {vertices[e.v1].width}")
        if e.weight < 1:
            violations.append(f"edge {k}: weight must be positive")
        if abs(np.linalg.norm(e.phi) - 1.0) > _GEOMETRY_TOL:
            violations.append(f"edge {k}: angle is not a unit vector")
    if violations:
        return violations

    total = sum(v.delta for v in vertices if v.zero)
    total += sum(sum(v.bidegree) for v in vertices if 0 < v.width < math.inf)
    if total != diagram.degree:
        violations.append(f"degrees sum to {total}, expected {diagram.degree}")

    for i, v in enumerate(vertices):
        div = divergence(diagram, i)
        if v.zero and 2 * v.delta != div:
            violations.append(f"vertex {i}: div = {div} but 2 delta = {2 * v.delta}")
        elif 0 < v.width < math.inf and 2 * sum(v.bidegree) != div:
            violations.append(f"vertex {i}: div = {div} but 2 (d+ + d-) = {2 * sum(v.bidegree)}")
        if not v.zero and v.bidegree[0] == 0:
            angles = [np.asarray(e.phi, dtype=float) for e in diagram.adjacent(i)]
            if any(np.linalg.norm(a - angles[0]) > _GEOMETRY_TOL for a in angles[1:]):
                violations.append(f"vertex {i}: d+ = 0 but adjacent edges have different angles")
    return violations


def require_valid(diagram: FloorDiagram) -> FloorDiagram:
    violations = validate_floor_diagram(diagram)
    if violations:
        raise InvalidDiagram(violations)
    return diagram


def constant_line_diagram(phi1, phi2) -> FloorDiagram:
    """The limit of a fixed transverse line: a point at the origin with two rays to the absolute."""
    return FloorDiagram(
        degree=1,
        vertices=(FloorVertex(0.0, delta=1), FloorVertex(math.inf, bidegree=(0, 0)),
                  FloorVertex(math.inf, bidegree=(0, 0))),
        edges=(FloorEdge(0, 1, _unit(phi1)), FloorEdge(0, 2, _unit(phi2))))


def cubic_example_diagram(r_u: float = 0.5, r1: float = 1.0, r2: float = 2.0) -> FloorDiagram:
    """A degree-3 diagram: two shells of bidegree (1, 0) and an inner point of bidegree (0, 1).

    The point joins the inner shell by one edge of weight 2, the shells are
    joined by four edges and the outer shell sends six edges to the absolute.
    """
    if not 0 < r_u < r1 < r2 < math.inf:
        raise InputError("Widths must satisfy 0 < r_u < r1 < r2 < inf")
    directions = [tuple(float(c) for c in v) for v in fibonacci_sphere(11)]
    vertices = [FloorVertex(r_u, bidegree=(0, 1)), FloorVertex(r1, bidegree=(1, 0)),
                FloorVertex(r2, bidegree=(1, 0))]
    edges = [FloorEdge(0, 1, directions[0], weight=2)]
    edges += [FloorEdge(1, 2, directions[1 + k]) for k in range(4)]
    for k in range(6):
        vertices.append(FloorVertex(math.inf, bidegree=(0, 0)))
        edges.append(FloorEdge(2, 3 + k, directions[5 + k]))
    return FloorDiagram(degree=3, vertices=tuple(vertices), edges=tuple(edges))


def _unit(v) -> Tuple[float, float, float]:
    v = np.asarray(v, dtype=float)
    return tuple(float(c) for c in v / np.linalg.norm(v))


def ball_radius(r: float) -> float:
    return 1.0 if math.isinf(r) else math.tanh(r / 2.0)


@dataclass(frozen=True)
class ThetaPiece:
    kind: str
    radii: Tuple[float, ...]
    phi: Optional[Tuple[float, float, float]] = None

    def residual(self, point: np.ndarray) -> float:
        """Euclidean distance in the ball from ``point`` to this piece."""
        if self.kind == "shell":
            return abs(np.linalg.norm(point) - ball_radius(self.radii[0]))
        phi = np.asarray(self.phi)
        if self.kind == "point":
            return float(np.linalg.norm(point - ball_radius(self.radii[0]) * phi))
        lo, hi = sorted(ball_radius(r) for r in self.radii)
        along = float(np.clip(point @ phi, lo, hi))
        return float(np.linalg.norm(point - along * phi))


@dataclass(frozen=True)
class SphericalComplex:
    pieces: Tuple[ThetaPiece, ...]
    points: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))
    tags: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int32))

    def __len__(self):
        return len(self.points)

    def max_residual(self) -> float:
        if not len(self.points):
            return 0.0
        return max(self.pieces[t].residual(p) for p, t in zip(self.points, self.tags))


def build_theta(diagram: FloorDiagram, density: int) -> SphericalComplex:
    """Realize the diagram in the closed ball.

    Each shell gets ``density`` Fibonacci points and each segment ``density``
    points uniform in the ball radius; infinite widths land on the unit sphere.
    """
    require_valid(diagram)
    pieces: List[ThetaPiece] = []
    chunks: List[np.ndarray] = []
    tags: List[np.ndarray] = []

    def add(piece: ThetaPiece, points: np.ndarray):
        tags.append(np.full(len(points), len(pieces), dtype=np.int32))
        pieces.append(piece)
        chunks.append(points)

    for i, v in enumerate(diagram.vertices):
        if v.zero:
            add(ThetaPiece("point", (0.0,), (0.0, 0.0, 1.0)), np.zeros((1, 3)))
        elif v.bidegree[0] > 0:
            add(ThetaPiece("shell", (v.width,)), ball_radius(v.width) * fibonacci_sphere(density))
        else:
            phi = diagram.vertex_angle(i)
            if phi is None:
                logger.debug("Vertex %d has no edges and no angle; skipped", i)
                continue
            add(ThetaPiece("point", (v.width,), tuple(phi)), (ball_radius(v.width) * phi)[None, :])

    for e in diagram.edges:
        r1, r2 = diagram.vertices[e.v1].width, diagram.vertices[e.v2].width
        lo, hi = sorted((ball_radius(r1), ball_radius(r2)))
        phi = np.asarray(e.phi)
        add(ThetaPiece("segment", (r1, r2), e.phi), np.linspace(lo, hi, density)[:, None] * phi)

    if not pieces:
        return SphericalComplex(pieces=())
    return SphericalComplex(pieces=tuple(pieces), points=np.vstack(chunks), tags=np.concatenate(tags))


def _ball_array(cloud) -> np.ndarray:
    if isinstance(cloud, SphericalComplex):
        return cloud.points
    if isinstance(cloud, PointCloud):
        return cloud.ball_array()
    return np.atleast_2d(np.asarray(cloud, dtype=float)).reshape(-1, 3)


def hausdorff(cloud_a, cloud_b) -> float:
    """Symmetric Hausdorff distance in the Euclidean metric of the closed ball."""
    a, b = _ball_array(cloud_a), _ball_array(cloud_b)
    if not len(a) or not len(b):
        raise EmptyCloud("Hausdorff distance needs two nonempty clouds")
    forward = cKDTree(b).query(a)[0].max()
    backward = cKDTree(a).query(b)[0].max()
    return float(max(forward, backward))


def polar_to_ball(p: PolarCoord) -> np.ndarray:
    return p.to_ball().v


def line_family(l: Line, u_max: Optional[float] = None, n_u: int = 801,
                n_theta: int = 8) -> Callable[[float], List[Tuple]]:
    """The constant family V_t = l, sampled at every scale up to rescaled radius u_max.

    Points are q1 + mu q2 in the pencil of the two Q-points of l, with
    mu = t^u e^(i theta); the returned entries are mpmath numbers carrying
    enough precision for the requested scale. The Q-points themselves close
    the sample.
    """
    u_max = settings().tropical.u_max if u_max is None else u_max
    if len(l.qdata.qpoints) != 2:
        raise InputError(f"line_family needs a line transverse to Q, got {l.kind.value}")
    qpoints = l.qdata.qpoints
    us = np.linspace(-u_max, u_max, n_u)
    thetas = 2 * np.pi * np.arange(n_theta) / n_theta

    def family(t: float) -> List[Tuple]:
        with mpmath.workdps(precision_for(t, u_max)):
            log_t = mpmath.log(mpmath.mpf(t))
            first, second = (_mp_rank_one(qp) for qp in qpoints)
            samples = [first, second]
            for u in us:
                size = mpmath.exp(mpmath.mpf(float(u)) * log_t)
                for theta in thetas:
                    mu = size * mpmath.expjpi(mpmath.mpf(float(theta)) / mpmath.pi)
                    samples.append(tuple(f + mu * s for f, s in zip(first, second)))
        return samples

    return family


def _mp_rank_one(qp: QuadricPoint) -> Tuple:
    """Entries of beta (x) (-alpha_v, alpha_u) at the working precision."""
    beta = [mpmath.mpc(z) for z in qp.beta.vector]
    row = [-mpmath.mpc(qp.alpha.vector[1]), mpmath.mpc(qp.alpha.vector[0])]
    return tuple(b * r for b in beta for r in row)


def precision_for(t: float, u_max: float) -> int:
    return int(u_max * math.log(float(t)) / math.log(10.0)) + settings().tropical.extra_digits


@dataclass
class ConvergenceReport:
    schedule: List[float]
    distances: List[float]
    tol_conv: float

    @property
    def monotone(self) -> bool:
        tail = self.distances[2:] if len(self.distances) > 2 else self.distances
        return all(b <= a + 1e-9 for a, b in zip(tail, tail[1:]))

    @property
    def passed(self) -> bool:
        return bool(self.distances) and self.monotone and self.distances[-1] < self.tol_conv

    def describe(self) -> Dict[str, object]:
        return {"schedule": self.schedule, "distances": self.distances, "monotone": self.monotone,
                "final": self.distances[-1] if self.distances else None, "passed": self.passed}


def _rescaled_cloud(samples: Sequence, t: float, digits: int) -> np.ndarray:
    rows = []
    for sample in samples:
        entries = sample.entries if isinstance(sample, ProjPoint) else sample
        rows.append(polar_to_ball(kappa_t_precise(entries, t, digits)))
    return np.array(rows)


def kappa_convergence_check(family: Callable[[float], Sequence], diagram: FloorDiagram,
                            schedule: Sequence[float], density: int,
                            u_max: Optional[float] = None) -> ConvergenceReport:
    """Hausdorff distance between kappa_t(V_t) and the diagram's complex along a schedule."""
    schedule = [float(t) for t in schedule]
    if any(t <= 1 for t in schedule):
        raise BadScale("All scales must exceed 1")
    if any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise InputError("The schedule must be increasing")
    u_max = settings().tropical.u_max if u_max is None else u_max
    theta = build_theta(diagram, density)

    def distance(t: float) -> float:
        cloud = _rescaled_cloud(family(t), t, precision_for(t, u_max))
        d = hausdorff(cloud, theta)
        logger.info("Hausdorff distance at log t = %.1f: %.6f", math.log(t), d)
        return d

    # mpmath precision is process-global, so scales run one after another
    distances = [distance(t) for t in schedule]
    return ConvergenceReport(schedule=schedule, distances=distances, tol_conv=tolerances().tol_conv)
