"""Complex projective kernel.

Points of CP^3 are 2x2 complex matrices [[a, b], [c, d]] up to scale. The
quadric Q = {ad - bc = 0} of degenerate matrices is CP^1 x CP^1 through the
kernel (alpha) and image (beta) of a rank-1 matrix. A point (u:v) of CP^1 is
read as the number u/v on the Riemann sphere: (1:0) is infinity, (0:1) is 0.
"""
import enum
import logging
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from hypam.errors import DegenerateSpan, NotOnQuadric, OnRealLocus, ZeroVector
from hypam.settings import tolerances

logger = logging.getLogger(__name__)


def canonical_vector(vec, eps: Optional[float] = None) -> np.ndarray:
    """Unit-norm representative whose largest entry is real positive.

    Ties between entries of equal modulus (within ``eps``) go to the first.
    The returned array is read-only.
    """
    v = np.array(vec, dtype=complex).reshape(-1)
    norm = np.linalg.norm(v)
    if not np.isfinite(norm) or norm == 0.0:
        raise ZeroVector(f"Homogeneous coordinates must not all vanish: {vec!r}")
    v /= norm
    eps = tolerances().eps_proj if eps is None else eps
    mods = np.abs(v)
    k = int(np.flatnonzero(mods >= mods.max() - eps)[0])
    v *= np.conj(v[k]) / mods[k]
    v[k] = mods[k]
    v.setflags(write=False)
    return v


def fs_distance(u, v) -> float:
    """Fubini-Study distance in [0, pi/2] between two homogeneous vectors."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    u = u / np.linalg.norm(u)
    v = v / np.linalg.norm(v)
    inner = np.vdot(u, v)
    sin = np.linalg.norm(v - inner * u)
    return float(np.arctan2(sin, abs(inner)))


class CP1Point:
    """A point (u:v) of the Riemann sphere, stored canonically."""
    __slots__ = ("vector",)

    def __init__(self, pair):
        vector = canonical_vector(pair)
        if vector.shape != (2,):
            raise ZeroVector(f"A CP1 point needs two coordinates, got {len(vector)}")
        object.__setattr__(self, "vector", vector)

    def __setattr__(self, name, value):
        raise AttributeError("CP1Point is immutable")

    @classmethod
    def from_complex(cls, z) -> "CP1Point":
        if z is None or np.isinf(z):
            return INFINITY
        return cls((complex(z), 1.0))

    @property
    def u(self) -> complex:
        return complex(self.vector[0])

    @property
    def v(self) -> complex:
        return complex(self.vector[1])

    @property
    def value(self) -> complex:
        """u/v, or complex infinity at (1:0)."""
        if abs(self.vector[1]) < tolerances().eps_proj:
            return complex("inf")
        return complex(self.vector[0] / self.vector[1])

    def is_infinity(self, eps: Optional[float] = None) -> bool:
        eps = tolerances().eps_proj if eps is None else eps
        return abs(self.vector[1]) < eps

    def antipode(self) -> "CP1Point":
        """The point -1/conj(z), opposite on the unit sphere."""
        return CP1Point((-np.conj(self.vector[1]), np.conj(self.vector[0])))

    def label(self, digits: int = 6) -> str:
        if self.is_infinity():
            return "inf"
        z = self.value
        if abs(z) < tolerances().eps_proj:
            return "0"
        return f"{round(z.real, digits):g}{round(z.imag, digits):+g}j"

    def __eq__(self, other):
        if not isinstance(other, CP1Point):
            return NotImplemented
        return bool(np.allclose(self.vector, other.vector, rtol=0.0, atol=tolerances().eps_proj))

    __hash__ = None

    def __repr__(self):
        return f"CP1Point({self.label()})"


INFINITY = CP1Point((1.0, 0.0))
ZERO = CP1Point((0.0, 1.0))


def spherical_distance(p: CP1Point, q: CP1Point) -> float:
    """Distance on CP^1 = S^2 of diameter pi (twice the Fubini-Study distance)."""
    return 2.0 * fs_distance(p.vector, q.vector)


class ProjPoint:
    """A point [a:b:c:d] of CP^3, i.e. the matrix [[a, b], [c, d]] up to scale."""
    __slots__ = ("entries",)

    def __init__(self, entries):
        vector = canonical_vector(entries)
        if vector.shape != (4,):
            raise ZeroVector(f"A point of CP^3 needs four coordinates, got {len(vector)}")
        object.__setattr__(self, "entries", vector)

    def __setattr__(self, name, value):
        raise AttributeError("ProjPoint is immutable")

    @classmethod
    def from_matrix(cls, matrix) -> "ProjPoint":
        return cls(np.asarray(matrix, dtype=complex).reshape(4))

    @property
    def matrix(self) -> np.ndarray:
        return self.entries.reshape(2, 2).copy()

    @property
    def a(self) -> complex:
        return complex(self.entries[0])

    @property
    def b(self) -> complex:
        return complex(self.entries[1])

    @property
    def c(self) -> complex:
        return complex(self.entries[2])

    @property
    def d(self) -> complex:
        return complex(self.entries[3])

    def __eq__(self, other):
        if not isinstance(other, ProjPoint):
            return NotImplemented
        return bool(np.allclose(self.entries, other.entries, rtol=0.0, atol=tolerances().eps_proj))

    __hash__ = None

    def __repr__(self):
        return "ProjPoint([" + ", ".join(f"{z:.6g}" for z in self.entries) + "])"


def same_point(p: ProjPoint, q: ProjPoint, eps: Optional[float] = None) -> bool:
    """Projective equality that is insensitive to near-ties in the canonical phase."""
    eps = tolerances().eps_proj if eps is None else eps
    return fs_distance(p.entries, q.entries) < eps


def det(p: ProjPoint) -> complex:
    a, b, c, d = p.entries
    return complex(a * d - b * c)


def on_quadric(p: ProjPoint, eps: Optional[float] = None) -> bool:
    eps = tolerances().eps_q if eps is None else eps
    return abs(det(p)) < eps


@dataclass(frozen=True)
class QuadricPoint:
    """A point of Q as (kernel, image) of the rank-1 matrix."""
    alpha: CP1Point
    beta: CP1Point

    def to_proj(self) -> ProjPoint:
        """The rank-1 matrix beta * (-alpha_v, alpha_u)."""
        row = np.array([-self.alpha.vector[1], self.alpha.vector[0]])
        return ProjPoint.from_matrix(np.outer(self.beta.vector, row))


def _rank_one_data(entries: np.ndarray) -> QuadricPoint:
    # closest rank-1 matrix: top left and bottom right singular vectors
    u, _, vh = np.linalg.svd(np.asarray(entries, dtype=complex).reshape(2, 2))
    return QuadricPoint(alpha=CP1Point(np.conj(vh[1])), beta=CP1Point(u[:, 0]))


def q_coords(p: ProjPoint) -> QuadricPoint:
    if not on_quadric(p):
        raise NotOnQuadric(f"|det| = {abs(det(p)):.3e} for {p!r}")
    return _rank_one_data(p.entries)


def left_mul(A: ProjPoint, p: ProjPoint) -> ProjPoint:
    return ProjPoint.from_matrix(A.matrix @ p.matrix)


def right_mul(p: ProjPoint, A: ProjPoint) -> ProjPoint:
    return ProjPoint.from_matrix(p.matrix @ A.matrix)


def inverse(A: ProjPoint) -> ProjPoint:
    """The inverse in PSL2(C), i.e. the adjugate matrix."""
    a, b, c, d = A.entries
    return ProjPoint((d, -b, -c, a))


def mobius(A: ProjPoint, q: CP1Point) -> CP1Point:
    """Moebius action of A on the Riemann sphere."""
    return CP1Point(A.matrix @ q.vector)


def binary_roots(coeffs: Sequence[complex], rel_eps: float = 1e-13) -> list:
    """Roots (s:t) of sum_k coeffs[k] s^(n-k) t^k, with multiplicity.

    Leading coefficients that vanish relative to the largest one become roots
    at (1:0).
    """
    c = np.asarray(coeffs, dtype=complex)
    scale = np.abs(c).max() if c.size else 0.0
    if scale == 0.0:
        raise ZeroVector("The zero binary form has no isolated roots")
    c = c / scale
    lead = 0
    while lead < len(c) and abs(c[lead]) < rel_eps:
        lead += 1
    roots = [INFINITY] * lead
    rest = c[lead:]
    if len(rest) > 1:
        roots.extend(CP1Point((w, 1.0)) for w in np.roots(rest))
    return roots


def _cross(x: np.ndarray, y: np.ndarray) -> complex:
    """Mixed term of det(sX + tY): the polarization of ad - bc."""
    return x[0] * y[3] + x[3] * y[0] - x[1] * y[2] - x[2] * y[1]


class QKind(str, enum.Enum):
    ON_QUADRIC_PLUS = "OnQuadricPlusRuling"
    ON_QUADRIC_MINUS = "OnQuadricMinusRuling"
    TANGENT = "Tangent"
    TRANSVERSE = "Transverse"

    @property
    def on_quadric(self) -> bool:
        return self in (QKind.ON_QUADRIC_PLUS, QKind.ON_QUADRIC_MINUS)


@dataclass(frozen=True)
class LineQData:
    """How a line meets Q.

    ``roots`` are pencil parameters with respect to the line's orthonormal
    ``frame``; ``coefficients`` are those of det(s F0 + t F1).
    """
    kind: QKind
    roots: Tuple[CP1Point, ...]
    qpoints: Tuple[QuadricPoint, ...]
    coefficients: Tuple[complex, complex, complex]
    discriminant: float


class Line:
    """The projective line spanned by two independent points of CP^3."""
    __slots__ = ("basis", "frame", "qdata")

    def __init__(self, p: ProjPoint, q: ProjPoint):
        tol = tolerances()
        stacked = np.vstack([p.entries, q.entries])
        _, sv, vh = np.linalg.svd(stacked)
        if sv[1] <= tol.eps_rank:
            raise DegenerateSpan(f"Points do not span a line (sigma_min = {sv[1]:.3e})")
        frame = vh[:2].copy()
        frame.setflags(write=False)
        object.__setattr__(self, "basis", (p, q))
        object.__setattr__(self, "frame", frame)
        object.__setattr__(self, "qdata", _intersect_quadric(frame))

    def __setattr__(self, name, value):
        raise AttributeError("Line is immutable")

    @property
    def kind(self) -> QKind:
        return self.qdata.kind

    def point(self, param: CP1Point) -> ProjPoint:
        s, t = param.vector
        return ProjPoint(s * self.frame[0] + t * self.frame[1])

    def contains(self, p: ProjPoint, eps: Optional[float] = None) -> bool:
        eps = tolerances().eps_proj if eps is None else eps
        residual = p.entries - self.frame.T @ (np.conj(self.frame) @ p.entries)
        return float(np.linalg.norm(residual)) < max(eps, 1e-12) * 10

    def __repr__(self):
        return f"Line({self.basis[0]!r}, {self.basis[1]!r}, kind={self.kind.value})"


def line_through(p: ProjPoint, q: ProjPoint) -> Line:
    return Line(p, q)


def _intersect_quadric(frame: np.ndarray) -> LineQData:
    tol = tolerances()
    f0, f1 = frame
    c2 = f0[0] * f0[3] - f0[1] * f0[2]
    c1 = _cross(f0, f1)
    c0 = f1[0] * f1[3] - f1[1] * f1[2]
    coefficients = (complex(c2), complex(c1), complex(c0))
    # U(2)-invariant norm of a binary quadratic
    norm2 = abs(c2) ** 2 + abs(c1) ** 2 / 2.0 + abs(c0) ** 2

    if np.sqrt(norm2) < tol.eps_q:
        samples = [CP1Point((1.0, 0.0)), CP1Point((0.0, 1.0)), CP1Point((1.0, 1.0))]
        data = [_rank_one_data(s * f0 + t * f1) for s, t in (sp.vector for sp in samples)]
        beta_spread = max(spherical_distance(data[0].beta, x.beta) for x in data[1:])
        kind = QKind.ON_QUADRIC_PLUS if beta_spread < tol.eps_root else QKind.ON_QUADRIC_MINUS
        logger.debug("Line lies on Q (%s), beta spread %.3e", kind.value, beta_spread)
        return LineQData(kind, (), (), coefficients, 0.0)

    disc = c1 * c1 - 4.0 * c2 * c0
    rel = abs(disc) / norm2
    if rel < tol.eps_disc:
        if abs(c2) >= abs(c0):
            root = CP1Point((-c1, 2.0 * c2))
        else:
            root = CP1Point((2.0 * c0, -c1))
        s, t = root.vector
        qpoint = _rank_one_data(s * f0 + t * f1)
        return LineQData(QKind.TANGENT, (root,), (qpoint,), coefficients, rel)

    roots = tuple(binary_roots([c2, c1, c0]))
    qpoints = tuple(_rank_one_data(r.vector[0] * f0 + r.vector[1] * f1) for r in roots)
    return LineQData(QKind.TRANSVERSE, roots, qpoints, coefficients, rel)


def p_real_involution(p: ProjPoint) -> ProjPoint:
    """A -> adj(A*), fixing exactly the unitary matrices up to scale."""
    a, b, c, d = p.entries
    return ProjPoint(np.conj([d, -c, -b, a]))


_CHART = np.array([[1, 0, 0, 1],
                   [1j, 0, 0, -1j],
                   [0, 1, -1, 0],
                   [0, 1j, 1j, 0]], dtype=complex)
_CHART_INV = np.linalg.inv(_CHART)


def real_chart(p: ProjPoint) -> np.ndarray:
    """Coordinates (a+d, i(a-d), b-c, i(b+c)) in which the involution is conjugation.

    In this chart ad - bc = (z0^2 + z1^2 + z2^2 + z3^2) / 4.
    """
    return _CHART @ p.entries


def chart_matrix() -> np.ndarray:
    """The linear map z -> (a, b, c, d) inverse to ``real_chart``."""
    return _CHART_INV.copy()


def from_real_chart(z) -> ProjPoint:
    return ProjPoint(_CHART_INV @ np.asarray(z, dtype=complex))


def pi_P(p: ProjPoint) -> QuadricPoint:
    """Project to Q along the P-real line through p.

    In the chart, the P-real line through z = x + iy is {x + lam*y}; it meets
    Q where x.x + 2 lam x.y + lam^2 y.y = 0, at conjugate roots. The point p
    is lam = i, so the root in the upper half plane is on p's side.
    """
    if on_quadric(p):
        return q_coords(p)
    z = real_chart(p)
    x, y = z.real, z.imag
    xx, yy, xy = x @ x, y @ y, x @ y
    gram = max(xx * yy - xy * xy, 0.0)
    if 4.0 * gram / (xx + yy) ** 2 < tolerances().eps_proj ** 2:
        raise OnRealLocus(f"{p!r} is fixed by the P-real involution")
    lam = (-xy + 1j * np.sqrt(gram)) / yy
    return _rank_one_data(from_real_chart(x + lam * y).entries)


def as_proj(points: Iterable) -> list:
    return [p if isinstance(p, ProjPoint) else ProjPoint(p) for p in points]
