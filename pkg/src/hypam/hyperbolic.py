"""Hyperbolic 3-space, its absolute, and the amoeba map kappa.

Points of H^3 are unimodular positive-definite Hermitian matrices
[[x0, x1 + i x2], [x1 - i x2, x3]]. In Minkowski coordinates
T = (x0 + x3)/2, (X, Y, Z) = (x1, x2, (x0 - x3)/2) they lie on the upper
sheet of T^2 - X^2 - Y^2 - Z^2 = 1. The absolute is the unit sphere of
directions, identified with CP^1 by (u:v) -> (2 Re u v*, 2 Im u v*, |u|^2 - |v|^2)
for unit (u, v), so that (1:0) = infinity is the north pole.
"""
import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import mpmath
import numpy as np
from scipy.optimize import minimize_scalar

from hypam.core_proj import (CP1Point, ProjPoint, _rank_one_data, det, mobius, on_quadric,
                             q_coords, real_chart, spherical_distance)
from hypam.errors import (ArgumentBelowOne, AtOrigin, BadScale, CoincidingEndpoints, InputError,
                          OnQuadric)
from hypam.settings import tolerances

logger = logging.getLogger(__name__)

_TINY = 1e-14


def _spatial_of_hermitian(H: np.ndarray) -> np.ndarray:
    return np.array([H[0, 1].real, H[0, 1].imag, (H[0, 0].real - H[1, 1].real) / 2.0])


def _hermitian_of_spatial(v) -> np.ndarray:
    x, y, z = v
    return np.array([[z, x + 1j * y], [x - 1j * y, -z]], dtype=complex)


class HPoint:
    """A point of H^3 in hyperboloid coordinates (x0, x1, x2, x3)."""
    __slots__ = ("coords",)

    def __init__(self, coords):
        x = np.array(coords, dtype=float).reshape(4)
        gram = x[0] * x[3] - x[1] ** 2 - x[2] ** 2
        if not (gram > 0 and x[0] > 0):
            raise InputError(f"Not a point of H^3: {coords!r}")
        x /= np.sqrt(gram)
        x.setflags(write=False)
        object.__setattr__(self, "coords", x)

    def __setattr__(self, name, value):
        raise AttributeError("HPoint is immutable")

    @classmethod
    def from_hermitian(cls, H) -> "HPoint":
        H = np.asarray(H, dtype=complex)
        return cls((H[0, 0].real, H[0, 1].real, H[0, 1].imag, H[1, 1].real))

    @property
    def matrix(self) -> np.ndarray:
        x0, x1, x2, x3 = self.coords
        return np.array([[x0, x1 + 1j * x2], [x1 - 1j * x2, x3]], dtype=complex)

    @property
    def time(self) -> float:
        return float((self.coords[0] + self.coords[3]) / 2.0)

    @property
    def spatial(self) -> np.ndarray:
        x0, x1, x2, x3 = self.coords
        return np.array([x1, x2, (x0 - x3) / 2.0])

    def __eq__(self, other):
        if not isinstance(other, HPoint):
            return NotImplemented
        return bool(np.allclose(self.coords, other.coords, rtol=1e-10, atol=1e-10))

    __hash__ = None

    def __repr__(self):
        return "HPoint(" + ", ".join(f"{c:.6g}" for c in self.coords) + ")"


ORIGIN = HPoint((1.0, 0.0, 0.0, 1.0))


class AbsPoint:
    """A point of the absolute, stored as a unit vector of R^3."""
    __slots__ = ("xi",)

    def __init__(self, xi):
        v = np.array(xi, dtype=float).reshape(3)
        n = np.linalg.norm(v)
        if n == 0.0 or not np.isfinite(n):
            raise InputError(f"Not a direction: {xi!r}")
        v /= n
        v.setflags(write=False)
        object.__setattr__(self, "xi", v)

    def __setattr__(self, name, value):
        raise AttributeError("AbsPoint is immutable")

    @classmethod
    def from_cp1(cls, q: CP1Point) -> "AbsPoint":
        u, v = q.vector
        w = u * np.conj(v)
        return cls((2.0 * w.real, 2.0 * w.imag, abs(u) ** 2 - abs(v) ** 2))

    @property
    def cp1(self) -> CP1Point:
        x, y, z = self.xi
        if z <= -1.0 + 1e-15:
            return CP1Point((0.0, 1.0))
        u = np.sqrt((1.0 + z) / 2.0)
        return CP1Point((u, (x - 1j * y) / (2.0 * u)))

    def __eq__(self, other):
        if not isinstance(other, AbsPoint):
            return NotImplemented
        return bool(np.allclose(self.xi, other.xi, rtol=0.0, atol=1e-9))

    __hash__ = None

    def label(self) -> str:
        return self.cp1.label()

    def __repr__(self):
        return f"AbsPoint({self.label()})"


@dataclass(frozen=True)
class PolarCoord:
    """Geodesic polar coordinates about the origin; phi is None at rho = 0."""
    rho: float
    phi: Optional[AbsPoint]
    infinite: bool = False

    def to_hpoint(self) -> HPoint:
        if self.infinite:
            raise InputError("A point of the absolute has no hyperboloid coordinates")
        return from_polar(self.rho, self.phi)

    def to_ball(self) -> "BallPoint":
        if self.infinite:
            return BallPoint(self.phi.xi, boundary=True)
        if self.phi is None:
            return BallPoint((0.0, 0.0, 0.0))
        r = np.tanh(self.rho / 2.0)
        if r >= 1.0:
            return BallPoint(self.phi.xi, boundary=True)
        return BallPoint(r * self.phi.xi)


class RotationElt:
    """An element of SO(3) = SU(2)/{+-1} as a unit quaternion up to sign.

    The quaternion (q0, q1, q2, q3) stands for the SU(2) matrix
    [[q0 + i q1, q2 + i q3], [-q2 + i q3, q0 - i q1]]; its first nonzero
    component is kept positive.
    """
    __slots__ = ("q",)

    def __init__(self, q):
        v = np.array(q, dtype=float).reshape(4)
        n = np.linalg.norm(v)
        if n == 0.0:
            raise InputError("The zero quaternion is not a rotation")
        v /= n
        lead = np.flatnonzero(np.abs(v) > 1e-12)[0]
        if v[lead] < 0:
            v = -v
        v.setflags(write=False)
        object.__setattr__(self, "q", v)

    def __setattr__(self, name, value):
        raise AttributeError("RotationElt is immutable")

    @classmethod
    def identity(cls) -> "RotationElt":
        return cls((1.0, 0.0, 0.0, 0.0))

    @classmethod
    def from_unitary(cls, U) -> "RotationElt":
        U = np.asarray(U, dtype=complex)
        U = U / np.sqrt(np.linalg.det(U))
        alpha, beta = U[0, 0], U[0, 1]
        return cls((alpha.real, alpha.imag, beta.real, beta.imag))

    def to_su2(self) -> np.ndarray:
        q0, q1, q2, q3 = self.q
        return np.array([[q0 + 1j * q1, q2 + 1j * q3], [-q2 + 1j * q3, q0 - 1j * q1]])

    def to_so3(self) -> np.ndarray:
        """Matrix of v -> U v U* on the spatial part of Hermitian matrices."""
        U = self.to_su2()
        cols = [_spatial_of_hermitian(U @ _hermitian_of_spatial(e) @ U.conj().T) for e in np.eye(3)]
        return np.column_stack(cols)

    def compose(self, other: "RotationElt") -> "RotationElt":
        return RotationElt.from_unitary(self.to_su2() @ other.to_su2())

    def __eq__(self, other):
        if not isinstance(other, RotationElt):
            return NotImplemented
        return bool(min(np.linalg.norm(self.q - other.q), np.linalg.norm(self.q + other.q)) < 1e-9)

    __hash__ = None

    def __repr__(self):
        return "RotationElt(" + ", ".join(f"{c:.6g}" for c in self.q) + ")"


class BallPoint:
    """A point of the closed Poincare ball."""
    __slots__ = ("v", "boundary")

    def __init__(self, v, boundary: bool = False):
        v = np.array(v, dtype=float).reshape(3)
        n = np.linalg.norm(v)
        if boundary:
            v = v / n
        elif n >= 1.0:
            raise InputError(f"Interior ball point must have norm < 1, got {n}")
        v.setflags(write=False)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "boundary", bool(boundary))

    def __setattr__(self, name, value):
        raise AttributeError("BallPoint is immutable")

    def __repr__(self):
        tag = ", boundary" if self.boundary else ""
        return f"BallPoint({self.v[0]:.6g}, {self.v[1]:.6g}, {self.v[2]:.6g}{tag})"


def _require_off_quadric(p: ProjPoint) -> None:
    if on_quadric(p):
        raise OnQuadric(f"{p!r} lies on Q (|det| = {abs(det(p)):.3e})")


def kappa(p: ProjPoint) -> HPoint:
    """A -> A A* / |det A|."""
    _require_off_quadric(p)
    A = p.matrix
    return HPoint.from_hermitian(A @ A.conj().T / abs(det(p)))


def dist(x: HPoint, y: HPoint) -> float:
    x0, x1, x2, x3 = x.coords
    y0, y1, y2, y3 = y.coords
    arg = (x0 * y3 + x3 * y0) / 2.0 - x1 * y1 - x2 * y2
    if arg < 1.0 - 1e-9:
        raise ArgumentBelowOne(f"cosh of a distance came out as {arg!r}")
    if arg > 2.0:
        return float(np.arccosh(arg))
    # 4 sinh^2(d/2) = -det(X - Y), free of the cancellation in arccosh near 1
    dx = x.coords - y.coords
    chord2 = max(dx[1] ** 2 + dx[2] ** 2 - dx[0] * dx[3], 0.0)
    return float(2.0 * np.arcsinh(np.sqrt(chord2) / 2.0))


def rho_of_matrix(p: ProjPoint) -> float:
    """arccosh(|A|^2 / (2 |det A|)), evaluated as log(s1/s2) of the singular values."""
    _require_off_quadric(p)
    s = np.linalg.svd(p.matrix, compute_uv=False)
    return float(np.log1p((s[0] - s[1]) / s[1]))


def rasst_terms(p: ProjPoint) -> np.ndarray:
    """The ratios z_j^2 / det A in the real chart; they sum to 4."""
    _require_off_quadric(p)
    z = real_chart(p)
    return z ** 2 / det(p)


def rasst_sum(p: ProjPoint) -> float:
    """sum_j |z_j^2 / det A| / 2 = |A|^2 / |det A|, never below 2."""
    return float(np.abs(rasst_terms(p)).sum() / 2.0)


def sqrt_hermitian(H) -> np.ndarray:
    """Positive square root of a positive-definite 2x2 Hermitian matrix.

    sqrt(H) = (H + s I) / sqrt(tr H + 2 s) with s = sqrt(det H).
    """
    H = np.asarray(H, dtype=complex)
    s = np.sqrt(max(np.linalg.det(H).real, 0.0))
    return (H + s * np.eye(2)) / np.sqrt(np.trace(H).real + 2.0 * s)


def polar_decompose(p: ProjPoint) -> Tuple[RotationElt, HPoint]:
    """A = sqrt(H) U up to scale, with H = kappa(A) and U unitary."""
    _require_off_quadric(p)
    A = p.matrix
    H = A @ A.conj().T
    U = np.linalg.solve(sqrt_hermitian(H), A)
    return RotationElt.from_unitary(U), HPoint.from_hermitian(H / abs(det(p)))


def coamoeba(p: ProjPoint) -> RotationElt:
    return polar_decompose(p)[0]


def phi(x: HPoint) -> AbsPoint:
    spatial = x.spatial
    if np.linalg.norm(spatial) < 1e-12:
        raise AtOrigin("The origin has no direction")
    return AbsPoint(spatial)


def to_polar(x: HPoint) -> PolarCoord:
    spatial = x.spatial
    n = float(np.linalg.norm(spatial))
    if n < 1e-12:
        return PolarCoord(rho=float(np.arcsinh(n)), phi=None)
    return PolarCoord(rho=float(np.arcsinh(n)), phi=AbsPoint(spatial))


def from_polar(rho: float, direction: Optional[AbsPoint]) -> HPoint:
    if rho < 0 or not np.isfinite(rho):
        raise InputError(f"Polar radius must be finite and non-negative, got {rho}")
    if direction is None:
        if rho > 1e-12:
            raise InputError("A positive radius needs a direction")
        return ORIGIN
    t = np.cosh(rho)
    x, y, z = np.sinh(rho) * direction.xi
    return HPoint((t + z, x, y, t - z))


def _check_scale(t: float) -> float:
    if not t > 1.0:
        raise BadScale(f"Scale must exceed 1, got {t}")
    return float(np.log(t))


def kappa_t(p: ProjPoint, t: float) -> PolarCoord:
    log_t = _check_scale(t)
    rho = rho_of_matrix(p)
    if rho < _TINY:
        return PolarCoord(rho=0.0, phi=None)
    return PolarCoord(rho=rho / log_t, phi=phi(kappa(p)))


def kappa_t_precise(entries: Sequence, t, digits: int) -> PolarCoord:
    """kappa_t computed in mpmath at ``digits`` significant digits.

    ``entries`` may be mpmath numbers carrying more range than a double, as
    produced for pencil points extremely close to Q. Points of Q map to the
    absolute through their image line.
    """
    with mpmath.workdps(digits):
        if not mpmath.mpf(t) > 1:
            raise BadScale(f"Scale must exceed 1, got {t}")
        a, b, c, d = (mpmath.mpc(z) for z in entries)
        det_abs = abs(a * d - b * c)
        h00 = abs(a) ** 2 + abs(b) ** 2
        h11 = abs(c) ** 2 + abs(d) ** 2
        h01 = a * mpmath.conj(c) + b * mpmath.conj(d)
        spatial = [h01.real, h01.imag, (h00 - h11) / 2]
        norm = mpmath.sqrt(sum(s ** 2 for s in spatial))
        # rank one at the working precision
        if det_abs <= (h00 + h11) * mpmath.mpf(10) ** (5 - digits):
            beta = _rank_one_data(np.array([complex(z) for z in (a, b, c, d)])).beta
            return PolarCoord(rho=float("inf"), phi=AbsPoint.from_cp1(beta), infinite=True)
        rho = mpmath.acosh((h00 + h11) / (2 * det_abs))
        rho_t = float(rho / mpmath.log(t))
        if norm == 0 or rho_t < _TINY:
            return PolarCoord(rho=0.0, phi=None)
        direction = AbsPoint([float(s / norm) for s in spatial])
    return PolarCoord(rho=rho_t, phi=direction)


def boundary_kappa(p: ProjPoint) -> AbsPoint:
    return AbsPoint.from_cp1(q_coords(p).beta)


def H_t(p: ProjPoint, t: float) -> ProjPoint:
    """U exp(h / log t) for the polar factorization A = exp(h) U."""
    log_t = _check_scale(t)
    _require_off_quadric(p)
    A = p.matrix / np.sqrt(abs(det(p)))
    root = sqrt_hermitian(A @ A.conj().T)
    U = np.linalg.solve(root, A)
    w, V = np.linalg.eigh(root)
    scaled = (V * w ** (1.0 / log_t)) @ V.conj().T
    return ProjPoint.from_matrix(scaled @ U)


def isometry_apply(A: ProjPoint, x: HPoint) -> HPoint:
    """Left translation X -> A X A* / |det A|."""
    _require_off_quadric(A)
    M = A.matrix
    return HPoint.from_hermitian(M @ x.matrix @ M.conj().T / abs(det(A)))


def mobius_abs(A: ProjPoint, q: AbsPoint) -> AbsPoint:
    return AbsPoint.from_cp1(mobius(A, q.cp1))


def busemann(q: AbsPoint, x: HPoint) -> float:
    """Busemann function of the boundary point q, zero at the origin."""
    return float(np.log(x.time - q.xi @ x.spatial))


def _axis_frame(g: Tuple[AbsPoint, AbsPoint]) -> np.ndarray:
    """SL2 matrix N sending 0 to g[0] and infinity to g[1]."""
    g1, g2 = g
    if spherical_distance(g1.cp1, g2.cp1) < 1e-9:
        raise CoincidingEndpoints(f"Geodesic endpoints coincide: {g1!r}")
    N = np.column_stack([g2.cp1.vector, g1.cp1.vector])
    return N / np.sqrt(np.linalg.det(N))


def dist_to_geodesic(x: HPoint, g: Tuple[AbsPoint, AbsPoint], method: str = "closed") -> float:
    """Distance from x to the geodesic with endpoints g.

    ``closed`` moves g to the axis 0-infinity, where sinh d = |x1 + i x2|;
    ``golden`` minimizes the distance along the geodesic instead.
    """
    N = _axis_frame(g)
    if method == "closed":
        M = np.linalg.inv(N)
        moved = M @ x.matrix @ M.conj().T
        return float(np.arcsinh(abs(moved[0, 1])))
    if method == "golden":
        def along(sigma: float) -> float:
            axis_point = (N * np.exp([sigma, -sigma])) @ N.conj().T
            return dist(x, HPoint.from_hermitian(axis_point))
        found = minimize_scalar(along, bracket=(-1.0, 1.0), method="golden", tol=1e-10)
        return float(found.fun)
    raise InputError(f"Unknown method {method!r}")


def geodesic_point(x: HPoint, y: HPoint, s: float) -> HPoint:
    """The point at fraction s of the geodesic segment from x to y."""
    d = dist(x, y)
    if d < 1e-12:
        return x
    H = (np.sinh((1.0 - s) * d) * x.matrix + np.sinh(s * d) * y.matrix) / np.sinh(d)
    return HPoint.from_hermitian(H)


def to_ball(x: HPoint) -> BallPoint:
    v = x.spatial / (1.0 + x.time)
    if np.linalg.norm(v) >= 1.0:
        return BallPoint(v, boundary=True)
    return BallPoint(v)


def from_ball(b: BallPoint) -> HPoint:
    if b.boundary:
        raise InputError("A boundary point has no hyperboloid coordinates")
    r2 = float(b.v @ b.v)
    t = (1.0 + r2) / (1.0 - r2)
    x, y, z = 2.0 * b.v / (1.0 - r2)
    return HPoint((t + z, x, y, t - z))


def boundary_to_ball(q: AbsPoint) -> BallPoint:
    return BallPoint(q.xi, boundary=True)


def ball_to_boundary(b: BallPoint) -> AbsPoint:
    if not b.boundary:
        raise InputError("Not a boundary point")
    return AbsPoint(b.v)


def fibonacci_sphere(n: int) -> np.ndarray:
    """n nearly evenly spread unit vectors (golden-angle spiral)."""
    k = np.arange(n) + 0.5
    z = 1.0 - 2.0 * k / n
    theta = np.pi * (1.0 + 5 ** 0.5) * k
    r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    return np.column_stack([r * np.cos(theta), r * np.sin(theta), z])
