"""Rational curves in CP^3 and their Gauss maps.

A curve of degree d is given by four binary forms of degree d in (s:t),
each stored as its coefficients on s^(d-k) t^k, k = 0..d. The tangent line
at a parameter meets Q in a pair of points; the unordered pairs of their
kernels (side "-") or images (side "+") define the Gauss maps into
Sym^2(CP^1) = CP^2. A parameter is critical for kappa on the curve exactly
when the "-" value lies in the real locus R of antipodal pairs.
"""
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize
from scipy.spatial import cKDTree

from hypam.core_proj import (CP1Point, Line, ProjPoint, QKind, _rank_one_data, binary_roots,
                             canonical_vector, fs_distance, spherical_distance)
from hypam.errors import (DegenerateSpan, IllConditioned, InputError, InvalidCurve,
                          SingularParameter, ZeroVector)
from hypam.hyperbolic import AbsPoint, _spatial_of_hermitian, fibonacci_sphere, kappa
from hypam.line_amoebas import PointCloud
from hypam.settings import settings, tolerances

logger = logging.getLogger(__name__)

SIDES = ("-", "+")


class Sym2Point:
    """An unordered pair {z, z'} of points of CP^1 as a point (e0:e1:e2) of CP^2.

    The pair is the root set of e0 w^2 - e1 w v + e2 v^2; a finite pair reads
    (1 : z + z' : z z').
    """
    __slots__ = ("entries",)

    def __init__(self, entries):
        vector = canonical_vector(entries)
        if vector.shape != (3,):
            raise ZeroVector(f"A point of CP^2 needs three coordinates, got {len(vector)}")
        object.__setattr__(self, "entries", vector)

    def __setattr__(self, name, value):
        raise AttributeError("Sym2Point is immutable")

    @classmethod
    def from_pair(cls, first: CP1Point, second: CP1Point) -> "Sym2Point":
        u1, v1 = first.vector
        u2, v2 = second.vector
        return cls((v1 * v2, u1 * v2 + u2 * v1, u1 * u2))

    def roots(self) -> List[CP1Point]:
        e0, e1, e2 = self.entries
        return binary_roots([e0, -e1, e2])

    @property
    def discriminant(self) -> complex:
        e0, e1, e2 = self.entries
        return complex(e1 * e1 - 4.0 * e0 * e2)

    def is_real(self, eps: Optional[float] = None) -> bool:
        """Fixed by coordinatewise conjugation (the P-real structure on CP^2)."""
        eps = tolerances().eps_crit if eps is None else eps
        return fs_distance(self.entries, np.conj(self.entries)) < eps

    def __eq__(self, other):
        if not isinstance(other, Sym2Point):
            return NotImplemented
        return fs_distance(self.entries, other.entries) < tolerances().eps_proj

    __hash__ = None

    def __repr__(self):
        return "Sym2Point(" + ", ".join(f"{z:.6g}" for z in self.entries) + ")"


def sigma_R(p: Sym2Point) -> Sym2Point:
    """(u:v:w) -> (conj w : -conj v : conj u), fixing the antipodal pairs."""
    e0, e1, e2 = p.entries
    return Sym2Point(np.conj([e2, -e1, e0]))


def dist_to_R(p: Sym2Point) -> float:
    return fs_distance(p.entries, sigma_R(p).entries) / 2.0


def _evaluate(coeffs: np.ndarray, s: complex, t: complex) -> np.ndarray:
    d = coeffs.shape[1] - 1
    k = np.arange(d + 1)
    return coeffs @ (s ** (d - k) * t ** k)


class RationalCurve:
    """(a(s,t) : b(s,t) : c(s,t) : d(s,t)) with coprime components of degree d."""
    __slots__ = ("coeffs", "degree")

    def __init__(self, components: Sequence[Sequence[complex]]):
        coeffs = np.array([np.asarray(c, dtype=complex) for c in components])
        if coeffs.ndim != 2 or coeffs.shape[0] != 4 or coeffs.shape[1] < 2:
            raise InvalidCurve("A curve needs four coefficient arrays of common length d + 1 >= 2")
        if not np.all(np.isfinite(coeffs)) or np.abs(coeffs).max() == 0.0:
            raise InvalidCurve("Curve coefficients must be finite and not all zero")
        coeffs = coeffs / np.linalg.norm(coeffs)
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "degree", coeffs.shape[1] - 1)
        self._check_coprime()
        self._check_off_quadric()

    def __setattr__(self, name, value):
        raise AttributeError("RationalCurve is immutable")

    def _check_coprime(self) -> None:
        weights = np.random.default_rng(20240521).standard_normal(4)
        combined = weights @ self.coeffs
        if np.abs(combined).max() < 1e-12:
            raise InvalidCurve("Curve components are linearly degenerate")
        norms = np.linalg.norm(self.coeffs, axis=1)
        active = norms > 1e-14
        for root in binary_roots(combined):
            s, t = root.vector
            values = np.abs(_evaluate(self.coeffs, s, t))[active] / norms[active]
            if values.max() < 1e-8:
                raise InvalidCurve(f"Components share the root {root!r}")

    def _check_off_quadric(self) -> None:
        if np.linalg.norm(self.det_form()) < tolerances().eps_q:
            raise InvalidCurve("The curve lies in Q")

    def det_form(self) -> np.ndarray:
        """Coefficients of the degree-2d binary form ad - bc along the curve."""
        a, b, c, d = self.coeffs
        return np.convolve(a, d) - np.convolve(b, c)

    def point(self, param: CP1Point) -> ProjPoint:
        s, t = param.vector
        return ProjPoint(_evaluate(self.coeffs, s, t))

    def jet(self, param: CP1Point):
        """Position and derivative in the affine chart of the larger coordinate."""
        s, t = param.vector
        d = self.degree
        k = np.arange(d + 1)
        if abs(t) >= abs(s):
            w = s / t
            position = self.coeffs @ (w ** (d - k))
            exps = np.clip(d - k - 1, 0, None)
            derivative = self.coeffs @ ((d - k) * w ** exps)
        else:
            w = t / s
            position = self.coeffs @ (w ** k)
            derivative = self.coeffs @ (k * w ** np.clip(k - 1, 0, None))
        return position, derivative

    def __repr__(self):
        return f"RationalCurve(degree={self.degree})"


def line_curve(p: ProjPoint, q: ProjPoint) -> RationalCurve:
    """The line s*p + t*q as a degree-1 curve."""
    return RationalCurve(np.column_stack([p.entries, q.entries]))


def tangent_line(C: RationalCurve, param: CP1Point) -> Line:
    position, derivative = C.jet(param)
    try:
        return Line(ProjPoint(position), ProjPoint(derivative))
    except (DegenerateSpan, ZeroVector) as exc:
        raise SingularParameter(f"No tangent line at {param!r}: {exc}") from exc


def gauss(C: RationalCurve, param: CP1Point, side: str = "-") -> Sym2Point:
    if side not in SIDES:
        raise InputError(f"side must be '-' or '+', got {side!r}")
    qd = tangent_line(C, param).qdata
    if qd.kind.on_quadric:
        raise InputError(f"The tangent line at {param!r} lies in Q")
    pick = (lambda qp: qp.alpha) if side == "-" else (lambda qp: qp.beta)
    if qd.kind is QKind.TANGENT:
        only = pick(qd.qpoints[0])
        return Sym2Point.from_pair(only, only)
    first, second = qd.qpoints
    return Sym2Point.from_pair(pick(first), pick(second))


def _circle_params(n: int) -> List[CP1Point]:
    theta = 2.0 * np.pi * (np.arange(n) + 0.37) / n
    return [CP1Point((np.exp(1j * th), 1.0)) for th in theta]


def gauss_degree_estimate(C: RationalCurve, side: str = "-", threshold: float = 1e-6) -> int:
    """Degree of the Gauss map by interpolation.

    Finds the least k for which a triple of degree-k binary forms f satisfies
    f(x_j) x gauss(x_j) = 0 at all sample parameters, judged by the relative
    smallest singular value of the linear system.
    """
    d = C.degree
    samples = []
    for param in _circle_params(8 * d + 8):
        try:
            samples.append((param.vector[0] / param.vector[1], gauss(C, param, side).entries))
        except (InputError, SingularParameter) as exc:
            logger.debug("Skipping parameter %r: %s", param, exc)
    if len(samples) < 2 * d + 4:
        raise IllConditioned("Too few regular parameters for a degree fit")

    for k in range(0, 4 * d + 1):
        rows = []
        for w, g in samples:
            mono = w ** (k - np.arange(k + 1))
            for i, j in ((0, 1), (0, 2), (1, 2)):
                row = np.zeros(3 * (k + 1), dtype=complex)
                row[i * (k + 1):(i + 1) * (k + 1)] = g[j] * mono
                row[j * (k + 1):(j + 1) * (k + 1)] = -g[i] * mono
                rows.append(row)
        sv = np.linalg.svd(np.array(rows), compute_uv=False)
        ratio = sv[-1] / sv[0]
        logger.debug("Gauss degree fit k=%d: relative residual %.3e", k, ratio)
        if ratio < threshold:
            return k
    raise IllConditioned(f"No Gauss map of degree <= {4 * d} fits the samples")


def jacobian_ratio(C: RationalCurve, param: CP1Point) -> float:
    """sigma_min / sigma_max of the differential of kappa along the curve.

    With M = A^-1 A', the derivative of kappa in the directions h = 1 and
    h = i is, up to an isometry, the traceless Hermitian matrix
    hM + (hM)* - Re(h tr M) I.
    """
    position, derivative = C.jet(param)
    M = np.linalg.solve(position.reshape(2, 2), derivative.reshape(2, 2))
    tr = np.trace(M)
    k1 = M + M.conj().T - tr.real * np.eye(2)
    k2 = 1j * (M - M.conj().T) + tr.imag * np.eye(2)
    jac = np.column_stack([_spatial_of_hermitian(k1), _spatial_of_hermitian(k2)])
    sv = np.linalg.svd(jac, compute_uv=False)
    return float(sv[-1] / sv[0]) if sv[0] > 0 else 0.0


def _grid_params(n: int) -> List[CP1Point]:
    return [AbsPoint(v).cp1 for v in fibonacci_sphere(n)]


def _gauss_gap(C: RationalCurve, param: CP1Point) -> float:
    try:
        return dist_to_R(gauss(C, param, "-"))
    except (InputError, SingularParameter):
        return np.inf


def _refine(C: RationalCurve, start: CP1Point) -> CP1Point:
    u, v = start.vector
    flip = abs(u) > abs(v)
    w0 = v / u if flip else u / v

    def param_of(x):
        w = x[0] + 1j * x[1]
        return CP1Point((1.0, w) if flip else (w, 1.0))

    def objective(x):
        gap = _gauss_gap(C, param_of(x))
        return gap if np.isfinite(gap) else 1.0

    found = minimize(objective, [w0.real, w0.imag], method="Nelder-Mead",
                     options={"xatol": 1e-13, "fatol": 1e-15, "maxiter": 2000})
    return param_of(found.x)


def critical_candidates(C: RationalCurve, grid: Optional[int] = None,
                        tol: Optional[float] = None) -> List[Tuple[CP1Point, float]]:
    """Parameters where the "-" Gauss value lies in R, each with its Jacobian ratio."""
    grid = settings().curves.grid if grid is None else grid
    tol = tolerances().eps_crit if tol is None else tol
    params = _grid_params(grid)
    gaps = np.array([_gauss_gap(C, p) for p in params])

    found = [p for p, g in zip(params, gaps) if g < tol]
    if len(found) < len(params):
        tree = cKDTree(fibonacci_sphere(grid))
        _, neighbours = tree.query(fibonacci_sphere(grid), k=7)
        for i, p in enumerate(params):
            if gaps[i] < tol or not np.isfinite(gaps[i]) or gaps[i] > 0.25:
                continue
            if gaps[i] > gaps[neighbours[i, 1:]].min():
                continue
            refined = _refine(C, p)
            if _gauss_gap(C, refined) < tol and all(spherical_distance(refined, q) > 1e-6 for q in found):
                found.append(refined)

    return [(p, jacobian_ratio(C, p)) for p in found]


def critical_params(C: RationalCurve, grid: Optional[int] = None,
                    tol: Optional[float] = None) -> List[CP1Point]:
    """Parameters where kappa on C is critical by both detectors.

    A Gauss hit whose Jacobian ratio is not below sqrt(tol) is dropped.
    """
    tol = tolerances().eps_crit if tol is None else tol
    bound = np.sqrt(tol)
    confirmed = []
    for p, ratio in critical_candidates(C, grid, tol):
        if ratio < bound:
            confirmed.append(p)
        else:
            logger.warning("Criticality detectors disagree at %r: Jacobian ratio %.3e, dropped", p, ratio)
    return confirmed


def is_everywhere_critical(C: RationalCurve, grid: int = 64, tol: Optional[float] = None) -> bool:
    tol = tolerances().eps_crit if tol is None else tol
    return all(_gauss_gap(C, p) < tol for p in _grid_params(grid))


def boundary_points(C: RationalCurve, atol: float = 1e-6) -> List[AbsPoint]:
    """Distinct points of the absolute in the closure of kappa(C)."""
    found: List[AbsPoint] = []
    for root in binary_roots(C.det_form()):
        beta = _rank_one_data(C.point(root).entries).beta
        q = AbsPoint.from_cp1(beta)
        if all(np.linalg.norm(q.xi - other.xi) > atol for other in found):
            found.append(q)
    return found


def sample_curve_amoeba(C: RationalCurve, n: int, seed: int) -> PointCloud:
    rng = np.random.default_rng(seed)
    roots = binary_roots(C.det_form())
    margin = tolerances().eps_root
    params: List[CP1Point] = []
    while len(params) < n:
        z = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        p = CP1Point(z)
        if all(spherical_distance(p, r) > margin for r in roots):
            params.append(p)
    points = tuple(kappa(C.point(p)) for p in params)
    meta = {"generator": "sample_curve_amoeba", "degree": C.degree, "seed": seed, "count": n}
    return PointCloud(points=points, params=tuple(params), metadata=meta)
