"""Surfaces in CP^3 and their amoebas in H^3.

A surface is a homogeneous polynomial p(a, b, c, d). The fibre of kappa over
x is the coset B.SU(2) where B is the positive square root of x, so x lies in
the amoeba exactly when q(z) = p(B.U(z)) has a real zero on the unit sphere
of the real chart (where U(z) runs over the unitary matrices).
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import sympy
from scipy.linalg import null_space
from scipy.optimize import least_squares, minimize

from hypam.core_proj import (CP1Point, ProjPoint, QuadricPoint, binary_roots, chart_matrix, det,
                             fs_distance, on_quadric)
from hypam.curves import Sym2Point
from hypam.errors import (IllConditioned, InputError, InvalidSurface, NoComplementFound,
                          NotOnSurface, OnQuadric, SingularPoint, UnderdeterminedFit)
from hypam.hyperbolic import (AbsPoint, HPoint, _spatial_of_hermitian, from_polar,
                              geodesic_point, kappa, sqrt_hermitian)
from hypam.line_amoebas import PointCloud
from hypam.settings import settings, tolerances

logger = logging.getLogger(__name__)

SYMBOLS = sympy.symbols("a b c d")

_QUADRIC_EXPS = ((1, 0, 0, 1), (0, 1, 1, 0))


def _as_sympy_number(z: complex):
    z = complex(z)
    return sympy.Float(z.real, 17) + sympy.I * sympy.Float(z.imag, 17)


class Surface:
    """The zero set of a homogeneous polynomial in the matrix entries a, b, c, d."""
    __slots__ = ("exps", "coeffs", "degree", "coeff_norm")

    def __init__(self, monomials: Sequence[Tuple[Sequence[int], complex]]):
        merged: Dict[Tuple[int, ...], complex] = {}
        for exp, coeff in monomials:
            key = tuple(int(e) for e in exp)
            if len(key) != 4 or min(key) < 0:
                raise InvalidSurface(f"Exponents must be four non-negative integers, got {exp!r}")
            merged[key] = merged.get(key, 0.0) + complex(coeff)
        merged = {k: v for k, v in merged.items() if v != 0}
        if not merged:
            raise InvalidSurface("The zero polynomial does not define a surface")
        degrees = {sum(k) for k in merged}
        if len(degrees) != 1:
            raise InvalidSurface(f"Polynomial is not homogeneous (degrees {sorted(degrees)})")
        degree = degrees.pop()
        if degree < 1:
            raise InvalidSurface("A nonzero constant does not define a surface")

        exps = np.array(sorted(merged), dtype=int)
        coeffs = np.array([merged[tuple(e)] for e in exps], dtype=complex)
        exps.setflags(write=False)
        coeffs.setflags(write=False)
        object.__setattr__(self, "exps", exps)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "coeff_norm", float(np.linalg.norm(coeffs)))
        if self.is_quadric():
            raise InvalidSurface("The quadric ad - bc itself is excluded")

    def __setattr__(self, name, value):
        raise AttributeError("Surface is immutable")

    @classmethod
    def from_expression(cls, expr: Union[str, sympy.Expr]) -> "Surface":
        """Parse a polynomial such as ``"4*a*d - b**2 - c**2"``."""
        if isinstance(expr, str):
            local = dict(zip(("a", "b", "c", "d"), SYMBOLS))
            try:
                expr = sympy.parse_expr(expr, local_dict=local)
            except (SyntaxError, TypeError, sympy.SympifyError) as exc:
                raise InvalidSurface(f"Cannot parse {expr!r}: {exc}") from exc
        try:
            poly = sympy.Poly(sympy.expand(expr), *SYMBOLS)
        except sympy.PolynomialError as exc:
            raise InvalidSurface(f"Not a polynomial in a, b, c, d: {exc}") from exc
        return cls([(exp, complex(coeff)) for exp, coeff in poly.terms()])

    def to_expression(self) -> sympy.Expr:
        terms = []
        for exp, coeff in zip(self.exps, self.coeffs):
            mono = sympy.Mul(*(s ** int(e) for s, e in zip(SYMBOLS, exp)))
            terms.append(_as_sympy_number(coeff) * mono)
        return sympy.Add(*terms)

    @property
    def monomials(self) -> List[Tuple[Tuple[int, ...], complex]]:
        return [(tuple(int(e) for e in exp), complex(c)) for exp, c in zip(self.exps, self.coeffs)]

    def is_quadric(self) -> bool:
        if self.degree != 2 or len(self.coeffs) != 2:
            return False
        lookup = dict(self.monomials)
        if set(lookup) != set(_QUADRIC_EXPS):
            return False
        ratio = lookup[_QUADRIC_EXPS[1]] / lookup[_QUADRIC_EXPS[0]]
        return abs(ratio + 1.0) < 1e-12

    def evaluate(self, v) -> complex:
        v = np.asarray(v, dtype=complex)
        return complex(self.coeffs @ np.prod(v ** self.exps, axis=1))

    def gradient(self, v) -> np.ndarray:
        """Holomorphic partials (p_a, p_b, p_c, p_d) at v."""
        v = np.asarray(v, dtype=complex)
        grad = np.zeros(4, dtype=complex)
        for j in range(4):
            exps = self.exps.copy()
            factor = exps[:, j].astype(float)
            exps[:, j] = np.clip(exps[:, j] - 1, 0, None)
            grad[j] = self.coeffs @ (factor * np.prod(v ** exps, axis=1))
        return grad

    def __eq__(self, other):
        if not isinstance(other, Surface):
            return NotImplemented
        return self.monomials == other.monomials

    __hash__ = None

    def __repr__(self):
        return f"Surface({self.to_expression()})"


def borel_plane() -> Surface:
    """{c = 0}, the upper triangular matrices; tangent to Q along two rulings."""
    return Surface([((0, 0, 1, 0), 1.0)])


def trace_plane() -> Surface:
    return Surface([((1, 0, 0, 0), 1.0), ((0, 0, 0, 1), 1.0)])


def trace_quadric_family(lam: float) -> Surface:
    """(a + d)^2 - lam (ad - bc).

    Its amoeba misses the open ball about the origin of radius
    2 asinh(sqrt(-lam)/2) when lam < 0 and 2 acosh(sqrt(lam)/2) when lam > 4,
    and fills H^3 for 0 <= lam <= 4.
    """
    lam = complex(lam)
    return Surface([((2, 0, 0, 0), 1.0), ((0, 0, 0, 2), 1.0), ((1, 0, 0, 1), 2.0 - lam),
                    ((0, 1, 1, 0), lam)])


def trace_family_radius(lam: float) -> float:
    if lam < 0:
        return float(2.0 * np.arcsinh(np.sqrt(-lam) / 2.0))
    if lam > 4:
        return float(2.0 * np.arccosh(np.sqrt(lam) / 2.0))
    return 0.0


def plane(normal) -> Surface:
    g = np.asarray(normal, dtype=complex)
    return Surface([(tuple(np.eye(4, dtype=int)[j]), g[j]) for j in range(4) if g[j] != 0])


def tangent_plane(z0: ProjPoint) -> Surface:
    """The plane tangent to Q at a point of Q."""
    if not on_quadric(z0):
        raise InputError(f"{z0!r} is not a point of Q")
    a, b, c, d = z0.entries
    return plane((d, -c, -b, a))


def rotated_quadric(x: AbsPoint, eps: float) -> Surface:
    """ad - bc + eps L1 L2, where L1 = L2 = 0 cuts out the line of Q with image x."""
    if eps == 0:
        raise InvalidSurface("eps = 0 gives back the quadric")
    xu, xv = x.cp1.vector
    l1 = {(1, 0, 0, 0): -xv, (0, 0, 1, 0): xu}
    l2 = {(0, 1, 0, 0): -xv, (0, 0, 0, 1): xu}
    terms = [((1, 0, 0, 1), 1.0), ((0, 1, 1, 0), -1.0)]
    for e1, c1 in l1.items():
        for e2, c2 in l2.items():
            terms.append((tuple(np.add(e1, e2)), eps * c1 * c2))
    return Surface(terms)


def translate_left(S: Surface, B: ProjPoint) -> Surface:
    """The surface {A : p(B A) = 0}, i.e. S moved by the isometry of B^-1."""
    if on_quadric(B):
        raise OnQuadric(f"{B!r} is not invertible")
    a, b, c, d = SYMBOLS
    M = [[_as_sympy_number(z) for z in row] for row in B.matrix]
    substitution = {a: M[0][0] * a + M[0][1] * c, b: M[0][0] * b + M[0][1] * d,
                    c: M[1][0] * a + M[1][1] * c, d: M[1][0] * b + M[1][1] * d}
    expr = sympy.expand(S.to_expression().xreplace(substitution))
    poly = sympy.Poly(expr, *SYMBOLS)
    scale = max(abs(complex(coeff)) for _, coeff in poly.terms())
    terms = [(exp, complex(coeff)) for exp, coeff in poly.terms()
             if abs(complex(coeff)) > 1e-14 * scale]
    return Surface(terms)


@dataclass(frozen=True)
class MembershipResult:
    member: bool
    min_value: float
    witness: np.ndarray
    starts: int
    seed: int = 0

    def describe(self) -> Dict[str, object]:
        return {"member": self.member, "min_value": self.min_value,
                "witness": [float(w) for w in self.witness], "starts": self.starts, "seed": self.seed}


def _fibre_map(x: HPoint) -> np.ndarray:
    """Linear map from the real chart to the entries of B U, with B = sqrt(x)."""
    B = sqrt_hermitian(x.matrix)
    return np.kron(B, np.eye(2)) @ chart_matrix()


def _descend(S: Surface, L: np.ndarray, y0: np.ndarray) -> Tuple[float, np.ndarray]:
    scale = S.coeff_norm ** 2

    def objective(y):
        n = np.linalg.norm(y)
        z = y / n
        v = L @ z
        q = S.evaluate(v)
        dq = S.gradient(v) @ L
        grad = 2.0 * np.real(np.conj(q) * dq) / scale
        grad = (grad - (grad @ z) * z) / n
        return abs(q) ** 2 / scale, grad

    found = minimize(objective, y0, jac=True, method="L-BFGS-B",
                     options={"ftol": 1e-22, "gtol": 1e-15, "maxiter": 500})
    z = found.x / np.linalg.norm(found.x)
    value = abs(S.evaluate(L @ z)) ** 2 / scale
    return float(value), z


def _polish(S: Surface, L: np.ndarray, z0: np.ndarray) -> Tuple[float, np.ndarray]:
    norm = S.coeff_norm

    def residual(y):
        q = S.evaluate(L @ y) / norm
        return [q.real, q.imag, y @ y - 1.0]

    fit = least_squares(residual, z0, method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15)
    z = fit.x / np.linalg.norm(fit.x)
    return float(abs(S.evaluate(L @ z)) ** 2 / norm ** 2), z


def membership(S: Surface, x: HPoint, starts: Optional[int] = None, tau: Optional[float] = None,
               seed: int = 0) -> MembershipResult:
    """Whether x lies in the amoeba of S, decided by the smallest |q|^2 found on S^3."""
    opts = settings()
    starts = opts.membership.starts if starts is None else starts
    tau = opts.tolerances.tau_member if tau is None else tau
    L = _fibre_map(x)
    children = np.random.SeedSequence(seed).spawn(starts)
    initial = [np.random.default_rng(child).standard_normal(4) for child in children]

    if opts.threads > 1:
        with ThreadPoolExecutor(max_workers=opts.threads) as pool:
            results = list(pool.map(lambda y0: _descend(S, L, y0), initial))
    else:
        results = [_descend(S, L, y0) for y0 in initial]

    best = min(range(len(results)), key=lambda i: (results[i][0], i))
    value, witness = results[best]
    if tau <= value < 1e-6:
        value, witness = min((value, witness), _polish(S, L, witness), key=lambda r: r[0])
    logger.debug("Membership at %r: best |q|^2 = %.3e from start %d", x, value, best)
    return MembershipResult(member=value < tau, min_value=value, witness=witness,
                            starts=starts, seed=seed)


def random_hpoint(rng: np.random.Generator, radius: float) -> HPoint:
    direction = AbsPoint(rng.standard_normal(3))
    return from_polar(radius * rng.random(), direction)


@dataclass
class ConvexityReport:
    pairs: int
    steps: int
    rejections: int
    violations: List[Dict[str, object]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def describe(self) -> Dict[str, object]:
        return {"pairs": self.pairs, "steps": self.steps, "rejections": self.rejections,
                "violations": self.violations, "passed": self.passed}


def sample_complement(S: Surface, n: int, seed: int = 0) -> Tuple[List[HPoint], int]:
    """n points outside the amoeba drawn by rejection in the ball of radius r_box.

    Returns the points and the number of draws spent.
    """
    opts = settings().membership
    rng = np.random.default_rng(seed)
    found: List[HPoint] = []
    tried = 0
    while len(found) < n:
        if tried >= opts.rejection_budget:
            raise NoComplementFound(f"No complement point after {tried} draws")
        x = random_hpoint(rng, opts.r_box)
        tried += 1
        if not membership(S, x, seed=seed + tried).member:
            found.append(x)
    logger.info("Found %d complement points in %d draws", n, tried)
    return found, tried


def convexity_check(S: Surface, n_pairs: int, n_steps: int, seed: int = 0) -> ConvexityReport:
    """Test geodesic segments between complement points for members of the amoeba."""
    outside, tried = sample_complement(S, 2 * n_pairs, seed)
    report = ConvexityReport(pairs=n_pairs, steps=n_steps, rejections=tried - len(outside))
    for k in range(n_pairs):
        x, y = outside[2 * k], outside[2 * k + 1]
        for j in range(1, n_steps + 1):
            s = j / (n_steps + 1)
            result = membership(S, geodesic_point(x, y, s), seed=seed + j)
            if result.member:
                report.violations.append({"pair": k, "fraction": s, "min_value": result.min_value})
                logger.info("Convexity violation on pair %d at fraction %.3f", k, s)
                break
    return report


def ray_disjoint_check(S_x: Surface, x: AbsPoint, n: int, seed: int = 0) -> bool:
    """Whether the points at distance 0, 1, ..., n-1 along the ray towards x avoid the amoeba."""
    for k in range(n):
        if membership(S_x, from_polar(float(k), x), seed=seed + k).member:
            logger.info("Ray towards %r meets the amoeba at distance %d", x, k)
            return False
    return True


def _check_regular(S: Surface, A: ProjPoint) -> np.ndarray:
    tol = tolerances()
    if abs(S.evaluate(A.entries)) >= tol.eps_on * S.coeff_norm:
        raise NotOnSurface(f"|p(A)| = {abs(S.evaluate(A.entries)):.3e} at {A!r}")
    grad = S.gradient(A.entries)
    if np.linalg.norm(grad) <= tol.eps_sm * S.coeff_norm:
        raise SingularPoint(f"Vanishing gradient at {A!r}")
    if on_quadric(A):
        raise OnQuadric(f"{A!r} lies on Q")
    return grad


def _gauss_formula(A: np.ndarray, grad: np.ndarray) -> np.ndarray:
    a, b, c, d = A
    pa, pb, pc, pd = grad
    return np.array([1j * (a * pa - b * pb + c * pc - d * pd),
                     -b * pa + a * pb - d * pc + c * pd,
                     1j * (b * pa + a * pb + d * pc + c * pd)])


def gauss_left(S: Surface, A: ProjPoint) -> Sym2Point:
    """The left-translated tangent plane of S at A as a point of CP^2."""
    return Sym2Point(_gauss_formula(A.entries, _check_regular(S, A)))


@dataclass(frozen=True)
class CriticalReport:
    gauss_value: Sym2Point
    gauss_gap: float
    jacobian_ratio: float
    gauss_critical: bool
    jacobian_critical: bool

    @property
    def agree(self) -> bool:
        return self.gauss_critical == self.jacobian_critical

    def describe(self) -> Dict[str, object]:
        return {"gauss_gap": self.gauss_gap, "jacobian_ratio": self.jacobian_ratio,
                "gauss_critical": self.gauss_critical, "jacobian_critical": self.jacobian_critical,
                "agree": self.agree}


def _surface_jacobian_ratio(A: ProjPoint, grad: np.ndarray) -> float:
    tangent = null_space(np.vstack([grad, np.conj(A.entries)]))
    Ainv = np.linalg.inv(A.matrix)
    columns = []
    for k in range(tangent.shape[1]):
        for h in (1.0, 1j):
            M = Ainv @ (h * tangent[:, k]).reshape(2, 2)
            K = M + M.conj().T - np.trace(M).real * np.eye(2)
            columns.append(_spatial_of_hermitian(K))
    sv = np.linalg.svd(np.column_stack(columns), compute_uv=False)
    return float(sv[2] / sv[0]) if sv[0] > 0 else 0.0


def critical_detectors(S: Surface, A: ProjPoint) -> CriticalReport:
    """Both criticality tests for kappa on S at A: the Gauss value and the Jacobian rank."""
    tol = tolerances().eps_crit
    grad = _check_regular(S, A)
    value = Sym2Point(_gauss_formula(A.entries, grad))
    gap = fs_distance(value.entries, np.conj(value.entries))
    ratio = _surface_jacobian_ratio(A, grad)
    report = CriticalReport(gauss_value=value, gauss_gap=gap, jacobian_ratio=ratio,
                            gauss_critical=gap < tol, jacobian_critical=ratio < np.sqrt(tol))
    if not report.agree:
        logger.warning("Criticality detectors disagree at %r: gap %.3e, ratio %.3e", A, gap, ratio)
    return report


def critical_test(S: Surface, A: ProjPoint) -> bool:
    """Whether A is a critical point of kappa on S."""
    return critical_detectors(S, A).gauss_critical


def point_on_plane(R: Surface, rng: np.random.Generator) -> ProjPoint:
    """A random point of a plane, off Q."""
    if R.degree != 1:
        raise InvalidSurface("Not a plane")
    g = R.gradient(np.zeros(4))
    while True:
        r = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        r = r - (g @ r) / (g @ np.conj(g)) * np.conj(g)
        A = ProjPoint(r)
        if not on_quadric(A, eps=1e-3):
            return A


def c_N_generate(n: int) -> List[Sym2Point]:
    """Gauss values of n planes tangent to Q along the ruling with image infinity."""
    if n < 6:
        raise UnderdeterminedFit(f"A conic needs at least 6 points, got {n}")
    values = []
    for theta in np.pi * (np.arange(n) + 0.5) / n:
        alpha = CP1Point((np.cos(theta), np.exp(1j * theta) * np.sin(theta)))
        z0 = QuadricPoint(alpha=alpha, beta=CP1Point((1.0, 0.0))).to_proj()
        N = tangent_plane(z0)
        # (a, b, c, d) with N(A) = 0 and det A = 1
        au, av = z0.entries[1], -z0.entries[0]
        A = ProjPoint((-np.conj(au), -np.conj(av), av, -au))
        values.append(gauss_left(N, A))
    return values


@dataclass(frozen=True)
class ConicReport:
    coefficients: np.ndarray
    fit_residual: float
    rank: int
    conjugation_residual: float
    real_minimum: float

    @property
    def passed(self) -> bool:
        return (self.fit_residual < 1e-8 and self.rank == 3 and self.conjugation_residual < 1e-8
                and self.real_minimum > 1e-3)

    def describe(self) -> Dict[str, object]:
        return {"fit_residual": self.fit_residual, "rank": self.rank,
                "conjugation_residual": self.conjugation_residual,
                "real_minimum": self.real_minimum, "passed": self.passed}


def _veronese(p: np.ndarray) -> np.ndarray:
    x, y, z = p
    return np.array([x * x, y * y, z * z, x * y, x * z, y * z])


def _conic_matrix(c: np.ndarray) -> np.ndarray:
    return np.array([[c[0], c[3] / 2, c[4] / 2],
                     [c[3] / 2, c[1], c[5] / 2],
                     [c[4] / 2, c[5] / 2, c[2]]])


def c_N_conic_check(points: Sequence[Sym2Point], starts: int = 32, seed: int = 0) -> ConicReport:
    """Fit a conic through the points and test it for nondegeneracy and reality."""
    if len(points) < 6:
        raise UnderdeterminedFit(f"A conic needs at least 6 points, got {len(points)}")
    design = np.array([_veronese(p.entries) for p in points])
    _, sv, vh = np.linalg.svd(design)
    if sv[4] / sv[0] < 1e-8:
        raise IllConditioned("The points do not determine a unique conic")
    coeffs = np.conj(vh[-1])
    residual = float(np.linalg.norm(design @ coeffs) / sv[0])
    # phase making the coefficients as real as possible
    k = int(np.argmax(np.abs(coeffs)))
    coeffs = coeffs * np.conj(coeffs[k]) / abs(coeffs[k])
    M = _conic_matrix(coeffs)
    msv = np.linalg.svd(M, compute_uv=False)
    rank = int(np.sum(msv > 1e-8 * msv[0]))
    conj_res = fs_distance(coeffs, np.conj(coeffs))

    def real_value(y):
        r = y / np.linalg.norm(y)
        return abs(r @ M @ r) ** 2

    rng = np.random.default_rng(seed)
    real_min = min(minimize(real_value, rng.standard_normal(3), method="Nelder-Mead",
                            options={"xatol": 1e-10, "fatol": 1e-14}).fun for _ in range(starts))
    logger.debug("Conic fit residual %.3e, rank %d, real minimum %.3e", residual, rank, real_min)
    return ConicReport(coefficients=coeffs, fit_residual=residual, rank=rank,
                       conjugation_residual=conj_res, real_minimum=float(real_min))


def _plane_gauss_matrix(g: np.ndarray) -> np.ndarray:
    """The linear map A -> gauss formula for a plane with constant gradient g."""
    return np.column_stack([_gauss_formula(e, g) for e in np.eye(4, dtype=complex)])


def gauss_left_preimage(R: Surface, w: Sym2Point) -> ProjPoint:
    """The point A of the plane R whose Gauss value formula gives w.

    For w on C_N the solution is a point of Q, so gauss_left on R never
    takes a value of C_N.
    """
    if R.degree != 1:
        raise InvalidSurface("Gauss preimages are computed for planes only")
    g = R.gradient(np.zeros(4))
    G = _plane_gauss_matrix(g)
    system = np.zeros((4, 5), dtype=complex)
    system[:3, :4] = G
    system[:3, 4] = -w.entries
    system[3, :4] = g
    kernel = null_space(system)
    if kernel.shape[1] != 1:
        raise IllConditioned(f"Expected a unique preimage, kernel has dimension {kernel.shape[1]}")
    return ProjPoint(kernel[:4, 0])


def restrict_to_line(S: Surface, P0, P1) -> np.ndarray:
    """Coefficients of the binary form p(s P0 + t P1) on s^(d-k) t^k."""
    P0 = np.asarray(P0, dtype=complex)
    P1 = np.asarray(P1, dtype=complex)
    d = S.degree
    roots_of_unity = np.exp(2j * np.pi * np.arange(d + 1) / (d + 1))
    values = np.array([S.evaluate(w * P0 + P1) for w in roots_of_unity])
    ascending = np.fft.fft(values) / (d + 1)
    return ascending[::-1]


def sample_surface(S: Surface, n: int, seed: int) -> PointCloud:
    """kappa-images of points of S cut out by random lines."""
    rng = np.random.default_rng(seed)
    eps_q = tolerances().eps_q
    points: List[HPoint] = []
    while len(points) < n:
        P0 = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        P1 = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        form = restrict_to_line(S, P0, P1)
        if np.abs(form).max() < 1e-12 * S.coeff_norm:
            continue
        for root in binary_roots(form):
            s, t = root.vector
            A = ProjPoint(s * P0 + t * P1)
            if abs(det(A)) > 10 * eps_q and len(points) < n:
                points.append(kappa(A))
    meta = {"generator": "sample_surface", "degree": S.degree, "seed": seed, "count": n}
    return PointCloud(points=tuple(points), metadata=meta)


def boundary_fiber_points(S: Surface, x: AbsPoint) -> List[QuadricPoint]:
    """Points of S on the line of Q with image x; their image is x itself.

    If that whole line lies in S a single representative is returned.
    """
    beta = x.cp1
    first = np.outer(beta.vector, [0.0, 1.0]).reshape(4)
    second = np.outer(beta.vector, [-1.0, 0.0]).reshape(4)
    form = restrict_to_line(S, first, second)
    if np.abs(form).max() < 1e-12 * S.coeff_norm:
        return [QuadricPoint(alpha=CP1Point((0.0, 1.0)), beta=beta)]
    return [QuadricPoint(alpha=root, beta=beta) for root in binary_roots(form)]
