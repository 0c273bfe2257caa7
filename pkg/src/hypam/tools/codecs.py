"""JSON schemas for the objects a job can carry, and their domain conversions."""
import math
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from hypam.core_proj import Line, ProjPoint
from hypam.curves import RationalCurve, Sym2Point
from hypam.errors import InvalidSurface
from hypam.hyperbolic import AbsPoint, HPoint, PolarCoord, RotationElt
from hypam.surfaces import Surface
from hypam.tropical import (FloorDiagram, FloorEdge, FloorVertex, TropicalCurveGraph, TropicalEdge,
                            TropicalVertex)


class Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ComplexValue(Strict):
    re: float
    im: float = 0.0

    @classmethod
    def of(cls, z: complex) -> "ComplexValue":
        z = complex(z)
        return cls(re=z.real, im=z.imag)

    def to_complex(self) -> complex:
        return complex(self.re, self.im)


def _complex_list(values) -> List[ComplexValue]:
    return [ComplexValue.of(z) for z in values]


class ProjPointModel(Strict):
    """[a:b:c:d] as four re/im pairs."""
    entries: List[ComplexValue] = Field(..., min_length=4, max_length=4)

    @classmethod
    def of(cls, p: ProjPoint) -> "ProjPointModel":
        return cls(entries=_complex_list(p.entries))

    def to_domain(self) -> ProjPoint:
        return ProjPoint([z.to_complex() for z in self.entries])


class LineModel(Strict):
    points: List[ProjPointModel] = Field(..., min_length=2, max_length=2)

    @classmethod
    def of(cls, l: Line) -> "LineModel":
        return cls(points=[ProjPointModel.of(p) for p in l.basis])

    def to_domain(self) -> Line:
        return Line(*(p.to_domain() for p in self.points))


class HPointModel(Strict):
    coords: Tuple[float, float, float, float]

    @classmethod
    def of(cls, x: HPoint) -> "HPointModel":
        return cls(coords=tuple(float(c) for c in x.coords))

    def to_domain(self) -> HPoint:
        return HPoint(self.coords)


class AbsPointModel(Strict):
    xi: Tuple[float, float, float]

    @classmethod
    def of(cls, q: AbsPoint) -> "AbsPointModel":
        return cls(xi=tuple(float(c) for c in q.xi))

    def to_domain(self) -> AbsPoint:
        return AbsPoint(self.xi)


class PolarCoordModel(Strict):
    rho: Union[float, Literal["inf"]]
    phi: Optional[Tuple[float, float, float]] = None

    @classmethod
    def of(cls, p: PolarCoord) -> "PolarCoordModel":
        phi = tuple(float(c) for c in p.phi.xi) if p.phi is not None else None
        return cls(rho="inf" if p.infinite else p.rho, phi=phi)

    def to_domain(self) -> PolarCoord:
        phi = AbsPoint(self.phi) if self.phi is not None else None
        if math.isinf(float(self.rho)):
            return PolarCoord(rho=math.inf, phi=phi, infinite=True)
        return PolarCoord(rho=float(self.rho), phi=phi)


class RotationModel(Strict):
    quaternion: Tuple[float, float, float, float]

    @classmethod
    def of(cls, r: RotationElt) -> "RotationModel":
        return cls(quaternion=tuple(float(c) for c in r.q))

    def to_domain(self) -> RotationElt:
        return RotationElt(self.quaternion)


class Sym2PointModel(Strict):
    entries: List[ComplexValue] = Field(..., min_length=3, max_length=3)

    @classmethod
    def of(cls, p: Sym2Point) -> "Sym2PointModel":
        return cls(entries=_complex_list(p.entries))

    def to_domain(self) -> Sym2Point:
        return Sym2Point([z.to_complex() for z in self.entries])


class CurveModel(Strict):
    degree: int = Field(..., ge=1)
    components: List[List[ComplexValue]] = Field(..., min_length=4, max_length=4)

    @field_validator("components")
    @classmethod
    def _common_length(cls, components, info):
        degree = info.data.get("degree")
        if degree is not None and any(len(c) != degree + 1 for c in components):
            raise ValueError(f"every component needs degree + 1 = {degree + 1} coefficients")
        return components

    @classmethod
    def of(cls, C: RationalCurve) -> "CurveModel":
        return cls(degree=C.degree, components=[_complex_list(row) for row in C.coeffs])

    def to_domain(self) -> RationalCurve:
        return RationalCurve([[z.to_complex() for z in row] for row in self.components])


class Monomial(Strict):
    exp: Tuple[int, int, int, int]
    re: float
    im: float = 0.0


class SurfaceModel(Strict):
    """A surface given either by monomials or by a polynomial expression in a, b, c, d."""
    degree: Optional[int] = None
    monomials: Optional[List[Monomial]] = None
    expression: Optional[str] = None

    @classmethod
    def of(cls, S: Surface) -> "SurfaceModel":
        return cls(degree=S.degree, monomials=[Monomial(exp=e, re=c.real, im=c.imag)
                                               for e, c in S.monomials])

    def to_domain(self) -> Surface:
        if self.expression is not None:
            S = Surface.from_expression(self.expression)
        elif self.monomials:
            S = Surface([(m.exp, complex(m.re, m.im)) for m in self.monomials])
        else:
            raise InvalidSurface("a surface needs monomials or an expression")
        if self.degree is not None and S.degree != self.degree:
            raise InvalidSurface(f"declared degree {self.degree} but the polynomial has degree {S.degree}")
        return S


class TropicalVertexModel(Strict):
    position: List[float]
    genus: int = 0


class TropicalEdgeModel(Strict):
    start: Optional[int] = None
    end: Optional[int] = None
    direction: List[int]
    weight: int = 1
    length: Union[float, Literal["inf"]] = "inf"
    anchor: Optional[List[float]] = None


class TropicalCurveModel(Strict):
    dim: int = Field(..., ge=1)
    vertices: List[TropicalVertexModel] = []
    edges: List[TropicalEdgeModel] = []

    def to_domain(self) -> TropicalCurveGraph:
        vertices = tuple(TropicalVertex(tuple(v.position), v.genus) for v in self.vertices)
        edges = tuple(TropicalEdge(start=e.start, end=e.end, direction=tuple(e.direction), weight=e.weight,
                                   length=math.inf if e.length == "inf" else float(e.length),
                                   anchor=tuple(e.anchor) if e.anchor is not None else None)
                      for e in self.edges)
        return TropicalCurveGraph(dim=self.dim, vertices=vertices, edges=edges)


class FloorVertexModel(Strict):
    r: Union[float, Literal["inf"]]
    bidegree: Optional[Tuple[int, int]] = None
    delta: Optional[int] = None


class FloorEdgeModel(Strict):
    v1: int
    v2: int
    phi: Tuple[float, float, float]
    w: int = 1


class FloorDiagramModel(Strict):
    degree: int
    vertices: List[FloorVertexModel] = []
    edges: List[FloorEdgeModel] = []

    @classmethod
    def of(cls, diagram: FloorDiagram) -> "FloorDiagramModel":
        vertices = [FloorVertexModel(r="inf" if math.isinf(v.width) else v.width,
                                     bidegree=v.bidegree, delta=v.delta) for v in diagram.vertices]
        edges = [FloorEdgeModel(v1=e.v1, v2=e.v2, phi=e.phi, w=e.weight) for e in diagram.edges]
        return cls(degree=diagram.degree, vertices=vertices, edges=edges)

    def to_domain(self) -> FloorDiagram:
        vertices = tuple(FloorVertex(width=math.inf if v.r == "inf" else float(v.r),
                                     bidegree=v.bidegree, delta=v.delta) for v in self.vertices)
        edges = tuple(FloorEdge(e.v1, e.v2, tuple(e.phi), e.w) for e in self.edges)
        return FloorDiagram(degree=self.degree, vertices=vertices, edges=edges)


class Job(Strict):
    """One CLI invocation: a command with its inputs, overrides and seed."""
    command: str
    inputs: Dict[str, Any] = {}
    tolerances: Dict[str, float] = {}
    seed: Optional[int] = Field(None, ge=0, lt=2 ** 64)
    out: Optional[str] = None
    density: Optional[int] = Field(None, ge=1)
    count: Optional[int] = Field(None, ge=0)
    starts: Optional[int] = Field(None, ge=1)


class Report(Strict):
    command: str
    version: str
    seed: Optional[int] = None
    results: Dict[str, Any] = {}
    residuals: Dict[str, float] = {}
    verdicts: Dict[str, bool] = {}
    artifacts: List[str] = []
    timing: float = 0.0
    exit_code: int = 0


def plain(value):
    """Convert numpy scalars, arrays and domain values into JSON-ready Python objects."""
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return plain(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        f = float(value)
        return f if math.isfinite(f) else str(f)
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": float(value.real), "im": float(value.imag)}
    return value
