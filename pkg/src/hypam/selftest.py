"""Example jobs with known outcomes, one group per command."""
import logging
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from hypam.core_proj import Line, ProjPoint
from hypam.errors import EXIT_OK, HypamError, JobError
from hypam.runner import HypamRunner
from hypam.surfaces import borel_plane, trace_plane, trace_quadric_family
from hypam.tools.codecs import FloorDiagramModel, Job, LineModel, Report, SurfaceModel
from hypam.tools.export import read_ply, write_csv
from hypam.tropical import constant_line_diagram, cubic_example_diagram

logger = logging.getLogger(__name__)


@dataclass
class Example:
    name: str
    job: Callable[[], Dict[str, Any]]
    check: Callable[[Report, Path], bool]
    setup: Optional[Callable[[Path], None]] = None


@dataclass
class Outcome:
    command: str
    name: str
    passed: bool
    detail: str = ""


def _line(p, q) -> Dict[str, Any]:
    return LineModel.of(Line(ProjPoint(p), ProjPoint(q))).model_dump()


def geodesic_line():
    return _line([1, 0, 0, 0], [0, 0, 0, 1])


def horosphere_line():
    return _line([1, 0, 0, 1], [0, 1, 0, 0])


def cylinder_line():
    return _line([1, 1, 0, 0], [0, 0, 0, 1])


def _curve(components) -> Dict[str, Any]:
    rows = [[{"re": float(c), "im": 0.0} for c in row] for row in components]
    return {"degree": len(components[0]) - 1, "components": rows}


GEODESIC_CURVE = [[1, 0], [0, 0], [0, 0], [0, 1]]
CYLINDER_CURVE = [[1, 0], [1, 0], [0, 0], [0, 1]]
CONIC = [[0, 1, 0], [1, 0, 0], [0, 0, 1], [0, -1, 0]]


def geodesic_curve():
    return _curve(GEODESIC_CURVE)


def _write_cloud(base: Path) -> None:
    write_csv(base / "cloud.csv", np.array([[0.0, 0.0, 0.0], [0.5, 0.0, 0.0], [0.0, 0.0, -0.25]]),
              [0, 1, 1])


def _read_back(report: Report, base: Path) -> bool:
    points, pieces = read_ply(report.artifacts[0])
    return len(points) == 3 and list(pieces) == [0, 1, 1]


EXAMPLES: Dict[str, List[Example]] = {
    "line-classify": [
        Example("geodesic through the origin",
                lambda: {"inputs": {"line": geodesic_line()}},
                lambda r, _: r.results["class"] == "geodesic"
                and sorted(r.results["endpoints"]) == ["0", "inf"]),
        Example("horosphere at infinity",
                lambda: {"inputs": {"line": horosphere_line()}},
                lambda r, _: r.results["class"] == "horosphere" and r.results["center"] == "inf"
                and abs(r.results["level"]) < 1e-8),
        Example("cylinder about the geodesic 0-inf",
                lambda: {"inputs": {"line": cylinder_line()}},
                lambda r, _: r.results["class"] == "cylinder" and r.results["radius"] > 0),
    ],
    "line-sample": [
        Example("fifty points of a horosphere",
                lambda: {"inputs": {"line": horosphere_line()}, "seed": 7, "count": 50,
                         "out": "horosphere.csv"},
                lambda r, base: r.results["count"] == 50 and (base / "horosphere.csv").exists()),
    ],
    "curve-gauss": [
        Example("a line has constant Gauss maps",
                lambda: {"inputs": {"curve": _curve(CYLINDER_CURVE)}},
                lambda r, _: r.results["degree-"] == 0 and r.results["degree+"] == 0),
        Example("a conic has Gauss maps of degree two",
                lambda: {"inputs": {"curve": _curve(CONIC)}},
                lambda r, _: r.results["degree-"] == 2 and r.results["degree+"] == 2),
    ],
    "curve-critical": [
        Example("every parameter of the geodesic line is critical",
                lambda: {"inputs": {"curve": geodesic_curve()}, "count": 32},
                lambda r, _: len(r.results["critical"]) == 32),
        Example("the cylinder line has no critical parameter",
                lambda: {"inputs": {"curve": _curve(CYLINDER_CURVE)}, "count": 32},
                lambda r, _: r.results["critical"] == []),
    ],
    "surface-member": [
        Example("the origin lies outside the trace family at -4",
                lambda: {"inputs": {"surface": SurfaceModel.of(trace_quadric_family(-4.0)).model_dump(),
                                    "point": {"coords": [1.0, 0.0, 0.0, 1.0]}},
                         "seed": 1, "starts": 16},
                lambda r, _: r.results["member"] is False),
        Example("the trace plane passes over the origin",
                lambda: {"inputs": {"surface": SurfaceModel.of(trace_plane()).model_dump(),
                                    "point": {"coords": [1.0, 0.0, 0.0, 1.0]}},
                         "seed": 1, "starts": 16},
                lambda r, _: r.results["member"] is True),
    ],
    "surface-convexity": [
        Example("the ball complement of the trace family is convex",
                lambda: {"inputs": {"surface": SurfaceModel.of(trace_quadric_family(-4.0)).model_dump(),
                                    "pairs": 3, "steps": 4},
                         "seed": 3, "starts": 16},
                lambda r, _: r.verdicts["convex"]),
    ],
    "surface-fill": [
        Example("the Borel plane fills H^3",
                lambda: {"inputs": {"surface": SurfaceModel.of(borel_plane()).model_dump()},
                         "seed": 5, "count": 4, "starts": 16},
                lambda r, _: r.verdicts["fills"]),
    ],
    "surface-gauss": [
        Example("the Borel plane is nowhere critical",
                lambda: {"inputs": {"surface": SurfaceModel.of(borel_plane()).model_dump(),
                                    "point": {"entries": [{"re": 1.0}, {"re": 0.5}, {"re": 0.0},
                                                          {"re": 1.0}]}}},
                lambda r, _: not r.results["gauss_critical"] and not r.results["jacobian_critical"]),
    ],
    "trop-validate": [
        Example("the constant-line diagram",
                lambda: {"inputs": {"diagram": FloorDiagramModel.of(
                    constant_line_diagram((0, 0, 1), (0, 0, -1))).model_dump()}},
                lambda r, _: r.verdicts["valid"]),
        Example("the cubic with three floors",
                lambda: {"inputs": {"diagram": FloorDiagramModel.of(cubic_example_diagram()).model_dump()}},
                lambda r, _: r.verdicts["valid"]),
    ],
    "trop-theta": [
        Example("two radial segments",
                lambda: {"inputs": {"diagram": FloorDiagramModel.of(
                    constant_line_diagram((0, 0, 1), (0, 0, -1))).model_dump()},
                         "density": 20, "out": "theta.ply"},
                lambda r, _: r.results["points"] > 0 and r.residuals["max_piece_residual"] < 1e-12),
    ],
    "trop-converge": [
        Example("the geodesic line near its diagram",
                lambda: {"inputs": {"line": geodesic_line(), "log_scales": [2, 4, 6]}, "density": 200},
                lambda r, _: r.results["final"] < 0.1),
    ],
    "export": [
        Example("CSV to PLY",
                lambda: {"inputs": {"cloud": "cloud.csv"}, "out": "cloud.ply"},
                _read_back, setup=_write_cloud),
    ],
}


def run_examples(command: Optional[str] = None) -> List[Outcome]:
    """Run the examples of one command, or of all of them."""
    if command is not None and command not in EXAMPLES:
        raise JobError(f"No examples for {command!r}")
    selected = {command: EXAMPLES[command]} if command else EXAMPLES
    outcomes: List[Outcome] = []
    for name, examples in selected.items():
        for example in examples:
            with tempfile.TemporaryDirectory() as tmp:
                base = Path(tmp)
                try:
                    if example.setup is not None:
                        example.setup(base)
                    report = HypamRunner(base).run(Job(command=name, **example.job()))
                    passed = report.exit_code == EXIT_OK and bool(example.check(report, base))
                    detail = "" if passed else f"exit {report.exit_code}: {report.results}"
                except (HypamError, KeyError, IndexError) as exc:
                    passed, detail = False, f"{type(exc).__name__}: {exc}"
            logger.info("%s / %s: %s", name, example.name, "ok" if passed else "FAILED")
            outcomes.append(Outcome(name, example.name, passed, detail))
    return outcomes
