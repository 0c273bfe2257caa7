"""Job dispatch.

``HypamRunner`` reads the command catalogue from ``config/commands.yaml``
and binds every entry to the method registered for it with ``@command``.
"""
import json
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import numpy as np
import yaml
from pydantic import ValidationError

from hypam import __version__
from hypam.core_proj import CP1Point
from hypam.curves import critical_candidates, dist_to_R, gauss, gauss_degree_estimate
from hypam.errors import (EXIT_OK, EXIT_VERDICT_FAILED, ConfigError, HypamError, InputError,
                          JobError)
from hypam.hyperbolic import AbsPoint
from hypam.line_amoebas import classify_line, sample_line_amoeba
from hypam.settings import CONFIG_DIR, Settings, settings, tolerances, use_settings
from hypam.surfaces import convexity_check, critical_detectors, membership, random_hpoint
from hypam.tools.codecs import (ComplexValue, CurveModel, FloorDiagramModel, HPointModel, Job,
                                LineModel, ProjPointModel, Report, Sym2PointModel, SurfaceModel,
                                TropicalCurveModel, plain)
from hypam.tools.export import read_csv, write_cloud, write_ply
from hypam.tropical import (build_theta, constant_line_diagram, kappa_convergence_check, line_family,
                            tropical_degree, validate_floor_diagram, validate_tropical_curve)

logger = logging.getLogger(__name__)

COMMANDS_FILE = CONFIG_DIR / "commands.yaml"


def command(name: str) -> Callable:
    """Register a runner method as the handler of a catalogue entry."""
    def register(method: Callable) -> Callable:
        method.hypam_command = name
        return method
    return register


@dataclass
class Outcome:
    results: Dict[str, Any] = field(default_factory=dict)
    residuals: Dict[str, float] = field(default_factory=dict)
    verdicts: Dict[str, bool] = field(default_factory=dict)
    artifacts: List[str] = field(default_factory=list)


def load_job(path) -> Job:
    """Parse a job file; relative input paths are later resolved against its directory."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise JobError(f"Cannot read job file {path}: {exc}") from exc
    try:
        return Job(**raw)
    except (TypeError, ValidationError) as exc:
        raise JobError(f"Invalid job in {path}: {exc}") from exc


class HypamRunner:
    """Runs one job per call against the command catalogue."""

    commands_config = COMMANDS_FILE

    def __init__(self, base_dir: Optional[Path] = None):
        self.base_dir = Path(base_dir) if base_dir is not None else Path.cwd()
        try:
            with open(self.commands_config, "r", encoding="utf-8") as fh:
                self.catalogue: Dict[str, Dict[str, Any]] = yaml.safe_load(fh)
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"Cannot read the command catalogue: {exc}") from exc
        self.handlers: Dict[str, Callable[[Job], Outcome]] = {}
        for attr in dir(type(self)):
            name = getattr(getattr(type(self), attr), "hypam_command", None)
            if name is not None:
                self.handlers[name] = getattr(self, attr)
        missing = sorted(set(self.catalogue) - set(self.handlers))
        if missing:
            raise ConfigError(f"Catalogue commands without a handler: {', '.join(missing)}")

    def job_settings(self, job: Job) -> Settings:
        current = settings().with_tolerances(**job.tolerances)
        if job.starts is not None:
            membership_opts = current.membership.model_copy(update={"starts": job.starts})
            current = current.model_copy(update={"membership": membership_opts})
        return current

    def run(self, job: Job) -> Report:
        entry = self.catalogue.get(job.command)
        if entry is None:
            raise JobError(f"Unknown command {job.command!r}; known: {', '.join(sorted(self.catalogue))}")
        missing = [name for name in entry.get("inputs", []) if name not in job.inputs]
        if missing:
            raise JobError(f"{job.command} needs input(s): {', '.join(missing)}")
        if entry.get("sampling") and job.seed is None:
            raise JobError(f"{job.command} samples at random and needs a seed")

        logger.info("Running %s", job.command)
        started = time.perf_counter()
        with use_settings(self.job_settings(job)):
            outcome = self.handlers[job.command](job)
        elapsed = time.perf_counter() - started

        failed = [name for name, ok in outcome.verdicts.items() if not ok]
        if failed:
            logger.info("Verdict(s) failed: %s", ", ".join(failed))
        return Report(command=job.command, version=__version__, seed=job.seed,
                      results=plain(outcome.results), residuals=plain(outcome.residuals),
                      verdicts={k: bool(v) for k, v in outcome.verdicts.items()},
                      artifacts=outcome.artifacts, timing=elapsed,
                      exit_code=EXIT_VERDICT_FAILED if failed else EXIT_OK)

    def input(self, job: Job, name: str, model=None, default=None):
        """A job input, read from a JSON file when given as a path."""
        if name not in job.inputs:
            return default
        raw = job.inputs[name]
        if isinstance(raw, str) and model is not None:
            path = self.base_dir / raw
            try:
                with open(path, "r", encoding="utf-8") as fh:
                    raw = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise JobError(f"Cannot read input {name!r} from {path}: {exc}") from exc
        if model is None:
            return raw
        try:
            return model(**raw).to_domain()
        except (TypeError, ValidationError) as exc:
            raise JobError(f"Invalid input {name!r}: {exc}") from exc

    def artifact(self, job: Job, points, pieces=None) -> List[str]:
        if job.out is None:
            return []
        path = self.base_dir / job.out
        path.parent.mkdir(parents=True, exist_ok=True)
        return [str(write_cloud(path, points, pieces))]

    @command("line-classify")
    def line_classify(self, job: Job) -> Outcome:
        line = self.input(job, "line", LineModel)
        found = classify_line(line)
        return Outcome(results={**found.describe(), "intersection": line.kind.value})

    @command("line-sample")
    def line_sample(self, job: Job) -> Outcome:
        line = self.input(job, "line", LineModel)
        count = job.count if job.count is not None else 1000
        cloud = sample_line_amoeba(line, count, job.seed)
        return Outcome(results={"count": len(cloud), "intersection": line.kind.value},
                       artifacts=self.artifact(job, cloud.ball_array()))

    def _params(self, job: Job) -> List[CP1Point]:
        raw = self.input(job, "params", default=None)
        if raw is None:
            return [CP1Point.from_complex(np.exp(2j * np.pi * k / 8)) for k in range(8)]
        params = []
        for item in raw:
            if item == "inf":
                params.append(CP1Point((1.0, 0.0)))
            else:
                params.append(CP1Point.from_complex(ComplexValue(**item).to_complex()))
        return params

    @command("curve-gauss")
    def curve_gauss(self, job: Job) -> Outcome:
        curve = self.input(job, "curve", CurveModel)
        results: Dict[str, Any] = {"degree": curve.degree}
        for side in ("-", "+"):
            values = [Sym2PointModel.of(gauss(curve, p, side)).model_dump() for p in self._params(job)]
            results[f"gauss{side}"] = values
            results[f"degree{side}"] = gauss_degree_estimate(curve, side)
        return Outcome(results=results)

    @command("curve-critical")
    def curve_critical(self, job: Job) -> Outcome:
        curve = self.input(job, "curve", CurveModel)
        grid = job.count if job.count is not None else settings().curves.grid
        bound = np.sqrt(tolerances().eps_crit)
        rows, rejected = [], []
        for p, ratio in critical_candidates(curve, grid=grid):
            row = {"param": p.label(), "gauss_distance": dist_to_R(gauss(curve, p, "-")),
                   "jacobian_ratio": ratio}
            (rows if ratio < bound else rejected).append(row)
        return Outcome(results={"critical": rows, "rejected": rejected, "grid": grid},
                       verdicts={"detectors_agree": not rejected})

    @command("surface-member")
    def surface_member(self, job: Job) -> Outcome:
        surface = self.input(job, "surface", SurfaceModel)
        point = self.input(job, "point", HPointModel)
        result = membership(surface, point, seed=job.seed)
        return Outcome(results=result.describe(), residuals={"min_value": result.min_value})

    @command("surface-convexity")
    def surface_convexity(self, job: Job) -> Outcome:
        surface = self.input(job, "surface", SurfaceModel)
        pairs = int(self.input(job, "pairs", default=10))
        steps = int(self.input(job, "steps", default=8))
        report = convexity_check(surface, pairs, steps, seed=job.seed)
        return Outcome(results=report.describe(), verdicts={"convex": report.passed})

    @command("surface-fill")
    def surface_fill(self, job: Job) -> Outcome:
        surface = self.input(job, "surface", SurfaceModel)
        count = job.count if job.count is not None else 20
        rng = np.random.default_rng(job.seed)
        radius = settings().membership.r_box
        outside = []
        for k in range(count):
            x = random_hpoint(rng, radius)
            result = membership(surface, x, seed=job.seed + k)
            if not result.member:
                outside.append({"point": list(x.coords), "min_value": result.min_value})
        return Outcome(results={"tested": count, "outside": outside, "degree": surface.degree},
                       verdicts={"fills": not outside})

    @command("surface-gauss")
    def surface_gauss(self, job: Job) -> Outcome:
        surface = self.input(job, "surface", SurfaceModel)
        point = self.input(job, "point", ProjPointModel)
        report = critical_detectors(surface, point)
        results = {"gauss": Sym2PointModel.of(report.gauss_value).model_dump(), **report.describe()}
        return Outcome(results=results, residuals={"gauss_gap": report.gauss_gap,
                                                   "jacobian_ratio": report.jacobian_ratio},
                       verdicts={"detectors_agree": report.agree})

    @command("trop-validate")
    def trop_validate(self, job: Job) -> Outcome:
        if "diagram" in job.inputs:
            violations = validate_floor_diagram(self.input(job, "diagram", FloorDiagramModel))
            results = {"kind": "floor_diagram", "violations": violations}
        elif "tropical_curve" in job.inputs:
            graph = self.input(job, "tropical_curve", TropicalCurveModel)
            violations = validate_tropical_curve(graph)
            results = {"kind": "tropical_curve", "violations": violations}
            if not violations:
                results["degree"] = tropical_degree(graph)
        else:
            raise JobError("trop-validate needs a 'diagram' or a 'tropical_curve' input")
        return Outcome(results=results, verdicts={"valid": not violations})

    @command("trop-theta")
    def trop_theta(self, job: Job) -> Outcome:
        diagram = self.input(job, "diagram", FloorDiagramModel)
        density = job.density if job.density is not None else 200
        theta = build_theta(diagram, density)
        counts = np.bincount(theta.tags, minlength=len(theta.pieces)) if len(theta) else []
        pieces = [{"kind": p.kind, "radii": list(p.radii), "count": int(n)}
                  for p, n in zip(theta.pieces, counts)]
        return Outcome(results={"pieces": pieces, "points": len(theta)},
                       residuals={"max_piece_residual": theta.max_residual()},
                       artifacts=self.artifact(job, theta.points, theta.tags))

    @command("trop-converge")
    def trop_converge(self, job: Job) -> Outcome:
        line = self.input(job, "line", LineModel)
        diagram = self.input(job, "diagram", FloorDiagramModel)
        if diagram is None:
            if len(line.qdata.qpoints) != 2:
                raise InputError("trop-converge needs a line transverse to Q")
            ends = [AbsPoint.from_cp1(q.beta).xi for q in line.qdata.qpoints]
            diagram = constant_line_diagram(*ends)
        log_scales = [float(s) for s in self.input(job, "log_scales", default=[10, 20, 30, 40, 50])]
        density = job.density if job.density is not None else 2000
        report = kappa_convergence_check(line_family(line), diagram,
                                         [math.exp(s) for s in log_scales], density)
        results = {**report.describe(), "log_scales": log_scales}
        results.pop("schedule")
        return Outcome(results=results, residuals={"final_distance": report.distances[-1]},
                       verdicts={"converged": report.passed})

    @command("export")
    def export(self, job: Job) -> Outcome:
        source = self.input(job, "cloud")
        if not isinstance(source, str):
            raise JobError("export needs the path of a CSV cloud as 'cloud'")
        if job.out is None:
            raise JobError("export needs --out")
        points, pieces = read_csv(self.base_dir / source)
        target = self.base_dir / job.out
        target.parent.mkdir(parents=True, exist_ok=True)
        return Outcome(results={"points": len(points)},
                       artifacts=[str(write_ply(target, points, pieces))])


def run_job(job: Job, base_dir: Optional[Path] = None) -> Report:
    """Run a job and fold errors into a report carrying their exit code."""
    try:
        return HypamRunner(base_dir).run(job)
    except HypamError as exc:
        logger.error("%s failed: %s", job.command, exc)
        return Report(command=job.command, version=__version__, seed=job.seed,
                      results={"error": type(exc).__name__, "message": str(exc)},
                      exit_code=exc.exit_code)
