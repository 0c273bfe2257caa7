"""Tolerances, budgets and their overrides.

Defaults live in ``config/defaults.yaml`` next to this module. The active
settings are held in a context variable so that a job (or a test) can run
under modified tolerances without touching global state::

    with override(eps_q=1e-6):
        classify_line(line)
"""
import logging
import os
from contextlib import contextmanager
from contextvars import ContextVar
from functools import lru_cache
from pathlib import Path
from typing import Iterator, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from hypam.errors import ConfigError

logger = logging.getLogger(__name__)

CONFIG_DIR = Path(__file__).parent / "config"
DEFAULTS_FILE = CONFIG_DIR / "defaults.yaml"
THREADS_ENV = "HYPAM_THREADS"


class Tolerances(BaseModel):
    """Numerical thresholds shared by all modules."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    eps_proj: float = Field(1e-9, gt=0, description="Equality of canonical projective points.")
    eps_q: float = Field(1e-8, gt=0, description="|det| below which a point lies on Q.")
    eps_disc: float = Field(1e-8, gt=0, description="Relative discriminant deciding tangency.")
    eps_rank: float = Field(1e-8, gt=0, description="Smallest singular value of a spanning pair.")
    eps_antipode: float = Field(1e-7, gt=0, description="Spherical distance deciding geodesic lines.")
    eps_geo: float = Field(1e-7, gt=0, description="Cylinder radius reported as a geodesic.")
    radius_check: float = Field(1e-6, gt=0, description="Allowed spread of verified cylinder radii.")
    tau_member: float = Field(1e-10, gt=0, description="Membership threshold on min |q|^2.")
    eps_on: float = Field(1e-8, gt=0, description="Relative |p(A)| for points on a surface.")
    eps_sm: float = Field(1e-8, gt=0, description="Relative gradient norm for smooth points.")
    eps_crit: float = Field(1e-8, gt=0, description="Criticality threshold of the Gauss detectors.")
    tol_conv: float = Field(0.1, gt=0, description="Final Hausdorff distance of a converging family.")
    eps_root: float = Field(1e-6, gt=0, description="Neighbourhood of Q-roots excluded from sampling.")


class MembershipOptions(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    starts: int = Field(64, ge=1)
    r_box: float = Field(3.0, gt=0)
    rejection_budget: int = Field(10000, ge=1)


class CurveOptions(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    grid: int = Field(512, ge=8)


class TropicalOptions(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    u_max: float = Field(12.0, gt=0, description="Largest rescaled radius sampled on a pencil.")
    extra_digits: int = Field(30, ge=10, description="Guard digits for high-precision kappa_t.")


class Settings(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    tolerances: Tolerances = Tolerances()
    membership: MembershipOptions = MembershipOptions()
    curves: CurveOptions = CurveOptions()
    tropical: TropicalOptions = TropicalOptions()
    threads: int = Field(1, ge=1)

    def with_tolerances(self, **overrides: float) -> "Settings":
        unknown = sorted(set(overrides) - set(Tolerances.model_fields))
        if unknown:
            raise ConfigError(f"Unknown tolerance(s): {', '.join(unknown)}")
        try:
            tol = Tolerances(**{**self.tolerances.model_dump(), **overrides})
        except ValidationError as exc:
            raise ConfigError(str(exc)) from exc
        return self.model_copy(update={"tolerances": tol})


def load_settings(path: Optional[Path] = None) -> Settings:
    """Read settings from a YAML file, then apply the environment."""
    path = Path(path) if path is not None else DEFAULTS_FILE
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = yaml.safe_load(fh) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"Cannot read settings from {path}: {exc}") from exc

    threads = os.environ.get(THREADS_ENV)
    if threads:
        try:
            raw["threads"] = int(threads)
        except ValueError as exc:
            raise ConfigError(f"{THREADS_ENV} must be an integer, got {threads!r}") from exc

    try:
        settings_ = Settings(**raw)
    except ValidationError as exc:
        raise ConfigError(str(exc)) from exc
    logger.debug("Loaded settings from %s (threads=%d)", path, settings_.threads)
    return settings_


@lru_cache(maxsize=1)
def default_settings() -> Settings:
    return load_settings()


_active: ContextVar[Optional[Settings]] = ContextVar("hypam_settings", default=None)


def settings() -> Settings:
    """The settings in effect for the current context."""
    current = _active.get()
    return current if current is not None else default_settings()


def tolerances() -> Tolerances:
    return settings().tolerances


@contextmanager
def use_settings(new: Settings) -> Iterator[Settings]:
    token = _active.set(new)
    try:
        yield new
    finally:
        _active.reset(token)


@contextmanager
def override(**tolerance_overrides: float) -> Iterator[Settings]:
    """Run a block under modified tolerances."""
    with use_settings(settings().with_tolerances(**tolerance_overrides)) as new:
        yield new
