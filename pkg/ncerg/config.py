"""
ncerg Configuration
Numeric tolerances and runtime settings. Environment overrides:
NCERG_THREADS caps experiment parallelism, NCERG_SEED replaces the default seed.
"""

import os
from dataclasses import asdict, dataclass, field, replace
from typing import Dict, Mapping, Optional

from ncerg.exceptions import InvalidParameterError


DEFAULT_SEED = 20240611


@dataclass(frozen=True)
class Tolerances:
    """Tolerances in force for every computation; embedded in reports."""

    # eigenvalues within merge * (1 + ||x||_inf) collapse into one eigenprojection
    merge: float = 1e-9
    projection: float = 1e-9
    selfadjoint: float = 1e-9
    null_space: float = 1e-9
    choi: float = 1e-9
    ds: float = 1e-9
    distribution_boundary: float = 1e-12
    submajorization: float = 1e-10
    bound_slack: float = 1e-9
    commutation: float = 1e-9
    luxemburg_xtol: float = 1e-14
    marcinkiewicz_xtol: float = 1e-10
    budget: float = 1e-12

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class Settings:
    """Runtime settings shared by the lab and the CLI."""

    seed: int = DEFAULT_SEED
    threads: int = 1
    quadrature_order: int = 12
    maximal_grid_points: int = 64
    maximal_grid_range: tuple = (1e-3, 1e3)
    # Cesaro surrogate for the t -> infinity end of the maximal search
    large_t: float = 1e6
    soft_constant_threshold: float = 10.0
    tolerances: Tolerances = field(default_factory=Tolerances)

    def with_overrides(self, **kwargs) -> "Settings":
        return replace(self, **kwargs)


TOLERANCES = Tolerances()


def _read_int(env: Mapping[str, str], name: str, minimum: int) -> Optional[int]:
    raw = env.get(name)
    if raw is None or raw.strip() == "":
        return None
    try:
        value = int(raw)
    except ValueError:
        raise InvalidParameterError(f"{name} must be an integer, got {raw!r}")
    if value < minimum:
        raise InvalidParameterError(f"{name} must be >= {minimum}, got {value}")
    return value


def load_settings(env: Optional[Mapping[str, str]] = None) -> Settings:
    """
    Build Settings from defaults plus environment overrides.

    Args:
        env: Mapping to read from (defaults to os.environ)

    Returns:
        Settings instance
    """
    env = os.environ if env is None else env
    settings = Settings()
    threads = _read_int(env, "NCERG_THREADS", 1)
    seed = _read_int(env, "NCERG_SEED", 0)
    if threads is not None:
        settings = settings.with_overrides(threads=threads)
    if seed is not None:
        settings = settings.with_overrides(seed=seed)
    return settings
