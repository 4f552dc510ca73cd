"""Runtime settings read from ``CPROJ_*`` environment variables"""

import logging
import os

import equinox as eqx


def parse_bool(value: str) -> bool:
    value = value.lower()

    if value in ("y", "yes", "t", "true", "on", "1"):
        return True
    elif value in ("n", "no", "f", "false", "off", "0"):
        return False
    else:
        raise ValueError(f"Failed to parse {value} as a boolean")


class Settings(eqx.Module):
    seed: int = eqx.field(static=True, default=0)
    sanity_points: int = eqx.field(static=True, default=3)
    crosscheck: bool = eqx.field(static=True, default=True)
    log_level: str = eqx.field(static=True, default="WARNING")


_settings = Settings()


def settings() -> Settings:
    return _settings


def configure(**overrides) -> Settings:
    """Replace the active settings, e.g. ``configure(crosscheck=False)``.

    Returns:
        Settings: the settings that were active before the call
    """
    global _settings
    previous = _settings
    fields = dict(
        seed=previous.seed,
        sanity_points=previous.sanity_points,
        crosscheck=previous.crosscheck,
        log_level=previous.log_level,
    )
    fields.update(overrides)
    _settings = Settings(**fields)
    logging.getLogger("cproj").setLevel(_settings.log_level.upper())
    return previous


def from_environ() -> Settings:
    seed = int(os.environ.get("CPROJ_SEED", "0"))
    points = int(os.environ.get("CPROJ_SANITY_POINTS", "3"))

    if points < 0:
        raise ValueError("Expect a non-negative number of sanity points")

    crosscheck = parse_bool(os.environ.get("CPROJ_CROSSCHECK", "True"))
    level = os.environ.get("CPROJ_LOG_LEVEL", "WARNING")
    configure(seed=seed, sanity_points=points, crosscheck=crosscheck, log_level=level)
    return settings()
