"""Cooperative spectrum sensing under noise uncertainty: simulator and theory."""

from ._core import *  # noqa: F401,F403
from ._core import __version__

COMBINERS = ("slc", "mrc", "sls")


def scenario(**fields):
    """Scenario from keyword overrides, parsed with the same rules as scenario files."""
    overrides = []
    for key, value in fields.items():
        if isinstance(value, (list, tuple)):
            value = ",".join(str(v) for v in value)
        elif value is None:
            value = "none"
        overrides.append(f"{key}={value}")
    return parse_scenario_text("", overrides)
