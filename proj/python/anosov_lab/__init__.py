"""Numerical Anosov and Hitchin diagnostics for representations of Fuchsian groups."""

import json

from ._anosov_lab import (
    AnosovError,
    __version__,
    fnv1a_hex,
    is_positive_tuple,
    singular_gaps,
    tau_d,
    veronese,
)
from ._anosov_lab import run as _run


def run(command, config, out=""):
    """Run a command on a config file. Returns (exit_code, report dict)."""
    code, report = _run(command, str(config), str(out))
    return code, json.loads(report)


__all__ = [
    "AnosovError",
    "__version__",
    "fnv1a_hex",
    "is_positive_tuple",
    "run",
    "singular_gaps",
    "tau_d",
    "veronese",
]
