"""Time-cut XY chain coupled to Lorentz-Drude baths."""

import json

from ._nmq import (
    ChainSpec,
    ControlSpec,
    NmqError,
    PulseCondition,
    __version__,
    bessel_j,
    bessel_zero,
    condition_residual,
    design_pulse,
    energy_gap,
    hamiltonian,
    initial_state,
    parse_real,
    run_config,
    target_state,
)


def run(text, scenario=None, out=None, threads=0):
    """run_config with the manifest decoded."""
    result = run_config(text, scenario=scenario, out=out, threads=threads)
    result["manifest"] = json.loads(result["manifest"])
    return result


__all__ = [
    "ChainSpec",
    "ControlSpec",
    "NmqError",
    "PulseCondition",
    "__version__",
    "bessel_j",
    "bessel_zero",
    "condition_residual",
    "design_pulse",
    "energy_gap",
    "hamiltonian",
    "initial_state",
    "parse_real",
    "run",
    "run_config",
    "target_state",
]
