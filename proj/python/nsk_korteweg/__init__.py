"""Periodic Navier-Stokes-Korteweg / Euler-Korteweg simulator and travelling waves."""

from ._core import (
    Bitangent,
    ConfigError,
    NoBitangentError,
    NoCnoidalWaveError,
    SimulationError,
    __version__,
    bitangent,
    cnoidal_modulus,
    cnoidal_profile,
    elliptic_K,
    initial_state,
    interface_position,
    jacobi_sn,
    kink,
    lambda_decay,
    main,
    minimize_periodic,
    periodic_orbit,
    psi_m,
    sigma,
    simulate,
)

__all__ = [
    "Bitangent",
    "ConfigError",
    "NoBitangentError",
    "NoCnoidalWaveError",
    "SimulationError",
    "__version__",
    "bitangent",
    "cnoidal_modulus",
    "cnoidal_profile",
    "elliptic_K",
    "initial_state",
    "interface_position",
    "jacobi_sn",
    "kink",
    "lambda_decay",
    "main",
    "minimize_periodic",
    "periodic_orbit",
    "psi_m",
    "sigma",
    "simulate",
]
