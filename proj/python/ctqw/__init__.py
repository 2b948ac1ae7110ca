"""Many-particle continuous-time quantum walks on noisy lattices."""

from ._ctqw import (
    CapacityError,
    ConfigError,
    CouplingModel,
    Hamiltonian,
    IndexError,
    IoError,
    JointSpace,
    NoiseSpec,
    NumericError,
    RunConfig,
    density_matrix,
    estimate_memory,
    load_config,
    parse_config,
    purity,
    read_density_snapshot,
    run,
    simulate,
    topology,
    trace_distance,
    validate,
)

__all__ = [
    "CapacityError",
    "ConfigError",
    "CouplingModel",
    "Hamiltonian",
    "IndexError",
    "IoError",
    "JointSpace",
    "NoiseSpec",
    "NumericError",
    "RunConfig",
    "density_matrix",
    "estimate_memory",
    "load_config",
    "parse_config",
    "purity",
    "read_density_snapshot",
    "run",
    "simulate",
    "topology",
    "trace_distance",
    "validate",
]
