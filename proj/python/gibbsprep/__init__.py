"""Classical sampling of high-temperature Gibbs states as stabilizer product states."""

from ._core import (
    BetaMode,
    Configuration,
    GibbsSampler,
    Hamiltonian,
    PauliString,
    chain_tfim,
    gibbs_density,
    grid_zz,
    heisenberg_chain,
    hermitian_part,
    log_partition_estimate,
    product_state_density,
    random_klocal,
    run_criterion,
    run_separability,
    sample_f_k,
    sample_gibbs_state,
    sample_propagator,
    sample_state,
    trace_distance,
    truncated_series_dense,
)

__all__ = [
    "BetaMode",
    "Configuration",
    "GibbsSampler",
    "Hamiltonian",
    "PauliString",
    "chain_tfim",
    "gibbs_density",
    "grid_zz",
    "heisenberg_chain",
    "hermitian_part",
    "log_partition_estimate",
    "product_state_density",
    "random_klocal",
    "run_criterion",
    "run_separability",
    "sample_f_k",
    "sample_gibbs_state",
    "sample_propagator",
    "sample_state",
    "trace_distance",
    "truncated_series_dense",
]
