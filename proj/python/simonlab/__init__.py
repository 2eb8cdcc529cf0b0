"""Truth-table Simon attacks on toy Farfalle modes and Feistel networks."""

from simonlab._core import (
    FieldSpec,
    VectorialFunction,
    __version__,
    binomial_parity,
    concat_functions,
    even_mansour_oracle,
    farfalle,
    forge_sae,
    forge_siv,
    lagrange_interpolate,
    lrw_oracle,
    preimage_spectrum,
    recover_period_space,
    run_experiment,
    s_set_size,
    selftest,
    subcommands,
)

__all__ = [
    "FieldSpec",
    "VectorialFunction",
    "__version__",
    "binomial_parity",
    "concat_functions",
    "even_mansour_oracle",
    "farfalle",
    "forge_sae",
    "forge_siv",
    "lagrange_interpolate",
    "lrw_oracle",
    "preimage_spectrum",
    "recover_period_space",
    "run_experiment",
    "s_set_size",
    "selftest",
    "subcommands",
]
