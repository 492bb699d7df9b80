"""Python access to the bblab library."""

from ._core import (
    ConfigError,
    Error,
    bernoulli_variation,
    evaluate_theorem,
    helicoid_scan,
    hessian_identity_residual,
    run_cli,
    surface_defaults,
    surface_keys,
    theorem_battery,
    z_derivatives,
)

__all__ = [
    "ConfigError",
    "Error",
    "bernoulli_variation",
    "evaluate_theorem",
    "helicoid_scan",
    "hessian_identity_residual",
    "run_cli",
    "surface_defaults",
    "surface_keys",
    "theorem_battery",
    "z_derivatives",
]
