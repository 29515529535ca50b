"""Counter-propagating SFWM photon-pair source model (Python front end)."""

from ._core import (  # noqa: F401
    ConfigError,
    ConvergenceError,
    ModeNotGuided,
    PhysicsError,
    SourceConfig,
    SourceModel,
    UnsupportedConfiguration,
    brightness,
    dispersion_sample,
    erf,
    faddeeva,
    generate_figure,
    guided_modes,
    intermodal_offsets,
    jsa,
    phi_p,
    purity,
    run_cli,
    sellmeier_index,
    sinc,
)

__version__ = "0.1.0"
