"""Transient fluorescence spectrum of a Cooper-pair box in a single-mode cavity."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConfigError,
    CutoffError,
    DomainError,
    GridMismatchError,
    ResolutionError,
    SingularCouplingError,
    SpectrumError,
)
from .fields import (  # noqa: E402
    PhotonDistribution,
    binomial_distribution,
    coherent_distribution,
    custom_distribution,
    mean_photons,
    number_state,
    vacuum,
)
from .model import (  # noqa: E402
    CanonicalParams,
    DeviceParams,
    canonicalize,
    dressed_level,
    eigenenergies,
    evolution_amp_A,
    evolution_amp_B,
    mixing_angle,
    rabi_splitting,
)
from .spectrum import (  # noqa: E402
    SpectrumConfig,
    SpectrumSeries,
    TransitionLine,
    default_nu_grid,
    evaluate,
    evaluate_grid,
    find_peaks,
    integrated_power,
    transition_lines,
)
