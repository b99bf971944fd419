"""Exception hierarchy shared by the library and the command line."""


class SpectrumError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 3


class DomainError(SpectrumError, ValueError):
    """An input lies outside the domain of a physical formula."""


class SingularCouplingError(DomainError):
    """Mixing angle requested for a vanishing coupling constant."""


class CutoffError(DomainError):
    """The Fock cutoff cannot represent the requested initial state."""


class ResolutionError(DomainError):
    """Quadrature settings violate one or more accuracy bounds."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class GridMismatchError(DomainError):
    """Two spectra were sampled on different frequency grids."""


class ConfigError(SpectrumError):
    """Malformed or semantically invalid run configuration."""

    exit_code = 2
