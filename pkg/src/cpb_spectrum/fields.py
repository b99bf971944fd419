"""Initial photon-number distributions of the cavity field.

Only the probabilities ``beta_n**2`` reach the spectrum, so amplitudes are
stored as real non-negative numbers and field phases are dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import DomainError

__all__ = [
    "PhotonDistribution",
    "binomial_distribution",
    "coherent_distribution",
    "number_state",
    "vacuum",
    "custom_distribution",
    "mean_photons",
    "photon_variance",
    "total_variation",
]

_NORM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class PhotonDistribution:
    """Amplitudes ``beta_0 .. beta_N`` plus a record of how they were built.

    ``provenance`` is a plain dict such as ``{"kind": "binomial", "eta": 0.7,
    "M": 3}``. Two distributions compare equal when their amplitudes agree
    exactly after trailing zeros are stripped; provenance is ignored.
    """

    amplitudes: np.ndarray
    provenance: dict = field(default_factory=lambda: {"kind": "custom"})

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=float).ravel()
        if amps.size == 0:
            raise DomainError("photon distribution needs at least one amplitude")
        if not np.all(np.isfinite(amps)) or np.any(amps < 0):
            raise DomainError("amplitudes must be finite and non-negative")
        norm = float(np.sum(amps * amps))
        if abs(norm - 1.0) > _NORM_TOL:
            raise DomainError(f"sum of beta_n^2 is {norm!r}, expected 1")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "provenance", dict(self.provenance))

    @property
    def kind(self) -> str:
        return self.provenance.get("kind", "custom")

    @property
    def probabilities(self) -> np.ndarray:
        return self.amplitudes**2

    @property
    def support_max(self) -> int:
        """Largest photon number carrying non-zero probability."""
        return int(np.flatnonzero(self.amplitudes)[-1])

    def _trimmed(self) -> np.ndarray:
        return self.amplitudes[: self.support_max + 1]

    def __eq__(self, other):
        if not isinstance(other, PhotonDistribution):
            return NotImplemented
        a, b = self._trimmed(), other._trimmed()
        return a.shape == b.shape and bool(np.all(a == b))

    def __hash__(self):
        return hash(self._trimmed().tobytes())

    def __len__(self):
        return self.amplitudes.size

    def summary(self) -> dict:
        return {
            **self.provenance,
            "length": len(self),
            "mean_photons": mean_photons(self),
        }


def _from_probabilities(probs: np.ndarray, provenance: dict) -> PhotonDistribution:
    probs = np.asarray(probs, dtype=float)
    probs = probs / math.fsum(probs)
    return PhotonDistribution(np.sqrt(probs), provenance)


def binomial_distribution(eta: float, M: int) -> PhotonDistribution:
    """Binomial state ``|eta, M>`` with ``beta_n^2 = C(M,n) eta^n (1-eta)^(M-n)``.

    The pmf comes from ``scipy.stats.binom``, which stays accurate for ``M``
    up to ~1e6. ``eta = 0`` gives the vacuum and ``eta = 1`` the number
    state ``|M>``.
    """
    if isinstance(M, bool) or not isinstance(M, (int, np.integer)) or M < 1:
        raise DomainError(f"M must be a positive integer, got {M!r}")
    eta = float(eta)
    if not (0.0 <= eta <= 1.0):
        raise DomainError(f"eta must lie in [0, 1], got {eta!r}")
    M = int(M)
    n = np.arange(M + 1)
    try:
        probs = stats.binom.pmf(n, M, eta)
    except OverflowError:
        # boost's pmf overflows for subnormal eta; the log form does not
        probs = np.exp(stats.binom.logpmf(n, M, eta))
    return _from_probabilities(probs, {"kind": "binomial", "eta": eta, "M": M})


def coherent_distribution(mean_photons: float, tail_epsilon: float = 1e-12) -> PhotonDistribution:
    """Poisson photon statistics of a coherent state, truncated and renormalised.

    The cutoff ``N`` is the smallest index whose neglected tail
    ``P(n > N)`` is below ``tail_epsilon``.
    """
    alpha2 = float(mean_photons)
    if not (math.isfinite(alpha2) and alpha2 >= 0):
        raise DomainError(f"mean photon number must be >= 0, got {mean_photons!r}")
    if not (tail_epsilon > 0):
        raise DomainError(f"tail_epsilon must be > 0, got {tail_epsilon!r}")
    prov = {"kind": "coherent", "alpha2": alpha2, "tail_epsilon": float(tail_epsilon)}
    if alpha2 == 0:
        return PhotonDistribution(np.ones(1), prov)
    # sf(N) is monotone in N; scan a bracket that certainly contains the cutoff
    upper = int(alpha2 + 40.0 * math.sqrt(alpha2) + 60.0)
    ns = np.arange(upper + 1)
    tail = stats.poisson.sf(ns, alpha2)
    below = np.flatnonzero(tail < tail_epsilon)
    if below.size == 0:
        raise DomainError("could not reach the requested tail mass")
    cutoff = int(below[0])
    return _from_probabilities(stats.poisson.pmf(ns[: cutoff + 1], alpha2), prov)


def number_state(M: int) -> PhotonDistribution:
    if isinstance(M, bool) or not isinstance(M, (int, np.integer)) or M < 0:
        raise DomainError(f"number state index must be a non-negative integer, got {M!r}")
    amps = np.zeros(int(M) + 1)
    amps[-1] = 1.0
    return PhotonDistribution(amps, {"kind": "number", "M": int(M)})


def vacuum() -> PhotonDistribution:
    return PhotonDistribution(np.ones(1), {"kind": "vacuum"})


def custom_distribution(probabilities) -> PhotonDistribution:
    """Distribution from user supplied ``beta_n^2`` values (renormalised)."""
    probs = np.asarray(probabilities, dtype=float)
    if probs.size == 0 or np.any(probs < 0) or not np.all(np.isfinite(probs)):
        raise DomainError("custom probabilities must be finite and non-negative")
    if probs.sum() <= 0:
        raise DomainError("custom probabilities sum to zero")
    return _from_probabilities(probs, {"kind": "custom", "probabilities": probs.tolist()})


def mean_photons(d: PhotonDistribution) -> float:
    n = np.arange(len(d))
    return math.fsum(n * d.probabilities)


def photon_variance(d: PhotonDistribution) -> float:
    n = np.arange(len(d))
    p = d.probabilities
    mean = math.fsum(n * p)
    return math.fsum((n - mean) ** 2 * p)


def total_variation(a: PhotonDistribution, b: PhotonDistribution) -> float:
    """Total-variation distance between two photon-number distributions."""
    size = max(len(a), len(b))
    pa = np.zeros(size)
    pb = np.zeros(size)
    pa[: len(a)] = a.probabilities
    pb[: len(b)] = b.probabilities
    return 0.5 * float(np.sum(np.abs(pa - pb)))
