"""
Closed-form transient spectrum as a sum of Lorentzian lines.

Each initially populated photon number ``n`` contributes emission lines at
the differences between the dressed energies of block ``n`` and block
``n - k``. The line weights are products of ``beta_n^2`` with powers of
``sin(theta)`` and ``cos(theta)``, and every line has the detector width
``gamma`` as its half width.

Two weight assignments are supported:

``paper``
    the reference assignment, with ``sin^4(theta_n)`` attached to the
    upper dressed level of block ``n`` and the ``n = 0`` lines centred on
    the bare eigenenergies ``Y_0^+-`` themselves.
``derived``
    the assignment obtained by propagating ``|n, up>`` exactly and
    averaging over ``t``: ``cos^4(theta_n)`` goes with the upper level, the
    lower block contributes ``sin^2(theta_{n-k})`` for its upper level, and
    the ``n = 0`` lines sit at ``Y_0^+- - E_ground``. The time-domain oracle
    reproduces this one.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import trapezoid

from .errors import DomainError
from .fields import PhotonDistribution
from .model import CanonicalParams, dressed_level, ground_energy

__all__ = [
    "PAIRINGS",
    "BRANCHES",
    "WEIGHT_FLOOR",
    "SpectrumConfig",
    "TransitionLine",
    "SpectrumSeries",
    "PeakList",
    "default_nu_grid",
    "transition_lines",
    "evaluate",
    "evaluate_grid",
    "integrated_power",
    "find_peaks",
    "peak_ratio",
    "asymmetry_metric",
]

PAIRINGS = ("paper", "derived")
BRANCHES = ("++", "+-", "-+", "--", "n0+", "n0-")
WEIGHT_FLOOR = 1e-14


def default_nu_grid(p: CanonicalParams, start: float = -12.0, stop: float = 12.0,
                    points: int = 2001) -> np.ndarray:
    """Uniform grid of ``nu`` covering ``omega + g * [start, stop]``."""
    if points < 2 or not stop > start:
        raise DomainError("grid needs stop > start and at least two points")
    return p.omega + p.g * np.linspace(start, stop, points)


@dataclass(frozen=True, eq=False)
class SpectrumConfig:
    gamma: float
    nu_grid: np.ndarray
    k: int = 1
    weight_pairing: str = "paper"
    experimental: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.gamma) and self.gamma > 0):
            raise DomainError(f"detector width gamma must be > 0, got {self.gamma!r}")
        grid = np.array(self.nu_grid, dtype=float).ravel()
        if grid.size == 0 or not np.all(np.isfinite(grid)):
            raise DomainError("nu grid must be non-empty and finite")
        if np.any(np.diff(grid) <= 0):
            raise DomainError("nu grid must be strictly increasing")
        grid.setflags(write=False)
        object.__setattr__(self, "nu_grid", grid)
        if isinstance(self.k, bool) or not isinstance(self.k, (int, np.integer)) or self.k < 1:
            raise DomainError(f"transition order k must be a positive integer, got {self.k!r}")
        # the single-excitation doublets only support k = 1
        if self.k != 1 and not self.experimental:
            raise DomainError("k != 1 requires experimental=True")
        if self.weight_pairing not in PAIRINGS:
            raise DomainError(f"weight_pairing must be one of {PAIRINGS}, got {self.weight_pairing!r}")


@dataclass(frozen=True)
class TransitionLine:
    center: float
    weight: float
    source_n: int
    branch: str

    def to_dict(self) -> dict:
        return {"center": self.center, "weight": self.weight,
                "source_n": self.source_n, "branch": self.branch}


@dataclass(frozen=True, eq=False)
class SpectrumSeries:
    config: SpectrumConfig
    lines: tuple
    nu: np.ndarray
    values: np.ndarray
    params: CanonicalParams
    distribution: dict
    source: str = "analytic"
    metadata: dict = field(default_factory=dict)

    @property
    def samples(self) -> list[tuple[float, float]]:
        return list(zip(self.nu.tolist(), self.values.tolist()))

    @property
    def nu_offset(self) -> np.ndarray:
        """Abscissa ``(nu - omega) / g``."""
        return (self.nu - self.params.omega) / self.params.g


def transition_lines(p: CanonicalParams, d: PhotonDistribution,
                     c: SpectrumConfig) -> tuple[TransitionLine, ...]:
    """Catalog of Lorentzian lines for the initial state ``sum beta_n |n, up>``.

    Lines with weight below ``WEIGHT_FLOOR`` are dropped. Ordering is by
    source photon number, then by branch, and is deterministic.
    """
    probs = d.probabilities
    if not np.any(probs > 0):
        raise DomainError("photon distribution carries no probability")
    k = int(c.k)
    derived = c.weight_pairing == "derived"
    out = []

    def emit(center, weight, n, branch):
        if weight >= WEIGHT_FLOOR:
            out.append(TransitionLine(float(center), float(weight), int(n), branch))

    if probs[0] > 0:
        lvl = dressed_level(p, 0)
        s4 = math.sin(lvl.theta) ** 4
        c4 = math.cos(lvl.theta) ** 4
        if derived:
            e0 = ground_energy(p)
            emit(lvl.upsilon_plus - e0, probs[0] * c4, 0, "n0+")
            emit(lvl.upsilon_minus - e0, probs[0] * s4, 0, "n0-")
        else:
            emit(lvl.upsilon_plus, probs[0] * s4, 0, "n0+")
            emit(lvl.upsilon_minus, probs[0] * c4, 0, "n0-")

    for n in np.flatnonzero(probs):
        n = int(n)
        if n < k:
            continue
        hi = dressed_level(p, n)
        lo = dressed_level(p, n - k)
        s4, c4 = math.sin(hi.theta) ** 4, math.cos(hi.theta) ** 4
        s2, c2 = math.sin(lo.theta) ** 2, math.cos(lo.theta) ** 2
        if derived:
            weights = (c4 * s2, c4 * c2, s4 * s2, s4 * c2)
        else:
            weights = (s4 * c2, s4 * s2, c4 * c2, c4 * s2)
        centers = (
            hi.upsilon_plus - lo.upsilon_plus,
            hi.upsilon_plus - lo.upsilon_minus,
            hi.upsilon_minus - lo.upsilon_plus,
            hi.upsilon_minus - lo.upsilon_minus,
        )
        for center, w, branch in zip(centers, weights, BRANCHES[:4]):
            emit(center, probs[n] * w, n, branch)
    return tuple(out)


def evaluate(lines, gamma: float, nu):
    """``S(nu) = sum_lines w * gamma / (gamma^2 + (nu - center)^2)``.

    Lines are accumulated one at a time in catalog order, so each sample
    depends only on its own ``nu`` and is independent of array chunking.
    """
    if not gamma > 0:
        raise DomainError(f"detector width gamma must be > 0, got {gamma!r}")
    nu = np.asarray(nu, dtype=float)
    g2 = gamma * gamma
    total = np.zeros_like(nu)
    for line in lines:
        total += line.weight * gamma / (g2 + (nu - line.center) ** 2)
    return float(total) if total.ndim == 0 else total


def evaluate_grid(p: CanonicalParams, d: PhotonDistribution, c: SpectrumConfig,
                  workers: int = 1, chunk: int = 256) -> SpectrumSeries:
    lines = transition_lines(p, d, c)
    nu = c.nu_grid
    if workers and workers > 1 and nu.size > chunk:
        pieces = [nu[i:i + chunk] for i in range(0, nu.size, chunk)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = np.concatenate(list(pool.map(lambda x: evaluate(lines, c.gamma, x), pieces)))
    else:
        values = evaluate(lines, c.gamma, nu)
    values = np.atleast_1d(values)
    return SpectrumSeries(config=c, lines=lines, nu=nu, values=values, params=p,
                          distribution=d.summary())


def integrated_power(lines, gamma: float) -> float:
    """Exact area under the spectrum, ``pi * sum(weights)``."""
    if not gamma > 0:
        raise DomainError(f"detector width gamma must be > 0, got {gamma!r}")
    return math.pi * math.fsum(line.weight for line in lines)


@dataclass(frozen=True)
class PeakList:
    peaks: list
    coarse: bool

    @property
    def positions(self) -> list[float]:
        return [nu for nu, _ in self.peaks]

    def __len__(self):
        return len(self.peaks)


def find_peaks(s: SpectrumSeries, min_relative_height: float = 0.0) -> PeakList:
    """Strict local maxima of a sampled spectrum, tallest first.

    ``coarse`` is set when the grid spacing exceeds ``gamma / 2``, in which
    case neighbouring lines may be merged or missed. Maxima lower than
    ``min_relative_height * max(S)`` are discarded.
    """
    nu, y = s.nu, s.values
    if y.size < 3:
        raise DomainError("peak search needs at least three samples")
    idx = np.flatnonzero((y[1:-1] > y[:-2]) & (y[1:-1] > y[2:])) + 1
    if min_relative_height > 0:
        idx = idx[y[idx] >= min_relative_height * y.max()]
    order = sorted(idx.tolist(), key=lambda i: (-y[i], i))
    coarse = bool(np.max(np.diff(nu)) > s.config.gamma / 2)
    return PeakList([(float(nu[i]), float(y[i])) for i in order], coarse)


def peak_ratio(peaks: PeakList) -> float:
    """Height of the tallest peak over the second tallest."""
    if len(peaks) < 2:
        return math.inf
    return peaks.peaks[0][1] / peaks.peaks[1][1]


def asymmetry_metric(lines, gamma: float, nu, omega: float) -> float:
    """``|int (nu - omega) S dnu| / int S dnu`` over the sampled window."""
    nu = np.asarray(nu, dtype=float)
    y = evaluate(lines, gamma, nu)
    return abs(float(trapezoid((nu - omega) * y, nu))) / float(trapezoid(y, nu))
