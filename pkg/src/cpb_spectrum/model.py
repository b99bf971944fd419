"""
Dressed states of a Cooper-pair box coupled to one cavity mode.

In the charging regime only two charge states of the box matter and the
device behaves as a pseudo-spin with splitting ``E_J``. Under the
rotating-wave approximation the coupled Hamiltonian (hbar = 1)

    H = omega a^dag a + (E_J / 2) sigma_z + g (a sigma_+ + a^dag sigma_-)

splits into 2x2 blocks spanned by ``|n, up>`` and ``|n+1, down>``. Every
quantity here is a closed-form function of the block index ``n`` and the
canonical parameters ``(omega, delta, g)`` with ``delta = E_J - omega``.

Functions accept scalar or array ``t``; photon indices are plain integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SingularCouplingError

__all__ = [
    "DeviceParams",
    "CanonicalParams",
    "DressedLevel",
    "EvolutionAmps",
    "canonicalize",
    "rabi_splitting",
    "eigenenergies",
    "mixing_angle",
    "dressed_level",
    "evolution_amp_A",
    "evolution_amp_B",
    "evolution_amps",
    "ground_energy",
]


@dataclass(frozen=True)
class DeviceParams:
    """Raw circuit parameters of the box and the cavity.

    Energies are angular frequencies (hbar enters only through the
    coupling constant). Units are up to the caller but must be consistent.
    """

    junction_capacitance: float
    gate_capacitance: float
    josephson_energy: float
    cavity_frequency: float
    electron_charge: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        for name in (
            "junction_capacitance",
            "gate_capacitance",
            "josephson_energy",
            "cavity_frequency",
            "electron_charge",
            "hbar",
        ):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be finite and > 0, got {value!r}")

    @property
    def charging_energy(self) -> float:
        """``E_c = e^2 / (2 (C_g + C_J))``."""
        return self.electron_charge**2 / (
            2.0 * (self.gate_capacitance + self.junction_capacitance)
        )


@dataclass(frozen=True)
class CanonicalParams:
    """The working parameter set: cavity frequency, detuning and coupling.

    ``g`` is defined through ``mu_n^2 = delta^2/4 + g^2 (n+1)``. The
    figure-axis scale used in the literature for this device is smaller by
    a factor sqrt(2) and is exposed as :attr:`lambda_paper`.
    """

    omega: float
    delta: float
    g: float

    def __post_init__(self):
        if not (math.isfinite(self.omega) and self.omega > 0):
            raise DomainError(f"omega must be finite and > 0, got {self.omega!r}")
        if not math.isfinite(self.delta):
            raise DomainError(f"delta must be finite, got {self.delta!r}")
        # g = 0 is the decoupled limit; closed forms that divide by g reject it
        if not (math.isfinite(self.g) and self.g >= 0):
            raise DomainError(f"g must be finite and >= 0, got {self.g!r}")

    @property
    def josephson_energy(self) -> float:
        return self.omega + self.delta

    @property
    def lambda_paper(self) -> float:
        return self.g / math.sqrt(2.0)


@dataclass(frozen=True)
class DressedLevel:
    n: int
    mu: float
    upsilon_plus: float
    upsilon_minus: float
    theta: float


@dataclass(frozen=True)
class EvolutionAmps:
    """``U(t)|n, up> = a |n, up> + b |n+1, down>``."""

    a: complex
    b: complex


def canonicalize(raw: DeviceParams) -> CanonicalParams:
    """Reduce circuit parameters to ``(omega, delta, g)``.

    ``g^2 = e^2 C_J^2 omega / (4 hbar C_J (C_J + C_g)^2)``, which makes the
    Rabi splitting of block ``n`` equal to ``sqrt(delta^2/4 + g^2 (n+1))``.
    """
    cj = raw.junction_capacitance
    cg = raw.gate_capacitance
    omega = raw.cavity_frequency
    g2 = raw.electron_charge**2 * cj**2 * omega / (4.0 * raw.hbar * cj * (cj + cg) ** 2)
    return CanonicalParams(omega=omega, delta=raw.josephson_energy - omega, g=math.sqrt(g2))


def _check_n(n) -> int:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise DomainError(f"photon index must be an integer, got {n!r}")
    if n < 0:
        raise DomainError(f"photon index must be >= 0, got {n}")
    return int(n)


def rabi_splitting(p: CanonicalParams, n: int) -> float:
    n = _check_n(n)
    return math.sqrt(p.delta**2 / 4.0 + p.g**2 * (n + 1))


def eigenenergies(p: CanonicalParams, n: int) -> tuple[float, float]:
    """Return ``(upsilon_plus, upsilon_minus) = omega (n + 1/2) +- mu_n``."""
    mu = rabi_splitting(p, n)
    mid = p.omega * (n + 0.5)
    return mid + mu, mid - mu


def ground_energy(p: CanonicalParams) -> float:
    """Energy of the uncoupled state ``|0, down>``, ``-E_J / 2``."""
    return -0.5 * (p.omega + p.delta)


def mixing_angle(p: CanonicalParams, n: int) -> float:
    """Dressing angle of block ``n``, in ``(0, pi/2)``.

    ``tan(theta_n) = (2 mu_n - delta) / (2 g sqrt(n+1))``. For large positive
    detuning the numerator is evaluated as ``4 g^2 (n+1) / (2 mu_n + delta)``
    to avoid cancellation.
    """
    n = _check_n(n)
    if p.g <= 0:
        raise SingularCouplingError("mixing angle is undefined for g = 0")
    mu = rabi_splitting(p, n)
    coupling = 2.0 * p.g * math.sqrt(n + 1)
    if p.delta > 0:
        num = 4.0 * p.g**2 * (n + 1) / (2.0 * mu + p.delta)
    else:
        num = 2.0 * mu - p.delta
    return math.atan2(num, coupling)


def dressed_level(p: CanonicalParams, n: int) -> DressedLevel:
    up, um = eigenenergies(p, n)
    return DressedLevel(
        n=int(n),
        mu=rabi_splitting(p, n),
        upsilon_plus=up,
        upsilon_minus=um,
        theta=mixing_angle(p, n),
    )


def evolution_amp_A(p: CanonicalParams, n: int, t):
    """Survival amplitude of ``|n, up>``.

    ``A(n, t) = sin^2(theta_n) e^{-i Y_- t} + cos^2(theta_n) e^{-i Y_+ t}``
    """
    lvl = dressed_level(p, n)
    t = np.asarray(t, dtype=float)
    s2 = math.sin(lvl.theta) ** 2
    c2 = math.cos(lvl.theta) ** 2
    out = s2 * np.exp(-1j * lvl.upsilon_minus * t) + c2 * np.exp(-1j * lvl.upsilon_plus * t)
    return complex(out) if out.ndim == 0 else out


def evolution_amp_B(p: CanonicalParams, n: int, t):
    """Transfer amplitude ``|n, up> -> |n+1, down>``.

    ``B(n, t) = sin(2 theta_n) / 2 * (e^{-i Y_+ t} - e^{-i Y_- t})``
    """
    lvl = dressed_level(p, n)
    t = np.asarray(t, dtype=float)
    half = 0.5 * math.sin(2.0 * lvl.theta)
    out = half * (np.exp(-1j * lvl.upsilon_plus * t) - np.exp(-1j * lvl.upsilon_minus * t))
    return complex(out) if out.ndim == 0 else out


def evolution_amps(p: CanonicalParams, n: int, t: float) -> EvolutionAmps:
    return EvolutionAmps(a=evolution_amp_A(p, n, t), b=evolution_amp_B(p, n, t))
