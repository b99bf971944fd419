import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cpb_spectrum import (
    DomainError,
    PhotonDistribution,
    binomial_distribution,
    coherent_distribution,
    custom_distribution,
    mean_photons,
    number_state,
    vacuum,
)
from cpb_spectrum.fields import photon_variance, total_variation


def binomial_by_recurrence(eta, M):
    # factorial-free oracle: p_{n+1} = p_n * (M - n) / (n + 1) * eta / (1 - eta)
    eta = Fraction(eta)
    p = [(1 - eta) ** M]
    for n in range(M):
        p.append(p[-1] * (M - n) / (n + 1) * eta / (1 - eta))
    return [float(x) for x in p]


def test_binomial_frozen_probabilities():
    d = binomial_distribution(0.7, 3)
    expected = [0.027, 0.189, 0.441, 0.343]
    assert np.allclose(d.probabilities, binomial_by_recurrence(0.7, 3), rtol=1e-13, atol=0)
    assert np.allclose(d.probabilities, expected, rtol=1e-13, atol=0)
    assert len(d) == 4
    assert d.provenance == {"kind": "binomial", "eta": 0.7, "M": 3}


@pytest.mark.parametrize("eta,M", [(0.3, 7), (0.1, 30), (0.55, 12), (0.9, 20)])
def test_binomial_against_recurrence(eta, M):
    d = binomial_distribution(eta, M)
    assert np.allclose(d.probabilities, binomial_by_recurrence(eta, M), rtol=1e-11, atol=1e-300)


def test_binomial_limits_are_exact():
    assert binomial_distribution(0.0, 3) == vacuum()
    assert binomial_distribution(1.0, 3) == number_state(3)
    assert np.array_equal(binomial_distribution(0.0, 3).amplitudes, [1.0, 0.0, 0.0, 0.0])
    assert np.array_equal(binomial_distribution(1.0, 3).amplitudes, [0.0, 0.0, 0.0, 1.0])


def test_symmetric_single_photon():
    d = binomial_distribution(0.5, 1)
    assert np.allclose(d.amplitudes, [1 / math.sqrt(2)] * 2, rtol=1e-15)


@pytest.mark.parametrize("eta,M", [(-0.1, 3), (1.1, 3), (0.5, 0), (0.5, -2), (0.5, 2.5)])
def test_binomial_domain(eta, M):
    with pytest.raises(DomainError):
        binomial_distribution(eta, M)


@given(st.floats(0.0, 1.0), st.integers(1, 400))
def test_binomial_moments(eta, M):
    d = binomial_distribution(eta, M)
    assert abs(math.fsum(d.probabilities) - 1.0) < 1e-12
    assert mean_photons(d) == pytest.approx(eta * M, abs=1e-10 * max(1, M))
    assert photon_variance(d) == pytest.approx(eta * M * (1 - eta), abs=1e-10 * max(1, M))


def test_binomial_large_M():
    d = binomial_distribution(1e-4, 10**5)
    assert np.all(np.isfinite(d.amplitudes))
    assert mean_photons(d) == pytest.approx(10.0, abs=1e-12)


def test_coherent_truncation_and_mean():
    d = coherent_distribution(10.0, 1e-12)
    # N counts retained photon numbers 0 .. N-1
    assert len(d) >= 40
    assert abs(mean_photons(d) - 10.0) < 1e-9
    # the neglected tail really is below epsilon; summed by hand
    term, tail = math.exp(-10.0), 0.0
    for n in range(1, 400):
        term *= 10.0 / n
        if n > d.support_max:
            tail += term
    assert tail < 1e-12
    assert d.provenance["alpha2"] == 10.0 and d.provenance["tail_epsilon"] == 1e-12


def test_coherent_vacuum_limit():
    assert coherent_distribution(0.0, 1e-3) == vacuum()


@pytest.mark.parametrize("eps", [0.0, -1e-9])
def test_coherent_bad_epsilon(eps):
    with pytest.raises(DomainError):
        coherent_distribution(2.0, eps)


def test_coherent_limit_of_binomial():
    tv = total_variation(binomial_distribution(1e-4, 10**5), coherent_distribution(10.0))
    assert tv < 1e-3


@given(st.floats(0.0, 60.0))
def test_coherent_normalised(alpha2):
    d = coherent_distribution(alpha2)
    assert abs(math.fsum(d.probabilities) - 1.0) < 1e-12


def test_number_states():
    assert number_state(0) == vacuum()
    d = number_state(5)
    assert np.array_equal(d.amplitudes, [0, 0, 0, 0, 0, 1.0])
    assert mean_photons(d) == 5
    assert mean_photons(vacuum()) == 0


def test_custom_distribution_renormalises():
    d = custom_distribution([1.0, 3.0])
    assert np.allclose(d.probabilities, [0.25, 0.75])
    with pytest.raises(DomainError):
        custom_distribution([0.0, 0.0])
    with pytest.raises(DomainError):
        custom_distribution([0.5, -0.1])


def test_distribution_invariants():
    with pytest.raises(DomainError):
        PhotonDistribution(np.array([0.5, 0.5]))
    with pytest.raises(DomainError):
        PhotonDistribution(np.array([-1.0]))
    d = vacuum()
    with pytest.raises(ValueError):
        d.amplitudes[0] = 0.5


def test_equality_ignores_trailing_zeros_and_provenance():
    a = PhotonDistribution(np.array([1.0, 0.0, 0.0]), {"kind": "custom"})
    assert a == vacuum()
    assert hash(a) == hash(vacuum())
    assert binomial_distribution(0.5, 2) != binomial_distribution(0.5, 3)
