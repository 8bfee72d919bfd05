import itertools
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scwqkd.model import (SidebandAmplitudes, alice_return_state, apply_modulator,
                          beta_deep_modulation, bessel_j, detector_photons,
                          mean_photons_closed_form, mean_photons_dispersive, modulator_matrix,
                          rayleigh_photons, relation_energies, sideband_cutoff)
from scwqkd.params import (DispersionSettings, LossBudget, ModulatorSettings, SystemParams,
                           db_to_linear)

BETAS = np.round(np.arange(1, 25) * 0.1, 10)
ETAS = [(1.0, 1.0, 1.0), (0.5, 0.25, 0.8), (db_to_linear(-6), db_to_linear(-6), 0.1)]


def fft_sidebands(beta, phi, M, n=4096):
    """Fourier coefficients of exp(i beta sin(theta + phi)) for m = -M..M."""
    theta = 2 * np.pi * np.arange(n) / n
    c = np.fft.fft(np.exp(1j * beta * np.sin(theta + phi))) / n
    return np.array([c[m % n] for m in range(-M, M + 1)])


def oracle_closed_form(p, losses, alpha0, beta, match):
    mpmath.mp.dps = 30
    scale = alpha0 ** 2 * (losses.eta_a * losses.eta_f) ** 2 * losses.eta_b
    if match == "opposite":
        return scale * p.tau
    j2 = float(mpmath.besselj(0, 2 * beta)) ** 2
    return scale * ((1 - p.varrho) * (1 - j2) + p.tau * j2)


# -- modulator ---------------------------------------------------------------

def test_zero_depth_is_identity():
    for phi in (0.0, 1.0, 4.0):
        np.testing.assert_array_equal(modulator_matrix(ModulatorSettings(0.0, phi), 3),
                                      np.eye(7))


@pytest.mark.parametrize("beta", [0.1, 0.38, 1.2, 2.4])
@pytest.mark.parametrize("phi", [0.0, math.pi / 2, 2.1])
def test_matrix_against_fft(beta, phi):
    M = 15
    U = modulator_matrix(ModulatorSettings(beta, phi), M)
    carrier = np.zeros(2 * M + 1, complex)
    carrier[M] = 1.0
    np.testing.assert_allclose(U @ carrier, fft_sidebands(beta, phi, M), atol=1e-13)


@pytest.mark.parametrize("beta", [0.1, 0.38, 1.2024, 2.4])
def test_unitarity(beta):
    M = sideband_cutoff(2 * beta, energy_tol=1e-8)
    # truncation only touches the edge modes; check the inner block
    U = modulator_matrix(ModulatorSettings(beta, 0.7), 3 * M)
    inner = slice(M, 5 * M + 1)
    G = (U.conj().T @ U)[inner, inner]
    assert np.linalg.norm(G - np.eye(G.shape[0]), 2) <= 1e-6


@pytest.mark.parametrize("beta", [0.1, 0.38, 1.2, 2.4])
def test_opposite_phase_demodulates(beta):
    M = sideband_cutoff(2 * beta, energy_tol=1e-8)
    A = modulator_matrix(ModulatorSettings(beta, 0.3), M)
    B = modulator_matrix(ModulatorSettings(beta, 0.3 + math.pi), M)
    v = np.zeros(2 * M + 1, complex)
    v[M] = 1.0
    np.testing.assert_allclose(B @ (A @ v), v, atol=1e-6)


@pytest.mark.parametrize("beta", [0.1, 0.38, 1.2, 2.4])
def test_double_modulation_addition(beta):
    M = sideband_cutoff(2 * beta, energy_tol=1e-8)
    U = modulator_matrix(ModulatorSettings(beta, 1.1), M)
    v = np.zeros(2 * M + 1, complex)
    v[M] = 1.0
    want = fft_sidebands(2 * beta, 1.1, M)
    np.testing.assert_allclose(U @ (U @ v), want, atol=1e-6)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 2.4), st.floats(0.0, 2.4), st.floats(-7.0, 7.0))
def test_composition_adds_depths(b1, b2, phi):
    # same phase, depths add
    M = 30
    v = np.zeros(2 * M + 1, complex)
    v[M] = 1.0
    out = apply_modulator(apply_modulator(SidebandAmplitudes(M, v), ModulatorSettings(b1, phi)),
                          ModulatorSettings(b2, phi))
    np.testing.assert_allclose(out.amps, fft_sidebands(b1 + b2, phi, M), atol=1e-12)


# -- Alice's state -------------------------------------------------------------

def test_unit_transmission_state(params, unit_losses):
    s = alice_return_state(params, unit_losses, 1.0, ModulatorSettings(0.9, 0.4),
                           DispersionSettings())
    m = np.arange(-s.M, s.M + 1)
    want = [bessel_j(k, 0.9) * np.exp(1j * k * 0.4) for k in m]
    np.testing.assert_allclose(s.amps, want, atol=1e-15)


@pytest.mark.parametrize("d", [0.0, 10.0, 60.0, 200.0])
@pytest.mark.parametrize("gd", [True, False])
def test_dispersion_is_pure_phase(params, d, gd):
    losses = LossBudget.from_distance(d, 0.3, 0.6)
    s = alice_return_state(params, losses, 1.7, ModulatorSettings(1.2, 0.0),
                           DispersionSettings(d, compensate_group_delay=gd))
    assert s.total_energy == pytest.approx((0.3 * losses.eta_f * math.sqrt(0.6) * 1.7) ** 2,
                                           rel=1e-12)


def test_group_delay_only_is_removed(unit_losses):
    p = SystemParams(gvd=0.0)
    a = alice_return_state(p, unit_losses, 1.0, ModulatorSettings(0.7, 1.0),
                           DispersionSettings(50.0, compensate_group_delay=True))
    b = alice_return_state(p, unit_losses, 1.0, ModulatorSettings(0.7, 1.0),
                           DispersionSettings(0.0))
    np.testing.assert_allclose(a.amps, b.amps, atol=1e-12)


def test_full_compensation_equals_back_to_back(params, unit_losses):
    a = alice_return_state(params, unit_losses, 1.0, ModulatorSettings(0.7, 1.0),
                           DispersionSettings(80.0, False, True))
    b = alice_return_state(params, unit_losses, 1.0, ModulatorSettings(0.7, 1.0),
                           DispersionSettings(0.0))
    np.testing.assert_array_equal(a.amps, b.amps)


def test_json_round_trip(params, unit_losses):
    s = alice_return_state(params, unit_losses, 1.3, ModulatorSettings(0.5, 2.0),
                           DispersionSettings(30.0))
    t = SidebandAmplitudes.from_json(s.to_json())
    assert t.M == s.M
    np.testing.assert_array_equal(t.amps, s.amps)
    assert not s.amps.flags.writeable


def test_bad_amplitude_length():
    with pytest.raises(ValueError):
        SidebandAmplitudes(3, np.zeros(5))


# -- photon numbers ------------------------------------------------------------

def test_closed_form_examples(params, unit_losses):
    bdm = beta_deep_modulation()
    assert mean_photons_closed_form(params, unit_losses, 1.0, bdm, "equal") == pytest.approx(
        1 - params.varrho, abs=1e-15)
    for beta in (0.2, 1.0, 2.0):
        assert mean_photons_closed_form(params, unit_losses, 1.0, beta, "opposite") == params.tau
    assert mean_photons_closed_form(params, unit_losses, 0.0, 0.8, "equal") == 0.0


@pytest.mark.parametrize("eta", ETAS)
@pytest.mark.parametrize("match", ["equal", "opposite"])
def test_closed_form_against_oracle(params, eta, match):
    losses = LossBudget(*eta)
    for beta in BETAS:
        got = mean_photons_closed_form(params, losses, 1.4, beta, match)
        assert got == pytest.approx(oracle_closed_form(params, losses, 1.4, beta, match),
                                    rel=1e-12, abs=1e-15)


@pytest.mark.parametrize("eta", ETAS)
def test_dispersive_equals_closed_form_at_zero_distance(params, eta):
    losses = LossBudget(*eta)
    for beta, (match, dphi) in itertools.product(BETAS, [("equal", 0.0), ("opposite", math.pi)]):
        state = alice_return_state(params, losses, 1.4, ModulatorSettings(beta, 0.5),
                                   DispersionSettings())
        bob = ModulatorSettings(beta, 0.5 + dphi)
        n = (mean_photons_dispersive(state, bob, params, "sidebands")
             + mean_photons_dispersive(state, bob, params, "carrier"))
        assert abs(n - mean_photons_closed_form(params, losses, 1.4, beta, match)) <= 1e-9


def test_energy_conserved_through_bob(unit_losses):
    p = SystemParams(varrho=0.0, tau=1.0, r=0.0)
    for beta in (0.3, 1.2, 2.4):
        state = alice_return_state(p, unit_losses, 2.0, ModulatorSettings(beta, 0.0),
                                   DispersionSettings())
        bob = ModulatorSettings(beta, 0.0)
        total = (mean_photons_dispersive(state, bob, p, "sidebands")
                 + mean_photons_dispersive(state, bob, p, "carrier"))
        assert total == pytest.approx(4.0, abs=1e-9)


def test_full_demodulation(params):
    losses = LossBudget(0.5, 0.4, 0.7)
    state = alice_return_state(params, losses, 1.5, ModulatorSettings(1.1, 0.0),
                               DispersionSettings())
    bob = ModulatorSettings(1.1, math.pi)
    arrived = (0.5 * 0.7 * math.sqrt(0.4) * 1.5) ** 2
    assert mean_photons_dispersive(state, bob, params, "carrier") == pytest.approx(
        params.tau * arrived, rel=1e-9)
    assert mean_photons_dispersive(state, bob, params, "sidebands") <= 1e-9


def test_relation_energies_match_direct(params, unit_losses):
    disp = DispersionSettings(35.0, compensate_group_delay=False)
    betas = [0.38, 1.2]
    offsets = [0.0, math.pi / 2, math.pi]
    sb, car = relation_energies(params, betas, disp, offsets)
    ideal = SystemParams(varrho=0.0, tau=1.0, r=0.0)
    for i, b in enumerate(betas):
        state = alice_return_state(params, unit_losses, 1.0, ModulatorSettings(b, 0.0), disp,
                                   M=sideband_cutoff(2 * max(betas)))
        for j, off in enumerate(offsets):
            bob = ModulatorSettings(b, off)
            assert sb[i, j] == pytest.approx(
                mean_photons_dispersive(state, bob, ideal, "sidebands"), abs=1e-13)
            assert car[i, j] == pytest.approx(
                mean_photons_dispersive(state, bob, ideal, "carrier"), abs=1e-13)


def test_relation_energies_backends_agree(params, backend):
    sb, car = relation_energies(params, np.linspace(0.05, 2.4, 16),
                                DispersionSettings(40.0, False), [0.0, math.pi])
    assert np.all(sb >= 0) and np.all(car >= 0)
    np.testing.assert_allclose(sb + car, 1.0, atol=1e-10)


def test_detector_photons_elementwise(params):
    losses = LossBudget(0.5, 0.5, 0.5)
    a = np.array([0.0, 1.0, 2.0])
    n = detector_photons(params, losses, a, 0.9, 0.1, "carrier")
    assert n[0] == 0.0
    assert n[2] == pytest.approx(4 * n[1])


# -- backscatter ---------------------------------------------------------------

def test_rayleigh_examples(params):
    assert rayleigh_photons(params, LossBudget(0.5, 0.5, 1.0), 1.0, 0.4,
                            "sideband_detector") == 0.0
    tiny = LossBudget(1.0, 1.0, 1e-12)
    assert rayleigh_photons(params, tiny, 1.0, 0.0, "sideband_detector") == pytest.approx(
        params.tau * params.beta_rs, rel=1e-9)
    bdm = beta_deep_modulation()
    j0 = float(mpmath.besselj(0, bdm))
    # 0.6711 is J_0 at the rounded depth 1.2; at the exact depth it is 0.66993
    assert float(mpmath.besselj(0, 1.2)) == pytest.approx(0.6711, abs=1e-4)
    assert j0 == pytest.approx(0.669930, abs=1e-6)
    want = (params.r * j0 ** 2 + params.varrho * (1 - j0 ** 2)) * params.beta_rs
    assert rayleigh_photons(params, tiny, 1.0, bdm, "carrier_detector") == pytest.approx(
        want, rel=1e-9)


def test_rayleigh_unknown_weights(params, unit_losses):
    with pytest.raises(ValueError):
        rayleigh_photons(params, unit_losses, 1.0, 0.4, "both")
