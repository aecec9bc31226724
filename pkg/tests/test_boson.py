import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from dicke_boa import boson as bo
from dicke_boa.errors import CriticalCoupling, DomainError, ESQPTDivergence, OutOfBand
from dicke_boa.model import ModelParams

from oracles import lmg_microcanonical, spin_ops

SR = ModelParams.from_f(10, 1, 2, 10)
NORMAL = ModelParams.from_f(10, 1, 0.6, 10)


def test_effective_energy_examples():
    assert bo.effective_energy(-10, 0.0, 0, SR) == pytest.approx(-10, abs=1e-14)
    assert bo.effective_energy(10, 1.0, 2, SR) == pytest.approx(30, abs=1e-13)
    # jz = 0, phi = 0: jx = j, coefficient f**2 omega0 / 2 j
    assert bo.effective_energy(0, 0.0, 0, SR) == pytest.approx(-2 * 10, rel=1e-14)
    assert bo.effective_energy(0, math.pi / 2, 1, SR) == pytest.approx(10, abs=1e-12)
    with pytest.raises(DomainError):
        bo.effective_energy(11, 0.0, 0, SR)


def test_lmg_coefficient_in_terms_of_f():
    assert bo.lmg_coefficient(SR) * SR.j == pytest.approx(SR.f**2 * SR.omega0 / 2, rel=1e-14)


def test_sphere_chart_radius():
    for jz, phi in ((-10, 0.3), (0, 1.0), (7.5, -2.0)):
        c = bo.sphere_chart(jz, phi, 10)
        assert c.Q**2 + (c.P / 10) ** 2 == pytest.approx(2 * (1 + jz / 10), abs=1e-13)


@pytest.mark.parametrize("w,f,ratio", [(20, 3, 2.236), (10, 0.8, 16.67)])
def test_band_frequency_ratios(w, f, ratio):
    p = ModelParams.from_f(w, 1, f, 10)
    band, wf = bo.band_minimum_and_frequency(0, p)
    assert w / wf == pytest.approx(ratio, abs=0.005)


def test_band_minimum_examples():
    band, wf = bo.band_minimum_and_frequency(2, SR)
    assert band.eps_min == pytest.approx(-2.125, rel=1e-14)
    assert band.e_min == pytest.approx(20 - 21.25, rel=1e-14) and band.e_max == pytest.approx(30)
    assert wf == pytest.approx(math.sqrt(15), rel=1e-14)
    band, wf = bo.band_minimum_and_frequency(0, NORMAL)
    assert band.e_min == pytest.approx(-10) and wf == pytest.approx(0.8, rel=1e-14)
    with pytest.raises(CriticalCoupling):
        bo.band_minimum_and_frequency(0, ModelParams.from_f(10, 1, 1, 10))
    with pytest.raises(DomainError):
        bo.band_minimum_and_frequency(-1, SR)


def test_phi_boundary_examples():
    assert bo.phi_boundary(-2.125, 2) == pytest.approx(0.0, abs=1e-7)
    assert bo.phi_boundary(-1, 2) == pytest.approx(math.pi / 3, rel=1e-12)
    assert bo.phi_boundary(-1.5, 2) == pytest.approx(math.acos(math.sqrt((1.5 + math.sqrt(1.25)) / 4)), rel=1e-12)
    with pytest.raises(DomainError):
        bo.phi_boundary(-0.5, 2)
    with pytest.raises(OutOfBand):
        bo.phi_boundary(-3, 2)


@given(st.floats(1.05, 4), st.floats(0.01, 0.99))
def test_phi_boundary_is_shell_edge(f, t):
    em = bo.eps_min(f)
    eps = em + t * (-1 - em)
    phi0 = bo.phi_boundary(eps, f)
    c = math.cos(phi0) ** 2
    # the quadratic in x = jz / j has a double root at the edge
    assert 1 + 2 * eps * f * f * c + (f * f * c) ** 2 == pytest.approx(0, abs=1e-9)


@pytest.mark.parametrize("p", [SR, NORMAL, ModelParams.from_f(20, 1, 3, 5)], ids=["sr", "normal", "deep"])
@pytest.mark.parametrize("t", [0.005, 0.25, 0.45, 0.6, 0.9, 0.99])
def test_shell_observables_against_phase_volume(p, t):
    em = bo.eps_min(p.f)
    eps = em + t * (1 - em)
    if p.f > 1 and abs(eps + 1) < 0.02:
        eps -= 0.05
    E = eps * p.omega0 * p.j
    nu, jz, jx2 = lmg_microcanonical(E, p.omega0, bo.lmg_coefficient(p), p.j, 1e-4 * p.j)
    pt = bo.semiclassical_point(E + 2 * p.omega, 2, p)
    assert pt.nu == pytest.approx(nu, rel=2e-6)
    assert pt.jz == pytest.approx(jz, rel=2e-6, abs=1e-8 * p.j)
    assert pt.n_phot - 2 == pytest.approx(2 * p.gamma**2 / (p.j * p.omega**2) * jx2, rel=2e-6)
    assert bo.dos(E + 2 * p.omega, 2, p) == pt.nu


def test_decoupled_limit():
    p = ModelParams(3, 1.5, 0, 4)
    for E in (-5.0, 0.0, 5.9):
        assert bo.dos(E, 0, p) == pytest.approx(1 / 1.5)
        assert bo.expect_jz(E, 0, p) == pytest.approx(E / 1.5)
        assert bo.expect_photons(E + 3, 1, p) == 1.0


def test_weak_coupling_dos():
    p = ModelParams.from_f(10, 1, 1e-3, 10)
    assert bo.dos(0.3, 0, p) == pytest.approx(1.0, rel=1e-5)


def test_band_head_dos():
    _, wf = bo.band_minimum_and_frequency(0, SR)
    # superradiant head: two minima at phi = 0 and pi
    assert bo.dos(-21.25 + 1e-6, 0, SR) == pytest.approx(2 / wf, rel=1e-4)
    _, wf = bo.band_minimum_and_frequency(0, NORMAL)
    assert bo.dos(-10 + 1e-6, 0, NORMAL) == pytest.approx(1 / wf, rel=1e-4)


def test_esqpt_divergence():
    below = [bo.dos(-10 - 10 * 10.0**-k, 0, SR) for k in range(2, 8)]
    above = [bo.dos(-10 + 10 * 10.0**-k, 0, SR) for k in range(2, 8)]
    assert all(a < b for a, b in zip(below, below[1:]))
    assert all(a < b for a, b in zip(above, above[1:]))
    ratios = [a / b for a, b in zip(below, above)]
    assert all(0.25 < r < 4 for r in ratios)
    with pytest.raises(ESQPTDivergence):
        bo.dos(-10.0, 0, SR)


def test_band_out_of_range():
    with pytest.raises(OutOfBand):
        bo.dos(-22, 0, SR)
    with pytest.raises(OutOfBand):
        bo.expect_jz(10.5, 0, SR)


def test_dos_counts_band_states():
    p = ModelParams.from_f(10, 1, 2, 20)
    band, _ = bo.band_minimum_and_frequency(0, p)
    total, _ = quad(lambda E: bo.dos(E, 0, p), band.e_min, band.e_max, points=[-20.0], limit=400)
    assert total == pytest.approx(2 * p.j, rel=0.02)


def test_jz_shape_across_the_band():
    # rises above eps = -1; below it the slow passage near j_z = -j drags the average down
    above = [bo.expect_jz(10 * e, 0, SR) for e in np.linspace(-0.999, 0.99, 30)]
    below = [bo.expect_jz(10 * e, 0, SR) for e in np.linspace(-2.12, -1.001, 30)]
    assert all(a < b for a, b in zip(above, above[1:]))
    assert all(a > b for a, b in zip(below, below[1:]))
    assert above[0] < -6 and below[-1] < -6 and below[0] > -2.6
    normal = [bo.expect_jz(10 * e, 0, NORMAL) for e in np.linspace(-0.99, 0.99, 30)]
    assert all(a < b for a, b in zip(normal, normal[1:]))


def test_band_minimum_expectations():
    E = -21.25 + 1e-7
    assert bo.expect_jz(E, 0, SR) == pytest.approx(-10 / 4, rel=1e-5)
    expected = 2 * SR.gamma**2 * 10 * (1 - 2.0**-4) / 100
    assert bo.expect_photons(E + 10, 1, SR) == pytest.approx(1 + expected, rel=1e-5)


def test_quarter_period_matches_full_period():
    p = ModelParams.from_f(10, 1, 1.7, 6)
    kappa = bo.lmg_coefficient(p)
    for E in (-1.0, 2.0):
        # above eps = -1 each slice is [-j, jz_+(phi)] and d jz_+ / dE = 1 / sqrt(disc)
        def dxdE(phi):
            a = kappa * math.cos(phi) ** 2
            return 1 / math.sqrt(p.omega0**2 + 4 * a * (a * p.j**2 + E))

        full, _ = quad(dxdE, 0, 2 * math.pi, epsabs=0, epsrel=1e-12, limit=400)
        assert bo.dos(E, 0, p) == pytest.approx(full / (2 * math.pi), rel=1e-9)


def test_lmg_matrix_against_kron_free_oracle():
    p = ModelParams.from_f(10, 1, 1.3, 2.5)
    jx, jz = spin_ops(2.5)
    ref = jz - bo.lmg_coefficient(p) * jx @ jx
    assert np.allclose(bo.lmg_matrix(p), ref, atol=1e-13)


def test_lmg_requantize_shift_and_bounds():
    p = ModelParams.from_f(10, 1, 2, 5)
    b0, b3 = bo.lmg_requantize(0, p), bo.lmg_requantize(3, p)
    assert b0.energies.size == 11
    assert np.allclose(b3.energies, b0.energies + 30, atol=1e-12)
    assert np.all(np.diff(b0.energies) >= 0)
    band, _ = bo.band_minimum_and_frequency(3, p)
    assert b3.energies[-1] <= band.e_max + 1e-12
    # operator norms give omega0 j_z - kappa j_x**2 >= -omega0 j - kappa j**2
    assert b3.energies[0] >= 30 - p.omega0 * p.j - bo.lmg_coefficient(p) * p.j**2 - 1e-12
    assert b3.energies[0] == pytest.approx(band.e_min, abs=p.omega0 * p.f**2)
    with pytest.raises(DomainError):
        bo.lmg_requantize(-1, p)


@given(st.floats(0, 3), st.floats(0.5, 20), st.sampled_from([0.5, 2, 4.5]), st.integers(0, 4))
def test_lmg_trace(f, w, j, n):
    p = ModelParams.from_f(w, 1, f, j)
    lv = bo.lmg_requantize(n, p).energies
    jx, _ = spin_ops(j)
    expected = (2 * j + 1) * w * n - bo.lmg_coefficient(p) * np.trace(jx @ jx)
    assert lv.sum() == pytest.approx(expected, rel=1e-10, abs=1e-10)
