"""Fast-boson Born-Oppenheimer approximation.

Shifting the field, a = b - sqrt(2) gamma J_x / (omega sqrt(j)), and keeping
the number n' of shifted quanta fixed leaves a Lipkin-Meshkov-Glick
Hamiltonian for the pseudospin,

    H_n' = omega n' + omega0 j_z - (2 gamma**2 / (omega j)) j_x**2.

With eps = (E - omega n') / (omega0 j), x = j_z / j and c = cos(phi)**2 the
energy shell reads eps = x - (f**2 c / 2)(1 - x**2), whose roots are
x = (-1 +/- sqrt(F)) / (f**2 c) with F = 1 + 2 eps f**2 c + f**4 c**2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bands import BandSpectrum
from .errors import CriticalCoupling, DomainError, ESQPTDivergence, OutOfBand
from .model import ModelParams, Phase, phase_of
from .numerics.quadrature import QuadratureSpec, Singularity, integrate_singular
from .quantum import spin_matrices

ESQPT_GUARD = 1e-9
SMALL_F = 1e-6
_SPEC = QuadratureSpec(rel_tol=1e-11, max_subdivisions=500)
_RIGHT = QuadratureSpec(rel_tol=1e-11, max_subdivisions=500, singularity=Singularity.RIGHT)


@dataclass(frozen=True)
class BosonBand:
    n_prime: int
    e_min: float
    e_max: float
    eps_min: float


@dataclass(frozen=True)
class SphereChart:
    Q: float
    P: float
    phi: float
    jz: float


def sphere_chart(jz: float, phi: float, j: float) -> SphereChart:
    r = math.sqrt(max(2 * (1 + jz / j), 0.0))
    return SphereChart(r * math.cos(phi), -j * r * math.sin(phi), phi, jz)


def lmg_coefficient(params: ModelParams) -> float:
    """Coefficient 2 gamma**2 / (omega j) of -j_x**2."""
    return 2 * params.gamma**2 / (params.omega * params.j)


def effective_energy(jz, phi, n_prime: int, params: ModelParams):
    jz = np.asarray(jz, dtype=float)
    if np.any(np.abs(jz) > params.j * (1 + 1e-12)):
        raise DomainError("|j_z| must not exceed j")
    jx = np.sqrt(np.maximum(params.j**2 - jz**2, 0.0)) * np.cos(phi)
    e = params.omega * n_prime + params.omega0 * jz - lmg_coefficient(params) * jx**2
    return float(e) if e.ndim == 0 else e


def eps_min(f: float) -> float:
    return -0.5 * (f * f + f**-2) if f > 1 else -1.0


def band_minimum_and_frequency(n_prime: int, params: ModelParams) -> tuple[BosonBand, float]:
    if n_prime < 0:
        raise DomainError("n' must be non-negative")
    f, w0, j = params.f, params.omega0, params.j
    phase = phase_of(f)
    if phase is Phase.CRITICAL:
        raise CriticalCoupling("pseudospin frequency vanishes at f = 1")
    base = params.omega * n_prime
    em = eps_min(f)
    omega_f = w0 * math.sqrt(f**4 - 1) if f > 1 else w0 * math.sqrt(1 - f * f)
    return BosonBand(n_prime, base + w0 * j * em, base + w0 * j, em), omega_f


def phi_boundary(eps: float, f: float) -> float:
    """Half-width phi0 of the allowed azimuth window for eps <= -1."""
    if eps > -1:
        raise DomainError("phi0 is defined only for eps <= -1")
    c1 = (-eps + math.sqrt(eps * eps - 1)) / (f * f)
    if c1 > 1 + 1e-12:
        raise OutOfBand(f"eps = {eps} below the band minimum")
    return math.acos(math.sqrt(min(c1, 1.0)))


def _reduced(E, n_prime, params):
    eps = (E - params.omega * n_prime) / (params.omega0 * params.j)
    em = eps_min(params.f)
    if abs(eps + 1) <= ESQPT_GUARD:
        raise ESQPTDivergence("energy on the eps = -1 singularity")
    if eps <= em or eps > 1 + 1e-12:
        raise OutOfBand(f"eps = {eps} outside ({em}, 1]")
    return eps


def _upper_root(eps, f2c, sqF):
    return (2 * eps + f2c) / (1 + sqF)


def _shell_averages(E, n_prime, params):
    """(2 pi omega0 nu, <x>, <(1 - x**2) cos(phi)**2>) on the energy shell."""
    eps = _reduced(E, n_prime, params)
    f2 = params.f**2
    if eps > -1:
        def F(phi):
            c = math.cos(phi) ** 2
            return c, 1 + 2 * eps * f2 * c + (f2 * c) ** 2

        def w(phi):
            return 1 / math.sqrt(F(phi)[1])

        def x_w(phi):
            c, Fv = F(phi)
            sq = math.sqrt(Fv)
            return _upper_root(eps, f2 * c, sq) / sq

        def jx2_w(phi):
            c, Fv = F(phi)
            sq = math.sqrt(Fv)
            x = _upper_root(eps, f2 * c, sq)
            return (1 - x) * (1 + x) * c / sq

        quarter = math.pi / 2
        norm = integrate_singular(w, 0.0, quarter, _SPEC)
        return (4 * norm, integrate_singular(x_w, 0.0, quarter, _SPEC) / norm,
                integrate_singular(jx2_w, 0.0, quarter, _SPEC) / norm)

    r = math.sqrt(eps * eps - 1)
    c1 = (-eps + r) / f2
    c2 = 1 / (f2 * f2 * c1)
    phi0 = phi_boundary(eps, params.f)

    def sqF(phi):
        # c - c1 = sin(phi0 - phi) sin(phi0 + phi), exact near phi0
        c = math.cos(phi) ** 2
        return c, f2 * math.sqrt(max(math.sin(phi0 - phi) * math.sin(phi0 + phi) * (c - c2), 0.0))

    def w(phi):
        return 1 / sqF(phi)[1]

    def inv_c_w(phi):
        c, s = sqF(phi)
        return 1 / (c * s)

    def jx2_w(phi):
        c, s = sqF(phi)
        xp = (-1 + s) / (f2 * c)
        xm = (-1 - s) / (f2 * c)
        return 0.5 * ((1 - xp * xp) + (1 - xm * xm)) * c / s

    norm = integrate_singular(w, 0.0, phi0, _RIGHT)
    mean_x = -integrate_singular(inv_c_w, 0.0, phi0, _RIGHT) / (f2 * norm)
    return 8 * norm, mean_x, integrate_singular(jx2_w, 0.0, phi0, _RIGHT) / norm


def dos(E: float, n_prime: int, params: ModelParams) -> float:
    if params.f <= SMALL_F:
        _reduced(E, n_prime, params)
        return 1 / params.omega0
    return _shell_averages(E, n_prime, params)[0] / (2 * math.pi * params.omega0)


def expect_jz(E: float, n_prime: int, params: ModelParams) -> float:
    if params.f <= SMALL_F:
        return params.j * _reduced(E, n_prime, params)
    return params.j * _shell_averages(E, n_prime, params)[1]


def expect_photons(E: float, n_prime: int, params: ModelParams) -> float:
    """n' + (2 gamma**2 / (j omega**2)) <j_x**2> from the field shift."""
    if params.f <= SMALL_F:
        _reduced(E, n_prime, params)
        return float(n_prime)
    jx2 = params.j**2 * _shell_averages(E, n_prime, params)[2]
    return n_prime + 2 * params.gamma**2 / (params.j * params.omega**2) * jx2


def semiclassical_point(E: float, n_prime: int, params: ModelParams):
    from .pseudospin import SemiclassicalPoint

    nu2pi, mx, jx2 = _shell_averages(E, n_prime, params) if params.f > SMALL_F else (None, None, None)
    if nu2pi is None:
        return SemiclassicalPoint(E, n_prime, dos(E, n_prime, params), expect_photons(E, n_prime, params),
                                  expect_jz(E, n_prime, params))
    nph = n_prime + 2 * params.gamma**2 * params.j / params.omega**2 * jx2
    return SemiclassicalPoint(E, n_prime, nu2pi / (2 * math.pi * params.omega0), nph, params.j * mx)


def lmg_matrix(params: ModelParams) -> np.ndarray:
    jx, _, jz = spin_matrices(params.j)
    return params.omega0 * jz - lmg_coefficient(params) * (jx @ jx)


def lmg_requantize(n_prime: int, params: ModelParams) -> BandSpectrum:
    """Exact levels of the LMG band n' (2j + 1 states)."""
    if n_prime < 0:
        raise DomainError("n' must be non-negative")
    w = np.linalg.eigvalsh(lmg_matrix(params)) + params.omega * n_prime
    return BandSpectrum("boson", n_prime, np.arange(w.size), w, np.ones(w.size, dtype=int))
