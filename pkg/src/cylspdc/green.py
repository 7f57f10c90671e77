"""Line-dipole sources inside the rod and their normal-emission far field.

A uniform line dipole ``p`` at transverse position ``R0`` inside the core
radiates, in a homogeneous medium of permittivity ``eps_1``,

    E = (i pi / eps_1) [k_1^2 p + grad(p . grad)] H0(Q_1 |R - R0|) e^{iqz}.

Re-centring the Hankel function on the axis (Graf's addition theorem) turns
this into a sum of outgoing cylindrical waves, each of which is transmitted
through the surface with the coefficients of :mod:`cylspdc.waveguide`.  For
``q = 0`` s and p waves do not mix and the far field in the host reduces to
the amplitudes ``S+``, ``S-``, ``S_z`` and the 3x3 tensor ``g``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

from .errors import DomainError, UnsupportedError
from .specfun import M_MAX, bessel_j, hankel1
from .waveguide import CylWaveIndex, cyl_wave_field, to_cylindrical, transverse_wavenumber

_SQ2 = math.sqrt(2.0)
GTOS = np.exp(-0.25j * np.pi) / math.sqrt(2 * np.pi)


@dataclass(frozen=True)
class DipoleDensity:
    """Line dipole with circular components ``p_pm = p . (x -+ i y)/sqrt 2``."""

    p_plus: complex
    p_minus: complex
    p_z: complex
    R0: float
    phi0: float = 0.0
    q_mod: float = 0.0

    @classmethod
    def from_cartesian(cls, p, R0, phi0=0.0, q_mod=0.0):
        px, py, pz = (complex(c) for c in p)
        return cls((px - 1j * py) / _SQ2, (px + 1j * py) / _SQ2, pz, R0, phi0, q_mod)

    def cartesian(self):
        """``p = p+ e+ + p- e- + p_z z`` with ``e+- = (x +- i y)/sqrt 2``."""
        return np.array(
            [
                (self.p_plus + self.p_minus) / _SQ2,
                1j * (self.p_plus - self.p_minus) / _SQ2,
                self.p_z,
            ]
        )


@dataclass(frozen=True)
class FarFieldTensor:
    delta_phi: float
    R_prime_over_a: float
    w: float
    g: np.ndarray
    m_truncation: int


def line_dipole_expansion(dipole, spec, w, m_max=40):
    """Outgoing-wave coefficients of a line dipole, keyed by ``(m, sigma)``.

    Returns
    -------
    list of (int, str, complex)
        Sorted by ``(m, sigma)``; only ``|m| <= m_max`` are kept.
    """
    if not 0 <= dipole.R0 < 1:
        raise DomainError("dipole must sit inside the core (R0 < a)")
    q = dipole.q_mod
    k1 = math.sqrt(spec.eps_core) * w
    Q1 = transverse_wavenumber(spec.eps_core, w, q)
    out = {}

    def add(m, sigma, c):
        if abs(m) <= m_max and c != 0:
            out[(m, sigma)] = out.get((m, sigma), 0) + c

    for n in range(-m_max - 1, m_max + 2):
        base = math.pi * w * w * special.jv(n, Q1 * dipole.R0) * np.exp(-1j * n * dipole.phi0)
        add(n, "p", 1j * (Q1 / k1) * base * dipole.p_z)
        add(n + 1, "s", base * dipole.p_plus / _SQ2)
        add(n + 1, "p", base * (q / k1) * dipole.p_plus / _SQ2)
        add(n - 1, "s", base * dipole.p_minus / _SQ2)
        add(n - 1, "p", -base * (q / k1) * dipole.p_minus / _SQ2)
    return [(m, s, out[(m, s)]) for (m, s) in sorted(out)]


def expansion_field(coeffs, spec, w, q, R_over_a, phi):
    """Electric field (R, phi, z basis) of a sum of outgoing core waves."""
    E = np.zeros(3, complex)
    for m, sigma, c in coeffs:
        f = cyl_wave_field(CylWaveIndex("core", q, m, sigma, "outgoing_H"), w, R_over_a, phi, spec)
        E += c * f.E
    return E


def direct_dipole_field(dipole, spec, w, R_over_a, phi):
    """Closed-form homogeneous-medium field of the line dipole at ``z = 0``."""
    q = dipole.q_mod
    Q = transverse_wavenumber(spec.eps_core, w, q)
    k1sq = spec.eps_core * w * w
    r = np.array([R_over_a * math.cos(phi), R_over_a * math.sin(phi)])
    r0 = np.array([dipole.R0 * math.cos(dipole.phi0), dipole.R0 * math.sin(dipole.phi0)])
    d = r - r0
    rho = float(np.hypot(*d))
    if rho == 0:
        raise DomainError("observation point coincides with the dipole")
    n = d / rho
    x = Q * rho
    H0, H1 = special.hankel1(0, x), special.hankel1(1, x)
    T = np.zeros((3, 3), complex)
    T[:2, :2] = -Q * Q * (H0 * np.outer(n, n) + (H1 / x) * (np.eye(2) - 2 * np.outer(n, n)))
    T[:2, 2] = T[2, :2] = -1j * q * Q * H1 * n
    T[2, 2] = -q * q * H0
    p = dipole.cartesian()
    E = (1j * math.pi / spec.eps_core) * (k1sq * H0 * p + T @ p)
    return to_cylindrical(E, phi)


@lru_cache(maxsize=65536)
def transmission_q0(m, w, spec):
    """``(t_ss, t_pp)`` of an outgoing core wave of order ``m`` at ``q = 0``.

    At normal emission the surface problem splits into two 2x2 systems,
    solved here by Cramer's rule so that the large dynamic range of
    ``J_m`` and ``H_m`` at high order does not trip a conditioning check.
    """
    k1 = math.sqrt(spec.eps_core) * w
    kh = math.sqrt(spec.eps_host) * w
    z = spec.zeta
    J, Jp = bessel_j(m, k1)
    H1, H1p = hankel1(m, k1)
    H, Hp = hankel1(m, kh)
    # s: [z J, -H; J', -H'] (r, t) = (-z H1, -H1')
    det_s = -z * J * Hp + H * Jp
    t_ss = (z * J * (-H1p) - Jp * (-z * H1)) / det_s
    # p: [J, -H; z J', -H'] (r, t) = (-H1, -z H1')
    det_p = -J * Hp + H * z * Jp
    t_pp = (J * (-z * H1p) - z * Jp * (-H1)) / det_p
    return complex(t_ss), complex(t_pp)


def _terms(w, x, spec, m_max, tol=1e-13):
    """Fourier terms ``n`` of the far-field sums, truncated adaptively."""
    rows = []
    quiet = 0
    L_used = 0
    for L in range(0, m_max + 1):
        small = True
        for n in ((0,) if L == 0 else (L, -L)):
            Jn = special.jv(n, x)
            t_pp = transmission_q0(n, w, spec)[1]
            t_up = transmission_q0(n + 1, w, spec)[0] if abs(n + 1) <= M_MAX else 0j
            t_dn = transmission_q0(n - 1, w, spec)[0] if abs(n - 1) <= M_MAX else 0j
            rows.append((n, Jn, t_pp, t_up, t_dn))
            if abs(Jn) * max(abs(t_pp), abs(t_up), abs(t_dn)) >= tol:
                small = False
        L_used = L
        quiet = quiet + 1 if small else 0
        if quiet >= 3:
            break
    return rows, L_used


def far_field_amplitudes(dipole, spec, w, phi, m_max=M_MAX - 1):
    """Far-field amplitudes ``(S+, S-, S_z)`` as vectors in the observer frame.

    Raises
    ------
    UnsupportedError
        For ``q_mod != 0``.
    """
    if dipole.q_mod != 0:
        raise UnsupportedError("only normal emission (q = 0) is implemented")
    k1 = math.sqrt(spec.eps_core) * w
    rows, _ = _terms(w, k1 * dipole.R0, spec, m_max)
    sp = sm = sz = 0j
    for n, Jn, t_pp, t_up, t_dn in rows:
        a = (1j) ** (-n % 4) * Jn * np.exp(-1j * n * dipole.phi0)
        sz += a * np.exp(1j * n * phi) * t_pp
        sp += a * np.exp(1j * (n + 1) * phi) * t_up
        sm += a * np.exp(1j * (n - 1) * phi) * t_dn
    k2 = w * w
    phi_hat = np.array([0, 1, 0], complex)
    z_hat = np.array([0, 0, 1], complex)
    S_plus = np.exp(0.75j * np.pi) * math.sqrt(math.pi) * k2 * sp * phi_hat
    S_minus = -np.exp(0.75j * np.pi) * math.sqrt(math.pi) * k2 * sm * phi_hat
    S_z = np.exp(0.25j * np.pi) * math.sqrt(2 * math.pi) * k2 * sz * z_hat
    return S_plus, S_minus, S_z


def far_green_tensor(delta_phi, R_prime_over_a, w, spec, m_max=M_MAX - 1):
    """Far-field Green tensor amplitude ``g(phi - phi', R', w)``.

    Rows are the observed (R, phi, z) components at azimuth ``phi``; columns
    act on a source vector expressed in the same frame.
    """
    if not 0 <= R_prime_over_a < 1:
        raise DomainError("source must sit inside the core")
    k1 = math.sqrt(spec.eps_core) * w
    rows, L = _terms(w, k1 * R_prime_over_a, spec, m_max)
    g = np.zeros((3, 3), complex)
    for n, Jn, t_pp, t_up, t_dn in rows:
        a = (1j) ** (-n % 4) * Jn * np.exp(1j * n * delta_phi)
        g[2, 2] += a * t_pp
        g[1, 1] += a * 0.5 * (t_up + t_dn)
        g[1, 0] += a * 0.5j * (t_up - t_dn)
    return FarFieldTensor(float(delta_phi), float(R_prime_over_a), float(w), w * w * g, L)
