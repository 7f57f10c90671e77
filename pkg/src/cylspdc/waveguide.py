"""Cylindrical vector waves, surface scattering and guided modes of a dielectric rod.

Lengths are in units of the radius ``a`` and frequencies enter as
``w = omega a / c``, so every quantity here is dimensionless.  A transverse
wavenumber in medium ``j`` is ``Q_j = sqrt(eps_j w^2 - qa^2 + i0)``; for
guided modes the core value is the real ``u`` and the host value is ``i kappa``.

Mode search
-----------
The textbook secular equation has poles at zeros of ``J_m`` and, after the
usual multiplication by ``J_m^2 K_m^2``, trivial zeros on both light lines.
We instead use the polynomial-in-Bessel form

.. math::

    F = \\frac{u^2\\kappa^2}{V^2}(P - \\gamma Q)(\\epsilon_1 P - \\epsilon_h\\gamma Q)
        - m Q[(\\epsilon_1+\\epsilon_h)P - 2\\epsilon_h\\gamma Q]
        - m\\frac{\\kappa^2}{w^2} Q (P - \\gamma Q),

with ``P = J_{m-1}(u)``, ``Q = u J_m(u)``, ``gamma = K_{m-1}(kappa)/(kappa K_m(kappa))``
and ``V^2 = u^2 + kappa^2``.  ``F`` equals the secular determinant times
``u^4 kappa^2 J_m^2 / V^2``; it is finite everywhere inside the light-line
window and vanishes only on modes.  Roots are scanned on the angle ``theta``
with ``u = V cos(theta)``, ``kappa = V sin(theta)``, which resolves the
exponentially small ``kappa`` of the fundamental mode at low frequency.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy import optimize, special

from .errors import AccuracyError, DomainError, NearModeError, ReducedAccuracyWarning
from .quadrature import gauss_legendre, gauss_legendre_panels
from .specfun import bessel_j, hankel1, k_ratio, k_scaled_ratio, recurrence_triplet

FAMILIES = ("TE", "TM", "HE", "EH")
KAPPA_MIN = 1e-140  # flux grows like kappa^-2 and overflows near 1e-154


@dataclass(frozen=True)
class WaveguideSpec:
    """Step-index dielectric rod in a homogeneous host.

    Attributes
    ----------
    eps_core, eps_host : float
        Relative permittivities, ``eps_core > eps_host >= 1``.
    radius_a : float
        Rod radius in metres.  Only unit conversions use it.
    """

    eps_core: float
    eps_host: float = 1.0
    radius_a: float = 1.0e-7

    def __post_init__(self):
        if not self.radius_a > 0:
            raise DomainError(f"radius_a must be positive, got {self.radius_a}")
        if not self.eps_host >= 1:
            raise DomainError(f"eps_host must be >= 1, got {self.eps_host}")
        if not self.eps_core > self.eps_host:
            raise DomainError("eps_core must exceed eps_host for guiding")

    @property
    def zeta(self):
        return math.sqrt(self.eps_core / self.eps_host)

    @property
    def na(self):
        """``sqrt(eps_core - eps_host)``, the scale of the normalised frequency."""
        return math.sqrt(self.eps_core - self.eps_host)

    def eps(self, medium):
        if medium == "core":
            return self.eps_core
        if medium == "host":
            return self.eps_host
        raise DomainError(f"unknown medium {medium!r}")


class CylWaveIndex(NamedTuple):
    """Labels of one cylindrical vector wave."""

    medium: str  # "core" | "host"
    qa: float
    m: int
    sigma: str  # "s" | "p"
    kind: str = "regular_J"  # | "outgoing_H"


@dataclass(frozen=True)
class FieldSample:
    """Electric and magnetic field in the local (R, phi, z) basis."""

    E: np.ndarray
    H: np.ndarray


@dataclass(frozen=True)
class ScatterSolution:
    m: int
    qa: float
    w: float
    M: np.ndarray
    coefficients: dict
    zeta: float
    rhs: dict


@dataclass(frozen=True)
class GuidedMode:
    """A solved point on a guided band.

    ``u`` and ``kappa`` are the core and host transverse wavenumbers.  They
    are kept alongside ``qa`` because ``kappa`` can be far below the
    resolution of ``qa`` near the host light line.
    """

    m: int
    l: int
    family: str
    w: float
    qa: float
    nu: complex
    beta: float | None
    u: float
    kappa: float

    @property
    def label(self):
        return f"{self.family}{abs(self.m)}{self.l}"

    def reversed(self):
        """Same mode travelling along ``-z``."""
        beta = None if self.beta is None else -self.beta
        return replace(self, qa=-self.qa, nu=-self.nu, beta=beta)

    def mirrored(self):
        """Partner with opposite azimuthal number."""
        return replace(self, m=-self.m, nu=-self.nu)


def transverse_wavenumber(eps, w, qa):
    """``sqrt(eps w^2 - qa^2 + i0)`` on the branch with ``Im >= 0``."""
    return complex(np.sqrt(complex(eps * w * w - qa * qa, 0.0)))


def to_cartesian(v, phi):
    """Rotate a (R, phi, z) vector to (x, y, z)."""
    c, s = np.cos(phi), np.sin(phi)
    return np.array([c * v[0] - s * v[1], s * v[0] + c * v[1], v[2]])


def to_cylindrical(v, phi):
    c, s = np.cos(phi), np.sin(phi)
    return np.array([c * v[0] + s * v[1], -s * v[0] + c * v[1], v[2]])


# ---------------------------------------------------------------------------
# vector waves


def _wave_fields(qa, w, eps, Q, trip, cs, cp):
    """Radial parts of ``cs E_s + cp E_p`` and the matching H.

    ``trip`` holds the kernel at orders ``m-1, m, m+1``; ``(m/x) C_m`` and
    ``C_m'`` come from the recurrences so nothing is divided by ``x``.
    """
    cm1, c0, cp1 = trip
    mc_x = 0.5 * (cm1 + cp1)
    der = 0.5 * (cm1 - cp1)
    k = math.sqrt(eps) * w
    zero = np.zeros_like(c0)
    e_s = np.array([1j * mc_x, -der, zero])
    e_p = np.array([1j * qa * der / k, -qa * mc_x / k, Q * c0 / k])
    n = math.sqrt(eps)
    E = cs * e_s + cp * e_p
    H = -1j * n * (cs * e_p + cp * e_s)
    return E, H


def cyl_wave_field(index, w, R_over_a, phi, spec):
    """Field of one cylindrical wave at ``z = 0``.

    Parameters
    ----------
    index : CylWaveIndex
    w : float
        ``omega a / c``.
    R_over_a, phi : float
        Observation point.
    spec : WaveguideSpec

    Returns
    -------
    FieldSample
    """
    eps = spec.eps(index.medium)
    Q = transverse_wavenumber(eps, w, index.qa)
    if R_over_a < 0:
        raise DomainError("R must be non-negative")
    kind = {"regular_J": "J", "outgoing_H": "H1"}[index.kind]
    trip = recurrence_triplet(index.m, Q * R_over_a, kind=kind)
    cs, cp = (1.0, 0.0) if index.sigma == "s" else (0.0, 1.0)
    E, H = _wave_fields(index.qa, w, eps, Q, trip, cs, cp)
    ph = np.exp(1j * index.m * phi)
    return FieldSample(E * ph, H * ph)


# ---------------------------------------------------------------------------
# scattering at the rod surface


def secular_matrix(m, qa, w, spec):
    """The 4x4 matrix acting on ``(r_s, t_s, r_p, t_p)``."""
    e1, eh = spec.eps_core, spec.eps_host
    k1, kh = math.sqrt(e1) * w, math.sqrt(eh) * w
    Q1 = transverse_wavenumber(e1, w, qa)
    Qh = transverse_wavenumber(eh, w, qa)
    z = spec.zeta
    J, Jp = bessel_j(m, Q1)
    H, Hp = hankel1(m, Qh)
    c1 = m * qa / (k1 * Q1)
    ch = m * qa / (kh * Qh)
    return np.array(
        [
            [z * Q1 / k1 * J, -Qh / kh * H, 0, 0],
            [Jp, -Hp, c1 * J, -ch * H],
            [0, 0, Q1 / k1 * J, -Qh / kh * H],
            [z * c1 * J, -ch * H, z * Jp, -Hp],
        ],
        dtype=complex,
    )


def scattering_solution(m, qa, w, spec, cond_max=1e13):
    """Reflection and transmission of an outgoing core wave at ``R = a``.

    Raises
    ------
    NearModeError
        When ``(m, qa, w)`` sits on a guided mode and ``M`` is singular.
    """
    if not w > 0:
        raise DomainError("w must be positive")
    k1 = math.sqrt(spec.eps_core) * w
    Q1 = transverse_wavenumber(spec.eps_core, w, qa)
    z = spec.zeta
    M = secular_matrix(m, qa, w, spec)
    H1, H1p = hankel1(m, Q1)
    c1 = m * qa / (k1 * Q1)
    rhs_s = np.array([-z * Q1 / k1 * H1, -H1p, 0.0, -z * c1 * H1], dtype=complex)
    rhs_p = np.array([0.0, -c1 * H1, -Q1 / k1 * H1, -z * H1p], dtype=complex)
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > cond_max:
        raise NearModeError(
            f"secular matrix singular at m={m}, qa={qa}, w={w}", abs(np.linalg.det(M))
        )
    xs = np.linalg.solve(M, rhs_s)
    xp = np.linalg.solve(M, rhs_p)
    coeffs = {
        "r_ss": xs[0], "t_ss": xs[1], "r_ps": xs[2], "t_ps": xs[3],
        "r_sp": xp[0], "t_sp": xp[1], "r_pp": xp[2], "t_pp": xp[3],
    }
    return ScatterSolution(m, qa, w, M, coeffs, z, {"s": rhs_s, "p": rhs_p})


def scattering_field(sol, sigma, R_over_a, phi, spec):
    """Total field of the scattering problem driven by an ``sigma`` wave."""
    c = sol.coefficients
    if R_over_a < 1.0:
        f = cyl_wave_field(CylWaveIndex("core", sol.qa, sol.m, sigma, "outgoing_H"), sol.w, R_over_a, phi, spec)
        E, H = f.E.copy(), f.H.copy()
        for tau in ("s", "p"):
            g = cyl_wave_field(CylWaveIndex("core", sol.qa, sol.m, tau, "regular_J"), sol.w, R_over_a, phi, spec)
            E += c[f"r_{tau}{sigma}"] * g.E
            H += c[f"r_{tau}{sigma}"] * g.H
    else:
        E = np.zeros(3, complex)
        H = np.zeros(3, complex)
        for tau in ("s", "p"):
            g = cyl_wave_field(CylWaveIndex("host", sol.qa, sol.m, tau, "outgoing_H"), sol.w, R_over_a, phi, spec)
            E += c[f"t_{tau}{sigma}"] * g.E
            H += c[f"t_{tau}{sigma}"] * g.H
    return FieldSample(E, H)


# ---------------------------------------------------------------------------
# dispersion


def _residual_uk(m, u, kappa, w, eps_core, eps_host, factor=None):
    """Reduced secular function ``F`` at core/host wavenumbers ``(u, kappa)``.

    For ``m = 0`` the function factorises; ``factor`` selects ``"TE"`` or
    ``"TM"`` (default: the product).
    """
    m = abs(int(m))
    u = np.asarray(u, dtype=float)
    kappa = np.asarray(kappa, dtype=float)
    V2 = u * u + kappa * kappa
    if m == 0:
        G = special.kve(1, kappa) / special.kve(0, kappa)
        P = -special.j1(u)
        Qv = u * special.j0(u)
        te = kappa * P - G * Qv
        tm = eps_core * kappa * P - eps_host * G * Qv
        if factor == "TE":
            return te
        if factor == "TM":
            return tm
        return (u * u / V2) * te * tm
    g = k_ratio(m, kappa)
    P = special.jv(m - 1, u)
    Qv = u * special.jv(m, u)
    A = P - g * Qv
    return (
        (u * u * kappa * kappa / V2) * A * (eps_core * P - eps_host * g * Qv)
        - m * Qv * ((eps_core + eps_host) * P - 2.0 * eps_host * g * Qv)
        - m * (kappa * kappa / (w * w)) * Qv * A
    )


def _uk(qa, w, spec):
    lo, hi = math.sqrt(spec.eps_host) * w, math.sqrt(spec.eps_core) * w
    if not lo < abs(qa) < hi:
        raise DomainError(f"qa={qa} outside the light-line window ({lo}, {hi}) at w={w}")
    u = math.sqrt(spec.eps_core * w * w - qa * qa)
    kappa = math.sqrt(qa * qa - spec.eps_host * w * w)
    return u, kappa


def dispersion_residual(m, qa, w, spec):
    """Pole-free secular function whose sign changes bracket guided modes.

    Raises
    ------
    DomainError
        If ``qa`` is not strictly between the host and core light lines.
    """
    u, kappa = _uk(qa, w, spec)
    return float(_residual_uk(m, u, kappa, w, spec.eps_core, spec.eps_host))


def _theta_grid():
    return np.concatenate(
        [np.geomspace(1e-300, 1e-3, 600, endpoint=False),
         np.linspace(1e-3, 0.5 * np.pi * (1 - 1e-7), 2000)]
    )


_THETA = _theta_grid()


def _theta_roots(fun):
    """All sign changes of ``fun`` on the angle grid, refined by Brent."""
    vals = fun(_THETA)
    s = np.sign(vals)
    roots = []
    for i in np.nonzero(s[:-1] * s[1:] < 0)[0]:
        roots.append(
            optimize.brentq(fun, _THETA[i], _THETA[i + 1], xtol=1e-300, rtol=1e-15, maxiter=500)
        )
    roots.extend(_THETA[s == 0])
    return sorted(roots)


def _nu_guided(m, qa, w, u, kappa, spec):
    """Hybrid coefficient from tangential continuity, guided-mode form."""
    am = abs(m)
    V2 = u * u + kappa * kappa
    g = k_ratio(am, kappa)
    Jm = special.jv(am, u)
    P = special.jv(am - 1, u)
    den = kappa * kappa * (u * P - u * u * g * Jm) - am * V2 * Jm
    inu = -(qa * m / w) * V2 * Jm / den
    return complex(-1j * inu)


@lru_cache(maxsize=4096)
def _roots_cached(m, w, spec):
    m = abs(m)
    V = w * spec.na
    e1, eh = spec.eps_core, spec.eps_host

    def make(factor):
        return lambda th: _residual_uk(m, V * np.cos(th), V * np.sin(th), w, e1, eh, factor)

    out = []
    if m == 0:
        for fam in ("TE", "TM"):
            for th in _theta_roots(make(fam)):
                out.append((fam, th))
    else:
        for th in _theta_roots(make(None)):
            u, kappa = V * math.cos(th), V * math.sin(th)
            if kappa <= 0 or u <= 0:
                continue
            qa = math.sqrt(eh * w * w + kappa * kappa)
            inu = (1j * _nu_guided(m, qa, w, u, kappa, spec)).real
            out.append(("HE" if inu > 0 else "EH", th))
    return tuple(out)


def find_modes(m, w, spec, l_max=None, compute_beta=True):
    """Guided modes of azimuthal order ``m`` at frequency ``w``.

    Parameters
    ----------
    m : int
    w : float
    spec : WaveguideSpec
    l_max : int, optional
        Keep at most ``l_max`` radial orders per family.
    compute_beta : bool
        Fill in the group velocity (four extra band solves per mode).

    Returns
    -------
    list of GuidedMode
        Sorted by decreasing ``qa``; radial index ``l`` counts within each
        family in that order.

    Raises
    ------
    AccuracyError
        For ``|m| = 1`` below ``V ~ 0.095``, where the HE11 decay constant
        is smaller than the least positive double.
    """
    if not w > 0:
        raise DomainError("w must be positive")
    if l_max is not None and l_max < 1:
        raise DomainError("l_max must be >= 1")
    V = w * spec.na
    found = []
    for fam, th in _roots_cached(int(m), float(w), spec):
        u, kappa = V * math.cos(th), V * math.sin(th)
        if not (kappa > 0 and u > 0):
            continue
        qa = math.sqrt(spec.eps_host * w * w + kappa * kappa)
        nu = _nu_guided(m, qa, w, u, kappa, spec) if m != 0 else 0j
        found.append((qa, fam, nu, u, kappa))
    if abs(m) == 1 and not any(f == "HE" for _, f, _, _, _ in found):
        # HE11 has no cutoff; kappa ~ exp(-2 / V^2) leaves double range near V = 0.095
        raise AccuracyError(f"HE11 decay constant underflows at V = {V:.3g}")
    found.sort(key=lambda t: -t[0])
    counters = {}
    modes = []
    for qa, fam, nu, u, kappa in found:
        counters[fam] = counters.get(fam, 0) + 1
        if l_max is not None and counters[fam] > l_max:
            continue
        modes.append(GuidedMode(int(m), counters[fam], fam, float(w), qa, nu, None, u, kappa))
    if compute_beta:
        modes = [replace(md, beta=group_velocity(md, spec)) for md in modes]
    return modes


def mode_at(m, family, l, w, spec):
    """The ``(m, family, l)`` mode at ``w``, or ``None`` below its cutoff."""
    for md in find_modes(m, w, spec, compute_beta=False):
        if md.family == family and md.l == l:
            return md
    return None


# ---------------------------------------------------------------------------
# group velocity


def _band_factor(mode):
    return mode.family if mode.m == 0 else None


def _solve_w(mode, q, spec, psi_guess):
    """Frequency on the band of ``mode`` at axial wavevector ``q > 0``.

    The band is followed in the angle ``psi`` with ``kappa = k_max sin(psi)``
    so that modes hugging the host light line stay resolved.
    """
    e1, eh = spec.eps_core, spec.eps_host
    kmax = q * math.sqrt(1.0 - eh / e1)
    fac = _band_factor(mode)

    def parts(psi):
        kappa = kmax * math.sin(psi)
        w = math.sqrt((q * q - kappa * kappa) / eh)
        u = math.sqrt(e1 / eh) * kmax * math.cos(psi)
        return u, kappa, w

    def f(psi):
        return float(_residual_uk(mode.m, *parts(psi), e1, eh, fac))

    top = 0.5 * math.pi
    psi_guess = min(psi_guess, top * (1 - 1e-9))
    d = 1e-6
    for _ in range(80):
        a, b = psi_guess / (1 + d), min(psi_guess * (1 + d), top * (1 - 1e-12))
        if f(a) * f(b) < 0:
            psi = optimize.brentq(f, a, b, xtol=1e-300, rtol=4 * np.finfo(float).eps)
            return parts(psi)[2]
        if a < 1e-300 and b >= top * (1 - 1e-12):
            break
        d *= 2.0
    raise AccuracyError(f"no band point for {mode.label} at qa={q}")


def group_velocity(mode, spec, h=1e-4):
    """``d w / d qa`` along the band by Richardson-extrapolated differences.

    Falls back to one-sided differences (with a ``ReducedAccuracyWarning``)
    when ``qa - h`` lies beyond the cutoff of the band.
    """
    q0, w0 = abs(mode.qa), mode.w
    kmax0 = q0 * math.sqrt(1.0 - spec.eps_host / spec.eps_core)
    psi0 = math.asin(min(mode.kappa / kmax0, 1.0))

    def w_at(q):
        return _solve_w(mode, q, spec, psi0)

    try:
        d1 = (w_at(q0 + h) - w_at(q0 - h)) / (2 * h)
        d2 = (w_at(q0 + h / 2) - w_at(q0 - h / 2)) / h
        beta = (4 * d2 - d1) / 3
    except AccuracyError:
        warnings.warn(
            f"{mode.label} at w={w0} is within {h} of cutoff; one-sided difference used",
            ReducedAccuracyWarning,
            stacklevel=2,
        )
        d1 = (w_at(q0 + h) - w0) / h
        d2 = (w_at(q0 + h / 2) - w0) / (h / 2)
        beta = 2 * d2 - d1
    return math.copysign(beta, mode.qa)


# ---------------------------------------------------------------------------
# normalised mode fields


def _mode_coefficients(mode, spec, medium):
    w = mode.w
    if medium == "core":
        Q = complex(mode.u)
        k = math.sqrt(spec.eps_core) * w
    else:
        Q = 1j * mode.kappa
        k = math.sqrt(spec.eps_host) * w
    a_s, a_p = 1j * w / Q, k / Q
    if mode.family == "TE":
        return Q, a_s, 0.0
    if mode.family == "TM":
        return Q, 0.0, a_p
    return Q, mode.nu * a_s, a_p


def _hybrid_host_fields(mode, spec, R):
    """Host-side fields of a hybrid mode with ``m > 0`` and ``qa > 0``.

    Near the host light line the s and p parts are each of order
    ``1/kappa^2`` and cancel to order one.  The cancellation sits in
    ``i nu w - qa``, which the dispersion relation turns into
    ``-qa kappa^2 (u P - u^2 gamma J_m) / den``; the fields are assembled
    around that combination instead.
    """
    m, q, w, u, kappa = mode.m, mode.qa, mode.w, mode.u, mode.kappa
    V2 = u * u + kappa * kappa
    g = k_ratio(m, kappa)
    Jm = special.jv(m, u)
    P = special.jv(m - 1, u)
    num = u * P - u * u * g * Jm
    den = kappa * kappa * num - m * V2 * Jm
    X = -(q * m / w) * V2 * Jm / den  # i nu
    D = -q * num / den  # (X w - q) / kappa^2
    y = kappa * R
    km = k_scaled_ratio(m, m, y, kappa)
    km1_k = k_scaled_ratio(m - 1, m, y, kappa) / kappa
    n = math.sqrt(spec.eps_host)
    kh = n * w
    a = m * km / R
    E = np.array([-1j * (D * a - q * km1_k), -(D * a + X * w * km1_k), km + 0j])
    h = np.array(
        [
            (1j / kh) * ((1 + q * D) * a + X * w * q * km1_k),
            (1 / kh) * ((1 + q * D) * a - kh * kh * km1_k),
            X * w * km / kh + 0j,
        ]
    )
    return E, -1j * n * h


def mode_fields_radial(mode, spec, R):
    """Radial parts of ``E`` and ``H`` (shape ``(3, n)``) without ``e^{im phi}``.

    Negative ``m`` and ``qa`` are reduced to the ``m >= 0``, ``qa > 0`` mode:
    flipping ``qa`` maps ``(E, H)`` to ``(diag(-1,-1,1) E, diag(1,1,-1) H)``
    and flipping ``m`` maps them to ``(diag(1,-1,1) E, diag(-1,1,-1) H)``.
    """
    if mode.m < 0 or mode.qa < 0:
        sm = -1 if mode.m < 0 else 1
        sq = -1 if mode.qa < 0 else 1
        base = replace(mode, m=abs(mode.m), qa=abs(mode.qa), nu=mode.nu * sm * sq)
        E, H = mode_fields_radial(base, spec, R)
        if sq < 0:
            E *= np.array([-1, -1, 1])[:, None]
            H *= np.array([1, 1, -1])[:, None]
        if sm < 0:
            E *= np.array([1, -1, 1])[:, None]
            H *= np.array([-1, 1, -1])[:, None]
        return E, H
    R = np.atleast_1d(np.asarray(R, dtype=float))
    E = np.zeros((3, R.size), complex)
    H = np.zeros((3, R.size), complex)
    m = mode.m
    inner = R < 1.0
    if np.any(inner):
        Q, cs, cp = _mode_coefficients(mode, spec, "core")
        x = mode.u * R[inner]
        jm = special.jv(m, mode.u)
        trip = [special.jv(n, x) / jm for n in (m - 1, m, m + 1)]
        E[:, inner], H[:, inner] = _wave_fields(mode.qa, mode.w, spec.eps_core, Q, trip, cs, cp)
    outer = ~inner
    if np.any(outer):
        if mode.family in ("HE", "EH"):
            E[:, outer], H[:, outer] = _hybrid_host_fields(mode, spec, R[outer])
        else:
            Q, cs, cp = _mode_coefficients(mode, spec, "host")
            y = mode.kappa * R[outer]
            trip = [
                (-1j) ** ((n - m) % 4) * k_scaled_ratio(abs(n), m, y, mode.kappa)
                for n in (m - 1, m, m + 1)
            ]
            E[:, outer], H[:, outer] = _wave_fields(mode.qa, mode.w, spec.eps_host, Q, trip, cs, cp)
    return E, H


def normalized_mode_field(mode, spec, R_over_a, phi=0.0):
    """Mode field normalised to unit ``E_z`` (p part) at the surface.

    Points with ``R < a`` use the core expansion and ``R >= a`` the host one.
    """
    E, H = mode_fields_radial(mode, spec, [R_over_a])
    ph = np.exp(1j * mode.m * phi)
    return FieldSample(E[:, 0] * ph, H[:, 0] * ph)


def mode_flux_integral(mode, spec, rtol=1e-10):
    """Axial Poynting flux ``int d^2R Re(E x H*)_z`` of a normalised mode.

    The core is integrated on ``[0, 1]`` and the evanescent tail on
    ``[1, 1 + 20/kappa]`` split into geometrically growing panels.

    Raises
    ------
    AccuracyError
        If ``kappa`` is so small that the tail cannot be resolved.
    """
    if mode.kappa < KAPPA_MIN:
        raise AccuracyError(f"{mode.label} at w={mode.w} is too close to the light line (kappa={mode.kappa:.3g})")

    def sz(R):
        # second row carries the magnitude scale used by the stopping test,
        # since the two flux terms can cancel to a small remainder
        E, H = mode_fields_radial(mode, spec, R)
        a, b = E[0] * np.conj(H[1]), E[1] * np.conj(H[0])
        scale = 0.5 * np.sum(np.abs(E[:2]) ** 2 + np.abs(H[:2]) ** 2, axis=0)
        return np.array([R * np.real(a - b), 1e-3 * R * scale])

    inner, _ = gauss_legendre(sz, 0.0, 1.0, rtol=rtol)
    L = 20.0 / mode.kappa
    edges = [1.0]
    step = 0.5
    while step < L:
        edges.append(1.0 + step)
        step *= 2.0
    edges.append(1.0 + L)
    outer = gauss_legendre_panels(sz, edges, rtol=rtol)
    inner, outer = inner[0], outer[0]
    return float(2 * np.pi * (inner + outer))


# ---------------------------------------------------------------------------
# band bookkeeping


class Band(NamedTuple):
    m: int  # >= 0
    family: str
    l: int

    @property
    def label(self):
        return f"{self.family}{self.m}{self.l}"


def band_cutoff(band, spec, w_max=50.0, tol=1e-12):
    """Lowest ``w`` at which ``band`` is guided (0 for ``HE11``)."""
    if band == Band(1, "HE", 1):
        return 0.0

    def exists(w):
        return mode_at(band.m, band.family, band.l, w, spec) is not None

    lo, hi = 1e-3, 0.5
    while not exists(hi):
        lo, hi = hi, 2 * hi
        if hi > w_max:
            raise AccuracyError(f"{band.label} not found below w={w_max}")
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        if exists(mid):
            hi = mid
        else:
            lo = mid
    return hi
