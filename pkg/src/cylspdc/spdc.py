"""Down-conversion into counter-propagating guided photon pairs.

The efficiency of a channel ``i + i'`` is computed through the reverse
process, sum-frequency generation by two counter-propagating guided modes,
and assembled from three integrals: the axial fluxes ``I_i`` and ``I_i'`` of
the normalised mode fields and the far-field emission ``I_ii'(phi)`` of the
nonlinear polarisation ``P_a = sum_bc chi_abc E_{i,b} E_{i',c}``.

Efficiencies are reported in units of ``(hbar c / a^4) |chi|^2`` where
``|chi|`` is the sum of absolute values of the 27 tensor components.  In
these units they depend on the geometry only through ``w = omega a / c``
and the permittivities.
"""

from __future__ import annotations

import itertools
import logging
import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy import optimize, special

from .errors import AccuracyError, DegenerateModeError, DomainError, ReducedAccuracyWarning
from .green import _terms, transmission_q0
from .quadrature import _nodes, gauss_legendre
from .waveguide import (
    KAPPA_MIN,
    Band,
    GuidedMode,
    band_cutoff,
    find_modes,
    group_velocity,
    mode_at,
    mode_fields_radial,
    mode_flux_integral,
    to_cartesian,
    to_cylindrical,
)

log = logging.getLogger(__name__)

HBAR_C_CGS = 3.161e-17  # erg cm
EV_J = 1.602176634e-19
SI_TO_GAUSS_CHI = 3.0e4 / (4.0 * math.pi)  # (m/V) -> (cm/statvolt)

__all__ = [
    "Chi2Tensor",
    "PolarizationSample",
    "ChannelPair",
    "EfficiencyResult",
    "nonlinear_polarization",
    "mode_flux_integral",
    "emission_integral",
    "efficiency",
    "enumerate_channels",
    "channel_count_class",
    "channel_thresholds",
    "channel_variants",
    "physical_prefactor",
    "physical_rate",
]


def _rotation_z(t):
    c, s = math.cos(t), math.sin(t)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


@dataclass(frozen=True, eq=False)
class Chi2Tensor:
    """Second-order susceptibility ``chi_abc`` in Cartesian components (m/V).

    Parameters
    ----------
    components : array_like, shape (3, 3, 3)
    cylindrical : bool
        Assert invariance under rotations about ``z``.  Checked on
        construction.
    """

    components: np.ndarray
    cylindrical: bool = True

    def __post_init__(self):
        c = np.array(self.components, dtype=float)
        if c.shape != (3, 3, 3):
            raise DomainError("chi2 needs 27 components")
        if not np.all(np.isfinite(c)) or np.sum(np.abs(c)) <= 0:
            raise DomainError("chi2 must be finite and nonzero")
        c.setflags(write=False)
        object.__setattr__(self, "components", c)
        if self.cylindrical and not self.is_rotation_invariant():
            raise DomainError("components are not invariant under rotation about z")

    @classmethod
    def zzz(cls, value=1.0e-10):
        c = np.zeros((3, 3, 3))
        c[2, 2, 2] = value
        return cls(c)

    @property
    def norm(self):
        return float(np.sum(np.abs(self.components)))

    @property
    def normalized(self):
        return self.components / self.norm

    @property
    def is_zzz_only(self):
        c = self.components.copy()
        c[2, 2, 2] = 0.0
        return not np.any(c) and self.components[2, 2, 2] != 0

    def is_rotation_invariant(self, tol=1e-12):
        Rz = _rotation_z(0.7)
        rot = np.einsum("ai,bj,ck,ijk->abc", Rz, Rz, Rz, self.components)
        return np.max(np.abs(rot - self.components)) <= tol * self.norm


@dataclass(frozen=True)
class PolarizationSample:
    P_tilde: np.ndarray
    position: tuple


@dataclass(frozen=True)
class ChannelPair:
    """One down-conversion channel class: ``mode_i`` at ``+q``, ``mode_ip`` at ``-q``."""

    mode_i: GuidedMode
    mode_ip: GuidedMode
    w_total: float
    m_total: int
    label: str
    name: str


@dataclass(frozen=True, eq=False)
class EfficiencyResult:
    eta_scaled: float
    eta_phi: np.ndarray
    phi: np.ndarray
    I_i: float
    I_ip: float
    I_iip_phi: np.ndarray


# ---------------------------------------------------------------------------
# polarisation and the three integrals


def nonlinear_polarization(mode_i, mode_ip, chi, R_over_a, phi, spec):
    """Normalised nonlinear polarisation ``P~`` in the (R, phi, z) basis."""
    if R_over_a >= 1.0:
        return PolarizationSample(np.zeros(3, complex), (R_over_a, phi))
    Ei, _ = mode_fields_radial(mode_i, spec, [R_over_a])
    Eip, _ = mode_fields_radial(mode_ip, spec, [R_over_a])
    Ei = to_cartesian(Ei[:, 0] * np.exp(1j * mode_i.m * phi), phi)
    Eip = to_cartesian(Eip[:, 0] * np.exp(1j * mode_ip.m * phi), phi)
    P = np.einsum("abc,b,c->a", chi.normalized, Ei, Eip)
    return PolarizationSample(to_cylindrical(P, phi), (R_over_a, phi))


def _check_pair(mode_i, mode_ip, tol=1e-9):
    if abs(mode_i.qa + mode_ip.qa) > tol * max(1.0, abs(mode_i.qa)):
        raise DomainError(
            f"modes are not counter-propagating: qa_i={mode_i.qa}, qa_ip={mode_ip.qa}"
        )


def _zzz_amplitude(mode_i, mode_ip, spec, rtol=1e-12):
    """Scalar ``2 pi k^2 t_M int R J_M(k1 R) e_z e_z' dR`` for zzz-only chi."""
    w_t = mode_i.w + mode_ip.w
    M = mode_i.m + mode_ip.m
    k1 = math.sqrt(spec.eps_core) * w_t
    t_pp = transmission_q0(M, w_t, spec)[1]

    def f(R):
        Ei, _ = mode_fields_radial(mode_i, spec, R)
        Eip, _ = mode_fields_radial(mode_ip, spec, R)
        return R * special.jv(M, k1 * R) * Ei[2] * Eip[2]

    # the integral can cancel to far below its integrand; bound the error
    # by the integral of |f| instead
    x, wts = _nodes(128)
    scale = 0.5 * np.sum(np.abs(f(0.5 + 0.5 * x)) * wts)
    radial, _ = gauss_legendre(f, 0.0, 1.0, rtol=rtol, atol=max(rtol * scale, 1e-300))
    return 2 * math.pi * w_t * w_t * t_pp * radial


def _generic_amplitudes(mode_i, mode_ip, chi, spec, phis, n_phi=256, rtol=1e-9):
    """Far-field vector amplitudes for arbitrary chi (periodic trapezoid in phi')."""
    w_t = mode_i.w + mode_ip.w
    k1 = math.sqrt(spec.eps_core) * w_t
    rows, _ = _terms(w_t, k1, spec, 63)
    ns = np.array([r[0] for r in rows])
    pp = np.arange(n_phi) * (2 * np.pi / n_phi)
    cn, sn = np.cos(pp), np.sin(pp)
    chi_n = chi.normalized

    def cart(mode, R):
        E, _ = mode_fields_radial(mode, spec, R)
        ph = np.exp(1j * mode.m * pp)
        Ec = E[:, :, None] * ph  # (3, nR, nphi)
        return np.array([cn * Ec[0] - sn * Ec[1], sn * Ec[0] + cn * Ec[1], Ec[2]])

    def F(R):
        Ei, Eip = cart(mode_i, R), cart(mode_ip, R)
        P = np.einsum("abc,brp,crp->arp", chi_n, Ei, Eip)
        phase = np.exp(-1j * np.outer(ns, pp))  # (n, nphi)
        J = special.jv(ns[:, None], k1 * R[None, :])  # (n, nR)
        val = np.einsum("arp,np,nr->anr", P, phase, J) * (2 * np.pi / n_phi)
        return val * R

    Fn, _ = gauss_legendre(F, 0.0, 1.0, rtol=rtol, atol=1e-300)  # (3, n)
    out = np.zeros((len(phis), 3), complex)
    for j, phi in enumerate(phis):
        c, s = math.cos(phi), math.sin(phi)
        Fobs = np.array([c * Fn[0] + s * Fn[1], -s * Fn[0] + c * Fn[1], Fn[2]])
        for k, (n, Jn, t_pp, t_up, t_dn) in enumerate(rows):
            a = (1j) ** (-n % 4) * np.exp(1j * n * phi)
            out[j, 2] += a * t_pp * Fobs[2, k]
            out[j, 1] += a * (0.5 * (t_up + t_dn) * Fobs[1, k] + 0.5j * (t_up - t_dn) * Fobs[0, k])
    return w_t * w_t * out


def emission_integral(mode_i, mode_ip, chi, spec, phi=0.0):
    """``I_ii'(phi) = |int d^2R' g(phi - phi', R') . P~(R')|^2``.

    With zzz-only chi the angular integral keeps the single harmonic
    ``m_i + m_i'`` and is done in closed form; otherwise a 256-node periodic
    trapezoid rule is used.
    """
    _check_pair(mode_i, mode_ip)
    phis = np.atleast_1d(np.asarray(phi, dtype=float))
    if chi.is_zzz_only:
        val = abs(_zzz_amplitude(mode_i, mode_ip, spec)) ** 2 * np.ones(phis.shape)
    else:
        A = _generic_amplitudes(mode_i, mode_ip, chi, spec, phis)
        val = np.sum(np.abs(A) ** 2, axis=1)
    return float(val[0]) if np.ndim(phi) == 0 else val


def efficiency(mode_i, mode_ip, chi, spec, n_phi=64):
    """Scaled efficiency of the channel ``mode_i + mode_ip``.

    Returns
    -------
    EfficiencyResult
        ``eta_scaled`` is in units of ``(hbar c / a^4) |chi|^2``.

    A mode closer to the host light line than ``KAPPA_MIN`` has a flux
    beyond floating-point range; since the efficiency scales as
    ``kappa^2`` there, ``eta_scaled = 0`` is returned with a
    ``ReducedAccuracyWarning``.

    Raises
    ------
    DegenerateModeError
        If either mode carries no flux.
    """
    _check_pair(mode_i, mode_ip)
    if min(mode_i.kappa, mode_ip.kappa) < KAPPA_MIN:
        warnings.warn(
            f"{mode_i.label}+{mode_ip.label} at w={mode_i.w}+{mode_ip.w}: mode at the light line, "
            "efficiency below floating-point range",
            ReducedAccuracyWarning,
            stacklevel=2,
        )
        phi = np.arange(n_phi) * (2 * np.pi / n_phi)
        zero = np.zeros(n_phi)
        return EfficiencyResult(0.0, zero, phi, math.inf, math.inf, zero)
    I_i = mode_flux_integral(mode_i, spec)
    I_ip = mode_flux_integral(mode_ip, spec)
    if I_i == 0 or I_ip == 0 or not (np.isfinite(I_i) and np.isfinite(I_ip)):
        raise DegenerateModeError(f"zero flux in {mode_i.label} or {mode_ip.label}")
    b_i = mode_i.beta if mode_i.beta is not None else group_velocity(mode_i, spec)
    b_ip = mode_ip.beta if mode_ip.beta is not None else group_velocity(mode_ip, spec)
    wi, wip = mode_i.w, mode_ip.w
    pref = (
        2 * math.pi
        * wi * wip / (wi + wip) ** 2
        * abs(b_i * b_ip) / (abs(b_i) + abs(b_ip))
        / abs(I_i)
        / abs(I_ip)
    )
    phi = np.arange(n_phi) * (2 * np.pi / n_phi)
    I_iip = emission_integral(mode_i, mode_ip, chi, spec, phi)
    eta_phi = pref * I_iip
    eta = float(np.sum(eta_phi) * (2 * np.pi / n_phi))
    return EfficiencyResult(eta, eta_phi, phi, I_i, I_ip, I_iip)


# ---------------------------------------------------------------------------
# channels


def _q_ext(band, w, spec, cutoff):
    """Band wavevector, continued along the host light line below cutoff."""
    if w <= cutoff:
        return math.sqrt(spec.eps_host) * max(w, 0.0)
    try:
        md = mode_at(band.m, band.family, band.l, w, spec)
    except AccuracyError:
        md = None  # kappa below double range, qa is the light line to rounding
    if md is None:
        return math.sqrt(spec.eps_host) * w
    return md.qa


def _bands_at(w_total, spec):
    """Bands with nonzero E_z guided at ``w_total``."""
    bands = []
    empty = 0
    for m in itertools.count():
        modes = [md for md in find_modes(m, w_total, spec, compute_beta=False) if md.family != "TE"]
        empty = empty + 1 if not modes else 0
        if empty >= 2 and m >= 2:
            break
        bands.extend(Band(m, md.family, md.l) for md in modes)
    return bands


_CUTOFFS = {}


def _cutoff(band, spec):
    key = (band, spec)
    if key not in _CUTOFFS:
        _CUTOFFS[key] = band_cutoff(band, spec)
    return _CUTOFFS[key]


def _label(a, b):
    name = f"{a.label}+{b.label}"
    return name if name in ("HE11+HE11", "HE11+TM01", "TM01+HE11") else "higher"


def enumerate_channels(w_total, spec, compute_beta=True):
    """All channel classes at pump frequency ``w_total``.

    A class is an ordered pair of bands ``(a, b)``: ``a`` carries ``+q`` and
    ``b`` carries ``-q``.  The ``+-m`` copies and the overall ``q -> -q``
    copy are folded into each class.

    Returns
    -------
    list of ChannelPair
        Ordered by band pair.
    """
    if not w_total > 0:
        raise DomainError("w_total must be positive")
    bands = _bands_at(w_total, spec)
    cut = {b: _cutoff(b, spec) for b in bands}
    out = []
    for a, b in itertools.product(bands, bands):
        lo, hi = cut[a], w_total - cut[b]
        if not lo < hi:
            continue
        if a == b:
            wa = 0.5 * w_total
        else:
            def G(wa):
                return _q_ext(a, wa, spec, cut[a]) - _q_ext(b, w_total - wa, spec, cut[b])

            g_lo, g_hi = G(lo), G(hi)
            if not g_lo < 0 < g_hi:
                continue
            wa = optimize.brentq(G, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)
        ma = mode_at(a.m, a.family, a.l, wa, spec)
        mb = mode_at(b.m, b.family, b.l, w_total - wa, spec)
        if ma is None or mb is None:
            continue
        if compute_beta:
            ma = _with_beta(ma, spec)
            mb = _with_beta(mb, spec)
        mb = mb.reversed()
        out.append(ChannelPair(ma, mb, w_total, ma.m + mb.m, _label(a, b), f"{a.label}+{b.label}"))
    return out


def _with_beta(mode, spec):
    return replace(mode, beta=group_velocity(mode, spec))


def channel_count_class(n):
    """Map a channel count to the reported class ``"1"``, ``"3"`` or ``">3"``."""
    if n <= 1:
        return str(n)
    return "3" if n <= 3 else ">3"


def channel_thresholds(spec):
    """``(w1, w2)``: TM01 cutoff and the HE11 frequency with ``qa = sqrt(eps_h) w1``.

    One channel exists below ``w1 + w2``, three between ``w1 + w2`` and
    ``2 w1``.
    """
    w1 = _cutoff(Band(0, "TM", 1), spec)
    target = math.sqrt(spec.eps_host) * w1
    w2 = optimize.brentq(
        lambda w: find_modes(1, w, spec, compute_beta=False)[0].qa - target,
        w1 * math.sqrt(spec.eps_host / spec.eps_core),
        w1,
        xtol=1e-14,
    )
    return w1, w2


def channel_variants(pair):
    """Sign variants ``(mode_i, mode_ip, multiplicity)`` of a channel class.

    Variants that differ only by a global ``m`` flip or a global ``q`` flip
    have the same efficiency and are folded into the multiplicity.
    """
    a, b = pair.mode_i, pair.mode_ip
    if a.m != 0 and b.m != 0:
        return [(a, b, 4), (a, b.mirrored(), 4)]
    if a.m == 0 and b.m == 0:
        return [(a, b, 2)]
    return [(a, b, 4)]


# ---------------------------------------------------------------------------
# physical units


def physical_prefactor(spec, chi):
    """``(hbar c / a^4) |chi|^2`` in Gaussian units (dimensionless)."""
    a_cm = spec.radius_a * 100.0
    chi_g = chi.norm * SI_TO_GAUSS_CHI
    return HBAR_C_CGS / a_cm**4 * chi_g**2


def physical_rate(eta_scaled, spec, chi, pump_power, photon_energy):
    """Pair rate (1/s) for pump power in watts and photon energy in eV."""
    if pump_power < 0 or photon_energy <= 0 or eta_scaled < 0:
        raise DomainError("physical inputs must be positive")
    photons_per_s = pump_power / (photon_energy * EV_J)
    return photons_per_s * eta_scaled * physical_prefactor(spec, chi)
