"""Plane-wave illumination and interference selection of azimuthal orders.

A z-polarised plane wave in the host, incident normally on the rod, expands
into regular cylindrical p waves with coefficients ``i^{-m} E0 e^{-i m phi_k}``.
Here ``phi_k`` is the azimuth the wave comes *from*: the wavevector points
along ``-(cos phi_k, sin phi_k)``, which is what that sign of ``i^{-m}``
encodes.  A set of beams ``(E_j, phi_j)`` replaces ``E0 e^{-i m phi_k}`` by
the selection coefficient ``c_m = sum_j E_j e^{-i m phi_j}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .errors import DomainError


@dataclass(frozen=True, eq=False)
class BeamSet:
    """Plane waves of complex amplitude ``E_j`` arriving from azimuth ``phi_j``."""

    amplitudes: np.ndarray
    angles: np.ndarray

    def __post_init__(self):
        E = np.atleast_1d(np.asarray(self.amplitudes, dtype=complex))
        p = np.atleast_1d(np.asarray(self.angles, dtype=float))
        if E.shape != p.shape or E.size == 0:
            raise DomainError("need one angle per amplitude and at least one beam")
        object.__setattr__(self, "amplitudes", E)
        object.__setattr__(self, "angles", p)

    @classmethod
    def from_pairs(cls, beams):
        E, p = zip(*beams)
        return cls(np.array(E), np.array(p))

    @property
    def beams(self):
        return list(zip(self.amplitudes, self.angles))

    def coefficients(self, m_max):
        return selection_coefficients(self, m_max)

    def normalized(self):
        """Same pattern with ``sum_j |E_j| = 1``."""
        return BeamSet(self.amplitudes / np.sum(np.abs(self.amplitudes)), self.angles)

    def to_rows(self):
        return [(j, E.real, E.imag, p) for j, (E, p) in enumerate(self.beams)]


@dataclass(frozen=True, eq=False)
class BeamDesign:
    """Outcome of :func:`design_beams`."""

    beams: BeamSet
    feasible: bool
    residual: float
    keep: tuple
    null: tuple
    report: str = ""
    restarts: int = 0
    coefficients: dict = field(default_factory=dict)


def plane_wave_decomposition(amplitude, phi_k, m_max):
    """Coefficients of ``E^J_{h,0,m,p}`` for a z-polarised normal plane wave.

    Returns
    -------
    list of (int, complex)
        ``(m, i^{-m} E0 e^{-i m phi_k})`` for ``|m| <= m_max``.
    """
    if m_max < 0:
        raise DomainError("m_max must be >= 0")
    return [
        (m, (1j) ** (-m % 4) * amplitude * np.exp(-1j * m * phi_k))
        for m in range(-m_max, m_max + 1)
    ]


def selection_coefficients(beams, m_max):
    """``c_m = sum_j E_j e^{-i m phi_j}`` for ``-m_max <= m <= m_max``.

    Returns
    -------
    dict
        ``{m: c_m}``.
    """
    m = np.arange(-m_max, m_max + 1)
    c = np.exp(-1j * np.outer(m, beams.angles)) @ beams.amplitudes
    return dict(zip(m.tolist(), c))


def catalog():
    """The two-beam and three-beam patterns with known null sets."""
    return {
        "in_phase_0_pi": (BeamSet([1.0, 1.0], [0.0, math.pi]), "odd"),
        "out_of_phase_0_pi": (BeamSet([1.0, -1.0], [0.0, math.pi]), "even"),
        "three_0_pm_pi3": (BeamSet([1.0, 1.0, 1.0], [0.0, math.pi / 3, -math.pi / 3]), (2, -2)),
    }


def _unpack(x, n, equal):
    if equal:
        E = np.ones(n, complex)
        phi = x
    else:
        E = x[:n] + 1j * x[n:2 * n]
        phi = x[2 * n:]
    return E, phi


def _contract_ok(E, phi, keep, null, null_tol=1e-10, keep_frac=0.1):
    bs = BeamSet(E, phi).normalized()
    ms = sorted(set(keep) | set(null))
    if not ms:
        return True, bs
    c = np.exp(-1j * np.outer(ms, bs.angles)) @ bs.amplitudes
    cm = dict(zip(ms, np.abs(c)))
    big = max((cm[k] for k in keep), default=1.0)
    ok_null = all(cm[k] < null_tol * big for k in null)
    ok_keep = all(cm[k] > keep_frac for k in keep)  # sum |E_j| = 1 after normalising
    return ok_null and ok_keep, bs


def design_beams(keep, null, n_beams, seed=0, restarts=64, equal_amplitudes=False):
    """Find beams whose selection coefficients vanish on ``null``.

    Nonlinear least squares (trust-region reflective) over amplitudes and
    angles, restarted from ``restarts`` random points drawn from a fixed seed.
    The contract is ``|c_m| < 1e-10 max_keep |c|`` on ``null`` and
    ``|c_m| > 0.1 sum_j |E_j|`` on ``keep``.

    Parameters
    ----------
    keep, null : iterable of int
    n_beams : int
    seed : int
    restarts : int
    equal_amplitudes : bool
        Restrict to equal real amplitudes and solve for angles only.

    Returns
    -------
    BeamDesign
        ``feasible`` is False when no restart meets the contract; the best
        candidate and its residual are still reported.
    """
    keep, null = tuple(sorted(set(keep))), tuple(sorted(set(null)))
    if set(keep) & set(null):
        raise DomainError("keep and null overlap")
    if n_beams < 1:
        raise DomainError("need at least one beam")
    n = n_beams
    null_m = np.array(null, dtype=float)
    keep_m = np.array(keep, dtype=float)

    def resid(x):
        E, phi = _unpack(x, n, equal_amplitudes)
        s = np.sum(np.abs(E))
        r = []
        if null:
            c = np.exp(-1j * np.outer(null_m, phi)) @ E / s
            r.extend(c.real)
            r.extend(c.imag)
        if keep.__len__():
            ck = np.abs(np.exp(-1j * np.outer(keep_m, phi)) @ E) / s
            r.extend(np.maximum(0.0, 0.2 - ck))
        if not equal_amplitudes:
            r.append(s - 1.0)
        return np.array(r) if r else np.zeros(1)

    rng = np.random.default_rng(seed)
    best = None
    for k in range(restarts):
        if equal_amplitudes:
            x0 = rng.uniform(0, 2 * np.pi, n)
        else:
            x0 = np.concatenate(
                [rng.normal(size=n) / n, rng.normal(size=n) / n, rng.uniform(0, 2 * np.pi, n)]
            )
        sol = optimize.least_squares(resid, x0, method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=2000)
        E, phi = _unpack(sol.x, n, equal_amplitudes)
        if np.sum(np.abs(E)) == 0:
            continue
        ok, bs = _contract_ok(E, np.mod(phi, 2 * np.pi), keep, null)
        res = float(np.linalg.norm(resid(sol.x)))
        if best is None or (ok, -res) > (best[0], -best[1]):
            best = (ok, res, bs, k)
        if ok:
            break
    ok, res, bs, k = best
    coeffs = selection_coefficients(bs, max((abs(m) for m in keep + null), default=0))
    report = "" if ok else (
        f"no configuration of {n} beams met the contract after {restarts} restarts; "
        f"best residual {res:.3e}"
    )
    return BeamDesign(bs, ok, res, keep, null, report, k + 1, coeffs)
