"""Cylindrical Bessel and Hankel functions on the real and imaginary axes.

All field expressions of the waveguide problem reduce to :math:`J_m` and
:math:`H^{(1)}_m` evaluated either on the positive real axis (propagating
cylindrical waves) or on the positive imaginary axis (evanescent exterior
fields of guided modes).  On the imaginary axis the Hankel function is
routed through the modified Bessel function,

.. math:: H^{(1)}_m(iy) = \\frac{2}{\\pi}(-i)^{m+1} K_m(y),

which stays accurate where the direct ``J + iY`` sum loses every digit to
cancellation.  Values come from ``scipy.special`` (AMOS / Cephes); the test
suite checks them against an extended-precision ascending series.

The functions accept scalars or arrays and broadcast like numpy ufuncs.
Derivatives are taken with respect to the argument.
"""

from __future__ import annotations

import numpy as np
from scipy import special

from .errors import CapabilityError, DomainError, SingularityError

M_MAX = 64


def _check_order(m, m_max):
    if int(m) != m:
        raise DomainError(f"order must be an integer, got {m!r}")
    m = int(m)
    if abs(m) > m_max:
        raise CapabilityError(f"|m| = {abs(m)} exceeds m_max = {m_max}")
    return m


def _as_argument(z):
    z = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(z)):
        raise DomainError("Bessel argument must be finite")
    return z


def _on_imag_axis(z):
    return bool(np.all((z.real == 0.0) & (z.imag > 0.0)))


def _on_real_axis(z):
    return bool(np.all(z.imag == 0.0))


def _out(v):
    return v[()] if v.ndim == 0 else v


def bessel_j(m, z, m_max=M_MAX):
    """Bessel function of the first kind and its derivative.

    Parameters
    ----------
    m : int
        Order, ``|m| <= m_max``.
    z : complex or array_like
        Argument.
    m_max : int, optional
        Largest admissible order.

    Returns
    -------
    value, derivative : complex or ndarray
        :math:`J_m(z)` and :math:`J_m'(z)`.
    """
    m = _check_order(m, m_max)
    z = _as_argument(z)
    if _on_real_axis(z):
        x = z.real
        jm1, j0, jp1 = (special.jv(n, x) for n in (m - 1, m, m + 1))
    else:
        jm1, j0, jp1 = (special.jv(n, z) for n in (m - 1, m, m + 1))
    val = np.asarray(j0, dtype=complex)
    der = np.asarray(0.5 * (jm1 - jp1), dtype=complex)
    return _out(val), _out(der)


def _hankel_orders(orders, z):
    """H1 of several integer orders at one argument array."""
    if _on_imag_axis(z):
        y = z.imag
        return [
            (2.0 / np.pi) * (-1j) ** ((n + 1) % 4) * special.kv(n, y)
            for n in orders
        ]
    if _on_real_axis(z):
        x = z.real
        return [special.hankel1(n, x) for n in orders]
    return [special.hankel1(n, z) for n in orders]


def hankel1(m, z, m_max=M_MAX):
    """Hankel function of the first kind and its derivative.

    Parameters
    ----------
    m : int
        Order, ``|m| <= m_max``.
    z : complex or array_like
        Nonzero argument.  Purely imaginary arguments with positive
        imaginary part are evaluated through :math:`K_m`.
    m_max : int, optional
        Largest admissible order.

    Returns
    -------
    value, derivative : complex or ndarray

    Raises
    ------
    SingularityError
        If any argument is zero.
    """
    m = _check_order(m, m_max)
    z = _as_argument(z)
    if np.any(z == 0):
        raise SingularityError("H1 is singular at z = 0")
    hm1, h0, hp1 = _hankel_orders((m - 1, m, m + 1), z)
    val = np.asarray(h0, dtype=complex)
    der = np.asarray(0.5 * (hm1 - hp1), dtype=complex)
    return _out(val), _out(der)


def recurrence_triplet(m, z, kind="J", m_max=M_MAX):
    """Neighbouring orders ``(C_{m-1}, C_m, C_{m+1})``.

    The triplet is enough to build ``(m/z) C_m`` and ``C_m'`` through the
    three-term recurrences without dividing by ``z``, which keeps the
    regular waves finite on the axis.

    Parameters
    ----------
    m : int
    z : complex or array_like
    kind : {"J", "H1"}
    m_max : int, optional

    Returns
    -------
    tuple of complex or ndarray
    """
    m = _check_order(m, m_max)
    z = _as_argument(z)
    if kind == "J":
        vals = [special.jv(n, z.real if _on_real_axis(z) else z) for n in (m - 1, m, m + 1)]
    elif kind == "H1":
        if np.any(z == 0):
            raise SingularityError("H1 is singular at z = 0")
        vals = _hankel_orders((m - 1, m, m + 1), z)
    else:
        raise DomainError(f"unknown Bessel kind {kind!r}")
    return tuple(_out(np.asarray(v, dtype=complex)) for v in vals)


def bessel_k(m, y):
    """Modified Bessel function :math:`K_m(y)` and derivative for real ``y > 0``."""
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0) or not np.all(np.isfinite(y)):
        raise DomainError("K_m needs finite y > 0")
    return _out(special.kv(m, y)), _out(-0.5 * (special.kv(m - 1, y) + special.kv(m + 1, y)))


def k_ratio(m, y):
    """Return ``K_{m-1}(y) / (y K_m(y))`` for ``m >= 1`` and real ``y > 0``.

    Built by the upward continued-fraction recurrence
    ``r_{n+1} = 1 / (r_n + 2n/y)`` with ``r_n = K_{n-1}/K_n``, which is
    stable and never overflows even when ``K_m(y)`` itself would.
    """
    m = abs(int(m))
    if m < 1:
        raise DomainError("k_ratio needs m >= 1")
    y = np.asarray(y, dtype=float)
    r = special.kve(0, y) / special.kve(1, y)
    for n in range(1, m):
        r = 1.0 / (r + 2.0 * n / y)
    return _out(r / y)


def k_scaled_ratio(n, m, y, y0):
    """Return ``K_n(y) / K_m(y0)`` through exponentially scaled values."""
    y = np.asarray(y, dtype=float)
    return _out(special.kve(n, y) / special.kve(m, y0) * np.exp(y0 - y))
