"""Gauss-Legendre quadrature with node doubling."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import AccuracyError


@lru_cache(maxsize=None)
def _nodes(n):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(f, a, b, rtol=1e-9, atol=0.0, n_start=16, n_max=512):
    """Integrate a vectorised ``f`` over ``[a, b]``.

    The node count doubles from ``n_start`` until two successive estimates
    agree to ``rtol`` (or ``atol``).

    Parameters
    ----------
    f : callable
        Maps an array of abscissae to an array of values (real or complex,
        possibly with leading axes; integration runs over the last axis).
    a, b : float
    rtol, atol : float
    n_start, n_max : int

    Returns
    -------
    value : float, complex or ndarray
    n : int
        Node count of the accepted estimate.

    Raises
    ------
    AccuracyError
        If ``n_max`` nodes do not reach the tolerance.
    """
    half, mid = 0.5 * (b - a), 0.5 * (b + a)
    prev = None
    n = n_start
    while n <= n_max:
        x, w = _nodes(n)
        val = half * np.sum(f(mid + half * x) * w, axis=-1)
        if prev is not None:
            err = np.max(np.abs(val - prev))
            if err <= max(rtol * np.max(np.abs(val)), atol):
                return val, n
        prev = val
        n *= 2
    raise AccuracyError(
        f"Gauss-Legendre on [{a}, {b}] did not reach rtol={rtol} with {n_max} nodes"
    )


def gauss_legendre_panels(f, edges, rtol=1e-9, atol=0.0, n_max=512):
    """Sum of :func:`gauss_legendre` over consecutive panels ``edges``."""
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        v, _ = gauss_legendre(f, lo, hi, rtol=rtol, atol=atol, n_max=n_max)
        total = total + v
    return total
