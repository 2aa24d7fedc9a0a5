"""Pure Python/numpy implementations of the hot kernels.

Signatures and semantics match the compiled ``_ckernels`` module exactly;
:mod:`lcladder.kernels` picks one at import time.
"""
import cmath
import math

import numpy as np

POLE_TOL = 1e-300

# map kinds understood by map_orbit / map_values / lipschitz_max
LADDER, QUADRATIC, AFFINE, TANGENT = 0, 1, 2, 3

# orbit status codes
OK, POLE, DIVERGED = 0, 1, 2


def _step(kind, a, b, z):
    if kind == LADDER:
        d = b + z
        if abs(d) <= POLE_TOL:
            return None
        return a + b * z / d
    if kind == QUADRATIC:
        return z * z + a
    if kind == AFFINE:
        return a * z + b
    if kind == TANGENT:
        try:
            return cmath.tan(z)
        except (OverflowError, ValueError):
            return complex(math.inf, 0.0)
    raise ValueError(f"unknown map kind {kind}")


def map_orbit(kind, a, b, z1, n, bound):
    """Iterate a map ``n - 1`` times from ``z1``.

    Returns ``(values, status)``; ``values`` holds the iterates computed
    before a pole hit or a divergence (non-finite or ``|z| > bound``).
    """
    a = complex(a)
    b = complex(b)
    z = complex(z1)
    out = np.empty(n, dtype=np.complex128)
    out[0] = z
    for k in range(1, n):
        try:
            w = _step(kind, a, b, z)
        except OverflowError:
            return out[:k], DIVERGED
        if w is None:
            return out[:k], POLE
        if not (math.isfinite(w.real) and math.isfinite(w.imag)) or abs(w) > bound:
            return out[:k], DIVERGED
        out[k] = w
        z = w
    return out, OK


def map_values(kind, a, b, z):
    z = np.asarray(z, dtype=np.complex128)
    with np.errstate(all="ignore"):
        if kind == LADDER:
            return a + b * z / (b + z)
        if kind == QUADRATIC:
            return z * z + a
        if kind == AFFINE:
            return a * z + b
        if kind == TANGENT:
            return np.tan(z)
    raise ValueError(f"unknown map kind {kind}")


def lipschitz_max(kind, a, b, za, zb):
    """Largest ``|f(za) - f(zb)| / |za - zb|`` over the pairs, and its index.

    Coincident pairs are skipped. Returns ``(0.0, -1)`` when none remain.
    """
    za = np.asarray(za, dtype=np.complex128)
    zb = np.asarray(zb, dtype=np.complex128)
    dz = np.abs(za - zb)
    with np.errstate(all="ignore"):
        ratio = np.abs(map_values(kind, a, b, za) - map_values(kind, a, b, zb)) / dz
    ratio[dz == 0.0] = -1.0
    ratio[np.isnan(ratio)] = -1.0
    if ratio.size == 0:
        return 0.0, -1
    idx = int(np.argmax(ratio))
    if ratio[idx] < 0.0:
        return 0.0, -1
    return float(ratio[idx]), idx


def exp_sum(x, y, coeffs, sign):
    """``out[j] = sum_k coeffs[k] * exp(sign * 1j * x[j] * y[k])``."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    out = np.empty(x.size, dtype=np.complex128)
    block = max(1, (1 << 20) // max(1, y.size))
    for start in range(0, x.size, block):
        xb = x[start:start + block]
        phase = np.multiply.outer(xb, y)
        out[start:start + block] = ((np.cos(phase) + (1j * sign) * np.sin(phase)) * coeffs).sum(axis=1)
    return out
