# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; mirrors ``_pykernels`` signature for signature."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sin, cos, sinh, cosh, fabs, isfinite, copysign, sqrt, hypot

cnp.import_array()

cdef double POLE_TOL = 1e-300

cdef enum:
    LADDER = 0
    QUADRATIC = 1
    AFFINE = 2
    TANGENT = 3

cdef enum:
    OK = 0
    POLE = 1
    DIVERGED = 2


cdef inline double cabs_(double complex z) noexcept nogil:
    # libm hypot is an order of magnitude slower; only needed near over/underflow
    cdef double s = z.real * z.real + z.imag * z.imag
    if 1e-290 < s < 1e290:
        return sqrt(s)
    return hypot(z.real, z.imag)


cdef inline double complex ctan_(double complex z) noexcept nogil:
    cdef double x2 = 2.0 * z.real
    cdef double y2 = 2.0 * z.imag
    cdef double den
    if fabs(y2) > 700.0:
        return copysign(1.0, z.imag) * 1j
    den = cos(x2) + cosh(y2)
    return (sin(x2) + 1j * sinh(y2)) / den


cdef inline int step_(int kind, double complex a, double complex b,
                      double complex z, double complex* out) noexcept nogil:
    cdef double complex d
    if kind == LADDER:
        d = b + z
        # hypot only when both parts are tiny; same verdict as |d| <= tol
        if fabs(d.real) <= POLE_TOL and fabs(d.imag) <= POLE_TOL and cabs_(d) <= POLE_TOL:
            return POLE
        out[0] = a + b * z / d
    elif kind == QUADRATIC:
        out[0] = z * z + a
    elif kind == AFFINE:
        out[0] = a * z + b
    else:
        out[0] = ctan_(z)
    return OK


def map_orbit(int kind, a, b, z1, Py_ssize_t n, double bound):
    if kind < 0 or kind > 3:
        raise ValueError(f"unknown map kind {kind}")
    cdef double complex ca = complex(a), cb = complex(b), z = complex(z1), w
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty(n, dtype=np.complex128)
    cdef Py_ssize_t k
    cdef int status = OK
    out[0] = z
    with nogil:
        for k in range(1, n):
            if step_(kind, ca, cb, z, &w) == POLE:
                status = POLE
                break
            if not (isfinite(w.real) and isfinite(w.imag)) or cabs_(w) > bound:
                status = DIVERGED
                break
            out[k] = w
            z = w
    if status != OK:
        return out[:k], status
    return out, OK


def map_values(int kind, a, b, z):
    if kind < 0 or kind > 3:
        raise ValueError(f"unknown map kind {kind}")
    cdef double complex ca = complex(a), cb = complex(b), w
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] zz = np.ascontiguousarray(z, dtype=np.complex128).ravel()
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty_like(zz)
    cdef Py_ssize_t j
    with nogil:
        for j in range(zz.shape[0]):
            if step_(kind, ca, cb, zz[j], &w) == POLE:
                out[j] = ca + cb * zz[j] / (cb + zz[j])
            else:
                out[j] = w
    return out.reshape(np.shape(z))


def lipschitz_max(int kind, a, b, za, zb):
    if kind < 0 or kind > 3:
        raise ValueError(f"unknown map kind {kind}")
    cdef double complex ca = complex(a), cb = complex(b), fa, fb
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] xa = np.ascontiguousarray(za, dtype=np.complex128).ravel()
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] xb = np.ascontiguousarray(zb, dtype=np.complex128).ravel()
    cdef Py_ssize_t j, best = -1
    cdef double dz, r, q = -1.0
    with nogil:
        for j in range(xa.shape[0]):
            dz = cabs_(xa[j] - xb[j])
            if dz == 0.0:
                continue
            if step_(kind, ca, cb, xa[j], &fa) == POLE or step_(kind, ca, cb, xb[j], &fb) == POLE:
                continue
            r = cabs_(fa - fb) / dz
            if r != r:
                continue
            if r > q:
                q = r
                best = j
    if best < 0:
        return 0.0, -1
    return q, best


def exp_sum(x, y, coeffs, double sign):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xx = np.ascontiguousarray(x, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] yy = np.ascontiguousarray(y, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] cc = np.ascontiguousarray(coeffs, dtype=np.complex128).ravel()
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty(xx.shape[0], dtype=np.complex128)
    cdef Py_ssize_t j, k, nk = yy.shape[0]
    cdef double ph, re, im, c, s
    if cc.shape[0] != nk:
        raise ValueError("coeffs and y must have the same length")
    with nogil:
        for j in range(xx.shape[0]):
            re = 0.0
            im = 0.0
            for k in range(nk):
                ph = xx[j] * yy[k]
                c = cos(ph)
                s = sign * sin(ph)
                re = re + cc[k].real * c - cc[k].imag * s
                im = im + cc[k].real * s + cc[k].imag * c
            out[j] = re + 1j * im
    return out
