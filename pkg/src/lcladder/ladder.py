"""Ladder recursion, fixed points and Moebius-coordinate convergence.

A ladder section has series impedance ``Z1`` and shunt impedance ``Z2``.
The input impedance of ``n + 1`` sections obeys

    z_{n+1} = Z1 + 1 / (1/Z2 + 1/z_n)

and after normalising with ``p_n = z_n / Z1`` and ``t = Z2 / Z1``

    p_{n+1} = 1 + t p_n / (t + p_n).

The fixed points are ``p_pm = (1 +- sqrt(1 + 4t)) / 2`` with the branch of the
root chosen so that its real part is positive. In the coordinate
``c(p) = (p - p_+) / (p - p_-)`` one step of the recursion is exact
multiplication by ``gamma**2`` where ``gamma = p_- / p_+``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .errors import (
    CutError,
    DegenerateError,
    InfinityError,
    NoConvergence,
    PoleError,
    UnstableSeed,
)

CUT_IM_TOL = 1e-300
POLE_TOL = kernels.POLE_TOL
MARGINAL = 1e-12


def _scale(x) -> float:
    return max(1.0, abs(x))


@dataclass(frozen=True)
class LadderParams:
    """Series impedance ``z1``, shunt impedance ``z2`` and ``t = z2 / z1``."""

    z1: complex
    z2: complex
    t: complex = field(init=False)

    def __post_init__(self):
        z1 = complex(self.z1)
        z2 = complex(self.z2)
        if z1 == 0:
            raise DegenerateError("series impedance z1 must be nonzero")
        if not all(math.isfinite(v) for v in (z1.real, z1.imag, z2.real, z2.imag)):
            raise ValueError("impedances must be finite")
        object.__setattr__(self, "z1", z1)
        object.__setattr__(self, "z2", z2)
        object.__setattr__(self, "t", z2 / z1)


@dataclass(frozen=True)
class FixedPointAnalysis:
    p_plus: complex
    p_minus: complex
    sqrt_1p4t: complex
    gamma: complex
    gamma_abs_sq: float
    stable_is_plus: bool = True

    @property
    def a(self) -> float:
        return self.sqrt_1p4t.real

    @property
    def b(self) -> float:
        return self.sqrt_1p4t.imag

    @property
    def t(self) -> complex:
        return -self.p_plus * self.p_minus


def on_cut(t: complex) -> bool:
    t = complex(t)
    return abs(t.imag) < CUT_IM_TOL and t.real <= -0.25


def branch_sqrt_1p4t(t: complex) -> complex:
    """Square root of ``1 + 4t`` with strictly positive real part.

    Raises
    ------
    CutError
        If ``t`` is on the closed ray ``(-inf, -1/4]``. Lossless passband
        ladders end up here and must be regularised with small losses.
    """
    t = complex(t)
    if not (math.isfinite(t.real) and math.isfinite(t.imag)):
        raise ValueError(f"t must be finite, got {t!r}")
    if on_cut(t):
        raise CutError(
            f"t = {t!r} lies on the branch cut (-inf, -1/4] of sqrt(1 + 4t); "
            "add positive losses r, r' and take the lossless limit afterwards"
        )
    w = cmath.sqrt(1.0 + 4.0 * t)
    if w.real < 0.0:
        w = -w
    if w.real == 0.0:
        raise CutError(f"sqrt(1 + 4t) has zero real part at t = {t!r}; t is on the branch cut")
    return w


def fixed_points(t: complex) -> FixedPointAnalysis:
    w = branch_sqrt_1p4t(t)
    p_plus = 0.5 * (1.0 + w)
    p_minus = 0.5 * (1.0 - w)
    gamma = p_minus / p_plus
    return FixedPointAnalysis(
        p_plus=p_plus,
        p_minus=p_minus,
        sqrt_1p4t=w,
        gamma=gamma,
        gamma_abs_sq=abs(gamma) ** 2,
    )


def moebius_coordinate(p: complex, fp: FixedPointAnalysis) -> complex:
    """``c(p) = (p - p_+) / (p - p_-)``; sends ``p_+`` to 0 and ``p_-`` to infinity."""
    p = complex(p)
    den = p - fp.p_minus
    if abs(den) <= POLE_TOL:
        raise InfinityError(f"p = {p!r} is the repelling fixed point; c(p) is infinite")
    return (p - fp.p_plus) / den


def _moebius_array(p: np.ndarray, fp: FixedPointAnalysis) -> np.ndarray:
    den = p - fp.p_minus
    num = p - fp.p_plus
    c = np.empty_like(p)
    at_pole = np.abs(den) <= POLE_TOL
    with np.errstate(all="ignore"):
        c[~at_pole] = num[~at_pole] / den[~at_pole]
    c[at_pole] = complex(math.inf, 0.0)
    return c


@dataclass(frozen=True, eq=False)
class IterationTrace:
    """Iterates ``p_n`` of the normalised recursion with their Moebius coordinates.

    ``n`` counts from 1. If an iterate hit the pole ``p = -t`` the trace
    stops there and ``pole`` carries the :class:`PoleError`.
    """

    t: complex
    n: np.ndarray
    p: np.ndarray
    c: np.ndarray
    abs_err: np.ndarray
    fixed: FixedPointAnalysis
    pole: Optional[PoleError] = None

    def __len__(self):
        return len(self.p)

    def rows(self):
        for k in range(len(self)):
            yield int(self.n[k]), complex(self.p[k]), complex(self.c[k]), float(self.abs_err[k])


def iterate_p(t: complex, p1: complex, n: int, *, raise_on_pole: bool = False) -> IterationTrace:
    """Run ``n`` terms of ``p_{k+1} = 1 + t p_k / (t + p_k)`` starting at ``p1``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    p1 = complex(p1)
    if not (math.isfinite(p1.real) and math.isfinite(p1.imag)):
        raise ValueError("p1 must be finite")
    t = complex(t)
    fp = fixed_points(t)
    values, status = kernels.map_orbit(kernels.LADDER, 1.0, t, p1, n, math.inf)
    pole = None
    if status == kernels.POLE:
        pole = PoleError(len(values), complex(values[-1]))
        if raise_on_pole:
            raise pole
    values = np.asarray(values, dtype=np.complex128)
    return IterationTrace(
        t=t,
        n=np.arange(1, len(values) + 1),
        p=values,
        c=_moebius_array(values, fp),
        abs_err=np.abs(values - fp.p_plus),
        fixed=fp,
        pole=pole,
    )


def iterate_z(params: LadderParams, z1: complex, n: int, *, raise_on_pole: bool = False) -> np.ndarray:
    """Input impedances ``z_1..z_n`` of the unnormalised recursion.

    Uses ``1/(1/Z2 + 1/z) = Z2 z / (Z2 + z)``, which stays finite at ``z = 0``.
    A pole hit truncates the result (or raises with ``raise_on_pole``).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if params.z2 == 0:
        raise DegenerateError("shunt impedance Z2 = 0 shorts every section")
    values, status = kernels.map_orbit(kernels.LADDER, params.z1, params.z2, complex(z1), n, math.inf)
    if status == kernels.POLE and raise_on_pole:
        raise PoleError(len(values), complex(values[-1]))
    return np.asarray(values, dtype=np.complex128)


@dataclass(frozen=True)
class ContractionLawReport:
    passed: bool
    max_deviation: float
    checked: int
    gamma_sq: complex
    message: str = ""


def verify_contraction_law(trace: IterationTrace, fp: Optional[FixedPointAnalysis] = None,
                           rtol: float = 1e-10) -> ContractionLawReport:
    """Check ``c_{n+1} == gamma**2 * c_n`` as a complex identity along a trace.

    Deviations are measured relative to ``max(1, |c_{n+1}|)``. Pairs with a
    non-finite coordinate (seed at ``p_-``) are skipped.
    """
    fp = fp or trace.fixed
    g2 = fp.gamma * fp.gamma
    if len(trace) < 2:
        return ContractionLawReport(False, math.nan, 0, g2, "insufficient data")
    c = trace.c
    prev, nxt = c[:-1], c[1:]
    ok = np.isfinite(prev) & np.isfinite(nxt)
    if not ok.any():
        return ContractionLawReport(False, math.nan, 0, g2, "insufficient data")
    dev = np.abs(nxt[ok] - g2 * prev[ok]) / np.maximum(1.0, np.abs(nxt[ok]))
    worst = float(dev.max())
    passed = worst <= rtol
    return ContractionLawReport(passed, worst, int(ok.sum()), g2,
                                "ok" if passed else f"max deviation {worst:.3e} exceeds {rtol:.1e}")


@dataclass(frozen=True)
class ConvergenceResult:
    limit: complex
    iterations: int
    rate: float
    stopped_by: str
    step_size: float
    error_bound: float

    def __iter__(self):
        return iter((self.limit, self.iterations, self.rate))


def converge(t: complex, p1: complex, tol: float = 1e-12, max_iter: int = 10_000) -> ConvergenceResult:
    """Iterate from ``p1`` until within ``tol`` of the attracting fixed point.

    Two stopping tests run every step and whichever fires first is reported
    in ``stopped_by``:

    * ``"step"``: ``|p_{n+1} - p_n| <= tol (1 - |gamma|^2) / 2``, honoured
      only once the orbit is nearer ``p_+`` than ``p_-`` (``|c_n| < 1``);
    * ``"moebius"``: ``|c_n| |p_n - p_-| <= tol``, the identity for the error.

    Raises
    ------
    UnstableSeed
        ``p1`` is exactly the repelling fixed point.
    NoConvergence
        ``|gamma|^2 > 1 - 1e-12`` or ``max_iter`` is exhausted.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    fp = fixed_points(t)
    t = complex(t)
    p = complex(p1)
    q = fp.gamma_abs_sq
    if q > 1.0 - MARGINAL:
        raise NoConvergence(f"|gamma|^2 = {q!r} is marginal; regularise with positive losses")
    if p == fp.p_minus:
        raise UnstableSeed("seed equals the repelling fixed point p_-")
    step_tol = tol * (1.0 - q) / 2.0
    for k in range(1, max_iter + 1):
        dm = p - fp.p_minus
        c = (p - fp.p_plus) / dm
        bound = abs(c) * abs(dm)
        if bound <= tol:
            return ConvergenceResult(p, k, q, "moebius", math.nan, bound)
        d = t + p
        if abs(d) <= POLE_TOL:
            raise PoleError(k, p)
        nxt = 1.0 + t * p / d
        step = abs(nxt - p)
        if step <= step_tol and abs(c) < 1.0:
            return ConvergenceResult(nxt, k + 1, q, "step", step, abs(nxt - fp.p_plus))
        p = nxt
    raise NoConvergence(f"no convergence within {max_iter} iterations")


class DivergentMarker:
    """Placeholder for a limit that does not exist.

    ``formal`` is the value the closed form ``R / (1 - p)`` would give; it is
    not the limit of the partial sums.
    """

    label = "formal, not a limit"

    def __init__(self, formal):
        self.formal = formal

    def __repr__(self):
        return f"DivergentMarker(formal={self.formal!r})"

    def __eq__(self, other):
        return isinstance(other, DivergentMarker) and other.formal == self.formal

    __hash__ = None


@dataclass(frozen=True)
class ResistiveLadder:
    partial_sums: np.ndarray
    closed_form_limit: object

    @property
    def converges(self) -> bool:
        return not isinstance(self.closed_form_limit, DivergentMarker)


def resistive_closed_form(R: float, p: float, k: int, z1: Optional[float] = None) -> float:
    """``Z_k`` from ``Z_{k+1} = R/(1-p) + p^k (Z_1 - R/(1-p))`` for ``p != 1``."""
    z1 = R if z1 is None else z1
    if p == 1:
        return z1 + (k - 1) * R
    fix = R / (1.0 - p)
    return fix + p ** (k - 1) * (z1 - fix)


def resistive_ladder(R: float, p: float, n: int, Z1_override: Optional[float] = None) -> ResistiveLadder:
    """Partial impedances of a ladder whose resistances grow by factor ``p``.

    ``Z_{k+1} = R + p Z_k`` with ``Z_1 = R`` unless overridden. The limit
    ``R / (1 - p)`` is reported only for ``|p| < 1``; otherwise a
    :class:`DivergentMarker` carries it as a formal value.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    z = float(R if Z1_override is None else Z1_override)
    sums = np.empty(n)
    sums[0] = z
    for k in range(1, n):
        z = R + p * z
        sums[k] = z
    if abs(p) < 1:
        limit = complex(R / (1.0 - p))
    else:
        limit = DivergentMarker(None if p == 1 else complex(R / (1.0 - p)))
    return ResistiveLadder(sums, limit)
