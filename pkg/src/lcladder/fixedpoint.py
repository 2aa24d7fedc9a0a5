"""Iteration of analytic maps and empirical contraction checks.

Convergence of ``z_{n+1} = f(z_n)`` does not require ``f`` to be a
contraction: ``z**2 + 1/4`` converges to ``1/2`` from every seed in
``[0, 1/2]`` although ``f'(1/2) = 1``, and ``tan`` has fixed points where
``|f'| >= 1``. For the ladder map a small disc around the attractor is a
genuine contracting self-map, and every orbit not starting at the repeller
eventually enters it.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .errors import SearchFailure
from .ladder import LadderParams, fixed_points
from .lowpass import LowPassConfig, make_impedances

DIVERGENCE_BOUND = 1e150


@dataclass(frozen=True)
class LadderMap:
    """``f(z) = series + shunt z / (shunt + z)``; ``LadderMap(1, t)`` is the normalised map."""

    series: complex
    shunt: complex
    kind = kernels.LADDER

    @classmethod
    def normalized(cls, t):
        return cls(1.0, complex(t))

    @property
    def coeffs(self):
        return complex(self.series), complex(self.shunt)

    def __call__(self, z):
        return self.series + self.shunt * z / (self.shunt + z)

    def derivative(self, z):
        return (self.shunt / (self.shunt + z)) ** 2


@dataclass(frozen=True)
class QuadraticMap:
    """``f(z) = z**2 + c``."""

    c: complex = 0.25
    kind = kernels.QUADRATIC

    @property
    def coeffs(self):
        return complex(self.c), 0j

    def __call__(self, z):
        return z * z + self.c

    def derivative(self, z):
        return 2 * z


@dataclass(frozen=True)
class AffineMap:
    """``f(z) = slope z + offset``."""

    slope: complex
    offset: complex = 0j
    kind = kernels.AFFINE

    @property
    def coeffs(self):
        return complex(self.slope), complex(self.offset)

    def __call__(self, z):
        return self.slope * z + self.offset

    def derivative(self, z):
        return self.slope


@dataclass(frozen=True)
class TangentMap:
    """Principal-branch ``f(z) = tan z``."""

    kind = kernels.TANGENT

    @property
    def coeffs(self):
        return 0j, 0j

    def __call__(self, z):
        return cmath.tan(z)

    def derivative(self, z):
        return 1.0 / cmath.cos(z) ** 2


class DivergenceMarker:
    """Marks the index at which an orbit overflowed, became NaN, or hit a pole."""

    def __init__(self, index, reason):
        self.index = index
        self.reason = reason

    def __repr__(self):
        return f"DivergenceMarker(index={self.index}, reason={self.reason!r})"


@dataclass(frozen=True, eq=False)
class MapTrace:
    values: np.ndarray
    divergence: Optional[DivergenceMarker] = None

    def __len__(self):
        return len(self.values)

    @property
    def diverged(self):
        return self.divergence is not None


def iterate_map(fmap, z1, n: int, bound: float = DIVERGENCE_BOUND) -> MapTrace:
    """The images ``f(z1), f(f(z1)), ...`` up to ``n`` terms.

    Stops at the first pole, non-finite value or ``|z| > bound``; the marker
    index is the 1-based position that iterate would have had.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    a, b = fmap.coeffs
    values, status = kernels.map_orbit(fmap.kind, a, b, complex(z1), n + 1, bound)
    values = values[1:]
    marker = None
    if status == kernels.POLE:
        marker = DivergenceMarker(len(values) + 1, "pole")
    elif status == kernels.DIVERGED:
        marker = DivergenceMarker(len(values) + 1, "overflow")
    return MapTrace(np.asarray(values, dtype=np.complex128), marker)


@dataclass(frozen=True)
class DiscRegion:
    """Closed disc ``|z - center| <= radius``.

    With ``real_axis=True`` only its real diameter is used, which is how a
    real interval is represented.
    """

    center: complex
    radius: float
    real_axis: bool = False

    def __post_init__(self):
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise ValueError("radius must be positive")
        object.__setattr__(self, "center", complex(self.center))

    @classmethod
    def interval(cls, lo, hi):
        return cls(complex(0.5 * (lo + hi)), 0.5 * (hi - lo), real_axis=True)

    def contains(self, z, tol=1e-12):
        z = np.asarray(z)
        slack = tol * max(1.0, self.radius)
        inside = np.abs(z - self.center) <= self.radius + slack
        if self.real_axis:
            inside &= np.abs(np.imag(z)) <= slack
        return inside

    def sample(self, rng, size):
        if self.real_axis:
            return self.center + self.radius * rng.uniform(-1.0, 1.0, size)
        rho = self.radius * np.sqrt(rng.uniform(0.0, 1.0, size))
        theta = rng.uniform(0.0, 2 * math.pi, size)
        return self.center + rho * np.exp(1j * theta)

    def sample_boundary(self, rng, size):
        if self.real_axis:
            return self.center + self.radius * rng.choice([-1.0, 1.0], size)
        return self.center + self.radius * np.exp(1j * rng.uniform(0.0, 2 * math.pi, size))

    def clip(self, z):
        z = np.asarray(z, dtype=np.complex128)
        if self.real_axis:
            z = z.real + 0j
        d = z - self.center
        r = np.abs(d)
        scale = np.where(r > self.radius, self.radius / np.where(r == 0, 1.0, r), 1.0)
        return self.center + d * scale


@dataclass(frozen=True)
class ContractionReport:
    maps_into_itself: bool
    empirical_q: float
    sample_count: int
    worst_pair: tuple

    def to_json(self):
        a, b = self.worst_pair
        return {
            "maps_into_itself": self.maps_into_itself,
            "empirical_q": self.empirical_q,
            "sample_count": self.sample_count,
            "worst_pair": [[a.real, a.imag], [b.real, b.imag]],
        }


def _sample_pairs(region: DiscRegion, samples: int, seed: int):
    rng = np.random.default_rng(seed)
    n_far = samples // 2
    n_near = samples - n_far
    za = region.sample(rng, n_far)
    zb = region.sample(rng, n_far)
    # near-diagonal pairs, half of them anchored on the boundary, probe sup |f'|
    n_edge = n_near // 2
    base = np.concatenate([region.sample_boundary(rng, n_edge), region.sample(rng, n_near - n_edge)])
    h = 1e-4 * region.radius
    if region.real_axis:
        step = h * rng.choice([-1.0, 1.0], n_near)
    else:
        step = h * np.exp(1j * rng.uniform(0.0, 2 * math.pi, n_near))
    partner = region.clip(base + step)
    return np.concatenate([za, base]), np.concatenate([zb, partner])


def check_contraction(fmap, region: DiscRegion, samples: int = 4000, seed: int = 0) -> ContractionReport:
    """Sampled Lipschitz constant of ``fmap`` on ``region`` and a self-map check.

    The result is a lower bound for the true constant. Half of the pairs are
    independent uniform draws; the rest are close pairs, half of them based
    on the boundary, so the estimate approaches ``sup |f'|``.
    """
    if samples < 100:
        raise ValueError("samples must be >= 100")
    za, zb = _sample_pairs(region, samples, seed)
    a, b = fmap.coeffs
    q, idx = kernels.lipschitz_max(fmap.kind, a, b, za, zb)
    images = kernels.map_values(fmap.kind, a, b, np.concatenate([za, zb]))
    inside = bool(np.all(region.contains(images)))
    pair = (complex(za[idx]), complex(zb[idx])) if idx >= 0 else (complex(region.center),) * 2
    return ContractionReport(inside, float(q), int(za.size), pair)


@dataclass(frozen=True)
class QuadraticReport:
    limit: complex
    converged: bool
    final_index: int
    n_times_error: float
    fitted_c: float
    divergence: Optional[DivergenceMarker]

    def to_json(self):
        return {
            "limit": [self.limit.real, self.limit.imag],
            "converged": self.converged,
            "final_index": self.final_index,
            "n_times_error": self.n_times_error,
            "fitted_c": self.fitted_c,
            "diverged_at": None if self.divergence is None else self.divergence.index,
        }


def quadratic_counterexample(n: int = 10_000, z1: float = 0.0):
    """Orbit of ``z**2 + 1/4`` and its error law ``e_n = 1/2 - z_n ~ 1/n``.

    Returns ``(trace, report)``. ``fitted_c`` is the least-squares ``c`` in
    ``e_k = c / k`` over the second half of the orbit.
    """
    if n < 100:
        raise ValueError("n must be >= 100")
    trace = iterate_map(QuadraticMap(0.25), z1, n)
    z = trace.values
    k = np.arange(1, len(z) + 1)
    err = 0.5 - z.real
    last = len(z)
    converged = bool(not trace.diverged and abs(err[-1]) < 0.5 / math.sqrt(last))
    tail = slice(last // 2, last)
    inv = 1.0 / k[tail]
    fitted = float(np.dot(inv, err[tail]) / np.dot(inv, inv))
    report = QuadraticReport(
        limit=complex(z[-1]),
        converged=converged,
        final_index=last,
        n_times_error=float(last * err[-1]),
        fitted_c=fitted,
        divergence=trace.divergence,
    )
    return trace, report


def _bisect(g, lo, hi, tol):
    glo = g(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if gm == 0:
            return mid
        if (gm < 0) == (glo < 0):
            lo, glo = mid, gm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def tangent_fixed_points(k: int, tol: float = 1e-12):
    """First ``k`` non-negative solutions of ``tan z = z`` with ``|f'| = 1 + z**2``.

    The ``j``-th root is bracketed in ``(j pi, j pi + pi/2)`` where
    ``tan x - x`` runs from negative to ``+inf``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    out = [(0.0, 1.0)]
    for j in range(1, k):
        lo = j * math.pi
        hi = lo + 0.5 * math.pi
        zeta = _bisect(lambda x: math.tan(x) - x, lo, math.nextafter(hi, lo), tol)
        out.append((zeta, 1.0 + zeta * zeta))
    return out


@dataclass(frozen=True)
class BasinReport:
    epsilon: float
    q_on_disc: float
    steps_to_enter: int
    z_plus: complex
    gamma_abs_sq: float
    maps_into_itself: bool

    def to_json(self):
        return {
            "epsilon": self.epsilon,
            "q_on_disc": self.q_on_disc,
            "steps_to_enter": self.steps_to_enter,
            "z_plus": [self.z_plus.real, self.z_plus.imag],
            "gamma_abs_sq": self.gamma_abs_sq,
            "maps_into_itself": self.maps_into_itself,
        }


def basin_search(params: LadderParams, z1=None, samples: int = 2000, seed: int = 0,
                 max_steps: int = 100_000) -> BasinReport:
    """Find a disc around ``z_+`` that the ladder map contracts into itself.

    The radius starts at ``|z_+| / 10`` and is halved until the sampled
    self-map check passes with ``q <= (1 + |gamma|^2) / 2``. The orbit from
    ``z1`` (default ``Z1 + Z2``) is then run until it enters the disc.
    """
    fp = fixed_points(params.t)
    q_theory = fp.gamma_abs_sq
    if not q_theory < 1.0:
        raise SearchFailure("|gamma|^2 is not below 1; no contracting disc exists")
    z_plus = params.z1 * fp.p_plus
    fmap = LadderMap(params.z1, params.z2)
    target = 0.5 * (1.0 + q_theory)
    eps = abs(z_plus) / 10.0
    floor = 1e-12 * abs(z_plus)
    while True:
        if eps < floor:
            raise SearchFailure(f"no contracting disc down to radius {floor:.3e}; config is near-marginal")
        report = check_contraction(fmap, DiscRegion(z_plus, eps), samples, seed)
        if report.maps_into_itself and report.empirical_q <= target:
            break
        eps *= 0.5
    start = params.z1 + params.z2 if z1 is None else complex(z1)
    z = start
    steps = None
    for k in range(1, max_steps + 1):
        if abs(z - z_plus) <= eps:
            steps = k
            break
        z = fmap(z)
    if steps is None:
        raise SearchFailure(f"orbit did not enter the disc within {max_steps} steps")
    return BasinReport(eps, report.empirical_q, steps, z_plus, q_theory, report.maps_into_itself)


def basin_verification(filt: LowPassConfig, **kwargs) -> BasinReport:
    if filt.r <= 0 or filt.r_prime <= 0:
        raise ValueError("basin verification needs strictly positive losses r and r'")
    return basin_search(make_impedances(filt), **kwargs)
