"""Per-section transfer, phase delay and wave-packet transport.

The voltage on section ``n`` of the infinite ladder is ``(-gamma)^n`` times
the source voltage at each frequency. Writing ``-gamma = exp(i delta)``, a
slowly modulated carrier ``f(t) exp(i w0 t)`` arrives at section ``n`` as

    V_n(t) = exp(i w0 t) / (2 pi) * int dnu exp(i nu t + i n delta(w0 + nu)) F(nu)

with ``F`` the Fourier transform of ``f``. The envelope travels one section
in ``T_g = -d delta / d w``; in the lossless passband ``T_g = 2 / sqrt(wc^2 - w^2)``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .errors import BandwidthError, UnwrapError
from .ladder import LadderParams, fixed_points
from .lowpass import LowPassConfig, Regime, a_parameter, make_impedances, regime_of

TWO_PI = 2.0 * math.pi


def transfer_ratio(params: LadderParams) -> complex:
    """Per-section voltage ratio ``-gamma = -p_- / p_+``."""
    fp = fixed_points(params.t)
    return -fp.gamma


def minus_gamma(cfg: LowPassConfig) -> complex:
    """``-gamma`` for a low-pass config.

    Lossless passband configs use the limit branch
    ``sqrt(1 + 4t) -> -i sqrt(A)`` approached from ``Re > 0``, which gives
    ``-gamma = exp(i (pi + 2 arctan sqrt(A)))`` without cancellation.
    """
    if cfg.lossless:
        regime = regime_of(cfg)
        if regime is Regime.AT_CUTOFF:
            return complex(-1.0, 0.0)
        if regime is Regime.BELOW_CUTOFF:
            sa = math.sqrt(a_parameter(cfg))
            w = complex(0.0, -sa)
            return -(1.0 - w) / (1.0 + w)
    return transfer_ratio(make_impedances(cfg))


@dataclass(frozen=True)
class TransferAnalysis:
    omega: float
    minus_gamma: complex
    delta: float
    group_delay: float
    attenuation: float


def _anchored_phase(values: np.ndarray) -> np.ndarray:
    """Unwrap ``arg`` of ``values`` (ordered by increasing frequency) from the top down.

    The highest-frequency node is placed in ``(0, 2 pi]`` so that the branch
    continues to ``delta(wc) = pi``.
    """
    raw = np.angle(values)
    top = raw[-1] % TWO_PI
    if top == 0.0:
        top = TWO_PI
    rev = np.unwrap(raw[::-1])
    rev += top - rev[0]
    return rev[::-1]


def _minus_gamma_grid(L, C, r, r_prime, omegas) -> np.ndarray:
    return np.array([minus_gamma(LowPassConfig(L, C, float(w), r, r_prime)) for w in omegas])


def phase_curve(L: float, C: float, r: float, r_prime: float, omega_grid: Sequence[float]) -> list[TransferAnalysis]:
    """Unwrapped transfer phase and group delay on a passband grid.

    Every interval is also checked at its midpoint: if the two half-steps do
    not add up to the full step the grid aliases the phase and
    :class:`UnwrapError` is raised.
    """
    w = np.asarray(omega_grid, dtype=float)
    if w.ndim != 1 or w.size < 2:
        raise ValueError("omega_grid needs at least two points")
    if np.any(np.diff(w) <= 0):
        raise ValueError("omega_grid must be strictly increasing")
    wc = 2.0 / math.sqrt(L * C)
    if w[0] <= 0 or w[-1] >= wc:
        raise ValueError(f"omega_grid must lie inside the passband (0, {wc!r})")
    mg = _minus_gamma_grid(L, C, r, r_prime, w)
    mid = _minus_gamma_grid(L, C, r, r_prime, 0.5 * (w[:-1] + w[1:]))
    full = np.angle(mg[1:] / mg[:-1])
    halves = np.angle(mid / mg[:-1]) + np.angle(mg[1:] / mid)
    bad = np.abs(full - halves) > 1e-6
    if bad.any():
        k = int(np.argmax(bad))
        raise UnwrapError(f"phase jumps by pi or more between omega = {w[k]!r} and {w[k + 1]!r}")
    delta = _anchored_phase(mg)
    tg = -np.gradient(delta, w)
    return [
        TransferAnalysis(float(wi), complex(m), float(d), float(g), float(abs(m)))
        for wi, m, d, g in zip(w, mg, delta, tg)
    ]


@dataclass(frozen=True)
class GroupVelocity:
    sections_per_second: float
    seconds_per_section: float

    def __iter__(self):
        return iter((self.sections_per_second, self.seconds_per_section))


def group_velocity(filt: LowPassConfig, omega0: float, rel_step: float = 1e-6) -> GroupVelocity:
    """Envelope speed in sections per second at carrier ``omega0``.

    ``seconds_per_section = |d delta / d w|`` from a central difference with
    step ``rel_step * omega0``.
    """
    wc = filt.omega_c
    if not 0 < omega0 < wc:
        raise ValueError(f"omega0 must lie in (0, {wc!r})")
    h = rel_step * omega0
    hi = min(omega0 + h, 0.5 * (omega0 + wc))
    lo = omega0 - h
    mg = np.array([minus_gamma(filt.with_omega(x)) for x in (lo, omega0, hi)])
    steps = np.angle(mg[1:] / mg[:-1])
    if np.any(np.abs(steps) >= math.pi / 2):
        raise UnwrapError("phase changes too fast for the difference step")
    slope = (steps[0] + steps[1]) / (hi - lo)
    tg = abs(slope)
    if not (math.isfinite(tg) and tg > 0):
        raise UnwrapError(f"group delay is not finite and positive at omega0 = {omega0!r}")
    return GroupVelocity(1.0 / tg, tg)


def gaussian_envelope(t, t_center: float, sigma: float):
    return np.exp(-((np.asarray(t, dtype=float) - t_center) ** 2) / (2.0 * sigma * sigma))


def gaussian_bandwidth(sigma: float, threshold: float = 1e-8) -> float:
    """Half-width where a Gaussian envelope's spectrum falls to ``threshold`` of its peak."""
    return math.sqrt(2.0 * math.log(1.0 / threshold)) / sigma


@dataclass(frozen=True)
class PacketSimConfig:
    """Carrier, sampled envelope and quadrature settings for a packet run.

    ``times`` must be uniform and the envelope must decay below ``1e-8`` of
    its peak at both ends of the window.
    """

    omega0: float
    times: np.ndarray
    envelope: np.ndarray
    nu0: float
    sections: tuple
    frequency_grid: int = 512
    spectrum_tol: float = 1e-6

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        f = np.asarray(self.envelope, dtype=float)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "envelope", f)
        object.__setattr__(self, "sections", tuple(int(n) for n in self.sections))
        if t.ndim != 1 or t.size < 3 or t.shape != f.shape:
            raise ValueError("times and envelope must be 1-d arrays of equal length >= 3")
        dt = np.diff(t)
        if np.any(dt <= 0) or np.ptp(dt) > 1e-9 * dt[0]:
            raise ValueError("times must be a uniform increasing grid")
        peak = np.max(np.abs(f))
        if peak == 0:
            raise ValueError("envelope is identically zero")
        if max(abs(f[0]), abs(f[-1])) >= 1e-8 * peak:
            raise ValueError("envelope must decay below 1e-8 of its peak at the window edges")
        if not (self.omega0 > 0 and self.nu0 > 0):
            raise ValueError("omega0 and nu0 must be positive")
        if self.frequency_grid < 3:
            raise ValueError("frequency_grid must be >= 3")
        if not self.sections or min(self.sections) < 0:
            raise ValueError("sections must be a nonempty list of non-negative integers")

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    def nu_grid(self) -> np.ndarray:
        return np.linspace(-self.nu0, self.nu0, self.frequency_grid)

    def spectrum(self, nu) -> np.ndarray:
        """``F(nu) = sum_j f(t_j) exp(-i nu t_j) dt``."""
        nu = np.atleast_1d(np.asarray(nu, dtype=float))
        return kernels.exp_sum(nu, self.times, self.envelope.astype(np.complex128), -1.0) * self.dt


@dataclass(frozen=True)
class SectionTrace:
    section: int
    times: np.ndarray
    voltage: np.ndarray
    envelope: np.ndarray = field(init=False)
    peak_time: float = field(init=False)

    def __post_init__(self):
        env = np.abs(self.voltage)
        object.__setattr__(self, "envelope", env)
        object.__setattr__(self, "peak_time", peak_time(self.times, env))


def peak_time(times: np.ndarray, values: np.ndarray) -> float:
    """Location of the maximum via a parabola through the three top samples."""
    k = int(np.argmax(values))
    if k == 0 or k == len(values) - 1:
        return float(times[k])
    y0, y1, y2 = values[k - 1], values[k], values[k + 1]
    den = y0 - 2.0 * y1 + y2
    if den == 0:
        return float(times[k])
    shift = 0.5 * (y0 - y2) / den
    return float(times[k] + shift * (times[k + 1] - times[k]))


def spectral_leakage(cfg: PacketSimConfig, filt: LowPassConfig) -> float:
    """Spectrum magnitude at the nearest passband edge, relative to its peak."""
    wc = filt.omega_c
    edges = [wc - cfg.omega0]
    if cfg.omega0 < wc:
        edges.append(-cfg.omega0)
    peak = abs(cfg.spectrum([0.0])[0])
    return float(np.max(np.abs(cfg.spectrum(edges))) / peak)


def _check_band(cfg: PacketSimConfig, filt: LowPassConfig):
    wc = filt.omega_c
    if cfg.omega0 + cfg.nu0 >= wc or cfg.omega0 - cfg.nu0 <= 0:
        leak = spectral_leakage(cfg, filt)
        raise BandwidthError(
            f"packet band [{cfg.omega0 - cfg.nu0:.6g}, {cfg.omega0 + cfg.nu0:.6g}] leaves the passband "
            f"(0, {wc:.6g}); spectral leakage at the passband edge is {leak:.3e} of peak",
            leakage=leak,
        )
    nu = cfg.nu0 * np.array([-1.0, 1.0, -1.5, 1.5, -2.0, 2.0])
    spec = np.abs(cfg.spectrum(np.concatenate(([0.0], nu))))
    leak = float(spec[1:].max() / spec[0])
    if leak >= cfg.spectrum_tol:
        raise BandwidthError(
            f"envelope spectrum at |nu| >= nu0 is {leak:.3e} of peak (limit {cfg.spectrum_tol:.0e}); widen nu0",
            leakage=leak,
        )


def propagate_packet(cfg: PacketSimConfig, filt: LowPassConfig, jobs: int = 1) -> list[SectionTrace]:
    """Voltage at each requested section by trapezoidal quadrature over ``|nu| <= nu0``.

    Sections are independent; ``jobs > 1`` computes them on a thread pool and
    returns bit-identical results in the requested order.
    """
    _check_band(cfg, filt)
    nu = cfg.nu_grid()
    h = nu[1] - nu[0]
    weights = np.full(nu.size, h)
    weights[0] = weights[-1] = 0.5 * h
    spec = cfg.spectrum(nu)
    mg = np.array([minus_gamma(filt.with_omega(cfg.omega0 + v)) for v in nu])
    log_mg = np.log(np.abs(mg)) + 1j * _anchored_phase(mg)
    base = weights * spec / TWO_PI
    carrier = np.exp(1j * cfg.omega0 * cfg.times)

    def one(n):
        coeffs = base * np.exp(n * log_mg)
        return SectionTrace(n, cfg.times, carrier * kernels.exp_sum(cfg.times, nu, coeffs, 1.0))

    if jobs > 1 and len(cfg.sections) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(one, cfg.sections))
    return [one(n) for n in cfg.sections]


def gaussian_packet_config(filt: LowPassConfig, omega0: float, sigma: float, sections,
                           t_center: Optional[float] = None, frequency_grid: Optional[int] = None,
                           samples_per_sigma: float = 16.0, threshold: float = 1e-8) -> PacketSimConfig:
    """Packet config for ``f(t) = exp(-(t - t_c)^2 / (2 sigma^2))``.

    The window starts at 0, centres the source at ``t_c = 8 sigma`` by
    default and runs long enough for the slowest requested section to clear.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    sections = tuple(int(n) for n in sections)
    if not sections:
        raise ValueError("sections must be nonempty")
    t_c = 8.0 * sigma if t_center is None else float(t_center)
    nu0 = gaussian_bandwidth(sigma, threshold)
    try:
        delay = group_velocity(filt, omega0).seconds_per_section
    except (ValueError, UnwrapError):
        delay = 2.0 / filt.omega_c
    span = t_c + 1.5 * max(sections) * delay + 8.0 * sigma
    dt = sigma / samples_per_sigma
    m = int(math.ceil(span / dt)) + 1
    times = np.arange(m) * dt
    if frequency_grid is None:
        # trapezoid in nu repeats in t with period 2 pi / h; keep it > 2 * span
        frequency_grid = max(256, int(math.ceil(2.0 * nu0 * 2.0 * span / TWO_PI)) + 1)
    return PacketSimConfig(
        omega0=omega0,
        times=times,
        envelope=gaussian_envelope(times, t_c, sigma),
        nu0=nu0,
        sections=sections,
        frequency_grid=frequency_grid,
    )
