"""Low-pass (and high-pass) LC ladders with small series and shunt losses.

Series element ``Z1 = r + i w L``, shunt element ``Z2 = r' + 1/(i w C)``.
Then ``1 + 4t = 1 - wc^2 / w^2`` in the lossless case, with cutoff
``wc = 2 / sqrt(L C)``. Below cutoff the lossless ``t`` sits on the branch
cut, and the physical impedance is the limit of the lossy one as
``r, r' -> 0``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import CutError, FitError
from .ladder import LadderParams, fixed_points

AT_CUTOFF_RTOL = 1e-12


class Regime(str, enum.Enum):
    BELOW_CUTOFF = "below_cutoff"
    ABOVE_CUTOFF = "above_cutoff"
    AT_CUTOFF = "at_cutoff"


@dataclass(frozen=True)
class LowPassConfig:
    L: float
    C: float
    omega: float
    r: float = 0.0
    r_prime: float = 0.0

    def __post_init__(self):
        for name in ("L", "C", "omega"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive and finite, got {v!r}")
        for name in ("r", "r_prime"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be non-negative and finite, got {v!r}")

    @property
    def omega_c(self) -> float:
        return cutoff_frequency(self.L, self.C)

    @property
    def lossless(self) -> bool:
        return self.r == 0 and self.r_prime == 0

    def with_losses(self, r, r_prime=None):
        return LowPassConfig(self.L, self.C, self.omega, r, r if r_prime is None else r_prime)

    def with_omega(self, omega):
        return LowPassConfig(self.L, self.C, omega, self.r, self.r_prime)


def cutoff_frequency(L: float, C: float) -> float:
    if L <= 0 or C <= 0:
        raise ValueError("L and C must be positive")
    return 2.0 / math.sqrt(L * C)


def make_impedances(cfg: LowPassConfig) -> LadderParams:
    z1 = complex(cfg.r, cfg.omega * cfg.L)
    z2 = complex(cfg.r_prime, -1.0 / (cfg.omega * cfg.C))
    return LadderParams(z1, z2)


def regime_of(cfg: LowPassConfig) -> Regime:
    wc = cfg.omega_c
    if abs(cfg.omega - wc) <= AT_CUTOFF_RTOL * wc:
        return Regime.AT_CUTOFF
    return Regime.BELOW_CUTOFF if cfg.omega < wc else Regime.ABOVE_CUTOFF


def a_parameter(cfg: LowPassConfig) -> float:
    """``A = |1 - wc^2 / w^2|``; zero at cutoff."""
    if regime_of(cfg) is Regime.AT_CUTOFF:
        return 0.0
    return abs(1.0 - (cfg.omega_c / cfg.omega) ** 2)


def limiting_impedance(cfg: LowPassConfig) -> complex:
    """Lossless limit of the infinite-ladder impedance.

    Below cutoff ``(w L / 2)(sqrt(A) + i)``; above it ``(i w L / 2)(1 + sqrt(A))``;
    both give ``i w L / 2`` at ``A = 0``.
    """
    half = 0.5 * cfg.omega * cfg.L
    sa = math.sqrt(a_parameter(cfg))
    if regime_of(cfg) is Regime.BELOW_CUTOFF:
        return complex(half * sa, half)
    return complex(0.0, half * (1.0 + sa))


def infinite_impedance(params: LadderParams) -> complex:
    """``z_+ = Z1 p_+``, the attracting fixed point of the unnormalised recursion."""
    return params.z1 * fixed_points(params.t).p_plus


@dataclass(frozen=True)
class RegimeReport:
    regime: Regime
    A: float
    epsilon_scale: float
    z_plus: complex
    z_plus_limit: complex
    omega: float
    omega_c: float

    def to_json(self):
        return {
            "regime": self.regime.value,
            "A": self.A,
            "omega": self.omega,
            "omega_c": self.omega_c,
            "z_plus": [self.z_plus.real, self.z_plus.imag],
            "z_plus_limit": [self.z_plus_limit.real, self.z_plus_limit.imag],
        }


def regime_analysis(cfg: LowPassConfig) -> RegimeReport:
    regime = regime_of(cfg)
    params = make_impedances(cfg)
    limit = limiting_impedance(cfg)
    eps = abs((1.0 + 4.0 * params.t).imag)
    if cfg.lossless and regime is Regime.AT_CUTOFF:
        z_plus = limit
    else:
        try:
            z_plus = infinite_impedance(params)
        except CutError as exc:
            raise CutError(
                f"lossless ladder below cutoff (omega = {cfg.omega!r} < omega_c = {cfg.omega_c!r}) "
                "is on the branch cut; use r, r' > 0 (regularised path) or the closed-form limit"
            ) from exc
    return RegimeReport(regime, a_parameter(cfg), eps, z_plus, limit, cfg.omega, cfg.omega_c)


@dataclass(frozen=True)
class Extrapolation:
    limit: complex
    order: float
    losses: np.ndarray
    values: np.ndarray

    def __iter__(self):
        return iter((self.limit, self.order))


def limit_extrapolation(cfg: LowPassConfig, losses) -> Extrapolation:
    """Estimate ``lim z_+`` as ``r = r' = s -> 0`` from a decreasing loss sequence.

    The order comes from a least-squares fit of ``log |z(s_k) - z(s_{k+1})|``
    against ``log s_k``; one Richardson step on the two smallest losses then
    removes the leading error term.
    """
    s = np.asarray(losses, dtype=float)
    if s.ndim != 1 or s.size < 3:
        raise ValueError("need at least three loss values")
    if np.any(s <= 0) or np.any(np.diff(s) >= 0):
        raise ValueError("losses must be positive and strictly decreasing")
    z = np.array([infinite_impedance(make_impedances(cfg.with_losses(v))) for v in s])
    diffs = np.abs(np.diff(z))
    if np.any(diffs == 0) or np.any(np.diff(diffs) >= 0):
        raise FitError("residuals are not monotone in the loss; omega may be too close to omega_c")
    order = float(np.polyfit(np.log(s[:-1]), np.log(diffs), 1)[0])
    ratio = (s[-1] / s[-2]) ** order
    limit = z[-1] + (z[-1] - z[-2]) * ratio / (1.0 - ratio)
    return Extrapolation(complex(limit), order, s, z)


def highpass_cutoff(L: float, C: float) -> float:
    """Frequency where ``1 + 4t = 1 - 4 w^2 L C`` changes sign."""
    if L <= 0 or C <= 0:
        raise ValueError("L and C must be positive")
    return 1.0 / (2.0 * math.sqrt(L * C))


def highpass_params(L: float, C: float, r: float, r_prime: float, omega: float) -> LadderParams:
    """Ladder with the inductor and capacitor swapped.

    ``Z1 = r + 1/(i w C)``, ``Z2 = r' + i w L``, so lossless ``t = -w^2 L C``;
    the propagating band is ``w > 1 / (2 sqrt(L C))``.
    """
    LowPassConfig(L, C, omega, r, r_prime)
    return LadderParams(complex(r, -1.0 / (omega * C)), complex(r_prime, omega * L))
