"""Adaptive Dormand-Prince 5(4) integration of the reduced equation of motion.

Samples are produced from the method's quartic dense output on a uniform grid,
so the stored spacing does not depend on step-size control. The stepping
kernel is compiled with numba; the pure-Python wrapper validates inputs and
packs the result into a :class:`Trajectory`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .model import DrivePoint, SymmetricCase, analytic_symmetric

MIN_STEP = 1e-14
_PI = math.pi


class IntegrationError(RuntimeError):
    """Raised when step-size control collapses below ``MIN_STEP``."""


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-11
    max_step: float = 0.1
    sample_interval: float = 2.0 * math.pi / 256

    def __post_init__(self) -> None:
        if not 0 < self.rel_tol < 1e-3:
            raise ValueError(f"rel_tol must be in (0, 1e-3), got {self.rel_tol}")
        if not 0 < self.abs_tol < self.rel_tol:
            raise ValueError(f"abs_tol must be in (0, rel_tol), got {self.abs_tol}")
        if not self.max_step > 0:
            raise ValueError(f"max_step must be positive, got {self.max_step}")
        if not self.sample_interval > 0:
            raise ValueError(f"sample_interval must be positive, got {self.sample_interval}")

    def time_rescaled(self, factor: float) -> "IntegratorConfig":
        """Same tolerances with every time-like setting multiplied by ``factor``."""
        return IntegratorConfig(self.rel_tol, self.abs_tol, self.max_step * factor,
                                self.sample_interval * factor)

    def with_tolerance(self, rel_tol: float, abs_tol: float | None = None) -> "IntegratorConfig":
        if abs_tol is None:
            abs_tol = rel_tol * (self.abs_tol / self.rel_tol)
        return IntegratorConfig(rel_tol, abs_tol, self.max_step, self.sample_interval)


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled solution ``u(s)``; ``u`` is never reduced mod 2*pi."""

    s: np.ndarray
    u: np.ndarray
    point: DrivePoint
    config: IntegratorConfig = field(default_factory=IntegratorConfig)
    u0: float = 0.0

    @property
    def horizon(self) -> float:
        return float(self.s[-1])

    def __len__(self) -> int:
        return len(self.s)


# Dormand-Prince 5(4) tableau and Shampine's dense-output polynomial.
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
_A = np.array([
    [0.0, 0.0, 0.0, 0.0, 0.0],
    [1 / 5, 0.0, 0.0, 0.0, 0.0],
    [3 / 40, 9 / 40, 0.0, 0.0, 0.0],
    [44 / 45, -56 / 15, 32 / 9, 0.0, 0.0],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0.0],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
])
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
_E = np.array([-71 / 57600, 0.0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40])
_P = np.array([
    [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])


@numba.njit(cache=True)
def _f(s, u, phi1, phi2, nu):
    return -phi1 * math.sin(u - s) - phi2 * math.sin(u + nu * s)


@numba.njit(cache=True)
def _dopri5(phi1, phi2, nu, u0, times, rtol, atol, max_step, C, A, B, E, P):
    n_samples = times.shape[0]
    horizon = times[n_samples - 1]
    out = np.empty(n_samples)
    out[0] = u0
    K = np.empty(7)
    Q = np.empty(4)

    s = 0.0
    u = u0
    f0 = _f(s, u, phi1, phi2, nu)
    K[0] = f0
    # initial step from the usual derivative-scale heuristic; the fallbacks
    # are tied to max_step so that rescaling time rescales every step
    scale = atol + rtol * min(abs(u), _PI)
    d0 = abs(u) / scale
    d1 = abs(f0) / scale
    h_floor = 1e-5 * max_step
    if d0 < 1e-5 or d1 < 1e-5:
        h = h_floor
    else:
        h = 0.01 * d0 / d1
    h = min(h, max_step, horizon)
    if h < h_floor:
        h = h_floor

    next_sample = 1
    fac_max = 10.0
    while next_sample < n_samples:
        if h < 1e-14:
            return out, next_sample
        s_end = s + h
        if s_end > horizon:
            h = horizon - s
            s_end = horizon
        for i in range(1, 6):
            du = 0.0
            for j in range(i):
                du += A[i, j] * K[j]
            K[i] = _f(s + C[i] * h, u + h * du, phi1, phi2, nu)
        du = 0.0
        for j in range(6):
            du += B[j] * K[j]
        u_new = u + h * du
        K[6] = _f(s_end, u_new, phi1, phi2, nu)
        err = 0.0
        for j in range(7):
            err += E[j] * K[j]
        # the equation is 2*pi-periodic in u, so the relative part of the
        # error scale is capped at |u| = pi instead of growing with rotation
        err = abs(h * err) / (atol + rtol * min(max(abs(u), abs(u_new)), _PI))

        if err <= 1.0:
            for k in range(4):
                acc = 0.0
                for j in range(7):
                    acc += K[j] * P[j, k]
                Q[k] = acc
            while next_sample < n_samples and (times[next_sample] <= s_end
                                               or s_end >= horizon):
                x = (times[next_sample] - s) / h
                poly = 0.0
                xp = 1.0
                for k in range(4):
                    xp *= x
                    poly += Q[k] * xp
                out[next_sample] = u + h * poly
                next_sample += 1
            s = s_end
            u = u_new
            K[0] = K[6]
            if err == 0.0:
                factor = fac_max
            else:
                factor = min(fac_max, 0.9 * err ** -0.2)
            fac_max = 10.0
            h = min(h * max(factor, 0.2), max_step)
        else:
            h = h * max(0.2, 0.9 * err ** -0.2)
            fac_max = 1.0
    return out, next_sample


def sample_times(horizon: float, sample_interval: float) -> np.ndarray:
    """Uniform grid ``k * sample_interval`` covering [0, horizon].

    When the horizon is not a whole number of intervals the final sample sits
    at the horizon itself (one partial step).
    """
    n_full = int(math.floor(horizon / sample_interval * (1 + 1e-12)))
    s = np.arange(n_full + 1) * sample_interval
    if s[-1] > horizon:
        s[-1] = horizon
    elif horizon - s[-1] > 1e-9 * sample_interval:
        s = np.append(s, horizon)
    return s


def integrate(point: DrivePoint, u0: float, horizon: float,
              config: IntegratorConfig | None = None) -> Trajectory:
    """Integrate from ``u(0) = u0`` to ``s = horizon``."""
    config = config or IntegratorConfig()
    if not (math.isfinite(horizon) and horizon > 0):
        raise ValueError(f"horizon must be positive, got {horizon}")
    if not math.isfinite(u0):
        raise ValueError(f"u0 must be finite, got {u0}")
    s = sample_times(horizon, config.sample_interval)
    u, filled = _dopri5(float(point.phi1), float(point.phi2), float(point.nu), float(u0),
                        s, config.rel_tol, config.abs_tol, config.max_step,
                        _C, _A, _B, _E, _P)
    if filled < len(s):
        raise IntegrationError(
            f"step size fell below {MIN_STEP:g} at s={s[filled - 1]:.6g} "
            f"for phi1={point.phi1}, phi2={point.phi2}, nu={point.nu}")
    return Trajectory(s, u, point, config, float(u0))


def integrate_symmetric_oracle(case: SymmetricCase, horizon: float, n_samples: int) -> Trajectory:
    """Sample the closed-form symmetric solution on ``n_samples`` uniform points."""
    if n_samples < 2:
        raise ValueError("n_samples must be at least 2")
    if not (math.isfinite(horizon) and horizon > 0):
        raise ValueError(f"horizon must be positive, got {horizon}")
    s = np.linspace(0.0, horizon, n_samples)
    u = np.asarray(analytic_symmetric(case, s), dtype=float)
    cfg = IntegratorConfig(sample_interval=horizon / (n_samples - 1))
    return Trajectory(s, u, case.drive_point, cfg, case.u0)
