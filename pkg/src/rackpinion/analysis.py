"""Observables extracted from trajectories: mean velocity, slips, phases, clock."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .integrator import IntegratorConfig, Trajectory, integrate
from .model import DrivePoint

MIN_WINDOW = 200.0 * math.pi


class PhaseKind(str, enum.Enum):
    I1 = "I1"
    II1 = "II1"
    II0 = "II0"
    II2 = "II2"
    I2 = "I2"

    def mirrored(self) -> "PhaseKind":
        return _MIRROR[self]


_MIRROR = {
    PhaseKind.I1: PhaseKind.I2,
    PhaseKind.II1: PhaseKind.II2,
    PhaseKind.II0: PhaseKind.II0,
    PhaseKind.II2: PhaseKind.II1,
    PhaseKind.I2: PhaseKind.I1,
}

# order along increasing mean velocity, from co-moving with rack-2 to rack-1
PHASE_ORDER = (PhaseKind.I2, PhaseKind.II2, PhaseKind.II0, PhaseKind.II1, PhaseKind.I1)


@dataclass(frozen=True)
class Tolerances:
    """Measurement protocol used by :func:`classify`."""

    eps_lock: float = 1e-3
    eps_zero: float = 1e-3
    eps_conv: float = 5e-3
    discard_fraction: float = 0.2
    horizon: float = 4000.0 * math.pi
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)

    def __post_init__(self) -> None:
        if not 0 <= self.discard_fraction < 1:
            raise ValueError(f"discard_fraction must be in [0, 1), got {self.discard_fraction}")
        for name in ("eps_lock", "eps_zero", "eps_conv"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.horizon * (1 - self.discard_fraction) < MIN_WINDOW * (1 - 1e-12):
            raise ValueError(
                f"steady window {self.horizon * (1 - self.discard_fraction):.6g} is shorter "
                f"than 200*pi")


class NotOscillatoryError(ValueError):
    """The trajectory has no bounded oscillation to measure."""


@dataclass(frozen=True)
class PhaseLabel:
    kind: PhaseKind
    mean_velocity: float
    slip_rate_1: float
    slip_rate_2: float
    converged: bool = True
    point: DrivePoint | None = None

    def as_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "mean_velocity": self.mean_velocity,
            "slip_rate_1": self.slip_rate_1,
            "slip_rate_2": self.slip_rate_2,
            "converged": self.converged,
        }


@dataclass(frozen=True)
class ClockMetrics:
    """Waveform measures of a bounded oscillation.

    ``peak_amplitude`` is max |u|; ``amplification`` is that peak over |u0|.
    ``squareness`` is the fraction of time spent within 10 % of either rail,
    i.e. with |u - midline| > 0.9 of the half swing. ``tangent_gain`` is the
    peak of |tan(u/2)| over |tan(u0/2)|, the multiplicative factor the
    symmetric closed form applies before the arctan saturates.
    """

    frequency: float
    peak_amplitude: float
    squareness: float
    amplification: float
    tangent_gain: float
    midline: float
    half_swing: float

    @property
    def period(self) -> float:
        return 1.0 / self.frequency

    def frequency_hz(self, rack_velocity: float, wavelength: float) -> float:
        """Dimensional frequency, given V1 and the corrugation wavelength (SI)."""
        # one reduced time unit is lambda / (2*pi*V1) seconds
        return self.frequency * 2.0 * math.pi * rack_velocity / wavelength


def _window_start(traj: Trajectory, discard_fraction: float) -> int:
    if not 0 <= discard_fraction < 1:
        raise ValueError(f"discard_fraction must be in [0, 1), got {discard_fraction}")
    return int(math.floor(discard_fraction * (len(traj) - 1)))


def mean_velocity(traj: Trajectory, discard_fraction: float = 0.2,
                  eps_conv: float = 5e-3) -> tuple[float, bool]:
    """Long-window slope of u(s) and a split-half convergence flag."""
    i0 = _window_start(traj, discard_fraction)
    s, u = traj.s, traj.u
    if s[-1] - s[i0] < MIN_WINDOW * (1 - 1e-12):
        raise ValueError(
            f"retained window {s[-1] - s[i0]:.6g} is shorter than 200*pi; "
            f"integrate longer")
    i_mid = (i0 + len(s) - 1) // 2
    value = (u[-1] - u[i0]) / (s[-1] - s[i0])
    first = (u[i_mid] - u[i0]) / (s[i_mid] - s[i0])
    second = (u[-1] - u[i_mid]) / (s[-1] - s[i_mid])
    return float(value), bool(abs(first - second) < eps_conv)


def relative_coordinate(traj: Trajectory, rack: int) -> np.ndarray:
    """Pinion coordinate measured in the frame co-moving with ``rack``."""
    if rack == 1:
        return traj.u - traj.s
    if rack == 2:
        return traj.u + traj.point.nu * traj.s
    raise ValueError(f"rack must be 1 or 2, got {rack}")


def count_phase_slips(traj: Trajectory, rack: int, discard_fraction: float = 0.2) -> int:
    """Number of cog tips the pinion crosses relative to ``rack``.

    The rack potential peaks where the relative coordinate is an odd multiple
    of pi, so the retained window is counted as the number of distinct tips
    between its lowest and highest relative position. It is zero exactly
    when the pinion stays in one cog valley ((2k-1)*pi, (2k+1)*pi).
    """
    i0 = _window_start(traj, discard_fraction)
    w = relative_coordinate(traj, rack)[i0:]

    def valley(x: float) -> int:
        return math.floor((x + math.pi) / (2.0 * math.pi))

    return valley(float(w.max())) - valley(float(w.min()))


def label_trajectory(traj: Trajectory, tol: Tolerances | None = None) -> PhaseLabel:
    tol = tol or Tolerances()
    nu = traj.point.nu
    v, converged = mean_velocity(traj, tol.discard_fraction, tol.eps_conv)
    slips1 = count_phase_slips(traj, 1, tol.discard_fraction)
    slips2 = count_phase_slips(traj, 2, tol.discard_fraction)
    i0 = _window_start(traj, tol.discard_fraction)
    window = traj.s[-1] - traj.s[i0]

    if abs(v - 1.0) < tol.eps_lock and slips1 == 0:
        kind = PhaseKind.I1
    elif abs(v + nu) < tol.eps_lock and slips2 == 0:
        kind = PhaseKind.I2
    elif abs(v) < tol.eps_zero:
        kind = PhaseKind.II0
    elif v > 0:
        kind = PhaseKind.II1
    else:
        kind = PhaseKind.II2
    return PhaseLabel(kind, v, float(slips1 / window), float(slips2 / window), converged,
                      traj.point)


def classify(point: DrivePoint, u0: float = 0.0, tol: Tolerances | None = None) -> PhaseLabel:
    """Integrate to the steady window and assign one of the five phases."""
    tol = tol or Tolerances()
    traj = integrate(point, u0, tol.horizon, tol.integrator)
    return label_trajectory(traj, tol)


def _crossings(s: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Interpolated times where y goes from negative to non-negative."""
    idx = np.nonzero((y[:-1] < 0) & (y[1:] >= 0))[0]
    frac = -y[idx] / (y[idx + 1] - y[idx])
    return s[idx] + frac * (s[idx + 1] - s[idx])


def clock_metrics(traj: Trajectory, u0: float | None = None, discard_fraction: float = 0.0,
                  eps_zero: float = 1e-3) -> ClockMetrics:
    """Frequency and shape of a bounded oscillation.

    Sign-confined signals (the symmetric device never changes sign) are
    timed on crossings of the midline (max + min) / 2, others on crossings
    of their mean. Raises :class:`NotOscillatoryError` for flat or drifting
    trajectories.
    """
    if u0 is None:
        u0 = traj.u0
    i0 = _window_start(traj, discard_fraction)
    s, u = traj.s[i0:], traj.u[i0:]
    hi, lo = float(u.max()), float(u.min())
    half_swing = 0.5 * (hi - lo)
    if half_swing <= 1e-12 * max(1.0, abs(hi)):
        raise NotOscillatoryError("trajectory is flat")

    sign_confined = lo >= 0 or hi <= 0
    center = 0.5 * (hi + lo) if sign_confined else float(u.mean())
    ups = _crossings(s, u - center)
    if len(ups) < 2:
        raise NotOscillatoryError("fewer than two full oscillation cycles in window")
    if len(ups) >= 3:
        # net drift between the first and last full cycle
        first = (s >= ups[0]) & (s < ups[1])
        last = (s >= ups[-2]) & (s < ups[-1])
        drift = (u[last].mean() - u[first].mean()) / (ups[-2] - ups[0])
    else:
        drift = (u[-1] - u[0]) / (s[-1] - s[0])
    if abs(drift) >= eps_zero:
        raise NotOscillatoryError(f"trajectory drifts with mean velocity ~{drift:.3g}")

    frequency = (len(ups) - 1) / (ups[-1] - ups[0])
    peak = float(np.abs(u).max())
    window = (s >= ups[0]) & (s < ups[-1])
    midline = 0.5 * (hi + lo)
    squareness = float(np.mean(np.abs(u[window] - midline) > 0.9 * half_swing))
    if u0 == 0:
        amplification = math.inf
        gain = math.inf
    else:
        amplification = peak / abs(u0)
        gain = float(np.abs(np.tan(u / 2.0)).max()) / abs(math.tan(u0 / 2.0))
    return ClockMetrics(float(frequency), peak, squareness, amplification, gain,
                        midline, half_swing)
