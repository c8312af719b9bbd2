"""Reduced rack-pinion-rack model.

Reduced variables::

    u   = 2*pi*x / lambda          pinion coordinate (unwrapped, radians)
    s   = 2*pi*V1*t / lambda       time
    phi = F * R**2 / (zeta * V1)   grip of each rack
    nu  = V2 / V1                  rack velocity ratio

with which the overdamped equation of motion becomes

    du/ds = -phi1 * sin(u - s) - phi2 * sin(u + nu * s)

Positive u is the sense in which rack-1 drags the pinion, so locking to
rack-1 gives a mean velocity of +1 and locking to rack-2 gives -nu.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class DrivePoint:
    """Dimensionless operating point (phi1, phi2, nu)."""

    phi1: float
    phi2: float
    nu: float = 1.0

    def __post_init__(self) -> None:
        for name in ("phi1", "phi2", "nu"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.phi1 < 0 or self.phi2 < 0:
            raise ValueError(f"grips must be non-negative, got phi1={self.phi1}, phi2={self.phi2}")
        if self.nu <= 0:
            raise ValueError(f"velocity ratio nu must be positive, got {self.nu}")

    @property
    def max_speed(self) -> float:
        return self.phi1 + self.phi2

    @property
    def is_symmetric(self) -> bool:
        return self.nu == 1.0 and self.phi1 == self.phi2


@dataclass(frozen=True)
class PinionState:
    u: float
    s: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.u) and math.isfinite(self.s)):
            raise ValueError(f"state must be finite, got u={self.u}, s={self.s}")


@dataclass(frozen=True)
class SymmetricCase:
    """Fully symmetric device: phi1 = phi2 = grip/2 and nu = 1.

    ``grip`` is the exponent amplitude 2*R**2*F/(zeta*V_R) of the closed-form
    solution. ``u0`` must lie strictly inside (-pi, pi); u0 = +-pi is the
    unstable fixed point.
    """

    grip: float
    u0: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.grip) or self.grip < 0:
            raise ValueError(f"grip must be finite and non-negative, got {self.grip}")
        if not math.isfinite(self.u0) or abs(self.u0) >= math.pi:
            raise ValueError(f"u0 must satisfy |u0| < pi, got {self.u0}")

    @property
    def drive_point(self) -> DrivePoint:
        return DrivePoint(self.grip / 2.0, self.grip / 2.0, 1.0)


def rhs(state: PinionState, point: DrivePoint) -> float:
    """Reduced pinion velocity du/ds at ``state``."""
    return rhs_value(state.u, state.s, point.phi1, point.phi2, point.nu)


def rhs_value(u, s, phi1, phi2, nu):
    """Array-friendly form of :func:`rhs` (broadcasts over numpy inputs)."""
    return -phi1 * np.sin(u - s) - phi2 * np.sin(u + nu * s)


def analytic_symmetric(case: SymmetricCase, s):
    """Closed-form coordinate of the symmetric device at time(s) ``s``.

    ``u(s) = 2*arctan(tan(u0/2) * exp(-grip*sin(s)))``. The product is kept
    in log space, ``q = log|tan(u0/2)| - grip*sin(s)``, and the arctan is
    taken as ``atan(e^q)`` for q <= 0 or ``pi/2 - atan(e^-q)`` otherwise, so
    nothing overflows at large grip. The result stays in [-pi, pi] and never
    takes the opposite sign of u0.
    """
    s_arr = np.asarray(s, dtype=float)
    if case.u0 == 0.0:
        out = np.zeros_like(s_arr)
        return float(out) if out.ndim == 0 else out
    # tan(x) ~ x below 1e-8; taking log|u0| first avoids underflow of u0/2
    log_t0 = (math.log(abs(case.u0)) - math.log(2.0) if abs(case.u0) < 2e-8
              else math.log(math.tan(abs(case.u0) / 2.0)))
    q = log_t0 - case.grip * np.sin(s_arr)
    with np.errstate(over="ignore"):
        angle = np.where(q <= 0, np.arctan(np.exp(np.minimum(q, 0.0))),
                         0.5 * math.pi - np.arctan(np.exp(-np.maximum(q, 0.0))))
    out = math.copysign(2.0, case.u0) * angle
    return float(out) if out.ndim == 0 else out


def mirror_transform(point: DrivePoint, u0: float) -> tuple[DrivePoint, float]:
    """Swap the roles of the two racks and reverse the pinion coordinate.

    The mirrored system is measured in units of the *new* rack-1 velocity
    (old V2), so if ``u(s)`` solves the original problem then
    ``-u(sigma / nu)`` solves the mirrored one at time ``sigma``.
    """
    nu = point.nu
    return DrivePoint(point.phi2 / nu, point.phi1 / nu, 1.0 / nu), -u0
