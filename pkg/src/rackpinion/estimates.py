"""From device geometry to model parameters and back.

All arithmetic is in SI. The Casimir grips F1, F2 are inputs; presets ship
the example device (two gap sizes) in ``presets.yaml``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from importlib import resources

import yaml

from .model import DrivePoint
from .units import DENSITY, FORCE, LENGTH, VELOCITY, VISCOSITY, parse_quantity

_DIMENSIONS = {
    "R": LENGTH, "L": LENGTH, "r": LENGTH, "h": LENGTH, "wavelength": LENGTH,
    "eta": VISCOSITY, "rho": DENSITY, "F1": FORCE, "F2": FORCE,
    "V1": VELOCITY, "V2": VELOCITY, "H": LENGTH, "a": LENGTH,
}


@dataclass(frozen=True)
class DeviceSpec:
    """Dimensional description of the rack-pinion-rack device (SI units).

    ``H`` (gap) and ``a`` (corrugation amplitude) are carried as metadata
    only; the grips they would produce are given directly as F1, F2.
    """

    R: float            # pinion radius
    L: float            # pinion thickness
    r: float            # axle radius
    h: float            # lubricant film thickness
    wavelength: float   # corrugation wavelength
    eta: float          # lubricant viscosity
    rho: float          # pinion density
    F1: float
    F2: float
    V1: float
    V2: float
    H: float | None = None
    a: float | None = None

    def __post_init__(self) -> None:
        for name in ("R", "L", "r", "h", "wavelength", "eta", "rho", "V1", "V2"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive, got {value!r}")
        for name in ("F1", "F2"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ValueError(f"{name} must be non-negative, got {value!r}")
        for name in ("H", "a"):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise ValueError(f"{name} must be positive, got {value!r}")
        if self.H is not None and self.a is not None and not self.a < self.H:
            raise ValueError(f"corrugation amplitude a={self.a} must be smaller than gap H={self.H}")

    @classmethod
    def from_mapping(cls, data: dict) -> "DeviceSpec":
        """Build from a mapping of field name to number (SI) or unit string."""
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise KeyError(f"unknown device key(s): {', '.join(unknown)}")
        missing = sorted(f.name for f in fields(cls)
                         if f.default is not None and f.name not in data)
        if missing:
            raise KeyError(f"missing device key(s): {', '.join(missing)}")
        values = {k: parse_quantity(v, _DIMENSIONS[k]) for k, v in data.items() if v is not None}
        return cls(**values)

    def with_velocities(self, V1: float, V2: float | None = None) -> "DeviceSpec":
        return replace(self, V1=V1, V2=V1 if V2 is None else V2)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def friction_coefficient(spec: DeviceSpec) -> float:
    """Rotational friction of a lubricated axle, 2*pi*eta*L*r**3/h (kg m^2/s)."""
    return 2.0 * math.pi * spec.eta * spec.L * spec.r ** 3 / spec.h


def moment_of_inertia(spec: DeviceSpec) -> float:
    """Solid-cylinder pinion, (pi/2)*rho*L*R**4 (kg m^2)."""
    return 0.5 * math.pi * spec.rho * spec.L * spec.R ** 4


def inertia_time(spec: DeviceSpec) -> float:
    """Inertial relaxation time I/zeta = rho*h*R**4/(4*eta*r**3) in seconds."""
    tau = spec.rho * spec.h * spec.R ** 4 / (4.0 * spec.eta * spec.r ** 3)
    check = moment_of_inertia(spec) / friction_coefficient(spec)
    if not math.isclose(tau, check, rel_tol=1e-12):
        raise ArithmeticError(f"I/zeta={check} disagrees with closed form {tau}")
    return tau


def skipping_velocity(F: float, spec: DeviceSpec) -> float:
    """Rack speed F*R**2/zeta above which the pinion cannot lock (m/s)."""
    if F < 0:
        raise ValueError(f"grip must be non-negative, got {F}")
    return F * spec.R ** 2 / friction_coefficient(spec)


def clock_frequency(V_R: float, wavelength: float) -> float:
    """Oscillation frequency V_R/lambda of the neutral device (Hz)."""
    if not (V_R > 0 and wavelength > 0):
        raise ValueError("rack velocity and wavelength must be positive")
    return V_R / wavelength


def to_drive_point(spec: DeviceSpec) -> DrivePoint:
    zeta = friction_coefficient(spec)
    unit = zeta * spec.V1 / spec.R ** 2
    return DrivePoint(spec.F1 / unit, spec.F2 / unit, spec.V2 / spec.V1)


def from_drive_point(point: DrivePoint, zeta: float, V1: float, R: float) -> tuple[float, float, float]:
    """Inverse of :func:`to_drive_point`: ``(F1, F2, V2)`` in SI."""
    unit = zeta * V1 / R ** 2
    return point.phi1 * unit, point.phi2 * unit, point.nu * V1


def estimate_report(spec: DeviceSpec, V_R: float | None = None) -> dict:
    """All derived quantities for ``spec``; ``V_R`` defaults to V_S(F1)/5."""
    zeta = friction_coefficient(spec)
    v_s1 = skipping_velocity(spec.F1, spec)
    v_s2 = skipping_velocity(spec.F2, spec)
    if V_R is None:
        V_R = v_s1 / 5.0
    point = to_drive_point(spec)
    return {
        "zeta": zeta,
        "moment_of_inertia": moment_of_inertia(spec),
        "tau": inertia_time(spec),
        "V_S1": v_s1,
        "V_S2": v_s2,
        "phi1": point.phi1,
        "phi2": point.phi2,
        "nu": point.nu,
        "V_R": V_R,
        "clock_frequency": clock_frequency(V_R, spec.wavelength),
    }


def load_presets() -> dict[str, dict]:
    text = resources.files(__package__).joinpath("presets.yaml").read_text(encoding="utf-8")
    return yaml.safe_load(text)["presets"]


def preset(name: str) -> DeviceSpec:
    presets = load_presets()
    if name not in presets:
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(sorted(presets))}")
    return DeviceSpec.from_mapping(presets[name])
