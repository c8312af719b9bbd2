"""Phase-plane sweeps, II0 boundary bisection and skipping thresholds.

Every grid cell is classified independently from the same initial
condition, so results are assembled by index and do not depend on how the
work is scheduled across processes.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .analysis import PhaseKind, PhaseLabel, Tolerances, classify
from .model import DrivePoint

WORKERS_ENV = "RACKPINION_WORKERS"

Progress = Callable[[int, int], None]


class BracketError(ValueError):
    """The supplied interval does not bracket a sign change / phase flip."""


def default_workers() -> int:
    value = os.environ.get(WORKERS_ENV)
    if value:
        try:
            n = int(value)
        except ValueError:
            raise ValueError(f"{WORKERS_ENV} must be an integer, got {value!r}") from None
        if n >= 1:
            return n
        raise ValueError(f"{WORKERS_ENV} must be >= 1, got {n}")
    return 1


def _classify_job(args):
    point, u0, tol = args
    return classify(point, u0, tol)


def classify_many(points: Sequence[DrivePoint], u0: float = 0.0, tol: Tolerances | None = None,
                  workers: int = 1, progress: Progress | None = None) -> list[PhaseLabel]:
    """Classify ``points`` in order, optionally across worker processes."""
    tol = tol or Tolerances()
    jobs = [(p, u0, tol) for p in points]
    total = len(jobs)
    if workers <= 1 or total <= 1:
        out = []
        for i, job in enumerate(jobs):
            out.append(_classify_job(job))
            if progress:
                progress(i + 1, total)
        return out
    out = []
    chunk = max(1, total // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for i, label in enumerate(pool.map(_classify_job, jobs, chunksize=chunk)):
            out.append(label)
            if progress:
                progress(i + 1, total)
    return out


@dataclass(frozen=True)
class SweepSpec:
    """Grid over (phi1, nu) with phi2 = phi1 + grip_offset.

    Ranges are ``(min, max, count)`` and include both endpoints.
    """

    phi1_range: tuple[float, float, int]
    nu_range: tuple[float, float, int]
    grip_offset: float = 0.05
    u0: float = 0.0
    tolerances: Tolerances = field(default_factory=Tolerances)

    def __post_init__(self) -> None:
        for name in ("phi1_range", "nu_range"):
            lo, hi, count = getattr(self, name)
            if int(count) != count or count < 1:
                raise ValueError(f"{name} count must be a positive integer, got {count}")
            if count >= 2 and not lo < hi:
                raise ValueError(f"{name} must be ordered (min < max), got {lo}, {hi}")
            if count == 1 and lo != hi:
                raise ValueError(f"{name} with a single point needs min == max")
        if self.nu_range[0] <= 0:
            raise ValueError("nu must be positive across the sweep")
        if self.phi1_range[0] < 0 or self.phi1_range[0] + self.grip_offset < 0:
            raise ValueError("phi1 and phi2 = phi1 + grip_offset must be non-negative")

    @property
    def phi1_values(self) -> np.ndarray:
        lo, hi, n = self.phi1_range
        return np.linspace(lo, hi, int(n))

    @property
    def nu_values(self) -> np.ndarray:
        lo, hi, n = self.nu_range
        return np.linspace(lo, hi, int(n))

    def point(self, phi1: float, nu: float) -> DrivePoint:
        return DrivePoint(float(phi1), float(phi1) + self.grip_offset, float(nu))


@dataclass
class BoundaryPoint:
    phi1: float
    nu: float
    residual: float
    width: float


@dataclass
class PhaseMap:
    phi1: np.ndarray
    nu: np.ndarray
    grid: list[list[PhaseLabel]]  # grid[i][j] at (phi1[i], nu[j])
    boundary_II0: list[BoundaryPoint]
    spec: SweepSpec

    def kinds(self) -> np.ndarray:
        return np.array([[cell.kind.value for cell in row] for row in self.grid])

    def velocities(self) -> np.ndarray:
        return np.array([[cell.mean_velocity for cell in row] for row in self.grid])

    @property
    def unconverged(self) -> list[tuple[int, int]]:
        return [(i, j) for i, row in enumerate(self.grid)
                for j, cell in enumerate(row) if not cell.converged]

    def metadata(self) -> dict:
        tol = self.spec.tolerances
        cfg = tol.integrator
        return {
            "phi1_range": list(self.spec.phi1_range),
            "nu_range": list(self.spec.nu_range),
            "grip_offset": self.spec.grip_offset,
            "u0": self.spec.u0,
            "tolerances": {
                "eps_lock": tol.eps_lock, "eps_zero": tol.eps_zero, "eps_conv": tol.eps_conv,
                "discard_fraction": tol.discard_fraction, "horizon": tol.horizon,
            },
            "integrator": {
                "rel_tol": cfg.rel_tol, "abs_tol": cfg.abs_tol,
                "max_step": cfg.max_step, "sample_interval": cfg.sample_interval,
            },
            "unconverged": [list(ij) for ij in self.unconverged],
        }


def _sign(label: PhaseLabel, eps_zero: float) -> int:
    v = label.mean_velocity
    if abs(v) < eps_zero:
        return 0
    return 1 if v > 0 else -1


def sweep(spec: SweepSpec, workers: int = 1, progress: Progress | None = None,
          trace_boundary: bool = True) -> PhaseMap:
    """Classify every grid cell, then bisect the II0 line in each phi1 column."""
    phi1s, nus = spec.phi1_values, spec.nu_values
    points = [spec.point(a, b) for a in phi1s for b in nus]
    labels = classify_many(points, spec.u0, spec.tolerances, workers, progress)
    n_nu = len(nus)
    grid = [labels[i * n_nu:(i + 1) * n_nu] for i in range(len(phi1s))]

    boundary: list[BoundaryPoint] = []
    if trace_boundary:
        brackets = []
        eps = spec.tolerances.eps_zero
        for i, row in enumerate(grid):
            for j in range(n_nu - 1):
                a, b = _sign(row[j], eps), _sign(row[j + 1], eps)
                if a * b < 0:
                    brackets.append((float(phi1s[i]), (float(nus[j]), float(nus[j + 1]))))
        boundary = trace_II0(brackets, spec.grip_offset, spec.u0, spec.tolerances, workers)
    return PhaseMap(phi1s, nus, grid, boundary, spec)


def _mean_velocity_at(phi1: float, delta: float, nu: float, u0: float, tol: Tolerances) -> float:
    return classify(DrivePoint(phi1, phi1 + delta, nu), u0, tol).mean_velocity


def find_II0_boundary(phi1: float, delta: float, nu_bracket: tuple[float, float],
                      u0: float = 0.0, tol: Tolerances | None = None,
                      width: float = 1e-4) -> BoundaryPoint:
    """Bisect mean_velocity(nu) = 0 on the line phi2 = phi1 + delta.

    Plain bisection on the sign only, since the mean velocity carries noise of
    order eps_conv and a secant step would chase it.
    """
    tol = tol or Tolerances()
    lo, hi = map(float, nu_bracket)
    if not 0 < lo < hi:
        raise BracketError(f"need 0 < lo < hi, got {nu_bracket}")
    v_lo = _mean_velocity_at(phi1, delta, lo, u0, tol)
    v_hi = _mean_velocity_at(phi1, delta, hi, u0, tol)
    if v_lo == 0.0:
        return BoundaryPoint(phi1, lo, 0.0, 0.0)
    if v_hi == 0.0:
        return BoundaryPoint(phi1, hi, 0.0, 0.0)
    if (v_lo > 0) == (v_hi > 0):
        raise BracketError(
            f"mean velocity has the same sign at nu={lo} ({v_lo:.3g}) and nu={hi} ({v_hi:.3g})")
    while True:
        mid = 0.5 * (lo + hi)
        v_mid = _mean_velocity_at(phi1, delta, mid, u0, tol)
        if v_mid == 0.0:
            return BoundaryPoint(phi1, mid, 0.0, 0.0)
        if (v_mid > 0) == (v_lo > 0):
            lo, v_lo = mid, v_mid
        else:
            hi, v_hi = mid, v_mid
        if hi - lo < width:
            break
    # report the bracket end whose mean velocity is closer to zero
    nu_star, residual = (lo, v_lo) if abs(v_lo) <= abs(v_hi) else (hi, v_hi)
    return BoundaryPoint(phi1, nu_star, residual, hi - lo)


def _boundary_job(args):
    phi1, bracket, delta, u0, tol = args
    try:
        return find_II0_boundary(phi1, delta, bracket, u0, tol)
    except BracketError:
        return None


def trace_II0(brackets: Iterable[tuple[float, tuple[float, float]]], delta: float,
              u0: float = 0.0, tol: Tolerances | None = None,
              workers: int = 1) -> list[BoundaryPoint]:
    """Bisect each ``(phi1, (nu_lo, nu_hi))`` bracket; unbracketed rows are dropped."""
    tol = tol or Tolerances()
    jobs = [(phi1, br, delta, u0, tol) for phi1, br in brackets]
    if workers <= 1 or len(jobs) <= 1:
        results = [_boundary_job(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_boundary_job, jobs))
    return [r for r in results if r is not None]


def _is_locked(rack: int, grip: float, other_grip: float, nu: float, u0: float,
               tol: Tolerances) -> bool:
    if rack == 1:
        return classify(DrivePoint(grip, other_grip, nu), u0, tol).kind is PhaseKind.I1
    return classify(DrivePoint(other_grip, grip, nu), u0, tol).kind is PhaseKind.I2


def find_skipping_threshold(rack: int, other_grip: float, nu: float,
                            bracket: tuple[float, float] | None = None,
                            u0: float = 0.0, tol: Tolerances | None = None,
                            resolution: float = 1e-3) -> float:
    """Smallest grip on ``rack`` that locks the pinion to it, to ``resolution``.

    Reduced grips are in units of zeta*V1/R**2, so the single-rack threshold is
    1 for rack-1 and nu for rack-2. ``resolution`` is in units of the chosen
    rack's own speed (1 or nu).
    """
    if rack not in (1, 2):
        raise ValueError(f"rack must be 1 or 2, got {rack}")
    tol = tol or Tolerances()
    own_speed = 1.0 if rack == 1 else nu
    if bracket is None:
        bracket = (0.0, 2.0 * own_speed + 2.0 * other_grip + 1.0)
    lo, hi = map(float, bracket)
    if _is_locked(rack, lo, other_grip, nu, u0, tol):
        raise BracketError(f"already locked at the lower grip {lo}")
    if not _is_locked(rack, hi, other_grip, nu, u0, tol):
        raise BracketError(f"not locked at the upper grip {hi}")
    while hi - lo > resolution * own_speed:
        mid = 0.5 * (lo + hi)
        if _is_locked(rack, mid, other_grip, nu, u0, tol):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def velocity_cut(phi1: float, phi2: float, nu_values: Sequence[float], u0: float = 0.0,
                 tol: Tolerances | None = None, workers: int = 1, refine_II0: bool = True,
                 progress: Progress | None = None) -> tuple[np.ndarray, list[PhaseLabel]]:
    """Mean pinion velocity along nu at fixed grips.

    With ``refine_II0`` each sign change of the velocity is bisected and the
    located neutral point is inserted into the cut, because on a uniform grid
    the II0 line is generically missed.
    """
    tol = tol or Tolerances()
    nus = [float(v) for v in nu_values]
    labels = classify_many([DrivePoint(phi1, phi2, v) for v in nus], u0, tol, workers, progress)
    if refine_II0:
        delta = phi2 - phi1
        brackets = []
        for j in range(len(nus) - 1):
            a, b = _sign(labels[j], tol.eps_zero), _sign(labels[j + 1], tol.eps_zero)
            if a * b < 0:
                brackets.append((phi1, (nus[j], nus[j + 1])))
        found = trace_II0(brackets, delta, u0, tol, workers)
        extra = [b.nu for b in found]
        if extra:
            extra_labels = classify_many([DrivePoint(phi1, phi2, v) for v in extra], u0, tol,
                                         workers)
            pairs = sorted(zip(nus + extra, labels + extra_labels), key=lambda p: p[0])
            nus = [p[0] for p in pairs]
            labels = [p[1] for p in pairs]
    return np.array(nus), labels


def phase_sequence(labels: Iterable[PhaseLabel]) -> list[PhaseKind]:
    """Run-length compressed sequence of phase kinds."""
    seq: list[PhaseKind] = []
    for lab in labels:
        if not seq or seq[-1] is not lab.kind:
            seq.append(lab.kind)
    return seq
