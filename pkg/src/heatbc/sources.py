"""Analytic source fields and boundary data families.

Samplers are vectorized over points: f(points, tau) takes an (N, n) array and
a scalar time and returns an (N,) array. They are deterministic; smoothness
(anisotropic Holder continuity of the source) is an assumption on the caller,
not a runtime check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .geometry import Domain, Interval, Rectangle
from .util import ConfigError


@dataclass(frozen=True)
class SourceField:
    """Right-hand side f(x, t) with an optional support hint for validation."""

    sampler: Callable[[np.ndarray, float], np.ndarray]
    dim: int
    support_hint: tuple | None = None  # ((lo...), (hi...)) box believed to contain supp f
    note: str = ""

    def __call__(self, points: np.ndarray, tau: float) -> np.ndarray:
        return self.sampler(np.asarray(points, dtype=float), float(tau))

    def at(self, point, tau: float) -> float:
        p = np.atleast_1d(np.asarray(point, dtype=float))[None, :]
        return float(self.sampler(p, float(tau))[0])


@dataclass(frozen=True)
class BoundaryData:
    """Boundary density phi(x, t); is_zero marks the identically-zero case."""

    sampler: Callable[[np.ndarray, float], np.ndarray]
    dim: int
    is_zero: bool = False

    def __call__(self, points: np.ndarray, t: float) -> np.ndarray:
        return self.sampler(np.asarray(points, dtype=float), float(t))

    def at(self, point, t: float) -> float:
        p = np.atleast_1d(np.asarray(point, dtype=float))[None, :]
        return float(self.sampler(p, float(t))[0])

    def on_grid(self, points: np.ndarray, taus: np.ndarray) -> np.ndarray:
        """Sample onto a (node, time) grid; values are taken exactly at nodes."""
        points = np.asarray(points, dtype=float)
        return np.column_stack([self(points, tau) for tau in np.asarray(taus, dtype=float)])


def zero_source(dim: int) -> SourceField:
    return SourceField(lambda pts, tau: np.zeros(pts.shape[0]), dim, note="zero")


def _time_profile(profile) -> Callable[[float], float]:
    if profile in (None, "constant"):
        return lambda tau: 1.0
    if isinstance(profile, dict) and profile.get("type") == "ramp":
        rise = float(profile["rise_time"])
        if rise <= 0:
            raise ConfigError(f"time profile rise_time must be positive, got {rise}")
        return lambda tau: 1.0 - np.exp(-((tau / rise) ** 2))
    raise ConfigError(f"unknown time profile {profile!r}")


def gaussian_bump_source(center, width: float, amplitude: float, dim: int,
                         time_profile=None) -> SourceField:
    """Isotropic Gaussian bump A * exp(-|x-c|^2 / (2 w^2)) * p(t).

    Treated as supported in the box c +- 4w (the tail beyond is below 4e-4 of
    the amplitude and decays super-exponentially).
    """
    c = np.atleast_1d(np.asarray(center, dtype=float))
    if c.shape != (dim,):
        raise ConfigError(f"bump center {center!r} does not match dimension {dim}")
    if width <= 0:
        raise ConfigError(f"bump width must be positive, got {width}")
    profile = _time_profile(time_profile)

    def sampler(pts, tau):
        d2 = np.sum((pts - c[None, :]) ** 2, axis=1)
        return amplitude * np.exp(-d2 / (2.0 * width * width)) * profile(tau)

    lo = tuple(c - 4.0 * width)
    hi = tuple(c + 4.0 * width)
    return SourceField(sampler, dim, support_hint=(lo, hi), note="gaussian_bump")


def manufactured_source(domain: Domain) -> SourceField:
    """Source whose first-order solution is u*(x, t) = t * prod sin(pi x~).

    x~ is the coordinate scaled to (0, 1) per axis. Used by the bounded-domain
    finite-difference oracle tests, where u* vanishes on the boundary.
    """
    if isinstance(domain, Interval):
        a, L = domain.a, domain.length

        def sampler(pts, tau):
            x = (pts[:, 0] - a) / L
            return np.sin(np.pi * x) * (1.0 + tau * (np.pi / L) ** 2)

        return SourceField(sampler, 1, note="manufactured")
    if isinstance(domain, Rectangle):
        ax, Lx = domain.ax, domain.bx - domain.ax
        ay, Ly = domain.ay, domain.by - domain.ay
        lam = (np.pi / Lx) ** 2 + (np.pi / Ly) ** 2

        def sampler(pts, tau):
            sx = np.sin(np.pi * (pts[:, 0] - ax) / Lx)
            sy = np.sin(np.pi * (pts[:, 1] - ay) / Ly)
            return sx * sy * (1.0 + tau * lam)

        return SourceField(sampler, 2, note="manufactured")
    raise ConfigError(f"manufactured source is not defined for {domain!r}")


def manufactured_solution(domain: Domain) -> Callable[[np.ndarray, float], np.ndarray]:
    """The exact solution paired with manufactured_source (zero initial data)."""
    if isinstance(domain, Interval):
        a, L = domain.a, domain.length
        return lambda pts, t: t * np.sin(np.pi * (np.asarray(pts)[:, 0] - a) / L)
    if isinstance(domain, Rectangle):
        ax, Lx = domain.ax, domain.bx - domain.ax
        ay, Ly = domain.ay, domain.by - domain.ay
        return lambda pts, t: (t * np.sin(np.pi * (np.asarray(pts)[:, 0] - ax) / Lx)
                               * np.sin(np.pi * (np.asarray(pts)[:, 1] - ay) / Ly))
    raise ConfigError(f"manufactured solution is not defined for {domain!r}")


def zero_boundary(dim: int) -> BoundaryData:
    return BoundaryData(lambda pts, t: np.zeros(pts.shape[0]), dim, is_zero=True)


def ramp_boundary(amplitude: float, rise_time: float, dim: int) -> BoundaryData:
    """Spatially uniform ramp A * (1 - exp(-(t/r)^2)); vanishes with its first
    derivative at t = 0, satisfying the phi(., 0) = 0 compatibility."""
    if rise_time <= 0:
        raise ConfigError(f"ramp rise_time must be positive, got {rise_time}")

    def sampler(pts, t):
        return np.full(pts.shape[0], amplitude * (1.0 - np.exp(-((t / rise_time) ** 2))))

    return BoundaryData(sampler, dim)


NAMED_BOUNDARY: dict[str, Callable[[int], BoundaryData]] = {
    # t^2 profile: smooth, compatible (phi(., 0) = 0), unbounded growth.
    "quadratic": lambda dim: BoundaryData(lambda pts, t: np.full(pts.shape[0], t * t), dim),
}


def named_boundary(expression_id: str, dim: int) -> BoundaryData:
    try:
        factory = NAMED_BOUNDARY[expression_id]
    except KeyError:
        raise ConfigError(
            f"unknown boundary expression id {expression_id!r}; "
            f"known: {sorted(NAMED_BOUNDARY)}"
        ) from None
    return factory(dim)
