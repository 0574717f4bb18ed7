"""Reference domains: interval, axis-aligned rectangle, disk."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .util import ConfigError


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if not self.a < self.b:
            raise ConfigError(f"interval requires a < b, got [{self.a}, {self.b}]")

    dim = 1

    @property
    def length(self) -> float:
        return self.b - self.a

    def contains(self, p) -> bool:
        x = _point(p, 1)[0]
        return self.a < x < self.b

    def distance_to_boundary(self, p) -> float:
        x = _point(p, 1)[0]
        if self.a <= x <= self.b:
            return min(x - self.a, self.b - x)
        return min(abs(x - self.a), abs(x - self.b))


@dataclass(frozen=True)
class Rectangle:
    ax: float
    bx: float
    ay: float
    by: float

    def __post_init__(self):
        if not (self.ax < self.bx and self.ay < self.by):
            raise ConfigError(
                f"rectangle requires ax < bx and ay < by, got "
                f"[{self.ax}, {self.bx}] x [{self.ay}, {self.by}]"
            )

    dim = 2

    @property
    def x_interval(self) -> Interval:
        return Interval(self.ax, self.bx)

    @property
    def y_interval(self) -> Interval:
        return Interval(self.ay, self.by)

    def contains(self, p) -> bool:
        x, y = _point(p, 2)
        return self.ax < x < self.bx and self.ay < y < self.by

    def distance_to_boundary(self, p) -> float:
        x, y = _point(p, 2)
        # Signed distances to the slab boundaries; inside when both negative.
        dx = max(self.ax - x, x - self.bx)
        dy = max(self.ay - y, y - self.by)
        if dx <= 0.0 and dy <= 0.0:
            return min(-dx, -dy)
        return float(np.hypot(max(dx, 0.0), max(dy, 0.0)))


@dataclass(frozen=True)
class Disk:
    center: tuple[float, float]
    radius: float

    def __post_init__(self):
        if len(self.center) != 2:
            raise ConfigError(f"disk center must have 2 components, got {self.center!r}")
        if not self.radius > 0:
            raise ConfigError(f"disk radius must be positive, got {self.radius}")

    dim = 2

    def contains(self, p) -> bool:
        x, y = _point(p, 2)
        return np.hypot(x - self.center[0], y - self.center[1]) < self.radius

    def distance_to_boundary(self, p) -> float:
        x, y = _point(p, 2)
        return abs(self.radius - float(np.hypot(x - self.center[0], y - self.center[1])))


Domain = Interval | Rectangle | Disk


def _point(p, n: int):
    arr = np.atleast_1d(np.asarray(p, dtype=float))
    if arr.shape != (n,):
        raise ConfigError(f"point {p!r} does not match dimension {n}")
    return arr


def contains(domain: Domain, p) -> bool:
    """Strict interior membership test."""
    return domain.contains(p)


def distance_to_boundary(domain: Domain, p) -> float:
    """Unsigned distance from p to the boundary of the domain."""
    return domain.distance_to_boundary(p)
