"""Quadrature rules: boundary, volume, and substituted time integration.

Boundary and volume rules store nodes as (N, n) arrays even for n=1 so that
displacement arithmetic is uniform. Time rules integrate over tau in (0, t)
using the substitution s = sqrt(t - tau), which absorbs the (t-tau)^(-1/2)
endpoint behavior of the 1-D layer kernels; Gauss-Legendre nodes are placed
in the s variable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import Disk, Domain, Interval, Rectangle
from .util import ConfigError


@dataclass(frozen=True)
class BoundaryRule:
    points: np.ndarray  # (N, n)
    normals: np.ndarray  # (N, n), outward unit normals
    weights: np.ndarray  # (N,)

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def find_node(self, p, tol: float = 1e-9) -> int:
        """Index of the node coinciding with p, or ConfigError if absent."""
        p = np.atleast_1d(np.asarray(p, dtype=float))
        d2 = np.sum((self.points - p[None, :]) ** 2, axis=1)
        idx = int(np.argmin(d2))
        if d2[idx] > tol * tol:
            raise ConfigError(f"point {p.tolist()} is not a boundary rule node")
        return idx


@dataclass(frozen=True)
class VolumeRule:
    points: np.ndarray  # (N, n)
    weights: np.ndarray  # (N,)
    # Largest gap between adjacent nodes along any axis; the smallest Gaussian
    # width the rule can resolve. Consumed by the near-diagonal patch.
    max_spacing: float = field(default=None)

    def __post_init__(self):
        if self.max_spacing is None:
            object.__setattr__(self, "max_spacing", _max_axis_gap(self.points))

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


def _max_axis_gap(points: np.ndarray) -> float:
    gap = 0.0
    for d in range(points.shape[1]):
        vals = np.unique(points[:, d])
        if len(vals) > 1:
            gap = max(gap, float(np.max(np.diff(vals))))
    return gap


@dataclass(frozen=True)
class TimeRule:
    target_time: float
    taus: np.ndarray  # (N,), strictly increasing in (0, t)
    weights: np.ndarray  # (N,), positive, sum to t
    grading: str = "sqrt"
    # Time lags s = t - tau, kept alongside to avoid re-deriving tiny lags
    # through cancellation.
    lags: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.lags is None:
            object.__setattr__(self, "lags", self.target_time - self.taus)

    def __len__(self) -> int:
        return self.taus.shape[0]


def gauss_legendre(n: int, a: float, b: float):
    """Gauss-Legendre nodes/weights mapped to (a, b)."""
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def make_boundary_rule(domain: Domain, resolution: int) -> BoundaryRule:
    """Boundary nodes with outward normals and surface weights.

    Interval: the two endpoints with weight 1 each (the n=1 boundary
    "integral" is a two-point sum). Rectangle: composite Gauss-Legendre
    panels per side (panel nodes are interior, so corners never appear).
    Disk: equispaced angles with trapezoidal weights, spectrally accurate for
    periodic integrands.
    """
    if resolution < 1:
        raise ConfigError(f"boundary resolution must be >= 1, got {resolution}")
    if isinstance(domain, Interval):
        points = np.array([[domain.a], [domain.b]])
        normals = np.array([[-1.0], [1.0]])
        weights = np.array([1.0, 1.0])
        return BoundaryRule(points, normals, weights)
    if isinstance(domain, Rectangle):
        nodes_per_panel = 8
        panels = max(1, (resolution + nodes_per_panel - 1) // nodes_per_panel)
        pts, nrms, wts = [], [], []
        sides = [
            (domain.ay, domain.by, lambda s: np.column_stack([np.full_like(s, domain.ax), s]), (-1.0, 0.0)),
            (domain.ay, domain.by, lambda s: np.column_stack([np.full_like(s, domain.bx), s]), (1.0, 0.0)),
            (domain.ax, domain.bx, lambda s: np.column_stack([s, np.full_like(s, domain.ay)]), (0.0, -1.0)),
            (domain.ax, domain.bx, lambda s: np.column_stack([s, np.full_like(s, domain.by)]), (0.0, 1.0)),
        ]
        for lo, hi, embed, normal in sides:
            edges = np.linspace(lo, hi, panels + 1)
            for left, right in zip(edges[:-1], edges[1:]):
                s, w = gauss_legendre(nodes_per_panel, left, right)
                pts.append(embed(s))
                nrms.append(np.tile(normal, (len(s), 1)))
                wts.append(w)
        return BoundaryRule(np.vstack(pts), np.vstack(nrms), np.concatenate(wts))
    if isinstance(domain, Disk):
        count = max(resolution, 8)
        theta = 2.0 * np.pi * np.arange(count) / count
        unit = np.column_stack([np.cos(theta), np.sin(theta)])
        points = np.asarray(domain.center)[None, :] + domain.radius * unit
        weights = np.full(count, 2.0 * np.pi * domain.radius / count)
        return BoundaryRule(points, unit, weights)
    raise ConfigError(f"unsupported domain {domain!r}")


def make_volume_rule(domain: Domain, resolution: int) -> VolumeRule:
    """Interior quadrature: tensor Gauss-Legendre on interval/rectangle,
    polar Gauss-Legendre (radius) x trapezoid (angle) on the disk."""
    if resolution < 1:
        raise ConfigError(f"volume resolution must be >= 1, got {resolution}")
    if isinstance(domain, Interval):
        x, w = gauss_legendre(resolution, domain.a, domain.b)
        return VolumeRule(x[:, None], w)
    if isinstance(domain, Rectangle):
        x, wx = gauss_legendre(resolution, domain.ax, domain.bx)
        y, wy = gauss_legendre(resolution, domain.ay, domain.by)
        xx, yy = np.meshgrid(x, y, indexing="ij")
        ww = np.outer(wx, wy)
        return VolumeRule(np.column_stack([xx.ravel(), yy.ravel()]), ww.ravel())
    if isinstance(domain, Disk):
        r, wr = gauss_legendre(resolution, 0.0, domain.radius)
        count = max(8, 2 * resolution)
        theta = 2.0 * np.pi * np.arange(count) / count
        wt = 2.0 * np.pi / count
        rr, tt = np.meshgrid(r, theta, indexing="ij")
        pts = np.column_stack([
            domain.center[0] + (rr * np.cos(tt)).ravel(),
            domain.center[1] + (rr * np.sin(tt)).ravel(),
        ])
        ww = (np.outer(wr * r, np.full(count, wt))).ravel()
        radial_gap = float(np.max(np.diff(np.concatenate([[0.0], r, [domain.radius]]))))
        spacing = max(radial_gap, domain.radius * 2.0 * np.pi / count)
        return VolumeRule(pts, ww, max_spacing=spacing)
    raise ConfigError(f"unsupported domain {domain!r}")


def interval_rule(a: float, b: float, n: int):
    """Bare 1-D Gauss-Legendre helper for oracles and composite rules."""
    return gauss_legendre(n, a, b)


def make_time_rule(t: float, nodes: int) -> TimeRule:
    """Gauss-Legendre in s = sqrt(t - tau) over (0, sqrt(t)), mapped back.

    The Jacobian d tau = 2 s ds makes the weights sum to t exactly and renders
    (t - tau)^(+-1/2) integrands polynomial in s.
    """
    if not t > 0:
        raise ConfigError(f"time rule requires t > 0, got {t}")
    if nodes < 2:
        raise ConfigError(f"time rule requires >= 2 nodes, got {nodes}")
    s, w = gauss_legendre(nodes, 0.0, np.sqrt(t))
    taus = t - s * s
    weights = 2.0 * s * w
    order = np.argsort(taus)
    return TimeRule(t, taus[order], weights[order], grading="sqrt", lags=(s * s)[order])


def make_graded_time_rule(t: float, nodes_per_panel: int, s_min: float) -> TimeRule:
    """Time rule with geometric panel grading in s = sqrt(t - tau) toward s = 0.

    Used where the integrand has structure at lags as small as s_min^2 (the
    double-layer jump study); panels halve from sqrt(t) down to s_min.
    """
    if not t > 0:
        raise ConfigError(f"time rule requires t > 0, got {t}")
    if not 0 < s_min < np.sqrt(t):
        raise ConfigError(f"s_min must lie in (0, sqrt(t)), got {s_min}")
    edges = [np.sqrt(t)]
    while edges[-1] * 0.5 > s_min:
        edges.append(edges[-1] * 0.5)
    edges.append(0.0)
    svals, wvals = [], []
    for right, left in zip(edges[:-1], edges[1:]):
        s, w = gauss_legendre(nodes_per_panel, left, right)
        svals.append(s)
        wvals.append(w)
    s = np.concatenate(svals)
    w = np.concatenate(wvals)
    taus = t - s * s
    weights = 2.0 * s * w
    order = np.argsort(taus)
    return TimeRule(t, taus[order], weights[order], grading=f"sqrt+geometric({s_min:g})",
                    lags=(s * s)[order])
