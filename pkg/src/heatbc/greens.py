"""Dirichlet heat Green functions by images, and the first-order solver.

The interval Green function is the alternating image series

    G(x, xi, s) = sum_k [ E_1(x - xi - 2kL, s) - E_1(x + xi - 2a - 2kL, s) ],

truncated symmetrically once the neglected images fall below a tolerance.
The rectangle factorizes into a product of interval constructions. The
boundary-flux kernel (the normal derivative propagating Dirichlet data into
the domain) is the term-by-term differentiated series oriented so that it is
nonnegative, i.e. the classical Poisson kernel of the domain; with it the
first-order solution with source f and nonlocal boundary data phi is

    u = (volume potential of f) + (flux kernel convolved with phi).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import Domain, Interval, Rectangle
from .kernel import KernelOrder, kernel_values
from .potentials import volume_potential
from .quadrature import BoundaryRule, TimeRule, VolumeRule
from .sources import BoundaryData, SourceField
from .util import ConfigError, NumericalError


@dataclass(frozen=True)
class GreenEvalParams:
    """Image-series truncation controls."""

    truncation_tol: float = 1e-12
    max_terms: int = 64

    def __post_init__(self):
        if not 0 < self.truncation_tol <= 1e-6:
            raise ConfigError(
                f"truncation tolerance must lie in (0, 1e-6], got {self.truncation_tol}"
            )
        if self.max_terms < 1:
            raise ConfigError(f"max_terms must be positive, got {self.max_terms}")


DEFAULT_PARAMS = GreenEvalParams()


def _image_count(L: float, s_max: float, params: GreenEvalParams) -> int:
    """Smallest symmetric range K with all neglected images below tolerance.

    Neglected terms have |argument| >= (2K - 1) L; a factor 16 covers the
    four term families and the geometric tail."""
    for K in range(1, params.max_terms + 1):
        bound = 16.0 * float(kernel_values(1, 1, ((2 * K - 1) * L) ** 2, s_max))
        if bound < params.truncation_tol:
            return K
    raise NumericalError(
        f"image series needs more than max_terms={params.max_terms} terms "
        f"at s={s_max} on length {L}"
    )


def interval_green(x: float, xi: float, s, interval: Interval,
                   params: GreenEvalParams = DEFAULT_PARAMS):
    """Dirichlet heat kernel of an interval; vectorized over the time lag s."""
    scalar = np.asarray(s).ndim == 0
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    if np.any(s_arr <= 0.0):
        raise ValueError("interval_green requires s > 0")
    a, L = interval.a, interval.length
    K = _image_count(L, float(np.max(s_arr)), params)
    ks = np.arange(-K, K + 1)
    direct = x - xi - 2.0 * ks * L
    image = x + xi - 2.0 * a - 2.0 * ks * L
    vals = (kernel_values(1, 1, direct[:, None] ** 2, s_arr[None, :])
            - kernel_values(1, 1, image[:, None] ** 2, s_arr[None, :])).sum(axis=0)
    if scalar:
        return float(vals[0])
    return vals


def _interval_flux(x: float, side: float, s, interval: Interval,
                   params: GreenEvalParams) -> np.ndarray:
    """Positive boundary-flux (Poisson) kernel of the interval at endpoint `side`.

    Equals the inward-normal derivative of interval_green in the source
    point; term-by-term differentiation of the image series."""
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    a, b, L = interval.a, interval.b, interval.length
    K = _image_count(L, float(np.max(s_arr)), params)
    ks = np.arange(-K, K + 1)
    direct = x - side - 2.0 * ks * L
    image = x + side - 2.0 * a - 2.0 * ks * L
    # d/dxi of each family; E' (r) = -r/(2s) E(r)
    dvals = (direct[:, None] / (2.0 * s_arr[None, :])
             * kernel_values(1, 1, direct[:, None] ** 2, s_arr[None, :]))
    ivals = (image[:, None] / (2.0 * s_arr[None, :])
             * kernel_values(1, 1, image[:, None] ** 2, s_arr[None, :]))
    dG_dxi = (dvals + ivals).sum(axis=0)
    inward = 1.0 if abs(side - a) <= abs(side - b) else -1.0
    return inward * dG_dxi


def rectangle_green(x, xi, s, rectangle: Rectangle,
                    params: GreenEvalParams = DEFAULT_PARAMS):
    """Dirichlet heat kernel of a rectangle: product of interval factors."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    gx = interval_green(float(x[0]), float(xi[0]), s, rectangle.x_interval, params)
    gy = interval_green(float(x[1]), float(xi[1]), s, rectangle.y_interval, params)
    return gx * gy


def green_normal_derivative(x, xi_b, normal, s, domain: Domain,
                            params: GreenEvalParams = DEFAULT_PARAMS):
    """Boundary-flux kernel at a boundary point with outward normal `normal`.

    This is the kernel of the boundary term propagating Dirichlet data into
    the domain; it is nonnegative (heat flows inward from positive data), and
    its total time-and-boundary mass saturates to 1. Vectorized over s.
    """
    scalar = np.asarray(s).ndim == 0
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    if np.any(s_arr <= 0.0):
        raise ValueError("green_normal_derivative requires s > 0")
    if isinstance(domain, Interval):
        xb = float(np.atleast_1d(xi_b)[0])
        if min(abs(xb - domain.a), abs(xb - domain.b)) > 1e-9:
            raise ConfigError(f"{xb} is not an endpoint of {domain}")
        vals = _interval_flux(float(np.atleast_1d(x)[0]), xb, s_arr, domain, params)
    elif isinstance(domain, Rectangle):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        xi_b = np.atleast_1d(np.asarray(xi_b, dtype=float))
        nrm = np.atleast_1d(np.asarray(normal, dtype=float))
        if abs(abs(nrm[0]) - 1.0) < 1e-9 and abs(nrm[1]) < 1e-9:
            side = domain.ax if nrm[0] < 0 else domain.bx
            if abs(float(xi_b[0]) - side) > 1e-9:
                raise ConfigError(f"point {xi_b.tolist()} is not on the x={side} side")
            flux = _interval_flux(float(x[0]), side, s_arr, domain.x_interval, params)
            other = interval_green(float(x[1]), float(xi_b[1]), s_arr, domain.y_interval, params)
        elif abs(abs(nrm[1]) - 1.0) < 1e-9 and abs(nrm[0]) < 1e-9:
            side = domain.ay if nrm[1] < 0 else domain.by
            if abs(float(xi_b[1]) - side) > 1e-9:
                raise ConfigError(f"point {xi_b.tolist()} is not on the y={side} side")
            flux = _interval_flux(float(x[1]), side, s_arr, domain.y_interval, params)
            other = interval_green(float(x[0]), float(xi_b[0]), s_arr, domain.x_interval, params)
        else:
            raise ConfigError(f"normal {normal!r} is not axis-aligned for a rectangle side")
        vals = flux * np.atleast_1d(other)
    else:
        raise ConfigError(
            f"Green function is available for Interval and Rectangle only, got {domain!r}"
        )
    if scalar:
        return float(vals[0])
    return vals


def poisson_boundary_term(phi: BoundaryData, domain: Domain, brule: BoundaryRule,
                          trule: TimeRule, x, t: float,
                          params: GreenEvalParams = DEFAULT_PARAMS) -> float:
    """Boundary contribution: flux kernel convolved with phi over the
    boundary-time grid. Requires a strictly interior evaluation point and
    compatible data phi(., 0) = 0."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if not domain.contains(x):
        raise ValueError(f"evaluation point {x.tolist()} must lie strictly inside the domain")
    start = phi(brule.points, 0.0)
    if np.max(np.abs(start)) > 1e-12:
        raise ConfigError("boundary data must vanish at t = 0")
    if abs(trule.target_time - t) > 1e-12 * max(1.0, abs(t)):
        raise ConfigError(
            f"time rule targets t={trule.target_time}, evaluation requested at t={t}"
        )
    phi_grid = phi.on_grid(brule.points, trule.taus)
    total = 0.0
    for b in range(len(brule)):
        flux = green_normal_derivative(x, brule.points[b], brule.normals[b],
                                       trule.lags, domain, params)
        total += brule.weights[b] * float(np.dot(trule.weights * flux, phi_grid[b, :]))
    return total


def solve_m1(f: SourceField, phi: BoundaryData, domain: Domain, vrule: VolumeRule,
             brule: BoundaryRule, trule: TimeRule, x, t: float,
             params: GreenEvalParams = DEFAULT_PARAMS) -> float:
    """First-order solution with source f and nonlocal boundary data phi.

    With phi identically zero this is exactly the volume-potential code path.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if not domain.contains(x):
        raise ValueError(f"evaluation point {x.tolist()} must lie strictly inside the domain")
    order = KernelOrder(1, f.dim)
    value = volume_potential(order, f, domain, vrule, trule, x, t)
    if phi.is_zero:
        return value
    return value + poisson_boundary_term(phi, domain, brule, trule, x, t, params)
