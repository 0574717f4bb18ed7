"""Volume heat potentials, their trace family, and layer potentials.

The volume potential of order m is the space-time convolution of the
iterated kernel with a source over Q x (0, t). Applying the heat operator k
times to it lowers the kernel order by k, so all traces are evaluated by an
index shift, never by numerical differentiation.

Summation order within one evaluation is fixed (ascending node index) so
repeated evaluations are bitwise reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import Domain
from .kernel import UNDERFLOW_EXPONENT, KernelOrder, kernel_values
from .quadrature import BoundaryRule, TimeRule, VolumeRule, make_time_rule
from .sources import SourceField
from .util import ConfigError

# Boundary densities are plain (n_boundary_nodes, n_time_nodes) arrays whose
# axes follow the associated BoundaryRule and TimeRule node order.
BoundaryDensity = np.ndarray


def _check_rule_time(trule: TimeRule, t: float):
    if abs(trule.target_time - t) > 1e-12 * max(1.0, abs(t)):
        raise ConfigError(
            f"time rule targets t={trule.target_time}, evaluation requested at t={t}"
        )


def _check_density(density: np.ndarray, brule: BoundaryRule, trule: TimeRule) -> np.ndarray:
    density = np.asarray(density, dtype=float)
    if density.shape != (len(brule), len(trule)):
        raise ConfigError(
            f"density shape {density.shape} does not match "
            f"(boundary, time) grid ({len(brule)}, {len(trule)})"
        )
    return density


def _patch_threshold(domain: Domain, x: np.ndarray, t: float, spacing: float) -> float:
    """Lag below which the kernel mass replaces the raw spatial sum.

    Applies only at interior evaluation points. The floor covers lags the
    spatial rule cannot resolve (kernel width below the node spacing); the
    (d/8)^2 cap keeps the full-space mass substitution valid, with room for
    the smooth blend up to 4x the threshold.
    """
    if domain.contains(x):
        d = domain.distance_to_boundary(x)
        floor = max(1e-6 * t, 0.25 * spacing * spacing)
        return min((d / 8.0) ** 2 / 4.0, floor)
    return 0.0


def _smootherstep(u: np.ndarray) -> np.ndarray:
    u = np.clip(u, 0.0, 1.0)
    return u * u * u * (u * (6.0 * u - 15.0) + 10.0)


def volume_potential_many(order: KernelOrder, f: SourceField, domain: Domain,
                          vrule: VolumeRule, trule: TimeRule, xs: np.ndarray,
                          t: float) -> np.ndarray:
    """Volume potential at several evaluation points sharing one time rule."""
    _check_rule_time(trule, t)
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    if xs.shape[1] != order.n or vrule.dim != order.n:
        raise ConfigError(
            f"dimension mismatch: points {xs.shape[1]}, volume rule {vrule.dim}, "
            f"kernel n={order.n}"
        )
    if f.dim != order.n:
        raise ConfigError(f"source dimension {f.dim} does not match kernel n={order.n}")
    thresholds = np.array([_patch_threshold(domain, x, t, vrule.max_spacing) for x in xs])
    diff = xs[:, None, :] - vrule.points[None, :, :]
    r2 = np.sum(diff * diff, axis=2)
    m = order.m
    mass_coeff = 1.0 / math.factorial(m - 1)
    out = np.zeros(xs.shape[0])
    for q in range(len(trule)):
        tau = trule.taus[q]
        s = trule.lags[q]
        w = trule.weights[q]
        if s <= 0.0:
            continue
        kern = kernel_values(m, order.n, r2, s)
        fw = vrule.weights * f(vrule.points, tau)
        contrib = kern @ fw
        # Smooth raw->mass blend over [threshold, 4*threshold] keeps the
        # result twice differentiable in (x, t) across the patch switch.
        blend = thresholds > 0.0
        blend[blend] &= s < 4.0 * thresholds[blend]
        if np.any(blend):
            chi = _smootherstep((s - thresholds[blend]) / (3.0 * thresholds[blend]))
            mass_val = f(xs[blend], tau) * (s ** (m - 1)) * mass_coeff
            contrib[blend] = chi * contrib[blend] + (1.0 - chi) * mass_val
        out += w * contrib
    return out


def volume_potential(order: KernelOrder, f: SourceField, domain: Domain,
                     vrule: VolumeRule, trule: TimeRule, x, t: float) -> float:
    """The order-m heat potential of f over Q x (0, t) at one point."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return float(volume_potential_many(order, f, domain, vrule, trule, x[None, :], t)[0])


def potential_trace(k: int, order: KernelOrder, f: SourceField, domain: Domain,
                    vrule: VolumeRule, trule: TimeRule, x, t: float) -> float:
    """k-fold heat operator applied to the potential: the order-(m-k) potential."""
    if not 0 <= k <= order.m - 1:
        raise ValueError(f"trace index k={k} outside [0, {order.m - 1}]")
    lowered = KernelOrder(order.m - k, order.n)
    return volume_potential(lowered, f, domain, vrule, trule, x, t)


def potential_trace_normal_derivative(k: int, order: KernelOrder, f: SourceField,
                                      domain: Domain, vrule: VolumeRule, trule: TimeRule,
                                      x_b, normal, t: float) -> float:
    """Outward-normal derivative of the k-th trace at a boundary point.

    Differentiates under the integral sign: the integrand is smooth because
    the volume nodes are interior while x_b sits on the boundary.
    """
    if not 0 <= k <= order.m - 1:
        raise ValueError(f"trace index k={k} outside [0, {order.m - 1}]")
    _check_rule_time(trule, t)
    x_b = np.atleast_1d(np.asarray(x_b, dtype=float))
    if domain.distance_to_boundary(x_b) > 1e-9:
        raise ValueError(f"point {x_b.tolist()} is not on the domain boundary")
    nrm = np.atleast_1d(np.asarray(normal, dtype=float))
    m_eff = order.m - k
    diff = x_b[None, :] - vrule.points  # (N, n)
    r2 = np.sum(diff * diff, axis=1)
    rn = diff @ nrm
    total = 0.0
    for q in range(len(trule)):
        s = trule.lags[q]
        if s <= 0.0:
            continue
        kern = kernel_values(m_eff, order.n, r2, s)
        # gradient in the evaluation point: -(x-xi)/(2s) * E, dotted with n
        fw = vrule.weights * f(vrule.points, trule.taus[q])
        total += trule.weights[q] * float((-rn / (2.0 * s) * kern) @ fw)
    return total


def single_layer(j: int, density: BoundaryDensity, brule: BoundaryRule,
                 trule: TimeRule, x, t: float) -> float:
    """Single layer potential with kernel order j against a boundary density.

    On-boundary evaluation is allowed; the weak kernel singularity is
    integrable under the sqrt time substitution of the rule.
    """
    if j < 1:
        raise ValueError(f"kernel order index must be >= 1, got {j}")
    _check_rule_time(trule, t)
    density = _check_density(density, brule, trule)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    diff = x[None, :] - brule.points
    r2 = np.sum(diff * diff, axis=1)
    n = brule.dim
    total = 0.0
    for q in range(len(trule)):
        s = trule.lags[q]
        if s <= 0.0:
            continue
        kern = kernel_values(j, n, r2, s)
        total += trule.weights[q] * float((brule.weights * kern) @ density[:, q])
    return total


def double_layer(j: int, density: BoundaryDensity, brule: BoundaryRule,
                 trule: TimeRule, x, t: float, on_boundary: bool = False) -> float:
    """Double layer potential with kernel order j against a boundary density.

    When on_boundary, x must coincide with a rule node and the direct sum is
    returned; any jump term is the caller's responsibility. The self node
    contributes zero because (x - xi) . n vanishes there (identically in 1-D,
    at the coincident node in 2-D).
    """
    if j < 1:
        raise ValueError(f"kernel order index must be >= 1, got {j}")
    _check_rule_time(trule, t)
    density = _check_density(density, brule, trule)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if on_boundary:
        brule.find_node(x)  # raises ConfigError if x is not a node
    diff = x[None, :] - brule.points
    r2 = np.sum(diff * diff, axis=1)
    rn = np.sum(diff * brule.normals, axis=1)
    n = brule.dim
    total = 0.0
    for q in range(len(trule)):
        s = trule.lags[q]
        if s <= 0.0:
            continue
        kern = kernel_values(j, n, r2, s)
        total += trule.weights[q] * float((brule.weights * (rn / (2.0 * s)) * kern) @ density[:, q])
    return total


@dataclass(frozen=True)
class TraceBlock:
    """All boundary trace densities of one potential on a (boundary, time) grid.

    dirichlet[j] and neumann[j] hold the j-th trace and its outward-normal
    derivative; dirichlet_final[j] holds the trace at the rule's target time,
    needed by the jump term of the boundary conditions.
    """

    dirichlet: list
    neumann: list
    dirichlet_final: list


def extract_trace_block(order: KernelOrder, f: SourceField, domain: Domain,
                        vrule: VolumeRule, brule: BoundaryRule, trule: TimeRule,
                        inner_nodes: int | None = None) -> TraceBlock:
    """Vectorized trace extraction for all orders j = 0..m-1 at once.

    Equivalent to calling potential_trace / potential_trace_normal_derivative
    per (j, node, time node) but shares the Gaussian factor across kernel
    orders and boundary nodes. Each grid time tau gets its own inner rule on
    (0, tau) with the same node count as the outer rule (or inner_nodes).
    """
    m, n = order.m, order.n
    if vrule.dim != n or brule.dim != n or f.dim != n:
        raise ConfigError("dimension mismatch between rules, source, and kernel order")
    n_b = len(brule)
    n_t = len(trule)
    n_inner = inner_nodes or n_t
    diff = brule.points[:, None, :] - vrule.points[None, :, :]  # (N_b, N_v, n)
    r2 = np.sum(diff * diff, axis=2)
    rn = np.einsum("bvd,bd->bv", diff, brule.normals)
    dirichlet = [np.zeros((n_b, n_t)) for _ in range(m)]
    neumann = [np.zeros((n_b, n_t)) for _ in range(m)]

    def accumulate(tval, dir_out, neu_out):
        inner = make_time_rule(tval, n_inner)
        for p in range(len(inner)):
            s = inner.lags[p]
            if s <= 0.0:
                continue
            w = inner.weights[p]
            fw = vrule.weights * f(vrule.points, inner.taus[p])
            expo = r2 / (4.0 * s)
            gauss = np.where(expo <= UNDERFLOW_EXPONENT, np.exp(-np.minimum(expo, UNDERFLOW_EXPONENT)), 0.0)
            base = gauss / (2.0 * np.sqrt(np.pi * s)) ** n
            flux = -rn / (2.0 * s)
            for j in range(m):
                m_eff = m - j
                amp = s ** (m_eff - 1) / math.factorial(m_eff - 1)
                kern = amp * base
                dir_out[j] += w * (kern @ fw)
                neu_out[j] += w * ((flux * kern) @ fw)

    for q in range(n_t):
        cols_d = [np.zeros(n_b) for _ in range(m)]
        cols_n = [np.zeros(n_b) for _ in range(m)]
        accumulate(trule.taus[q], cols_d, cols_n)
        for j in range(m):
            dirichlet[j][:, q] = cols_d[j]
            neumann[j][:, q] = cols_n[j]

    final_d = [np.zeros(n_b) for _ in range(m)]
    final_n = [np.zeros(n_b) for _ in range(m)]
    accumulate(trule.target_time, final_d, final_n)
    return TraceBlock(dirichlet=dirichlet, neumann=neumann, dirichlet_final=final_d)
