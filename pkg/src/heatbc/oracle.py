"""Independent verification paths.

Three oracles, deliberately simple and separate from the layer-potential
machinery: an m-fold cascade of first-order potentials (the semigroup
construction of the order-m potential), a Crank-Nicolson bounded-domain
solver with Dirichlet data, and finite-difference application of the
iterated heat operator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .geometry import Domain, Interval, Rectangle
from .kernel import KernelOrder, kernel_values
from .potentials import volume_potential_many
from .quadrature import VolumeRule, interval_rule, make_time_rule
from .sources import SourceField
from .util import ConfigError, NumericalError

TAIL_PAD_FACTOR = 8.0  # box padding in units of sqrt(t); Gaussian tail < 1e-14


def _padded_axis(a: float, b: float, pad: float, core_nodes: int, wing_nodes: int):
    """Composite Gauss-Legendre axis rule: fine core over [a, b], coarser wings."""
    xs, ws = [], []
    for lo, hi, n in ((a - pad, a, wing_nodes), (a, b, core_nodes), (b, b + pad, wing_nodes)):
        x, w = interval_rule(lo, hi, n)
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


def _box_rule(domain: Domain, pad: float, core_nodes: int, wing_nodes: int) -> VolumeRule:
    if isinstance(domain, Interval):
        x, w = _padded_axis(domain.a, domain.b, pad, core_nodes, wing_nodes)
        return VolumeRule(x[:, None], w)
    if isinstance(domain, Rectangle):
        x, wx = _padded_axis(domain.ax, domain.bx, pad, core_nodes, wing_nodes)
        y, wy = _padded_axis(domain.ay, domain.by, pad, core_nodes, wing_nodes)
        xx, yy = np.meshgrid(x, y, indexing="ij")
        return VolumeRule(np.column_stack([xx.ravel(), yy.ravel()]),
                          np.outer(wx, wy).ravel())
    raise ConfigError(f"cascade oracle supports Interval and Rectangle, got {domain!r}")


def cascade_volume_potential(m: int, f: SourceField, domain: Domain, enlargement: float,
                             vrule: VolumeRule, time_nodes: int, x, t: float,
                             core_nodes: int = 96, wing_nodes: int = 32) -> float:
    """Order-m potential built as m composed first-order potentials.

    Composing first-order potentials reproduces the order-m kernel through
    the Chapman-Kolmogorov identity, so this construction shares no code with
    the higher-order kernel evaluation it checks. Stages after the first
    integrate over a box enlarging the domain by `enlargement`, which must
    cover the Gaussian spill-over: at least TAIL_PAD_FACTOR * sqrt(t).
    """
    if m < 1:
        raise ConfigError(f"cascade order must be >= 1, got {m}")
    if enlargement < TAIL_PAD_FACTOR * np.sqrt(t) and m > 1:
        raise ConfigError(
            f"enlargement {enlargement} leaves Gaussian tails above 1e-8 of the "
            f"result scale; need >= {TAIL_PAD_FACTOR * np.sqrt(t):.3g}"
        )
    order1 = KernelOrder(1, f.dim)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if m == 1:
        trule = make_time_rule(t, time_nodes)
        return float(volume_potential_many(order1, f, domain, vrule, trule,
                                           x[None, :], t)[0])
    box = _box_rule(domain, enlargement, core_nodes, wing_nodes)
    cache: dict[tuple[int, float], np.ndarray] = {}

    def heat_matvec(targets: np.ndarray, s: float, vec: np.ndarray) -> np.ndarray:
        # sum_i E_1(target - node_i, s) * vec_i, chunked to bound memory
        out = np.empty(targets.shape[0])
        chunk = max(1, int(2**22 // max(1, len(box))))
        for start in range(0, targets.shape[0], chunk):
            block = targets[start:start + chunk]
            diff = block[:, None, :] - box.points[None, :, :]
            r2 = np.sum(diff * diff, axis=2)
            out[start:start + chunk] = kernel_values(1, f.dim, r2, s) @ vec
        return out

    def stage_on_box(j: int, tau: float) -> np.ndarray:
        key = (j, tau)
        if key in cache:
            return cache[key]
        trule = make_time_rule(tau, time_nodes)
        if j == 1:
            vals = volume_potential_many(order1, f, domain, vrule, trule, box.points, tau)
        else:
            vals = np.zeros(len(box))
            for q in range(len(trule)):
                prev = stage_on_box(j - 1, float(trule.taus[q]))
                vals += trule.weights[q] * heat_matvec(box.points, trule.lags[q],
                                                       box.weights * prev)
        cache[key] = vals
        return vals

    trule = make_time_rule(t, time_nodes)
    total = 0.0
    for q in range(len(trule)):
        prev = stage_on_box(m - 1, float(trule.taus[q]))
        total += trule.weights[q] * float(heat_matvec(x[None, :], trule.lags[q],
                                                      box.weights * prev)[0])
    return total


@dataclass(frozen=True)
class GridSolution:
    """Finite-difference solution on a uniform space-time grid."""

    domain: Domain
    axes: tuple  # (xs,) or (xs, ys)
    ts: np.ndarray
    values: np.ndarray  # (nt+1, nx+1) or (nt+1, nx+1, ny+1)
    boundary_note: str = ""

    def sample(self, point, t: float) -> float:
        """Value at a grid node; the point and time must lie on the grid."""
        it = _grid_index(self.ts, t, "time")
        if len(self.axes) == 1:
            ix = _grid_index(self.axes[0], np.atleast_1d(point)[0], "x")
            return float(self.values[it, ix])
        p = np.atleast_1d(point)
        ix = _grid_index(self.axes[0], p[0], "x")
        iy = _grid_index(self.axes[1], p[1], "y")
        return float(self.values[it, ix, iy])


def _grid_index(axis: np.ndarray, value: float, label: str) -> int:
    idx = int(np.argmin(np.abs(axis - value)))
    step = axis[1] - axis[0] if len(axis) > 1 else 1.0
    if abs(axis[idx] - value) > 1e-9 * max(1.0, abs(step)) + 1e-12:
        raise ConfigError(f"{label}={value} is not a grid node")
    return idx


def _tridiag_banded(lower: float, diag: float, upper: float, size: int) -> np.ndarray:
    ab = np.zeros((3, size))
    ab[0, 1:] = upper
    ab[1, :] = diag
    ab[2, :-1] = lower
    return ab


def crank_nicolson_m1(f, dirichlet_data, domain: Domain, nx: int, nt: int,
                      T: float) -> GridSolution:
    """Second-order implicit solve of the first-order problem with zero
    initial data and Dirichlet boundary values.

    f and dirichlet_data are callables (points (N, n), t) -> (N,). Rectangle
    uses Peaceman-Rachford alternating-direction sweeps so every linear solve
    stays tridiagonal.
    """
    if nx < 16 or nt < 16:
        raise ConfigError(f"grid too coarse: nx={nx}, nt={nt} (need >= 16)")
    ts = np.linspace(0.0, T, nt + 1)
    dt = T / nt
    if isinstance(domain, Interval):
        xs = np.linspace(domain.a, domain.b, nx + 1)
        h = (domain.b - domain.a) / nx
        lam = dt / (2.0 * h * h)
        pts = xs[:, None]
        u = np.zeros((nt + 1, nx + 1))
        ab = _tridiag_banded(-lam, 1.0 + 2.0 * lam, -lam, nx - 1)
        for k in range(nt):
            t0, t1 = ts[k], ts[k + 1]
            fk = f(pts, t0)
            fk1 = f(pts, t1)
            interior = slice(1, nx)
            rhs = (u[k, interior]
                   + lam * (u[k, 2:] - 2.0 * u[k, interior] + u[k, :-2])
                   + 0.5 * dt * (fk[interior] + fk1[interior]))
            ga1 = float(dirichlet_data(np.array([[domain.a]]), t1)[0])
            gb1 = float(dirichlet_data(np.array([[domain.b]]), t1)[0])
            rhs[0] += lam * ga1
            rhs[-1] += lam * gb1
            sol = solve_banded((1, 1), ab, rhs)
            if not np.all(np.isfinite(sol)):
                raise NumericalError("tridiagonal solve produced non-finite values")
            u[k + 1, 0] = ga1
            u[k + 1, nx] = gb1
            u[k + 1, interior] = sol
        return GridSolution(domain, (xs,), ts, u, boundary_note="dirichlet")
    if isinstance(domain, Rectangle):
        return _adi_rectangle(f, dirichlet_data, domain, nx, nt, T)
    raise ConfigError(f"Crank-Nicolson oracle supports Interval and Rectangle, got {domain!r}")


def _adi_rectangle(f, g, domain: Rectangle, nx: int, nt: int, T: float) -> GridSolution:
    xs = np.linspace(domain.ax, domain.bx, nx + 1)
    ys = np.linspace(domain.ay, domain.by, nx + 1)
    hx = (domain.bx - domain.ax) / nx
    hy = (domain.by - domain.ay) / nx
    ts = np.linspace(0.0, T, nt + 1)
    dt = T / nt
    lx = dt / (2.0 * hx * hx)
    ly = dt / (2.0 * hy * hy)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    pts = np.column_stack([X.ravel(), Y.ravel()])
    u = np.zeros((nt + 1, nx + 1, nx + 1))

    def grid_eval(fn, t):
        return fn(pts, t).reshape(nx + 1, nx + 1)

    # Boundary data is only ever read on the four edges; evaluate it there.
    edge_mask = np.zeros((nx + 1, nx + 1), dtype=bool)
    edge_mask[0, :] = edge_mask[nx, :] = edge_mask[:, 0] = edge_mask[:, nx] = True
    edge_pts = pts[edge_mask.ravel()]

    def boundary_eval(fn, t):
        out = np.zeros((nx + 1, nx + 1))
        out[edge_mask] = fn(edge_pts, t)
        return out

    ab_x = _tridiag_banded(-lx, 1.0 + 2.0 * lx, -lx, nx - 1)
    ab_y = _tridiag_banded(-ly, 1.0 + 2.0 * ly, -ly, nx - 1)
    inner = slice(1, nx)
    for k in range(nt):
        t0, t1 = ts[k], ts[k + 1]
        th = 0.5 * (t0 + t1)
        fh = grid_eval(f, th)
        g1 = boundary_eval(g, t1)
        gh = 0.5 * (boundary_eval(g, t0) + g1)
        uk = u[k]
        # half step: implicit in x, explicit in y
        star = np.empty_like(uk)
        star[0, :] = gh[0, :]
        star[nx, :] = gh[nx, :]
        star[:, 0] = gh[:, 0]
        star[:, nx] = gh[:, nx]
        dyy = uk[inner, 2:] - 2.0 * uk[inner, inner] + uk[inner, :-2]
        rhs = uk[inner, inner] + ly * dyy + 0.5 * dt * fh[inner, inner]
        rhs[0, :] += lx * star[0, inner]
        rhs[-1, :] += lx * star[nx, inner]
        star[inner, inner] = solve_banded((1, 1), ab_x, rhs)
        # half step: implicit in y, explicit in x
        new = np.empty_like(uk)
        new[0, :] = g1[0, :]
        new[nx, :] = g1[nx, :]
        new[:, 0] = g1[:, 0]
        new[:, nx] = g1[:, nx]
        dxx = star[2:, inner] - 2.0 * star[inner, inner] + star[:-2, inner]
        rhs = star[inner, inner] + lx * dxx + 0.5 * dt * fh[inner, inner]
        rhs[:, 0] += ly * new[inner, 0]
        rhs[:, -1] += ly * new[inner, nx]
        new[inner, inner] = solve_banded((1, 1), ab_y, rhs.T).T
        if not np.all(np.isfinite(new)):
            raise NumericalError("ADI sweep produced non-finite values")
        u[k + 1] = new
    return GridSolution(domain, (xs, ys), ts, u, boundary_note="dirichlet")


def fd_heat_operator_residual(u_sampler, m: int, x, t: float, h_x: float, h_t: float,
                              accuracy: int = 4) -> float:
    """m-fold heat operator applied to a sampled field by nested central
    differences (fourth-order stencils by default).

    The caller compares the returned value with the expected right-hand side.
    The full stencil reaches m * 2 * h_t backward in time, which must stay
    positive.
    """
    if m < 1:
        raise ValueError(f"operator power must be >= 1, got {m}")
    if accuracy not in (2, 4):
        raise ValueError(f"accuracy must be 2 or 4, got {accuracy}")
    reach = 2 if accuracy == 4 else 1
    if t - m * reach * h_t <= 0.0:
        raise ValueError(
            f"time stencil leaves the valid region: t={t}, m={m}, h_t={h_t}"
        )
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n = x.shape[0]
    cache: dict[tuple, float] = {}

    def base(point: np.ndarray, tval: float) -> float:
        key = (*point, tval)
        if key not in cache:
            cache[key] = float(u_sampler(point, tval))
        return cache[key]

    def heat_op(fn):
        if accuracy == 4:
            def applied(point, tval):
                dt_val = (-fn(point, tval + 2 * h_t) + 8.0 * fn(point, tval + h_t)
                          - 8.0 * fn(point, tval - h_t) + fn(point, tval - 2 * h_t)) / (12.0 * h_t)
                lap = 0.0
                for d in range(n):
                    e = np.zeros(n)
                    e[d] = h_x
                    lap += (-fn(point + 2 * e, tval) + 16.0 * fn(point + e, tval)
                            - 30.0 * fn(point, tval) + 16.0 * fn(point - e, tval)
                            - fn(point - 2 * e, tval)) / (12.0 * h_x * h_x)
                return dt_val - lap
        else:
            def applied(point, tval):
                dt_val = (fn(point, tval + h_t) - fn(point, tval - h_t)) / (2.0 * h_t)
                lap = 0.0
                for d in range(n):
                    e = np.zeros(n)
                    e[d] = h_x
                    lap += (fn(point + e, tval) - 2.0 * fn(point, tval)
                            + fn(point - e, tval)) / (h_x * h_x)
                return dt_val - lap
        return applied

    fn = base
    for _ in range(m):
        fn = heat_op(fn)
    return float(fn(x, t))
