"""Closed-form evaluation of the iterated heat-kernel family.

The order-m kernel in n space dimensions is

    E_m(r, s) = theta(s) * s^(m-1) / ((m-1)! * (2*sqrt(pi*s))^n) * exp(-|r|^2/(4s)),

the fundamental solution of the m-fold heat operator (d/dt - Lap)^m. The
1/(m-1)! normalization makes the downward recurrence

    (d/ds - Lap_r) E_m = E_{m-1}

exact and gives E_1 unit mass, so E_1(x - xi, s) -> delta_x as s -> 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .util import ConfigError

MAX_ORDER = 20

# exp(-u) underflows double precision near u = 745; skip the exp entirely.
UNDERFLOW_EXPONENT = 745.0


@dataclass(frozen=True)
class KernelOrder:
    """Iteration order m of the heat operator and space dimension n."""

    m: int
    n: int

    def __post_init__(self):
        if not isinstance(self.m, int) or self.m < 1:
            raise ConfigError(f"kernel order m must be a positive integer, got {self.m!r}")
        if self.m > MAX_ORDER:
            raise ConfigError(f"kernel order m={self.m} exceeds the supported cap {MAX_ORDER}")
        if self.n not in (1, 2):
            raise ConfigError(f"space dimension n must be 1 or 2, got {self.n!r}")


def _factorial(k: int) -> float:
    # m <= 20 keeps this exact in the integer domain.
    return float(math.factorial(k))


def _as_r2(r, n: int):
    """Squared length of a displacement; accepts scalars (n=1) or length-n vectors."""
    arr = np.asarray(r, dtype=float)
    if arr.ndim == 0:
        if n != 1:
            raise ConfigError(f"scalar displacement given for n={n}")
        return arr * arr
    if arr.shape[-1] != n:
        raise ConfigError(f"displacement has {arr.shape[-1]} components, expected {n}")
    return np.sum(arr * arr, axis=-1)


def kernel_values(m: int, n: int, r2, s):
    """Vectorized kernel evaluation from squared distances r2 and time lags s.

    Broadcasts r2 against s. Returns exactly 0 where s <= 0 (Heaviside gate)
    and where the Gaussian exponent is below double-precision underflow.
    """
    r2 = np.asarray(r2, dtype=float)
    s = np.asarray(s, dtype=float)
    r2b, sb = np.broadcast_arrays(r2, s)
    out = np.zeros(r2b.shape, dtype=float)
    live = sb > 0.0
    if np.any(live):
        sp = sb[live]
        expo = r2b[live] / (4.0 * sp)
        ok = expo <= UNDERFLOW_EXPONENT
        if np.any(ok):
            spo = sp[ok]
            amp = spo ** (m - 1) / (_factorial(m - 1) * (2.0 * np.sqrt(np.pi * spo)) ** n)
            vals = np.zeros(sp.shape)
            vals[ok] = amp * np.exp(-expo[ok])
            out[live] = vals
    return out


def iterated_kernel(order: KernelOrder, r, s) -> float:
    """E_{m,n} at displacement r and time lag s. Total: any real input is accepted."""
    r2 = _as_r2(r, order.n)
    return float(kernel_values(order.m, order.n, r2, s))


def kernel_gradient(order: KernelOrder, r, s):
    """Gradient of E_{m,n} with respect to the displacement: -r/(2s) * E.

    Requires s > 0; the zero branch has no useful gradient.
    """
    sf = float(s)
    if sf <= 0.0:
        raise ValueError(f"kernel gradient requires s > 0, got s={sf}")
    arr = np.asarray(r, dtype=float)
    scalar_in = arr.ndim == 0
    vec = np.atleast_1d(arr)
    val = kernel_values(order.m, order.n, float(np.dot(vec, vec)), sf)
    grad = -vec / (2.0 * sf) * float(val)
    if scalar_in:
        return float(grad[0])
    return grad


def kernel_normal_derivative(order: KernelOrder, r, s, normal) -> float:
    """Exterior-normal derivative in the source point: (r . n)/(2s) * E_{m,n}(r, s).

    r = x - xi; differentiating in xi flips the gradient sign. normal must be
    a unit vector.
    """
    sf = float(s)
    if sf <= 0.0:
        raise ValueError(f"normal derivative requires s > 0, got s={sf}")
    vec = np.atleast_1d(np.asarray(r, dtype=float))
    nrm = np.atleast_1d(np.asarray(normal, dtype=float))
    if vec.shape != nrm.shape:
        raise ConfigError(f"displacement shape {vec.shape} does not match normal shape {nrm.shape}")
    if abs(float(np.dot(nrm, nrm)) - 1.0) > 1e-8:
        raise ConfigError(f"normal must be a unit vector, got |n|^2 = {float(np.dot(nrm, nrm))}")
    val = kernel_values(order.m, order.n, float(np.dot(vec, vec)), sf)
    return float(np.dot(vec, nrm)) / (2.0 * sf) * float(val)


def adjoint_power(k: int, order: KernelOrder, r, s) -> float:
    """k-th power of the adjoint heat operator applied to E_{m,n}.

    Each application lowers the order by one, so the result is E_{m-k,n} for
    k < m and identically 0 for k >= m (when s > 0).
    """
    if k < 0:
        raise ValueError(f"adjoint power requires k >= 0, got {k}")
    if k >= order.m:
        return 0.0
    return iterated_kernel(KernelOrder(order.m - k, order.n), r, s)
