"""Scenario files: strict JSON schema, validation, and bundled scenarios.

A scenario pins everything a run needs: the kernel order, domain, horizon,
analytic source and boundary-data families, quadrature resolutions,
tolerances, and the probe seed. Unknown fields are rejected so that a typo in
a tolerance name fails loudly instead of silently using a default.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .geometry import Disk, Domain, Interval, Rectangle
from .kernel import KernelOrder
from .sources import (
    BoundaryData,
    SourceField,
    gaussian_bump_source,
    manufactured_source,
    named_boundary,
    ramp_boundary,
    zero_boundary,
    zero_source,
)
from .util import ConfigError

SCHEMA_VERSION = 1

DEFAULT_TOLERANCES = {
    "bc_residual": 1e-3,
    "interior_identity": 1e-3,
    "pde_residual": 1e-3,
    "ic_slope_factor": 0.9,
    "oracle_compare": 1e-3,
    "solve_linf": 1e-3,
    "min_refinement_order": 1.0,
}


@dataclass(frozen=True)
class Resolutions:
    volume: int
    boundary: int
    time: int
    oracle_nx: int = 200
    oracle_nt: int = 200

    def refined(self, factor: int = 2) -> "Resolutions":
        """One refinement level: denser time rule (and boundary rule in 2-D)."""
        return Resolutions(volume=self.volume, boundary=self.boundary * factor,
                           time=self.time * factor, oracle_nx=self.oracle_nx,
                           oracle_nt=self.oracle_nt)


@dataclass(frozen=True)
class Scenario:
    name: str
    order: KernelOrder
    domain: Domain
    horizon: float
    source: SourceField
    boundary_data: BoundaryData
    resolutions: Resolutions
    tolerances: dict
    probe_seed: int
    probe_count: int
    enable_2d_boundary: bool
    raw: dict = field(repr=False, default_factory=dict)

    def ic_probe(self):
        """Interior probe for the initial-condition slope: the source center
        when known, otherwise the domain center."""
        if self.source.support_hint is not None:
            lo, hi = self.source.support_hint
            return np.array([(a + b) / 2.0 for a, b in zip(lo, hi)])
        return _domain_center(self.domain)

    def fd_step_x(self) -> float:
        """Finite-difference space step: a fraction of the sharpest source
        scale, clamped to keep fourth-order truncation and node-level noise
        both small."""
        if self.source.support_hint is not None:
            lo, hi = self.source.support_hint
            width = min(h - l for l, h in zip(lo, hi)) / 8.0  # bump width from +-4w hint
            return float(np.clip(width / 3.0, 0.02, 0.05))
        return 0.02 * _domain_diameter(self.domain)

    def probe_points(self) -> tuple[np.ndarray, np.ndarray]:
        """Seeded interior space-time probes; returns (points, times)."""
        rng = np.random.default_rng(self.probe_seed)
        margin = 0.15
        times = self.horizon * (0.3 + 0.7 * rng.random(self.probe_count))
        if isinstance(self.domain, Interval):
            L = self.domain.length
            pts = self.domain.a + L * (margin + (1 - 2 * margin) * rng.random(self.probe_count))
            return pts[:, None], times
        if isinstance(self.domain, Rectangle):
            fx = margin + (1 - 2 * margin) * rng.random(self.probe_count)
            fy = margin + (1 - 2 * margin) * rng.random(self.probe_count)
            pts = np.column_stack([
                self.domain.ax + fx * (self.domain.bx - self.domain.ax),
                self.domain.ay + fy * (self.domain.by - self.domain.ay),
            ])
            return pts, times
        raise ConfigError(f"probe generation unsupported for {self.domain!r}")


def _domain_center(domain: Domain) -> np.ndarray:
    if isinstance(domain, Interval):
        return np.array([(domain.a + domain.b) / 2.0])
    if isinstance(domain, Rectangle):
        return np.array([(domain.ax + domain.bx) / 2.0, (domain.ay + domain.by) / 2.0])
    if isinstance(domain, Disk):
        return np.asarray(domain.center, dtype=float)
    raise ConfigError(f"unsupported domain {domain!r}")


def _domain_diameter(domain: Domain) -> float:
    if isinstance(domain, Interval):
        return domain.length
    if isinstance(domain, Rectangle):
        return float(np.hypot(domain.bx - domain.ax, domain.by - domain.ay))
    if isinstance(domain, Disk):
        return 2.0 * domain.radius
    raise ConfigError(f"unsupported domain {domain!r}")


def _require_keys(obj: dict, allowed: set, required: set, where: str):
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(f"unknown field(s) {sorted(unknown)} in {where}")
    missing = required - set(obj)
    if missing:
        raise ConfigError(f"missing field(s) {sorted(missing)} in {where}")


def _parse_domain(spec: dict) -> Domain:
    kind = spec.get("type")
    if kind == "interval":
        _require_keys(spec, {"type", "a", "b"}, {"type", "a", "b"}, "domain")
        return Interval(float(spec["a"]), float(spec["b"]))
    if kind == "rectangle":
        _require_keys(spec, {"type", "ax", "bx", "ay", "by"},
                      {"type", "ax", "bx", "ay", "by"}, "domain")
        return Rectangle(float(spec["ax"]), float(spec["bx"]),
                         float(spec["ay"]), float(spec["by"]))
    if kind == "disk":
        _require_keys(spec, {"type", "center", "radius"}, {"type", "center", "radius"}, "domain")
        return Disk(tuple(map(float, spec["center"])), float(spec["radius"]))
    raise ConfigError(f"unknown domain type {kind!r}")


def _parse_source(spec: dict, domain: Domain, dim: int) -> SourceField:
    family = spec.get("family")
    if family == "zero":
        _require_keys(spec, {"family"}, {"family"}, "source")
        return zero_source(dim)
    if family == "gaussian_bump":
        _require_keys(spec, {"family", "center", "width", "amplitude", "time_profile"},
                      {"family", "center", "width", "amplitude"}, "source")
        center = np.atleast_1d(np.asarray(spec["center"], dtype=float))
        width = float(spec["width"])
        src = gaussian_bump_source(center, width, float(spec["amplitude"]), dim,
                                   time_profile=spec.get("time_profile"))
        lo, hi = src.support_hint
        for corner in _box_corners(lo, hi):
            if not domain.contains(np.asarray(corner)):
                raise ConfigError(
                    f"bump support corner {corner} (center +- 4*width) leaves the domain"
                )
        return src
    if family == "manufactured":
        _require_keys(spec, {"family"}, {"family"}, "source")
        return manufactured_source(domain)
    raise ConfigError(f"unknown source family {family!r}")


def _box_corners(lo, hi):
    if len(lo) == 1:
        return [(lo[0],), (hi[0],)]
    return [(lo[0], lo[1]), (lo[0], hi[1]), (hi[0], lo[1]), (hi[0], hi[1])]


def _parse_boundary(spec: dict, dim: int) -> BoundaryData:
    family = spec.get("family")
    if family == "zero":
        _require_keys(spec, {"family"}, {"family"}, "boundary_data")
        return zero_boundary(dim)
    if family == "ramp":
        _require_keys(spec, {"family", "amplitude", "rise_time"},
                      {"family", "amplitude", "rise_time"}, "boundary_data")
        return ramp_boundary(float(spec["amplitude"]), float(spec["rise_time"]), dim)
    if family == "named":
        _require_keys(spec, {"family", "id"}, {"family", "id"}, "boundary_data")
        return named_boundary(str(spec["id"]), dim)
    raise ConfigError(f"unknown boundary data family {family!r}")


TOP_LEVEL_KEYS = {
    "schema_version", "name", "order", "domain", "horizon", "source",
    "boundary_data", "resolutions", "tolerances", "probes", "enable_2d_boundary",
}


def parse_scenario(doc: dict) -> Scenario:
    if not isinstance(doc, dict):
        raise ConfigError("scenario document must be a JSON object")
    _require_keys(doc, TOP_LEVEL_KEYS,
                  {"schema_version", "name", "order", "domain", "horizon",
                   "source", "resolutions"}, "scenario")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise ConfigError(
            f"unsupported schema_version {doc['schema_version']!r}, expected {SCHEMA_VERSION}"
        )
    order_spec = doc["order"]
    _require_keys(order_spec, {"m", "n"}, {"m", "n"}, "order")
    order = KernelOrder(int(order_spec["m"]), int(order_spec["n"]))
    domain = _parse_domain(doc["domain"])
    if domain.dim != order.n:
        raise ConfigError(f"domain dimension {domain.dim} does not match order n={order.n}")
    horizon = float(doc["horizon"])
    if horizon <= 0:
        raise ConfigError(f"horizon must be positive, got {horizon}")
    source = _parse_source(doc["source"], domain, order.n)
    boundary = _parse_boundary(doc.get("boundary_data", {"family": "zero"}), order.n)
    res_spec = doc["resolutions"]
    _require_keys(res_spec, {"volume", "boundary", "time", "oracle_nx", "oracle_nt"},
                  {"volume", "boundary", "time"}, "resolutions")
    resolutions = Resolutions(
        volume=int(res_spec["volume"]),
        boundary=int(res_spec["boundary"]),
        time=int(res_spec["time"]),
        oracle_nx=int(res_spec.get("oracle_nx", 200)),
        oracle_nt=int(res_spec.get("oracle_nt", 200)),
    )
    tolerances = dict(DEFAULT_TOLERANCES)
    tol_spec = doc.get("tolerances", {})
    _require_keys(tol_spec, set(DEFAULT_TOLERANCES), set(), "tolerances")
    tolerances.update({k: float(v) for k, v in tol_spec.items()})
    probes = doc.get("probes", {})
    _require_keys(probes, {"seed", "count"}, set(), "probes")
    return Scenario(
        name=str(doc["name"]),
        order=order,
        domain=domain,
        horizon=horizon,
        source=source,
        boundary_data=boundary,
        resolutions=resolutions,
        tolerances=tolerances,
        probe_seed=int(probes.get("seed", 20260810)),
        probe_count=int(probes.get("count", 10)),
        enable_2d_boundary=bool(doc.get("enable_2d_boundary", False)),
        raw=doc,
    )


def load_scenario(path_or_name: str | Path) -> Scenario:
    """Load a scenario from a file path or a bundled scenario name."""
    path = Path(path_or_name)
    if path.exists():
        try:
            doc = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"scenario file {path} is not valid JSON: {exc}") from exc
        return parse_scenario(doc)
    name = str(path_or_name)
    if name in bundled_scenarios():
        doc = json.loads(resources.files("heatbc.scenarios").joinpath(f"{name}.json").read_text())
        return parse_scenario(doc)
    raise ConfigError(
        f"scenario {path_or_name!r} is neither a readable file nor a bundled name "
        f"(bundled: {bundled_scenarios()})"
    )


def bundled_scenarios() -> list[str]:
    files = resources.files("heatbc.scenarios")
    return sorted(p.name[:-5] for p in files.iterdir() if p.name.endswith(".json"))
