"""Figure rendering for the CLI report paths.

Figures are written as PNG files next to the CSV tables. Everything here is
presentation only; the JSON/CSV outputs remain the machine interface.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

RC = {
    "figure.figsize": (6.4, 4.2),
    "figure.dpi": 130,
    "savefig.dpi": 130,
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.35,
    "lines.linewidth": 1.4,
}


def _save(fig, outdir: Path, name: str) -> Path:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / name
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
    return path


def render_verify_figures(level_reports: list, outdir: Path) -> list[Path]:
    """Residuals vs time per condition index, and the refinement trend."""
    paths = []
    with plt.rc_context(RC):
        base = level_reports[0]
        fig, ax = plt.subplots()
        ts = np.asarray(base.sample_times)
        for entry in base.per_k:
            k = entry["k"]
            scale = entry["scale"] or 1.0
            series = np.zeros(len(ts))
            for row in base.boundary_values:
                if row["k"] == k:
                    it = int(np.argmin(np.abs(ts - row["t"])))
                    series[it] = max(series[it], abs(row["residual"]) / scale)
            ax.semilogy(ts, np.maximum(series, 1e-17), marker="o", label=f"k = {k}")
        ax.set_xlabel("t")
        ax.set_ylabel("max normalized boundary residual")
        ax.set_title("Transparent-condition residuals")
        ax.legend()
        paths.append(_save(fig, outdir, "bc_residuals.png"))

        if len(level_reports) > 1:
            fig, ax = plt.subplots()
            nodes = [rep.resolutions["time"] for rep in level_reports]
            worst = [max(rep.max_normalized_bc(), 1e-17) for rep in level_reports]
            interior = [max(rep.interior_normalized, 1e-17) for rep in level_reports]
            ax.loglog(nodes, worst, marker="o", label="boundary conditions")
            ax.loglog(nodes, interior, marker="s", label="interior identity")
            ax.set_xlabel("time-rule nodes")
            ax.set_ylabel("max normalized residual")
            ax.set_title("Residuals under refinement")
            ax.legend()
            paths.append(_save(fig, outdir, "refinement.png"))
    return paths


def render_solve_figures(points: np.ndarray, u_solver: np.ndarray, u_oracle: np.ndarray,
                         t: float, outdir: Path) -> list[Path]:
    paths = []
    with plt.rc_context(RC):
        if points.shape[1] == 1:
            fig, ax = plt.subplots()
            xs = points[:, 0]
            ax.plot(xs, u_solver, marker="o", label="boundary-term solver")
            ax.plot(xs, u_oracle, marker="x", linestyle="--", label="Crank-Nicolson")
            ax.set_xlabel("x")
            ax.set_ylabel(f"u(x, t={t:g})")
            ax.set_title("Solution at the probe grid")
            ax.legend()
            paths.append(_save(fig, outdir, "solution.png"))
        fig, ax = plt.subplots()
        diff = np.abs(u_solver - u_oracle)
        ax.semilogy(np.arange(len(diff)), np.maximum(diff, 1e-17), marker="o")
        ax.set_xlabel("probe index")
        ax.set_ylabel("|solver - oracle|")
        ax.set_title("Probe-wise disagreement")
        paths.append(_save(fig, outdir, "solve_diff.png"))
    return paths


def render_compare_figures(rel_diffs: np.ndarray, outdir: Path) -> list[Path]:
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        ax.semilogy(np.arange(len(rel_diffs)), np.maximum(rel_diffs, 1e-17), marker="o")
        ax.set_xlabel("probe index")
        ax.set_ylabel("|direct - cascade| / scale")
        ax.set_title("Direct vs cascade potential")
        return [_save(fig, outdir, "oracle_compare.png")]
