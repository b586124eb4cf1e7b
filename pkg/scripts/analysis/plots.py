"""
PNG figures for exported trajectories.

Both functions take the tables built in scripts.analysis.profiles and
return whether the file was written.
"""

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from scripts.common.file_utils import safe_save_plot


def plot_radial_profiles(columns, filepath, title="Radial profiles"):
    """u(r) and K(r) along theta = 0, one line per snapshot."""
    u_cols = [c for c in columns.columns if c.startswith("u@")]
    colors = plt.cm.viridis(np.linspace(0.0, 1.0, max(len(u_cols), 1)))

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(14, 5))
    for color, u_col in zip(colors, u_cols):
        t = float(u_col[2:])
        ax1.plot(columns["r"], columns[u_col], color=color, linewidth=1.5, label=f"t = {t:g}")
        ax2.plot(columns["r"], columns["K@" + u_col[2:]], color=color, linewidth=1.5, label=f"t = {t:g}")

    ax1.set_xlabel("r", fontsize=12, fontweight="bold")
    ax1.set_ylabel("conformal factor u", fontsize=12, fontweight="bold")
    ax1.grid(True, alpha=0.3)
    ax2.set_xlabel("r", fontsize=12, fontweight="bold")
    ax2.set_ylabel("Gauss curvature K", fontsize=12, fontweight="bold")
    ax2.grid(True, alpha=0.3)
    if len(u_cols) <= 12:
        ax1.legend(fontsize=9, loc="best")
    fig.suptitle(title, fontsize=14, fontweight="bold")
    plt.tight_layout()
    return safe_save_plot(filepath, "radial profile plot")


def plot_curvature_series(series, filepath, title="Curvature over time"):
    """Extremes of K against t with the -1/(2t) and -1/(2t + 1) reference curves."""
    fig, ax = plt.subplots(1, 1, figsize=(10, 6))
    ax.plot(series["t"], series["max_K"], "o-", color="steelblue", linewidth=2, label="max K")
    ax.plot(series["t"], series["min_K"], "s-", color="coral", linewidth=2, label="min K")

    t = series["t"].to_numpy()
    t_pos = np.linspace(max(t[t > 0].min(), 1e-3) if np.any(t > 0) else 1e-3, max(t.max(), 1e-3), 200)
    ax.plot(t_pos, -1.0 / (2.0 * t_pos), "--", color="black", linewidth=1, label="-1/(2t)")
    ax.plot(t_pos, -1.0 / (2.0 * t_pos + 1.0), ":", color="black", linewidth=1, label="-1/(2t+1)")

    ax.set_xlabel("t", fontsize=12, fontweight="bold")
    ax.set_ylabel("K on the check domain", fontsize=12, fontweight="bold")
    ax.set_title(title, fontsize=14, fontweight="bold")
    ax.legend(fontsize=11)
    ax.grid(True, alpha=0.3)
    plt.tight_layout()
    return safe_save_plot(filepath, "curvature series plot")
