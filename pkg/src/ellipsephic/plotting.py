"""Figure rendering for sweep and report output. Headless backend only."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def render_sweep_figure(rows: list[dict], path, title: str) -> None:
    """Band plot of alpha estimates against the level t.

    rows: dicts with keys t, alpha_point, alpha_lower, alpha_upper, sorted
    ascending in t (one generator, one n).
    """
    ts = [row["t"] for row in rows]
    points = [row["alpha_point"] for row in rows]
    lows = [row["alpha_lower"] for row in rows]
    highs = [row["alpha_upper"] for row in rows]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.fill_between(ts, lows, highs, alpha=0.25, label="band")
    ax.plot(ts, points, marker="o", label="alpha_point")
    ax.set_xlabel("level t")
    ax.set_ylabel("alpha")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_report_figure(report: dict, path) -> None:
    """Summary bars: exponent estimate with its band, trivial cap, comparison."""
    kappa = report["kappa"]
    labels = ["kappa estimate", "trivial cap", "comparison"]
    values = [kappa["alpha_point"], report["trivial_cap"], report["comparison_exponent"]]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    bars = ax.bar(labels, values, color=["tab:blue", "tab:gray", "tab:orange"])
    if not kappa["exact"]:
        half = kappa["alpha_upper"] - kappa["alpha_point"]
        ax.errorbar(
            [0], [kappa["alpha_point"]], yerr=[half], fmt="none",
            ecolor="black", capsize=6,
        )
    for bar, value in zip(bars, values):
        ax.text(
            bar.get_x() + bar.get_width() / 2, value, f"{value:.4f}",
            ha="center", va="bottom", fontsize=9,
        )
    ax.set_ylabel("exponent")
    ax.set_title(
        f"{report['generator']}  n={report['n']}  dim={report['dimension']:.4f}"
    )
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
