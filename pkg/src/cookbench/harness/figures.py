"""Chart + CSV export for evaluation reports, preferences, behavior, and curves.

Every chart writes a CSV with the exact plotted values next to the image.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from cookbench.evaluation.crossplay import EvalReport, mean_ci95
from cookbench.evaluation.preferences import PreferenceMatrix


def export_crossplay_bars(reports: dict[str, EvalReport], out_dir, name: str = "crossplay") -> dict:
    """Bar chart of pooled mean deliveries per method with seed-sd error bars."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    methods = list(reports)
    means = [reports[m].aggregate()["pooled"]["mean"] for m in methods]
    sds = [reports[m].aggregate()["pooled"]["sd"] for m in methods]

    csv_path = out_dir / f"{name}.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["method", "mean_deliveries", "sd"])
        for m, mu, sd in zip(methods, means, sds):
            w.writerow([m, f"{mu:.6f}", f"{sd:.6f}"])

    fig, ax = plt.subplots(figsize=(1.2 + 0.9 * len(methods), 3.2))
    ax.bar(methods, means, yerr=sds, capsize=4, color="#4878cf")
    ax.set_ylabel("deliveries per episode")
    ax.set_title(name)
    fig.tight_layout()
    png_path = out_dir / f"{name}.png"
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return {"csv": str(csv_path), "png": str(png_path), "methods": methods, "means": means, "sds": sds}


def export_human_bars(deliveries_by_method: dict[str, list[float]], out_dir, name: str = "human_play") -> dict:
    """Bar chart with 95% CI error bars over episodes (live-play analysis)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    methods = list(deliveries_by_method)
    means, cis = [], []
    for m in methods:
        mu, ci = mean_ci95(deliveries_by_method[m])
        means.append(mu)
        cis.append(ci)
    csv_path = out_dir / f"{name}.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["method", "mean_deliveries", "ci95", "episodes"])
        for m, mu, ci in zip(methods, means, cis):
            w.writerow([m, f"{mu:.6f}", f"{ci:.6f}", len(deliveries_by_method[m])])
    fig, ax = plt.subplots(figsize=(1.2 + 0.9 * len(methods), 3.2))
    ax.bar(methods, means, yerr=cis, capsize=4, color="#6acc65")
    ax.set_ylabel("deliveries per episode")
    ax.set_title(name)
    fig.tight_layout()
    png_path = out_dir / f"{name}.png"
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return {"csv": str(csv_path), "png": str(png_path), "methods": methods, "means": means, "cis": cis}


def export_preference_heatmap(matrix: PreferenceMatrix, out_dir, name: str = "preferences") -> dict:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    methods = matrix.methods
    M = np.array([[matrix.mean(a, b) for b in methods] for a in methods])
    csv_path = out_dir / f"{name}.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["row_method", "col_method", "mean_preference", "ci95", "n"])
        for a in methods:
            for b in methods:
                w.writerow([a, b, f"{matrix.mean(a, b):.6f}", f"{matrix.ci95(a, b):.6f}", matrix.count(a, b)])
    fig, ax = plt.subplots(figsize=(1.5 + 0.8 * len(methods), 1.2 + 0.8 * len(methods)))
    im = ax.imshow(M, cmap="RdBu_r", vmin=-2, vmax=2)
    ax.set_xticks(range(len(methods)), methods, rotation=45, ha="right")
    ax.set_yticks(range(len(methods)), methods)
    for i in range(len(methods)):
        for j in range(len(methods)):
            ax.text(j, i, f"{M[i, j]:+.2f}", ha="center", va="center", fontsize=8)
    ax.set_title("preference for row over column")
    fig.colorbar(im, shrink=0.8)
    fig.tight_layout()
    png_path = out_dir / f"{name}.png"
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return {"csv": str(csv_path), "png": str(png_path), "matrix": M.tolist()}


def export_training_curves(curves_by_method: dict[str, list[list[dict]]], out_dir, name: str = "training_curves") -> dict:
    """Per-method mean +- sd of checkpoint-time reward across seeds."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{name}.csv"
    fig, ax = plt.subplots(figsize=(6, 3.6))
    rows = []
    for method, curves in curves_by_method.items():
        steps = [pt["step"] for pt in curves[0]]
        values = np.array([[pt["mean_return"] for pt in curve] for curve in curves])
        mean = values.mean(axis=0)
        sd = values.std(axis=0)
        ax.plot(steps, mean, label=method)
        ax.fill_between(steps, mean - sd, mean + sd, alpha=0.2)
        for i, s in enumerate(steps):
            rows.append([method, s, f"{mean[i]:.6f}", f"{sd[i]:.6f}", values.shape[0]])
    with open(csv_path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["method", "step", "mean_return", "sd", "n_seeds"])
        w.writerows(rows)
    ax.set_xlabel("environment steps")
    ax.set_ylabel("episode return")
    ax.legend()
    fig.tight_layout()
    png_path = out_dir / f"{name}.png"
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return {"csv": str(csv_path), "png": str(png_path)}


def export_behavior_figure(rows: list[dict], out_dir, name: str = "behavior") -> dict:
    """Movement-fraction and pot-preference bars by method (pooled layouts)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    methods = sorted({r["method"] for r in rows})
    move = []
    pot = []
    for m in methods:
        sub = [r for r in rows if r["method"] == m]
        move.append(float(np.mean([r["movement_fraction"] for r in sub])))
        pots = [r["pot_preference_diff"] for r in sub if r["pot_preference_diff"] is not None]
        pot.append(float(np.mean(pots)) if pots else np.nan)
    csv_path = out_dir / f"{name}.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["method", "movement_fraction", "pot_preference_diff"])
        for m, mv, pt in zip(methods, move, pot):
            w.writerow([m, f"{mv:.6f}", "" if np.isnan(pt) else f"{pt:.6f}"])
    fig, axes = plt.subplots(1, 2, figsize=(8, 3.2))
    axes[0].bar(methods, move, color="#4878cf")
    axes[0].set_title("fraction of episode spent moving")
    axes[1].bar(methods, pot, color="#d65f5f")
    axes[1].set_title("pot preference difference")
    for ax in axes:
        ax.tick_params(axis="x", rotation=45)
    fig.tight_layout()
    png_path = out_dir / f"{name}.png"
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return {"csv": str(csv_path), "png": str(png_path)}
