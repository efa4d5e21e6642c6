"""Ablation and sweep result tables."""

from __future__ import annotations

from .crossplay import EvalReport

ABLATION_COLUMNS = ("FCP", "FCP-T", "FCP+A", "FCP-T+A")
ABLATION_ROWS = ("HumanProxy", "DiverseSP", "RandomInit")


def ablation_table(reports: dict[str, dict[str, EvalReport]]) -> dict:
    """3 partner rows x 4 variant columns of pooled mean +- sd deliveries.

    ``reports[variant][partner_kind]`` must cover all four FCP variants and the
    three held-out populations.
    """
    missing = [v for v in ABLATION_COLUMNS if v not in reports]
    if missing:
        raise ValueError(f"missing variant(s): {', '.join(missing)}")
    for variant in ABLATION_COLUMNS:
        absent = [r for r in ABLATION_ROWS if r not in reports[variant]]
        if absent:
            raise ValueError(f"variant {variant} is missing partner row(s): {', '.join(absent)}")

    mean = [[reports[v][row].aggregate()["pooled"]["mean"] for v in ABLATION_COLUMNS] for row in ABLATION_ROWS]
    sd = [[reports[v][row].aggregate()["pooled"]["sd"] for v in ABLATION_COLUMNS] for row in ABLATION_ROWS]

    lines = ["Partner      " + "".join(f"{v:>14}" for v in ABLATION_COLUMNS)]
    for i, row in enumerate(ABLATION_ROWS):
        cells = "".join(f"{mean[i][j]:7.2f}±{sd[i][j]:<5.2f} " for j in range(len(ABLATION_COLUMNS)))
        lines.append(f"{row:<13}{cells}")
    return {
        "rows": list(ABLATION_ROWS),
        "columns": list(ABLATION_COLUMNS),
        "mean": mean,
        "sd": sd,
        "text": "\n".join(lines),
    }


def sweep_table(results: dict[int, list[float]]) -> dict:
    """Population-size sweep table: size -> mean +- sd deliveries over seeds.

    The size trend is reported, not asserted.
    """
    import numpy as np

    sizes = sorted(results)
    rows = []
    for n in sizes:
        vals = np.asarray(results[n], dtype=np.float64)
        rows.append({"population_size": n, "mean_deliveries": float(vals.mean()), "sd": float(vals.std(ddof=0)), "n_seeds": len(vals)})
    lines = ["N     deliveries"] + [f"{r['population_size']:<6}{r['mean_deliveries']:.2f} ({r['sd']:.2f})" for r in rows]
    return {"rows": rows, "text": "\n".join(lines)}
