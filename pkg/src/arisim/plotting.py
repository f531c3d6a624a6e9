"""Static figure rendering for sweep results (written next to the CSV)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

_AXIS_LABELS = {
    "bandwidth": "Backhaul bandwidth (Hz)",
    "elements": "Reflecting elements",
    "distance": "Region center distance (m)",
    "height": "Platform altitude (m)",
}

_METHOD_STYLES = {
    "proposed": dict(marker="o", color="tab:blue"),
    "half_center_ris": dict(marker="s", color="tab:orange"),
    "origin_ris_center_align": dict(marker="^", color="tab:green"),
    "terrestrial": dict(marker="x", color="tab:red"),
}


def plot_sweep(rows: list[dict], out_path: Path) -> Path:
    """One figure per sweep: median total power (dBm) per method."""
    axis = rows[0]["axis"]
    known = list(_METHOD_STYLES)
    methods = sorted(
        {r["method"] for r in rows},
        key=lambda m: (known.index(m) if m in known else len(known), m),
    )
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    for method in methods:
        pts = sorted((r["value"], r["median_dbm"]) for r in rows if r["method"] == method)
        ax.plot(
            [p[0] for p in pts],
            [p[1] for p in pts],
            label=method,
            **_METHOD_STYLES.get(method, {}),
        )
    ax.set_xlabel(_AXIS_LABELS.get(axis, axis))
    ax.set_ylabel("Median total transmit power (dBm)")
    ax.grid(True, alpha=0.4)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return out_path
