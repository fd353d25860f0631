"""Static figure rendering for the report path.

Figures land beside the delimited output as PNG files; the CSVs stay the
authoritative record, the figures are for eyeballs.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .runner import ResultRow, SpectrumRow

_FIGSIZE = (6.4, 4.0)
_DPI = 150


def plot_gcs_vs_k(rows: list[ResultRow], path) -> None:
    """Mean GCS against kept components, one line per quantizer width."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    widths = []
    for row in rows:
        if row.q_bits not in widths:
            widths.append(row.q_bits)
    for q in widths:
        points = sorted((r.k, r.mean_gcs) for r in rows if r.q_bits == q)
        label = "no quantizer" if q is None else f"Q = {q}"
        ax.plot([p[0] for p in points], [p[1] for p in points], marker="o", label=label)
    ax.set_xlabel("components kept (k)")
    ax.set_ylabel("mean GCS")
    pipelines = sorted({r.pipeline for r in rows})
    ax.set_title(f"Reconstruction fidelity ({', '.join(pipelines)})")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def plot_variance_spectrum(rows: list[SpectrumRow], path) -> None:
    """Mean per-component variance mass with its cumulative curve."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ks = [r.k for r in rows]
    ax.bar(ks, [r.mean_pct for r in rows], color="tab:blue", alpha=0.7,
           label="mean variance fraction")
    ax.plot(ks, [r.cum_pct for r in rows], color="tab:orange", marker="o",
            label="cumulative")
    ax.plot(ks, [r.frac_samples_covered for r in rows], color="tab:green",
            marker="s", linestyle="--", label="samples covered")
    ax.set_xlabel("component index")
    ax.set_ylabel("fraction")
    ax.set_ylim(0.0, 1.05)
    ax.set_title("Per-instance PCA spectrum")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
