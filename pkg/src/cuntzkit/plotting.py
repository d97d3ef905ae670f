"""Figure rendering for the report path; everything draws to files."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def save_spectrum_figure(path, variant: str, rows) -> None:
    """Scatter of block eigenvalues against grade, sized by multiplicity.

    rows: (n, k, eigenvalue, multiplicity) tuples as emitted by the
    spectrum command.
    """
    fig, ax = plt.subplots(figsize=(6, 4))
    grades = [n + 2 * k for n, k, _, _ in rows]
    values = [float(v) for _, _, v, _ in rows]
    sizes = [10 + 12 * m for _, _, _, m in rows]
    ax.scatter(grades, values, s=sizes, alpha=0.6, edgecolors="none")
    ax.set_xlabel("grade |mu| + |nu|")
    ax.set_ylabel("eigenvalue")
    ax.set_title(f"block spectrum of {variant}")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_heat_trace_figure(path, variant: str, rows) -> None:
    """Partial heat traces against t on a log scale, with tail bounds."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ts = [row["t"] for row in rows]
    partials = [row["partial_trace"] for row in rows]
    tails = [row["tail_bound"] for row in rows]
    ax.plot(ts, partials, "o-", label="partial trace")
    ax.plot(ts, tails, "s--", label="tail bound")
    ax.set_xlabel("t")
    ax.set_yscale("log")
    ax.set_title(f"heat trace of {variant}")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_residual_figure(path, verdicts) -> None:
    """Stacked witness counts (zero vs nonzero residual) per verdict."""
    fig, ax = plt.subplots(figsize=(7, 4))
    ids = [v["id"] for v in verdicts]
    zero = [sum(1 for w in v["witnesses"] if w["residual"] == "0") for v in verdicts]
    nonzero = [sum(1 for w in v["witnesses"] if w["residual"] != "0") for v in verdicts]
    xs = range(len(ids))
    ax.bar(xs, zero, label="residual = 0", color="#4c9f70")
    ax.bar(xs, nonzero, bottom=zero, label="residual != 0", color="#c05252")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(ids, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("witnesses")
    ax.set_title("adjudication witnesses by verdict")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
