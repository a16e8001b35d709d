"""Figures for the scaling and integration reports.

matplotlib is optional; it is imported on first use with the non-interactive
Agg backend so that figures render without a display.
"""

from __future__ import annotations

from typing import Sequence


def require_matplotlib():
    """Import pyplot or raise ImportError with an install hint."""
    try:
        import matplotlib
    except ImportError:
        raise ImportError("plotting needs matplotlib: pip install 'hambesov[plot]'") from None
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _save(fig, path: str):
    # a fixed metadata block keeps repeated renders byte-identical for png/svg
    fig.savefig(path, dpi=120, metadata={"Software": None} if path.endswith(".png") else None)


def plot_scaling(report, path: str) -> None:
    plt = require_matplotlib()
    ns = [row.n for row in report.rows]
    fig, (left, right) = plt.subplots(1, 2, figsize=(10, 4))
    left.semilogy(ns, [row.norm for row in report.rows], "o-", label="quasi-norm")
    left.semilogy(ns, [row.reference for row in report.rows], "s--", label="b^{n(r-1)} n^{1/q}")
    left.set_xlabel("n")
    left.legend()
    right.plot(ns, report.ratios, "o-")
    right.set_xlabel("n")
    right.set_ylabel("norm / reference")
    right.set_ylim(bottom=0)
    p = report.params
    fig.suptitle(f"b={report.b}, p={p.p:g}, q={p.q:g}, r={p.r:g}, patterns: {report.rule}")
    fig.tight_layout()
    _save(fig, path)
    plt.close(fig)


def plot_integration(rows: Sequence, integrand: str, path: str) -> None:
    plt = require_matplotlib()
    Ns = [row.N for row in rows]
    errs = [abs(row.error) for row in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    shown = [(N, e) for N, e in zip(Ns, errs) if e > 0]
    if shown:
        ax.loglog(*zip(*shown), "o-", label="|error|")
        ax.loglog(Ns, [shown[0][1] * shown[0][0] / N for N in Ns], ":", label="slope N^-1")
        ax.legend()
    ax.set_xlabel("N")
    ax.set_title(f"equal-weight rule, f = {integrand}")
    fig.tight_layout()
    _save(fig, path)
    plt.close(fig)
