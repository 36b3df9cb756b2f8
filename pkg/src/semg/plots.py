"""Figure rendering for the CLI report paths.

Each writer takes the same rows that go into the CSV and draws the obvious
picture next to it (PNG, Agg backend, no display needed).  Figures are a
convenience; the CSV stays the parseable contract.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_rg_curve(points, path):
    """R and G against s, plus the R-versus-G bowl."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.6))
    s = [p.s for p in points]
    ax1.plot(s, [p.R for p in points], "o-", label="R (bits)")
    ax1.plot(s, [p.G for p in points], "s-", label="G (bits)")
    ax1.set_xlabel("s")
    ax1.set_ylabel("bits")
    ax1.legend()
    ax1.grid(alpha=0.3)
    ax2.plot([p.G for p in points], [p.R for p in points], "o-")
    lo = min(min(p.G for p in points), 0.0)
    hi = max(p.R for p in points)
    ax2.plot([lo, hi], [lo, hi], "k--", lw=0.8, label="R = G")
    ax2.set_xlabel("G (bits)")
    ax2.set_ylabel("R (bits)")
    ax2.legend()
    ax2.grid(alpha=0.3)
    _save(fig, path)


def plot_mixture_trace(rows, path):
    """R, G, H and Q trajectories over mixture iterations."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.6))
    it = [r.iteration for r in rows]
    ax1.plot(it, [r.R_bits for r in rows], label="R (bits)")
    ax1.plot(it, [r.G_bits for r in rows], label="G (bits)")
    ax1.plot(it, [r.H_bits for r in rows], label="H(P||Ptheta) (bits)")
    ax1.set_xlabel("iteration")
    ax1.legend()
    ax1.grid(alpha=0.3)
    ax2.plot(it, [r.Q_nats for r in rows], color="tab:red", label="Q (nats)")
    ax2.set_xlabel("iteration")
    ax2.legend()
    ax2.grid(alpha=0.3)
    _save(fig, path)


def plot_tradeoff(rows, path):
    """Purposive information and efficiency across boost levels."""
    fig, ax1 = plt.subplots(figsize=(5.5, 3.6))
    s = [r.s for r in rows]
    ax1.plot(s, [r.G_bits for r in rows], "o-", label="G (bits)")
    ax1.plot(s, [r.R_bits for r in rows], "s-", label="R (bits)")
    ax1.set_xlabel("s")
    ax1.set_ylabel("bits")
    ax1.grid(alpha=0.3)
    ax2 = ax1.twinx()
    eff = [(r.efficiency if r.efficiency is not None else float("nan"))
           for r in rows]
    ax2.plot(s, eff, "^--", color="tab:green", label="G/R")
    ax2.set_ylabel("G/R")
    lines1, labels1 = ax1.get_legend_handles_labels()
    lines2, labels2 = ax2.get_legend_handles_labels()
    ax1.legend(lines1 + lines2, labels1 + labels2, loc="center right")
    _save(fig, path)


def plot_maxmi_trace(steps, path):
    """Shannon and semantic information across MaxMI iterations."""
    fig, ax = plt.subplots(figsize=(5.5, 3.6))
    it = [s.iteration for s in steps]
    ax.plot(it, [s.shannon_mi for s in steps], "o-", label="ShMI (bits)")
    ax.plot(it, [s.semantic_mi for s in steps], "s--", label="SeMI (bits)")
    ax.set_xlabel("iteration")
    ax.set_ylabel("bits")
    ax.legend()
    ax.grid(alpha=0.3)
    _save(fig, path)
