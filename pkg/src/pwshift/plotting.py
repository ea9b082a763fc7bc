"""Static figures written next to the CSV outputs (matplotlib, Agg backend)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# fixed metadata keeps repeated runs byte-identical
_PNG_META = {"Software": None}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=_PNG_META)
    plt.close(fig)
    return path


def plot_shifts(table, path):
    """Per-``l`` phase shifts: first order, second order, their sum, exact step."""
    ls = np.arange(table.l_max + 1)
    fig, ax = plt.subplots(figsize=(5.5, 3.8))
    ax.plot(ls, table.column("delta1"), "o-", label="first order")
    ax.plot(ls, table.column("delta2"), "s-", label="second order")
    ax.plot(ls, table.column("nuclear"), "^-", label="sum")
    if table.has_exact:
        ax.plot(ls, table.column("oracle_exact"), "kx--", label="exact (step only)")
    ax.axhline(0.0, color="0.7", lw=0.8)
    ax.set_xlabel("l")
    ax.set_ylabel("phase shift (rad)")
    ax.set_xticks(ls)
    ax.legend(frameon=False, fontsize=8)
    return _save(fig, path)


def plot_cross_section(curve, path, reference=None, title=None):
    """``dsigma/dOmega`` in barn on a log scale, optionally with a reference curve."""
    fig, ax = plt.subplots(figsize=(5.5, 3.8))
    pos = curve.dsigma_barns > 0
    ax.semilogy(curve.theta[pos], curve.dsigma_barns[pos], lw=1.2, label="wavepacket")
    if reference is not None:
        ax.semilogy(reference.theta, reference.dsigma_barns, "--", lw=1.0, label="Rutherford")
        ax.legend(frameon=False, fontsize=8)
    ax.set_xlabel(r"$\theta$ (rad)")
    ax.set_ylabel(r"$d\sigma/d\Omega$ (b/sr)")
    ax.set_xlim(0.0, np.pi)
    if title:
        ax.set_title(title, fontsize=9)
    return _save(fig, path)
