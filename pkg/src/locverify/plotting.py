"""Matplotlib renderings of learning curves next to their CSV files."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

_PNG_META = {"Software": None}


def _finish(fig, ax, path):
    ax.set_xlabel("Time (s) / training vehicles")
    ax.set_ylabel("Total Error")
    ax.set_ylim(0, 0.6)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8, loc="upper right")
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=_PNG_META)
    plt.close(fig)
    return path


def plot_nlos_curves(curves, lrt_errors, path, title=None):
    """One NN learning curve per NLoS level with dashed LRT reference lines.

    ``curves`` and ``lrt_errors`` are dicts keyed by NLoS std (ns).
    """
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    for color, (nlos, curve) in zip(colors, sorted(curves.items())):
        ax.plot(curve.seconds, curve.total_error, color=color, lw=1, label=f"NN, NLoS {nlos:g} ns")
        if nlos in lrt_errors and lrt_errors[nlos] is not None:
            ax.axhline(lrt_errors[nlos], color=color, ls="--", lw=1,
                       label=f"LRT, NLoS {nlos:g} ns ({lrt_errors[nlos]:.3f})")
    if title:
        ax.set_title(title, fontsize=10)
    return _finish(fig, ax, path)


def plot_po_curves(curves, lrt_error, path, title=None):
    """NN learning curves keyed by test-set malicious proportion, plus the Po=0.5 LRT line."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for po, curve in sorted(curves.items(), reverse=True):
        ax.plot(curve.seconds, curve.total_error, lw=1, label=f"NN, Po = {po:g}")
    if lrt_error is not None:
        ax.axhline(lrt_error, color="black", ls="--", lw=1.2, label=f"LRT, Po = 0.5 ({lrt_error:.3f})")
    if title:
        ax.set_title(title, fontsize=10)
    return _finish(fig, ax, path)
