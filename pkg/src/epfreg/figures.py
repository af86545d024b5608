"""Report figures rendered next to the delimited outputs."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def forecast_figure(records, title, path):
    """Actual vs forecast price over the whole out-of-sample period."""
    t = np.arange(len(records)) / 24.0
    actual = [r.actual_price for r in records]
    forecast = [r.forecast_price for r in records]
    fig, (ax, ax2) = plt.subplots(2, 1, figsize=(10, 6), sharex=True,
                                  gridspec_kw={"height_ratios": [3, 1]})
    ax.plot(t, actual, lw=0.7, color="0.25", label="actual")
    ax.plot(t, forecast, lw=0.7, color="tab:red", alpha=0.8, label="forecast")
    ax.set_ylabel("price [EUR/MWh]")
    ax.legend(loc="upper left", frameon=False)
    ax.set_title(title)
    err = np.asarray(actual) - np.asarray(forecast)
    ax2.plot(t, err, lw=0.5, color="tab:blue")
    ax2.axhline(0.0, color="0.6", lw=0.6)
    ax2.set_ylabel("error")
    ax2.set_xlabel("days since first forecast")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def comparison_figure(rows, path):
    """Horizontal bars of rRMSE vs OLS, one per non-baseline run."""
    rows = [r for r in rows if r.get("rrmse_vs_ols") is not None]
    if not rows:
        return
    labels = [f"{r['family']} ({r['model']}/{r['selection']})" for r in rows]
    vals = [r["rrmse_vs_ols"] for r in rows]
    fig, ax = plt.subplots(figsize=(8, 0.45 * len(rows) + 1.5))
    colors = ["tab:green" if v < 0 else "tab:red" for v in vals]
    ax.barh(np.arange(len(rows)), vals, color=colors, height=0.6)
    ax.set_yticks(np.arange(len(rows)), labels)
    ax.axvline(0.0, color="0.3", lw=0.8)
    ax.set_xlabel("rRMSE vs OLS [%]  (negative = better)")
    ax.invert_yaxis()
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
