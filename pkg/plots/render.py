#!/usr/bin/env python3
"""Render static figures from the study CSV files.

Usage: python plots/render.py --spec spec.json

The JSON spec names the figure kind, the input CSV (written by the `mevlab`
command line) and the output image:

    {
      "kind": "study-curves" | "return-levels" | "dimension-curves",
      "input": "summary.csv",
      "output": "figure.png",
      "log_scale": {"se": true, "rmse": true}     # optional overrides
    }

study-curves panels bias/SE/RMSE against the dependence parameter,
return-levels panels mean/bias/SE/RMSE against the return period (log axis),
dimension-curves panels bias/SE/RMSE against the dimension.  Spread panels
default to a logarithmic axis.  Output bytes are deterministic for fixed
input.
"""

import argparse
import json
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd

matplotlib.rcParams["svg.hashsalt"] = "mevlab-plots"


class SchemaError(ValueError):
    """Input CSV does not carry the columns the figure kind needs."""


# line styling by estimator family: block-maximum estimators in black/grey,
# point-process in blue, censored in red, pairwise variants grey/purple
STYLES = {
    "max1": ("black", "-"),
    "max2": ("black", "--"),
    "max3": ("black", ":"),
    "max_pair": ("grey", "-"),
    "thr1": ("tab:blue", "-"),
    "thr2": ("tab:blue", "--"),
    "thr3": ("tab:blue", ":"),
    "thr4": ("tab:red", "-"),
    "thr5": ("tab:red", "--"),
    "thr_pair": ("purple", "-"),
}

KIND_COLUMNS = {
    "study-curves": ["estimator", "alpha_true", "tuning", "bias", "se", "rmse"],
    "return-levels": ["estimator", "period", "true_level", "mean", "bias",
                      "se", "rmse"],
    "dimension-curves": ["estimator", "D", "bias", "se", "rmse"],
}


def load_frame(path, kind):
    frame = pd.read_csv(path, comment="#")
    if frame.empty:
        raise SchemaError(f"{path}: no data rows")
    missing = [c for c in KIND_COLUMNS[kind] if c not in frame.columns]
    if missing:
        raise SchemaError(f"{path}: missing column(s) {', '.join(missing)}")
    return frame


def _style(estimator):
    return STYLES.get(estimator, ("tab:orange", "-"))


def _series_label(estimator, tuning=None):
    return estimator if tuning is None else f"{estimator} {tuning}"


def _save(fig, path):
    meta = {"Date": None} if str(path).endswith(".svg") else {}
    fig.savefig(path, dpi=120, metadata=meta)
    plt.close(fig)


def render_study_curves(frame, output, log_scale):
    fig, axes = plt.subplots(1, 3, figsize=(12, 4), constrained_layout=True)
    panels = ["bias", "se", "rmse"]
    for (est, tuning), grp in sorted(frame.groupby(["estimator", "tuning"])):
        grp = grp.sort_values("alpha_true")
        color, ls = _style(est)
        for ax, col in zip(axes, panels):
            ax.plot(grp["alpha_true"], grp[col], color=color, linestyle=ls,
                    label=_series_label(est, tuning), lw=1.3)
    for ax, col in zip(axes, panels):
        ax.set_xlabel("dependence parameter")
        ax.set_ylabel(col)
        if log_scale.get(col, col in ("se", "rmse")):
            ax.set_yscale("log")
        if col == "bias":
            ax.axhline(0.0, color="0.8", lw=0.8, zorder=0)
    axes[0].legend(fontsize=7, ncol=2)
    _save(fig, output)


def render_return_levels(frame, output, log_scale):
    fig, axes = plt.subplots(1, 4, figsize=(15, 4), constrained_layout=True)
    panels = ["mean", "bias", "se", "rmse"]
    truth = frame.drop_duplicates("period").sort_values("period")
    axes[0].plot(truth["period"], truth["true_level"], color="tab:green",
                 lw=2.5, label="true")
    for est, grp in sorted(frame.groupby("estimator")):
        grp = grp.sort_values("period")
        color, ls = _style(est)
        for ax, col in zip(axes, panels):
            ax.plot(grp["period"], grp[col], color=color, linestyle=ls,
                    label=est, lw=1.3)
    for ax, col in zip(axes, panels):
        ax.set_xscale("log")
        ax.set_xlabel("return period (years)")
        ax.set_ylabel(col)
        if log_scale.get(col, col in ("se", "rmse")):
            ax.set_yscale("log")
        if col == "bias":
            ax.axhline(0.0, color="0.8", lw=0.8, zorder=0)
    axes[0].legend(fontsize=7, ncol=2)
    _save(fig, output)


def render_dimension_curves(frame, output, log_scale):
    fig, axes = plt.subplots(1, 3, figsize=(12, 4), constrained_layout=True)
    panels = ["bias", "se", "rmse"]
    for est, grp in sorted(frame.groupby("estimator")):
        grp = grp.sort_values("D")
        color, ls = _style(est)
        for ax, col in zip(axes, panels):
            ax.plot(grp["D"], grp[col], color=color, linestyle=ls, label=est,
                    lw=1.3, marker="o", ms=2.5)
    for ax, col in zip(axes, panels):
        ax.set_xlabel("dimension")
        ax.set_ylabel(col)
        if log_scale.get(col, col in ("se", "rmse")):
            ax.set_yscale("log")
        if col == "bias":
            ax.axhline(0.0, color="0.8", lw=0.8, zorder=0)
    axes[0].legend(fontsize=7, ncol=2)
    _save(fig, output)


RENDERERS = {
    "study-curves": render_study_curves,
    "return-levels": render_return_levels,
    "dimension-curves": render_dimension_curves,
}


def render(spec) -> str:
    """Render one figure from a spec mapping; returns the output path."""
    kind = spec.get("kind")
    if kind not in RENDERERS:
        raise SchemaError(
            f"unknown kind {kind!r}; expected one of {', '.join(RENDERERS)}"
        )
    for key in ("input", "output"):
        if key not in spec:
            raise SchemaError(f"spec is missing {key!r}")
    frame = load_frame(spec["input"], kind)
    log_scale = dict(spec.get("log_scale", {}))
    RENDERERS[kind](frame, spec["output"], log_scale)
    return spec["output"]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--spec", required=True, help="figure spec JSON file")
    args = parser.parse_args(argv)
    try:
        with open(args.spec, encoding="utf-8") as fh:
            spec = json.load(fh)
        out = render(spec)
    except (SchemaError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
