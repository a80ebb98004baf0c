# runner/plotting.py - Static line plots of result CSVs
import os
import logging
from typing import List, Optional

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd

import config
from utils.errors import PlotError

logger = logging.getLogger(__name__)


def plot(csv_path: str, x: Optional[str] = None, y: Optional[List[str]] = None, out_path: Optional[str] = None,
         logy: bool = False, title: Optional[str] = None, fmt: Optional[str] = None) -> str:
    """
    Line plot of the numeric columns of a result CSV

    Args:
        csv_path: CSV written by the runner ('#' comment lines allowed)
        x: Column for the horizontal axis (first numeric column by default)
        y: Columns to draw (every other numeric column by default)
        out_path: Image path (CSV path with the plot format's extension by default)
        logy: Logarithmic vertical axis
        title: Figure title (CSV file name by default)
        fmt: 'png' or 'svg' (config.PLOT_FORMAT by default)

    Returns:
        str: Path of the written image
    """
    if not os.path.exists(csv_path):
        raise PlotError(f"CSV not found: {csv_path}")
    try:
        df = pd.read_csv(csv_path, comment="#")
    except (pd.errors.EmptyDataError, pd.errors.ParserError) as e:
        raise PlotError(f"Cannot read {csv_path}: {e}") from e

    numeric = [c for c in df.columns if pd.api.types.is_numeric_dtype(df[c]) and not pd.api.types.is_bool_dtype(df[c])]
    if len(numeric) < 2:
        raise PlotError(f"{csv_path} needs at least two numeric columns, found {len(numeric)}")
    x = x or numeric[0]
    y = y or [c for c in numeric if c != x]
    missing = [c for c in [x] + list(y) if c not in df.columns]
    if missing:
        raise PlotError(f"{csv_path} has no column(s): {', '.join(missing)}")

    fmt = (fmt or config.PLOT_FORMAT).lower()
    if fmt not in ("png", "svg"):
        raise PlotError(f"Unsupported plot format '{fmt}'")
    out_path = out_path or os.path.splitext(csv_path)[0] + f".{fmt}"

    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    try:
        for column in y:
            ax.plot(df[x], df[column], label=column, linewidth=1.2)
        ax.set_xlabel(x)
        if logy:
            ax.set_yscale("log")
        if len(y) > 1:
            ax.legend(frameon=False)
        ax.set_title(title or os.path.basename(csv_path))
        fig.tight_layout()
        fig.savefig(out_path, format=fmt)
    finally:
        plt.close(fig)
    logger.info(f"Plotted {csv_path} -> {out_path}")
    return out_path
