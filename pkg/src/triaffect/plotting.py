"""Deterministic SVG rendering for time-series reports.

Output is byte-stable across runs: the SVG hash salt is pinned and the
date metadata is suppressed, so golden-file tests can diff the bytes.
"""

from __future__ import annotations

import io
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_HASHSALT = "triaffect"

# Fixed per-channel styles so legend order and colors never depend on dict
# iteration or rc state.
_LINE_STYLES = [
    {"color": "#00796b", "linestyle": "-", "linewidth": 1.6},
    {"color": "#1a56b0", "linestyle": "--", "linewidth": 1.2},
    {"color": "#b03030", "linestyle": "-.", "linewidth": 1.2},
    {"color": "#7a4fb2", "linestyle": ":", "linewidth": 1.4},
]
_MARKER_STYLE = {"color": "#7a1fa2", "marker": "o", "markersize": 5.0, "linestyle": "none"}


def render_timeseries_svg(
    series: Mapping[str, Mapping[int, float]],
    channels: Sequence[str],
    marker_channels: Sequence[str] = ("pathos",),
    ylim: tuple[float, float] = (-1.2, 1.2),
) -> bytes:
    """Render index-aligned channels: lines for continuous, dots for markers."""
    with plt.rc_context({"svg.hashsalt": _HASHSALT}):
        fig, ax = plt.subplots(figsize=(9.0, 3.8), dpi=100)
        line_cycle = iter(_LINE_STYLES * (len(channels) // len(_LINE_STYLES) + 1))
        for name in channels:
            points = series[name]
            xs = sorted(points)
            ys = [points[x] for x in xs]
            if name in marker_channels:
                ax.plot(xs, ys, label=name, **_MARKER_STYLE)
            else:
                ax.plot(xs, ys, label=name, **next(line_cycle))
        ax.set_xlabel("segment index")
        ax.set_ylabel("score")
        ax.set_ylim(*ylim)
        ax.grid(True, linestyle=":", alpha=0.5)
        ax.legend(loc="lower left", fontsize=8, ncol=max(1, len(channels)))
        fig.tight_layout()
        buf = io.BytesIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
        plt.close(fig)
    return buf.getvalue()
