"""Figure rendering for grid-valued results.

SVG output must be byte-identical across runs, so the glyph and clip-path
ids are salted with a fixed string and the Date metadata is suppressed.
Everything renders through the Agg canvas; no display is ever needed.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

from .errors import ConfigError  # noqa: E402

__all__ = ["LineSet", "render_svg", "save_figure"]

matplotlib.rcParams["svg.hashsalt"] = "metriq"


@dataclass(frozen=True)
class LineSet:
    """One axes' worth of curves sharing an x grid."""

    x: tuple[float, ...]
    curves: tuple[tuple[str, tuple[float, ...]], ...]
    title: str = ""
    xlabel: str = "x"
    ylabel: str = "y"
    loglog: bool = False

    def __post_init__(self) -> None:
        if not self.curves:
            raise ConfigError("a plot needs at least one curve")
        for label, ys in self.curves:
            if len(ys) != len(self.x):
                raise ConfigError(
                    f"curve {label!r} has {len(ys)} points for {len(self.x)} abscissas"
                )


def _draw(lines: LineSet):
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    plot = ax.loglog if lines.loglog else ax.plot
    for label, ys in lines.curves:
        plot(lines.x, ys, label=label, linewidth=1.2)
    ax.set_xlabel(lines.xlabel)
    ax.set_ylabel(lines.ylabel)
    if lines.title:
        ax.set_title(lines.title)
    if len(lines.curves) > 1:
        ax.legend(loc="best")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return fig


def render_svg(lines: LineSet) -> str:
    """Render to an SVG string (deterministic for identical inputs)."""
    fig = _draw(lines)
    buf = io.BytesIO()
    try:
        fig.savefig(buf, format="svg", metadata={"Date": None})
    finally:
        plt.close(fig)
    return buf.getvalue().decode("utf-8")


def save_figure(lines: LineSet, path: str) -> None:
    """Write the plot to ``path``; the suffix picks the backend format."""
    fig = _draw(lines)
    try:
        if path.endswith(".svg"):
            fig.savefig(path, metadata={"Date": None})
        else:
            fig.savefig(path)
    finally:
        plt.close(fig)
