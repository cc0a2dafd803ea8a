"""Figures of Ω and of the boundary curve, written as byte-stable SVG."""

import io
import math
from pathlib import Path
from typing import Iterable, Sequence, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from gbeta_lab.config import MAX_SVG_BYTES  # noqa: E402
from gbeta_lab.logger import get_logger  # noqa: E402
from gbeta_lab.render.commands import DrawCircle, DrawCommand, DrawCurve, DrawPoints, DrawText  # noqa: E402
from gbeta_lab.utils import atomic_write, format_bytes  # noqa: E402

logger = get_logger(__name__)

SVG_HASH_SALT = "gbeta-lab"
FIGURE_SIZE = (6.0, 6.0)
REFERENCE_RADIUS = 1.59

STYLES = {
    "default": {"real": "tab:red", "nonreal": "tab:blue", "size": 1.0},
    "mono": {"real": "black", "nonreal": "black", "size": 0.5},
}


def omega_commands(points: Iterable[tuple[float, float, bool]], style: str = "default") -> list[DrawCommand]:
    """Scatter of conjugates (re, im, is_real) with the unit and radius-2 circles."""
    colors = STYLES.get(style, STYLES["default"])
    points = list(points)

    commands: list[DrawCommand] = [
        DrawCircle("gray", radius=1.0, label="|z| = 1"),
        DrawCircle("gray", radius=2.0, dashed=True, label="|z| = 2"),
    ]

    for is_real, color in ((False, colors["nonreal"]), (True, colors["real"])):
        chosen = [(x, y) for x, y, real in points if real == is_real]
        if chosen:
            commands.append(
                DrawPoints(
                    color,
                    xs=[x for x, _ in chosen],
                    ys=[y for _, y in chosen],
                    size=colors["size"],
                )
            )

    return commands


def boundary_commands(phis: Sequence[float], lambdas: Sequence[float]) -> list[DrawCommand]:
    """Polar curve of 1/λ_φ, mirrored to the lower half plane."""
    xs, ys = [], []
    for phi, lam in zip(phis, lambdas):
        xs.append(math.cos(phi) / lam)
        ys.append(math.sin(phi) / lam)

    commands: list[DrawCommand] = [
        DrawCircle("gray", radius=2.0, dashed=True, label="|z| = 2"),
        DrawCircle("gray", radius=REFERENCE_RADIUS, dashed=True, label=f"|z| = {REFERENCE_RADIUS}"),
        DrawCurve("tab:blue", xs=xs, ys=ys, label="1/λ_φ"),
        DrawCurve("tab:blue", xs=xs, ys=[-y for y in ys]),
    ]
    if len(lambdas):
        commands.append(DrawText("black", x=-2.1, y=2.1, text=f"sup 1/λ = {max(1 / lam for lam in lambdas):.6f}"))
    return commands


def render_svg(commands: Sequence[DrawCommand], title: str = "") -> bytes:
    """Execute the display list on fresh axes and return the SVG bytes."""
    with matplotlib.rc_context({"svg.hashsalt": SVG_HASH_SALT, "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=FIGURE_SIZE)
        try:
            for command in commands:
                command.execute(ax)

            extent = max((command.extent() for command in commands), default=1.0) * 1.05
            ax.set_xlim(-extent, extent)
            ax.set_ylim(-extent, extent)
            ax.set_aspect("equal")
            ax.axhline(0, color="lightgray", linewidth=0.4)
            ax.axvline(0, color="lightgray", linewidth=0.4)
            if title:
                ax.set_title(title)

            buffer = io.BytesIO()
            fig.savefig(buffer, format="svg", metadata={"Date": None})
        finally:
            plt.close(fig)

    return buffer.getvalue()


def write_svg(commands: Sequence[DrawCommand], path: Union[str, Path], title: str = "") -> int:
    data = render_svg(commands, title)
    if len(data) > MAX_SVG_BYTES:
        logger.warning(f"{path} is {format_bytes(len(data))}, above the {format_bytes(MAX_SVG_BYTES)} limit")

    size = atomic_write(path, data)
    logger.info(f"Wrote {path} ({format_bytes(size)})")
    return size
