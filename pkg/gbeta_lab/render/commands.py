from dataclasses import dataclass, field
from typing import Sequence

from matplotlib.axes import Axes
from matplotlib.patches import Circle


@dataclass
class DrawCommand:
    color: str = field(default="black")
    label: str = field(default="", kw_only=True)

    def execute(self, ax: Axes):
        pass

    def extent(self) -> float:
        """Largest |coordinate| the command touches, for square framing."""
        return 0.0


@dataclass
class DrawPoints(DrawCommand):
    xs: Sequence[float] = field(default=(), kw_only=True)
    ys: Sequence[float] = field(default=(), kw_only=True)
    size: float = field(default=1.0, kw_only=True)

    def execute(self, ax: Axes):
        ax.scatter(
            self.xs,
            self.ys,
            s=self.size,
            c=self.color,
            marker=".",
            linewidths=0,
            label=self.label or None,
        )

    def extent(self) -> float:
        return max((max(abs(x), abs(y)) for x, y in zip(self.xs, self.ys)), default=0.0)


@dataclass
class DrawCircle(DrawCommand):
    radius: float = field(default=1.0, kw_only=True)
    dashed: bool = field(default=False, kw_only=True)

    def execute(self, ax: Axes):
        ax.add_patch(
            Circle(
                (0.0, 0.0),
                self.radius,
                fill=False,
                edgecolor=self.color,
                linewidth=0.6,
                linestyle="--" if self.dashed else "-",
                label=self.label or None,
            )
        )

    def extent(self) -> float:
        return self.radius


@dataclass
class DrawCurve(DrawCommand):
    xs: Sequence[float] = field(default=(), kw_only=True)
    ys: Sequence[float] = field(default=(), kw_only=True)

    def execute(self, ax: Axes):
        ax.plot(self.xs, self.ys, color=self.color, linewidth=0.8, label=self.label or None)

    def extent(self) -> float:
        return max((max(abs(x), abs(y)) for x, y in zip(self.xs, self.ys)), default=0.0)


@dataclass
class DrawText(DrawCommand):
    x: float = field(default=0.0, kw_only=True)
    y: float = field(default=0.0, kw_only=True)
    text: str = field(default="", kw_only=True)

    def execute(self, ax: Axes):
        ax.text(self.x, self.y, self.text, color=self.color, fontsize=7, ha="left", va="top")
