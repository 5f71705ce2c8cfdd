"""Shared UI contract between the action compiler and the headless simulator.

Everything here is a frozen co-design constant: key vocabulary, screen layout,
dialog tab orders, view-navigation arrows, and the zoom/pan view transform.
The compiler emits coordinates through these helpers and the simulator decodes
them with the same arithmetic, so compiled programs always hit their targets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# Canonical key vocabulary; serialized by index.
KEYS = (
    "shift_down", "shift_up", "tab", "enter", "escape", "space",
    "l", "c", "a", "s", "e", "p", "h", "y", "seven", "plus",
    "arrow_up", "arrow_down", "arrow_left", "arrow_right",
)
KEY_INDEX = {name: i for i, name in enumerate(KEYS)}

TOOL_KEYS = {"line": "l", "circle": "c", "arc": "a"}

# Plane ids: 0 Right (drop x), 1 Front (drop y), 2 Top (drop z).
NAV_ARROW_FOR_PLANE = {0: "arrow_right", 1: "arrow_down", 2: "arrow_up"}

PLANE_DIALOG_FIELDS = ("offset_field", "direction_arrow")
EXTRUDE_DIALOG_FIELDS = ("type_selector", "depth_field", "depth2_field",
                         "symmetric_box", "merge_box")

EXTRUDE_OPS_CYCLE = ("new", "remove", "union")  # space cycles the type selector

ZOOM_RATE = 0.1            # zoom' = zoom * exp(ZOOM_RATE * scroll)
EDGE_HIT_RADIUS = 0.004    # canvas units at zoom 1; scales with 1/zoom
REGION_INSET_FRACTION = 0.1


@dataclass(frozen=True)
class Rect:
    x0: float
    y0: float
    x1: float
    y1: float

    def contains(self, p: tuple[float, float]) -> bool:
        return self.x0 <= p[0] <= self.x1 and self.y0 <= p[1] <= self.y1

    @property
    def center(self) -> tuple[float, float]:
        return ((self.x0 + self.x1) / 2.0, (self.y0 + self.y1) / 2.0)

    def sample(self, rng, inset: float = REGION_INSET_FRACTION) -> tuple[float, float]:
        """Uniform point inside the rect with a fractional inset margin."""
        w, h = self.x1 - self.x0, self.y1 - self.y0
        return (
            self.x0 + w * (inset + (1 - 2 * inset) * rng.random()),
            self.y0 + h * (inset + (1 - 2 * inset) * rng.random()),
        )


# Screen layout in normalized [0, 1]^2 screen coordinates (y grows downward).
TOOLBAR = Rect(0.0, 0.0, 1.0, 0.06)
TREE_PANEL = Rect(0.0, 0.06, 0.16, 1.0)
DIALOG_PANEL = Rect(0.78, 0.08, 0.99, 0.62)
VIEWPORT = Rect(0.16, 0.06, 1.0, 1.0)

PLANE_TOOL_BUTTON = Rect(0.02, 0.01, 0.07, 0.05)


def tree_row_rect(index: int) -> Rect:
    """Feature-tree row: 0..2 default planes (Right, Front, Top), then customs."""
    y0 = 0.08 + index * 0.05
    return Rect(0.01, y0, 0.15, y0 + 0.04)


def dialog_field_rect(kind: str, field_index: int) -> Rect:
    """Row rect for a dialog field; kind is 'plane' or 'extrude'."""
    y0 = DIALOG_PANEL.y0 + 0.04 + field_index * 0.08
    return Rect(DIALOG_PANEL.x0 + 0.01, y0, DIALOG_PANEL.x1 - 0.01, y0 + 0.06)


def direction_arrow_rect(positive: bool) -> Rect:
    """The offset-direction arrow: left half = +normal, right half = -normal."""
    row = dialog_field_rect("plane", PLANE_DIALOG_FIELDS.index("direction_arrow"))
    mid = (row.x0 + row.x1) / 2.0
    if positive:
        return Rect(row.x0, row.y0, mid, row.y1)
    return Rect(mid, row.y0, row.x1, row.y1)


@dataclass
class ViewTransform:
    """Canvas [0,1]^2 -> screen viewport mapping with cursor-anchored zoom."""

    zoom: float = 1.0
    pan_x: float = 0.0
    pan_y: float = 0.0

    def canvas_to_screen(self, p: tuple[float, float]) -> tuple[float, float]:
        vx = self.zoom * p[0] + self.pan_x
        vy = self.zoom * p[1] + self.pan_y
        return (
            VIEWPORT.x0 + (VIEWPORT.x1 - VIEWPORT.x0) * vx,
            VIEWPORT.y0 + (VIEWPORT.y1 - VIEWPORT.y0) * vy,
        )

    def screen_to_canvas(self, p: tuple[float, float]) -> tuple[float, float]:
        vx = (p[0] - VIEWPORT.x0) / (VIEWPORT.x1 - VIEWPORT.x0)
        vy = (p[1] - VIEWPORT.y0) / (VIEWPORT.y1 - VIEWPORT.y0)
        return ((vx - self.pan_x) / self.zoom, (vy - self.pan_y) / self.zoom)

    def scroll_at(self, screen_point: tuple[float, float], amount: float) -> None:
        """Zoom about the canvas point under the cursor (its screen position is
        the fixed point of the transform)."""
        anchor = self.screen_to_canvas(screen_point)
        self.zoom = self.zoom * math.exp(ZOOM_RATE * amount)
        vx = (screen_point[0] - VIEWPORT.x0) / (VIEWPORT.x1 - VIEWPORT.x0)
        vy = (screen_point[1] - VIEWPORT.y0) / (VIEWPORT.y1 - VIEWPORT.y0)
        self.pan_x = vx - anchor[0] * self.zoom
        self.pan_y = vy - anchor[1] * self.zoom
