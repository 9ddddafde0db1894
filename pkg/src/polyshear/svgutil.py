"""Tiny SVG writer for planar figures (polygons, polylines, points)."""

from __future__ import annotations


def _fmt(x):
    return f"{x:.6f}"


class SvgFigure:
    """Collects planar elements and renders a standalone SVG document.

    Input coordinates are in math orientation (y up); rendering flips y.
    """

    def __init__(self, stroke_width: float = 0.005):
        self.elements = []
        self.points = []
        self.stroke_width = stroke_width

    def _note(self, pts):
        self.points.extend(pts)

    def polygon(self, pts, stroke="black", fill="none"):
        self._note(pts)
        coords = " ".join(f"{_fmt(x)},{_fmt(-y)}" for x, y in pts)
        self.elements.append(
            f'<polygon points="{coords}" stroke="{stroke}" fill="{fill}" '
            f'stroke-width="{{sw}}" stroke-linejoin="round"/>'
        )

    def polyline(self, pts, stroke="black", dashed=False):
        self._note(pts)
        coords = " ".join(f"{_fmt(x)},{_fmt(-y)}" for x, y in pts)
        dash = ' stroke-dasharray="{sw4} {sw4}"' if dashed else ""
        self.elements.append(
            f'<polyline points="{coords}" stroke="{stroke}" fill="none" '
            f'stroke-width="{{sw}}" stroke-linecap="round"{dash}/>'
        )

    def segment(self, a, b, stroke="black", dashed=False):
        self.polyline([a, b], stroke=stroke, dashed=dashed)

    def dot(self, p, color="black", r_factor=2.0):
        self._note([p])
        self.elements.append(
            f'<circle cx="{_fmt(p[0])}" cy="{_fmt(-p[1])}" r="{{sw{r_factor}}}" '
            f'fill="{color}"/>'
        )

    def text(self, p, s, size_factor=8.0):
        self._note([p])
        self.elements.append(
            f'<text x="{_fmt(p[0])}" y="{_fmt(-p[1])}" font-size="{{sw{size_factor}}}" '
            f'font-family="sans-serif">{s}</text>'
        )

    def render(self) -> str:
        if not self.points:
            return '<svg xmlns="http://www.w3.org/2000/svg"/>'
        xs = [p[0] for p in self.points]
        ys = [-p[1] for p in self.points]
        x0, x1 = min(xs), max(xs)
        y0, y1 = min(ys), max(ys)
        span = max(x1 - x0, y1 - y0, 1e-9)
        pad = 0.05 * span
        sw = self.stroke_width * span
        body = []
        for e in self.elements:
            e = e.replace("{sw4}", _fmt(4 * sw))
            e = e.replace("{sw2.0}", _fmt(2.0 * sw))
            e = e.replace("{sw8.0}", _fmt(8.0 * sw))
            e = e.replace("{sw}", _fmt(sw))
            body.append(e)
        vb = f"{_fmt(x0 - pad)} {_fmt(y0 - pad)} {_fmt(x1 - x0 + 2 * pad)} {_fmt(y1 - y0 + 2 * pad)}"
        return (
            f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{vb}" '
            f'width="800" height="800">\n' + "\n".join(body) + "\n</svg>\n"
        )
