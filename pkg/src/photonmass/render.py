"""Static spacetime-diagram rendering: binary PPM (P6) or SVG 1.1.

The effective-mass density is drawn with a diverging blue-white-red map,
symmetric about zero and clipped at the 99th percentile of |mbar^2|;
trajectories are black polylines; axes are labeled t, x (or t', x' for
boosted inputs).  Boosted diagrams are sampled by inverse-mapping each
output location to the lab grid, so the sheared interference fringes
render without resampling artifacts.  Output bytes depend only on the
input files.
"""

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

# Plot box size in pixels (PPM) and abstract units (SVG).
_BOX = 512
_MARGIN_L, _MARGIN_B, _MARGIN_T, _MARGIN_R = 46, 34, 12, 12

# 5x7 bitmap glyphs for axis labels.
_GLYPHS = {
    "t": ["..#..", "..#..", "#####", "..#..", "..#..", "..#.#", "...#."],
    "x": [".....", ".....", "#...#", ".#.#.", "..#..", ".#.#.", "#...#"],
    "'": ["..#..", "..#..", ".....", ".....", ".....", ".....", "....."],
}


@dataclass(frozen=True)
class FieldImage:
    """Lab-frame mbar^2 node values on a rectangular grid, plus the boost
    under which they are to be displayed."""

    t_min: float
    t_max: float
    x_min: float
    x_max: float
    mbar: np.ndarray  # shape (nt, nx), row-major in (t, x)
    theta: float = 0.0

    @property
    def gamma(self) -> float:
        return 1.0 / math.sqrt(1.0 - self.theta**2)

    def display_bounds(self) -> tuple[float, float, float, float]:
        """Bounding box of the (possibly boosted) lab window."""
        g, th = self.gamma, self.theta
        corners_t, corners_x = [], []
        for t in (self.t_min, self.t_max):
            for x in (self.x_min, self.x_max):
                corners_t.append(g * (t - th * x))
                corners_x.append(g * (x - th * t))
        return min(corners_t), max(corners_t), min(corners_x), max(corners_x)


def _color_scale(mbar: np.ndarray) -> float:
    finite = np.abs(mbar[np.isfinite(mbar)])
    if finite.size == 0:
        return 0.0
    return float(np.percentile(finite, 99.0))


def _diverging_rgb(value: float, vmax: float) -> tuple[int, int, int]:
    """Blue (negative) - white (zero) - red (positive)."""
    if vmax <= 0.0 or not math.isfinite(value):
        return 255, 255, 255
    s = max(-1.0, min(1.0, value / vmax))
    if s >= 0.0:
        level = round(255 * (1.0 - s))
        return 255, level, level
    level = round(255 * (1.0 + s))
    return level, level, 255


def _sample_lab(field: FieldImage, t_disp: float, x_disp: float) -> float:
    """Nearest lab-grid node for a display-frame position, or nan outside."""
    g, th = field.gamma, field.theta
    t = g * (t_disp + th * x_disp)
    x = g * (x_disp + th * t_disp)
    nt, nx = field.mbar.shape
    it = (t - field.t_min) / (field.t_max - field.t_min) * (nt - 1)
    ix = (x - field.x_min) / (field.x_max - field.x_min) * (nx - 1)
    if not (-0.5 <= it <= nt - 0.5 and -0.5 <= ix <= nx - 0.5):
        return math.nan
    return float(field.mbar[min(nt - 1, max(0, round(it))), min(nx - 1, max(0, round(ix)))])


class _Raster:
    def __init__(self, width: int, height: int):
        self.w, self.h = width, height
        self.pix = np.full((height, width, 3), 255, dtype=np.uint8)

    def put(self, col: int, row: int, rgb) -> None:
        if 0 <= col < self.w and 0 <= row < self.h:
            self.pix[row, col] = rgb

    def line(self, c0: int, r0: int, c1: int, r1: int, rgb) -> None:
        # Bresenham; endpoints may lie outside, put() clips.
        dc, dr = abs(c1 - c0), -abs(r1 - r0)
        sc = 1 if c0 < c1 else -1
        sr = 1 if r0 < r1 else -1
        err = dc + dr
        while True:
            self.put(c0, r0, rgb)
            if c0 == c1 and r0 == r1:
                return
            e2 = 2 * err
            if e2 >= dr:
                err += dr
                c0 += sc
            if e2 <= dc:
                err += dc
                r0 += sr

    def glyph(self, text: str, col: int, row: int, scale: int = 2) -> None:
        for ch in text:
            bitmap = _GLYPHS.get(ch)
            if bitmap is None:
                col += 6 * scale
                continue
            for r, line in enumerate(bitmap):
                for c, bit in enumerate(line):
                    if bit == "#":
                        for dr in range(scale):
                            for dc in range(scale):
                                self.put(col + c * scale + dc, row + r * scale + dr, (0, 0, 0))
            col += 6 * scale

    def ppm_bytes(self) -> bytes:
        return b"P6\n%d %d\n255\n" % (self.w, self.h) + self.pix.tobytes()


def render_ppm(field: FieldImage, trajectories: list[np.ndarray],
               labels: tuple[str, str] = ("t", "x")) -> bytes:
    """Render to a binary 8-bit PPM.  trajectories are (n, 2) arrays of
    display-frame (t, x) samples."""
    tb0, tb1, xb0, xb1 = field.display_bounds()
    aspect = (tb1 - tb0) / (xb1 - xb0)
    plot_w = _BOX
    plot_h = max(64, round(_BOX * aspect))
    width = _MARGIN_L + plot_w + _MARGIN_R
    height = _MARGIN_T + plot_h + _MARGIN_B
    img = _Raster(width, height)
    vmax = _color_scale(field.mbar)

    def to_px(t: float, x: float) -> tuple[int, int]:
        col = _MARGIN_L + round((x - xb0) / (xb1 - xb0) * (plot_w - 1))
        row = _MARGIN_T + round((tb1 - t) / (tb1 - tb0) * (plot_h - 1))
        return col, row

    for row in range(plot_h):
        t_disp = tb1 - (tb1 - tb0) * row / (plot_h - 1)
        for col in range(plot_w):
            x_disp = xb0 + (xb1 - xb0) * col / (plot_w - 1)
            val = _sample_lab(field, t_disp, x_disp)
            if math.isfinite(val):
                img.put(_MARGIN_L + col, _MARGIN_T + row, _diverging_rgb(val, vmax))

    black = (0, 0, 0)
    for poly in trajectories:
        pts = [to_px(float(t), float(x)) for t, x in poly
               if math.isfinite(t) and math.isfinite(x)]
        for (c0, r0), (c1, r1) in zip(pts, pts[1:]):
            img.line(c0, r0, c1, r1, black)

    # Axes along the left and bottom plot edges, ticks at ends and center.
    left, bottom = _MARGIN_L - 2, _MARGIN_T + plot_h + 1
    img.line(left, _MARGIN_T, left, bottom, black)
    img.line(left, bottom, _MARGIN_L + plot_w - 1, bottom, black)
    for frac in (0.0, 0.5, 1.0):
        r = _MARGIN_T + round(frac * (plot_h - 1))
        img.line(left - 4, r, left, r, black)
        c = _MARGIN_L + round(frac * (plot_w - 1))
        img.line(c, bottom, c, bottom + 4, black)
    img.glyph(labels[0], 8, _MARGIN_T + 2)
    img.glyph(labels[1], _MARGIN_L + plot_w - 14 * len(labels[1]), height - _MARGIN_B + 12)
    return img.ppm_bytes()


def render_svg(field: FieldImage, trajectories: list[np.ndarray],
               labels: tuple[str, str] = ("t", "x")) -> str:
    """Render to SVG 1.1: one polygon per lab grid cell (parallelograms in
    a boosted frame), trajectory polylines, labeled axes."""
    tb0, tb1, xb0, xb1 = field.display_bounds()
    aspect = (tb1 - tb0) / (xb1 - xb0)
    plot_w = _BOX
    plot_h = max(64.0, _BOX * aspect)
    width = _MARGIN_L + plot_w + _MARGIN_R
    height = _MARGIN_T + plot_h + _MARGIN_B
    vmax = _color_scale(field.mbar)
    g, th = field.gamma, field.theta
    nt, nx = field.mbar.shape
    ts = np.linspace(field.t_min, field.t_max, nt)
    xs = np.linspace(field.x_min, field.x_max, nx)

    def to_xy(t_lab: float, x_lab: float) -> tuple[float, float]:
        t_d = g * (t_lab - th * x_lab)
        x_d = g * (x_lab - th * t_lab)
        px = _MARGIN_L + (x_d - xb0) / (xb1 - xb0) * plot_w
        py = _MARGIN_T + (tb1 - t_d) / (tb1 - tb0) * plot_h
        return px, py

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width:.0f}" height="{height:.0f}" '
        f'viewBox="0 0 {width:.2f} {height:.2f}">',
        f'<rect width="{width:.2f}" height="{height:.2f}" fill="white"/>',
    ]
    for i in range(nt - 1):
        for k in range(nx - 1):
            val = field.mbar[i, k]
            r, gr, b = _diverging_rgb(float(val), vmax)
            corners = [to_xy(ts[i], xs[k]), to_xy(ts[i], xs[k + 1]),
                       to_xy(ts[i + 1], xs[k + 1]), to_xy(ts[i + 1], xs[k])]
            pts = " ".join(f"{cx:.2f},{cy:.2f}" for cx, cy in corners)
            out.append(f'<polygon points="{pts}" fill="rgb({r},{gr},{b})" stroke="none"/>')
    for poly in trajectories:
        pts = " ".join(
            "{:.2f},{:.2f}".format(*_display_xy(float(t), float(x), tb0, tb1, xb0, xb1,
                                                plot_w, plot_h))
            for t, x in poly if math.isfinite(t) and math.isfinite(x))
        if pts:
            out.append(f'<polyline points="{pts}" fill="none" stroke="black" stroke-width="0.8"/>')
    left = _MARGIN_L - 2
    bottom = _MARGIN_T + plot_h + 1
    out.append(f'<line x1="{left}" y1="{_MARGIN_T}" x2="{left}" y2="{bottom:.2f}" '
               'stroke="black" stroke-width="1"/>')
    out.append(f'<line x1="{left}" y1="{bottom:.2f}" x2="{_MARGIN_L + plot_w}" y2="{bottom:.2f}" '
               'stroke="black" stroke-width="1"/>')
    out.append(f'<text x="8" y="{_MARGIN_T + 12}" font-family="sans-serif" '
               f'font-size="14" font-style="italic">{labels[0]}</text>')
    out.append(f'<text x="{_MARGIN_L + plot_w - 16}" y="{height - 8:.2f}" '
               f'font-family="sans-serif" font-size="14" font-style="italic">{labels[1]}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _display_xy(t_disp, x_disp, tb0, tb1, xb0, xb1, plot_w, plot_h):
    # Trajectory samples are already display-frame coordinates.
    px = _MARGIN_L + (x_disp - xb0) / (xb1 - xb0) * plot_w
    py = _MARGIN_T + (tb1 - t_disp) / (tb1 - tb0) * plot_h
    return px, py


def _read_csv_columns(path: Path, float_cols: list[str]) -> dict[str, np.ndarray]:
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        idx = {name: header.index(name) for name in float_cols}
        data = {name: [] for name in float_cols}
        for row in reader:
            for name in float_cols:
                data[name].append(float(row[idx[name]]))
    return {name: np.array(vals) for name, vals in data.items()}


def render_from_dir(in_dir: Path, out_file: Path, boosted: bool | None = None) -> None:
    """Assemble a figure from a field/trajectory output directory.

    Raises FileNotFoundError when the expected inputs are absent and
    ValueError for an unsupported output extension.
    """
    in_dir = Path(in_dir)
    if boosted is None:
        boosted = not (in_dir / "field.csv").exists()
    field_name = "field_boosted.csv" if boosted else "field.csv"
    traj_name = "traj_boosted.csv" if boosted else "traj.csv"
    meta_path = in_dir / "meta.json"
    for name in (field_name, traj_name):
        if not (in_dir / name).exists():
            raise FileNotFoundError(f"missing input {in_dir / name}")
    if not meta_path.exists():
        raise FileNotFoundError(f"missing input {meta_path}")
    meta = json.loads(meta_path.read_text())
    grid = meta["config"]["grid"]
    theta = float(meta["config"].get("boost_theta") or 0.0) if boosted else 0.0

    field_cols = _read_csv_columns(in_dir / field_name, ["mbar_sq"])
    nt, nx = int(grid["nt"]), int(grid["nx"])
    mbar = field_cols["mbar_sq"].reshape(nt, nx)
    field = FieldImage(t_min=float(grid["t_min"]), t_max=float(grid["t_max"]),
                       x_min=float(grid["x_min"]), x_max=float(grid["x_max"]),
                       mbar=mbar, theta=theta)

    t_col, x_col = ("tp", "xp") if boosted else ("t", "x")
    cols = _read_csv_columns(in_dir / traj_name, ["traj_id", t_col, x_col])
    trajectories = []
    if cols["traj_id"].size:
        for tid in np.unique(cols["traj_id"]):
            m = cols["traj_id"] == tid
            trajectories.append(np.column_stack([cols[t_col][m], cols[x_col][m]]))

    labels = ("t'", "x'") if boosted else ("t", "x")
    suffix = Path(out_file).suffix.lower()
    if suffix == ".ppm":
        Path(out_file).write_bytes(render_ppm(field, trajectories, labels))
    elif suffix == ".svg":
        Path(out_file).write_text(render_svg(field, trajectories, labels))
    else:
        raise ValueError(f"unsupported image format {suffix!r} (use .ppm or .svg)")
