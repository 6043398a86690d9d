"""Phase plots and basin images as plain 8-bit RGB rasters.

Pixel ``(i, j)`` samples the center of its cell; row 0 is the top of the
window (``y_max``), as in any image file.  Output is deterministic, so PPM
files double as golden files in tests.
"""
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from matplotlib.colors import hsv_to_rgb

__all__ = [
    "RasterImage",
    "phase_color",
    "phase_colors",
    "pixel_centers",
    "render_phase",
    "basin_palette",
    "render_basins",
    "overlay_dots",
    "write_ppm",
    "read_ppm",
    "write_png",
    "save_image",
]

GOLDEN_FRACTION = (3 - math.sqrt(5)) / 2  # golden angle / 360 degrees
MIN_SHADE = 0.25
WHITE = (255, 255, 255)
BLACK = (0, 0, 0)


@dataclass(frozen=True, eq=False)
class RasterImage:
    width: int
    height: int
    window: tuple
    pixels: np.ndarray

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("image dimensions must be positive")
        if self.pixels.shape != (self.height, self.width, 3) or self.pixels.dtype != np.uint8:
            raise ValueError(f"pixels must be uint8 of shape {(self.height, self.width, 3)}")

    def __eq__(self, other):
        return (isinstance(other, RasterImage) and self.window == other.window
                and np.array_equal(self.pixels, other.pixels))

    def to_bytes(self):
        return self.pixels.tobytes()


def _to_uint8(rgb):
    return np.clip(np.rint(rgb * 255), 0, 255).astype(np.uint8)


def phase_colors(w, zero_threshold=0.0):
    """Vectorized :func:`phase_color`; returns ``uint8`` of shape ``w.shape + (3,)``."""
    w = np.asarray(w, dtype=complex)
    finite = np.isfinite(w)
    hue = np.mod(np.angle(np.where(finite, w, 1)) / (2 * np.pi), 1.0)
    hsv = np.stack([hue, np.ones_like(hue), np.ones_like(hue)], axis=-1)
    out = _to_uint8(hsv_to_rgb(hsv))
    out[finite & (np.abs(np.where(finite, w, 1)) <= zero_threshold)] = BLACK
    out[~finite] = WHITE
    return out


def phase_color(w, zero_threshold=0.0):
    """RGB triple for the phase of ``w``: red at 0, yellow, green, ... counterclockwise.

    Non-finite values are white and ``|w| <= zero_threshold`` is black.
    """
    return tuple(int(c) for c in phase_colors(complex(w), zero_threshold))


def _check_window(window):
    x_min, x_max, y_min, y_max = (float(v) for v in window)
    if not (x_min < x_max and y_min < y_max):
        raise ValueError(f"degenerate window {window}")
    return x_min, x_max, y_min, y_max


def pixel_centers(width, height, window):
    """Complex sample points, shape ``(height, width)``, top row at ``y_max``."""
    if int(width) != width or int(height) != height or width < 1 or height < 1:
        raise ValueError("width and height must be positive integers")
    x_min, x_max, y_min, y_max = _check_window(window)
    xs = x_min + (np.arange(width) + 0.5) * (x_max - x_min) / width
    ys = y_max - (np.arange(height) + 0.5) * (y_max - y_min) / height
    return xs[None, :] + 1j * ys[:, None]


def render_phase(func, width, height, window, zero_threshold=0.0):
    """Phase plot of ``func`` (a :class:`HarmonicMap` or any vectorized callable)."""
    z = pixel_centers(width, height, window)
    with np.errstate(all="ignore"):
        w = np.broadcast_to(np.asarray(func(z.reshape(-1)), dtype=complex), (z.size,))
    pixels = phase_colors(w.reshape(z.shape), zero_threshold)
    return RasterImage(int(width), int(height), _check_window(window), pixels)


def basin_palette(n, palette_seed=0):
    """``n`` base colors, hues stepped by the golden angle starting from ``palette_seed``."""
    k = np.arange(n) + int(palette_seed)
    hue = np.mod(k * GOLDEN_FRACTION, 1.0)
    return hsv_to_rgb(np.stack([hue, np.full(n, 0.85), np.ones(n)], axis=-1))


def render_basins(labeling, palette_seed=0, max_shade_iters=50):
    """Color each grid point by its zero, darker for more iterations; -1 is black.

    The labeling grid has ``y`` ascending, so it is flipped to put ``y_max``
    on top.
    """
    if max_shade_iters < 1:
        raise ValueError("max_shade_iters must be positive")
    labels = np.asarray(labeling.labels)
    iters = np.asarray(labeling.iteration_counts)
    height, width = labels.shape
    base = basin_palette(max(len(labeling.zeros), 1), palette_seed)
    shade = np.maximum(MIN_SHADE, 1 - iters / max_shade_iters)
    rgb = base[np.clip(labels, 0, None)] * shade[..., None]
    pixels = _to_uint8(rgb)
    pixels[labels < 0] = BLACK
    window = labeling.window or (0.0, float(width), 0.0, float(height))
    return RasterImage(width, height, tuple(window), np.ascontiguousarray(pixels[::-1]))


def overlay_dots(img, points, color=BLACK, radius_px=2):
    """Copy of ``img`` with filled discs at ``points`` (zeros, poles, ...)."""
    pixels = img.pixels.copy()
    x_min, x_max, y_min, y_max = img.window
    jj, ii = np.meshgrid(np.arange(img.width), np.arange(img.height))
    for p in np.atleast_1d(np.asarray(points, dtype=complex)):
        if not np.isfinite(p):
            continue
        cj = (p.real - x_min) / (x_max - x_min) * img.width - 0.5
        ci = (y_max - p.imag) / (y_max - y_min) * img.height - 0.5
        pixels[(jj - cj) ** 2 + (ii - ci) ** 2 <= radius_px ** 2] = color
    return RasterImage(img.width, img.height, img.window, pixels)


def write_ppm(img, path):
    header = f"P6\n{img.width} {img.height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + img.to_bytes())


def read_ppm(path):
    """Pixels of a binary PPM written by :func:`write_ppm`."""
    data = Path(path).read_bytes()
    parts = data.split(b"\n", 3)
    if parts[0] != b"P6" or parts[2] != b"255":
        raise ValueError(f"{path}: not an 8-bit P6 file")
    width, height = (int(v) for v in parts[1].split())
    return np.frombuffer(parts[3], np.uint8).reshape(height, width, 3)


def write_png(img, path):
    from PIL import Image

    Image.fromarray(img.pixels, "RGB").save(path)


def save_image(img, path):
    """Write ``.png`` through Pillow, anything else as PPM."""
    if str(path).lower().endswith(".png"):
        write_png(img, path)
    else:
        write_ppm(img, path)
