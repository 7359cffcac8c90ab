"""Deterministic synthetic 16-bit test images."""

from __future__ import annotations

import numpy as np

from .image import PixelKind, Value, save_png

KINDS = ("blob-noise", "spiral", "checker", "concave-corner")

MAX16 = 65535


def spiral(h, w):
    """A single 1-pixel-wide square spiral with 1-pixel gaps between arms."""
    a = np.zeros((h, w), dtype=bool)
    k = 0
    col0 = 0
    while True:
        top, left, bottom, right = 2 * k, 2 * k, h - 1 - 2 * k, w - 1 - 2 * k
        if top > bottom or col0 > right:
            break
        a[top, col0:right + 1] = True
        if top + 1 > bottom:
            break
        a[top:bottom + 1, right] = True
        if left >= right:
            break
        a[bottom, left:right + 1] = True
        if bottom - 1 < top + 2:
            break
        a[top + 2:bottom + 1, left] = True
        col0 = left
        k += 1
    return a


def concave_tile(size=6):
    """An arch: a top bar with two legs, separated from neighbouring tiles by
    a blank row and column. Its top corners are concave corners, and the
    two leg tips are competing local maxima for pointer jumping."""
    t = np.zeros((size, size), dtype=bool)
    n = size - 1
    t[0, :n] = True
    t[:n, 0] = True
    t[:n, n - 1] = True
    return t


def concave_corners(h, w, size=6):
    reps = (-(-h // size), -(-w // size))
    return np.tile(concave_tile(size), reps)[:h, :w]


def checker(h, w):
    r, c = np.indices((h, w))
    return ((r + c) % 2 == 0)


def blob_noise(h, w, seed=0, noise=0.02):
    """Bright disc inside a fainter halo on a dark background, plus salt noise.

    Intensities are chosen around the two thresholds of the brain
    segmentation example: the disc is above 0.95 * 65535, the halo and the
    noise lie between 0.86 * 65535 and 0.95 * 65535, and the background is
    well below both.
    """
    rng = np.random.default_rng(seed)
    img = rng.integers(5000, 30000, size=(h, w), dtype=np.int64)
    r, c = np.indices((h, w))
    cy, cx = h / 2 - 0.5, w / 2 - 0.5
    d = np.hypot(r - cy, c - cx)
    rad = min(h, w)
    halo = d <= 0.30 * rad
    disc = d <= 0.12 * rad
    img[halo] = rng.integers(57000, 61000, size=int(halo.sum()))
    img[disc] = rng.integers(63000, MAX16 + 1, size=int(disc.sum()))
    # salt: specks at halo intensity away from the lesion, which region
    # growing must drop because they touch no hyperintense pixel
    salt = (rng.random((h, w)) < noise) & (d > 0.40 * rad)
    img[salt] = rng.integers(57000, 61000, size=int(salt.sum()))
    # a larger patch of the same kind
    pr, pc = int(0.15 * h), int(0.15 * w)
    patch = (np.abs(r - pr) <= max(1, h // 32)) & (np.abs(c - pc) <= max(1, w // 32))
    img[patch] = 58000
    return img.astype(np.uint16)


def generate(kind, w, h, seed=0):
    """Return a ``(h, w)`` uint16 image of the given kind."""
    if kind == "blob-noise":
        return blob_noise(h, w, seed)
    if kind == "spiral":
        mask = spiral(h, w)
    elif kind == "checker":
        mask = checker(h, w)
    elif kind == "concave-corner":
        mask = concave_corners(h, w)
    else:
        raise ValueError(f"unknown image kind {kind!r}; expected one of {KINDS}")
    return mask.astype(np.uint16) * np.uint16(MAX16)


def gen_synthetic_image(kind, w, h, seed, path):
    img = generate(kind, w, h, seed)
    save_png(path, Value.of_image(img, PixelKind.U16))
    return img
