"""Image buffers, runtime values and PNG input/output.

Images are plain numpy arrays indexed ``[row, col]`` with the origin at the
top left. Three pixel kinds exist:

* ``BOOL``  - ``np.bool_``, one byte per pixel
* ``U16``   - ``np.uint16``
* ``LABEL`` - ``np.int64`` packed coordinates ``row * width + col``, with
  ``NULL_LABEL`` (-1) for "no label". Integer order on packed labels is the
  row-first lexicographic order on coordinates.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import EvalError

NULL_LABEL = -1


class PixelKind(enum.Enum):
    BOOL = "bool"
    U16 = "u16"
    LABEL = "label"


_DTYPES = {PixelKind.BOOL: np.bool_, PixelKind.U16: np.uint16, PixelKind.LABEL: np.int64}


@dataclass(frozen=True, eq=False)
class ImageBuffer:
    data: np.ndarray
    kind: PixelKind

    def __post_init__(self):
        if self.data.ndim != 2 or min(self.data.shape) < 1:
            raise ValueError(f"expected a non-empty 2D array, got shape {self.data.shape}")
        if self.data.dtype != _DTYPES[self.kind]:
            raise ValueError(f"{self.kind.value} image needs dtype {np.dtype(_DTYPES[self.kind])}, "
                             f"got {self.data.dtype}")
        if self.kind is PixelKind.LABEL:
            lab = self.data
            if lab.size and (lab.min() < NULL_LABEL or lab.max() >= lab.size):
                raise ValueError("label out of image bounds")
        # freeze a view so the caller's own array stays writable
        view = self.data.view()
        view.flags.writeable = False
        object.__setattr__(self, "data", view)

    @property
    def height(self):
        return self.data.shape[0]

    @property
    def width(self):
        return self.data.shape[1]

    @property
    def shape(self):
        return self.data.shape


@dataclass(frozen=True, eq=False)
class Value:
    """Result of a task: either a number or an image."""

    number: float | None = None
    image: ImageBuffer | None = None
    components: int = 1

    @classmethod
    def of_number(cls, x):
        return cls(number=float(x))

    @classmethod
    def of_image(cls, data, kind=None, components=1):
        data = np.asarray(data)
        if kind is None:
            kind = {np.dtype(np.bool_): PixelKind.BOOL,
                    np.dtype(np.uint16): PixelKind.U16,
                    np.dtype(np.int64): PixelKind.LABEL}[data.dtype]
        return cls(image=ImageBuffer(data, kind), components=components)

    @property
    def is_number(self):
        return self.image is None

    @property
    def kind(self):
        return None if self.image is None else self.image.kind

    @property
    def array(self):
        if self.image is None:
            raise EvalError("expected an image, got a number")
        return self.image.data

    def __repr__(self):
        if self.is_number:
            return f"Value({self.number!r})"
        return f"Value({self.kind.value} {self.image.width}x{self.image.height})"


def pack(rows, cols, width):
    return np.asarray(rows, dtype=np.int64) * width + np.asarray(cols, dtype=np.int64)


def unpack(labels, width):
    """Split packed labels into (row, col) arrays; NULL entries come back as (-1, -1)."""
    labels = np.asarray(labels, dtype=np.int64)
    rows, cols = np.divmod(labels, width)
    null = labels == NULL_LABEL
    return np.where(null, -1, rows), np.where(null, -1, cols)


# ---------------------------------------------------------------- PNG


def load_png(path):
    """Load a PNG as a single-component U16 image.

    16-bit grayscale loads verbatim; 8-bit data is widened by ``v * 257``;
    colour images keep their first channel.
    """
    path = Path(path)
    try:
        with Image.open(path) as im:
            im.load()
            if im.format != "PNG":
                raise EvalError(f"{path}: not a PNG file")
            mode = im.mode
            if mode in ("1",):
                raise EvalError(f"{path}: unsupported bit depth (1-bit image)")
            if mode == "P":
                im = im.convert("RGB")
                mode = "RGB"
            arr = np.array(im)
    except (OSError, UnidentifiedImageError) as exc:
        raise EvalError(f"cannot read {path}: {exc}") from exc
    if arr.ndim == 3:
        arr = arr[..., 0]
    if arr.dtype == np.uint8:
        out = arr.astype(np.uint16) * 257
    elif mode in ("I;16", "I;16B", "I"):
        if arr.min() < 0 or arr.max() > 65535:
            raise EvalError(f"{path}: pixel values outside the 16-bit range")
        out = arr.astype(np.uint16)
    else:
        raise EvalError(f"{path}: unsupported PNG mode {mode}")
    return Value.of_image(np.ascontiguousarray(out), PixelKind.U16)


def label_colors(labels):
    """Deterministic RGB colouring of a packed label image; NULL is black."""
    labels = np.asarray(labels, dtype=np.int64)
    h = labels.astype(np.uint64) * np.uint64(0x9E3779B97F4A7C15)
    h ^= h >> np.uint64(29)
    h *= np.uint64(0xBF58476D1CE4E5B9)
    h ^= h >> np.uint64(32)
    rgb = np.stack([(h >> np.uint64(s)) & np.uint64(0xFF) for s in (0, 8, 16)], axis=-1)
    # keep labelled pixels distinguishable from the black background
    rgb = np.maximum(rgb, 32).astype(np.uint8)
    rgb[labels == NULL_LABEL] = 0
    return rgb


def save_png(path, value):
    """Write an image value. Bool -> 16-bit (0/65535), U16 verbatim, labels -> RGB."""
    if value.is_number:
        raise EvalError(f"cannot save a number to {path}; use print")
    kind, data = value.kind, value.array
    if kind is PixelKind.BOOL:
        im = Image.fromarray(data.astype(np.uint16) * np.uint16(65535))
    elif kind is PixelKind.U16:
        im = Image.fromarray(np.ascontiguousarray(data))
    else:
        im = Image.fromarray(label_colors(data))
    try:
        im.save(path, format="PNG")
    except OSError as exc:
        raise EvalError(f"cannot write {path}: {exc}") from exc
