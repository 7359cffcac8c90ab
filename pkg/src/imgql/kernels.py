"""Data-parallel per-pixel kernels.

Every kernel writes a fresh output buffer and reads only its inputs, so the
row range of the output can be split across workers in any way. The
:class:`Engine` does that split; with ``workers=1`` everything runs inline.

Boolean kernels accept U16 images too and read them as ``pixel != 0``.
"""

from __future__ import annotations

import operator
import os
import threading
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import EvalError


class Engine:
    """Runs kernels over row bands, optionally on a thread pool.

    Launches are counted so callers can check that a computation did not
    run more kernels than expected.
    """

    def __init__(self, workers=1, min_rows=16):
        if workers < 1:
            raise ValueError("workers must be >= 1")
        self.workers = workers
        self.min_rows = min_rows
        self.launches = 0
        self._count_lock = threading.Lock()
        self._pool = ThreadPoolExecutor(workers, thread_name_prefix="imgql") if workers > 1 else None

    def close(self):
        if self._pool is not None:
            self._pool.shutdown(wait=True)
            self._pool = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    @property
    def pool(self):
        return self._pool

    def bands(self, height):
        n = max(1, min(self.workers, height // max(self.min_rows, 1)))
        edges = np.linspace(0, height, n + 1).astype(int)
        return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]

    def parallel_for(self, items, fn):
        """Call ``fn(item)`` for every item and return the results in order.

        The calling thread takes part in the work and never waits on a
        helper that has not started, so nesting inside pool tasks is safe.
        """
        items = list(items)
        results = [None] * len(items)
        if self._pool is None or len(items) <= 1:
            for i, it in enumerate(items):
                results[i] = fn(it)
            return results
        lock = threading.Lock()
        todo = iter(range(len(items)))
        errors = []

        def drain():
            while True:
                with lock:
                    i = next(todo, None)
                if i is None:
                    return
                try:
                    results[i] = fn(items[i])
                except BaseException as exc:  # re-raised in the caller
                    errors.append(exc)
                    return

        helpers = [self._pool.submit(drain) for _ in range(min(self.workers, len(items)) - 1)]
        drain()
        for h in helpers:
            if not h.cancel():
                h.result()
        if errors:
            raise errors[0]
        return results

    def launch(self, shape, dtype, kernel):
        """Allocate an output of ``shape`` and fill it with ``kernel(out, r0, r1)`` per band."""
        with self._count_lock:
            self.launches += 1
        out = np.empty(shape, dtype=dtype)
        self.parallel_for(self.bands(shape[0]), lambda band: kernel(out, *band))
        return out

    def reduce_any(self, height, predicate):
        """Parallel OR-reduction of ``predicate(r0, r1)`` over row bands."""
        with self._count_lock:
            self.launches += 1
        return any(self.parallel_for(self.bands(height), lambda band: bool(predicate(*band))))


_default_engine = Engine(1)


def default_workers():
    return os.cpu_count() or 1


def _engine(engine):
    return _default_engine if engine is None else engine


def as_bool(a):
    a = np.asarray(a)
    return a if a.dtype == np.bool_ else a != 0


def check_same_shape(*arrays):
    shapes = {np.shape(a) for a in arrays}
    if len(shapes) > 1:
        raise EvalError(f"image dimensions differ: {sorted(shapes)}")


def window_reduce(a, r0, r1, ufunc, fill):
    """Reduce the clipped 3x3 window around each pixel of rows ``r0:r1``.

    Pixels outside the image act as ``fill``, which must be the identity of
    ``ufunc`` so clipping and padding agree.
    """
    h, w = a.shape
    lo, hi = max(r0 - 1, 0), min(r1 + 1, h)
    block = np.full((r1 - r0 + 2, w + 2), fill, dtype=a.dtype)
    block[lo - r0 + 1:hi - r0 + 1, 1:-1] = a[lo:hi]
    n = r1 - r0
    out = block[1:n + 1, 1:w + 1].copy()
    for dr in range(3):
        for dc in range(3):
            if dr == 1 and dc == 1:
                continue
            ufunc(out, block[dr:dr + n, dc:dc + w], out=out)
    return out


# ---------------------------------------------------------------- boolean


def not_k(a, engine=None):
    a = as_bool(a)

    def k(out, r0, r1):
        np.logical_not(a[r0:r1], out=out[r0:r1])

    return _engine(engine).launch(a.shape, np.bool_, k)


def _binary_bool(ufunc):
    def kernel(a, b, engine=None):
        a, b = as_bool(a), as_bool(b)
        check_same_shape(a, b)

        def k(out, r0, r1):
            ufunc(a[r0:r1], b[r0:r1], out=out[r0:r1])

        return _engine(engine).launch(a.shape, np.bool_, k)

    return kernel


and_k = _binary_bool(np.logical_and)
and_k.__name__ = "and_k"
or_k = _binary_bool(np.logical_or)
or_k.__name__ = "or_k"


def near(a, engine=None):
    """Moore dilation: a pixel is set if any pixel of its 3x3 window is set."""
    a = as_bool(a)

    def k(out, r0, r1):
        out[r0:r1] = window_reduce(a, r0, r1, np.logical_or, False)

    return _engine(engine).launch(a.shape, np.bool_, k)


# ---------------------------------------------------------------- numeric

THRESHOLDS = {
    ">.": np.greater,
    ">=.": np.greater_equal,
    "<.": np.less,
    "<=.": np.less_equal,
    "=.": np.equal,
}


def threshold(op, img, n, engine=None):
    """Compare each pixel with the real number ``n``."""
    cmp = THRESHOLDS[op]
    img = np.asarray(img)
    n = float(n)

    def k(out, r0, r1):
        # float64 holds every uint16 exactly, so this is the real comparison
        cmp(img[r0:r1].astype(np.float64), n, out=out[r0:r1])

    return _engine(engine).launch(img.shape, np.bool_, k)


ARITH = {
    "+": operator.add,
    "-": operator.sub,
    "*": operator.mul,
    "/": operator.truediv,
}


def arith(op, x, y):
    if op == "/" and y == 0:
        raise EvalError("division by zero")
    return float(ARITH[op](float(x), float(y)))


def intensity(img, components=1):
    if components != 1:
        raise EvalError(f"intensity expects a single-component image, got {components} components")
    return img


def volume(a, engine=None):
    a = as_bool(a)
    counts = _engine(engine).parallel_for(
        _engine(engine).bands(a.shape[0]), lambda band: int(np.count_nonzero(a[band[0]:band[1]])))
    return float(sum(counts))
