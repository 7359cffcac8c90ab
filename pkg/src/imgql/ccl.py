"""Connected component labelling by iterated pointer jumping.

Labels are pixel coordinates packed into int64 (see :mod:`imgql.image`), so
the lexicographic maximum of two coordinates is the integer maximum of their
packed forms and a single atomic-max primitive is enough for ``reconnect``.

The driver alternates batches of ``main_iteration`` with a ``reconnect``
pass and stops as soon as no set pixel has a set Moore neighbour carrying a
different label. On exit each component is labelled with its own
lexicographically largest coordinate.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import ConvergenceError
from .image import NULL_LABEL
from .kernels import _engine, as_bool, window_reduce


@dataclass
class CclConfig:
    reconnect_interval: int = 8
    max_rounds: int | None = None  # None: 4 * (width + height)

    def __post_init__(self):
        if self.reconnect_interval < 1:
            raise ValueError("reconnect_interval must be >= 1")
        if self.max_rounds is not None and self.max_rounds < 1:
            raise ValueError("max_rounds must be >= 1")

    def rounds_for(self, shape):
        if self.max_rounds is not None:
            return self.max_rounds
        return 4 * (shape[0] + shape[1])


@dataclass
class CclStats:
    main_iterations: int = 0
    rounds: int = 0
    # labels modified by each reconnect pass, in order
    reconnect_changes: list = field(default_factory=list)

    @property
    def reconnect_modified(self):
        return any(c > 0 for c in self.reconnect_changes)


def initialization(start, engine=None):
    start = as_bool(start)
    w = start.shape[1]

    def k(out, r0, r1):
        idx = np.arange(r0 * w, r1 * w, dtype=np.int64).reshape(r1 - r0, w)
        out[r0:r1] = np.where(start[r0:r1], idx, NULL_LABEL)

    return _engine(engine).launch(start.shape, np.int64, k)


def max_neighbour(labels, i, j):
    """Largest non-NULL label in the clipped 3x3 window at (i, j), or NULL."""
    h, w = labels.shape
    window = labels[max(i - 1, 0):min(i + 2, h), max(j - 1, 0):min(j + 2, w)]
    return int(window.max())


def max_neighbour_image(labels, engine=None):
    """:func:`max_neighbour` evaluated at every pixel."""

    def k(out, r0, r1):
        out[r0:r1] = window_reduce(labels, r0, r1, np.maximum, NULL_LABEL)

    return _engine(engine).launch(labels.shape, np.int64, k)


def main_iteration(start, labels, engine=None):
    """One pointer-jumping step: each set pixel adopts the largest label
    found around the pixel it currently points to."""
    start = as_bool(start)
    best = max_neighbour_image(labels, engine).ravel()

    def k(out, r0, r1):
        lab = labels[r0:r1]
        out[r0:r1] = np.where(start[r0:r1], best[np.maximum(lab, 0)], NULL_LABEL)

    return _engine(engine).launch(labels.shape, np.int64, k)


def reconnect(start, labels, engine=None):
    """Push the largest label seen around each pixel onto the pixel it points to.

    Returns ``(new_labels, n_changed)``. Writes from different bands may hit
    the same cell; they are combined with an atomic maximum, so the result
    does not depend on their order.
    """
    start = as_bool(start)
    eng = _engine(engine)
    best = max_neighbour_image(labels, eng)
    flat_in = labels.ravel()
    out = labels.copy()
    flat_out = out.ravel()
    lock = threading.Lock()

    def k(band):
        r0, r1 = band
        s = start[r0:r1]
        target = labels[r0:r1][s]
        cand = best[r0:r1][s]
        sel = cand > flat_in[target]
        if sel.any():
            with lock:
                np.maximum.at(flat_out, target[sel], cand[sel])

    with eng._count_lock:
        eng.launches += 1
    eng.parallel_for(eng.bands(labels.shape[0]), k)
    return out, int(np.count_nonzero(out != labels))


def _differs_from_neighbour(start, labels, r0, r1):
    h, w = labels.shape
    lo, hi = max(r0 - 1, 0), min(r1 + 1, h)
    block = np.full((r1 - r0 + 2, w + 2), NULL_LABEL, dtype=np.int64)
    block[lo - r0 + 1:hi - r0 + 1, 1:-1] = labels[lo:hi]
    n = r1 - r0
    own = labels[r0:r1]
    s = start[r0:r1]
    for dr in range(3):
        for dc in range(3):
            nb = block[dr:dr + n, dc:dc + w]
            if np.any(s & (nb != NULL_LABEL) & (nb != own)):
                return True
    return False


def termination_check(start, labels, engine=None):
    """True when no set pixel has a set neighbour with a different label."""
    start = as_bool(start)
    return not _engine(engine).reduce_any(
        labels.shape[0], lambda r0, r1: _differs_from_neighbour(start, labels, r0, r1))


def label(start, config=None, engine=None, callback=None, return_stats=False):
    """Label the 8-connected components of ``start``.

    ``callback(iteration, labels)`` is invoked after initialization
    (iteration 0) and after every main iteration and reconnect; it is meant
    for debugging dumps.
    """
    start = as_bool(start)
    config = config or CclConfig()
    eng = _engine(engine)
    stats = CclStats()
    max_rounds = config.rounds_for(start.shape)

    labels = initialization(start, eng)
    if callback is not None:
        callback(0, labels)
    while True:
        if stats.rounds >= max_rounds:
            raise ConvergenceError(
                f"labelling did not converge within {max_rounds} rounds "
                f"({stats.main_iterations} main iterations)")
        stats.rounds += 1
        for _ in range(config.reconnect_interval):
            new = main_iteration(start, labels, eng)
            stats.main_iterations += 1
            if np.array_equal(new, labels):
                # fixed point: the rest of the batch would be no-ops
                break
            labels = new
            if callback is not None:
                callback(stats.main_iterations, labels)
        labels, changed = reconnect(start, labels, eng)
        stats.reconnect_changes.append(changed)
        if changed and callback is not None:
            callback(stats.main_iterations, labels)
        if termination_check(start, labels, eng):
            break
    return (labels, stats) if return_stats else labels


def flood_fill_label(start):
    """Reference labelling with the same canonical labels as :func:`label`.

    Components come from ``scipy.ndimage.label`` with a full 3x3 structure;
    each is then renamed to its largest packed coordinate.
    """
    start = as_bool(start)
    comp, n = ndimage.label(start, structure=np.ones((3, 3), dtype=bool))
    top = np.full(n + 1, NULL_LABEL, dtype=np.int64)
    np.maximum.at(top, comp.ravel(), np.arange(start.size, dtype=np.int64))
    return np.where(start, top[comp], NULL_LABEL)
