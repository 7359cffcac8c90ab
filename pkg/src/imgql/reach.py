"""Reachability on top of labelling and dilation.

``reach(target, through)`` holds at ``x`` when some Moore path starts at
``x``, ends on a ``target`` pixel, and every pixel strictly between the two
ends is in ``through``. Paths of length 0 or 1 are covered by
``near(target)``; longer ones leave ``x`` into a component of ``through``
that itself touches ``near(target)``, so the answer is::

    near(target) | near(union of through-components meeting near(target))
"""

from __future__ import annotations

import threading

import numpy as np

from . import ccl
from .image import NULL_LABEL
from .kernels import _engine, as_bool, check_same_shape, near, or_k


def components_meeting(through, mask, config=None, engine=None, callback=None):
    """Pixels of ``through`` whose component intersects ``mask``."""
    through, mask = as_bool(through), as_bool(mask)
    check_same_shape(through, mask)
    eng = _engine(engine)
    labels = ccl.label(through, config, eng, callback=callback)
    flags = np.zeros(through.size, dtype=bool)
    lock = threading.Lock()

    def mark(band):
        r0, r1 = band
        hit = labels[r0:r1][mask[r0:r1] & through[r0:r1]]
        if hit.size:
            # setting True is idempotent; the lock only guards the shared buffer
            with lock:
                flags[hit] = True

    eng.parallel_for(eng.bands(through.shape[0]), mark)

    def select(out, r0, r1):
        lab = labels[r0:r1]
        out[r0:r1] = (lab != NULL_LABEL) & flags[np.maximum(lab, 0)]

    return eng.launch(through.shape, np.bool_, select)


def reach(target, through, config=None, engine=None, callback=None):
    target, through = as_bool(target), as_bool(through)
    check_same_shape(target, through)
    eng = _engine(engine)
    near_target = near(target, eng)
    seeds = components_meeting(through, near_target, config, eng, callback)
    return or_k(near_target, near(seeds, eng), eng)
