# coding: utf-8

# # Labelling a spiral by pointer jumping
#
# Each pixel starts labelled with its own coordinate and repeatedly adopts
# the largest label found around the pixel it currently points to. Labels
# travel along a long curve in a logarithmic number of steps, but may stall
# at concave corners; the periodic `reconnect` pass unblocks them.
#
#     python demos/ccl_pointer_jumping.py [SIZE] [FRAMES_DIR]

# In[1]:

import sys
import time
from pathlib import Path

import numpy as np

from imgql import ccl
from imgql.image import PixelKind, Value, save_png
from imgql.synthetic import concave_corners, spiral

size = int(sys.argv[1]) if len(sys.argv) > 1 else 512
frames = Path(sys.argv[2]) if len(sys.argv) > 2 else None

# In[2]:

mask = spiral(size, size)
print(f"spiral {size}x{size}, {mask.sum()} set pixels")

distinct = []


def watch(iteration, labels):
    distinct.append(len(np.unique(labels[mask])))
    if frames is not None:
        frames.mkdir(parents=True, exist_ok=True)
        save_png(frames / f"frame-{len(distinct):03d}.png", Value.of_image(labels.copy(), PixelKind.LABEL))


t0 = time.perf_counter()
labels, stats = ccl.label(mask, callback=watch, return_stats=True)
print(f"{stats.main_iterations} main iterations, {stats.rounds} rounds, "
      f"{time.perf_counter() - t0:.2f}s")
print("labels modified per reconnect:", stats.reconnect_changes)

# Distinct labels after each recorded step. The count collapses quickly.

# In[3]:

print(distinct)
assert np.array_equal(labels, ccl.flood_fill_label(mask))

# Varying the number of main iterations between reconnects.

# In[4]:

for k in (1, 2, 4, 8, 16):
    _, s = ccl.label(mask, ccl.CclConfig(reconnect_interval=k), return_stats=True)
    print(f"k={k:2d}: {s.main_iterations:3d} main iterations, {s.rounds} rounds")

# The tiled concave-corner pattern is where reconnect earns its keep.

# In[5]:

tiles = concave_corners(96, 96)
_, s = ccl.label(tiles, return_stats=True)
print("concave corners: reconnect changes", s.reconnect_changes)
