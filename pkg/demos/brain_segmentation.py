# coding: utf-8

# # Region-growing segmentation of a bright lesion
#
# The specification in `brain_segmentation.imgql` thresholds a 16-bit scan
# twice: `hI` keeps hyperintense pixels, `vI` the wider very-intense area.
# `grow(hI, vI)` then keeps every very-intense region that is in contact
# with a hyperintense one. Isolated bright specks that never touch `hI`
# are dropped.
#
# The real scan cannot be shipped, so we make a synthetic one: a bright
# disc inside a halo, on a dark background with salt noise.
#
#     python demos/brain_segmentation.py [WORKDIR]

# In[1]:

import shutil
import sys
import tempfile
from pathlib import Path

from imgql import cli
from imgql.image import load_png
from imgql.kernels import near
from imgql.synthetic import gen_synthetic_image

HERE = Path(__file__).resolve().parent
work = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp(prefix="imgql-"))
work.mkdir(parents=True, exist_ok=True)

# Paths inside a specification are relative to the specification file, so
# copy it next to the input we are about to generate.

# In[2]:

spec = work / "brain_segmentation.imgql"
shutil.copy(HERE / "brain_segmentation.imgql", spec)
img = gen_synthetic_image("blob-noise", 256, 256, 7, work / "normalised-MRI-flair.png")
print(spec.read_text())

# Threshold counts: the disc is hyperintense, the halo only very intense,
# and the salt specks sit at halo intensity far from the disc.

# In[3]:

hI, vI = img > 62258, img > 56360
print("hyperintense pixels:", hI.sum(), " very intense pixels:", vI.sum())

# In[4]:

code = cli.main([str(spec), "--workers", "0"])
print("exit code", code)
seg = load_png(work / "segmentation.png").array > 0

# The very-intense pixels that were dropped are the noise. None of them
# lies next to the kept region.

# In[5]:

dropped = vI & ~seg
print("kept:", seg.sum(), " dropped as noise:", dropped.sum())
print("dropped pixels adjacent to kept region:", (dropped & near(seg)).sum())
print("written to", work)

# Show a coarse view of the result: `#` kept, `.` dropped noise.

# In[6]:

step = max(1, seg.shape[0] // 48)
for r in range(0, seg.shape[0], step * 2):
    row = seg[r, ::step]
    noise = dropped[r:r + step * 2, :].reshape(-1, seg.shape[1])[:, ::step].any(axis=0)
    print("".join("#" if k else ("." if n else " ") for k, n in zip(row, noise)))
