# coding: utf-8

# # Time against formula size
#
# Sequential formulas are a single chain `near(!near(...(x)))`; random ones
# mix every operator over two images. Thanks to hash-consing, the task graph
# of a sequential formula of depth N has exactly N + 2 nodes, and time
# should grow about linearly with N.
#
#     python demos/scaling_benchmark.py [OUT.csv]

# In[1]:

import sys

from imgql.bench import BenchSpec, bench, gnuplot_script, write_csv

out = sys.argv[1] if len(sys.argv) > 1 else None

# In[2]:

rows = []
for kind, sizes in (("sequential", (64, 128, 256, 512)), ("random", (16, 64, 256))):
    for n in sizes:
        row = bench(BenchSpec(kind, n, seed=0, width=256, height=256), repetitions=3)
        rows.append(row)
        print(f"{kind:10s} size={n:4d} tasks={row['tasks']:4d} "
              f"{row['wall_ms_mean']:8.1f} +- {row['wall_ms_std']:.1f} ms")

# Ratio of consecutive sequential timings. Doubling the depth should cost
# roughly twice as much.

# In[3]:

seq = [r for r in rows if r["kind"] == "sequential"]
for a, b in zip(seq, seq[1:]):
    print(f"{a['size']} -> {b['size']}: x{b['wall_ms_mean'] / a['wall_ms_mean']:.2f}")

# In[4]:

if out:
    with open(out, "w", newline="") as fh:
        write_csv(rows, fh)
    with open(out + ".gp", "w") as fh:
        fh.write(gnuplot_script(out))
    print("wrote", out, "and", out + ".gp")
