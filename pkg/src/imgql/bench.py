"""Formula generators and the scaling benchmark.

Two families of large formulas are generated: *sequential* ones, a single
chain of unary operators ``near(!near(...(x)))``, and *random* ones that mix
all operators over two loaded images. The random mix is a seeded
approximation; operator weights are not calibrated against anything.

Run ``python -m imgql.bench --help`` for the command-line interface.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import hashlib
import statistics
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import synthetic
from .executor import run
from .image import PixelKind, Value, save_png
from .taskgraph import compile_text, deep_recursion

COLUMNS = ("kind", "size", "seed", "workers", "tasks", "wall_ms_mean", "wall_ms_std", "output_sha1")


def gen_sequential(depth, seed=0, image="x.png", output="o.png"):
    """A chain of ``depth`` unary operators, alternating ``near`` and ``!``,
    innermost ``near``. The chain itself does not depend on ``seed``; the
    seed only selects the input image in :func:`bench`."""
    expr = "x"
    for i in range(depth):
        expr = f"near({expr})" if i % 2 == 0 else f"!{expr}"
    return f'load x = "{image}"\nsave "{output}" {expr}\n'


def gen_random(size, seed=0, images=("a.png", "b.png"), output="o.png"):
    """A seeded random formula with exactly ``size`` operator occurrences."""
    if len(images) < 2:
        raise ValueError("need at least two images")
    rng = np.random.default_rng(seed)
    names = [f"img{i}" for i in range(len(images))]
    cmps = (">.", ">=.", "<.", "<=.")

    def gen(n):
        if n == 0:
            return str(rng.choice(names))
        if n == 1 and rng.random() < 0.4:
            return f"{rng.choice(names)} {rng.choice(cmps)} {int(rng.integers(0, 65536))}"
        kind = rng.choice(["!", "near", "&", "|", "reach"], p=[0.2, 0.2, 0.2, 0.2, 0.2])
        if kind in ("!", "near"):
            inner = gen(n - 1)
            return f"!({inner})" if kind == "!" else f"near({inner})"
        k = int(rng.integers(0, n))
        lhs, rhs = gen(k), gen(n - 1 - k)
        if kind == "reach":
            return f"reach({lhs}, {rhs})"
        return f"({lhs}) {kind} ({rhs})"

    lines = [f'load {n} = "{p}"' for n, p in zip(names, images)]
    with deep_recursion():
        body = gen(size)
    lines.append(f'save "{output}" {body}')
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class BenchSpec:
    kind: str = "sequential"  # or "random"
    size: int = 64
    seed: int = 0
    width: int = 128
    height: int = 128

    def __post_init__(self):
        if self.kind not in ("sequential", "random"):
            raise ValueError(f"unknown benchmark kind {self.kind!r}")
        if self.size < 0:
            raise ValueError("size must be non-negative")


def _digest(value):
    return hashlib.sha1(np.ascontiguousarray(value.array).tobytes()).hexdigest()


def bench(spec, repetitions=3, workers=1, workdir=None):
    """Time one generated formula; returns one row dict keyed by :data:`COLUMNS`.

    Times are the computation phase only (graph already built, inputs
    loaded inside the run), averaged over ``repetitions``.
    """
    with tempfile.TemporaryDirectory() if workdir is None else contextlib.nullcontext(workdir) as tmp:
        tmp = Path(tmp)
        images = []
        for i in range(2 if spec.kind == "random" else 1):
            path = tmp / f"in{i}.png"
            img = synthetic.blob_noise(spec.height, spec.width, spec.seed + i)
            save_png(path, Value.of_image(img, PixelKind.U16))
            images.append(str(path))
        out = str(tmp / "out.png")
        if spec.kind == "sequential":
            text = gen_sequential(spec.size, spec.seed, images[0], out)
        else:
            text = gen_random(spec.size, spec.seed, images, out)
        graph = compile_text(text)
        times, digest = [], None
        for _ in range(max(1, repetitions)):
            report = run(graph, workers=workers)
            times.append(report.total_ms)
            digest = _digest(report.outputs[graph.outputs[0]])
    return {
        "kind": spec.kind,
        "size": spec.size,
        "seed": spec.seed,
        "workers": workers,
        "tasks": len(graph),
        "wall_ms_mean": statistics.fmean(times),
        "wall_ms_std": statistics.stdev(times) if len(times) > 1 else 0.0,
        "output_sha1": digest,
    }


def write_csv(rows, fh):
    writer = csv.DictWriter(fh, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)


def gnuplot_script(csv_path, title="computation time vs formula size"):
    return (
        "set datafile separator ','\n"
        f"set title '{title}'\n"
        "set xlabel 'formula size'\n"
        "set ylabel 'time (ms)'\n"
        "set key autotitle columnhead\n"
        f"plot '{csv_path}' using 2:6:7 with yerrorlines title 'mean +- stddev'\n"
    )


def main(argv=None):
    p = argparse.ArgumentParser(prog="python -m imgql.bench", description=__doc__.split("\n\n")[0])
    p.add_argument("--kind", choices=("sequential", "random"), default="sequential")
    p.add_argument("--sizes", default="64,128,256", help="comma-separated formula sizes")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--image-size", default="128x128", help="WIDTHxHEIGHT of the input images")
    p.add_argument("--repetitions", type=int, default=3)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--csv", help="write CSV here instead of stdout")
    p.add_argument("--gnuplot", help="also write a gnuplot script plotting the CSV")
    args = p.parse_args(argv)
    w, h = (int(v) for v in args.image_size.lower().split("x"))
    rows = [
        bench(BenchSpec(args.kind, int(s), args.seed, w, h), args.repetitions, args.workers)
        for s in args.sizes.split(",") if s.strip()
    ]
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            write_csv(rows, fh)
    else:
        write_csv(rows, sys.stdout)
    if args.gnuplot:
        Path(args.gnuplot).write_text(gnuplot_script(args.csv or "bench.csv"))
    return 0


if __name__ == "__main__":
    sys.exit(main())
