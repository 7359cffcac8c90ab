"""Evaluation of task graphs.

Tasks are dispatched as soon as their dependencies are done. With more than
one worker, ready tasks run concurrently on the engine's thread pool and the
kernels inside them split their pixel rows over the same pool.
"""

from __future__ import annotations

import logging
import sys
import threading
import time
from concurrent.futures import FIRST_COMPLETED, wait
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels as K
from .ccl import CclConfig
from .errors import EvalError
from .image import PixelKind, Value, load_png, save_png
from .reach import reach
from .taskgraph import toposort

log = logging.getLogger("imgql")


class TaskFailed(EvalError):
    def __init__(self, node, opcode, cause):
        self.node = node
        self.opcode = opcode
        self.cause = cause
        super().__init__(f"task {node} ({opcode}) failed: {cause}")


@dataclass
class Event:
    node: int
    opcode: str
    start: float
    end: float

    @property
    def millis(self):
        return (self.end - self.start) * 1000.0


@dataclass
class RunReport:
    outputs: dict = field(default_factory=dict)  # output node id -> Value
    events: list = field(default_factory=list)
    evaluations: list = field(default_factory=list)  # per node
    printed: list = field(default_factory=list)
    saved: list = field(default_factory=list)
    total_ms: float = 0.0
    workers: int = 1
    values: dict | None = None  # every node's Value when keep_values=True

    @property
    def task_count(self):
        return len(self.evaluations)

    def completion_events(self):
        return sorted(self.events, key=lambda ev: (ev.end, ev.node))

    def to_json(self):
        return {
            "workers": self.workers,
            "tasks": self.task_count,
            "total_ms": self.total_ms,
            "evaluations": self.evaluations,
            "saved": self.saved,
            "printed": self.printed,
            "events": [
                {"node": ev.node, "opcode": ev.opcode, "start": ev.start, "end": ev.end,
                 "ms": ev.millis}
                for ev in self.completion_events()
            ],
        }


def completion_events(report):
    return report.completion_events()


def _image(v, what="argument"):
    if v.is_number:
        raise EvalError(f"{what} must be an image, got a number")
    if v.components != 1:
        raise EvalError(f"{what} has {v.components} components; only single-component images are supported")
    return v.array


def _number(v):
    if not v.is_number:
        raise EvalError("expected a number, got an image")
    return v.number


class _Context:
    def __init__(self, engine, ccl_config, debug_ccl, emit):
        self.engine = engine
        self.ccl_config = ccl_config
        self.debug_ccl = Path(debug_ccl) if debug_ccl else None
        self.emit = emit
        self.lock = threading.Lock()
        self.printed = []
        self.saved = []

    def ccl_callback(self, node):
        if self.debug_ccl is None:
            return None
        self.debug_ccl.mkdir(parents=True, exist_ok=True)

        def dump(iteration, labels):
            path = self.debug_ccl / f"ccl-{node:04d}-{iteration:03d}.png"
            save_png(path, Value.of_image(labels.copy(), PixelKind.LABEL))

        return dump


def _evaluate(node, task, args, ctx):
    op = task.opcode
    eng = ctx.engine
    if op == "const":
        return Value.of_number(task.payload)
    if op == "load":
        return load_png(task.payload)
    if op == "save":
        (v,) = args
        log.info("saving file %s", task.payload)
        save_png(task.payload, v)
        with ctx.lock:
            ctx.saved.append(str(task.payload))
        return v
    if op == "print":
        (v,) = args
        line = f"{task.payload}={_number(v):.6g}"
        with ctx.lock:
            ctx.printed.append(line)
        ctx.emit(line)
        return v
    if op in K.ARITH:
        return Value.of_number(K.arith(op, _number(args[0]), _number(args[1])))
    if op == "neg":
        return Value.of_number(-_number(args[0]))
    if op in K.THRESHOLDS:
        img = _image(args[0])
        if img.dtype != np.uint16:
            raise EvalError(f"threshold {op} needs a 16-bit image")
        return Value.of_image(K.threshold(op, img, _number(args[1]), eng))
    if op == "intensity":
        v = args[0]
        _image(v)
        return Value.of_image(K.intensity(v.array, v.components))
    if op == "volume":
        return Value.of_number(K.volume(_image(args[0]), eng))
    if op == "not":
        return Value.of_image(K.not_k(_image(args[0]), eng))
    if op == "and":
        return Value.of_image(K.and_k(_image(args[0]), _image(args[1]), eng))
    if op == "or":
        return Value.of_image(K.or_k(_image(args[0]), _image(args[1]), eng))
    if op == "near":
        return Value.of_image(K.near(_image(args[0]), eng))
    if op == "reach":
        target, through = _image(args[0]), _image(args[1])
        return Value.of_image(reach(target, through, ctx.ccl_config, eng, ctx.ccl_callback(node)))
    raise EvalError(f"unknown opcode {op!r}")


def run(graph, workers=1, ccl_config=None, engine=None, keep_values=False,
        debug_ccl=None, emit=None):
    """Evaluate every task of ``graph`` once.

    ``emit`` receives ``print`` lines (default: stdout). With
    ``keep_values`` the report holds every node's value; otherwise values
    are dropped once their last user has finished.
    """
    own_engine = engine is None
    if own_engine:
        engine = K.Engine(workers)
    if emit is None:
        def emit(line):
            sys.stdout.write(line + "\n")
    ctx = _Context(engine, ccl_config or CclConfig(), debug_ccl, emit)
    n = len(graph)
    users = graph.dependents()
    waiting = [len(set(t.deps)) for t in graph.tasks]
    pending_users = [len(set(u)) for u in users]
    values = [None] * n
    evaluations = [0] * n
    events = []
    outputs = set(graph.outputs)
    report = RunReport(workers=engine.workers)

    def execute(node):
        task = graph.tasks[node]
        args = [values[d] for d in task.deps]
        t0 = time.perf_counter()
        try:
            value = _evaluate(node, task, args, ctx)
        except Exception as exc:
            raise TaskFailed(node, task.opcode, exc) from exc
        return value, Event(node, task.opcode, t0, time.perf_counter())

    def finish(node, value, event):
        values[node] = value
        evaluations[node] += 1
        events.append(event)
        ready = []
        for u in sorted(set(users[node])):
            waiting[u] -= 1
            if waiting[u] == 0:
                ready.append(u)
        if not keep_values:
            for d in set(graph.tasks[node].deps):
                pending_users[d] -= 1
                if pending_users[d] == 0 and d not in outputs:
                    values[d] = None
        return ready

    log.info("starting computation")
    started = time.perf_counter()
    try:
        if engine.pool is None:
            for node in toposort(graph):
                finish(node, *execute(node))
        else:
            ready = [i for i in range(n) if waiting[i] == 0]
            running = {}
            failure = None
            while ready or running:
                if failure is None:
                    for node in ready:
                        running[engine.pool.submit(execute, node)] = node
                ready = []
                done, _ = wait(list(running), return_when=FIRST_COMPLETED)
                for fut in sorted(done, key=lambda f: running[f]):
                    node = running.pop(fut)
                    try:
                        value, event = fut.result()
                    except TaskFailed as exc:
                        failure = failure or exc
                        continue
                    ready.extend(finish(node, value, event))
            if failure is not None:
                raise failure
    finally:
        if own_engine:
            engine.close()
    report.total_ms = (time.perf_counter() - started) * 1000.0
    for ev in events:
        log.info("task %d %s %.3fms", ev.node, ev.opcode, ev.millis)
    report.events = events
    report.evaluations = evaluations
    report.printed = ctx.printed
    report.saved = ctx.saved
    report.outputs = {i: values[i] for i in graph.outputs}
    if keep_values:
        report.values = dict(enumerate(values))
    return report
