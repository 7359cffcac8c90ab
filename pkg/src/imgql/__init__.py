"""imgql: a spatial model checker for 2D images.

Specifications in the imgql language are parsed, expanded into a
hash-consed task graph, and evaluated with per-pixel kernels. Reachability
is computed by connected component labelling with pointer jumping.

>>> from imgql import compile_text, run
>>> graph = compile_text('load x = "in.png"\nsave "out.png" near(x >. 100)')
"""

from .ccl import CclConfig, flood_fill_label, label
from .errors import ConvergenceError, EvalError, ExpandError, ImgqlError, LexError, ParseError, SpecError
from .executor import RunReport, run
from .frontend import format_program, parse, parse_text, tokenize
from .image import NULL_LABEL, ImageBuffer, PixelKind, Value, load_png, save_png
from .kernels import Engine, and_k, near, not_k, or_k, threshold, volume
from .reach import reach
from .taskgraph import TaskGraph, compile_text, expand, toposort

__version__ = "0.1.0"

__all__ = [
    "CclConfig", "ConvergenceError", "Engine", "EvalError", "ExpandError", "ImageBuffer",
    "ImgqlError", "LexError", "NULL_LABEL", "ParseError", "PixelKind", "RunReport", "SpecError",
    "TaskGraph", "Value", "and_k", "compile_text", "expand", "flood_fill_label", "format_program",
    "label", "load_png", "near", "not_k", "or_k", "parse", "parse_text", "reach", "run",
    "save_png", "threshold", "tokenize", "toposort", "volume",
]
