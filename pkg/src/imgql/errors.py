"""Exception hierarchy.

Spec-level problems (anything detectable before the first kernel runs)
derive from :class:`SpecError`; failures while evaluating derive from
:class:`EvalError`. The CLI maps the two to different exit codes.
"""


class ImgqlError(Exception):
    pass


class SpecError(ImgqlError):
    """Problem with the specification text or its expansion."""

    def __init__(self, message, line=None, col=None, source=None):
        self.message = message
        self.line = line
        self.col = col
        self.source = source
        where = ""
        if source is not None:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:{col}:"
        super().__init__(f"{where} {message}" if where else message)


class LexError(SpecError):
    pass


class ParseError(SpecError):
    pass


class ExpandError(SpecError):
    pass


class EvalError(ImgqlError):
    pass


class ConvergenceError(EvalError):
    """The CCL driver exceeded its round budget."""
