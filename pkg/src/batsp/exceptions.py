"""Exception hierarchy.

Every error carries an optional ``stage`` naming the pipeline step that
raised it; :func:`batsp.solver.solve_batsp` fills it in on the way out.
"""


class BatspError(Exception):
    """Base class for all package errors."""

    exit_code = 3

    def __init__(self, message="", *, stage=None):
        super().__init__(message)
        self.stage = stage

    def __str__(self):
        msg = super().__str__()
        if self.stage:
            return f"[{self.stage}] {msg}"
        return msg


class InvalidInput(BatspError):
    exit_code = 2


class NegativeCost(InvalidInput):
    pass


class TriangleViolation(InvalidInput):
    def __init__(self, u, v, w, slack=None, **kwargs):
        self.u, self.v, self.w = int(u), int(v), int(w)
        self.slack = slack
        super().__init__(
            f"triangle inequality violated: c({u},{w}) > c({u},{v}) + c({v},{w})",
            **kwargs,
        )


class ParseError(InvalidInput):
    def __init__(self, message, *, line=None, field=None, **kwargs):
        self.line = line
        self.field = field
        where = []
        if field is not None:
            where.append(f"field {field!r}")
        if line is not None:
            where.append(f"line {line}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message, **kwargs)


class InvalidK(InvalidInput):
    pass


class SizeLimit(BatspError):
    exit_code = 4


class InfeasibleRelaxation(BatspError):
    """The Held-Karp system has no solution on the given graph.

    ``certificate`` is one of

    * ``("cut", S)``: a nonempty proper vertex set with no leaving arc;
    * ``("degree", info)``: the phase-1 LP optimum stayed positive; ``info``
      holds the residual infeasibility and the LP dual vector.
    """

    exit_code = 2

    def __init__(self, certificate, **kwargs):
        self.certificate = certificate
        kind, payload = certificate
        if kind == "cut":
            msg = f"no arc leaves vertex set {sorted(payload)}"
        else:
            msg = f"degree/cut system infeasible (residual {payload['residual']:.3g})"
        super().__init__(msg, **kwargs)


class IterationLimit(BatspError):
    pass


class InvariantViolation(BatspError):
    """An internal guarantee failed; indicates a bug or numerical trouble."""


class DisconnectedSupport(InvariantViolation):
    pass


class UnsupportedEdge(InvariantViolation):
    pass


class InfeasibleCirculation(InvariantViolation):
    def __init__(self, message, deficient=(), **kwargs):
        self.deficient = frozenset(deficient)
        super().__init__(message, **kwargs)


class NotEulerian(InvariantViolation):
    pass


class NoTransversal(InvariantViolation):
    def __init__(self, message, pieces=(), **kwargs):
        self.pieces = tuple(pieces)
        super().__init__(message, **kwargs)
