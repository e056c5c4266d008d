"""Exception hierarchy shared by every cpx module."""


class CpxError(Exception):
    """Base class for all library errors."""


class ModelError(CpxError):
    """A structural causal model is malformed."""


class CyclicModel(ModelError):
    pass


class PartialFunction(ModelError):
    pass


class BadDistribution(ModelError):
    pass


class BadDomain(ModelError):
    pass


class UnknownVariable(CpxError):
    pass


class ExogenousTarget(CpxError):
    pass


class EmptySupport(CpxError):
    pass


class MissingAction(CpxError):
    pass


class VariableInFact(CpxError):
    pass


class NoEligibleActions(CpxError):
    pass


class ZeroPosterior(CpxError):
    """A message is literally false in every world with positive prior."""


class NoUsableMessage(CpxError):
    pass


class UnexpectedMessage(CpxError):
    """The pragmatic speaker utters the message with probability zero everywhere."""


class ScenarioError(CpxError):
    """Base for scenario-file problems; carries an optional source position."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{line}:{column}: {message}"
        super().__init__(message)


class ScenarioSyntaxError(ScenarioError):
    pass


class ResolutionError(ScenarioError):
    pass


class ValidationError(ScenarioError):
    pass


class QueryError(CpxError):
    """A module error raised while running a scenario query, with its context."""
