"""Exception types shared across the package."""


class CustweaveError(Exception):
    """Base class for all domain errors raised by this package."""

    code = "Error"

    def __str__(self) -> str:
        msg = super().__str__()
        return f"{self.code}: {msg}" if msg else self.code


class EmptyEdge(CustweaveError):
    code = "EmptyEdge"


class UnknownElement(CustweaveError):
    code = "UnknownElement"


class UnknownEdge(CustweaveError):
    code = "UnknownEdge"


class DuplicateEdgeId(CustweaveError):
    code = "DuplicateEdgeId"


class NotInVertex(CustweaveError):
    code = "NotInVertex"


class DomainMismatch(CustweaveError):
    code = "DomainMismatch"


class UnknownDimension(CustweaveError):
    code = "UnknownDimension"


class UnknownConcern(CustweaveError):
    code = "UnknownConcern"


class UnknownComponent(CustweaveError):
    code = "UnknownComponent"


class ComponentNotInConcern(CustweaveError):
    code = "ComponentNotInConcern"


class ComponentNotPresent(CustweaveError):
    code = "ComponentNotPresent"


class RevisionMismatch(CustweaveError):
    code = "RevisionMismatch"


class ParseError(CustweaveError):
    """Document is not valid JSON. Carries position info in the message."""

    code = "ParseError"


class SchemaError(CustweaveError):
    """Document is valid JSON but violates the document schema."""

    code = "SchemaError"


class ModelInvalid(CustweaveError):
    """Model parsed but failed well-formedness validation."""

    code = "ModelInvalid"

    def __init__(self, report):
        self.report = report
        super().__init__("; ".join(str(v) for v in report.violations))


class CustomizationInvalid(CustweaveError):
    """Customization document failed the from-scratch validity check."""

    code = "CustomizationInvalid"

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class InfeasibleParams(CustweaveError):
    code = "InfeasibleParams"
