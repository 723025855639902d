"""Error types shared across the library.

Every error carries a short machine-readable ``code`` so the CLI can report
it without parsing messages.
"""


class QCalcError(Exception):
    code = "qcalc-error"


class DivisionNotExact(QCalcError):
    code = "division-not-exact"


class NotAUnit(QCalcError):
    code = "not-a-unit"


class IndexMismatch(QCalcError):
    code = "index-mismatch"


class InsufficientInputPrecision(QCalcError):
    code = "insufficient-input-precision"


class InsufficientPrecision(QCalcError):
    code = "insufficient-precision"


class InsufficientTruncation(QCalcError):
    code = "insufficient-truncation"


class ValuationBudgetExceeded(QCalcError):
    code = "valuation-budget-exceeded"


class WindowTooSmall(QCalcError):
    code = "window-too-small"


class TorsionAmbient(QCalcError):
    code = "torsion-ambient"


class NotADivisor(QCalcError):
    code = "not-a-divisor"


class BaseMismatch(QCalcError):
    code = "base-mismatch"


class NonEtaleAtP(QCalcError):
    code = "non-etale-at-p"


class ZeroElement(QCalcError):
    code = "zero-element"


class UnboundedDegree(QCalcError):
    code = "unbounded-degree"


class GluingMismatch(QCalcError):
    code = "gluing-mismatch"


class InvalidConfig(QCalcError):
    code = "invalid-config"
