"""Exception hierarchy shared by every module."""


class MHeckeError(Exception):
    """Base class for all library errors."""


class IncompatibleTower(MHeckeError, ArithmeticError):
    """Operands would need three or more independent square roots."""


class NotAUnit(MHeckeError, ValueError):
    pass


class NonzeroConstant(MHeckeError, ValueError):
    pass


class LeadingNotOne(MHeckeError, ValueError):
    pass


class CuspNotOfLevel(MHeckeError, ValueError):
    pass


class UnsupportedLevel(MHeckeError, ValueError):
    pass


class InsufficientTruncation(MHeckeError, ValueError):
    pass


class InconsistentSquareCondition(MHeckeError, ValueError):
    pass


class SearchExhausted(MHeckeError, RuntimeError):
    pass


class PrecisionLoss(MHeckeError, ArithmeticError):
    pass


class RecognitionFailed(MHeckeError, ArithmeticError):
    pass


class NotFundamental(MHeckeError, ValueError):
    pass
