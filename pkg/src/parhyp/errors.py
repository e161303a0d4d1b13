"""Exception hierarchy shared by every module."""


class ParhypError(Exception):
    pass


class ZeroInverse(ParhypError, ZeroDivisionError):
    pass


class NotPrime(ParhypError, ValueError):
    pass


class VariableMismatch(ParhypError, ValueError):
    pass


class InvalidFamily(ParhypError, ValueError):
    pass


class ParseError(InvalidFamily):
    """Input document does not match the arrangement schema."""


class ZeroLinearForm(InvalidFamily):
    pass


class RankDeficient(InvalidFamily):
    pass


class ZeroWeight(InvalidFamily):
    pass


class ZeroKappa(InvalidFamily):
    pass


class NotGoodPrime(ParhypError, ValueError):
    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class OnDiscriminant(ParhypError, ValueError):
    pass


class KappaNotInvertible(ParhypError, ValueError):
    pass


class ExponentUnderflow(ParhypError, ValueError):
    pass


class HypothesisViolated(ParhypError, ValueError):
    pass


class VerificationFailed(ParhypError, AssertionError):
    def __init__(self, message, detail=None):
        super().__init__(message)
        self.detail = detail
