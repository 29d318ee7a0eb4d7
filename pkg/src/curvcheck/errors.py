"""Exception hierarchy.

Two branches matter for exit codes: InputError covers malformed or
inadmissible inputs, MathError covers computations that ran but could not
produce a trustworthy result.
"""


class CurvcheckError(Exception):
    pass


class InputError(CurvcheckError):
    pass


class MathError(CurvcheckError):
    pass


class NegativeRate(InputError):
    pass


class NonIrreducible(InputError):
    pass


class DetailedBalanceViolated(InputError):
    pass


class ZeroRateInsideRange(InputError):
    pass


class BadParams(InputError):
    pass


class NonPositiveInput(InputError):
    pass


class NonDensity(InputError):
    pass


class VanishingEntry(InputError):
    pass


class MalformedMaps(InputError):
    pass


class DegenerateNeighborhood(InputError):
    pass


class TruncationInsufficient(InputError):
    pass


class UnboundedM1(InputError):
    pass


class QuadratureNonConvergent(MathError):
    pass


class DivergentIntegral(MathError):
    pass


class NonIntegrableTail(MathError):
    pass


class NonIntegrableGrowth(MathError):
    pass


class SolverNotConverged(MathError):
    pass
