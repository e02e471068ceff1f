"""Exception hierarchy shared by the solvers."""


class KirchhoffError(Exception):
    """Base class for every domain or solver failure raised by the package."""


class EvaluationOverflow(KirchhoffError, FloatingPointError):
    """A nonlinearity or integrand left the representable floating-point range."""


class QuadratureError(KirchhoffError):
    """Non-finite samples were handed to a quadrature rule."""


class QuadratureOverflow(QuadratureError, EvaluationOverflow):
    """An integrand exceeded the 1e300 guard (Trudinger-Moser type terms)."""


class ShootingError(KirchhoffError):
    """The radial initial value problem could not be integrated or classified."""


class NoBracket(KirchhoffError):
    """No undershoot/overshoot sign change was found in the shooting range."""


class ToleranceError(KirchhoffError):
    """Bisection stalled before the requested bracket width.

    The best bracket reached is stored in ``bracket``.
    """

    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket


class Diverged(KirchhoffError):
    """Damped Newton iteration failed (line search exhausted or max iterations)."""


class SingularJacobian(KirchhoffError):
    pass


class NotGroundState(KirchhoffError):
    """A solver converged, but to something that is not a positive ground state."""


class NoRoot(KirchhoffError):
    pass


class ResidualTooLarge(KirchhoffError):
    pass


class Infeasible(KirchhoffError):
    pass


class NoInteriorMax(KirchhoffError):
    """The energy along a ray kept increasing up to the overflow guard."""


class OuterDiverged(KirchhoffError):
    pass


class WindowEmpty(KirchhoffError):
    pass
