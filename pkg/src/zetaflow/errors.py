"""Exception hierarchy.

Every domain failure raises a subclass of :class:`DomainError` so the CLI can
map it to exit code 2 and report the error name in the result envelope.
"""


class DomainError(Exception):
    """Base class for all domain-level failures."""

    @property
    def name(self):
        return type(self).__name__


# critical point analysis
class DegenerateCritical(DomainError):
    """A critical point has (numerically) vanishing Hessian determinant."""


class CoincidentValues(DomainError):
    """Two critical values coincide within tolerance."""


class NotConverged(DomainError):
    """Root search did not converge / coverage incomplete."""


# flow integration
class StepFailure(DomainError):
    """Adaptive step size underflow."""


class NonGenericConfig(DomainError):
    """A third critical value lies on the segment between two others."""


class OnStokesRay(DomainError):
    """Requested phase coincides with a soliton phase."""


# periods
class NonDecaying(DomainError):
    """Integrand does not decay along the contour."""


class QuadratureFail(DomainError):
    """Quadrature error estimate above tolerance."""


class AmbiguousRounding(DomainError):
    """Residual of integer rounding too large."""


# polygon model
class NonGeneric(DomainError):
    """Critical value configuration violates genericity."""


class NotAdjacent(DomainError):
    """Mutation requested at a non-adjacent pair."""


class SupportViolation(DomainError):
    """Support bound fails; truncated enumeration could be infinite."""


# spectral networks
class NonSimpleRoot(DomainError):
    """Polynomial of the quadratic differential has a multiple root."""


class BranchAmbiguity(DomainError):
    """Square-root sheet tracking lost near a turning point."""


class ContourThroughRoot(DomainError):
    """Integration contour passes through a root."""


class UnresolvedConnection(DomainError):
    """Phase bisection for a saddle connection stagnated."""


class ChargeIdentificationFail(DomainError):
    """No small integer charge matches the measured period."""


class ZeroCentralCharge(DomainError):
    """An active charge has vanishing central charge."""


# wall-crossing
class ZeroCharge(DomainError):
    """A wall-crossing transform was built on the zero charge."""


class BoundaryRay(DomainError):
    """An active charge sits on the boundary of the requested sector."""


class TieBreak(DomainError):
    """Two non-proportional charges share a phase (marginal stability)."""


# rendering / cli
class EmptyGeometry(DomainError):
    """Nothing to draw."""


class ConfigError(DomainError):
    """Invalid run configuration (usage error, exit code 1)."""
