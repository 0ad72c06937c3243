"""Exception hierarchy shared by all nilg2 modules."""


class Nilg2Error(Exception):
    """Base class for every error raised by this package."""


class KindMismatch(Nilg2Error):
    """Exact and float scalars were mixed in one operation."""


class DimensionMismatch(Nilg2Error):
    """Operands live on spaces of different dimension."""


class DegreeError(Nilg2Error):
    """A form of the wrong degree was supplied."""


class NotPositiveDefinite(Nilg2Error):
    """A metric (or candidate metric) failed the definiteness check."""


class NotPositiveThreeForm(Nilg2Error):
    """A 3-form does not induce a positive definite metric."""


class ExactnessError(Nilg2Error):
    """An operation requires exact mode but the data does not allow it
    (e.g. a Hodge star against a non-identity exact metric)."""


class NoCharacteristicConnection(Nilg2Error):
    """tau2 != 0: no metric connection with totally skew torsion
    parallelizes the structure."""


class NotCoclosed(Nilg2Error):
    """An operation requires a coclosed structure (d(star phi) = 0)."""


class CalibrationError(Nilg2Error):
    """A subspace that must be calibrated is not."""


class AdaptedBasisError(Nilg2Error):
    """No exact adapted basis could be constructed; caller may retry in
    float mode."""


class InputError(Nilg2Error):
    """A structurally invalid input document or value."""
