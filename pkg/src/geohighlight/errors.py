"""Exception types shared across the package."""


class GeoHighlightError(Exception):
    """Base class for all package errors."""


class PoleSingularityError(GeoHighlightError):
    """Viewport centered on a pole; the longitude transform is undefined there."""


class OutOfRangeError(GeoHighlightError):
    """A coordinate left the valid latitude/longitude ranges."""


class DegenerateGeometryError(GeoHighlightError):
    """Too few or collinear points; no polygon with positive area exists."""


class EmptyDatasetError(GeoHighlightError):
    """An operation that needs at least one point received none."""


class TooFewPointsError(GeoHighlightError):
    """An operation that needs at least two points received fewer."""


class UnknownFacetError(GeoHighlightError):
    """A point carries an attribute value outside the schema's facet universe."""


class EmptyEligibleSetError(GeoHighlightError):
    """Every dataset point sits inside the current dense regions; nothing to highlight."""


class UnknownSessionError(GeoHighlightError):
    """No live session with the given id."""


class UnknownDatasetError(GeoHighlightError):
    """No dataset registered under the given id."""


class DatasetError(GeoHighlightError):
    """Base class for dataset loading problems."""


class UnreadableSourceError(DatasetError):
    """The dataset file could not be read or parsed."""


class MissingColumnError(DatasetError):
    """A column named in the mapping config is absent from the source."""


class NoValidRowsError(DatasetError):
    """Every row was dropped during loading."""
