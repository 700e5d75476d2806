"""The analyst feedback vector over attribute-value facets.

Feedback is strictly incremental: every point matched inside a dense region
adds the same increment to each of its facets' raw counts, and weights are
the raw counts normalized to sum to one. A weight of zero therefore means
"never touched", not "disliked" -- rewarding some facets dilutes the others
but nothing is ever decremented.
"""

from __future__ import annotations

from typing import Any, Dict, Iterable, List, Mapping, Tuple

from .errors import UnknownFacetError
from .ingestion import AttributeSchema, PointRecord

Facet = Tuple[str, Any]


class FeedbackVector:
    """Normalized facet weights backed by monotonically growing raw counts."""

    __slots__ = ("schema", "_raw", "_total")

    def __init__(self, schema: AttributeSchema, raw_counts: Mapping[Facet, float] | None = None):
        self.schema = schema
        self._raw: Dict[Facet, float] = dict(raw_counts or {})
        universe = set(schema.facet_universe())
        for facet, count in self._raw.items():
            if facet not in universe:
                raise UnknownFacetError(f"facet {facet!r} not in schema")
            if count < 0:
                raise ValueError(f"negative raw count for {facet!r}")
        self._total = float(sum(self._raw.values()))

    @classmethod
    def zeros(cls, schema: AttributeSchema) -> "FeedbackVector":
        return cls(schema)

    @property
    def total(self) -> float:
        return self._total

    @property
    def raw_counts(self) -> Dict[Facet, float]:
        return dict(self._raw)

    def raw_count(self, attribute: str, value: Any) -> float:
        self._check_facet(attribute, value)
        return self._raw.get((attribute, value), 0.0)

    def weight(self, attribute: str, value: Any) -> float:
        """Normalized weight of one facet; 0.0 for facets never touched."""
        self._check_facet(attribute, value)
        if self._total <= 0.0:
            return 0.0
        return self._raw.get((attribute, value), 0.0) / self._total

    def max_weight(self, attribute: str) -> float:
        """Largest weight among the attribute's facets (0.0 when all untouched)."""
        attr = self.schema.attribute(attribute)
        if self._total <= 0.0:
            return 0.0
        return max(self._raw.get((attr.name, v), 0.0) for v in attr.values) / self._total

    def weights(self) -> Dict[Facet, float]:
        """Every facet of the universe mapped to its weight, untouched ones at 0."""
        return {f: (self._raw.get(f, 0.0) / self._total if self._total > 0 else 0.0)
                for f in self.schema.facet_universe()}

    def _check_facet(self, attribute: str, value: Any) -> None:
        attr = self.schema.attribute(attribute)
        if value not in attr.values:
            raise UnknownFacetError(f"{attribute}: facet value {value!r} not in {attr.values!r}")

    def updated(self, matched: Iterable[PointRecord], delta: float) -> "FeedbackVector":
        """New vector with delta added to every facet of every matched point."""
        if not (delta > 0):
            raise ValueError(f"delta must be > 0, got {delta}")
        raw = dict(self._raw)
        for point in sorted(matched, key=lambda p: str(p.id)):
            for facet in self.schema.facets_of(point):
                raw[facet] = raw.get(facet, 0.0) + delta
        return FeedbackVector(self.schema, raw)

    def to_document(self) -> dict:
        """Facet -> weight listing in schema order, for UI panels and session dumps."""
        facets: List[dict] = []
        for attr in self.schema:
            for value in attr.values:
                facets.append(
                    {
                        "attribute": attr.name,
                        "value": value,
                        "weight": self.weight(attr.name, value),
                        "raw_count": self._raw.get((attr.name, value), 0.0),
                    }
                )
        return {"total_raw": self._total, "facets": facets}


def update_feedback(f: FeedbackVector, matched: Iterable[PointRecord], delta: float) -> FeedbackVector:
    """Apply one batch of matched points; returns a new vector, never mutates."""
    return f.updated(matched, delta)


def facet_weight(f: FeedbackVector, attribute: str, value: Any) -> float:
    """Normalized weight of the (attribute, value) facet."""
    return f.weight(attribute, value)
