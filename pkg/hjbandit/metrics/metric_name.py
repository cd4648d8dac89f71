from __future__ import annotations

from typing import Any, Dict, Mapping, Optional


class MetricName:
    """
    A metric's name, logical group and its related attributes (tags).

    group and tags make names unique, e.g. the Howard iteration count of
    the implicit solver is ``MetricName("howard-iterations", "hjb",
    tags={"scheme": "implicit"})``.
    """

    __slots__ = ("_description", "_group", "_hash", "_name", "_tags")

    def __init__(
        self,
        name: str,
        group: str,
        description: Optional[str] = None,
        tags: Optional[Mapping[str, Any]] = None,
    ) -> None:
        if not (name and group):
            raise ValueError("name and group must be non-empty.")
        if tags is not None and not isinstance(tags, Mapping):
            raise ValueError("tags must be a mapping if present.")

        self._name = name
        self._group = group
        self._description = description
        self._tags: Dict[str, Any] = dict(tags or {})
        self._hash = hash((group, name, frozenset(self._tags.items())))

    @property
    def name(self) -> str:
        return self._name

    @property
    def group(self) -> str:
        return self._group

    @property
    def description(self) -> Optional[str]:
        return self._description

    @property
    def tags(self) -> Dict[str, Any]:
        return dict(self._tags)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        return (
            isinstance(other, MetricName)
            and self.group == other.group
            and self.name == other.name
            and self._tags == other._tags
        )

    def __str__(self) -> str:
        return (
            f"MetricName(name={self.name}, group={self.group}, "
            f"description={self.description}, tags={self.tags})"
        )
