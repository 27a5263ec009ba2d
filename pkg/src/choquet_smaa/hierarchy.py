"""Criteria tree: structural queries used by every other module.

A criterion is addressed by its path from the root, a tuple of 1-based child
indices: () is the root, (1,) its first child, (1, 2) the second child of
that one, and so on. Labels are display names only; all computation keys off
paths. Leaves carry a preference direction ("max" or "min"); internal nodes
do not.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import IO, Iterator, Mapping

import yaml

CriterionId = tuple[int, ...]

_NODE_KEYS = {"label", "direction", "children"}


@dataclass(frozen=True)
class Node:
    id: CriterionId
    label: str
    direction: str | None  # "max" / "min" on leaves, None on internal nodes
    children: tuple["Node", ...]

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass(frozen=True)
class Hierarchy:
    """Validated criteria tree with index structures for fast lookup.

    Attributes
    ----------
    root : Node
        Root of the tree (path ()).
    leaves : tuple[CriterionId, ...]
        All leaf ids in declaration order; this order fixes the canonical
        column order of performance tables and Mobius vectors.
    lev : int
        Depth of the deepest leaf (the number of levels below the root).
    """

    root: Node
    leaves: tuple[CriterionId, ...] = field(init=False)
    lev: int = field(init=False)

    def __post_init__(self):
        by_path: dict[CriterionId, Node] = {}
        by_label: dict[str, Node] = {}
        leaves: list[CriterionId] = []
        for node in _walk(self.root):
            by_path[node.id] = node
            if node.label in by_label:
                raise ValueError(f"duplicate label {node.label!r}")
            by_label[node.label] = node
            if node.is_leaf:
                leaves.append(node.id)
        object.__setattr__(self, "_by_path", by_path)
        object.__setattr__(self, "_by_label", by_label)
        object.__setattr__(self, "leaves", tuple(leaves))
        object.__setattr__(self, "lev", max(len(t) for t in leaves))
        object.__setattr__(
            self, "leaf_position", {t: i for i, t in enumerate(leaves)}
        )

    def node(self, r: CriterionId) -> Node:
        try:
            return self._by_path[tuple(r)]
        except KeyError:
            raise KeyError(f"no criterion with path {tuple(r)}") from None

    def by_label(self, label: str) -> Node:
        try:
            return self._by_label[label]
        except KeyError:
            raise KeyError(f"no criterion labeled {label!r}") from None

    def label_of(self, r: CriterionId) -> str:
        return self.node(r).label

    def elementary_descendants(self, r: CriterionId) -> tuple[CriterionId, ...]:
        """Leaf ids descending from r, in declaration order (r itself if a leaf)."""
        node = self.node(r)
        return tuple(n.id for n in _walk(node) if n.is_leaf)

    def children_at(self, r: CriterionId, level: int) -> tuple[CriterionId, ...]:
        """Descendants of r sitting at depth `level`, in declaration order.

        `level` counts from the root: the root's direct children are level 1.
        It must lie strictly below r's own depth and not exceed the tree
        depth. With ragged leaf depths, a leaf shallower than `level` simply
        does not appear.
        """
        node = self.node(r)
        if level <= len(node.id) or level > self.lev:
            raise ValueError(
                f"level {level} is not below criterion {node.label!r} "
                f"(depth {len(node.id)}, tree depth {self.lev})"
            )
        return tuple(n.id for n in _walk(node) if len(n.id) == level)

    def direction(self, t: CriterionId) -> str:
        node = self.node(t)
        if not node.is_leaf:
            raise ValueError(f"criterion {node.label!r} is not elementary")
        return node.direction  # type: ignore[return-value]


def _walk(node: Node) -> Iterator[Node]:
    yield node
    for child in node.children:
        yield from _walk(child)


def build_hierarchy(spec: Mapping) -> Hierarchy:
    """Build and validate a Hierarchy from a nested mapping.

    Each node is a mapping with a required ``label``, an optional
    ``children`` list, and an optional ``direction`` ("max" or "min",
    leaves only, default "max").

    Raises
    ------
    ValueError
        On duplicate labels, an internal node with an empty child list,
        a direction on a non-leaf, or unknown keys.
    """
    return Hierarchy(root=_build_node(spec, ()))


def _build_node(spec: Mapping, path: CriterionId) -> Node:
    if not isinstance(spec, Mapping):
        raise ValueError(f"criterion at {path} must be a mapping, got {type(spec).__name__}")
    unknown = set(spec) - _NODE_KEYS
    if unknown:
        raise ValueError(f"unknown keys {sorted(unknown)} at {path}")
    label = spec.get("label")
    if not isinstance(label, str) or not label:
        raise ValueError(f"criterion at {path} needs a non-empty label")
    children_spec = spec.get("children")
    direction = spec.get("direction")
    if children_spec is not None:
        if not isinstance(children_spec, list) or len(children_spec) == 0:
            raise ValueError(f"criterion {label!r} declares an empty children list")
        if direction is not None:
            raise ValueError(f"direction declared on non-elementary criterion {label!r}")
        children = tuple(
            _build_node(c, path + (i,)) for i, c in enumerate(children_spec, start=1)
        )
        return Node(id=path, label=label, direction=None, children=children)
    if direction is None:
        direction = "max"
    if direction not in ("max", "min"):
        raise ValueError(f"direction of {label!r} must be 'max' or 'min', got {direction!r}")
    return Node(id=path, label=label, direction=direction, children=())


def load_hierarchy(source: str | IO[str]) -> Hierarchy:
    """Load a hierarchy from a YAML file path or open stream."""
    if isinstance(source, str):
        with open(source, encoding="utf-8") as f:
            spec = yaml.safe_load(f)
    else:
        spec = yaml.safe_load(source)
    if spec is None:
        raise ValueError("empty hierarchy document")
    return build_hierarchy(spec)
