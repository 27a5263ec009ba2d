"""Decision-maker preference statements and their linear compilation.

Statement files are line-oriented: blank lines and ``#`` comments are
skipped, an optional ``profile NAME`` directive names the profile, and every
other line is one statement::

    importance [node=LABEL] : A B > C D     groups: every left member beats
                                            every right member; chains
                                            A > B > C compare consecutive
                                            operands
    importance [node=LABEL] : A = B         exact equality of importance
    interaction + [node=LABEL] : A B        positive interaction
    interaction - [node=LABEL] : A B        negative interaction
    intensity [node=LABEL] : A B > C D [, E F]
                                            the pair (A,B) interacts more
                                            strongly than each right pair
    compare [node=LABEL] : a > b            alternative a beats b at the node

Criterion operands must all descend from the node (default: the root) at one
common level; the node may be omitted whenever the operands share their
direct parent. Statements get ids s01, s02, ... in file order.

Compilation turns each statement into linear rows over the Mobius
coefficients and the shared margin variable epsilon. Importance and
interaction claims compare Shapley/interaction numerators; the common
positive denominator (the capacity of the node's leaves) cancels inside one
node, so signs and orderings are preserved while every row stays linear.
The epsilon margin is thereby rescaled by that denominator, which is
harmless: epsilon is a maximized auxiliary variable and only its strict
positivity matters.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import IO

import numpy as np

from .capacity import (
    ConstraintSet,
    choquet_coefficients,
    interaction_numerator_coefficients,
    shapley_numerator_coefficients,
)
from .dataset import NormalizedTable
from .hierarchy import CriterionId, Hierarchy

KINDS = (
    "alternative-comparison",
    "importance",
    "positive-interaction",
    "negative-interaction",
    "interaction-intensity",
)


@dataclass(frozen=True)
class PreferenceStatement:
    id: str
    kind: str  # one of KINDS
    relation: str  # ">" or "="
    node: CriterionId
    # importance: tuple of operand groups (each a tuple of CriterionId);
    # interactions: (c1, c2); intensity: (left_pair, right_pairs);
    # alternative-comparison: (label_a, label_b)
    operands: tuple
    text: str


@dataclass(frozen=True)
class PreferenceProfile:
    name: str
    statements: tuple[PreferenceStatement, ...]


_HEAD = re.compile(
    r"^(?P<kind>importance|interaction\s*[+-]|intensity|compare)"
    r"(?:\s+node=(?P<node>\S+))?\s*:\s*(?P<body>.+)$"
)


def parse_profile(source: str | IO[str], h: Hierarchy, name: str | None = None) -> PreferenceProfile:
    """Parse a statement file against a hierarchy.

    `source` is a path or an open text stream. Criterion operands are
    resolved and sibling-checked here; alternative labels in ``compare``
    statements are only checked at compile time, when the evaluation table
    is available.
    """
    if isinstance(source, str):
        with open(source, encoding="utf-8") as f:
            return _parse(f, h, name or _stem(source))
    return _parse(source, h, name or "profile")


def _stem(path: str) -> str:
    base = path.rsplit("/", 1)[-1]
    return base.rsplit(".", 1)[0]


def _parse(stream: IO[str], h: Hierarchy, default_name: str) -> PreferenceProfile:
    name = default_name
    statements: list[PreferenceStatement] = []
    for lineno, raw in enumerate(stream, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("profile"):
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: profile directive takes one name")
            name = parts[1]
            continue
        match = _HEAD.match(line)
        if not match:
            raise ValueError(f"line {lineno}: cannot parse statement {line!r}")
        sid = f"s{len(statements) + 1:02d}"
        statements.append(
            _parse_statement(match, h, sid, lineno, line)
        )
    return PreferenceProfile(name=name, statements=tuple(statements))


def _parse_statement(match, h: Hierarchy, sid: str, lineno: int, text: str) -> PreferenceStatement:
    kind_token = re.sub(r"\s+", "", match.group("kind"))
    node_label = match.group("node")
    body = match.group("body").strip()

    if kind_token == "importance":
        return _parse_importance(body, h, node_label, sid, lineno, text)
    if kind_token in ("interaction+", "interaction-"):
        labels = body.split()
        if len(labels) != 2:
            raise ValueError(f"line {lineno}: interaction takes exactly two criteria")
        ids = _resolve_operands(labels, h, node_label, lineno)
        kind = "positive-interaction" if kind_token == "interaction+" else "negative-interaction"
        node = _common_node(ids, h, node_label, lineno)
        return PreferenceStatement(sid, kind, ">", node, (ids[0], ids[1]), text)
    if kind_token == "intensity":
        sides = [s.strip() for s in body.split(">")]
        if len(sides) != 2:
            raise ValueError(f"line {lineno}: intensity needs exactly one '>'")
        left = sides[0].split()
        rights = [p.strip().split() for p in sides[1].split(",")]
        if len(left) != 2 or any(len(p) != 2 for p in rights):
            raise ValueError(f"line {lineno}: intensity operands are criterion pairs")
        flat = left + [lab for p in rights for lab in p]
        ids = _resolve_operands(flat, h, node_label, lineno)
        node = _common_node(ids, h, node_label, lineno)
        left_ids = (ids[0], ids[1])
        right_ids = tuple(
            (ids[2 + 2 * k], ids[3 + 2 * k]) for k in range(len(rights))
        )
        return PreferenceStatement(
            sid, "interaction-intensity", ">", node, (left_ids, right_ids), text
        )
    if kind_token == "compare":
        sides = [s.strip() for s in body.split(">")]
        if len(sides) != 2 or not all(sides):
            raise ValueError(f"line {lineno}: compare needs 'a > b'")
        node = h.by_label(node_label).id if node_label else ()
        return PreferenceStatement(
            sid, "alternative-comparison", ">", node, (sides[0], sides[1]), text
        )
    raise AssertionError(kind_token)


def _parse_importance(body, h, node_label, sid, lineno, text):
    if "=" in body:
        if ">" in body:
            raise ValueError(f"line {lineno}: mixed '>' and '=' in one statement")
        sides = [s.strip() for s in body.split("=")]
        if len(sides) != 2 or any(len(s.split()) != 1 for s in sides):
            raise ValueError(f"line {lineno}: equality compares exactly two criteria")
        ids = _resolve_operands([sides[0], sides[1]], h, node_label, lineno)
        node = _common_node(ids, h, node_label, lineno)
        groups = ((ids[0],), (ids[1],))
        return PreferenceStatement(sid, "importance", "=", node, groups, text)
    group_labels = [g.strip().split() for g in body.split(">")]
    if len(group_labels) < 2 or any(not g for g in group_labels):
        raise ValueError(f"line {lineno}: importance needs at least two '>'-separated groups")
    flat = [lab for g in group_labels for lab in g]
    ids = _resolve_operands(flat, h, node_label, lineno)
    node = _common_node(ids, h, node_label, lineno)
    groups = []
    k = 0
    for g in group_labels:
        groups.append(tuple(ids[k:k + len(g)]))
        k += len(g)
    return PreferenceStatement(sid, "importance", ">", node, tuple(groups), text)


def _resolve_operands(labels, h: Hierarchy, node_label, lineno) -> list[CriterionId]:
    ids = []
    for lab in labels:
        try:
            ids.append(h.by_label(lab).id)
        except KeyError:
            raise ValueError(f"line {lineno}: unknown criterion {lab!r}") from None
    depths = {len(i) for i in ids}
    if len(depths) != 1:
        raise ValueError(f"line {lineno}: operands {labels} sit at different levels")
    return ids


def _common_node(ids, h: Hierarchy, node_label, lineno) -> CriterionId:
    if node_label is not None:
        try:
            node = h.by_label(node_label).id
        except KeyError:
            raise ValueError(f"line {lineno}: unknown criterion {node_label!r}") from None
        level = len(ids[0])
        try:
            below = set(h.children_at(node, level))
        except ValueError as e:
            raise ValueError(f"line {lineno}: {e}") from None
        stray = [h.label_of(i) for i in ids if i not in below]
        if stray:
            raise ValueError(
                f"line {lineno}: {stray} are not below {node_label!r} at level {level}"
            )
        return node
    parents = {i[:-1] for i in ids}
    if len(parents) != 1:
        raise ValueError(
            f"line {lineno}: operands are not siblings; name their common "
            f"ancestor explicitly with node=LABEL"
        )
    return parents.pop()


def compile(  # noqa: A001 - the operation is called compile throughout
    p: PreferenceProfile, h: Hierarchy, table: NormalizedTable | None = None
) -> ConstraintSet:
    """Translate a profile into constraint rows over (m, epsilon).

    Every row is tagged with its source statement id, one statement may emit
    several rows (group and chain expansion, multiple intensity targets).
    Strict rows read "lhs - epsilon >= 0"; equalities carry no epsilon.
    """
    n = len(h.leaves)
    c = ConstraintSet(n_leaves=n)
    for st in p.statements:
        if st.kind == "importance":
            _compile_importance(st, h, c)
        elif st.kind in ("positive-interaction", "negative-interaction"):
            num = interaction_numerator_coefficients(h, st.node, *st.operands)
            sign = 1.0 if st.kind == "positive-interaction" else -1.0
            row = np.append(sign * num, -1.0)
            c.add(row, ">=", 0.0, st.id)
        elif st.kind == "interaction-intensity":
            left, rights = st.operands
            left_num = interaction_numerator_coefficients(h, st.node, *left)
            for pair in rights:
                num = left_num - interaction_numerator_coefficients(h, st.node, *pair)
                c.add(np.append(num, -1.0), ">=", 0.0, st.id)
        elif st.kind == "alternative-comparison":
            if table is None:
                raise ValueError(
                    f"statement {st.id} compares alternatives but no table was given"
                )
            a, b = st.operands
            for alt in (a, b):
                if alt not in table.alternatives:
                    raise ValueError(f"statement {st.id}: unknown alternative {alt!r}")
            diff = choquet_coefficients(h, st.node, table.row(a)) - choquet_coefficients(
                h, st.node, table.row(b)
            )
            c.add(np.append(diff, -1.0), ">=", 0.0, st.id)
        else:
            raise AssertionError(st.kind)
    return c


def _compile_importance(st: PreferenceStatement, h: Hierarchy, c: ConstraintSet) -> None:
    groups = st.operands
    numerators = {
        ch: shapley_numerator_coefficients(h, st.node, ch)
        for g in groups
        for ch in g
    }
    if st.relation == "=":
        (a,), (b,) = groups
        c.add(np.append(numerators[a] - numerators[b], 0.0), "=", 0.0, st.id)
        return
    for left, right in zip(groups, groups[1:]):
        for a in left:
            for b in right:
                c.add(np.append(numerators[a] - numerators[b], -1.0), ">=", 0.0, st.id)
