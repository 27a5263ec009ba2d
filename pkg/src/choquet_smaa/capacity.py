"""2-additive Mobius capacities: Choquet integral, importance and interaction.

A 2-additive capacity mu on the elementary criteria is stored through its
Mobius transform: one coefficient per leaf ("singleton") and one per
unordered leaf pair. The canonical coordinate layout is

    [m({g_0}), ..., m({g_{n-1}}), m({g_0,g_1}), m({g_0,g_2}), ..., m({g_{n-2},g_{n-1}})]

with leaves in hierarchy declaration order and pairs in row-major
upper-triangle order (exactly ``np.triu_indices(n, k=1)``). Feasibility is
the constraint family

    m({g_t}) + sum_{t1 in T} m({g_t,g_t1}) >= 0   for every t and every T not containing t,
    sum of all coefficients = 1,

whose T = empty-set members are the singleton nonnegativity rows. The family
is exponential in n but, for a fixed vector, tightest at T* = the partners
with negative pair coefficient; `monotonicity_slack` evaluates that exactly
and `base_constraints` emits the finite working set (T = empty and T = all
partners) that linear programming then extends by row generation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

import numpy as np

from .hierarchy import CriterionId, Hierarchy


def mobius_dim(n_leaves: int) -> int:
    return n_leaves + n_leaves * (n_leaves - 1) // 2


def pair_position(i: int, j: int, n: int) -> int:
    """Index of pair coefficient {i, j} (leaf positions, i != j) in the canonical layout."""
    if i == j:
        raise ValueError("a pair needs two distinct leaves")
    if i > j:
        i, j = j, i
    return n + i * (2 * n - i - 1) // 2 + (j - i - 1)


@dataclass(frozen=True)
class MobiusVector:
    """A candidate 2-additive capacity in canonical coordinates."""

    values: np.ndarray
    n_leaves: int

    def __post_init__(self):
        if self.values.shape != (mobius_dim(self.n_leaves),):
            raise ValueError(
                f"expected {mobius_dim(self.n_leaves)} coefficients for "
                f"{self.n_leaves} leaves, got {self.values.shape}"
            )

    def singleton(self, i: int) -> float:
        return float(self.values[i])

    def pair(self, i: int, j: int) -> float:
        return float(self.values[pair_position(i, j, self.n_leaves)])

    @classmethod
    def uniform_additive(cls, n_leaves: int) -> "MobiusVector":
        v = np.zeros(mobius_dim(n_leaves))
        v[:n_leaves] = 1.0 / n_leaves
        return cls(values=v, n_leaves=n_leaves)


def pair_table(m: MobiusVector) -> np.ndarray:
    """Symmetric (n, n) matrix of pair coefficients, zero diagonal."""
    n = m.n_leaves
    P = np.zeros((n, n))
    iu, ju = np.triu_indices(n, k=1)
    P[iu, ju] = m.values[n:]
    P[ju, iu] = m.values[n:]
    return P


def monotonicity_slack(m: MobiusVector) -> np.ndarray:
    """Worst-case feasibility slack per leaf over the whole constraint family.

    For leaf t the binding subset is T* = {t1 : m({g_t,g_t1}) < 0}, so the
    returned value m({g_t}) + sum of negative pair coefficients is the
    minimum of the left-hand side over all T. All entries >= 0 (up to
    tolerance) together with the normalization row mean the vector is a
    genuine 2-additive capacity.
    """
    P = pair_table(m)
    return m.values[: m.n_leaves] + np.minimum(P, 0.0).sum(axis=1)


@dataclass
class ConstraintSet:
    """Linear rows over the Mobius coordinates plus the auxiliary epsilon.

    Row coefficient vectors have length ``mobius_dim(n_leaves) + 1``; the
    last coordinate multiplies epsilon. `tag` is "base" for feasibility rows
    and the source statement id for preference rows.
    """

    n_leaves: int
    coeffs: list[np.ndarray] = field(default_factory=list)
    ops: list[str] = field(default_factory=list)  # ">=" or "="
    rhs: list[float] = field(default_factory=list)
    tags: list[str] = field(default_factory=list)

    @property
    def n_mobius(self) -> int:
        return mobius_dim(self.n_leaves)

    def add(self, coeffs: np.ndarray, op: str, rhs: float, tag: str) -> None:
        if coeffs.shape != (self.n_mobius + 1,):
            raise ValueError(f"row must have {self.n_mobius + 1} coefficients")
        if op not in (">=", "="):
            raise ValueError(f"comparator must be '>=' or '=', got {op!r}")
        self.coeffs.append(np.asarray(coeffs, dtype=np.float64))
        self.ops.append(op)
        self.rhs.append(float(rhs))
        self.tags.append(tag)

    def __len__(self) -> int:
        return len(self.coeffs)

    def copy(self) -> "ConstraintSet":
        return ConstraintSet(
            n_leaves=self.n_leaves,
            coeffs=[c.copy() for c in self.coeffs],
            ops=list(self.ops),
            rhs=list(self.rhs),
            tags=list(self.tags),
        )

    def extend(self, other: "ConstraintSet") -> "ConstraintSet":
        if other.n_leaves != self.n_leaves:
            raise ValueError("constraint sets built for different leaf counts")
        out = self.copy()
        out.coeffs += [c.copy() for c in other.coeffs]
        out.ops += list(other.ops)
        out.rhs += list(other.rhs)
        out.tags += list(other.tags)
        return out

    def without_tags(self, dropped: Iterable[str]) -> "ConstraintSet":
        dropped = set(dropped)
        out = ConstraintSet(n_leaves=self.n_leaves)
        for c, op, b, tag in zip(self.coeffs, self.ops, self.rhs, self.tags):
            if tag not in dropped:
                out.add(c.copy(), op, b, tag)
        return out

    def statement_tags(self) -> list[str]:
        seen: list[str] = []
        for tag in self.tags:
            if tag != "base" and tag not in seen:
                seen.append(tag)
        return seen

    def slacks(self, m: np.ndarray, epsilon: float) -> np.ndarray:
        """Signed row slack: lhs - rhs (>= rows) or |lhs - rhs| deficit (= rows give lhs - rhs)."""
        x = np.concatenate([m, [epsilon]])
        A = np.array(self.coeffs)
        return A @ x - np.array(self.rhs)

    def matrices(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(A_ineq, b_ineq, A_eq, b_eq) with inequality rows meaning A x >= b."""
        ineq = [k for k, op in enumerate(self.ops) if op == ">="]
        eq = [k for k, op in enumerate(self.ops) if op == "="]
        d = self.n_mobius + 1
        A = np.array(self.coeffs) if self.coeffs else np.zeros((0, d))
        b = np.array(self.rhs) if self.rhs else np.zeros(0)
        return A[ineq], b[ineq], A[eq], b[eq]


def base_constraints(h: Hierarchy) -> ConstraintSet:
    """The finite working set of capacity feasibility rows.

    Emits, per leaf t, the two extreme members of the monotonicity family
    (T = empty set, i.e. m({g_t}) >= 0, and T = all other leaves), plus the
    normalization equality. Intermediate subsets are generated on demand
    during LP solving; see `lp.solve_epsilon_max`.
    """
    n = len(h.leaves)
    dim = mobius_dim(n)
    c = ConstraintSet(n_leaves=n)
    for t in range(n):
        row = np.zeros(dim + 1)
        row[t] = 1.0
        c.add(row, ">=", 0.0, "base")
    for t in range(n):
        row = np.zeros(dim + 1)
        row[t] = 1.0
        for u in range(n):
            if u != t:
                row[pair_position(t, u, n)] = 1.0
        c.add(row, ">=", 0.0, "base")
    row = np.zeros(dim + 1)
    row[:dim] = 1.0
    c.add(row, "=", 1.0, "base")
    return c


def monotonicity_row(t: int, partners: Sequence[int], n: int) -> np.ndarray:
    """Coefficients (without rhs) of m({g_t}) + sum_{u in partners} m({g_t,g_u}) >= 0."""
    row = np.zeros(mobius_dim(n) + 1)
    row[t] = 1.0
    for u in partners:
        row[pair_position(t, u, n)] = 1.0
    return row


def _leaf_positions(h: Hierarchy, r: CriterionId) -> np.ndarray:
    return np.array([h.leaf_position[t] for t in h.elementary_descendants(r)], dtype=np.intp)


def capacity_of(m: MobiusVector, h: Hierarchy, B: Iterable[CriterionId]) -> float:
    """mu(B) = sum of singleton coefficients in B plus pair coefficients inside B."""
    pos = sorted(h.leaf_position[tuple(t)] for t in B)
    total = float(m.values[pos].sum()) if pos else 0.0
    n = m.n_leaves
    for a in range(len(pos)):
        for b in range(a + 1, len(pos)):
            total += m.values[pair_position(pos[a], pos[b], n)]
    return total


def choquet_coefficients(h: Hierarchy, r: CriterionId, row: np.ndarray) -> np.ndarray:
    """Coefficient vector c with Ch_r(row) = c . m over the canonical layout.

    `row` holds the normalized evaluations of one alternative on all leaves
    in hierarchy order. Only coordinates whose leaves descend from r are
    nonzero: singletons carry the leaf value, pairs the minimum of the two.
    """
    n = len(h.leaves)
    row = np.asarray(row, dtype=np.float64)
    if row.shape != (n,):
        raise ValueError(f"evaluation row must cover all {n} leaves")
    pos = _leaf_positions(h, r)
    c = np.zeros(mobius_dim(n))
    c[pos] = row[pos]
    for a in range(len(pos)):
        for b in range(a + 1, len(pos)):
            i, j = pos[a], pos[b]
            c[pair_position(i, j, n)] = min(row[i], row[j])
    return c


def choquet(m: MobiusVector, h: Hierarchy, r: CriterionId, row: np.ndarray) -> float:
    """Choquet integral of one alternative at criterion r.

    Sums the restriction of the Mobius coefficients to the leaves below r;
    no renormalization is applied, so values at different nodes live on
    different scales and are only compared within a node.
    """
    return float(choquet_coefficients(h, r, row) @ m.values)


def choquet_features(h: Hierarchy, values: np.ndarray) -> np.ndarray:
    """Per-alternative feature matrix F with Ch_root = F @ m for all rows at once.

    F[:, :n] are the leaf values and F[:, n:] the pairwise minima in canonical
    pair order. Restricting to a node is a column mask (`node_mask`), so
    Choquet scores at node r for every alternative and sample are
    ``(F * node_mask(h, r)) @ samples.T``.
    """
    values = np.asarray(values, dtype=np.float64)
    iu, ju = np.triu_indices(len(h.leaves), k=1)
    return np.hstack([values, np.minimum(values[:, iu], values[:, ju])])


def node_mask(h: Hierarchy, r: CriterionId) -> np.ndarray:
    """Boolean mask over canonical coordinates: leaves below r and pairs inside."""
    n = len(h.leaves)
    inside = np.zeros(n, dtype=bool)
    inside[_leaf_positions(h, r)] = True
    iu, ju = np.triu_indices(n, k=1)
    return np.concatenate([inside, inside[iu] & inside[ju]])


def shapley_numerator_coefficients(
    h: Hierarchy, r: CriterionId, child: CriterionId
) -> np.ndarray:
    """Coefficients of the importance numerator of `child` among its siblings.

    The numerator counts the child's own singletons, the pairs inside it,
    and half of every pair crossing to a sibling at the same level under r.
    Divided by mu over the leaves below r (a positive scalar for feasible
    capacities) it becomes the Shapley importance; comparisons between
    siblings can drop the shared denominator, which keeps preference rows
    linear.
    """
    child = tuple(child)
    r = tuple(r)
    level = len(child)
    siblings = h.children_at(r, level)
    if child not in siblings:
        raise ValueError(
            f"{h.label_of(child)!r} is not below {h.label_of(r)!r} at level {level}"
        )
    n = len(h.leaves)
    own = _leaf_positions(h, child)
    others = np.concatenate(
        [_leaf_positions(h, s) for s in siblings if s != child]
    ) if len(siblings) > 1 else np.array([], dtype=np.intp)
    c = np.zeros(mobius_dim(n))
    c[own] = 1.0
    for a in range(len(own)):
        for b in range(a + 1, len(own)):
            c[pair_position(own[a], own[b], n)] = 1.0
    for i in own:
        for j in others:
            c[pair_position(int(i), int(j), n)] = 0.5
    return c


def interaction_numerator_coefficients(
    h: Hierarchy, r: CriterionId, child1: CriterionId, child2: CriterionId
) -> np.ndarray:
    """Coefficients of the interaction numerator: pairs crossing child1 and child2."""
    child1, child2, r = tuple(child1), tuple(child2), tuple(r)
    if child1 == child2:
        raise ValueError("interaction needs two distinct criteria")
    if len(child1) != len(child2):
        raise ValueError("interacting criteria must sit at the same level")
    siblings = h.children_at(r, len(child1))
    for ch in (child1, child2):
        if ch not in siblings:
            raise ValueError(
                f"{h.label_of(ch)!r} is not below {h.label_of(r)!r} at level {len(child1)}"
            )
    n = len(h.leaves)
    c = np.zeros(mobius_dim(n))
    for i in _leaf_positions(h, child1):
        for j in _leaf_positions(h, child2):
            c[pair_position(int(i), int(j), n)] = 1.0
    return c


def _node_capacity(m: MobiusVector, h: Hierarchy, r: CriterionId) -> float:
    mu = capacity_of(m, h, h.elementary_descendants(r))
    if mu <= 0.0:
        raise ValueError(
            f"capacity of the leaves below {h.label_of(tuple(r))!r} is {mu:.3g}; "
            "importance and interaction indices need it positive"
        )
    return mu


def shapley(m: MobiusVector, h: Hierarchy, r: CriterionId, child: CriterionId) -> float:
    """Shapley importance of `child` as a subcriterion of r, within its siblings."""
    num = shapley_numerator_coefficients(h, r, child) @ m.values
    return float(num / _node_capacity(m, h, r))


def interaction(
    m: MobiusVector, h: Hierarchy, r: CriterionId, child1: CriterionId, child2: CriterionId
) -> float:
    """Signed interaction between two same-level subcriteria of r (positive = synergy)."""
    num = interaction_numerator_coefficients(h, r, child1, child2) @ m.values
    return float(num / _node_capacity(m, h, r))


def subset_labels(h: Hierarchy) -> list[str]:
    """Canonical-order subset names: leaf labels, then pair labels joined by '|'."""
    labels = [h.label_of(t) for t in h.leaves]
    iu, ju = np.triu_indices(len(h.leaves), k=1)
    return labels + [f"{labels[i]}|{labels[j]}" for i, j in zip(iu, ju)]


def mobius_to_csv(m: MobiusVector, h: Hierarchy, stream: IO[str]) -> None:
    stream.write("subset,coefficient\n")
    for label, v in zip(subset_labels(h), m.values):
        stream.write(f"{label},{v!r}\n")


def mobius_from_csv(stream: IO[str], h: Hierarchy) -> MobiusVector:
    n = len(h.leaves)
    expected = subset_labels(h)
    header = stream.readline().strip()
    if header != "subset,coefficient":
        raise ValueError(f"bad header {header!r}")
    values = np.zeros(mobius_dim(n))
    position = {lab: k for k, lab in enumerate(expected)}
    count = 0
    for lineno, line in enumerate(stream, start=2):
        line = line.strip()
        if not line:
            continue
        subset, _, coeff = line.partition(",")
        if subset not in position:
            raise ValueError(f"line {lineno}: unknown subset {subset!r}")
        values[position[subset]] = float(coeff)
        count += 1
    if count != len(expected):
        raise ValueError(f"expected {len(expected)} coefficient rows, got {count}")
    return MobiusVector(values=values, n_leaves=n)
