"""Linear programming over capacity constraint sets.

The solver is a dense simplex over a growing working problem, grown in
both directions. Rows: monotonicity of a 2-additive capacity is a
family of one row per leaf and per subset of its partners,
exponentially many in total, but for a fixed point only the tightest
member per leaf can bind: the subset collecting the partners with
negative pair coefficients. Both entry points therefore solve against a
working set and append the tightest violated subset per leaf after each
solve (the sign rule) until the whole family holds. Columns: every
Mobius coordinate starts sign-restricted, which keeps the initial
polytope a bounded slice of the probability simplex, and a pair
coordinate earns the right to go negative only when the optimum presses
against its bound. That pressure is read straight off the tableau: a
pinned coordinate with positive reduced cost would improve the optimum
by dipping below zero, so a mirrored column (its negation) is appended
and enters with the sign flipped. Appending a row or a column is an
exact block update of the tableau (a new slack starts basic, so the
enlarged basis inverse is block triangular; a mirrored column is the
negation of an existing tableau column), so a growing step costs a few
dual pivots rather than a fresh two-phase solve.

The loop stops only at a full certificate: no violated family member
and no pressed pair coordinate. At that point the working optimum is
optimal for the complete program with sign-free pairs, because the dual
rests entirely on genuine constraint rows. Whenever a pair is unpinned,
its two single-partner rows m({t}) + m({t,u}) >= 0 join the working
set, which keeps the polytope bounded at all times (without them it has
recession directions along pair-coefficient cycles). Degeneracy is
endemic here (almost every right-hand side is zero), so ratio-test ties
are broken lexicographically, tiny pivot elements are rejected unless
confirmed on a fresh factorization, and every claimed verdict is
re-checked after recomputing the tableau from the basis.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import IO, Sequence

import numpy as np

from .capacity import (
    ConstraintSet,
    MobiusVector,
    mobius_dim,
    monotonicity_row,
    monotonicity_slack,
    pair_table,
)

FEAS_TOL = 1e-9
COMPATIBILITY_THRESHOLD = 1e-6
_PIVOT_TOL = 1e-9
_SOLID_PIVOT = 1e-7
_MAX_PIVOTS = 200_000
_MAX_ROUNDS = 500
_REFACTOR_EVERY = 1024
_PAUSE_PIVOTS = 96
_JITTER = 1e-4
_KAPPA = 1e-7


def _jitter_pattern(start, k):
    """Deterministic per-row perturbation sizes in [0.5, 1.5), keyed to
    row ids so reruns produce identical arithmetic."""
    ids = np.arange(start + 1, start + k + 1, dtype=float)
    return 0.5 + np.mod(ids * 0.6180339887498949, 1.0)


@dataclass(frozen=True)
class LpSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    epsilon: float
    mobius: MobiusVector | None
    pivots: int
    generated_rows: int

    @property
    def compatible(self) -> bool:
        return self.status == "optimal" and self.epsilon >= COMPATIBILITY_THRESHOLD


class _Tableau:
    """Dense simplex over structural columns plus one slack per
    inequality row, with rows and mirrored columns appended in place.

    Constraints are A_ge x >= b_ge and A_eq x = b_eq; columns flagged in
    `free` carry no sign restriction, every other column (slacks
    included) is nonnegative. Construction runs phase 1 and leaves the
    object on a feasible basis; `status` reports "infeasible" when no
    feasible point exists. The original rows are kept immutable, so the
    tableau can be recomputed from the basis at any time; `dirty` counts
    the updates applied since the last recomputation and a verdict is
    only returned at dirty == 0.
    """

    def __init__(self, A_ge, b_ge, A_eq, b_eq, free, jitter_ge=None):
        A = np.vstack([np.atleast_2d(A_ge), np.atleast_2d(A_eq)]).astype(float)
        b = np.concatenate([b_ge, b_eq]).astype(float)
        n_ge = len(b_ge)
        rows, self.n_struct = A.shape

        # bounds of >= rows may start relaxed by a tiny deterministic
        # perturbation (an anti-degeneracy measure, removed later by
        # clear_jitter); self.jitter records what to add back in the
        # stored row orientation
        self.jitter = np.zeros(rows)
        if jitter_ge is not None:
            b[:n_ge] -= jitter_ge
            self.jitter[:n_ge] = jitter_ge

        # one slack per inequality row; a row with b <= 0 is flipped so
        # its slack can start basic, which keeps phase 1 tiny (here only
        # the handful of equality rows ever needs an artificial)
        aux = np.zeros((rows, n_ge))
        needs_artificial = np.ones(rows, dtype=bool)
        for i in range(n_ge):
            if b[i] <= 0.0:
                A[i] *= -1.0
                b[i] = -b[i]
                aux[i, i] = 1.0
                needs_artificial[i] = False
                self.jitter[i] = -self.jitter[i]
            else:
                aux[i, i] = -1.0
        flip = b < 0.0
        A[flip] *= -1.0
        aux[flip] *= -1.0
        b[flip] = -b[flip]
        self.jitter[flip] = -self.jitter[flip]

        art_rows = np.flatnonzero(needs_artificial)
        art = np.zeros((rows, len(art_rows)))
        art[art_rows, np.arange(len(art_rows))] = 1.0
        self.A_full = np.hstack([A, aux, art])
        self.b_full = b
        self.n_art = len(art_rows)

        n_total = self.A_full.shape[1]
        self.free_col = np.zeros(n_total, dtype=bool)
        self.free_col[: self.n_struct] = np.asarray(free, dtype=bool)
        self.usable = np.ones(n_total, dtype=bool)
        self.basis = np.empty(rows, dtype=np.intp)
        art_of = {int(r): k for k, r in enumerate(art_rows)}
        for i in range(rows):
            if needs_artificial[i]:
                self.basis[i] = self.n_struct + n_ge + art_of[i]
            else:
                self.basis[i] = self.n_struct + i
        self.in_basis = np.zeros(n_total, dtype=bool)
        self.in_basis[self.basis] = True
        self.lex_cols = np.sort(self.basis)
        self.pivots = 0
        self.dirty = 0
        self.T = None
        self._refactor()
        self.status = self._phase1()

    # -- tableau maintenance ------------------------------------------

    def _refactor(self):
        B = self.A_full[:, self.basis]
        self.T = np.linalg.solve(B, np.hstack([self.A_full, self.b_full[:, None]]))
        self.dirty = 0

    def _reduced(self, c_full):
        return np.append(c_full, 0.0) - c_full[self.basis] @ self.T

    def _pivot(self, row, col, costs):
        self.T[row] /= self.T[row, col]
        column = self.T[:, col].copy()
        column[row] = 0.0
        self.T -= np.outer(column, self.T[row])
        self.T[:, col] = 0.0
        self.T[row, col] = 1.0
        for cost in costs:
            cost -= cost[col] * self.T[row]
            cost[col] = 0.0
        self.in_basis[self.basis[row]] = False
        self.in_basis[col] = True
        self.basis[row] = col
        self.pivots += 1
        self.dirty += 1
        if self.pivots > _MAX_PIVOTS:
            raise RuntimeError("simplex exceeded the pivot budget")

    def _lex_leaving(self, tied, col):
        cand = tied
        for c in self.lex_cols:
            vals = self.T[cand, c] / col[cand]
            cand = cand[vals <= vals.min() + 1e-12]
            if len(cand) == 1:
                break
        return int(cand[np.argmin(self.basis[cand])])

    # -- phase 1 -------------------------------------------------------

    def _phase1(self):
        if self.n_art == 0:
            return "optimal"
        c1 = np.zeros(self.A_full.shape[1])
        c1[-self.n_art:] = 1.0
        status, cost = self._primal(c1)
        if status != "optimal" or -cost[-1] > 1e-7:
            return "infeasible"
        # drive leftover artificials out; a row that cannot pivot on any
        # usable column is redundant and drops out
        art_floor = self.A_full.shape[1] - self.n_art
        keep = []
        for i in range(len(self.basis)):
            if self.basis[i] < art_floor:
                keep.append(i)
                continue
            row = np.where(self.usable[:art_floor], np.abs(self.T[i, :art_floor]), 0.0)
            piv = int(np.argmax(row))
            if row[piv] > 1e-7:
                self._pivot(i, piv, [cost])
                keep.append(i)
        if len(keep) < len(self.basis):
            self.A_full = self.A_full[keep]
            self.b_full = self.b_full[keep]
            self.jitter = self.jitter[keep]
            self.basis = self.basis[keep]
        self.usable[art_floor:] = False
        self._refactor()
        return "optimal"

    # -- iteration -----------------------------------------------------

    def _entering(self, cost):
        cand = self.usable & ~self.in_basis
        red = cost[:-1]
        gain = np.where(cand & (red < -_PIVOT_TOL), -red, 0.0)
        down = np.where(cand & self.free_col & (red > _PIVOT_TOL), red, 0.0)
        gain = np.maximum(gain, down)
        entering = int(np.argmax(gain))
        if gain[entering] <= 0.0:
            return -1, 0
        return entering, 1 if red[entering] < 0.0 else -1

    def _primal(self, c_full, pause_every=None):
        """Minimize c_full over the current rows with Dantzig pricing;
        free columns may enter in either direction and free basics never
        block the ratio test. With `pause_every`, control returns to the
        caller after that many pivots (status "paused") so it can grow
        the row set mid-flight instead of waiting for a doomed optimum.
        """
        cost = self._reduced(c_full)
        start = self.pivots
        while True:
            if pause_every is not None and self.pivots - start >= pause_every:
                return "paused", cost
            entering, d = self._entering(cost)
            if entering < 0:
                if self.dirty == 0:
                    return "optimal", cost
                self._refactor()
                cost = self._reduced(c_full)
                continue
            col = d * self.T[:, entering]
            blocking = ~self.free_col[self.basis] & (col > _PIVOT_TOL)
            if not blocking.any():
                if self.dirty == 0:
                    return "unbounded", cost
                self._refactor()
                cost = self._reduced(c_full)
                continue
            # clamp drifted negative basics so degenerate pivots never
            # take a backward step
            ratios = np.full(len(col), np.inf)
            ratios[blocking] = np.maximum(self.T[blocking, -1], 0.0) / col[blocking]
            best = ratios.min()
            tied = np.flatnonzero(ratios <= best + 1e-12)
            if len(tied) > 1:
                # prefer numerically solid pivot elements among the tie
                tied = tied[col[tied] >= 0.01 * col[tied].max()]
            leaving = self._lex_leaving(tied, col) if len(tied) > 1 else int(tied[0])
            if col[leaving] < _SOLID_PIVOT and self.dirty > 0:
                # a tiny pivot element may be pure drift; decide on a
                # fresh factorization
                self._refactor()
                cost = self._reduced(c_full)
                continue
            self._pivot(leaving, entering, [cost])
            if self.dirty >= _REFACTOR_EVERY:
                self._refactor()
                cost = self._reduced(c_full)

    def _dual(self, c_full):
        """Restore primal feasibility after appended rows, keeping the
        basis optimal for c_full."""
        cost = self._reduced(c_full)
        while True:
            rhs = self.T[:, -1]
            restricted = ~self.free_col[self.basis]
            viol = np.flatnonzero(restricted & (rhs < -FEAS_TOL))
            if len(viol) == 0:
                if self.dirty == 0:
                    return "optimal"
                self._refactor()
                cost = self._reduced(c_full)
                continue
            # steepest-edge flavored pricing: worst violation relative to
            # the row's length, which beats raw magnitude badly here
            norms = np.linalg.norm(self.T[viol, :-1], axis=1)
            r = int(viol[np.argmax(-rhs[viol] / np.maximum(norms, 1e-300))])
            row = self.T[r, :-1]
            red = cost[:-1]
            cand = self.usable & ~self.in_basis
            neg = cand & ~self.free_col & (row < -_PIVOT_TOL)
            fre = cand & self.free_col & (np.abs(row) > _PIVOT_TOL)
            if not (neg.any() or fre.any()):
                if self.dirty == 0:
                    return "infeasible"
                self._refactor()
                cost = self._reduced(c_full)
                continue
            ratios = np.full(len(row), np.inf)
            ratios[neg] = np.maximum(red[neg], 0.0) / -row[neg]
            ratios[fre] = np.abs(red[fre]) / np.abs(row[fre])
            best = ratios.min()
            near = np.flatnonzero(ratios <= best + 1e-12)
            entering = int(near[np.argmax(np.abs(row[near]))])
            if abs(row[entering]) < _SOLID_PIVOT and self.dirty > 0:
                self._refactor()
                cost = self._reduced(c_full)
                continue
            self._pivot(r, entering, [cost])
            if self.dirty >= _REFACTOR_EVERY:
                self._refactor()
                cost = self._reduced(c_full)

    # -- growth ----------------------------------------------------------

    def append_rows(self, rows_struct, rhs, jitter=None):
        """Append inequality rows (structural coefficients, >= sense).

        Each new slack starts basic, so the enlarged basis inverse is
        block triangular and the new tableau rows come from one exact
        elimination against the current ones; feasibility repair is left
        to a following _dual call. `jitter` relaxes each row's bound by
        that much, to be restored by clear_jitter.
        """
        k = len(rhs)
        rhs = np.asarray(rhs, dtype=float)
        if jitter is None:
            jitter = np.zeros(k)
        used = rhs - jitter
        n_rows, n_old = self.A_full.shape
        new = np.zeros((k, n_old + k))
        new[:, : self.n_struct] = rows_struct
        new[np.arange(k), n_old + np.arange(k)] = -1.0
        self.A_full = np.vstack([
            np.hstack([self.A_full, np.zeros((n_rows, k))]),
            new,
        ])
        self.b_full = np.concatenate([self.b_full, used])
        self.jitter = np.concatenate([self.jitter, np.asarray(jitter, dtype=float)])

        T_ext = np.hstack([self.T[:, :-1], np.zeros((n_rows, k)), self.T[:, -1:]])
        reducer = new[:, self.basis]
        new_ext = np.hstack([new, used[:, None]])
        new_tab = reducer @ T_ext - new_ext
        self.T = np.vstack([T_ext, new_tab])

        self.free_col = np.concatenate([self.free_col, np.zeros(k, dtype=bool)])
        self.usable = np.concatenate([self.usable, np.ones(k, dtype=bool)])
        self.in_basis = np.concatenate([self.in_basis, np.ones(k, dtype=bool)])
        self.basis = np.concatenate([self.basis, n_old + np.arange(k)])
        self.lex_cols = np.concatenate([self.lex_cols, n_old + np.arange(k)])
        self.dirty += 1
        return list(range(n_rows, n_rows + k))

    def clear_jitter(self):
        """Restore the exact bounds of all perturbed rows and refactor;
        a following _dual call repairs the handful of rows the
        perturbation was holding open."""
        if not self.jitter.any():
            return
        self.b_full = self.b_full + self.jitter
        self.jitter = np.zeros_like(self.jitter)
        self._refactor()

    def set_free(self, col):
        """Lift the sign restriction on a column in place; nothing else
        about the tableau changes, the pricing rules simply start
        treating it as free."""
        self.free_col[col] = True

    def witness(self):
        x = np.zeros(self.n_struct)
        inside = self.basis < self.n_struct
        x[self.basis[inside]] = self.T[inside, -1]
        return x


def _structural_rows(c: ConstraintSet):
    """Constraint rows as one dense block (m columns then epsilon)."""
    M = np.array(c.coeffs, dtype=float)
    ops = list(c.ops)
    rhs = np.asarray(c.rhs, dtype=float)
    return M, ops, rhs


def _margin_problem(c: ConstraintSet):
    """Tableau over (m >= 0 componentwise, 0 <= eps <= 1) for the rows
    of c; pair coordinates gain a mirrored negative part on demand."""
    dim = mobius_dim(c.n_leaves)
    M, ops, rhs = _structural_rows(c)
    ge = [k for k, op in enumerate(ops) if op == ">="]
    eq = [k for k, op in enumerate(ops) if op == "="]
    cap = np.zeros(dim + 1)
    cap[-1] = -1.0
    A_ge = np.vstack([M[ge], cap])
    b_ge = np.append(rhs[ge], -1.0)
    # almost every right-hand side here is zero, which makes the
    # vertices massively degenerate; starting every inequality with a
    # perturbed bound spreads the hyperplanes apart (solve_epsilon_max
    # removes the perturbation once row generation settles)
    jit = _JITTER * _jitter_pattern(0, len(b_ge))
    free = np.zeros(dim + 1, dtype=bool)
    return _Tableau(A_ge, b_ge, M[eq], rhs[eq], free, jitter_ge=jit)


class _SupportLoop:
    """Shared row-and-column growth loop for both entry points.

    Alternates two moves until neither applies: append the sign-rule
    cuts violated at the current witness, and lift the sign restriction
    on the pair coordinates whose reduced cost is positive (each also
    gains its two single-partner rows, which keep the polytope
    bounded). At exit the optimum carries a dual certificate for the
    complete program: every family row holds at the witness and no
    still-restricted coordinate could improve the objective by going
    negative.
    """

    def __init__(self, tb, n, row_of_cut, gen_tol=FEAS_TOL):
        self.tb = tb
        self.n = n
        self.dim = mobius_dim(n)
        self.row_of_cut = row_of_cut
        self.gen_tol = gen_tol
        self.generated: set[tuple[int, frozenset[int]]] = set()
        self.gen_rows: list[np.ndarray] = []
        self.freed: set[int] = set()
        self.iu, self.ju = np.triu_indices(n, k=1)

    def admit(self, cuts):
        rows = []
        for t, subset in cuts:
            rows.append(self.row_of_cut(t, subset))
            self.gen_rows.append(monotonicity_row(t, sorted(subset), self.n)[: self.dim])
            self.generated.add((t, subset))
        self.tb.append_rows(np.array(rows), np.zeros(len(rows)))

    def unpin(self, reduced):
        """Free every pair coordinate under pressure; returns False when
        there is none, which together with a clean sign rule certifies
        the optimum.

        A restricted pair with positive reduced cost would improve the
        optimum by dipping below zero, so its sign restriction is
        lifted. Freeing all of them at once costs a wider cut fence but
        converges directly; freeing them in small batches just replays
        the fence once per batch, because the pressure ranking does not
        predict which pairs the optimum actually uses.
        """
        pressed = [
            p
            for p in range(self.n, self.dim)
            if p not in self.freed and reduced[p] > FEAS_TOL
        ]
        if not pressed:
            return False
        singles = []
        for p in pressed:
            self.freed.add(p)
            self.tb.set_free(p)
            t, u = int(self.iu[p - self.n]), int(self.ju[p - self.n])
            for cut in ((t, frozenset([u])), (u, frozenset([t]))):
                if cut not in self.generated and cut not in singles:
                    singles.append(cut)
        if singles:
            # once both signs are available the pair is bounded below
            # only by its single-partner rows, so they enter at once
            self.admit(singles)
        return True

    def run(self, objective):
        tb = self.tb
        status, red = tb._primal(_pad_struct(objective, tb), pause_every=_PAUSE_PIVOTS)
        for _ in range(_MAX_ROUNDS * 8):
            if status not in ("optimal", "paused"):
                return status, None
            x = tb.witness()
            new = _violated_subsets(x[: self.dim], self.n, self.generated, tol=self.gen_tol)
            if new:
                # valid rows whether or not the point was optimal, so a
                # paused ascent gets pruned before it wanders far
                self.admit(new)
                if tb._dual(_pad_struct(objective, tb)) == "infeasible":
                    raise RuntimeError("cut repair lost feasibility")
            elif status == "optimal" and not self.unpin(red):
                return "optimal", x
            status, red = tb._primal(_pad_struct(objective, tb), pause_every=_PAUSE_PIVOTS)
        raise RuntimeError("monotonicity row generation did not converge")


def solve_epsilon_max(
    c: ConstraintSet, emit: str | IO[str] | None = None, labels: Sequence[str] | None = None
) -> LpSolution:
    """Maximize the shared margin epsilon over a constraint set.

    Monotonicity rows are generated lazily by the sign rule: after each
    solve the tightest violated partner subset of every leaf is appended
    and the optimum repaired with dual steps. Pair coordinates start
    pinned at zero and are unpinned when the optimum presses against the
    pin, so the working polytope stays bounded and small while the
    answer is certified against the complete sign-free program. The
    margin is capped at 1; the cap never binds when any comparison row
    is present and merely keeps the profile-free program bounded.
    """
    n = c.n_leaves
    dim = mobius_dim(n)
    tb = _margin_problem(c)
    if tb.status != "optimal":
        if emit is not None:
            _dump(c, [], emit, labels)
        return LpSolution("infeasible", float("nan"), None, tb.pivots, 0)

    margin = np.zeros(dim + 1)
    margin[dim] = -1.0  # minimize -eps

    loop = _SupportLoop(
        tb,
        n,
        lambda t, sub: monotonicity_row(t, sorted(sub), n),
        gen_tol=2.0 * _JITTER,
    )
    for exact in (False, True):
        if exact:
            tb.clear_jitter()
            loop.gen_tol = FEAS_TOL
            if tb._dual(_pad_struct(margin, tb)) == "infeasible":
                raise RuntimeError("removing the perturbation lost feasibility")
        status, x = loop.run(margin)
        if status != "optimal":
            if emit is not None:
                _dump(c, loop.gen_rows, emit, labels)
            return LpSolution(status, float("nan"), None, tb.pivots, len(loop.gen_rows))

    eps = float(x[dim])
    mv = MobiusVector(x[:dim].copy(), n)
    _check_witness(c, mv, eps)
    if emit is not None:
        _dump(c, loop.gen_rows, emit, labels)
    return LpSolution("optimal", eps, mv, tb.pivots, len(loop.gen_rows))


def _pad_struct(obj_struct, tb):
    out = np.zeros(tb.A_full.shape[1])
    out[: tb.n_struct] = obj_struct
    return out


def _violated_subsets(m, n, generated, tol=FEAS_TOL):
    """Tightest violated monotonicity subset per leaf, by the sign rule:
    T* collects the partners with negative pair coefficient, and no
    other subset has a smaller slack."""
    P = pair_table(MobiusVector(np.asarray(m), n))
    out = []
    for t in range(n):
        row = P[t]
        mask = row < 0.0
        mask[t] = False
        subset = frozenset(np.flatnonzero(mask).tolist())
        slack = m[t] + row[mask].sum()
        if slack < -tol and (t, subset) not in generated:
            out.append((t, subset))
    return out


def _check_witness(c: ConstraintSet, mv: MobiusVector, eps: float) -> None:
    slacks = c.slacks(mv.values, eps)
    worst = slacks.min() if len(slacks) else 0.0
    mono = monotonicity_slack(mv).min()
    if worst < -FEAS_TOL or mono < -FEAS_TOL:
        raise RuntimeError(
            f"simplex witness violates the constraints (slack {min(worst, mono):.3e})"
        )


def diagnose(c: ConstraintSet) -> tuple[str, ...]:
    """Shrink an incompatible constraint set to one irreducible core.

    Deletion filter over statement tags, in file order: drop a
    statement, re-solve, and keep the drop whenever the remainder is
    still incompatible. The surviving tags form a minimal subset that
    cannot be reduced further without restoring compatibility.
    """
    if solve_epsilon_max(c).compatible:
        raise ValueError("the constraint set is compatible; there is nothing to diagnose")
    tags = c.statement_tags()
    removed: set[str] = set()
    for tag in tags:
        trial = c.without_tags(removed | {tag})
        if not solve_epsilon_max(trial).compatible:
            removed.add(tag)
    return tuple(t for t in tags if t not in removed)


def chebyshev_center(c: ConstraintSet, epsilon: float) -> tuple[np.ndarray, float]:
    """Deepest interior point of the compatible polytope at a fixed margin.

    Distances are measured inside the affine subspace cut out by the
    equality rows (the normalization and any importance equalities), so
    each inequality row contributes its norm projected onto that
    subspace. Monotonicity rows join by the same sign-rule generation
    and pair unpinning as the margin program, with cuts required to hold
    strictly. Returns the center and its radius; a radius of ~0 means
    the region has no interior to walk in.
    """
    n = c.n_leaves
    dim = mobius_dim(n)
    M, ops, rhs = _structural_rows(c)
    ge = [k for k, op in enumerate(ops) if op == ">="]
    eq = [k for k, op in enumerate(ops) if op == "="]
    A_ineq = M[ge, :dim]
    b_ineq = rhs[ge] - M[ge, dim] * epsilon
    A_eq = M[eq, :dim]
    b_eq = rhs[eq] - M[eq, dim] * epsilon

    _, s, vh = np.linalg.svd(A_eq)
    rank = int((s > s[0] * 1e-12).sum()) if len(s) else 0
    null_basis = vh[rank:]

    def center_row(a):
        return np.append(a, -np.linalg.norm(null_basis @ a))

    rows_ge = np.vstack([
        np.array([center_row(a) for a in A_ineq]),
        np.append(np.zeros(dim), -1.0),  # radius cap, inert in practice
    ])
    b_ge = np.concatenate([b_ineq, [-1.0]])
    rows_eq = np.hstack([A_eq, np.zeros((len(eq), 1))])
    free = np.zeros(dim + 1, dtype=bool)
    tb = _Tableau(rows_ge, b_ge, rows_eq, b_eq, free)
    if tb.status != "optimal":
        raise RuntimeError("center search failed: no feasible point at this margin")

    radius_obj = np.zeros(dim + 1)
    radius_obj[dim] = -1.0

    loop = _SupportLoop(
        tb,
        n,
        lambda t, sub: center_row(monotonicity_row(t, sorted(sub), n)[:dim]),
        gen_tol=-1e-9,
    )
    status, x = loop.run(radius_obj)
    if status != "optimal":
        raise RuntimeError(f"center search failed: LP {status}")

    radius = float(x[dim])
    if radius < 1e-9:
        raise RuntimeError(
            f"the compatible region has no interior at margin {epsilon:g} "
            f"(radius {radius:.3e})"
        )
    return x[:dim].copy(), radius


def _dump(c: ConstraintSet, gen_rows, emit, labels) -> None:
    names = list(labels) if labels is not None else [f"x{k}" for k in range(mobius_dim(c.n_leaves))]

    def fmt(coeffs, eps_coeff=0.0):
        terms = [
            f"{v:+.12g} {names[k]}"
            for k, v in enumerate(coeffs)
            if v != 0.0
        ]
        if eps_coeff != 0.0:
            terms.append(f"{eps_coeff:+.12g} eps")
        return " ".join(terms) if terms else "0"

    lines = ["max eps", "subject to"]
    for row, op, rhs, tag in zip(c.coeffs, c.ops, c.rhs, c.tags):
        body = fmt(row[:-1], row[-1])
        lines.append(f"  {tag}: {body} {op} {rhs:.12g}")
    for k, row in enumerate(gen_rows):
        lines.append(f"  mono{k}: {fmt(row)} >= 0")
    lines.append("  0 <= eps <= 1")
    text = "\n".join(lines) + "\n"
    if hasattr(emit, "write"):
        emit.write(text)
    else:
        with open(emit, "w", encoding="utf-8") as fh:
            fh.write(text)
