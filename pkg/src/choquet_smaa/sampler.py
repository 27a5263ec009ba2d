"""Uniform sampling of the compatible capacity polytope.

Hit-and-run walk. The state lives in the affine subspace cut out by the
equality rows (normalization plus any importance equalities); directions
are drawn isotropically inside that subspace through an orthonormal null
space basis, so equalities stay satisfied exactly and never clip a chord.

Chord endpoints are exact. Comparison rows are linear, so their bounds are
plain ratio tests. Monotonicity is the full family "singleton plus any
partner subset stays nonnegative", exponentially many rows, but along a
line each leaf contributes the function

    f_t(lam) = m_t + lam d_t + sum_u min(p_tu + lam q_tu, 0)

which is concave and piecewise linear. Its feasible interval around 0 is
found by walking the sorted breakpoints with a running slope, one vector
operation per leaf batch. Sampling against f_t >= 0 enforces every subset
row of the family at once, with no working set and no rejection step.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .capacity import ConstraintSet, MobiusVector, mobius_dim
from .lp import chebyshev_center, solve_epsilon_max

THREADS_ENV = "CHOQUET_SMAA_THREADS"
_FAR = 1e18  # sentinel breakpoint, far beyond any real chord


@dataclass(frozen=True)
class SamplerOptions:
    burn_in: int = 1000
    thinning: int = 10
    chains: int = 1
    epsilon: float | None = None  # margin override; default min(eps*/2, 1e-4)


@dataclass(frozen=True)
class SampleSet:
    matrix: np.ndarray  # (n_samples, mobius_dim)
    n_leaves: int
    seed: int
    epsilon: float
    epsilon_star: float
    center_radius: float
    options: SamplerOptions = field(default_factory=SamplerOptions)

    def __len__(self) -> int:
        return self.matrix.shape[0]

    def __getitem__(self, k: int) -> MobiusVector:
        return MobiusVector(self.matrix[k], self.n_leaves)

    def __iter__(self):
        for k in range(len(self)):
            yield self[k]

    @property
    def vectors(self) -> list[MobiusVector]:
        return list(self)


def _pair_index(n: int) -> np.ndarray:
    """(n, n) gather map from a Mobius vector to its pair table; the
    diagonal points at slot 0 and is masked off by callers."""
    idx = np.zeros((n, n), dtype=np.intp)
    iu, ju = np.triu_indices(n, k=1)
    pos = n + np.arange(len(iu))
    idx[iu, ju] = pos
    idx[ju, iu] = pos
    return idx


def _forward_limit(xs, ds, A, B):
    """Largest lam >= 0 keeping every f_t(lam) >= 0, one entry per leaf.

    A, B hold the pair terms (value and direction); inert entries carry
    A = +inf, B = 0. Concavity makes the first sign change the only one,
    so a single pass over the sorted breakpoints per leaf suffices.
    """
    neg = A < 0
    f0 = xs + np.where(neg, A, 0.0).sum(axis=1)
    active = neg | ((A == 0.0) & (B < 0.0))
    s0 = ds + np.where(active, B, 0.0).sum(axis=1)

    crossing = (neg & (B > 0.0)) | ((A > 0.0) & np.isfinite(A) & (B < 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        lam = np.where(crossing, -A / B, _FAR)
    delta = np.where(crossing, -np.abs(B), 0.0)

    order = np.argsort(lam, axis=1)
    lam = np.take_along_axis(lam, order, axis=1)
    delta = np.take_along_axis(delta, order, axis=1)

    zeros = np.zeros((len(xs), 1))
    bounds = np.hstack([zeros, lam])
    slopes = s0[:, None] + np.hstack([zeros, np.cumsum(delta, axis=1)])
    values = f0[:, None] + np.hstack(
        [zeros, np.cumsum(slopes[:, :-1] * np.diff(bounds, axis=1), axis=1)]
    )

    below = values < 0.0
    hit = below.any(axis=1)
    first = np.argmax(below, axis=1)
    prev = np.maximum(first - 1, 0)
    rows = np.arange(len(xs))
    v, s, b = values[rows, prev], slopes[rows, prev], bounds[rows, prev]
    with np.errstate(divide="ignore", invalid="ignore"):
        cross_at = np.where(s < 0.0, b - v / s, _FAR)
    limit = np.where(hit, np.where(first == 0, 0.0, cross_at), _FAR)
    return limit.min()


class _Walk:
    def __init__(self, c: ConstraintSet, epsilon: float):
        self.n = c.n_leaves
        dim = mobius_dim(self.n)
        A = np.array([row[:-1] for row in c.coeffs], dtype=float)
        e = np.array([row[-1] for row in c.coeffs], dtype=float)
        rhs = np.asarray(c.rhs, dtype=float)
        ops = np.asarray(c.ops)
        # comparison rows need explicit chord clipping; base inequality
        # rows are members of the monotonicity family and come for free
        keep = (ops == ">=") & (np.asarray(c.tags) != "base")
        self.A = A[keep]
        self.b = rhs[keep] - e[keep] * epsilon
        eq = ops == "="
        _, s, vh = np.linalg.svd(A[eq]) if eq.any() else (None, np.zeros(0), np.eye(dim))
        rank = int((s > s[0] * 1e-12).sum()) if len(s) else 0
        self.null_basis = vh[rank:]
        self.pair_idx = _pair_index(self.n)
        self.offdiag = ~np.eye(self.n, dtype=bool)

    def chord(self, x, d):
        # linear comparison rows
        lo, hi = -np.inf, np.inf
        if len(self.A):
            alpha = self.A @ d
            slack = self.A @ x - self.b
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = -slack / alpha
            pos = alpha > 1e-14
            neg_ = alpha < -1e-14
            if pos.any():
                lo = max(lo, ratio[pos].max())
            if neg_.any():
                hi = min(hi, ratio[neg_].min())

        # monotonicity family, forward then backward
        xs, ds = x[: self.n], d[: self.n]
        P = np.where(self.offdiag, x[self.pair_idx], np.inf)
        Q = np.where(self.offdiag, d[self.pair_idx], 0.0)
        hi = min(hi, _forward_limit(xs, ds, P, Q))
        lo = max(lo, -_forward_limit(xs, -ds, P, -Q))
        return lo, hi

    def run(self, x0, rng, kept, burn_in, thin):
        x = x0.copy()
        q = self.null_basis.shape[0]
        out = np.empty((kept, x0.size))
        row = 0
        total = burn_in + kept * thin
        for step in range(total):
            u = rng.standard_normal(q)
            d = self.null_basis.T @ u
            d /= np.linalg.norm(d)
            lo, hi = self.chord(x, d)
            if not (lo <= 0.0 <= hi) or hi - lo < 1e-14:
                raise RuntimeError(
                    f"chord degenerated at step {step} (interval [{lo:.3e}, {hi:.3e}])"
                )
            x = x + (lo + rng.random() * (hi - lo)) * d
            if step >= burn_in and (step - burn_in) % thin == thin - 1:
                out[row] = x
                row += 1
        return out


def _pool_size(chains: int) -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return min(chains, os.cpu_count() or 1)
    try:
        cap = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if cap < 1:
        raise ValueError(f"{THREADS_ENV} must be positive, got {cap}")
    return min(chains, cap)


def sample(c: ConstraintSet, n: int, seed: int, opts: SamplerOptions | None = None) -> SampleSet:
    """Draw n capacities uniformly from the region a constraint set allows.

    The margin is first maximized; an incompatible set raises. Sampling
    then fixes the margin at min(eps*/2, 1e-4) (or the override in opts),
    starts every chain at the Chebyshev center, and walks with the chain's
    own generator seeded seed + chain index. Chains contribute
    near-equal slices of n and are concatenated in chain order, so the
    result depends only on (c, n, seed, opts), never on scheduling.
    """
    opts = opts or SamplerOptions()
    if n < 1:
        raise ValueError("need at least one sample")
    if opts.burn_in < 0 or opts.thinning < 1 or opts.chains < 1:
        raise ValueError("burn_in >= 0, thinning >= 1 and chains >= 1 required")

    sol = solve_epsilon_max(c)
    if not sol.compatible:
        raise ValueError(
            f"constraint set is incompatible (status {sol.status}, "
            f"eps* {sol.epsilon if sol.status == 'optimal' else float('nan'):.3g}); "
            f"nothing to sample"
        )
    epsilon = opts.epsilon if opts.epsilon is not None else min(sol.epsilon / 2.0, 1e-4)
    if not 0.0 < epsilon <= sol.epsilon:
        raise ValueError(f"margin {epsilon:g} is outside (0, eps*]")

    center, radius = chebyshev_center(c, epsilon)
    walk = _Walk(c, epsilon)

    counts = [n // opts.chains + (1 if k < n % opts.chains else 0) for k in range(opts.chains)]

    def one(k: int) -> np.ndarray:
        rng = np.random.Generator(np.random.PCG64(seed + k))
        return walk.run(center, rng, counts[k], opts.burn_in, opts.thinning)

    if opts.chains == 1:
        parts = [one(0)]
    else:
        with ThreadPoolExecutor(max_workers=_pool_size(opts.chains)) as pool:
            parts = list(pool.map(one, range(opts.chains)))
    matrix = np.vstack(parts)

    _validate(c, matrix, epsilon)
    return SampleSet(
        matrix=matrix,
        n_leaves=c.n_leaves,
        seed=seed,
        epsilon=float(epsilon),
        epsilon_star=float(sol.epsilon),
        center_radius=radius,
        options=opts,
    )


def _validate(c: ConstraintSet, matrix: np.ndarray, epsilon: float, tol: float = 1e-7) -> None:
    """Every sample must satisfy every input row and the whole
    monotonicity family within tol; the walk guarantees this, so a
    violation means a numerical defect worth failing loudly on."""
    A = np.array([row[:-1] for row in c.coeffs], dtype=float)
    e = np.array([row[-1] for row in c.coeffs], dtype=float)
    rhs = np.asarray(c.rhs, dtype=float)
    vals = matrix @ A.T + epsilon * e - rhs
    worst = np.inf
    for k, op in enumerate(c.ops):
        col = vals[:, k]
        # equality rows count by absolute deviation, the rest by slack
        worst = min(worst, (-np.abs(col) if op == "=" else col).min())
    n = c.n_leaves
    idx = _pair_index(n)
    off = ~np.eye(n, dtype=bool)
    for start in range(0, len(matrix), 2048):
        block = matrix[start:start + 2048]
        P = np.where(off, block[:, idx.ravel()].reshape(len(block), n, n), np.inf)
        slack = block[:, :n] + np.minimum(P, 0.0).sum(axis=2)
        worst = min(worst, slack.min())
    if worst < -tol:
        raise RuntimeError(f"sample validation failed: worst slack {worst:.3e}")


def samples_to_csv(s: SampleSet, target, labels: list[str]) -> None:
    """Dump the raw sample matrix, one row per capacity, full precision."""
    if len(labels) != s.matrix.shape[1]:
        raise ValueError("label count does not match the Mobius dimension")

    def write(f):
        f.write(",".join(labels) + "\n")
        for row in s.matrix:
            f.write(",".join(format(v, ".17g") for v in row) + "\n")

    if isinstance(target, str):
        with open(target, "w", encoding="utf-8") as f:
            write(f)
    else:
        write(target)
