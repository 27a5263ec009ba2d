"""Rank statistics over sampled capacities.

Every statistic is an exact integer count divided by the sample size:
rank acceptability counts how often an alternative lands on each position,
the pairwise winning index counts strict score wins, and the summary
condenses a rank matrix into best/worst/most-frequent positions plus the
expected-ranking score E(a) = -sum_s s*b^s(a), whose descending order is
the final ordinal ranking.

Ranks come from strict comparison only: an alternative's rank is one plus
the number of strictly better alternatives, so exactly tied scores share
the better position. Ties are counted and reported rather than broken at
random, keeping every run reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .capacity import choquet_features, node_mask
from .dataset import NormalizedTable
from .hierarchy import CriterionId, Hierarchy
from .sampler import SampleSet

_BLOCK = 2048


@dataclass(frozen=True)
class RankMatrix:
    node: CriterionId
    alternatives: tuple[str, ...]
    counts: np.ndarray  # (A, A) int64; counts[a, s-1] = |samples ranking a at s|
    n_samples: int
    ties: int  # tied (sample, unordered pair) events

    @property
    def rai(self) -> np.ndarray:
        return self.counts / self.n_samples


@dataclass(frozen=True)
class WinMatrix:
    node: CriterionId
    alternatives: tuple[str, ...]
    wins: np.ndarray  # (A, A) int64; wins[a, b] = |samples scoring a above b|
    tie_counts: np.ndarray  # (A, A) int64, symmetric
    n_samples: int

    @property
    def pwi(self) -> np.ndarray:
        return self.wins / self.n_samples

    @property
    def tie_freq(self) -> np.ndarray:
        return self.tie_counts / self.n_samples


@dataclass(frozen=True)
class RankSummary:
    node: CriterionId
    alternatives: tuple[str, ...]
    best: np.ndarray
    best_rai: np.ndarray
    worst: np.ndarray
    worst_rai: np.ndarray
    high: np.ndarray  # (A, 3) positions, most frequent first
    high_rai: np.ndarray  # (A, 3)
    expected: np.ndarray  # E(a), larger is better
    position: np.ndarray  # ordinal 1..A by descending E(a)


def rank_of(values: np.ndarray, a: int) -> int:
    """Position of alternative a among one sample's scores: one plus the
    number of strictly larger values, so ties share the better rank."""
    values = np.asarray(values, dtype=float)
    return int(1 + (values > values[a]).sum())


def scores(samples: SampleSet, table: NormalizedTable, h: Hierarchy, r: CriterionId) -> np.ndarray:
    """(n_samples, n_alternatives) matrix of node scores.

    The score of an alternative is linear in the Mobius coordinates, with
    feature vector (leaf values ++ pairwise minima) restricted to the
    node's leaf descendants, so the whole block is one matrix product.
    """
    features = choquet_features(h, table.values) * node_mask(h, r)[None, :]
    return samples.matrix @ features.T


def _beats(block: np.ndarray) -> np.ndarray:
    # [s, a, b] = sample s scores a strictly above b
    return block[:, :, None] > block[:, None, :]


def rank_acceptability(
    samples: SampleSet, table: NormalizedTable, h: Hierarchy, r: CriterionId
) -> RankMatrix:
    """Empirical frequency of every (alternative, position) pair."""
    sc = scores(samples, table, h, r)
    n, a_count = sc.shape
    counts = np.zeros((a_count, a_count), dtype=np.int64)
    ties = 0
    for start in range(0, n, _BLOCK):
        block = sc[start:start + _BLOCK]
        beats = _beats(block)
        ranks = 1 + beats.sum(axis=1)  # majorant count per alternative
        for a in range(a_count):
            counts[a] += np.bincount(ranks[:, a] - 1, minlength=a_count)
        equal = block[:, :, None] == block[:, None, :]
        ties += int(equal.sum() - equal.shape[0] * a_count) // 2
    return RankMatrix(r, table.alternatives, counts, n, ties)


def pairwise_winning(
    samples: SampleSet, table: NormalizedTable, h: Hierarchy, r: CriterionId
) -> WinMatrix:
    """Empirical frequency with which each alternative strictly beats
    each other; the tied remainder is kept separately so that
    pwi[a,b] + pwi[b,a] + tie_freq[a,b] = 1 off the diagonal."""
    sc = scores(samples, table, h, r)
    n, a_count = sc.shape
    wins = np.zeros((a_count, a_count), dtype=np.int64)
    tie_counts = np.zeros_like(wins)
    for start in range(0, n, _BLOCK):
        block = sc[start:start + _BLOCK]
        wins += _beats(block).sum(axis=0)
        tie_counts += (block[:, :, None] == block[:, None, :]).sum(axis=0)
    np.fill_diagonal(tie_counts, 0)
    return WinMatrix(r, table.alternatives, wins, tie_counts, n)


def summarize(rm: RankMatrix) -> RankSummary:
    """Condense a rank matrix into the reported per-alternative columns.

    best/worst are the extreme positions actually reached. high1..3 are
    the three most frequent positions (larger frequency first, then the
    better position); when fewer than three positions occur the last one
    repeats. The ordinal ranking sorts E(a) = -sum_s s*b^s(a) descending,
    ties resolved toward the alternative listed first.
    """
    a_count = len(rm.alternatives)
    rai = rm.rai
    best = np.empty(a_count, dtype=np.int64)
    worst = np.empty(a_count, dtype=np.int64)
    high = np.empty((a_count, 3), dtype=np.int64)
    high_rai = np.empty((a_count, 3))
    for a in range(a_count):
        reached = np.flatnonzero(rm.counts[a] > 0)
        best[a] = reached[0] + 1
        worst[a] = reached[-1] + 1
        order = sorted(reached, key=lambda s: (-rai[a, s], s))
        picks = (order + order[-1:] * 3)[:3]
        high[a] = [s + 1 for s in picks]
        high_rai[a] = [rai[a, s] for s in picks]
    positions = np.arange(1, a_count + 1, dtype=float)
    expected = -(rai @ positions)
    order = np.lexsort((np.arange(a_count), -expected))
    position = np.empty(a_count, dtype=np.int64)
    position[order] = np.arange(1, a_count + 1)
    return RankSummary(
        node=rm.node,
        alternatives=rm.alternatives,
        best=best,
        best_rai=rai[np.arange(a_count), best - 1],
        worst=worst,
        worst_rai=rai[np.arange(a_count), worst - 1],
        high=high,
        high_rai=high_rai,
        expected=expected,
        position=position,
    )


def write_rank_matrix(rm: RankMatrix, target) -> None:
    header = "alternative," + ",".join(str(s) for s in range(1, len(rm.alternatives) + 1))
    rows = [
        alt + "," + ",".join(f"{v:.4f}" for v in rm.rai[a])
        for a, alt in enumerate(rm.alternatives)
    ]
    _write_lines([header] + rows, target)


def write_win_matrix(wm: WinMatrix, target) -> None:
    header = "alternative," + ",".join(wm.alternatives)
    rows = [
        alt + "," + ",".join(f"{v:.4f}" for v in wm.pwi[a])
        for a, alt in enumerate(wm.alternatives)
    ]
    _write_lines([header] + rows, target)


def write_summary(rs: RankSummary, target) -> None:
    header = (
        "alternative,best,best_rai,worst,worst_rai,"
        "high1,high1_rai,high2,high2_rai,high3,high3_rai,expected,position"
    )
    rows = []
    for a, alt in enumerate(rs.alternatives):
        cells = [
            alt,
            str(rs.best[a]),
            f"{rs.best_rai[a]:.4f}",
            str(rs.worst[a]),
            f"{rs.worst_rai[a]:.4f}",
        ]
        for k in range(3):
            cells.append(str(rs.high[a, k]))
            cells.append(f"{rs.high_rai[a, k]:.4f}")
        cells.append(f"{rs.expected[a]:.4f}")
        cells.append(str(rs.position[a]))
        rows.append(",".join(cells))
    _write_lines([header] + rows, target)


def write_expected_ranking(summaries: dict[str, RankSummary], target) -> None:
    """Side-by-side ordinal rankings, one column per profile, countries in
    table order."""
    if not summaries:
        raise ValueError("no summaries to combine")
    names = list(summaries)
    alts = summaries[names[0]].alternatives
    for s in summaries.values():
        if s.alternatives != alts:
            raise ValueError("summaries disagree on the alternatives")
    header = "alternative," + ",".join(names)
    rows = [
        alt + "," + ",".join(str(summaries[p].position[a]) for p in names)
        for a, alt in enumerate(alts)
    ]
    _write_lines([header] + rows, target)


def _write_lines(lines: list[str], target) -> None:
    text = "\n".join(lines) + "\n"
    if isinstance(target, str):
        with open(target, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    else:
        target.write(text)
