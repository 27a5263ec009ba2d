"""Command line pipeline.

``run`` drives the whole flow for one or more preference profiles: load
the hierarchy and the evaluation table, normalize, compile each profile
against the base constraints, maximize the margin, sample compatible
capacities, and write rank statistics per node. A profile whose
statements admit no capacity does not abort the run: its irreducible
conflict is written to ``infeasible_<profile>.txt`` and the remaining
profiles proceed.

``verify`` recomputes the bundled normalized table from the bundled raw
table and diffs it against the golden file, cell by cell, reporting each
column as pass or fail.

All defaults point at the packaged European Innovation Scoreboard study,
so ``choquet-smaa run --out results`` reproduces it end to end. Identical
configurations produce byte-identical files; nothing in the output
depends on wall time or scheduling.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .capacity import base_constraints, subset_labels
from .dataset import column_stats, load_table, normalize
from .hierarchy import CriterionId, Hierarchy, load_hierarchy
from .lp import diagnose, solve_epsilon_max
from .preferences import compile as compile_profile
from .preferences import parse_profile
from .sampler import SamplerOptions, sample, samples_to_csv
from .smaa import (
    pairwise_winning,
    rank_acceptability,
    summarize,
    write_expected_ranking,
    write_rank_matrix,
    write_summary,
    write_win_matrix,
)


def _data_path(name: str) -> str:
    return str(resources.files("choquet_smaa").joinpath("data", name))


DEFAULT_PREFS = ("dmu.prefs", "dmi.prefs", "dmg.prefs")


@dataclass(frozen=True)
class RunConfig:
    hierarchy: str
    data: str
    prefs: tuple[str, ...]
    samples: int = 10_000
    seed: int = 42
    burn_in: int = 1000
    thinning: int = 10
    out: str = "out"
    nodes: tuple[str, ...] = ()  # labels; empty = root + its children
    emit_samples: bool = False
    emit_lp: bool = False
    golden: str = field(default="", compare=False)  # verify only

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("--samples must be at least 1")


def _config(args: argparse.Namespace) -> RunConfig:
    prefs = tuple(
        p.strip() for p in (args.prefs or "").split(",") if p.strip()
    ) or tuple(_data_path(n) for n in DEFAULT_PREFS)
    return RunConfig(
        hierarchy=args.hierarchy or _data_path("eis_hierarchy.yaml"),
        data=args.data or _data_path("eis_raw.csv"),
        prefs=prefs,
        samples=args.samples,
        seed=args.seed,
        burn_in=args.burnin,
        thinning=args.thin,
        out=args.out,
        nodes=tuple(n.strip() for n in (args.nodes or "").split(",") if n.strip()),
        emit_samples=args.emit_samples,
        emit_lp=args.emit_lp,
        golden=getattr(args, "golden", "") or _data_path("eis_normalized_expected.csv"),
    )


def _resolve_nodes(cfg: RunConfig, h: Hierarchy) -> list[CriterionId]:
    if not cfg.nodes:
        return [()] + [child.id for child in h.root.children]
    out = []
    for label in cfg.nodes:
        if label == "root":
            out.append(())
        else:
            out.append(h.by_label(label).id)
    return out


def _node_name(h: Hierarchy, r: CriterionId) -> str:
    return h.root.label if r == () else h.label_of(r)


def run(cfg: RunConfig) -> int:
    h = load_hierarchy(cfg.hierarchy)
    raw = load_table(cfg.data, h)
    table = normalize(raw, column_stats(raw), h)
    nodes = _resolve_nodes(cfg, h)
    labels = subset_labels(h)
    base = base_constraints(h)
    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    manifest: dict = {
        "package": __version__,
        "python": ".".join(str(v) for v in sys.version_info[:3]),
        "numpy": np.__version__,
        "seed": cfg.seed,
        "samples": cfg.samples,
        "burn_in": cfg.burn_in,
        "thinning": cfg.thinning,
        "nodes": [_node_name(h, r) for r in nodes],
        "profiles": {},
    }
    root_summaries: dict[str, object] = {}

    for path in cfg.prefs:
        profile = parse_profile(path, h)
        constraints = base.copy()
        constraints.extend(compile_profile(profile, h, table))
        emit = str(out_dir / f"lp_{profile.name}.txt") if cfg.emit_lp else None
        sol = solve_epsilon_max(constraints, emit=emit, labels=labels)
        entry: dict = {"statements": len(profile.statements)}
        if not sol.compatible:
            conflict = diagnose(constraints)
            by_id = {s.id: s for s in profile.statements}
            report = [
                f"profile {profile.name}: no capacity satisfies the statements "
                f"(status {sol.status}"
                + (f", margin {sol.epsilon:.3g}" if sol.status == "optimal" else "")
                + ")",
                "irreducible conflicting subset:",
            ]
            report += [f"  {sid}: {by_id[sid].text}" for sid in conflict]
            (out_dir / f"infeasible_{profile.name}.txt").write_text(
                "\n".join(report) + "\n", encoding="utf-8"
            )
            print(f"{profile.name}: incompatible; conflict {', '.join(conflict)}")
            entry.update(status="incompatible", conflict=list(conflict))
            manifest["profiles"][profile.name] = entry
            continue

        opts = SamplerOptions(burn_in=cfg.burn_in, thinning=cfg.thinning)
        drawn = sample(constraints, cfg.samples, cfg.seed, opts)
        pdir = out_dir / profile.name
        pdir.mkdir(exist_ok=True)
        if cfg.emit_samples:
            samples_to_csv(drawn, str(pdir / f"samples_{profile.name}.csv"), labels)

        ties = {}
        for r in nodes:
            name = _node_name(h, r)
            rm = rank_acceptability(drawn, table, h, r)
            wm = pairwise_winning(drawn, table, h, r)
            rs = summarize(rm)
            write_rank_matrix(rm, str(pdir / f"rai_{name}.csv"))
            write_win_matrix(wm, str(pdir / f"pwi_{name}.csv"))
            write_summary(rs, str(pdir / f"summary_{name}.csv"))
            ties[name] = rm.ties
            if r == ():
                root_summaries[profile.name] = rs
        entry.update(
            status="sampled",
            epsilon_star=sol.epsilon,
            margin=drawn.epsilon,
            center_radius=drawn.center_radius,
            ties=ties,
        )
        manifest["profiles"][profile.name] = entry
        print(f"{profile.name}: eps* {sol.epsilon:.6g}, {len(drawn)} samples")

    if root_summaries and () in nodes:
        write_expected_ranking(root_summaries, str(out_dir / "expected_ranking.csv"))
    (out_dir / "run_manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return 0


def verify(cfg: RunConfig) -> int:
    start = time.perf_counter()
    h = load_hierarchy(cfg.hierarchy)
    raw = load_table(cfg.data, h)
    golden = load_table(cfg.golden, h)
    if raw.alternatives != golden.alternatives:
        raise ValueError("raw and golden tables list different alternatives")
    table = normalize(raw, column_stats(raw), h)
    diff = np.abs(table.values - golden.values)
    tolerance = 0.01
    failed = []
    for k, leaf in enumerate(h.leaves):
        label = h.label_of(leaf)
        worst = diff[:, k].max()
        ok = worst <= tolerance
        print(f"{label}: max deviation {worst:.4f} {'pass' if ok else 'FAIL'}")
        if not ok:
            for a in np.flatnonzero(diff[:, k] > tolerance):
                failed.append((label, golden.alternatives[a], diff[a, k]))
    elapsed = time.perf_counter() - start
    if failed:
        failed.sort(key=lambda f: -f[2])
        print(f"{len(failed)} cells beyond {tolerance}:")
        for label, alt, d in failed[:10]:
            print(f"  {alt} {label}: off by {d:.4f}")
        print(f"verified in {elapsed:.3f}s: FAIL")
        return 1
    print(f"verified in {elapsed:.3f}s: all {diff.size} cells within {tolerance}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="choquet-smaa",
        description="Robust composite indicators over a criteria hierarchy",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--hierarchy", help="criteria tree YAML (default: bundled study)")
        p.add_argument("--data", help="raw evaluation CSV (default: bundled study)")

    p_run = sub.add_parser("run", help="full pipeline: compile, solve, sample, report")
    common(p_run)
    p_run.add_argument("--prefs", help="comma-separated preference files (default: bundled profiles)")
    p_run.add_argument("--samples", type=int, default=10_000, help="capacities per profile")
    p_run.add_argument("--seed", type=int, default=42)
    p_run.add_argument("--burnin", type=int, default=1000, help="discarded leading steps")
    p_run.add_argument("--thin", type=int, default=10, help="keep every k-th state")
    p_run.add_argument("--out", default="out", help="output directory")
    p_run.add_argument("--nodes", help="comma-separated node labels ('root' allowed); default root + its children")
    p_run.add_argument("--emit-samples", action="store_true", help="dump raw sample matrices")
    p_run.add_argument("--emit-lp", action="store_true", help="dump the margin program per profile")

    p_ver = sub.add_parser("verify", help="recompute the bundled normalized table and diff it")
    common(p_ver)
    p_ver.add_argument("--golden", help="expected normalized CSV (default: bundled)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return run(_config(args))
        return verify(
            RunConfig(
                hierarchy=args.hierarchy or _data_path("eis_hierarchy.yaml"),
                data=args.data or _data_path("eis_raw.csv"),
                prefs=(),
                golden=args.golden or _data_path("eis_normalized_expected.csv"),
            )
        )
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
