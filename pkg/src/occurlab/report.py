"""File reports: delimited run tables plus rendered figures, written
side by side into a report directory."""

from __future__ import annotations

import csv
from collections import Counter
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .difftest import SuiteResult  # noqa: E402
from .parser import render  # noqa: E402
from .sld import DerivationTree, InvariantReport  # noqa: E402


def _bar(ax, counts: Counter, title: str) -> None:
    keys = sorted(counts)
    ax.bar(range(len(keys)), [counts[k] for k in keys], color="#4878a8")
    ax.set_xticks(range(len(keys)))
    ax.set_xticklabels(keys, rotation=20, ha="right")
    ax.set_title(title)
    ax.set_ylabel("runs")


def write_theorem_report(result: SuiteResult, outdir: str | Path) -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []

    table = outdir / "theorem-cases.csv"
    with open(table, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["case", "equations", "mode", "strategy", "outcome", "classification", "steps"])
        for case in result.cases:
            for s in case.schedules:
                writer.writerow(
                    [case.index, render(case.eqs), s.mode, s.strategy, s.outcome, s.classification, s.steps]
                )
    paths.append(table)

    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    _bar(axes[0], result.classification_counts, "classification")
    _bar(axes[1], result.outcome_counts, "run outcome")
    fig.suptitle(f"differential suite, seed {result.seed}, {len(result.cases)} cases")
    fig.tight_layout()
    outcomes_png = outdir / "theorem-outcomes.png"
    fig.savefig(outcomes_png, dpi=120)
    plt.close(fig)
    paths.append(outcomes_png)

    lengths = [s.steps for c in result.cases for s in c.schedules]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(lengths, bins=min(30, max(5, len(set(lengths)))), color="#4878a8")
    ax.set_xlabel("steps per run")
    ax.set_ylabel("runs")
    ax.set_title("run lengths")
    fig.tight_layout()
    lengths_png = outdir / "theorem-run-lengths.png"
    fig.savefig(lengths_png, dpi=120)
    plt.close(fig)
    paths.append(lengths_png)

    return paths


def write_derivation_report(
    tree: DerivationTree, report: InvariantReport, outdir: str | Path
) -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []

    table = outdir / "derivation-nodes.csv"
    depth_counts: Counter = Counter()
    status_counts: Counter = Counter()
    with open(table, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node", "depth", "status", "selected", "attempts", "unified", "query"])
        for i, node in enumerate(tree.nodes()):
            depth_counts[node.depth] += 1
            status_counts[node.status] += 1
            writer.writerow(
                [
                    i,
                    node.depth,
                    node.status,
                    "" if node.selected is None else node.selected,
                    len(node.attempts),
                    sum(1 for a in node.attempts if a.unified),
                    render(node.query) if node.query.atoms else "<empty>",
                ]
            )
    paths.append(table)

    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    depths = sorted(depth_counts)
    axes[0].bar(depths, [depth_counts[d] for d in depths], color="#4878a8")
    axes[0].set_xlabel("depth")
    axes[0].set_ylabel("nodes")
    axes[0].set_title("nodes per depth")
    _bar(axes[1], status_counts, "node status")
    fig.suptitle(
        f"{tree.rule_name} rule, engine {tree.engine}, depth bound {tree.depth_bound}; "
        f"linear={report.all_atoms_linear} ground={report.first_args_ground} "
        f"nsto={report.all_available_nsto} ocf={report.all_have_ocf_run}"
    )
    fig.tight_layout()
    shape_png = outdir / "derivation-shape.png"
    fig.savefig(shape_png, dpi=120)
    plt.close(fig)
    paths.append(shape_png)

    return paths
