"""Evaluation report outputs: JSON, delimited scores, and summary figures."""
from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .evaluation import ASPECTS, EvalReport, report_to_dict, round_display
from .jsonx import canonical_json


def write_report_json(report: EvalReport, path: Path) -> None:
    path.write_text(canonical_json(report_to_dict(report)), "utf-8")


def write_scores_csv(report: EvalReport, path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "category", *ASPECTS])
        for prompt, scores in report.rows:
            row = scores.as_dict()
            writer.writerow([prompt.id, prompt.category, *(row[a] for a in ASPECTS)])


def _aspect_figure(report: EvalReport, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(7, 4))
    values = [report.aspect_means[a] for a in ASPECTS]
    ax.bar(range(len(ASPECTS)), values, color="#4878a8")
    ax.axhline(report.overall_mean, color="#b04848", linestyle="--",
               label=f"overall {round_display(report.overall_mean)}")
    ax.set_xticks(range(len(ASPECTS)))
    ax.set_xticklabels([a.replace("_", "\n") for a in ASPECTS], fontsize=8)
    ax.set_ylim(0, 10)
    ax.set_ylabel("mean score")
    ax.set_title("Judge scores by aspect")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _category_figure(report: EvalReport, path: Path) -> None:
    categories = list(report.category_means)
    fig, ax = plt.subplots(figsize=(8, 4))
    width = 0.8 / max(1, len(ASPECTS))
    for i, aspect in enumerate(ASPECTS):
        xs = [c + i * width for c in range(len(categories))]
        ys = [report.category_means[cat][aspect] for cat in categories]
        ax.bar(xs, ys, width=width, label=aspect.replace("_", " "))
    ax.set_xticks([c + 0.4 - width / 2 for c in range(len(categories))])
    ax.set_xticklabels(categories, fontsize=8, rotation=20)
    ax.set_ylim(0, 10)
    ax.set_ylabel("mean score")
    ax.set_title("Judge scores by category")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_eval_outputs(report: EvalReport, out_dir: Path | str) -> dict[str, str]:
    """Write report.json, scores.csv, and figures/; returns the paths written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"report": str(out / "report.json"), "scores": str(out / "scores.csv")}
    write_report_json(report, out / "report.json")
    write_scores_csv(report, out / "scores.csv")
    if report.rows:
        figures = out / "figures"
        figures.mkdir(exist_ok=True)
        _aspect_figure(report, figures / "aspect_means.png")
        _category_figure(report, figures / "category_means.png")
        paths["figures"] = str(figures)
    return paths
