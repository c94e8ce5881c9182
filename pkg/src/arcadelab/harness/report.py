"""Turn run records into score tables, normalized tables, aggregates and plots."""

from __future__ import annotations

import json
import warnings
from pathlib import Path

import numpy as np

from ..metrics import (
    DegenerateRangeError, ScoreDistribution, ScoreTable, aggregate_average, aggregate_median, baseline_range,
    inter_algorithm_scores, normalize, paired_matrix, random_range, render_paired_matrix, times_best,
    write_value_table,
)
from . import svg
from .config import BASELINES
from .runner import RunRecord

NORMALIZATIONS = ("random", "baseline", "inter")


class SplitMixError(ValueError):
    pass


def _table(records: list[RunRecord]) -> ScoreTable:
    table = ScoreTable([], [])
    seen = {}
    for r in records:
        key = (r.config["game"], r.label)
        if key in seen and seen[key] != r.config_hash:
            raise ValueError(f"two different runs for {key}: {seen[key][:12]} and {r.config_hash[:12]}")
        seen[key] = r.config_hash
        table.add(r.config["game"], r.label, r.summaries)
    table.games.sort()
    table.algorithms.sort()
    return table


def _normalized(table: ScoreTable, baselines: ScoreTable | None) -> tuple[dict, dict]:
    """Per kind, {(game, alg): z}; plus the games skipped for each kind and why."""
    out = {k: {} for k in NORMALIZATIONS}
    skipped = {k: {} for k in NORMALIZATIONS}
    for g in table.games:
        algs = [a for a in table.algorithms if (g, a) in table.samples]
        means = [table.mean(g, a) for a in algs]
        if baselines is not None and (g, "random") in baselines.samples:
            try:
                rng = random_range(baselines.mean(g, "random"), g)
                out["random"].update({(g, a): float(normalize(m, rng, g)) for a, m in zip(algs, means)})
            except DegenerateRangeError as e:
                skipped["random"][g] = str(e)
        else:
            skipped["random"][g] = "no random baseline"
        refs = [baselines.mean(g, b) for b in baselines.algorithms if (g, b) in baselines.samples] if baselines else []
        try:
            rng = baseline_range(refs, g)
            out["baseline"].update({(g, a): float(normalize(m, rng, g)) for a, m in zip(algs, means)})
        except DegenerateRangeError as e:
            skipped["baseline"][g] = str(e)
        if len(algs) >= 2:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                z = inter_algorithm_scores(means, g)
            out["inter"].update({(g, a): float(v) for a, v in zip(algs, z)})
        else:
            skipped["inter"][g] = "fewer than 2 algorithms"
    return out, skipped


def make_report(records: list[RunRecord], out_dir, allow_mixed_split: bool = False, confidence: float = 0.99) -> dict:
    """Write the report bundle under ``out_dir/report``; returns the summary dict."""
    if not records:
        raise ValueError("no run records to report on")
    splits = sorted({r.config["split"] for r in records})
    if len(splits) > 1 and not allow_mixed_split:
        raise SplitMixError(f"records mix splits {splits}; pass --allow-mixed-split to aggregate them together")
    records = sorted(records, key=lambda r: (r.config["game"], r.label, r.config_hash))
    algo_records = [r for r in records if r.config["agent"] not in BASELINES]
    base_records = [r for r in records if r.config["agent"] in BASELINES]
    if not algo_records:
        raise ValueError("no algorithm runs to report on (only baselines)")

    out = Path(out_dir) / "report"
    out.mkdir(parents=True, exist_ok=True)
    table = _table(algo_records)
    table.save(out / "scores.tsv")
    baselines = _table(base_records) if base_records else None
    if baselines is not None:
        baselines.save(out / "baselines.tsv")

    norm, skipped = _normalized(table, baselines)
    summary: dict = {
        "splits": splits,
        "records": [r.config_hash for r in records],
        "games": table.games,
        "algorithms": table.algorithms,
        "skipped": {k: v for k, v in skipped.items() if v},
        "aggregates": {},
        "distributions": {},
    }
    dist_lines = ["kind\talgorithm\tx\tfraction"]
    for kind in NORMALIZATIONS:
        values = norm[kind]
        write_value_table(out / f"normalized-{kind}.tsv", table.games, table.algorithms, values)
        agg, curves = {}, {}
        for a in table.algorithms:
            z = [values[(g, a)] for g in table.games if (g, a) in values]
            if not z:
                continue
            agg[a] = {"average": aggregate_average(z), "median": aggregate_median(z), "games": len(z)}
            bps = ScoreDistribution(z).breakpoints()
            curves[a] = bps
            dist_lines += [f"{kind}\t{a}\t{x!r}\t{f!r}" for x, f in bps]
        summary["aggregates"][kind] = agg
        summary["distributions"][kind] = {a: [[x, f] for x, f in bps] for a, bps in curves.items()}
        if curves:
            xs = [x for bps in curves.values() for x, _ in bps]
            lo, hi = (0.0, 1.0) if kind == "inter" else (min(0.0, min(xs)), max(1.0, max(xs)))
            (out / f"distribution-{kind}.svg").write_text(svg.step_curves(curves, f"score distribution ({kind})", (lo, hi)))
    (out / "distributions.tsv").write_text("\n".join(dist_lines) + "\n")

    means = table.means()
    best = times_best(means)
    summary["times_best"] = best
    lines = ["\t".join(["game"] + table.algorithms)]
    for i, g in enumerate(table.games):
        lines.append("\t".join([g] + [repr(means[a][i]) for a in table.algorithms]))
    lines.append("\t".join(["Times Best"] + [str(best[a]) for a in table.algorithms]))
    (out / "means.tsv").write_text("\n".join(lines) + "\n")

    if len(table.algorithms) >= 2 and all(len(v) >= 2 for v in table.samples.values()):
        try:
            table.check_complete()
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                matrix = paired_matrix(table, confidence)
            (out / "paired.txt").write_text(render_paired_matrix(matrix, table.algorithms))
            summary["paired"] = {f"{a} vs {b}": list(v) for (a, b), v in sorted(matrix.items())}
        except KeyError as e:
            summary["paired"] = {"error": str(e)}

    bar_values = {f"{k} {s}": {a: v[s] for a, v in summary["aggregates"][k].items()}
                  for k in NORMALIZATIONS for s in ("average", "median") if summary["aggregates"][k]}
    if bar_values:
        (out / "aggregates.svg").write_text(svg.bars(bar_values, "aggregate normalized scores", "score"))
    (out / "summary.json").write_text(json.dumps(summary, sort_keys=True, indent=1, default=_jsonable) + "\n")
    return summary


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    raise TypeError(f"not serializable: {type(v)}")
