"""Command-line front end.

Exit codes: 0 success (and, for checks, the property holds), 1 the property
is violated, 2 usage or input error.
"""
from __future__ import annotations

import csv
import functools
import io
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import click
import numpy as np

from . import aif, audit, metrics, search, synth, transforms
from .core import (
    AT_OR_ABOVE,
    BELOW,
    ScoredPopulation,
    Threshold,
    apply_predictor,
    population_from_csv,
    population_to_csv,
    scores_from_csv,
    scores_to_csv,
)
from .errors import IFGerryError

EXIT_OK, EXIT_VIOLATED, EXIT_USAGE = 0, 1, 2

_file = click.Path(exists=True, dir_okay=False, path_type=Path)


def _read(path: Path) -> str:
    return path.read_text(encoding="utf-8")


def _read_json(path: Path):
    return json.loads(_read(path))


def _load_scored(pop_path: Path, scores_path: Path) -> ScoredPopulation:
    return apply_predictor(population_from_csv(_read(pop_path)), scores_from_csv(_read(scores_path)))


def _emit(ctx, text: str, path: Path | None = None):
    path = path or ctx.obj["out"]
    if path is None:
        click.echo(text, nl=not text.endswith("\n"))
    else:
        Path(path).write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")


def _emit_json(ctx, obj: dict):
    if ctx.obj["timestamp"]:
        obj = {**obj, "generated_at": datetime.now(timezone.utc).isoformat()}
    indent = 2 if ctx.obj["pretty"] else None
    _emit(ctx, json.dumps(obj, indent=indent))


def _guard(fn):
    """Turn library and parse errors into exit code 2 with a one-line diagnostic."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (IFGerryError, json.JSONDecodeError, KeyError, ValueError, OSError) as exc:
            click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
            sys.exit(EXIT_USAGE)

    return wrapper


@click.group()
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="Write the primary output here instead of stdout.")
@click.option("--seed", type=int, default=None, help="Seed for randomized steps.")
@click.option("--pretty", is_flag=True, help="Indent JSON output.")
@click.option("--timestamp", is_flag=True, help="Add a generated_at field to JSON reports.")
@click.pass_context
def main(ctx, out, seed, pretty, timestamp):
    """Audit and attack individually fair score predictors."""
    ctx.obj = {"out": out, "seed": seed, "pretty": pretty, "timestamp": timestamp}


@main.command("audit")
@click.argument("population", type=_file)
@click.argument("scores", type=_file)
@click.argument("metric_config", type=_file)
@click.option("--slack", type=float, default=None)
@click.pass_context
@_guard
def cmd_audit(ctx, population, scores, metric_config, slack):
    """Lipschitz audit of SCORES under the d/D metrics in METRIC_CONFIG."""
    sp = _load_scored(population, scores)
    cfg = audit.AuditConfig.from_json(_read_json(metric_config), slack=slack)
    report = audit.audit_if(sp, cfg)
    _emit_json(ctx, report.to_json())
    sys.exit(EXIT_OK if report.passed else EXIT_VIOLATED)


def _threshold(t, direction):
    return None if t is None else Threshold(t, direction)


@main.command("attack")
@click.argument("population", type=_file)
@click.argument("scores", type=_file)
@click.argument("transform", type=_file)
@click.option("--threshold", "t", type=float, default=None)
@click.option("--direction", type=click.Choice([AT_OR_ABOVE, BELOW]), default=AT_OR_ABOVE)
@click.option("--stats-out", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="Where to write before/after group statistics (needs --threshold).")
@click.pass_context
@_guard
def cmd_attack(ctx, population, scores, transform, t, direction, stats_out):
    """Apply TRANSFORM to SCORES and write the transformed scores CSV."""
    sp = _load_scored(population, scores)
    phi = transforms.transform_from_json(_read_json(transform))
    after = transforms.apply_to_scored(phi, sp)
    _emit(ctx, scores_to_csv(after))
    th = _threshold(t, direction)
    if stats_out is not None:
        if th is None:
            raise click.UsageError("--stats-out needs --threshold")
        stats = {
            "transform": phi.to_json(),
            "before": audit.selection_rates(sp, th).to_json(),
            "after": audit.selection_rates(after, th).to_json(),
        }
        indent = 2 if ctx.obj["pretty"] else None
        stats_out.write_text(json.dumps(stats, indent=indent) + "\n", encoding="utf-8")


@main.command("search")
@click.argument("population", type=_file)
@click.argument("scores", type=_file)
@click.argument("utility", type=_file)
@click.option("--metric-config", type=_file, required=True,
              help="d/D metrics used to audit the winning transform.")
@click.option("--families", default=",".join(search.FAMILIES), show_default=True)
@click.option("--resolution", type=click.IntRange(min=1), default=32, show_default=True)
@click.option("--check-pairs", type=click.IntRange(min=1), default=64, show_default=True)
@click.pass_context
@_guard
def cmd_search(ctx, population, scores, utility, metric_config, families, resolution, check_pairs):
    """Search for the utility-maximizing non-expansive transform."""
    fams = [f.strip() for f in families.split(",") if f.strip()]
    unknown = [f for f in fams if f not in search.FAMILIES]
    if unknown or not fams:
        raise click.BadParameter(f"unknown families {unknown}; known: {list(search.FAMILIES)}",
                                 param_hint="--families")
    sp = _load_scored(population, scores)
    u = search.UtilitySpec.from_json(_read_json(utility))
    cfg = audit.AuditConfig.from_json(_read_json(metric_config))
    res = search.search_attack(sp, u, fams, resolution, cfg, n_check_pairs=check_pairs,
                               seed=ctx.obj["seed"] or 0)
    _emit_json(ctx, res.to_json())


@main.command("aif")
@click.argument("f_y", type=_file)
@click.argument("f_yhat", type=_file)
@click.option("--method", type=click.Choice(["direct", "mss", "both"]), default="both", show_default=True)
@click.pass_context
@_guard
def cmd_aif(ctx, f_y, f_yhat, method):
    """Absolute individual fairness of F_YHAT with respect to ground truth F_Y."""
    fY = aif.DistributionTable.from_json(_read_json(f_y))
    fYhat = aif.DistributionTable.from_json(_read_json(f_yhat))
    out: dict = {"method": method}
    verdict = None
    if method in ("direct", "both"):
        d = aif.check_aif_direct(fY, fYhat)
        out["direct"] = d.fair
        out["witness"] = list(d.witness) if d.witness else None
        verdict = d.fair
    if method in ("mss", "both"):
        m = aif.check_aif_via_mss(fY, fYhat)
        out["mss"] = m
        out["partition_y"] = aif.partition_by_distribution(fY).to_json()
        out["partition_yhat"] = aif.partition_by_distribution(fYhat).to_json()
        if verdict is not None and verdict != m:
            raise IFGerryError("direct and partition checks disagree")
        verdict = m
    if method == "both":
        out["agree"] = True
    out["aif"] = verdict
    _emit_json(ctx, out)
    sys.exit(EXIT_OK if verdict else EXIT_VIOLATED)


@main.command("generate")
@click.argument("preset", required=False)
@click.option("--config", "config_path", type=_file, default=None, help="Scenario config JSON.")
@click.option("--pop-out", type=click.Path(dir_okay=False, path_type=Path), required=True)
@click.option("--scores-out", type=click.Path(dir_okay=False, path_type=Path), required=True)
@click.pass_context
@_guard
def cmd_generate(ctx, preset, config_path, pop_out, scores_out):
    """Generate a population from PRESET (or --config); prints the resolved config."""
    if (preset is None) == (config_path is None):
        raise click.UsageError("give exactly one of PRESET or --config")
    if preset is not None:
        cfg = synth.scenario_interval_concentration(preset, ctx.obj["seed"])
    else:
        cfg = synth.ScenarioConfig.from_json(_read_json(config_path))
        if ctx.obj["seed"] is not None:
            cfg = synth.ScenarioConfig.from_json({**cfg.to_json(), "seed": ctx.obj["seed"]})
    sp, used_seed = synth.generate_with_seed(cfg)
    pop_out.write_text(population_to_csv(sp.population), encoding="utf-8")
    scores_out.write_text(scores_to_csv(sp), encoding="utf-8")
    _emit_json(ctx, {**cfg.to_json(), "seed_used": used_seed, "n": len(sp)})


def histogram_rows(before: ScoredPopulation, after: ScoredPopulation, bins: int) -> list[tuple]:
    """Per-bin, per-group counts of two score vectors on common equal-width bins."""
    sb, sa = before.score_array, after.score_array
    both = np.concatenate([sb, sa])
    lo, hi = float(both.min()), float(both.max())
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    edges = np.linspace(lo, hi, bins + 1)
    groups = before.population.group_array
    rows = []
    counts = {}
    for g in before.population.groups:
        mask = groups == g
        counts[g] = (np.histogram(sb[mask], edges)[0], np.histogram(sa[mask], edges)[0])
    for k in range(bins):
        for g in before.population.groups:
            cb, ca = counts[g]
            rows.append((float(edges[k]), float(edges[k + 1]), g, int(cb[k]), int(ca[k])))
    return rows


@main.command("plotdata")
@click.argument("population", type=_file)
@click.argument("scores_before", type=_file)
@click.argument("scores_after", type=_file)
@click.option("--bins", type=click.IntRange(min=1), default=10, show_default=True)
@click.pass_context
@_guard
def cmd_plotdata(ctx, population, scores_before, scores_after, bins):
    """Histogram CSV of scores before and after a transform, split by group."""
    pop = population_from_csv(_read(population))
    before = apply_predictor(pop, scores_from_csv(_read(scores_before)))
    after = apply_predictor(pop, scores_from_csv(_read(scores_after)))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["bin_lo", "bin_hi", "group", "count_before", "count_after"])
    for lo, hi, g, cb, ca in histogram_rows(before, after, bins):
        w.writerow([repr(lo), repr(hi), g, cb, ca])
    _emit(ctx, buf.getvalue())


@main.command("validate-metric")
@click.argument("metric", type=_file)
@click.option("--population", type=_file, default=None, help="Sample individuals from this CSV.")
@click.option("--scores", type=_file, default=None, help="Sample score values from this CSV.")
@click.option("--random", "n_random", type=click.IntRange(min=1), default=20, show_default=True,
              help="Random sample size when no file is given.")
@click.option("--dim", type=click.IntRange(min=1), default=3, show_default=True)
@click.pass_context
@_guard
def cmd_validate_metric(ctx, metric, population, scores, n_random, dim):
    """Check the pseudo-metric axioms for METRIC on a sample."""
    spec = metrics.PseudoMetricSpec.from_json(_read_json(metric))
    if population is not None:
        sample = list(population_from_csv(_read(population)).individuals)
    elif scores is not None:
        sample = list(scores_from_csv(_read(scores)).values())
    else:
        rng = np.random.default_rng(ctx.obj["seed"] or 0)
        if spec.domain == metrics.UID_SPACE:
            sample = [f"u{i}" for i in rng.integers(0, n_random, size=n_random)]
        elif spec.domain == metrics.SCORE_SPACE:
            sample = rng.normal(0, 5, size=n_random).tolist()
        else:
            d = len(spec.weights) if spec.weights else dim
            sample = [tuple(r) for r in rng.uniform(-5, 5, size=(n_random, d))]
    report = metrics.validate_pseudometric(spec, sample)
    _emit_json(ctx, {"metric": spec.to_json(), "n_points": len(sample), **report.to_json()})
    sys.exit(EXIT_OK if report.passed else EXIT_VIOLATED)


@main.command("check-transform")
@click.argument("transform", type=_file)
@click.option("--lo", type=float, default=-100.0, show_default=True)
@click.option("--hi", type=float, default=100.0, show_default=True)
@click.option("--pairs", type=click.IntRange(min=1), default=10_000, show_default=True)
@click.pass_context
@_guard
def cmd_check_transform(ctx, transform, lo, hi, pairs):
    """Randomized and boundary non-expansiveness check for TRANSFORM."""
    phi = transforms.transform_from_json(_read_json(transform))
    rep = transforms.check_nonexpansive(phi, lo, hi, pairs, ctx.obj["seed"] or 0)
    _emit_json(ctx, {"transform": phi.to_json(), **rep.to_json()})
    sys.exit(EXIT_OK if rep.passed else EXIT_VIOLATED)


@main.command("leibniz")
@click.argument("predictor", type=_file)
@click.argument("table", type=_file)
@click.pass_context
@_guard
def cmd_leibniz(ctx, predictor, table):
    """Exact match of PREDICTOR's distributions against a Leibniz TABLE."""
    pred = aif.DistributionTable.from_json(_read_json(predictor))
    tab = audit.LeibnizTable.from_json(_read_json(table))
    res = audit.leibniz_audit(pred, tab)
    _emit_json(ctx, res.to_json())
    sys.exit(EXIT_OK if res.passed else EXIT_VIOLATED)


if __name__ == "__main__":
    main()
