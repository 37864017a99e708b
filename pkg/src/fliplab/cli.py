"""Command-line interface.

Subcommands cover each pipeline stage: ``synth`` (emit a synthetic CSV),
``attack`` (poison a CSV and save the flip plan), ``train``, ``evaluate``,
``sweep`` (full grid), ``explain``, and ``report`` (tables + charts from saved
results). Exit codes: 0 success, 1 any cell or runtime failure, 2 config
error. ``FLIPLAB_LOG`` selects log verbosity (DEBUG/INFO/WARNING/ERROR).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .data import (
    DataError,
    FEATURE_NAMES,
    InvalidSpec,
    RiskLabel,
    ScalerParams,
    SynthSpec,
    load_csv,
    synthesize,
    write_csv,
)
from .poison import FlipScenario, PoisonPlan, apply_plan, plan_flips
from .metrics import classification_metrics, confusion_matrix, log_loss
from .classifiers import (
    InvalidModelSpec,
    ModelFamily,
    ModelSpec,
    fit,
    load_model,
    save_model,
)
from .harness import (
    ConfigError,
    ExplainConfig,
    SweepConfig,
    load_results,
    render_charts,
    render_report,
    sweep,
)
from .harness.charts import force_plot_svg
from .xai import (
    extract_rules,
    lime_explain,
    permutation_importance,
    shap_values,
    surrogate_tree,
)

log = logging.getLogger("fliplab")

_CONFIG_ERRORS = (ConfigError, InvalidSpec, InvalidModelSpec, json.JSONDecodeError)


def _setup_logging():
    level = os.environ.get("FLIPLAB_LOG", "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
    )


def _parse_prevalences(text: str) -> tuple[float, float, float, float]:
    parts = [float(p) for p in text.split(",")]
    if len(parts) != 4:
        raise ConfigError(f"expected 4 comma-separated prevalences, got {text!r}")
    return tuple(parts)


def _cmd_synth(args) -> int:
    spec = SynthSpec(
        n_samples=args.n,
        class_prevalences=_parse_prevalences(args.prevalences),
        separation=args.separation,
        noise_scale=args.noise_scale,
    )
    dataset = synthesize(spec, seed=args.seed)
    write_csv(dataset, args.out)
    print(f"wrote {dataset.n_samples} rows to {args.out}")
    return 0


def _cmd_attack(args) -> int:
    dataset = load_csv(args.data)
    scenario = FlipScenario.parse(args.scenario)
    plan = plan_flips(dataset.labels, scenario, args.rate, seed=args.seed)
    poisoned = apply_plan(dataset, plan)
    write_csv(poisoned, args.out_data)
    plan.save(args.out_plan)
    print(
        f"flipped {plan.n_effective}/{plan.n_selected} selected rows "
        f"({scenario.value} @ {args.rate:g}); data -> {args.out_data}, plan -> {args.out_plan}"
    )
    return 0


def _cmd_train(args) -> int:
    dataset = load_csv(args.data)
    params = json.loads(args.params) if args.params else {}
    spec = ModelSpec(family=ModelFamily.parse(args.family), seed=args.seed, params=params)
    scaler = None if args.no_standardize else ScalerParams.fit(dataset.features)
    model = fit(spec, dataset, scaler=scaler)
    save_model(model, args.out)
    print(f"trained {spec.family.display_name} on {dataset.n_samples} rows -> {args.out}")
    return 0


def _cmd_evaluate(args) -> int:
    model = load_model(args.model)
    dataset = load_csv(args.data)
    proba = model.predict_proba(dataset.features)
    pred = np.argmax(proba, axis=1)
    report = classification_metrics(confusion_matrix(dataset.labels, pred))
    report = report.with_log_loss(log_loss(dataset.labels, proba))
    print(f"accuracy        {report.accuracy * 100:.2f}%")
    print(f"macro recall    {report.macro_recall * 100:.2f}%")
    print(f"macro precision {report.macro_precision * 100:.2f}%")
    print(f"macro F1        {report.macro_f1 * 100:.2f}%")
    loss = f"{report.log_loss:.3f}"
    if report.degenerate_constant_prediction:
        loss += " (degenerate: constant prediction)"
    print(f"log loss        {loss}")
    if args.out:
        report.save(args.out)
        print(f"metrics -> {args.out}")
    return 0


def _cmd_sweep(args) -> int:
    if args.config:
        config = SweepConfig.load(args.config)
    else:
        config = SweepConfig(synth=SynthSpec())
    if args.seed is not None:
        config = SweepConfig.from_dict({**config.to_dict(), "master_seed": args.seed})
    results = sweep(config, jobs=args.jobs)
    paths = results.save(args.out_dir)
    print(f"{len(results.cells)} cells -> {paths['results']}")
    if results.failures:
        for failure in results.failures:
            print(
                f"FAILED {failure.family.value} {failure.scenario.name} "
                f"{failure.rate:g}: {failure.error}",
                file=sys.stderr,
            )
        return 1
    return 0


def _cmd_explain(args) -> int:
    model = load_model(args.model)
    dataset = load_csv(args.data)
    methods = {m.strip() for m in args.methods.split(",") if m.strip()}
    unknown = methods - {"importance", "lime", "shap", "surrogate"}
    if unknown:
        raise ConfigError(f"unknown explanation methods: {sorted(unknown)}")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    names = list(FEATURE_NAMES)
    document: dict = {"model": str(args.model), "data": str(args.data)}

    pred = model.predict(dataset.features)
    if args.instance is not None:
        picks = [("instance", args.instance)]
    else:
        wrong = np.flatnonzero(pred != dataset.labels)
        right = np.flatnonzero(pred == dataset.labels)
        picks = []
        if wrong.size:
            picks.append(("first_misclassified", int(wrong[0])))
        if right.size:
            picks.append(("first_correct", int(right[0])))

    if "importance" in methods:
        rep = permutation_importance(
            model, dataset.features, dataset.labels,
            n_repeats=args.n_repeats, seed=args.seed,
        )
        document["importance"] = rep.to_dict(names)
    if "lime" in methods:
        scaler = model.scaler or ScalerParams.fit(dataset.features)
        document["lime"] = {
            tag: lime_explain(
                model, dataset.features[i], scaler,
                n_samples=args.lime_samples, seed=args.seed,
            ).to_dict(names)
            for tag, i in picks
        }
    if "shap" in methods:
        rng = np.random.default_rng(args.seed)
        size = min(args.background_size, dataset.n_samples)
        background = dataset.features[
            rng.choice(dataset.n_samples, size=size, replace=False)
        ]
        shap_docs = {}
        force_docs = []
        for tag, i in picks:
            exp = shap_values(
                model, dataset.features[i], background,
                n_permutations=args.shap_permutations, seed=args.seed,
            )
            shap_docs[tag] = exp.to_dict(names)
            force = {"instance": tag, **exp.force_plot_data(names)}
            force_docs.append(force)
            svg_path = out_dir / f"force_{tag}.svg"
            svg_path.write_text(
                force_plot_svg(force, f"Shapley contributions ({tag})"),
                encoding="utf-8",
            )
        document["shap"] = shap_docs
        document["force_plots"] = force_docs
    if "surrogate" in methods:
        surr = surrogate_tree(
            model, dataset.features, max_depth=args.surrogate_depth, feature_names=names
        )
        document["surrogate"] = {
            "max_depth": surr.max_depth,
            "fidelity": surr.fidelity,
            "n_leaves": surr.n_leaves,
            "rules": [
                r.text(names, [l.name for l in RiskLabel]) for r in extract_rules(surr)
            ],
        }

    out_path = out_dir / "explanations.json"
    out_path.write_text(json.dumps(document, indent=2) + "\n", encoding="utf-8")
    print(f"explanations -> {out_path}")
    return 0


def _cmd_report(args) -> int:
    results = load_results(args.results)
    written = render_report(results, args.out_dir)
    written += render_charts(results, args.out_dir)
    print(f"{len(written)} report files -> {args.out_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fliplab",
        description="Label-flipping poisoning lab for EEG band-power risk classifiers.",
    )
    parser.add_argument("--version", action="version", version=f"fliplab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="emit a synthetic band-power CSV")
    p.add_argument("--out", required=True)
    p.add_argument("--n", type=int, default=1550)
    p.add_argument("--prevalences", default="0.258064516,0.258064516,0.241935484,0.241935484")
    p.add_argument("--separation", type=float, default=3.0)
    p.add_argument("--noise-scale", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("attack", help="poison a CSV and save the flip plan")
    p.add_argument("--data", required=True)
    p.add_argument("--scenario", required=True, help="S1 (to HIGH) or S2 (rotate)")
    p.add_argument("--rate", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-data", required=True)
    p.add_argument("--out-plan", required=True)
    p.set_defaults(func=_cmd_attack)

    p = sub.add_parser("train", help="fit one classifier on a CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--family", required=True)
    p.add_argument("--params", help="hyperparameter overrides as inline JSON")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-standardize", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("evaluate", help="score a saved model on a CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("sweep", help="run the model x scenario x rate grid")
    p.add_argument("--config", help="sweep config JSON; defaults to the synthetic preset")
    p.add_argument("--out-dir", default="sweep_out")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--seed", type=int, help="override the master seed")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("explain", help="explain a saved model on a CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--methods", default="importance,lime,shap,surrogate")
    p.add_argument("--instance", type=int, help="explain this row instead of the default picks")
    p.add_argument("--n-repeats", type=int, default=10)
    p.add_argument("--lime-samples", type=int, default=1000)
    p.add_argument("--shap-permutations", type=int, default=50)
    p.add_argument("--background-size", type=int, default=100)
    p.add_argument("--surrogate-depth", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default="explain_out")
    p.set_defaults(func=_cmd_explain)

    p = sub.add_parser("report", help="render tables and charts from saved results")
    p.add_argument("--results", required=True, help="directory holding results.jsonl")
    p.add_argument("--out-dir", default="report_out")
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CONFIG_ERRORS as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (DataError, OSError, ValueError) as exc:
        log.debug("command failed", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
