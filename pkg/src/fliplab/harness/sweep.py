"""Sweep orchestration: the model x scenario x rate grid.

One sweep shares a single train/test split, so the poisoning rate is the only
varying factor within a family; the clean test split is never touched. Every
cell derives its own seed from a stable hash of (master seed, family,
scenario, rate), which keeps cells decoupled, pairwise distinct, and
reproducible in isolation. Rate-0 cells are scenario-independent: they are
computed once per family and duplicated under each scenario key so the two
report tables share their baseline row, and a sweep is a pure function of its
config regardless of worker count.
"""

from __future__ import annotations

import concurrent.futures
import hashlib
import json
import logging
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .. import __version__ as _toolkit_version
from ..data import (
    Dataset,
    FEATURE_NAMES,
    ScalerParams,
    SynthSpec,
    load_csv,
    split,
    synthesize,
)
from ..poison import FlipScenario, apply_plan, plan_flips
from ..metrics import classification_metrics, confusion_matrix, log_loss, MetricsReport
from ..classifiers import ModelFamily, ModelSpec, TrainedModel, fit
from ..xai import (
    extract_rules,
    lime_explain,
    permutation_importance,
    shap_values,
    surrogate_tree,
)

__all__ = [
    "ConfigError",
    "ExplainConfig",
    "SweepConfig",
    "CellResult",
    "CellFailure",
    "ResultSet",
    "derive_seed",
    "run_cell",
    "sweep",
    "load_results",
    "DEFAULT_RATES",
]

log = logging.getLogger("fliplab.harness")

DEFAULT_RATES = (0.0, 0.05, 0.25, 0.50, 0.75)


class ConfigError(ValueError):
    pass


def derive_seed(*parts) -> int:
    """Stable 63-bit seed from a tuple of printable parts."""
    text = "|".join(repr(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") & (2**63 - 1)


@dataclass(frozen=True)
class ExplainConfig:
    """Which explanations each cell computes, and their sampling budgets."""

    importance: bool = False
    lime: bool = False
    shap: bool = False
    surrogate: bool = False
    n_repeats: int = 10
    lime_samples: int = 1000
    shap_permutations: int = 50
    background_size: int = 100
    surrogate_depth: int = 4

    @property
    def any_enabled(self) -> bool:
        return self.importance or self.lime or self.shap or self.surrogate

    def to_dict(self) -> dict:
        return {
            "importance": self.importance,
            "lime": self.lime,
            "shap": self.shap,
            "surrogate": self.surrogate,
            "n_repeats": self.n_repeats,
            "lime_samples": self.lime_samples,
            "shap_permutations": self.shap_permutations,
            "background_size": self.background_size,
            "surrogate_depth": self.surrogate_depth,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExplainConfig":
        return cls(**d)


@dataclass(frozen=True)
class SweepConfig:
    """Full description of one sweep; serializes to the --config JSON."""

    csv_path: str | None = None
    synth: SynthSpec | None = None
    train_fraction: float = 0.8
    stratified: bool = True
    master_seed: int = 0
    roster: tuple[ModelFamily, ...] = tuple(ModelFamily)
    family_params: dict = field(default_factory=dict)
    scenarios: tuple[FlipScenario, ...] = (FlipScenario.S1_TO_HIGH, FlipScenario.S2_ROTATE)
    rates: tuple[float, ...] = DEFAULT_RATES
    explain: ExplainConfig = field(default_factory=ExplainConfig)

    def __post_init__(self):
        if (self.csv_path is None) == (self.synth is None):
            raise ConfigError("exactly one of csv_path or synth must be set")
        if not self.roster:
            raise ConfigError("model roster is empty")
        if not self.scenarios:
            raise ConfigError("scenario list is empty")
        rates = tuple(float(r) for r in self.rates)
        if not rates:
            raise ConfigError("rate grid is empty")
        if any(not 0.0 <= r <= 1.0 for r in rates):
            raise ConfigError(f"rates must lie in [0, 1]: {rates}")
        if sorted(set(rates)) != list(rates):
            raise ConfigError(f"rates must be sorted and unique: {rates}")
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError("train_fraction must be in (0, 1)")
        object.__setattr__(self, "rates", rates)
        object.__setattr__(self, "roster", tuple(self.roster))
        object.__setattr__(self, "scenarios", tuple(self.scenarios))
        params = {}
        for fam, overrides in dict(self.family_params).items():
            fam = fam if isinstance(fam, ModelFamily) else ModelFamily.parse(fam)
            params[fam] = dict(overrides)
            ModelSpec(family=fam, seed=0, params=overrides)  # validate eagerly
        object.__setattr__(self, "family_params", params)

    def to_dict(self) -> dict:
        return {
            "csv_path": self.csv_path,
            "synth": None
            if self.synth is None
            else {
                "n_samples": self.synth.n_samples,
                "class_prevalences": list(self.synth.class_prevalences),
                "separation": self.synth.separation,
                "noise_scale": self.synth.noise_scale,
            },
            "train_fraction": self.train_fraction,
            "stratified": self.stratified,
            "master_seed": self.master_seed,
            "roster": [f.value for f in self.roster],
            "family_params": {f.value: p for f, p in self.family_params.items()},
            "scenarios": [s.name for s in self.scenarios],
            "rates": list(self.rates),
            "explain": self.explain.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SweepConfig":
        try:
            synth = d.get("synth")
            return cls(
                csv_path=d.get("csv_path"),
                synth=None
                if synth is None
                else SynthSpec(
                    n_samples=synth["n_samples"],
                    class_prevalences=tuple(synth["class_prevalences"]),
                    separation=synth.get("separation", 3.0),
                    noise_scale=synth.get("noise_scale", 1.0),
                ),
                train_fraction=d.get("train_fraction", 0.8),
                stratified=d.get("stratified", True),
                master_seed=d.get("master_seed", 0),
                roster=tuple(ModelFamily.parse(f) for f in d.get("roster", [f.value for f in ModelFamily])),
                family_params=d.get("family_params", {}),
                scenarios=tuple(
                    FlipScenario.parse(s) for s in d.get("scenarios", ["S1_TO_HIGH", "S2_ROTATE"])
                ),
                rates=tuple(d.get("rates", DEFAULT_RATES)),
                explain=ExplainConfig.from_dict(d["explain"]) if "explain" in d else ExplainConfig(),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad sweep config: {exc}") from exc

    @classmethod
    def load(cls, path: str | Path) -> "SweepConfig":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON: {exc}") from exc
        return cls.from_dict(raw)

    def cell_seed(self, family: ModelFamily, scenario: FlipScenario, rate: float) -> int:
        # rate-0 cells ignore the scenario so both tables share one baseline
        scen = "none" if rate == 0.0 else scenario.name
        return derive_seed(self.master_seed, family.value, scen, float(rate))


@dataclass(frozen=True)
class CellResult:
    family: ModelFamily
    scenario: FlipScenario
    rate: float
    cell_seed: int
    n_selected: int
    n_effective: int
    metrics: MetricsReport
    explanations: dict | None = None
    duration: float = 0.0  # wall clock; excluded from persisted cell lines

    def key(self) -> tuple:
        return (self.family.value, self.scenario.name, self.rate)

    def to_dict(self) -> dict:
        return {
            "family": self.family.value,
            "scenario": self.scenario.name,
            "rate": self.rate,
            "cell_seed": self.cell_seed,
            "plan": {"n_selected": self.n_selected, "n_effective": self.n_effective},
            "metrics": self.metrics.to_dict(),
            "explanations": self.explanations,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CellResult":
        return cls(
            family=ModelFamily.parse(d["family"]),
            scenario=FlipScenario.parse(d["scenario"]),
            rate=float(d["rate"]),
            cell_seed=int(d["cell_seed"]),
            n_selected=int(d["plan"]["n_selected"]),
            n_effective=int(d["plan"]["n_effective"]),
            metrics=MetricsReport.from_dict(d["metrics"]),
            explanations=d.get("explanations"),
        )


@dataclass(frozen=True)
class CellFailure:
    family: ModelFamily
    scenario: FlipScenario
    rate: float
    error: str

    def to_dict(self) -> dict:
        return {
            "family": self.family.value,
            "scenario": self.scenario.name,
            "rate": self.rate,
            "error": self.error,
        }


@dataclass
class ResultSet:
    config: SweepConfig
    cells: list[CellResult]
    failures: list[CellFailure] = field(default_factory=list)
    toolkit_version: str = _toolkit_version
    created: str = ""

    def cell(self, family: ModelFamily, scenario: FlipScenario, rate: float) -> CellResult:
        for c in self.cells:
            if c.family is family and c.scenario is scenario and abs(c.rate - rate) < 1e-12:
                return c
        raise KeyError((family, scenario, rate))

    def save(self, out_dir: str | Path) -> dict[str, Path]:
        """Persist deterministically: cell lines and config echo carry no
        wall-clock fields; timing lands in run_meta.json instead."""
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        results_path = out_dir / "results.jsonl"
        with results_path.open("w", encoding="utf-8") as fh:
            for cell in self.cells:
                fh.write(json.dumps(cell.to_dict(), sort_keys=True, separators=(",", ":")))
                fh.write("\n")
        echo_path = out_dir / "config_echo.json"
        echo_path.write_text(
            json.dumps(
                {"toolkit_version": self.toolkit_version, "config": self.config.to_dict()},
                sort_keys=True,
                indent=2,
            )
            + "\n",
            encoding="utf-8",
        )
        meta_path = out_dir / "run_meta.json"
        meta_path.write_text(
            json.dumps(
                {
                    "created": self.created,
                    "toolkit_version": self.toolkit_version,
                    "durations": {
                        "|".join(map(str, c.key())): c.duration for c in self.cells
                    },
                    "failures": [f.to_dict() for f in self.failures],
                },
                sort_keys=True,
                indent=2,
            )
            + "\n",
            encoding="utf-8",
        )
        return {"results": results_path, "config_echo": echo_path, "run_meta": meta_path}


def load_results(out_dir: str | Path) -> ResultSet:
    out_dir = Path(out_dir)
    echo = json.loads((out_dir / "config_echo.json").read_text(encoding="utf-8"))
    cells = [
        CellResult.from_dict(json.loads(line))
        for line in (out_dir / "results.jsonl").read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]
    return ResultSet(
        config=SweepConfig.from_dict(echo["config"]),
        cells=cells,
        toolkit_version=echo["toolkit_version"],
    )


def build_dataset(config: SweepConfig) -> Dataset:
    if config.csv_path is not None:
        return load_csv(config.csv_path)
    return synthesize(config.synth, derive_seed(config.master_seed, "data"))


def _prepare_splits(config: SweepConfig) -> tuple[Dataset, Dataset]:
    dataset = build_dataset(config)
    return split(
        dataset,
        train_fraction=config.train_fraction,
        stratified=config.stratified,
        seed=derive_seed(config.master_seed, "split"),
    )


def _model_spec(config: SweepConfig, family: ModelFamily, cell_seed: int) -> ModelSpec:
    return ModelSpec(
        family=family,
        seed=derive_seed(cell_seed, "model"),
        params=config.family_params.get(family, {}),
    )


def _explain_cell(
    cfg: ExplainConfig,
    model: TrainedModel,
    train: Dataset,
    test: Dataset,
    cell_seed: int,
) -> dict:
    out: dict = {}
    pred = model.predict(test.features)
    names = list(FEATURE_NAMES)
    if cfg.importance:
        rep = permutation_importance(
            model,
            test.features,
            test.labels,
            n_repeats=cfg.n_repeats,
            seed=derive_seed(cell_seed, "importance"),
        )
        out["importance"] = rep.to_dict(names)
    # explained instances: first misclassified and first correct test row
    picks = []
    wrong = np.flatnonzero(pred != test.labels)
    right = np.flatnonzero(pred == test.labels)
    if wrong.size:
        picks.append(("first_misclassified", int(wrong[0])))
    if right.size:
        picks.append(("first_correct", int(right[0])))
    if cfg.lime:
        scaler = model.scaler if model.scaler is not None else ScalerParams.fit(train.features)
        out["lime"] = {
            tag: lime_explain(
                model,
                test.features[i],
                scaler,
                n_samples=cfg.lime_samples,
                seed=derive_seed(cell_seed, "lime", i),
            ).to_dict(names)
            for tag, i in picks
        }
    if cfg.shap:
        rng = np.random.default_rng(derive_seed(cell_seed, "background"))
        size = min(cfg.background_size, train.n_samples)
        background = train.features[rng.choice(train.n_samples, size=size, replace=False)]
        shap_docs = {}
        force = []
        for tag, i in picks:
            exp = shap_values(
                model,
                test.features[i],
                background,
                n_permutations=cfg.shap_permutations,
                seed=derive_seed(cell_seed, "shap", i),
            )
            shap_docs[tag] = exp.to_dict(names)
            force.append({"instance": tag, **exp.force_plot_data(names)})
        out["shap"] = shap_docs
        out["force_plots"] = force
    if cfg.surrogate:
        surr = surrogate_tree(
            model, train.features, max_depth=cfg.surrogate_depth, feature_names=names
        )
        out["surrogate"] = {
            "max_depth": surr.max_depth,
            "fidelity": surr.fidelity,
            "n_leaves": surr.n_leaves,
            "rules": [
                r.text(names, [c for c in ("LOW", "NORMAL", "MEDIUM", "HIGH")])
                for r in extract_rules(surr)
            ],
        }
    return out


def run_cell(
    config: SweepConfig,
    family: ModelFamily,
    scenario: FlipScenario,
    rate: float,
    _splits: tuple[Dataset, Dataset] | None = None,
) -> CellResult:
    """Execute one sweep cell; a pure function of (config, family, scenario, rate)."""
    started = time.perf_counter()
    train, test = _splits if _splits is not None else _prepare_splits(config)
    cell_seed = config.cell_seed(family, scenario, rate)

    plan = plan_flips(train.labels, scenario, rate, seed=derive_seed(cell_seed, "plan"))
    poisoned = apply_plan(train, plan)
    scaler = ScalerParams.fit(poisoned.features)  # features untouched by poisoning
    model = fit(_model_spec(config, family, cell_seed), poisoned, scaler=scaler)

    proba = model.predict_proba(test.features)
    pred = np.argmax(proba, axis=1)
    report = classification_metrics(confusion_matrix(test.labels, pred))
    report = report.with_log_loss(log_loss(test.labels, proba))

    explanations = None
    if config.explain.any_enabled:
        explanations = _explain_cell(config.explain, model, poisoned, test, cell_seed)

    return CellResult(
        family=family,
        scenario=scenario,
        rate=rate,
        cell_seed=cell_seed,
        n_selected=plan.n_selected,
        n_effective=plan.n_effective,
        metrics=report,
        explanations=explanations,
        duration=time.perf_counter() - started,
    )


def _run_unit(config: SweepConfig, family: ModelFamily, scenario: FlipScenario, rate: float):
    try:
        return run_cell(config, family, scenario, rate)
    except Exception as exc:  # sweep continues; the failure is recorded per cell
        log.exception("cell failed: %s %s %s", family.value, scenario.name, rate)
        return CellFailure(family, scenario, rate, f"{type(exc).__name__}: {exc}")


def sweep(config: SweepConfig, jobs: int = 1) -> ResultSet:
    """Run the whole grid. Output is byte-identical for any ``jobs``."""
    units = []  # unique work: rate 0 computed once per family
    for family in config.roster:
        for scenario in config.scenarios:
            for rate in config.rates:
                if rate == 0.0 and scenario is not config.scenarios[0]:
                    continue
                units.append((family, scenario, rate))

    if jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_run_unit, *zip(*((config, f, s, r) for f, s, r in units))))
    else:
        outcomes = [_run_unit(config, f, s, r) for f, s, r in units]

    by_unit = dict(zip(units, outcomes))
    cells: list[CellResult] = []
    failures: list[CellFailure] = []
    for family in config.roster:
        for scenario in config.scenarios:
            for rate in config.rates:
                unit = (family, config.scenarios[0] if rate == 0.0 else scenario, rate)
                outcome = by_unit[unit]
                if isinstance(outcome, CellFailure):
                    failures.append(CellFailure(family, scenario, rate, outcome.error))
                    continue
                cells.append(
                    outcome
                    if outcome.scenario is scenario
                    else replace(outcome, scenario=scenario)
                )
    created = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    return ResultSet(config=config, cells=cells, failures=failures, created=created)
