"""Label-flipping attacks on a training split.

Two scenarios are supported: flip-everything-to-HIGH and the one-step rotation
of the four risk levels. A plan records exactly which rows flip and how, so an
attack is auditable and replayable; applying a plan never touches features,
row order, or the test split.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .data import Dataset, RiskLabel

__all__ = [
    "FlipScenario",
    "FlipEntry",
    "PoisonPlan",
    "PoisonError",
    "InvalidRate",
    "IndexOutOfRange",
    "flip_label",
    "plan_flips",
    "apply_plan",
]


class PoisonError(ValueError):
    pass


class InvalidRate(PoisonError):
    pass


class IndexOutOfRange(PoisonError):
    pass


class FlipScenario(enum.Enum):
    """Label maps of the two attack scenarios.

    S1_TO_HIGH sends every level to HIGH (its image is the single label HIGH,
    so selections landing on HIGH rows are no-ops). S2_ROTATE is the 4-cycle
    LOW -> NORMAL -> MEDIUM -> HIGH -> LOW, which has no fixed points.
    """

    S1_TO_HIGH = "S1"
    S2_ROTATE = "S2"

    def map(self, label: RiskLabel) -> RiskLabel:
        if self is FlipScenario.S1_TO_HIGH:
            return RiskLabel.HIGH
        return RiskLabel((int(label) + 1) % 4)

    @classmethod
    def parse(cls, text: str) -> "FlipScenario":
        key = text.strip().upper()
        for scenario in cls:
            if key in (scenario.name, scenario.value):
                return scenario
        raise PoisonError(f"unknown scenario {text!r}")


def flip_label(label: RiskLabel, scenario: FlipScenario) -> RiskLabel:
    """Scenario mapping of one label; pure."""
    return scenario.map(RiskLabel(label))


@dataclass(frozen=True)
class FlipEntry:
    row: int
    old_label: RiskLabel
    new_label: RiskLabel

    @property
    def is_noop(self) -> bool:
        return self.old_label == self.new_label


@dataclass(frozen=True)
class PoisonPlan:
    """Exact record of one attack: scenario, rate, seed, and per-row flips.

    ``flips`` covers every selected row, including S1 selections that landed
    on already-HIGH rows; those entries are retained as explicit no-ops so the
    effective flip fraction stays reportable.
    """

    scenario: FlipScenario
    rate: float
    seed: int
    flips: tuple[FlipEntry, ...]

    @property
    def n_selected(self) -> int:
        return len(self.flips)

    @property
    def n_effective(self) -> int:
        return sum(1 for f in self.flips if not f.is_noop)

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario.name,
            "rate": self.rate,
            "seed": self.seed,
            "flips": [
                [f.row, f.old_label.name, f.new_label.name] for f in self.flips
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PoisonPlan":
        flips = tuple(
            FlipEntry(int(row), RiskLabel.parse(old), RiskLabel.parse(new))
            for row, old, new in d["flips"]
        )
        return cls(
            scenario=FlipScenario.parse(d["scenario"]),
            rate=float(d["rate"]),
            seed=int(d["seed"]),
            flips=flips,
        )

    def save(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")
        return path

    @classmethod
    def load(cls, path: str | Path) -> "PoisonPlan":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def plan_flips(
    labels: np.ndarray,
    scenario: FlipScenario,
    rate: float,
    seed: int,
) -> PoisonPlan:
    """Select round(rate * n) rows uniformly at random and record their flips.

    Selection draws from all rows (not just rows whose label would change);
    rounding is half-up. Deterministic given (labels, scenario, rate, seed).
    """
    if not 0.0 <= rate <= 1.0:
        raise InvalidRate(f"rate must be in [0, 1], got {rate}")
    labels = np.asarray(labels, dtype=np.int64)
    n = labels.shape[0]
    n_selected = int(math.floor(rate * n + 0.5))
    rng = np.random.default_rng(seed)
    chosen = np.sort(rng.choice(n, size=n_selected, replace=False))
    flips = tuple(
        FlipEntry(
            row=int(i),
            old_label=RiskLabel(labels[i]),
            new_label=scenario.map(RiskLabel(labels[i])),
        )
        for i in chosen
    )
    return PoisonPlan(scenario=scenario, rate=rate, seed=seed, flips=flips)


def apply_plan(train: Dataset, plan: PoisonPlan) -> Dataset:
    """New Dataset with plan labels swapped in; the input is left unmodified."""
    n = train.n_samples
    for entry in plan.flips:
        if not 0 <= entry.row < n:
            raise IndexOutOfRange(
                f"flip row {entry.row} outside training split of {n} rows"
            )
    labels = train.labels.copy()
    for entry in plan.flips:
        labels[entry.row] = int(entry.new_label)
    return train.with_labels(
        labels,
        source=f"{train.source}/poisoned:{plan.scenario.value}@{plan.rate:g}",
    )
