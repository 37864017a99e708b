"""EEG band-power dataset schema, CSV I/O, synthetic generation, splitting, scaling.

The feature space is the 25-column cross product of the five Emotiv Insight
electrodes (AF3, T7, Pz, T8, AF4) and the five recorded brainwave bands
(THETA, ALPHA, LOW_BETA, HIGH_BETA, GAMMA). Targets are four ordered risk
levels. Band powers are non-negative by construction, so the synthetic
generator draws log-normal features whose class structure lives in log space.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "RiskLabel",
    "ELECTRODES",
    "BANDS",
    "FEATURE_NAMES",
    "BandDefinition",
    "BAND_DEFINITIONS",
    "Dataset",
    "SynthSpec",
    "ScalerParams",
    "DataError",
    "MissingColumn",
    "UnknownLabel",
    "NonNumericFeature",
    "NegativeFeature",
    "InvalidSpec",
    "EmptyClass",
    "SchemaMismatch",
    "load_csv",
    "write_csv",
    "synthesize",
    "split",
    "standardize",
]


class RiskLabel(enum.IntEnum):
    """Four-level risk target with canonical integer codes."""

    LOW = 0
    NORMAL = 1
    MEDIUM = 2
    HIGH = 3

    @classmethod
    def parse(cls, text: str) -> "RiskLabel":
        """Decode a label string, case-insensitively.

        Accepts the short names (``LOW``) and the long report forms
        (``Low-Risk``). Raises ``KeyError`` for anything else.
        """
        return _LABEL_ALIASES[text.strip().upper()]


_LABEL_ALIASES = {
    "LOW": RiskLabel.LOW,
    "NORMAL": RiskLabel.NORMAL,
    "MEDIUM": RiskLabel.MEDIUM,
    "HIGH": RiskLabel.HIGH,
    "LOW-RISK": RiskLabel.LOW,
    "MEDIUM-RISK": RiskLabel.MEDIUM,
    "HIGH-RISK": RiskLabel.HIGH,
}

N_CLASSES = 4

ELECTRODES = ("AF3", "T7", "Pz", "T8", "AF4")
BANDS = ("THETA", "ALPHA", "LOW_BETA", "HIGH_BETA", "GAMMA")

#: Canonical column order: electrode-major, band-minor.
FEATURE_NAMES = tuple(f"{e}_{b}" for e in ELECTRODES for b in BANDS)
N_FEATURES = len(FEATURE_NAMES)

#: Header aliases accepted on input; canonical names win on output.
#: ``AF_ALPHA`` circulates in some exports of this schema.
HEADER_ALIASES = {"AF_ALPHA": "AF3_ALPHA"}

LABEL_COLUMN = "label"
TIMESTAMP_COLUMN = "TIMESTAMP"


@dataclass(frozen=True)
class BandDefinition:
    """Named brainwave band with its frequency range in Hz."""

    name: str
    low_hz: float
    high_hz: float


#: Conventional band ranges, used for documentation and generator profiles only.
BAND_DEFINITIONS = (
    BandDefinition("Delta", 0.0, 4.0),
    BandDefinition("Theta", 4.0, 7.0),
    BandDefinition("Alpha", 8.0, 13.0),
    BandDefinition("Beta", 14.0, 30.0),
    BandDefinition("Gamma", 31.0, 100.0),
)


class DataError(ValueError):
    """Base class for dataset construction and I/O errors."""


class MissingColumn(DataError):
    def __init__(self, column: str):
        super().__init__(f"missing required column {column!r}")
        self.column = column


class UnknownLabel(DataError):
    def __init__(self, row: int, value: str):
        super().__init__(f"row {row}: unknown label {value!r}")
        self.row = row
        self.value = value


class NonNumericFeature(DataError):
    def __init__(self, row: int, column: str, value: str):
        super().__init__(f"row {row}, column {column!r}: non-numeric value {value!r}")
        self.row = row
        self.column = column


class NegativeFeature(DataError):
    def __init__(self, row: int, column: str, value: float):
        super().__init__(f"row {row}, column {column!r}: negative band power {value}")
        self.row = row
        self.column = column


class InvalidSpec(DataError):
    """Synthetic-data spec violates its invariants."""


class EmptyClass(DataError):
    """Stratified split requested but some class has no samples."""


class SchemaMismatch(DataError):
    """Feature matrices disagree on column count or column names."""


@dataclass(frozen=True)
class Dataset:
    """Immutable labeled band-power table.

    ``features`` has one column per ``FEATURE_NAMES`` entry, ``labels`` holds
    integer ``RiskLabel`` codes. Arrays are copied and frozen on construction
    so instances are safe to share between threads and sweep cells.
    """

    features: np.ndarray
    labels: np.ndarray
    timestamps: np.ndarray | None = None
    source: str = "unknown"
    seed: int | None = None

    def __post_init__(self):
        feats = np.ascontiguousarray(self.features, dtype=np.float64)
        labels = np.ascontiguousarray(self.labels, dtype=np.int64)
        if feats.ndim != 2 or feats.shape[1] != N_FEATURES:
            raise SchemaMismatch(
                f"expected {N_FEATURES} feature columns, got shape {feats.shape}"
            )
        if labels.shape != (feats.shape[0],):
            raise SchemaMismatch(
                f"labels shape {labels.shape} does not match {feats.shape[0]} rows"
            )
        if not np.all(np.isfinite(feats)):
            raise DataError("features contain non-finite values")
        if labels.size and (labels.min() < 0 or labels.max() >= N_CLASSES):
            raise DataError("labels contain codes outside 0..3")
        feats.flags.writeable = False
        labels.flags.writeable = False
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", labels)
        if self.timestamps is not None:
            ts = np.ascontiguousarray(self.timestamps, dtype=np.float64)
            if ts.shape != (feats.shape[0],):
                raise SchemaMismatch("timestamps length does not match rows")
            ts.flags.writeable = False
            object.__setattr__(self, "timestamps", ts)

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=N_CLASSES)

    def take(self, indices: np.ndarray, source: str | None = None) -> "Dataset":
        """Row subset as a new Dataset."""
        return Dataset(
            features=self.features[indices],
            labels=self.labels[indices],
            timestamps=None if self.timestamps is None else self.timestamps[indices],
            source=source if source is not None else self.source,
            seed=self.seed,
        )

    def with_labels(self, labels: np.ndarray, source: str | None = None) -> "Dataset":
        """Same rows with a replaced label vector; features are shared, not copied."""
        d = Dataset.__new__(Dataset)
        new_labels = np.ascontiguousarray(labels, dtype=np.int64)
        if new_labels.shape != self.labels.shape:
            raise SchemaMismatch("replacement labels have wrong length")
        if new_labels.size and (new_labels.min() < 0 or new_labels.max() >= N_CLASSES):
            raise DataError("labels contain codes outside 0..3")
        new_labels.flags.writeable = False
        object.__setattr__(d, "features", self.features)
        object.__setattr__(d, "labels", new_labels)
        object.__setattr__(d, "timestamps", self.timestamps)
        object.__setattr__(d, "source", source if source is not None else self.source)
        object.__setattr__(d, "seed", self.seed)
        return d


@dataclass(frozen=True)
class SynthSpec:
    """Parameters of the synthetic band-power generator.

    ``separation`` scales the distance between class mean vectors in log-power
    space; ``noise_scale`` is the log-space standard deviation. Class sizes are
    apportioned exactly (largest remainder), so prevalences with integral
    expected counts are honored to the row.
    """

    n_samples: int = 1550
    class_prevalences: tuple[float, float, float, float] = (
        400 / 1550,
        400 / 1550,
        375 / 1550,
        375 / 1550,
    )
    separation: float = 3.0
    noise_scale: float = 1.0

    def __post_init__(self):
        if self.n_samples < 8:
            raise InvalidSpec(f"n_samples must be >= 8, got {self.n_samples}")
        prev = np.asarray(self.class_prevalences, dtype=float)
        if prev.shape != (N_CLASSES,) or np.any(prev < 0):
            raise InvalidSpec("class_prevalences must be 4 non-negative reals")
        if abs(prev.sum() - 1.0) > 1e-9:
            raise InvalidSpec(f"class_prevalences sum to {prev.sum()!r}, expected 1")
        if self.separation < 0:
            raise InvalidSpec("separation must be non-negative")
        if self.noise_scale <= 0:
            raise InvalidSpec("noise_scale must be positive")

    def class_counts(self) -> np.ndarray:
        return _apportion(np.asarray(self.class_prevalences) * self.n_samples, self.n_samples)


@dataclass(frozen=True)
class ScalerParams:
    """Per-column affine standardization fitted on a training split."""

    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self):
        mean = np.ascontiguousarray(self.mean, dtype=np.float64)
        std = np.ascontiguousarray(self.std, dtype=np.float64)
        if mean.shape != std.shape or mean.ndim != 1:
            raise SchemaMismatch("scaler mean/std must be 1-D and equal length")
        if np.any(std <= 0):
            raise DataError("scaler std entries must be positive")
        mean.flags.writeable = False
        std.flags.writeable = False
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "std", std)

    @classmethod
    def fit(cls, features: np.ndarray) -> "ScalerParams":
        """Column means and standard deviations; constant columns get std 1."""
        X = np.asarray(features, dtype=np.float64)
        if X.ndim != 2 or X.shape[0] == 0:
            raise DataError("cannot fit scaler on empty feature matrix")
        mean = X.mean(axis=0)
        std = X.std(axis=0)
        std = np.where(std > 0, std, 1.0)
        return cls(mean=mean, std=std)

    def transform(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.shape[-1] != self.mean.shape[0]:
            raise SchemaMismatch(
                f"expected {self.mean.shape[0]} columns, got {X.shape[-1]}"
            )
        return (X - self.mean) / self.std

    def inverse(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.shape[-1] != self.mean.shape[0]:
            raise SchemaMismatch(
                f"expected {self.mean.shape[0]} columns, got {X.shape[-1]}"
            )
        return X * self.std + self.mean

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "ScalerParams":
        return cls(mean=np.asarray(d["mean"]), std=np.asarray(d["std"]))


def _apportion(targets: np.ndarray, total: int) -> np.ndarray:
    """Largest-remainder rounding of non-negative reals to integers summing to total."""
    floors = np.floor(targets).astype(np.int64)
    remainder = int(total - floors.sum())
    # ties go to the lowest index; argsort is stable on the negated fractions
    order = np.argsort(-(targets - floors), kind="stable")
    counts = floors.copy()
    counts[order[:remainder]] += 1
    return counts


def load_csv(path: str | Path) -> Dataset:
    """Load a band-power CSV into canonical column order.

    The header must contain every feature column (aliases accepted) and a
    ``label`` column; ``TIMESTAMP`` is optional and preserved. Labels parse
    case-insensitively from both short and ``X-Risk`` long forms.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file, expected a header row") from None
        rows = list(reader)

    canonical = [HEADER_ALIASES.get(h.strip(), h.strip()) for h in header]
    col_index = {name: i for i, name in enumerate(canonical)}
    for name in FEATURE_NAMES:
        if name not in col_index:
            raise MissingColumn(name)
    label_idx = None
    for i, name in enumerate(canonical):
        if name.lower() == LABEL_COLUMN:
            label_idx = i
            break
    if label_idx is None:
        raise MissingColumn(LABEL_COLUMN)
    ts_idx = col_index.get(TIMESTAMP_COLUMN)

    n = len(rows)
    features = np.empty((n, N_FEATURES), dtype=np.float64)
    labels = np.empty(n, dtype=np.int64)
    timestamps = np.empty(n, dtype=np.float64) if ts_idx is not None else None
    feat_cols = [col_index[name] for name in FEATURE_NAMES]

    for r, row in enumerate(rows):
        for c, src in enumerate(feat_cols):
            cell = row[src]
            try:
                value = float(cell)
            except ValueError:
                raise NonNumericFeature(r, FEATURE_NAMES[c], cell) from None
            if not math.isfinite(value):
                raise NonNumericFeature(r, FEATURE_NAMES[c], cell)
            if value < 0:
                raise NegativeFeature(r, FEATURE_NAMES[c], value)
            features[r, c] = value
        try:
            labels[r] = RiskLabel.parse(row[label_idx])
        except KeyError:
            raise UnknownLabel(r, row[label_idx]) from None
        if timestamps is not None:
            try:
                timestamps[r] = float(row[ts_idx])
            except ValueError:
                raise NonNumericFeature(r, TIMESTAMP_COLUMN, row[ts_idx]) from None

    return Dataset(
        features=features,
        labels=labels,
        timestamps=timestamps,
        source=f"csv:{path.name}",
    )


def write_csv(dataset: Dataset, path: str | Path) -> Path:
    """Write a Dataset with canonical headers; floats carry 9 significant digits."""
    path = Path(path)
    header = list(FEATURE_NAMES)
    if dataset.timestamps is not None:
        header.append(TIMESTAMP_COLUMN)
    header.append(LABEL_COLUMN)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for r in range(dataset.n_samples):
            row = [f"{v:.9g}" for v in dataset.features[r]]
            if dataset.timestamps is not None:
                row.append(f"{dataset.timestamps[r]:.9g}")
            row.append(RiskLabel(dataset.labels[r]).name)
            writer.writerow(row)
    return path


# Fixed log-space class geometry. Rows are classes, columns features; the
# entries are frozen so synthesize(spec, seed) is a pure function. Pz columns
# get the largest spread so that electrode carries most of the class signal.
def _class_directions() -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence(20230517))
    directions = rng.uniform(-0.5, 0.5, size=(N_CLASSES, N_FEATURES))
    weights = np.array(
        [1.6 if name.startswith("Pz") else 0.9 for name in FEATURE_NAMES]
    )
    return directions * weights


_CLASS_DIRECTIONS = _class_directions()


def synthesize(spec: SynthSpec, seed: int) -> Dataset:
    """Draw a labeled band-power dataset from the log-normal class model.

    Labels are allocated to the exact apportioned class counts and shuffled;
    feature column c of a class-k row is exp(N(separation * D[k, c],
    noise_scale^2)) for the fixed direction matrix D. The result is a pure
    function of (spec, seed).
    """
    rng = np.random.default_rng(seed)
    counts = spec.class_counts()
    labels = np.repeat(np.arange(N_CLASSES), counts)
    labels = labels[rng.permutation(spec.n_samples)]
    mu = spec.separation * _CLASS_DIRECTIONS
    z = rng.standard_normal((spec.n_samples, N_FEATURES))
    features = np.exp(mu[labels] + spec.noise_scale * z)
    return Dataset(features=features, labels=labels, source="synthetic", seed=seed)


def split(
    dataset: Dataset,
    train_fraction: float = 0.8,
    stratified: bool = True,
    seed: int = 0,
) -> tuple[Dataset, Dataset]:
    """Deterministic train/test partition.

    Stratified mode apportions each class with largest-remainder rounding, so
    per-class train proportions match the full dataset within one sample while
    the train total stays at round(train_fraction * n).
    """
    if not 0.0 < train_fraction < 1.0:
        raise DataError(f"train_fraction must be in (0, 1), got {train_fraction}")
    n = dataset.n_samples
    n_train = int(math.floor(train_fraction * n + 0.5))
    rng = np.random.default_rng(seed)

    if stratified:
        counts = dataset.class_counts()
        if np.any(counts == 0):
            missing = RiskLabel(int(np.argmin(counts))).name
            raise EmptyClass(f"stratified split impossible: class {missing} has no samples")
        per_class = _apportion(train_fraction * counts, n_train)
        train_idx = []
        test_idx = []
        for k in range(N_CLASSES):
            members = np.flatnonzero(dataset.labels == k)
            members = members[rng.permutation(members.size)]
            train_idx.append(members[: per_class[k]])
            test_idx.append(members[per_class[k] :])
        train_idx = np.sort(np.concatenate(train_idx))
        test_idx = np.sort(np.concatenate(test_idx))
    else:
        perm = rng.permutation(n)
        train_idx = np.sort(perm[:n_train])
        test_idx = np.sort(perm[n_train:])

    return (
        dataset.take(train_idx, source=f"{dataset.source}/train"),
        dataset.take(test_idx, source=f"{dataset.source}/test"),
    )


def standardize(
    train: Dataset, test: Dataset
) -> tuple[Dataset, Dataset, ScalerParams]:
    """Column-standardize both splits with parameters fitted on train only.

    Standardized features are centered and may be negative; the non-negativity
    of raw band powers is enforced at the ingestion boundary, not here.
    """
    if train.n_samples == 0:
        raise DataError("cannot standardize an empty training split")
    if train.features.shape[1] != test.features.shape[1]:
        raise SchemaMismatch("train and test column counts differ")
    params = ScalerParams.fit(train.features)
    train_std = Dataset(
        features=params.transform(train.features),
        labels=train.labels,
        timestamps=train.timestamps,
        source=f"{train.source}/standardized",
        seed=train.seed,
    )
    test_std = Dataset(
        features=params.transform(test.features),
        labels=test.labels,
        timestamps=test.timestamps,
        source=f"{test.source}/standardized",
        seed=test.seed,
    )
    return train_std, test_std, params
