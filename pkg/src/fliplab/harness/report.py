"""CSV tables in the layout of the two per-scenario metric tables.

Percentages are rendered to two decimals. Degenerate constant-prediction
cells show an em dash in the log-loss column, with the clipped numeric value
kept in a sidecar column so the number stays auditable. A contrast file
records, per family, the S1-vs-S2 log-loss direction at each rate both
scenarios share; the expected direction (S1 >= S2) is flagged, never
asserted, since it depends on the data geometry.
"""

from __future__ import annotations

import csv
from pathlib import Path

from ..poison import FlipScenario
from .sweep import ResultSet

__all__ = ["render_report", "CONTRAST_RATE"]

CONTRAST_RATE = 0.50

_TABLE_HEADER = [
    "model",
    "poison_rate_pct",
    "accuracy_pct",
    "recall_pct",
    "precision_pct",
    "f1_pct",
    "log_loss",
    "log_loss_value",
]


class EmptyResults(ValueError):
    pass


def _pct(x: float) -> str:
    return f"{100.0 * x:.2f}"


def render_report(results: ResultSet, out_dir: str | Path) -> list[Path]:
    """Write one CSV per scenario plus the scenario-contrast observation file."""
    if not results.cells:
        raise EmptyResults("result set has no cells to report")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    for scenario in results.config.scenarios:
        path = out_dir / f"table_{scenario.value.lower()}.csv"
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(_TABLE_HEADER)
            for family in results.config.roster:
                for rate in results.config.rates:
                    cell = results.cell(family, scenario, rate)
                    m = cell.metrics
                    loss = "" if m.log_loss is None else f"{m.log_loss:.3f}"
                    if m.degenerate_constant_prediction:
                        loss = "—"  # em dash, as in the source tables
                    writer.writerow(
                        [
                            family.display_name,
                            f"{100.0 * rate:g}",
                            _pct(m.accuracy),
                            _pct(m.macro_recall),
                            _pct(m.macro_precision),
                            _pct(m.macro_f1),
                            loss,
                            "" if m.log_loss is None else f"{m.log_loss:.9g}",
                        ]
                    )
        written.append(path)

    contrast = _scenario_contrast(results)
    if contrast is not None:
        written.append(contrast_path := out_dir / "scenario_contrast.csv")
        with contrast_path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["model", "poison_rate_pct", "log_loss_s1", "log_loss_s2", "s1_ge_s2"])
            writer.writerows(contrast)
    return written


def _scenario_contrast(results: ResultSet) -> list[list] | None:
    scenarios = results.config.scenarios
    if FlipScenario.S1_TO_HIGH not in scenarios or FlipScenario.S2_ROTATE not in scenarios:
        return None
    if CONTRAST_RATE not in results.config.rates:
        return None
    rows = []
    for family in results.config.roster:
        try:
            s1 = results.cell(family, FlipScenario.S1_TO_HIGH, CONTRAST_RATE).metrics.log_loss
            s2 = results.cell(family, FlipScenario.S2_ROTATE, CONTRAST_RATE).metrics.log_loss
        except KeyError:
            continue
        if s1 is None or s2 is None:
            continue
        rows.append(
            [
                family.display_name,
                f"{100.0 * CONTRAST_RATE:g}",
                f"{s1:.9g}",
                f"{s2:.9g}",
                "yes" if s1 >= s2 else "no",
            ]
        )
    return rows if rows else None
