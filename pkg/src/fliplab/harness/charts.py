"""Static SVG charts rendered without plotting dependencies.

Hand-rolled markup keeps the output a pure function of the result set: no
timestamps, no generated ids, fixed numeric formatting. Emitted per sweep:
an accuracy-vs-rate line chart per scenario, one confusion heatmap per cell,
and importance / force-plot bars for cells that carry explanations.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..data import RiskLabel
from .sweep import CellResult, ResultSet

__all__ = ["render_charts", "accuracy_chart_svg", "confusion_heatmap_svg",
           "importance_chart_svg", "force_plot_svg"]

_PALETTE = ("#4477aa", "#ee6677", "#228833", "#ccbb44", "#66ccee", "#aa3377")
_FONT = 'font-family="Helvetica,Arial,sans-serif"'


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _svg(width: int, height: int, body: list[str]) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">'
    )
    return "\n".join([head, *body, "</svg>"]) + "\n"


def _text(x, y, s, size=11, anchor="start", extra=""):
    return (
        f'<text x="{_fmt(x)}" y="{_fmt(y)}" font-size="{size}" {_FONT} '
        f'text-anchor="{anchor}" {extra}>{s}</text>'
    )


def accuracy_chart_svg(results: ResultSet, scenario) -> str:
    """One polyline per family over the rate grid, accuracy in percent."""
    width, height = 640, 420
    left, right, top, bottom = 70, 170, 40, 60
    plot_w = width - left - right
    plot_h = height - top - bottom
    rates = results.config.rates
    rate_span = max(rates[-1] - rates[0], 1e-9)

    def sx(rate):
        return left + plot_w * (rate - rates[0]) / rate_span

    def sy(acc):
        return top + plot_h * (1.0 - acc)

    body = [f'<rect width="{width}" height="{height}" fill="white"/>']
    body.append(
        f'<rect x="{left}" y="{top}" width="{plot_w}" height="{plot_h}" '
        f'fill="none" stroke="#999999" stroke-width="1"/>'
    )
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        y = sy(frac)
        body.append(
            f'<line x1="{left}" y1="{_fmt(y)}" x2="{left + plot_w}" y2="{_fmt(y)}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        body.append(_text(left - 8, y + 4, f"{frac * 100:.0f}", anchor="end"))
    for rate in rates:
        x = sx(rate)
        body.append(_text(x, top + plot_h + 18, f"{rate * 100:g}%", anchor="middle"))
    body.append(_text(width / 2 - right / 2, height - 16,
                      "poisoning rate", anchor="middle", size=12))
    body.append(_text(width / 2 - right / 2, 22,
                      f"Accuracy vs poisoning rate ({scenario.value})",
                      anchor="middle", size=14))

    for i, family in enumerate(results.config.roster):
        color = _PALETTE[i % len(_PALETTE)]
        points = []
        for rate in rates:
            cell = results.cell(family, scenario, rate)
            points.append((sx(rate), sy(cell.metrics.accuracy)))
        path = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in points)
        body.append(
            f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="2"/>'
        )
        for x, y in points:
            body.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="3" fill="{color}"/>')
        ly = top + 16 * i
        lx = left + plot_w + 14
        body.append(
            f'<line x1="{lx}" y1="{ly}" x2="{lx + 18}" y2="{ly}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        body.append(_text(lx + 24, ly + 4, family.display_name))
    return _svg(width, height, body)


def confusion_heatmap_svg(cell: CellResult) -> str:
    """4x4 count heatmap, rows true class, columns predicted class."""
    cm = np.asarray(cell.metrics.confusion)
    names = [l.name for l in RiskLabel]
    size = 72
    left, top = 120, 70
    width = left + 4 * size + 40
    height = top + 4 * size + 60
    peak = max(int(cm.max()), 1)

    body = [f'<rect width="{width}" height="{height}" fill="white"/>']
    title = (
        f"{cell.family.display_name} | {cell.scenario.value} @ {cell.rate * 100:g}%"
    )
    body.append(_text(width / 2, 26, title, anchor="middle", size=14))
    body.append(_text(width / 2, 44, "columns: predicted class", anchor="middle", size=10))
    for i in range(4):
        for j in range(4):
            frac = cm[i, j] / peak
            # white -> blue ramp
            r = int(round(255 - 175 * frac))
            g = int(round(255 - 135 * frac))
            x = left + j * size
            y = top + i * size
            body.append(
                f'<rect x="{x}" y="{y}" width="{size}" height="{size}" '
                f'fill="rgb({r},{g},255)" stroke="#666666" stroke-width="0.5"/>'
            )
            color = "#000000" if frac < 0.6 else "#ffffff"
            body.append(
                _text(x + size / 2, y + size / 2 + 4, str(int(cm[i, j])),
                      anchor="middle", extra=f'fill="{color}"')
            )
    for i, name in enumerate(names):
        body.append(_text(left - 8, top + i * size + size / 2 + 4, name, anchor="end"))
        body.append(
            _text(left + i * size + size / 2, top + 4 * size + 18, name, anchor="middle")
        )
    body.append(_text(16, top + 2 * size, "true", size=10))
    return _svg(width, height, body)


def importance_chart_svg(cell: CellResult) -> str:
    """Horizontal bars of mean permutation importance, largest first."""
    doc = cell.explanations["importance"]
    names = doc["feature_names"]
    means = np.asarray(doc["importances_mean"])
    order = np.argsort(-means, kind="stable")
    bar_h, gap = 14, 4
    left, top = 150, 56
    width = 640
    height = top + len(names) * (bar_h + gap) + 40
    scale_max = max(float(np.abs(means).max()), 1e-9)
    plot_w = width - left - 60
    zero_x = left + plot_w * 0.5

    body = [f'<rect width="{width}" height="{height}" fill="white"/>']
    title = (
        f"Permutation importance: {cell.family.display_name} | "
        f"{cell.scenario.value} @ {cell.rate * 100:g}%"
    )
    body.append(_text(width / 2, 24, title, anchor="middle", size=14))
    if not doc["feasible"]:
        body.append(
            _text(width / 2, 42, "infeasible: constant predictions", anchor="middle",
                  size=11, extra='fill="#aa3377"')
        )
    body.append(
        f'<line x1="{_fmt(zero_x)}" y1="{top - 6}" x2="{_fmt(zero_x)}" '
        f'y2="{height - 34}" stroke="#999999" stroke-width="1"/>'
    )
    for row, idx in enumerate(order):
        value = float(means[idx])
        y = top + row * (bar_h + gap)
        length = plot_w * 0.5 * abs(value) / scale_max
        x = zero_x - length if value < 0 else zero_x
        color = "#4477aa" if value >= 0 else "#ee6677"
        body.append(
            f'<rect x="{_fmt(x)}" y="{y}" width="{_fmt(length)}" height="{bar_h}" '
            f'fill="{color}"/>'
        )
        body.append(_text(left - 8, y + bar_h - 3, names[idx], anchor="end", size=10))
        body.append(
            _text(zero_x + plot_w * 0.5 + 6, y + bar_h - 3, f"{value:+.4f}", size=9)
        )
    return _svg(width, height, body)


def force_plot_svg(force: dict, title: str) -> str:
    """Signed contribution bars for one explained instance."""
    contribs = force["contributions"]
    bar_h, gap = 14, 4
    left, top = 150, 72
    width = 640
    height = top + len(contribs) * (bar_h + gap) + 40
    peak = max(max(abs(c["attribution"]) for c in contribs), 1e-12)
    plot_w = width - left - 60
    zero_x = left + plot_w * 0.5

    body = [f'<rect width="{width}" height="{height}" fill="white"/>']
    body.append(_text(width / 2, 24, title, anchor="middle", size=14))
    body.append(
        _text(width / 2, 44,
              f"base={force['base_value']:.4f}  "
              f"prediction={force['prediction_estimate']:.4f}  "
              f"class={RiskLabel(force['explained_class']).name}",
              anchor="middle", size=11)
    )
    body.append(
        f'<line x1="{_fmt(zero_x)}" y1="{top - 6}" x2="{_fmt(zero_x)}" '
        f'y2="{height - 34}" stroke="#999999" stroke-width="1"/>'
    )
    for row, c in enumerate(contribs):
        value = float(c["attribution"])
        y = top + row * (bar_h + gap)
        length = plot_w * 0.5 * abs(value) / peak
        x = zero_x - length if value < 0 else zero_x
        color = "#ee6677" if value >= 0 else "#4477aa"
        body.append(
            f'<rect x="{_fmt(x)}" y="{y}" width="{_fmt(length)}" height="{bar_h}" '
            f'fill="{color}"/>'
        )
        body.append(_text(left - 8, y + bar_h - 3, c["feature"], anchor="end", size=10))
        body.append(
            _text(zero_x + plot_w * 0.5 + 6, y + bar_h - 3, f"{value:+.4f}", size=9)
        )
    return _svg(width, height, body)


def _rate_tag(rate: float) -> str:
    return f"{rate * 100:g}".replace(".", "p")


def render_charts(results: ResultSet, out_dir: str | Path) -> list[Path]:
    """Write every chart the result set supports; returns the paths written."""
    if not results.cells:
        raise ValueError("result set has no cells to chart")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    for scenario in results.config.scenarios:
        path = out_dir / f"accuracy_{scenario.value.lower()}.svg"
        path.write_text(accuracy_chart_svg(results, scenario), encoding="utf-8")
        written.append(path)

    for cell in results.cells:
        stem = f"{cell.family.value}_{cell.scenario.value.lower()}_r{_rate_tag(cell.rate)}"
        path = out_dir / f"confusion_{stem}.svg"
        path.write_text(confusion_heatmap_svg(cell), encoding="utf-8")
        written.append(path)
        if cell.explanations and "importance" in cell.explanations:
            path = out_dir / f"importance_{stem}.svg"
            path.write_text(importance_chart_svg(cell), encoding="utf-8")
            written.append(path)
        if cell.explanations and "force_plots" in cell.explanations:
            for force in cell.explanations["force_plots"]:
                tag = force["instance"]
                path = out_dir / f"force_{stem}_{tag}.svg"
                title = (
                    f"Shapley contributions: {cell.family.display_name} | "
                    f"{cell.scenario.value} @ {cell.rate * 100:g}% ({tag})"
                )
                path.write_text(force_plot_svg(force, title), encoding="utf-8")
                written.append(path)
    return written
