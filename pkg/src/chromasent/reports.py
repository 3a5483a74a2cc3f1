"""Tabular (CSV) and graphical (SVG) report emission.

SVG files are built by hand so identical inputs produce byte-identical
output. Every pie slice and strip segment carries ``data-color-id`` and
``data-weight`` attributes with the same formatting as the CSV tables,
letting tests cross-check tables against graphics.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .associate import EmotionPalette, RatingSummary
from .colors import ColorModel
from .emotion import Emotion, LEADING_TIE_ORDER
from .sentiment import SentimentLabel

__all__ = [
    "write_sentiment_distribution",
    "write_emotion_distribution",
    "write_emotion_palettes",
    "write_common_colors",
    "write_sentiment_by_rating",
    "render_pie_svg",
    "render_strip_svg",
    "generate_reports",
]

WEIGHT_FMT = "{:.6f}"

_SENTIMENT_ORDER = (SentimentLabel.POSITIVE, SentimentLabel.NEUTRAL, SentimentLabel.NEGATIVE)


def _open_csv(path: Path):
    return path.open("w", encoding="utf-8", newline="")


def write_sentiment_distribution(path: Path, tally: Mapping[SentimentLabel, int]) -> None:
    with _open_csv(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["sentiment", "reviews"])
        for label in _SENTIMENT_ORDER:
            w.writerow([label.value, tally.get(label, 0)])
        w.writerow(["Total", sum(tally.values())])


def write_emotion_distribution(path: Path, counts: Mapping[Emotion, int]) -> None:
    """Leading-emotion company counts; absent emotions are listed with 0."""
    with _open_csv(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["emotion", "companies"])
        for emotion in LEADING_TIE_ORDER:
            w.writerow([emotion.value, counts.get(emotion, 0)])
        w.writerow(["Total", sum(counts.values())])


def write_emotion_palettes(path: Path, palettes: Sequence[EmotionPalette], model: ColorModel) -> None:
    with _open_csv(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["emotion", "rank", "color_id", "name", "r", "g", "b", "weight"])
        for palette in palettes:
            for rank, (cid, weight) in enumerate(palette.entries, start=1):
                c = model.by_id(cid)
                w.writerow(
                    [palette.emotion.value, rank, cid, c.name,
                     c.rgb.r, c.rgb.g, c.rgb.b, WEIGHT_FMT.format(weight)]
                )


def write_common_colors(path: Path, ids: Iterable[int], model: ColorModel) -> None:
    with _open_csv(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["color_id", "name", "r", "g", "b"])
        for cid in sorted(ids):
            c = model.by_id(cid)
            w.writerow([cid, c.name, c.rgb.r, c.rgb.g, c.rgb.b])


def write_sentiment_by_rating(path: Path, rows: Sequence[RatingSummary]) -> None:
    with _open_csv(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["score", "reviews", "mean_pos", "mean_neu", "mean_neg", "mean_compound"])
        for r in rows:
            w.writerow(
                [r.score, r.count,
                 WEIGHT_FMT.format(r.mean_pos), WEIGHT_FMT.format(r.mean_neu),
                 WEIGHT_FMT.format(r.mean_neg), WEIGHT_FMT.format(r.mean_compound)]
            )


def _esc(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _pie_point(cx: float, cy: float, r: float, frac: float) -> tuple[float, float]:
    # clockwise from 12 o'clock
    angle = 2.0 * math.pi * frac
    return cx + r * math.sin(angle), cy - r * math.cos(angle)


def render_pie_svg(palette: EmotionPalette, model: ColorModel) -> str:
    """Pie chart of one emotion palette; slices carry the same weights as
    the emotion_palettes table."""
    slices: list[tuple[str, str, str, float]] = []  # (id attr, fill, label, weight)
    for cid, weight in palette.entries:
        c = model.by_id(cid)
        slices.append((str(cid), c.rgb.hex, f"{c.name} {c.rgb.hex}", weight))

    cx, cy, r = 150.0, 165.0, 125.0
    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" width="300" height="300" '
        'viewBox="0 0 300 300">',
        f'<title>{_esc(palette.emotion.value)} palette</title>',
        f'<text x="150" y="24" text-anchor="middle" font-family="sans-serif" '
        f'font-size="16">{_esc(palette.emotion.value)}</text>',
    ]
    if len(slices) == 1:
        sid, fill, label, weight = slices[0]
        parts.append(
            f'<circle cx="{cx:g}" cy="{cy:g}" r="{r:g}" fill="{fill}" '
            f'stroke="#ffffff" stroke-width="1" data-color-id="{sid}" '
            f'data-weight="{WEIGHT_FMT.format(weight)}">'
            f"<title>{_esc(label)} {WEIGHT_FMT.format(weight)}</title></circle>"
        )
    else:
        acc = 0.0
        for sid, fill, label, weight in slices:
            x1, y1 = _pie_point(cx, cy, r, acc)
            acc += weight
            x2, y2 = _pie_point(cx, cy, r, min(acc, 1.0))
            large = 1 if weight > 0.5 else 0
            parts.append(
                f'<path d="M {cx:.3f} {cy:.3f} L {x1:.3f} {y1:.3f} '
                f'A {r:.3f} {r:.3f} 0 {large} 1 {x2:.3f} {y2:.3f} Z" '
                f'fill="{fill}" stroke="#ffffff" stroke-width="1" '
                f'data-color-id="{sid}" data-weight="{WEIGHT_FMT.format(weight)}">'
                f"<title>{_esc(label)} {WEIGHT_FMT.format(weight)}</title></path>"
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_strip_svg(palette: EmotionPalette, model: ColorModel) -> str:
    """Horizontal palette strip with widths proportional to weight."""
    width, height, label_h = 600.0, 60.0, 20.0
    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" width="600" height="80" '
        'viewBox="0 0 600 80">',
        f'<text x="0" y="14" font-family="sans-serif" font-size="13">'
        f"{_esc(palette.emotion.value)}</text>",
    ]
    x = 0.0
    for cid, weight in palette.entries:
        c = model.by_id(cid)
        seg = weight * width
        parts.append(
            f'<rect x="{x:.3f}" y="{label_h:g}" width="{seg:.3f}" height="{height:g}" '
            f'fill="{c.rgb.hex}" data-color-id="{cid}" '
            f'data-weight="{WEIGHT_FMT.format(weight)}">'
            f"<title>{_esc(c.name)} {c.rgb.hex} {WEIGHT_FMT.format(weight)}</title></rect>"
        )
        x += seg
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def generate_reports(
    outdir: Path,
    sentiment_tally: Mapping[SentimentLabel, int],
    emotion_counts: Mapping[Emotion, int],
    palettes: Sequence[EmotionPalette],
    rating_rows: Sequence[RatingSummary],
    common_ids: Iterable[int],
    model: ColorModel,
) -> list[Path]:
    """Write every report file and return their paths."""
    outdir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    def emit(name: str, writer, *args) -> None:
        path = outdir / name
        writer(path, *args)
        written.append(path)

    emit("sentiment_distribution.csv", write_sentiment_distribution, sentiment_tally)
    emit("emotion_distribution.csv", write_emotion_distribution, emotion_counts)
    emit("emotion_palettes.csv", write_emotion_palettes, palettes, model)
    emit("common_colors.csv", write_common_colors, common_ids, model)
    emit("sentiment_by_rating.csv", write_sentiment_by_rating, rating_rows)

    for palette in palettes:
        slug = palette.emotion.value.lower()
        pie = outdir / f"pie_{slug}.svg"
        pie.write_text(render_pie_svg(palette, model), encoding="utf-8")
        written.append(pie)
        strip = outdir / f"strip_{slug}.svg"
        strip.write_text(render_strip_svg(palette, model), encoding="utf-8")
        written.append(strip)
    return written
