"""Join palettes with review analysis per company, group companies by their
leading emotion, and aggregate group palettes into ranked emotion-to-color
associations and sentiment summaries."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .emotion import (
    Emotion,
    EmotionScores,
    LEADING_TIE_ORDER,
    fuzzify_power,
    leading_emotion,
    linguistic_label,
    mean_emotions,
)
from .errors import InputError
from .ingest import Company
from .palette import MappedPalette
from .sentiment import SentimentLabel, SentimentScores

__all__ = [
    "ScoredReview",
    "CompanyProfile",
    "EmotionPalette",
    "RatingSummary",
    "build_profile",
    "group_by_emotion",
    "aggregate_palette",
    "common_colors",
    "sentiment_by_rating",
]

log = logging.getLogger(__name__)

TOP_N_DEFAULT = 10


@dataclass(frozen=True)
class ScoredReview:
    """One review after text analysis."""

    review_id: int
    company_id: int
    score: int
    sentiment: SentimentScores
    sentiment_label: SentimentLabel
    emotions: EmotionScores


@dataclass
class CompanyProfile:
    """Per-company join of palette and review analysis."""

    company_id: int
    name: str
    mapped_palette: MappedPalette
    mean_emotions: EmotionScores
    leading: Emotion | None
    power_label: str | None
    sentiment_tally: dict[SentimentLabel, int]
    review_count: int

    def __post_init__(self):
        if sum(self.sentiment_tally.values()) != self.review_count:
            raise InputError("sentiment tally must sum to the review count")

    @property
    def included(self) -> bool:
        """Whether the profile takes part in emotion grouping."""
        return self.leading is not None


@dataclass
class EmotionPalette:
    """Ranked colors of one emotion group: (color id, weight) descending,
    at most top-N entries, weights summing to 1."""

    emotion: Emotion
    entries: list[tuple[int, float]]
    companies: int = 0

    def __post_init__(self):
        ids = [cid for cid, _ in self.entries]
        if len(set(ids)) != len(ids):
            raise InputError("emotion palette ids must be unique")
        total = math.fsum(w for _, w in self.entries)
        if abs(total - 1.0) > 1e-9:
            raise InputError(f"emotion palette weights sum to {total!r}, expected 1")

    def ids(self) -> set[int]:
        return {cid for cid, _ in self.entries}


def build_profile(
    company: Company,
    scored: Sequence[ScoredReview],
    palette: MappedPalette,
) -> CompanyProfile:
    """Fold one company's scored reviews and mapped palette into a profile.

    Companies without reviews (or whose reviews carry no emotion signal)
    get a None leading emotion and are excluded from grouping.
    """
    tally = {label: 0 for label in SentimentLabel}
    for r in scored:
        tally[r.sentiment_label] += 1
    if scored:
        means = mean_emotions([r.emotions for r in scored])
    else:
        means = EmotionScores()
    leading = leading_emotion(means)
    power = linguistic_label(fuzzify_power(means.get(leading))) if leading else None
    return CompanyProfile(
        company_id=company.id,
        name=company.name,
        mapped_palette=palette,
        mean_emotions=means,
        leading=leading,
        power_label=power,
        sentiment_tally=tally,
        review_count=len(scored),
    )


def group_by_emotion(profiles: Iterable[CompanyProfile]) -> dict[Emotion, list[CompanyProfile]]:
    """Partition included profiles by leading emotion.

    Profiles with no leading emotion are left out; the result holds only
    non-empty groups, each sorted by company id.
    """
    groups: dict[Emotion, list[CompanyProfile]] = {}
    for p in profiles:
        if p.leading is None:
            continue
        groups.setdefault(p.leading, []).append(p)
    ordered: dict[Emotion, list[CompanyProfile]] = {}
    for emotion in LEADING_TIE_ORDER:
        if emotion in groups:
            ordered[emotion] = sorted(groups[emotion], key=lambda p: p.company_id)
    return ordered


def aggregate_palette(
    emotion: Emotion,
    group: Sequence[CompanyProfile],
    top_n: int = TOP_N_DEFAULT,
    weighting: str = "equal",
) -> EmotionPalette:
    """Merge the mapped palettes of one emotion group into a ranked palette.

    Every company's palette weights already sum to 1, so with ``equal``
    weighting companies count equally; ``power`` scales each company's
    contribution by its leading emotion's mean score. Per-id totals are
    ranked descending (ties to the lowest id), cut to ``top_n``, and the
    retained weights are renormalized to sum to 1.
    """
    if not group:
        raise InputError("cannot aggregate an empty emotion group")
    if top_n < 1:
        raise InputError(f"top_n must be >= 1, got {top_n}")
    if weighting not in ("equal", "power"):
        raise InputError(f"unknown weighting mode {weighting!r}")

    sums: dict[int, list[float]] = {}
    for profile in group:
        factor = 1.0
        if weighting == "power":
            factor = profile.mean_emotions.get(emotion)
            if factor <= 0.0:
                continue
        for entry in profile.mapped_palette.entries:
            sums.setdefault(entry.color_id, []).append(entry.weight * factor)
    totals = {cid: math.fsum(ws) for cid, ws in sums.items()}
    grand = math.fsum(totals.values())
    if grand <= 0.0:
        raise InputError(f"no palette mass in group {emotion.value}")
    ranked = sorted(totals.items(), key=lambda kv: (-kv[1], kv[0]))[:top_n]
    kept = math.fsum(w for _, w in ranked)
    entries = [(cid, w / kept) for cid, w in ranked]
    return EmotionPalette(emotion=emotion, entries=entries, companies=len(group))


def common_colors(palettes: Sequence[EmotionPalette]) -> set[int]:
    """Color ids present in the ranked entries of every given palette."""
    if len(palettes) < 2:
        raise InputError("common_colors needs at least two palettes")
    common = palettes[0].ids()
    for p in palettes[1:]:
        common &= p.ids()
    return common


@dataclass(frozen=True)
class RatingSummary:
    score: int
    count: int
    mean_pos: float
    mean_neu: float
    mean_neg: float
    mean_compound: float


def sentiment_by_rating(scored: Iterable[ScoredReview]) -> list[RatingSummary]:
    """Mean sentiment components per star score; empty scores are omitted."""
    buckets: dict[int, list[ScoredReview]] = {}
    for r in scored:
        buckets.setdefault(r.score, []).append(r)
    out: list[RatingSummary] = []
    for score in sorted(buckets):
        rows = buckets[score]
        n = len(rows)
        out.append(
            RatingSummary(
                score=score,
                count=n,
                mean_pos=math.fsum(r.sentiment.pos for r in rows) / n,
                mean_neu=math.fsum(r.sentiment.neu for r in rows) / n,
                mean_neg=math.fsum(r.sentiment.neg for r in rows) / n,
                mean_compound=math.fsum(r.sentiment.compound for r in rows) / n,
            )
        )
    return out
