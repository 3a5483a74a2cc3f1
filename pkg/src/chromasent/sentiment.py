"""Lexicon and rule-based sentiment scoring of review text.

The scorer follows the published heuristics of the well-known social-media
sentiment tool this pipeline targets: token valences from a lexicon file,
adjusted for negation within a three-token window, degree boosters,
ALL-CAPS emphasis and terminal exclamation marks, then folded into a
normalized compound score plus positive/neutral/negative proportions.
"""

from __future__ import annotations

import enum
import functools
import math
import string
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping

from .errors import IngestError

__all__ = [
    "SentimentLexicon",
    "SentimentScores",
    "SentimentLabel",
    "BOOSTERS",
    "NEGATIONS",
    "tokenize",
    "score_text",
    "classify",
    "load_sentiment_lexicon",
    "default_sentiment_lexicon",
]

# Rule constants, verbatim from the reference tool.
BOOSTER_INCR = 0.293
BOOSTER_DECR = -0.293
CAPS_EMPHASIS = 0.733
NEGATION_DAMP = -0.74
EXCLAIM_BOOST = 0.292
MAX_EXCLAIM = 3
NORM_ALPHA = 15.0
# booster influence decays with distance from the scored token
BOOSTER_DISTANCE_SCALE = (1.0, 0.95, 0.9)

BOOSTERS: Mapping[str, float] = {
    "absolutely": BOOSTER_INCR,
    "amazingly": BOOSTER_INCR,
    "awfully": BOOSTER_INCR,
    "completely": BOOSTER_INCR,
    "considerably": BOOSTER_INCR,
    "decidedly": BOOSTER_INCR,
    "deeply": BOOSTER_INCR,
    "enormously": BOOSTER_INCR,
    "entirely": BOOSTER_INCR,
    "especially": BOOSTER_INCR,
    "exceptionally": BOOSTER_INCR,
    "extremely": BOOSTER_INCR,
    "fully": BOOSTER_INCR,
    "greatly": BOOSTER_INCR,
    "highly": BOOSTER_INCR,
    "hugely": BOOSTER_INCR,
    "incredibly": BOOSTER_INCR,
    "intensely": BOOSTER_INCR,
    "majorly": BOOSTER_INCR,
    "more": BOOSTER_INCR,
    "most": BOOSTER_INCR,
    "particularly": BOOSTER_INCR,
    "purely": BOOSTER_INCR,
    "quite": BOOSTER_INCR,
    "really": BOOSTER_INCR,
    "remarkably": BOOSTER_INCR,
    "so": BOOSTER_INCR,
    "substantially": BOOSTER_INCR,
    "thoroughly": BOOSTER_INCR,
    "totally": BOOSTER_INCR,
    "tremendously": BOOSTER_INCR,
    "truly": BOOSTER_INCR,
    "unbelievably": BOOSTER_INCR,
    "unusually": BOOSTER_INCR,
    "utterly": BOOSTER_INCR,
    "very": BOOSTER_INCR,
    "almost": BOOSTER_DECR,
    "barely": BOOSTER_DECR,
    "hardly": BOOSTER_DECR,
    "kind of": BOOSTER_DECR,
    "kinda": BOOSTER_DECR,
    "less": BOOSTER_DECR,
    "little": BOOSTER_DECR,
    "marginally": BOOSTER_DECR,
    "occasionally": BOOSTER_DECR,
    "partly": BOOSTER_DECR,
    "scarcely": BOOSTER_DECR,
    "slightly": BOOSTER_DECR,
    "somewhat": BOOSTER_DECR,
    "sort of": BOOSTER_DECR,
    "sorta": BOOSTER_DECR,
}

NEGATIONS: frozenset[str] = frozenset(
    {
        "aint",
        "ain't",
        "cannot",
        "cant",
        "can't",
        "darent",
        "daren't",
        "dont",
        "don't",
        "didnt",
        "didn't",
        "doesnt",
        "doesn't",
        "hardly",
        "hasnt",
        "hasn't",
        "havent",
        "haven't",
        "isnt",
        "isn't",
        "lack",
        "lacking",
        "lacks",
        "neither",
        "never",
        "no",
        "nobody",
        "none",
        "nope",
        "nor",
        "not",
        "nothing",
        "nowhere",
        "rarely",
        "seldom",
        "shouldnt",
        "shouldn't",
        "wasnt",
        "wasn't",
        "werent",
        "weren't",
        "without",
        "wont",
        "won't",
        "wouldnt",
        "wouldn't",
    }
)


@dataclass
class SentimentLexicon:
    """Token valences plus the booster and negation vocabularies."""

    valences: dict[str, float]
    boosters: Mapping[str, float] = field(default_factory=lambda: dict(BOOSTERS))
    negations: frozenset[str] = NEGATIONS


@dataclass(frozen=True)
class SentimentScores:
    pos: float
    neu: float
    neg: float
    compound: float

    @classmethod
    def zero(cls) -> "SentimentScores":
        return cls(0.0, 0.0, 0.0, 0.0)


class SentimentLabel(enum.Enum):
    POSITIVE = "Positive"
    NEUTRAL = "Neutral"
    NEGATIVE = "Negative"


def tokenize(text: str) -> list[str]:
    """Whitespace-split tokens with leading/trailing punctuation stripped.

    Tokens that are nothing but punctuation (emoticons like ``:)``) are kept
    verbatim. Case is preserved so ALL-CAPS emphasis stays detectable.
    """
    tokens = []
    for raw in text.split():
        stripped = raw.strip(string.punctuation)
        tokens.append(stripped if stripped else raw)
    return tokens


def _is_negation(token_lower: str, negations: frozenset[str]) -> bool:
    return token_lower in negations or token_lower.endswith("n't")


def _mixed_case(tokens: list[str]) -> bool:
    # emphasis only counts when the document mixes ALL-CAPS and normal words
    caps = [t.isupper() for t in tokens if t.upper() != t.lower()]
    return any(caps) and not all(caps) if caps else False


def _terminal_exclaims(text: str) -> int:
    tail = text.rstrip()
    count = len(tail) - len(tail.rstrip("!"))
    return min(count, MAX_EXCLAIM)


def score_text(text: str, lex: SentimentLexicon) -> SentimentScores:
    """Score a text, returning pos/neu/neg proportions and the compound.

    The compound is S / sqrt(S^2 + alpha) over the sum S of adjusted token
    valences, clamped to [-1, 1]; proportions normalize the positive,
    neutral and negative token masses. Empty (token-free) text scores zero
    everywhere.
    """
    tokens = tokenize(text)
    if not tokens:
        return SentimentScores.zero()

    cap_diff = _mixed_case(tokens)
    valences: list[float] = []
    for i, tok in enumerate(tokens):
        low = tok.lower()
        v = lex.valences.get(low)
        if v is None:
            valences.append(0.0)
            continue
        if tok.isupper() and cap_diff:
            v += CAPS_EMPHASIS if v > 0 else -CAPS_EMPHASIS
        for dist in (1, 2, 3):
            j = i - dist
            if j < 0:
                break
            prev = tokens[j]
            prev_low = prev.lower()
            if prev_low in lex.valences:
                continue
            boost = lex.boosters.get(prev_low, 0.0)
            if boost:
                s = boost if v > 0 else -boost
                if prev.isupper() and cap_diff:
                    s += CAPS_EMPHASIS if v > 0 else -CAPS_EMPHASIS
                v += s * BOOSTER_DISTANCE_SCALE[dist - 1]
            if _is_negation(prev_low, lex.negations):
                v *= NEGATION_DAMP
        valences.append(v)

    total_valence = math.fsum(valences)
    amp = _terminal_exclaims(text) * EXCLAIM_BOOST
    if total_valence > 0:
        total_valence += amp
    elif total_valence < 0:
        total_valence -= amp
    compound = total_valence / math.sqrt(total_valence * total_valence + NORM_ALPHA)
    compound = max(-1.0, min(1.0, compound))

    pos_sum = math.fsum(v + 1.0 for v in valences if v > 0)
    neg_sum = math.fsum(v - 1.0 for v in valences if v < 0)
    neu_count = float(sum(1 for v in valences if v == 0))
    if pos_sum > abs(neg_sum):
        pos_sum += amp
    elif pos_sum < abs(neg_sum):
        neg_sum -= amp
    total = pos_sum + abs(neg_sum) + neu_count
    return SentimentScores(
        pos=abs(pos_sum / total),
        neu=abs(neu_count / total),
        neg=abs(neg_sum / total),
        compound=compound,
    )


def classify(s: SentimentScores, mode: str = "argmax") -> SentimentLabel:
    """Leading sentiment of a scored text.

    ``argmax`` picks the largest of the pos/neu/neg proportions with ties
    resolved to Neutral; ``compound`` applies the +-0.05 thresholds to the
    compound score.
    """
    if mode == "argmax":
        if s.pos > s.neu and s.pos > s.neg:
            return SentimentLabel.POSITIVE
        if s.neg > s.neu and s.neg > s.pos:
            return SentimentLabel.NEGATIVE
        return SentimentLabel.NEUTRAL
    if mode == "compound":
        if s.compound >= 0.05:
            return SentimentLabel.POSITIVE
        if s.compound <= -0.05:
            return SentimentLabel.NEGATIVE
        return SentimentLabel.NEUTRAL
    raise ValueError(f"unknown classification mode: {mode!r}")


def load_sentiment_lexicon(path: str | Path) -> SentimentLexicon:
    """Load ``token<TAB>valence`` lines; ``#`` comments and blanks ignored."""
    path = Path(path)
    if not path.is_file():
        raise IngestError(f"sentiment lexicon not found: {path}")
    valences: dict[str, float] = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise IngestError("expected token<TAB>valence", line=lineno)
            token = parts[0].strip().lower()
            try:
                valence = float(parts[1])
            except ValueError as exc:
                raise IngestError(f"bad valence {parts[1]!r}", line=lineno) from exc
            if not math.isfinite(valence):
                raise IngestError(f"valence must be finite, got {parts[1]!r}", line=lineno)
            if token in valences:
                raise IngestError(f"duplicate token {token!r}", line=lineno)
            valences[token] = valence
    return SentimentLexicon(valences=valences)


@functools.lru_cache(maxsize=1)
def default_sentiment_lexicon() -> SentimentLexicon:
    with resources.as_file(resources.files("chromasent") / "data" / "sentiment_lexicon.tsv") as p:
        return load_sentiment_lexicon(p)
