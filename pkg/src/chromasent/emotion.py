"""Five-emotion lexicon scoring, fuzzy intensity levels, and per-company
emotion aggregation."""

from __future__ import annotations

import enum
import functools
import logging
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

from .errors import IngestError, InputError
from .sentiment import tokenize

__all__ = [
    "Emotion",
    "LEADING_TIE_ORDER",
    "EmotionLexicon",
    "EmotionScores",
    "POWER_TERMS",
    "score_emotions",
    "fuzzify_power",
    "linguistic_label",
    "mean_emotions",
    "leading_emotion",
    "load_emotion_lexicon",
    "default_emotion_lexicon",
]

log = logging.getLogger(__name__)


class Emotion(enum.Enum):
    HAPPY = "Happy"
    ANGRY = "Angry"
    SAD = "Sad"
    SURPRISE = "Surprise"
    FEAR = "Fear"


# argmax ties resolve to the earliest entry here
LEADING_TIE_ORDER: tuple[Emotion, ...] = (
    Emotion.HAPPY,
    Emotion.FEAR,
    Emotion.SAD,
    Emotion.SURPRISE,
    Emotion.ANGRY,
)

EmotionLexicon = Mapping[str, Emotion]

# intensity terms of the "emotion power" linguistic variable, weakest first
# ("Weak" is sometimes called "Low"; this package uses "Weak" throughout)
POWER_TERMS: tuple[str, ...] = ("Weak", "Medium", "Strong", "Very Strong")


@dataclass(frozen=True)
class EmotionScores:
    """Normalized per-emotion shares: all zero, or summing to 1."""

    happy: float = 0.0
    angry: float = 0.0
    sad: float = 0.0
    surprise: float = 0.0
    fear: float = 0.0

    _FIELDS = {
        Emotion.HAPPY: "happy",
        Emotion.ANGRY: "angry",
        Emotion.SAD: "sad",
        Emotion.SURPRISE: "surprise",
        Emotion.FEAR: "fear",
    }

    def get(self, emotion: Emotion) -> float:
        return getattr(self, self._FIELDS[emotion])

    def as_dict(self) -> dict[str, float]:
        return {e.value: self.get(e) for e in Emotion}

    def is_zero(self) -> bool:
        return all(self.get(e) == 0.0 for e in Emotion)


def score_emotions(text: str, lex: EmotionLexicon) -> EmotionScores:
    """Share of each emotion among the text's emotion-bearing tokens.

    Tokenization matches the sentiment scorer. All five scores are zero when
    no token is in the lexicon.
    """
    counts = {e: 0 for e in Emotion}
    for tok in tokenize(text):
        emo = lex.get(tok.lower())
        if emo is not None:
            counts[emo] += 1
    total = sum(counts.values())
    if total == 0:
        return EmotionScores()
    return EmotionScores(
        happy=counts[Emotion.HAPPY] / total,
        angry=counts[Emotion.ANGRY] / total,
        sad=counts[Emotion.SAD] / total,
        surprise=counts[Emotion.SURPRISE] / total,
        fear=counts[Emotion.FEAR] / total,
    )


def fuzzify_power(x: float) -> dict[str, float]:
    """Triangular memberships of an intensity in [0, 1] over the four
    power terms.

    Knots sit at 0, 1/3, 2/3 and 1, so the memberships always sum to 1 and
    neighboring terms overlap linearly. Out-of-range inputs are clamped
    (and logged); non-finite inputs are rejected.
    """
    if not math.isfinite(x):
        raise InputError(f"emotion power must be finite, got {x!r}")
    if x < 0.0 or x > 1.0:
        log.warning("emotion power %r outside [0, 1]; clamping", x)
        x = min(1.0, max(0.0, x))
    t = 3.0 * x  # knots land on integers, keeping anchor points exact
    if t <= 1.0:
        memberships = (1.0 - t, t, 0.0, 0.0)
    elif t <= 2.0:
        memberships = (0.0, 2.0 - t, t - 1.0, 0.0)
    else:
        memberships = (0.0, 0.0, 3.0 - t, t - 2.0)
    return dict(zip(POWER_TERMS, memberships))


def linguistic_label(m: Mapping[str, float]) -> str:
    """Term with the highest membership; ties go to the stronger term."""
    best = POWER_TERMS[0]
    best_v = -math.inf
    for term in POWER_TERMS:
        v = m[term]
        if v >= best_v:
            best, best_v = term, v
    return best


def mean_emotions(scores: Sequence[EmotionScores]) -> EmotionScores:
    """Component-wise mean over the inputs that carry any emotion signal.

    All-zero inputs are excluded; if every input is all-zero the result is
    all-zero too. An empty list is an error.
    """
    if not scores:
        raise InputError("mean_emotions requires at least one input")
    active = [s for s in scores if not s.is_zero()]
    if not active:
        return EmotionScores()
    n = len(active)
    return EmotionScores(
        happy=math.fsum(s.happy for s in active) / n,
        angry=math.fsum(s.angry for s in active) / n,
        sad=math.fsum(s.sad for s in active) / n,
        surprise=math.fsum(s.surprise for s in active) / n,
        fear=math.fsum(s.fear for s in active) / n,
    )


def leading_emotion(m: EmotionScores) -> Emotion | None:
    """Argmax emotion, or None when all five scores are zero.

    Ties break by the fixed priority Happy, Fear, Sad, Surprise, Angry.
    """
    if m.is_zero():
        return None
    best = None
    best_v = -math.inf
    for emotion in LEADING_TIE_ORDER:
        v = m.get(emotion)
        if v > best_v:
            best, best_v = emotion, v
    return best


def load_emotion_lexicon(path: str | Path) -> dict[str, Emotion]:
    """Load ``token<TAB>emotion`` lines; ``#`` comments and blanks ignored."""
    path = Path(path)
    if not path.is_file():
        raise IngestError(f"emotion lexicon not found: {path}")
    lex: dict[str, Emotion] = {}
    by_name = {e.value.lower(): e for e in Emotion}
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise IngestError("expected token<TAB>emotion", line=lineno)
            token = parts[0].strip().lower()
            emo = by_name.get(parts[1].strip().lower())
            if emo is None:
                raise IngestError(f"unknown emotion {parts[1]!r}", line=lineno)
            if token in lex:
                raise IngestError(f"duplicate token {token!r}", line=lineno)
            lex[token] = emo
    return lex


@functools.lru_cache(maxsize=1)
def default_emotion_lexicon() -> dict[str, Emotion]:
    with resources.as_file(resources.files("chromasent") / "data" / "emotion_lexicon.tsv") as p:
        return load_emotion_lexicon(p)
