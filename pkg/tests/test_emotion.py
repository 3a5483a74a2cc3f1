"""Emotion scoring, the fuzzy intensity variable, and aggregation."""

import math
import random

import pytest

from chromasent.emotion import (
    Emotion,
    EmotionScores,
    POWER_TERMS,
    default_emotion_lexicon,
    fuzzify_power,
    leading_emotion,
    linguistic_label,
    load_emotion_lexicon,
    mean_emotions,
    score_emotions,
)
from chromasent.errors import IngestError, InputError

WORD_POOL = [
    "the", "service", "street", "window", "happy", "joyful", "afraid",
    "terrified", "sad", "lonely", "surprised", "wow", "angry", "furious",
    "menu", "plate", "!!!", ":)",
]


@pytest.fixture(scope="module")
def lex():
    return default_emotion_lexicon()


class TestScoreEmotions:
    def test_all_happy_tokens(self, lex):
        s = score_emotions("happy happy so happy", lex)
        assert s.happy == 1.0
        assert s.is_zero() is False
        assert s.angry == s.sad == s.surprise == s.fear == 0.0

    def test_no_emotion_tokens(self, lex):
        assert score_emotions("the table and the chair", lex).is_zero()

    def test_two_happy_one_fear(self, lex):
        s = score_emotions("a happy place but a joyful crowd left me terrified", lex)
        assert s.happy == 2 / 3
        assert s.fear == 1 / 3
        assert s.angry == s.sad == s.surprise == 0.0

    def test_sum_to_one_or_zero(self, lex):
        rng = random.Random(41)
        for _ in range(500):
            text = " ".join(rng.choice(WORD_POOL) for _ in range(rng.randint(0, 12)))
            s = score_emotions(text, lex)
            total = math.fsum([s.happy, s.angry, s.sad, s.surprise, s.fear])
            assert s.is_zero() or abs(total - 1.0) < 1e-6

    def test_punctuation_stripped_like_sentiment(self, lex):
        assert score_emotions("Happy!", lex).happy == 1.0


class TestFuzzifyPower:
    def test_left_anchor(self):
        assert fuzzify_power(0.0) == {"Weak": 1.0, "Medium": 0.0, "Strong": 0.0, "Very Strong": 0.0}

    def test_knot_point(self):
        m = fuzzify_power(1 / 3)
        assert m["Medium"] == 1.0
        assert m["Weak"] == 0.0
        assert m["Strong"] == 0.0
        assert m["Very Strong"] == 0.0

    def test_midpoint_between_knots(self):
        m = fuzzify_power(0.5)
        assert m["Medium"] == 0.5
        assert m["Strong"] == 0.5
        assert m["Weak"] == 0.0
        assert m["Very Strong"] == 0.0

    def test_right_anchor(self):
        assert fuzzify_power(1.0)["Very Strong"] == 1.0

    def test_partition_of_unity(self):
        rng = random.Random(42)
        for _ in range(1000):
            m = fuzzify_power(rng.random())
            assert abs(math.fsum(m.values()) - 1.0) < 1e-9

    def test_memberships_within_unit_interval(self):
        rng = random.Random(43)
        for _ in range(1000):
            m = fuzzify_power(rng.random())
            assert all(0.0 <= v <= 1.0 for v in m.values())

    def test_piecewise_linear_segments(self):
        # constant slope within each inter-knot segment
        h = 1e-3
        for lo, hi in ((0.0, 1 / 3), (1 / 3, 2 / 3), (2 / 3, 1.0)):
            xs = [lo + h + i * h for i in range(int((hi - lo - 2 * h) / h))]
            for term in POWER_TERMS:
                diffs = [
                    fuzzify_power(x + h)[term] - fuzzify_power(x)[term] for x in xs
                ]
                assert max(diffs) - min(diffs) < 1e-9

    def test_out_of_range_clamped_with_warning(self, caplog):
        with caplog.at_level("WARNING"):
            m = fuzzify_power(1.5)
        assert m["Very Strong"] == 1.0
        assert "clamping" in caplog.text
        assert fuzzify_power(-0.25)["Weak"] == 1.0

    def test_non_finite_rejected(self):
        with pytest.raises(InputError):
            fuzzify_power(float("nan"))
        with pytest.raises(InputError):
            fuzzify_power(float("inf"))


class TestLinguisticLabel:
    def test_clear_argmax(self):
        assert linguistic_label({"Weak": 1.0, "Medium": 0.0, "Strong": 0.0, "Very Strong": 0.0}) == "Weak"

    def test_tie_goes_to_stronger_term(self):
        m = {"Weak": 0.0, "Medium": 0.5, "Strong": 0.5, "Very Strong": 0.0}
        assert linguistic_label(m) == "Strong"

    def test_high_intensity(self):
        assert linguistic_label(fuzzify_power(0.9)) == "Very Strong"


class TestMeanEmotions:
    def test_identical_inputs(self):
        s = EmotionScores(happy=1.0)
        assert mean_emotions([s, s]) == s

    def test_two_distinct(self):
        m = mean_emotions([EmotionScores(happy=1.0), EmotionScores(fear=1.0)])
        assert m.happy == 0.5
        assert m.fear == 0.5

    def test_all_zero_inputs_excluded(self):
        m = mean_emotions([EmotionScores(happy=1.0), EmotionScores()])
        assert m.happy == 1.0

    def test_every_input_zero(self):
        assert mean_emotions([EmotionScores(), EmotionScores()]).is_zero()

    def test_empty_list_rejected(self):
        with pytest.raises(InputError):
            mean_emotions([])

    def test_permutation_invariant(self):
        rng = random.Random(44)
        scores = []
        for _ in range(20):
            raw = [rng.random() for _ in range(5)]
            total = sum(raw)
            scores.append(EmotionScores(*(v / total for v in raw)))
        shuffled = scores[:]
        rng.shuffle(shuffled)
        assert mean_emotions(scores) == mean_emotions(shuffled)


class TestLeadingEmotion:
    def test_argmax(self):
        assert leading_emotion(EmotionScores(happy=0.6, fear=0.4)) is Emotion.HAPPY
        assert leading_emotion(EmotionScores(sad=0.9, happy=0.1)) is Emotion.SAD

    def test_all_zero_is_none(self):
        assert leading_emotion(EmotionScores()) is None

    def test_tie_order(self):
        assert leading_emotion(EmotionScores(happy=0.5, fear=0.5)) is Emotion.HAPPY
        assert leading_emotion(EmotionScores(fear=0.5, sad=0.5)) is Emotion.FEAR
        assert leading_emotion(EmotionScores(surprise=0.5, angry=0.5)) is Emotion.SURPRISE

    def test_scale_invariance(self):
        rng = random.Random(45)
        for _ in range(200):
            raw = [rng.random() for _ in range(5)]
            scale = rng.uniform(0.01, 50)
            a = leading_emotion(EmotionScores(*raw))
            b = leading_emotion(EmotionScores(*(v * scale for v in raw)))
            assert a is b


class TestLexiconLoader:
    def test_load(self, tmp_path):
        path = tmp_path / "emo.tsv"
        path.write_text("# c\nbeaming\tHappy\nspooked\tFear\n", encoding="utf-8")
        lex = load_emotion_lexicon(path)
        assert lex == {"beaming": Emotion.HAPPY, "spooked": Emotion.FEAR}

    def test_unknown_emotion_rejected(self, tmp_path):
        path = tmp_path / "emo.tsv"
        path.write_text("zest\tEnthusiasm\n", encoding="utf-8")
        with pytest.raises(IngestError, match="line 1"):
            load_emotion_lexicon(path)

    def test_duplicate_token_rejected(self, tmp_path):
        path = tmp_path / "emo.tsv"
        path.write_text("x\tHappy\nx\tSad\n", encoding="utf-8")
        with pytest.raises(IngestError, match="line 2"):
            load_emotion_lexicon(path)

    def test_default_lexicon(self):
        lex = default_emotion_lexicon()
        assert set(lex.values()) == set(Emotion)
        assert lex["happy"] is Emotion.HAPPY
