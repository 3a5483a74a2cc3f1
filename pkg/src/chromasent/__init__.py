"""chromasent: brand-logo color palettes, review sentiment and emotions, and
ranked emotion-to-palette associations."""

__version__ = "0.1.0"

from .colors import (
    ColorModel,
    LabColor,
    NamedColor,
    RgbColor,
    ciede2000,
    default_color_model,
    load_color_model,
    nearest_model_color,
    rgb_distance,
    srgb_to_lab,
)
from .emotion import (
    Emotion,
    EmotionScores,
    fuzzify_power,
    leading_emotion,
    linguistic_label,
    mean_emotions,
    score_emotions,
)
from .palette import (
    MappedPalette,
    Palette,
    PixelSet,
    kmeans_cluster,
    kmeans_init,
    load_pixels,
    map_palette,
    run_kmeans,
)
from .sentiment import SentimentLabel, SentimentScores, classify, score_text

__all__ = [
    "__version__",
    "RgbColor",
    "LabColor",
    "NamedColor",
    "ColorModel",
    "srgb_to_lab",
    "ciede2000",
    "rgb_distance",
    "nearest_model_color",
    "load_color_model",
    "default_color_model",
    "PixelSet",
    "Palette",
    "MappedPalette",
    "load_pixels",
    "kmeans_init",
    "kmeans_cluster",
    "run_kmeans",
    "map_palette",
    "SentimentScores",
    "SentimentLabel",
    "score_text",
    "classify",
    "Emotion",
    "EmotionScores",
    "score_emotions",
    "fuzzify_power",
    "linguistic_label",
    "mean_emotions",
    "leading_emotion",
]
