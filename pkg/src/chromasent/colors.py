"""Color representations, sRGB to CIELAB conversion, color-difference metrics,
and the named-color model used to label extracted palette entries.

The perceptual metric is CIEDE2000, computed from CIELAB coordinates obtained
via the standard sRGB (D65, 2 degree observer) conversion. The plain RGB
metric is the Euclidean distance used by the palette clusterer.
"""

from __future__ import annotations

import csv
import functools
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable

from .errors import ConfigError, IngestError, InputError

__all__ = [
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
]


@dataclass(frozen=True)
class RgbColor:
    """An 8-bit sRGB color; every channel must lie in 0..255."""

    r: int
    g: int
    b: int

    def __post_init__(self):
        for name in ("r", "g", "b"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or not 0 <= v <= 255:
                raise InputError(f"channel {name}={v!r} outside 0..255")

    @property
    def hex(self) -> str:
        return f"#{self.r:02x}{self.g:02x}{self.b:02x}"

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.r, self.g, self.b)


@dataclass(frozen=True)
class LabColor:
    """CIELAB coordinates: L in [0, 100], a/b finite opponent axes."""

    L: float
    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.L) and math.isfinite(self.a) and math.isfinite(self.b)):
            raise InputError("Lab components must be finite")
        if not -1e-9 <= self.L <= 100.0 + 1e-9:
            raise InputError(f"L={self.L!r} outside [0, 100]")


@dataclass(frozen=True)
class NamedColor:
    id: int
    name: str
    rgb: RgbColor

    def __post_init__(self):
        if self.id < 0:
            raise InputError(f"color id must be non-negative, got {self.id}")


class ColorModel:
    """An ordered set of named reference colors with unique ids.

    The default model has 43 entries; arbitrary models can be loaded from a
    ``id,name,r,g,b`` CSV file (see :func:`load_color_model`).
    """

    def __init__(self, colors: Iterable[NamedColor]):
        self.colors: tuple[NamedColor, ...] = tuple(colors)
        if not self.colors:
            raise ConfigError("color model must not be empty")
        ids = [c.id for c in self.colors]
        if len(set(ids)) != len(ids):
            raise ConfigError("color model ids must be unique")
        self._by_id = {c.id: c for c in self.colors}
        self._labs: tuple[LabColor, ...] | None = None

    def __len__(self) -> int:
        return len(self.colors)

    def __iter__(self):
        return iter(self.colors)

    def by_id(self, color_id: int) -> NamedColor:
        try:
            return self._by_id[color_id]
        except KeyError:
            raise ConfigError(f"color id {color_id} not in model") from None

    @property
    def labs(self) -> tuple[LabColor, ...]:
        # computed lazily; the model is immutable after construction
        if self._labs is None:
            self._labs = tuple(srgb_to_lab(c.rgb) for c in self.colors)
        return self._labs


# IEC 61966-2-1 sRGB matrix. The white point is taken as the exact row sums so
# that (255,255,255) maps to L*=100, a*=b*=0 without residue.
_SRGB_TO_XYZ = (
    (0.4124564, 0.3575761, 0.1804375),
    (0.2126729, 0.7151522, 0.0721750),
    (0.0193339, 0.1191920, 0.9503041),
)
_WHITE = tuple(sum(row) for row in _SRGB_TO_XYZ)  # D65, 2 degree observer
_LAB_EPS = 216.0 / 24389.0
_LAB_KAPPA = 24389.0 / 27.0


def _srgb_linear(c: int) -> float:
    v = c / 255.0
    return v / 12.92 if v <= 0.04045 else ((v + 0.055) / 1.055) ** 2.4


def _lab_f(t: float) -> float:
    return t ** (1.0 / 3.0) if t > _LAB_EPS else (_LAB_KAPPA * t + 16.0) / 116.0


def srgb_to_lab(c: RgbColor) -> LabColor:
    """Convert an 8-bit sRGB color to CIELAB (D65 white, 2 degree observer).

    Chain: gamma expansion, linear RGB -> XYZ, XYZ -> Lab.
    """
    rl, gl, bl = _srgb_linear(c.r), _srgb_linear(c.g), _srgb_linear(c.b)
    fx, fy, fz = (
        _lab_f((m[0] * rl + m[1] * gl + m[2] * bl) / w)
        for m, w in zip(_SRGB_TO_XYZ, _WHITE)
    )
    return LabColor(116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz))


def ciede2000(x: LabColor, y: LabColor, kl: float = 1.0, kc: float = 1.0, kh: float = 1.0) -> float:
    """CIEDE2000 color difference between two Lab colors.

    Combines lightness, chroma and hue differences with their scaling
    functions S_L, S_C, S_H and the blue-region rotation term R_T:

        dE00 = sqrt((dL'/kL SL)^2 + (dC'/kC SC)^2 + (dH'/kH SH)^2
                    + RT (dC'/kC SC)(dH'/kH SH))

    Includes the a'-rescaling of near-neutral colors, the mean-hue rules, and
    the degenerate convention h' = 0, dH' = 0 when either chroma vanishes.
    Symmetric in its arguments; weighting factors default to 1.
    """
    if kl <= 0 or kc <= 0 or kh <= 0:
        raise InputError("weighting factors kL, kC, kH must be > 0")

    c1 = math.hypot(x.a, x.b)
    c2 = math.hypot(y.a, y.b)
    c_mean = 0.5 * (c1 + c2)
    c7 = c_mean ** 7
    g = 0.5 * (1.0 - math.sqrt(c7 / (c7 + 25.0 ** 7)))
    a1p = (1.0 + g) * x.a
    a2p = (1.0 + g) * y.a
    c1p = math.hypot(a1p, x.b)
    c2p = math.hypot(a2p, y.b)

    h1p = 0.0 if (a1p == 0.0 and x.b == 0.0) else math.degrees(math.atan2(x.b, a1p)) % 360.0
    h2p = 0.0 if (a2p == 0.0 and y.b == 0.0) else math.degrees(math.atan2(y.b, a2p)) % 360.0

    dlp = y.L - x.L
    dcp = c2p - c1p
    if c1p * c2p == 0.0:
        dhp = 0.0
    else:
        dhp = h2p - h1p
        if dhp > 180.0:
            dhp -= 360.0
        elif dhp < -180.0:
            dhp += 360.0
    dl_hue = 2.0 * math.sqrt(c1p * c2p) * math.sin(math.radians(dhp) / 2.0)

    lp_mean = 0.5 * (x.L + y.L)
    cp_mean = 0.5 * (c1p + c2p)
    if c1p * c2p == 0.0:
        hp_mean = h1p + h2p
    elif abs(h1p - h2p) <= 180.0:
        hp_mean = 0.5 * (h1p + h2p)
    elif h1p + h2p < 360.0:
        hp_mean = 0.5 * (h1p + h2p + 360.0)
    else:
        hp_mean = 0.5 * (h1p + h2p - 360.0)

    t = (
        1.0
        - 0.17 * math.cos(math.radians(hp_mean - 30.0))
        + 0.24 * math.cos(math.radians(2.0 * hp_mean))
        + 0.32 * math.cos(math.radians(3.0 * hp_mean + 6.0))
        - 0.20 * math.cos(math.radians(4.0 * hp_mean - 63.0))
    )
    dtheta = 30.0 * math.exp(-(((hp_mean - 275.0) / 25.0) ** 2))
    cp7 = cp_mean ** 7
    rc = 2.0 * math.sqrt(cp7 / (cp7 + 25.0 ** 7))
    rt = -math.sin(math.radians(2.0 * dtheta)) * rc

    lm = (lp_mean - 50.0) ** 2
    sl = 1.0 + 0.015 * lm / math.sqrt(20.0 + lm)
    sc = 1.0 + 0.045 * cp_mean
    sh = 1.0 + 0.015 * cp_mean * t

    fl = dlp / (kl * sl)
    fc = dcp / (kc * sc)
    fh = dl_hue / (kh * sh)
    return math.sqrt(fl * fl + fc * fc + fh * fh + rt * fc * fh)


def rgb_distance(c1: RgbColor, c2: RgbColor) -> float:
    """Euclidean distance between two RGB colors."""
    return math.hypot(c2.r - c1.r, c2.g - c1.g, c2.b - c1.b)


def nearest_model_color(c: RgbColor, model: ColorModel) -> int:
    """Id of the model color perceptually closest to ``c``.

    Closeness is CIEDE2000 in Lab space; ties break to the lowest id.
    """
    lab = srgb_to_lab(c)
    best_id = None
    best_d = math.inf
    for named, named_lab in zip(model.colors, model.labs):
        d = ciede2000(lab, named_lab)
        if d < best_d or (d == best_d and (best_id is None or named.id < best_id)):
            best_d = d
            best_id = named.id
    assert best_id is not None  # model is non-empty by construction
    return best_id


_MODEL_HEADER = ["id", "name", "r", "g", "b"]


def load_color_model(path: str | Path) -> ColorModel:
    """Load a color model from a ``id,name,r,g,b`` CSV file (header required)."""
    path = Path(path)
    if not path.is_file():
        raise IngestError(f"color model file not found: {path}")
    colors: list[NamedColor] = []
    seen: set[int] = set()
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header] != _MODEL_HEADER:
            raise IngestError(f"expected header {','.join(_MODEL_HEADER)!r} in {path}", line=1)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 5:
                raise IngestError(f"expected 5 fields, got {len(row)}", line=lineno)
            try:
                cid = int(row[0])
                rgb = RgbColor(int(row[2]), int(row[3]), int(row[4]))
            except (ValueError, InputError) as exc:
                raise IngestError(f"bad color row: {exc}", line=lineno) from exc
            if cid in seen:
                raise IngestError(f"duplicate color id {cid}", line=lineno)
            seen.add(cid)
            colors.append(NamedColor(cid, row[1].strip(), rgb))
    return ColorModel(colors)


@functools.lru_cache(maxsize=1)
def default_color_model() -> ColorModel:
    """The bundled 43-entry model.

    Sixteen entries carry canonical RGB values; the remainder are standard
    web-palette colors chosen to cover the saturation/brightness range and
    are documented as replaceable via ``--color-model``.
    """
    with resources.as_file(resources.files("chromasent") / "data" / "color_model.csv") as p:
        return load_color_model(p)
