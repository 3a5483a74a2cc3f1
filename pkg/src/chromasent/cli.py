"""Command-line pipeline: palette extraction, review analysis, association,
and report emission.

Subcommands: ``palette``, ``analyze``, ``associate``, ``report``,
``pipeline``. Exit codes: 0 success, 1 partial (some inputs skipped),
2 fatal configuration error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from . import associate as assoc
from . import reports
from .colors import ColorModel, default_color_model, load_color_model
from .emotion import (
    Emotion,
    EmotionScores,
    LEADING_TIE_ORDER,
    default_emotion_lexicon,
    fuzzify_power,
    leading_emotion,
    linguistic_label,
    load_emotion_lexicon,
    mean_emotions,
    score_emotions,
)
from .errors import ChromasentError, ConfigError
from .ingest import Company, load_companies, load_reviews
from .palette import MappedEntry, MappedPalette, kmeans_cluster, load_pixels, map_palette
from .sentiment import (
    SentimentLabel,
    SentimentScores,
    classify,
    default_sentiment_lexicon,
    load_sentiment_lexicon,
    score_text,
)
from .store import RecordStore

__all__ = ["RunConfig", "cmd_palette", "cmd_analyze", "cmd_associate", "cmd_report",
           "cmd_pipeline", "main"]

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_FATAL = 2

STAGE_PALETTES = "palettes"
STAGE_PALETTE_SKIPS = "palette_skips"
STAGE_REVIEW_SCORES = "review_scores"
STAGE_COMPANY_SCORES = "company_scores"
STAGE_ANALYZE_SKIPS = "analyze_skips"
STAGE_PROFILES = "profiles"
STAGE_GROUPS = "groups"
STAGE_EMOTION_PALETTES = "emotion_palettes"
STAGE_SENTIMENT = "sentiment_summary"

REPORTS_SUBDIR = "reports"


@dataclass
class RunConfig:
    """Validated inputs and knobs for one pipeline run."""

    store: Path
    companies: Path | None = None
    reviews: Path | None = None
    logos: Path | None = None
    color_model: Path | None = None
    sentiment_lexicon: Path | None = None
    emotion_lexicon: Path | None = None
    k: int = 5
    seed: int = 42
    top_n: int = 10
    drop_background: bool = False
    classify_mode: str = "argmax"
    weighting: str = "equal"
    init: str = "weighted"
    jobs: int = field(default_factory=lambda: os.cpu_count() or 1)

    def load_model(self) -> ColorModel:
        return load_color_model(self.color_model) if self.color_model else default_color_model()


def _require_file(path: Path | None, what: str, flag: str) -> Path:
    if path is None:
        raise ConfigError(f"{what} is required; pass {flag}")
    if not path.is_file():
        raise ConfigError(f"{what} not found: {path}")
    return path


def _require_dir(path: Path | None, what: str, flag: str) -> Path:
    if path is None:
        raise ConfigError(f"{what} is required; pass {flag}")
    if not path.is_dir():
        raise ConfigError(f"{what} not found: {path}")
    return path


def validate_palette_inputs(cfg: RunConfig) -> None:
    _require_file(cfg.companies, "companies file", "--companies")
    _require_dir(cfg.logos, "logos directory", "--logos")
    if cfg.color_model is not None:
        _require_file(cfg.color_model, "color model file", "--color-model")
    if cfg.k < 1:
        raise ConfigError(f"--k must be >= 1, got {cfg.k}")


def validate_analyze_inputs(cfg: RunConfig) -> None:
    _require_file(cfg.companies, "companies file", "--companies")
    _require_file(cfg.reviews, "reviews file", "--reviews")
    if cfg.sentiment_lexicon is not None:
        _require_file(cfg.sentiment_lexicon, "sentiment lexicon", "--sentiment-lexicon")
    if cfg.emotion_lexicon is not None:
        _require_file(cfg.emotion_lexicon, "emotion lexicon", "--emotion-lexicon")


def _require_stage(store: RecordStore, stage: str, produced_by: str) -> None:
    if not store.has_stage(stage):
        raise ConfigError(
            f"stage {stage!r} missing from {store.root}; run `chromasent {produced_by}` first"
        )


def _logo_file(cfg: RunConfig, company: Company) -> Path:
    assert cfg.logos is not None
    if company.logo_path:
        p = Path(company.logo_path)
        return p if p.is_absolute() else cfg.logos / p
    matches = sorted(cfg.logos.glob(f"{company.id}.*"))
    if not matches:
        raise ConfigError(f"no logo file for company {company.id} in {cfg.logos}")
    return matches[0]


def cmd_palette(cfg: RunConfig) -> int:
    """Extract and map dominant colors for every company logo."""
    validate_palette_inputs(cfg)
    store = RecordStore(cfg.store)
    model = cfg.load_model()
    companies = load_companies(cfg.companies)

    def extract(company: Company):
        data = _logo_file(cfg, company).read_bytes()
        pixels = load_pixels(data, drop_background=cfg.drop_background)
        palette = kmeans_cluster(pixels, cfg.k, seed=cfg.seed, init=cfg.init)
        mapped = map_palette(palette, model)
        return {
            "company_id": company.id,
            "name": company.name,
            "palette": [
                {"rgb": list(e.centroid), "weight": e.weight} for e in palette.entries
            ],
            "mapped": [
                {"color_id": e.color_id, "weight": e.weight} for e in mapped.entries
            ],
        }

    results: dict[int, dict] = {}
    skips: dict[int, str] = {}
    with ThreadPoolExecutor(max_workers=max(1, cfg.jobs)) as pool:
        futures = {pool.submit(extract, c): c for c in companies}
        for future, company in futures.items():
            try:
                results[company.id] = future.result()
            except ChromasentError as exc:
                log.warning("skipping company %d (%s): %s", company.id, company.name, exc)
                skips[company.id] = str(exc)

    store.write_stage(
        STAGE_PALETTES, ((str(cid), results[cid]) for cid in sorted(results))
    )
    store.write_stage(
        STAGE_PALETTE_SKIPS,
        ((str(cid), {"company_id": cid, "error": skips[cid]}) for cid in sorted(skips)),
    )

    for cid in sorted(results):
        rec = results[cid]
        swatches = " ".join(
            f"{model.by_id(m['color_id']).rgb.hex} {m['weight'] * 100:.1f}%"
            for m in rec["mapped"]
        )
        print(f"company {cid} ({rec['name']}): {swatches}")
    print(f"palette: {len(results)} extracted, {len(skips)} skipped")
    return EXIT_PARTIAL if skips else EXIT_OK


def cmd_analyze(cfg: RunConfig) -> int:
    """Score every review for sentiment and emotions."""
    validate_analyze_inputs(cfg)
    store = RecordStore(cfg.store)
    slex = (
        load_sentiment_lexicon(cfg.sentiment_lexicon)
        if cfg.sentiment_lexicon
        else default_sentiment_lexicon()
    )
    elex = (
        load_emotion_lexicon(cfg.emotion_lexicon)
        if cfg.emotion_lexicon
        else default_emotion_lexicon()
    )
    companies = load_companies(cfg.companies)

    skipped: list[str] = []
    rows: list[dict] = []
    for review in load_reviews(cfg.reviews, companies, errors="skip", report=skipped):
        s = score_text(review.text, slex)
        e = score_emotions(review.text, elex)
        rows.append(
            {
                "review_id": review.id,
                "company_id": review.company_id,
                "score": review.score,
                "pos": s.pos,
                "neu": s.neu,
                "neg": s.neg,
                "compound": s.compound,
                "label": classify(s, cfg.classify_mode).value,
                "emotions": e.as_dict(),
            }
        )
    rows.sort(key=lambda r: r["review_id"])
    store.write_stage(STAGE_REVIEW_SCORES, ((str(r["review_id"]), r) for r in rows))

    by_company: dict[int, list[dict]] = {}
    for r in rows:
        by_company.setdefault(r["company_id"], []).append(r)
    company_rows = []
    for cid in sorted(by_company):
        crows = by_company[cid]
        means = mean_emotions([EmotionScores(**_emotion_kwargs(r["emotions"])) for r in crows])
        leading = leading_emotion(means)
        power = linguistic_label(fuzzify_power(means.get(leading))) if leading else None
        tally = {label.value: 0 for label in SentimentLabel}
        for r in crows:
            tally[r["label"]] += 1
        company_rows.append(
            (
                str(cid),
                {
                    "company_id": cid,
                    "mean_emotions": means.as_dict(),
                    "leading": leading.value if leading else None,
                    "power_label": power,
                    "sentiment_tally": tally,
                    "review_count": len(crows),
                },
            )
        )
    store.write_stage(STAGE_COMPANY_SCORES, company_rows)
    store.write_stage(
        STAGE_ANALYZE_SKIPS,
        ((str(i), {"error": msg}) for i, msg in enumerate(skipped)),
    )

    if not rows:
        log.warning("no reviews scored from %s", cfg.reviews)
    print(f"analyze: {len(rows)} reviews scored, {len(skipped)} rows skipped")
    return EXIT_PARTIAL if skipped else EXIT_OK


def _emotion_kwargs(d: dict) -> dict:
    return {
        "happy": d["Happy"],
        "angry": d["Angry"],
        "sad": d["Sad"],
        "surprise": d["Surprise"],
        "fear": d["Fear"],
    }


def _scored_reviews_from_stage(store: RecordStore) -> list[assoc.ScoredReview]:
    out = []
    for payload in store.latest(STAGE_REVIEW_SCORES).values():
        out.append(
            assoc.ScoredReview(
                review_id=payload["review_id"],
                company_id=payload["company_id"],
                score=payload["score"],
                sentiment=SentimentScores(
                    pos=payload["pos"], neu=payload["neu"],
                    neg=payload["neg"], compound=payload["compound"],
                ),
                sentiment_label=SentimentLabel(payload["label"]),
                emotions=EmotionScores(**_emotion_kwargs(payload["emotions"])),
            )
        )
    out.sort(key=lambda r: r.review_id)
    return out


def cmd_associate(cfg: RunConfig) -> int:
    """Join palettes with scored reviews and aggregate per emotion."""
    store = RecordStore(cfg.store, create=False)
    _require_stage(store, STAGE_PALETTES, "palette")
    _require_stage(store, STAGE_REVIEW_SCORES, "analyze")

    palette_payloads = store.latest(STAGE_PALETTES)
    scored = _scored_reviews_from_stage(store)
    by_company: dict[int, list[assoc.ScoredReview]] = {}
    for r in scored:
        by_company.setdefault(r.company_id, []).append(r)

    profiles: list[assoc.CompanyProfile] = []
    for key in sorted(palette_payloads, key=int):
        payload = palette_payloads[key]
        cid = payload["company_id"]
        mapped = MappedPalette(
            entries=[MappedEntry(m["color_id"], m["weight"]) for m in payload["mapped"]]
        )
        company = Company(id=cid, name=payload["name"], category="", logo_path="")
        profiles.append(assoc.build_profile(company, by_company.get(cid, []), mapped))

    orphans = sorted(set(by_company) - {p.company_id for p in profiles})
    if orphans:
        log.warning("reviews reference companies without palettes: %s", orphans)

    store.write_stage(
        STAGE_PROFILES,
        (
            (
                str(p.company_id),
                {
                    "company_id": p.company_id,
                    "name": p.name,
                    "mapped": [
                        {"color_id": e.color_id, "weight": e.weight}
                        for e in p.mapped_palette.entries
                    ],
                    "mean_emotions": p.mean_emotions.as_dict(),
                    "leading": p.leading.value if p.leading else None,
                    "power_label": p.power_label,
                    "sentiment_tally": {k.value: v for k, v in p.sentiment_tally.items()},
                    "review_count": p.review_count,
                    "included": p.included,
                },
            )
            for p in profiles
        ),
    )

    groups = assoc.group_by_emotion(profiles)
    store.write_stage(
        STAGE_GROUPS,
        (
            (emotion.value, {"emotion": emotion.value,
                             "company_ids": [p.company_id for p in members]})
            for emotion, members in groups.items()
        ),
    )

    palettes = []
    for emotion in LEADING_TIE_ORDER:
        members = groups.get(emotion)
        if not members:
            log.warning("emotion group %s is empty; no palette", emotion.value)
            continue
        palettes.append(assoc.aggregate_palette(emotion, members, cfg.top_n, cfg.weighting))
    store.write_stage(
        STAGE_EMOTION_PALETTES,
        (
            (
                p.emotion.value,
                {
                    "emotion": p.emotion.value,
                    "companies": p.companies,
                    "entries": [[cid, w] for cid, w in p.entries],
                },
            )
            for p in palettes
        ),
    )

    tally = {label.value: 0 for label in SentimentLabel}
    for r in scored:
        tally[r.sentiment_label.value] += 1
    summary_rows: list[tuple[str, dict]] = [("distribution", tally)]
    for row in assoc.sentiment_by_rating(scored):
        summary_rows.append(
            (
                f"rating:{row.score}",
                {
                    "score": row.score,
                    "count": row.count,
                    "mean_pos": row.mean_pos,
                    "mean_neu": row.mean_neu,
                    "mean_neg": row.mean_neg,
                    "mean_compound": row.mean_compound,
                },
            )
        )
    store.write_stage(STAGE_SENTIMENT, summary_rows)

    print(
        f"associate: {len(profiles)} profiles, "
        f"{sum(len(m) for m in groups.values())} grouped, "
        f"{len(palettes)} emotion palettes"
    )
    return EXIT_OK


def cmd_report(cfg: RunConfig) -> int:
    """Emit the CSV tables and SVG graphics from the associated stages."""
    store = RecordStore(cfg.store, create=False)
    for stage in (STAGE_PROFILES, STAGE_EMOTION_PALETTES, STAGE_SENTIMENT):
        _require_stage(store, stage, "associate")
    model = cfg.load_model()

    profile_payloads = store.latest(STAGE_PROFILES)
    emotion_counts: dict[Emotion, int] = {e: 0 for e in LEADING_TIE_ORDER}
    for payload in profile_payloads.values():
        if payload["leading"]:
            emotion_counts[Emotion(payload["leading"])] += 1

    palettes = []
    palette_payloads = store.latest(STAGE_EMOTION_PALETTES)
    for emotion in LEADING_TIE_ORDER:
        payload = palette_payloads.get(emotion.value)
        if payload:
            palettes.append(
                assoc.EmotionPalette(
                    emotion=emotion,
                    entries=[(int(cid), float(w)) for cid, w in payload["entries"]],
                    companies=payload["companies"],
                )
            )

    if len(palettes) >= 2:
        common = assoc.common_colors(palettes)
    else:
        log.warning("fewer than two emotion palettes; common-color table is empty")
        common = set()

    summary = store.latest(STAGE_SENTIMENT)
    tally = {
        SentimentLabel(name): count
        for name, count in summary.get("distribution", {}).items()
    }
    rating_rows = []
    for key in sorted(k for k in summary if k.startswith("rating:")):
        p = summary[key]
        rating_rows.append(
            assoc.RatingSummary(
                score=p["score"], count=p["count"], mean_pos=p["mean_pos"],
                mean_neu=p["mean_neu"], mean_neg=p["mean_neg"],
                mean_compound=p["mean_compound"],
            )
        )

    outdir = cfg.store / REPORTS_SUBDIR
    written = reports.generate_reports(
        outdir, tally, emotion_counts, palettes, rating_rows, common, model
    )
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def cmd_pipeline(cfg: RunConfig) -> int:
    """Run palette, analyze, associate and report in order."""
    # every referenced path is checked before any stage does work
    validate_palette_inputs(cfg)
    validate_analyze_inputs(cfg)
    code = EXIT_OK
    code = max(code, cmd_palette(cfg))
    code = max(code, cmd_analyze(cfg))
    code = max(code, cmd_associate(cfg))
    code = max(code, cmd_report(cfg))
    return code


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chromasent",
        description="Brand-logo palettes, review emotions, and their association.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--store", type=Path, required=True, help="pipeline store directory")
    common.add_argument("--companies", type=Path, help="companies CSV file")
    common.add_argument("--reviews", type=Path, help="reviews CSV file")
    common.add_argument("--logos", type=Path, help="directory of logo images")
    common.add_argument("--color-model", type=Path, help="color model CSV (default: bundled 43 colors)")
    common.add_argument("--sentiment-lexicon", type=Path, help="token<TAB>valence lexicon file")
    common.add_argument("--emotion-lexicon", type=Path, help="token<TAB>emotion lexicon file")
    common.add_argument("--k", type=int, default=5, help="clusters per logo (default 5)")
    common.add_argument("--seed", type=int, default=42, help="clustering seed (default 42)")
    common.add_argument("--top-n", type=int, default=10, help="colors kept per emotion (default 10)")
    common.add_argument("--drop-background", action="store_true",
                        help="drop pixels close to the dominant border color")
    common.add_argument("--classify-mode", choices=("argmax", "compound"), default="argmax",
                        help="leading-sentiment rule (default argmax)")
    common.add_argument("--weighting", choices=("equal", "power"), default="equal",
                        help="company weighting in palette aggregation (default equal)")
    common.add_argument("--init", choices=("weighted", "uniform"), default="weighted",
                        help="k-means seeding strategy (default distance-weighted)")
    common.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                        help="worker threads for per-company stages")

    sub = parser.add_subparsers(dest="command", required=True)
    for name, handler, doc in (
        ("palette", cmd_palette, "extract dominant colors from logos"),
        ("analyze", cmd_analyze, "score reviews for sentiment and emotions"),
        ("associate", cmd_associate, "join palettes with emotions and aggregate"),
        ("report", cmd_report, "emit CSV tables and SVG graphics"),
        ("pipeline", cmd_pipeline, "run all stages in order"),
    ):
        p = sub.add_parser(name, parents=[common], help=doc)
        p.set_defaults(handler=handler)
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        store=args.store,
        companies=args.companies,
        reviews=args.reviews,
        logos=args.logos,
        color_model=args.color_model,
        sentiment_lexicon=args.sentiment_lexicon,
        emotion_lexicon=args.emotion_lexicon,
        k=args.k,
        seed=args.seed,
        top_n=args.top_n,
        drop_background=args.drop_background,
        classify_mode=args.classify_mode,
        weighting=args.weighting,
        init=args.init,
        jobs=args.jobs,
    )


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = _build_parser().parse_args(argv)
    cfg = _config_from_args(args)
    try:
        return args.handler(cfg)
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_FATAL
    except ChromasentError as exc:
        log.error("fatal: %s", exc)
        return EXIT_FATAL


if __name__ == "__main__":
    sys.exit(main())
