"""Corpus ingestion: company and review file loaders, and the paginated,
rate-limited review-source client interface with a mock implementation.

File formats (CSV with a header row, UTF-8, quoted text fields):
  companies: ``id,name,category,logo_path``
  reviews:   ``id,company_name,category,score,text,time``
Timestamps are accepted as ``YYYY-MM-DD HH:MM:SS`` or ISO-8601 and stored as
datetimes.

The live review backend is not bundled (the pipeline is file-driven); the
``CHROMASENT_MAPS_KEY`` environment variable is reserved for plugging one in
via :func:`live_review_source`.
"""

from __future__ import annotations

import csv
import logging
import os
import threading
import time
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Callable, Iterator, Protocol, Sequence

from .errors import ConfigError, IngestError, PayloadError, SourceError, TransientSourceError

__all__ = [
    "Company",
    "Review",
    "ReviewSource",
    "MockReviewSource",
    "RateLimiter",
    "ThrottledSource",
    "FetchOutcome",
    "load_companies",
    "load_reviews",
    "fetch_reviews",
    "live_review_source",
]

log = logging.getLogger(__name__)

MAPS_KEY_ENV = "CHROMASENT_MAPS_KEY"

RETRY_BASE_DELAY = 1.0
RETRY_FACTOR = 2.0
RETRY_MAX_ATTEMPTS = 5


@dataclass(frozen=True)
class Company:
    id: int
    name: str
    category: str
    logo_path: str


@dataclass(frozen=True)
class Review:
    id: int
    company_name: str
    score: int
    text: str
    time: datetime
    company_id: int | None = None


_COMPANY_HEADER = ["id", "name", "category", "logo_path"]
_REVIEW_HEADER = ["id", "company_name", "category", "score", "text", "time"]


def _check_header(row: list[str] | None, expected: list[str], path: Path) -> None:
    if row is None or [h.strip().lower() for h in row] != expected:
        raise IngestError(f"expected header {','.join(expected)!r} in {path}", line=1)


def load_companies(path: str | Path) -> list[Company]:
    """Parse and validate a companies file; duplicate ids are rejected."""
    path = Path(path)
    if not path.is_file():
        raise IngestError(f"companies file not found: {path}")
    companies: list[Company] = []
    seen: set[int] = set()
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        _check_header(next(reader, None), _COMPANY_HEADER, path)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise IngestError(f"expected 4 fields, got {len(row)}", line=lineno)
            try:
                cid = int(row[0])
            except ValueError as exc:
                raise IngestError(f"bad company id {row[0]!r}", line=lineno) from exc
            if cid in seen:
                raise IngestError(f"duplicate company id {cid}", line=lineno)
            seen.add(cid)
            companies.append(Company(id=cid, name=row[1], category=row[2], logo_path=row[3]))
    if not companies:
        log.warning("companies file %s has no data rows", path)
    return companies


def _parse_time(value: str, lineno: int) -> datetime:
    try:
        return datetime.fromisoformat(value.strip())
    except ValueError as exc:
        raise IngestError(f"bad timestamp {value!r}", line=lineno) from exc


def load_reviews(
    path: str | Path,
    companies: Sequence[Company] | None = None,
    *,
    errors: str = "raise",
    report: list[str] | None = None,
) -> Iterator[Review]:
    """Stream reviews from a file one row at a time.

    When ``companies`` is given, each review is linked to a company id by
    name; unknown names and names shared by several companies are row
    errors (collisions are reported, not silently resolved). With
    ``errors="skip"`` bad rows are logged, appended to ``report`` and
    skipped instead of raising.
    """
    path = Path(path)
    if not path.is_file():
        raise IngestError(f"reviews file not found: {path}")
    if errors not in ("raise", "skip"):
        raise ValueError(f"errors must be 'raise' or 'skip', got {errors!r}")

    by_name: dict[str, int] | None = None
    ambiguous: set[str] = set()
    if companies is not None:
        by_name = {}
        for c in companies:
            if c.name in by_name:
                ambiguous.add(c.name)
            by_name[c.name] = c.id

    def handle(err: IngestError) -> None:
        if errors == "raise":
            raise err
        log.warning("skipping review row: %s", err)
        if report is not None:
            report.append(str(err))

    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        _check_header(next(reader, None), _REVIEW_HEADER, path)
        lineno = 1
        for row in reader:
            lineno = reader.line_num
            if not row:
                continue
            if len(row) != 6:
                handle(IngestError(f"expected 6 fields, got {len(row)}", line=lineno))
                continue
            try:
                rid = int(row[0])
                score = int(row[3])
            except ValueError:
                handle(IngestError(f"bad id or score in {row[:4]!r}", line=lineno))
                continue
            if score not in (1, 2, 3, 4, 5):
                handle(IngestError(f"score {score} outside 1..5", line=lineno))
                continue
            try:
                when = _parse_time(row[5], lineno)
            except IngestError as exc:
                handle(exc)
                continue
            name = row[1]
            company_id = None
            if by_name is not None:
                if name in ambiguous:
                    handle(IngestError(f"ambiguous company name {name!r}", line=lineno))
                    continue
                company_id = by_name.get(name)
                if company_id is None:
                    handle(IngestError(f"unknown company name {name!r}", line=lineno))
                    continue
            yield Review(
                id=rid,
                company_name=name,
                score=score,
                text=row[4],
                time=when,
                company_id=company_id,
            )


class ReviewSource(Protocol):
    """A paginated review backend.

    ``search`` resolves a company name to an opaque place handle (None when
    nothing matches); ``reviews`` returns one page of raw review dicts plus
    the token for the next page (None at the end).
    """

    def search(self, company_name: str) -> str | None: ...

    def reviews(self, place: str, page_token: str | None) -> tuple[list[dict], str | None]: ...


class RateLimiter:
    """Paces calls to at most ``rate`` per second; thread-safe.

    Clock and sleep are injectable so tests can run on simulated time.
    """

    def __init__(
        self,
        rate: float,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ):
        if rate <= 0:
            raise ConfigError(f"rate must be positive, got {rate}")
        self.interval = 1.0 / rate
        self._clock = clock
        self._sleep = sleep
        self._lock = threading.Lock()
        self._next_slot = -float("inf")

    def acquire(self) -> None:
        with self._lock:
            now = self._clock()
            wait = self._next_slot - now
            if wait > 0:
                self._sleep(wait)
                now = self._next_slot
            self._next_slot = now + self.interval


class ThrottledSource:
    """Wraps a source with the shared rate limit and retry policy all
    implementations must honor: exponential backoff starting at 1s, doubling,
    at most 5 attempts."""

    def __init__(
        self,
        inner: ReviewSource,
        limiter: RateLimiter,
        sleep: Callable[[float], None] = time.sleep,
        max_attempts: int = RETRY_MAX_ATTEMPTS,
    ):
        self.inner = inner
        self.limiter = limiter
        self._sleep = sleep
        self.max_attempts = max_attempts

    def _call(self, fn, *args):
        delay = RETRY_BASE_DELAY
        for attempt in range(1, self.max_attempts + 1):
            self.limiter.acquire()
            try:
                return fn(*args)
            except TransientSourceError as exc:
                if attempt == self.max_attempts:
                    raise SourceError(
                        f"giving up after {attempt} attempts: {exc}"
                    ) from exc
                log.warning("transient source failure (attempt %d): %s; retrying in %.0fs",
                            attempt, exc, delay)
                self._sleep(delay)
                delay *= RETRY_FACTOR

    def search(self, company_name: str) -> str | None:
        return self._call(self.inner.search, company_name)

    def reviews(self, place: str, page_token: str | None) -> tuple[list[dict], str | None]:
        return self._call(self.inner.reviews, place, page_token)


class MockReviewSource:
    """In-memory source fed from fixtures.

    ``pages`` maps a company name to a list of pages, each a list of raw
    review dicts with keys ``id``, ``score``, ``text``, ``time``.
    ``fail_first`` makes the first N calls raise a transient error, to
    exercise the retry contract.
    """

    def __init__(self, pages: dict[str, list[list[dict]]], fail_first: int = 0):
        self._pages = pages
        self._fail_remaining = fail_first
        self.calls = 0

    def _maybe_fail(self) -> None:
        self.calls += 1
        if self._fail_remaining > 0:
            self._fail_remaining -= 1
            raise TransientSourceError("simulated transient failure")

    def search(self, company_name: str) -> str | None:
        self._maybe_fail()
        return company_name if company_name in self._pages else None

    def reviews(self, place: str, page_token: str | None) -> tuple[list[dict], str | None]:
        self._maybe_fail()
        pages = self._pages[place]
        index = int(page_token) if page_token else 0
        page = pages[index] if index < len(pages) else []
        next_token = str(index + 1) if index + 1 < len(pages) else None
        return page, next_token


@dataclass
class FetchOutcome:
    reviews: list[Review]
    skipped: bool = False
    pages: int = 0


def fetch_reviews(
    src: ReviewSource,
    company: Company,
    max_pages: int = 10,
    *,
    skip_log: list[int] | None = None,
) -> list[Review]:
    """Fetch up to ``max_pages`` of reviews for one company.

    Companies the source cannot find yield an empty list and a recorded
    skip. Permanent source failures raise :class:`SourceError` carrying the
    company id; malformed payloads raise :class:`PayloadError`.
    """
    try:
        place = src.search(company.name)
    except SourceError as exc:
        raise SourceError(str(exc), company_id=company.id) from exc
    if place is None:
        log.info("no search hit for company %d (%s); skipping", company.id, company.name)
        if skip_log is not None:
            skip_log.append(company.id)
        return []

    out: list[Review] = []
    token: str | None = None
    for _ in range(max_pages):
        try:
            page, token = src.reviews(place, token)
        except SourceError as exc:
            raise SourceError(str(exc), company_id=company.id) from exc
        for raw in page:
            out.append(_normalize(raw, company))
        if token is None:
            break
    return out


def _normalize(raw: dict, company: Company) -> Review:
    try:
        score = int(raw["score"])
        if score not in (1, 2, 3, 4, 5):
            raise ValueError(f"score {score} outside 1..5")
        return Review(
            id=int(raw["id"]),
            company_name=company.name,
            score=score,
            text=str(raw["text"]),
            time=datetime.fromisoformat(str(raw["time"])),
            company_id=company.id,
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise PayloadError(
            f"malformed review payload for company {company.id}: {exc}",
            company_id=company.id,
        ) from exc


def live_review_source() -> ReviewSource:
    """Hook for a real maps-API backend.

    Reads the API key from ``CHROMASENT_MAPS_KEY``; no live client ships
    with this package, so this always raises with guidance.
    """
    key = os.environ.get(MAPS_KEY_ENV)
    if not key:
        raise ConfigError(
            f"set {MAPS_KEY_ENV} and provide a ReviewSource implementation; "
            "no live backend is bundled"
        )
    raise ConfigError(
        "no live review backend is bundled; implement ReviewSource against "
        "your maps API and wrap it in ThrottledSource"
    )
