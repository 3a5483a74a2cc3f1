"""Shared fixtures: the bundled demo corpus and helpers for building
synthetic images and running the CLI."""

from __future__ import annotations

import io
import shutil
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

from chromasent.cli import main as cli_main

DEMO_DIR = Path(__file__).resolve().parent.parent / "demo"


@pytest.fixture(scope="session")
def demo_corpus() -> Path:
    """The bundled fixture corpus: 5 companies, 50 reviews, 5 logos."""
    assert (DEMO_DIR / "companies.csv").is_file()
    return DEMO_DIR


@pytest.fixture
def corpus_copy(demo_corpus, tmp_path) -> Path:
    """A mutable copy of the demo corpus."""
    dst = tmp_path / "corpus"
    shutil.copytree(demo_corpus, dst)
    return dst


def png_bytes(arr: np.ndarray) -> bytes:
    """Encode an (h, w, 3|4) uint8 array as PNG."""
    buf = io.BytesIO()
    Image.fromarray(arr.astype(np.uint8)).save(buf, "PNG")
    return buf.getvalue()


def solid_png(width: int, height: int, rgb: tuple[int, int, int]) -> bytes:
    arr = np.zeros((height, width, 3), dtype=np.uint8)
    arr[:, :] = rgb
    return png_bytes(arr)


def run_cli(corpus: Path, store: Path, command: str = "pipeline", *extra: str) -> int:
    """Invoke the CLI in-process against a corpus directory."""
    argv = [
        command,
        "--store", str(store),
        "--companies", str(corpus / "companies.csv"),
        "--reviews", str(corpus / "reviews.csv"),
        "--logos", str(corpus / "logos"),
        *extra,
    ]
    return cli_main(argv)
