"""Redundancy check for decoded text: does it look like English?

The score blends two pieces, by default half and half:

* the fraction of bytes that are letters, whitespace or common punctuation;
* the cosine similarity between the byte histogram (case folded, all 256
  values) and a fixed table of letter and space frequencies.

Counting every byte value in the histogram, not only letters, is what pushes
random data down: most random bytes land in bins the table gives zero weight.
"""
from __future__ import annotations

import string
from importlib import resources

import numpy as np

PASS_THRESHOLD = 0.8
PRINTABLE_WEIGHT = 0.5

# Percent of letters in English prose; space is weighted so that it is
# roughly one character in five.
LETTER_FREQ = {
    "a": 8.167, "b": 1.492, "c": 2.782, "d": 4.253, "e": 12.702, "f": 2.228,
    "g": 2.015, "h": 6.094, "i": 6.966, "j": 0.153, "k": 0.772, "l": 4.025,
    "m": 2.406, "n": 6.749, "o": 7.507, "p": 1.929, "q": 0.095, "r": 5.987,
    "s": 6.327, "t": 9.056, "u": 2.758, "v": 0.978, "w": 2.360, "x": 0.150,
    "y": 1.974, "z": 0.074,
}
SPACE_FREQ = 23.0

PRINTABLE = frozenset((string.ascii_letters + " \n\t.,;:'\"!?-()").encode())

_TABLE = np.zeros(256)
for _ch, _f in LETTER_FREQ.items():
    _TABLE[ord(_ch)] = _f
_TABLE[ord(" ")] = SPACE_FREQ
_TABLE_NORM = float(np.linalg.norm(_TABLE))

_PRINTABLE_MASK = np.zeros(256, dtype=bool)
_PRINTABLE_MASK[list(PRINTABLE)] = True

_FOLD = np.arange(256, dtype=np.int64)
_FOLD[ord("A"):ord("Z") + 1] += 32


def english_scores(rows, printable_weight: float = PRINTABLE_WEIGHT) -> np.ndarray:
    """Score each row of a 2-D uint8 array of bytes."""
    rows = np.atleast_2d(np.asarray(rows, dtype=np.uint8))
    count, length = rows.shape
    if length == 0:
        raise ValueError("cannot score empty input")
    printable = _PRINTABLE_MASK[rows].mean(axis=1)
    folded = _FOLD[rows] + 256 * np.arange(count)[:, None]
    hist = np.bincount(folded.ravel(), minlength=256 * count).reshape(count, 256)
    dot = hist @ _TABLE
    cosine = dot / (np.linalg.norm(hist, axis=1) * _TABLE_NORM)
    return printable_weight * printable + (1 - printable_weight) * cosine


def english_score(data: bytes, printable_weight: float = PRINTABLE_WEIGHT) -> float:
    data = bytes(data)
    if not data:
        raise ValueError("cannot score empty input")
    return float(english_scores(np.frombuffer(data, dtype=np.uint8)[None, :], printable_weight)[0])


def looks_english(data: bytes, threshold: float = PASS_THRESHOLD) -> bool:
    return english_score(data) >= threshold


def sample_corpus() -> bytes:
    """The bundled prose sample, about one kilobyte of plain English."""
    return resources.files("mesocipher.data").joinpath("english_corpus.txt").read_bytes()
