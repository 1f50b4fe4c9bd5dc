"""Finite-alphabet symbol sequences and their on-disk format.

A sequence file is plain text: a header line ``alphabet N`` followed by
whitespace-separated integer symbols in ``[0, N)``, wrapped at any width.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class Alphabet:
    """Finite alphabet {0, 1, ..., size-1}."""

    size: int

    def __post_init__(self):
        if not isinstance(self.size, int) or self.size < 1:
            raise ValidationError(f"alphabet size must be a positive integer, got {self.size!r}")

    def __contains__(self, symbol) -> bool:
        return 0 <= symbol < self.size


@dataclass(frozen=True)
class SymbolSequence:
    """Immutable sequence of symbols over a fixed alphabet."""

    alphabet: Alphabet
    data: tuple = field(default=())

    def __post_init__(self):
        data = tuple(int(s) for s in self.data)
        object.__setattr__(self, "data", data)
        bad = next((s for s in data if s not in self.alphabet), None)
        if bad is not None:
            raise ValidationError(
                f"symbol {bad} outside alphabet of size {self.alphabet.size}"
            )

    def __len__(self) -> int:
        return len(self.data)

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            return SymbolSequence(self.alphabet, self.data[idx])
        return self.data[idx]

    def __iter__(self):
        return iter(self.data)

    def prefix(self, n: int) -> "SymbolSequence":
        if not 0 <= n <= len(self.data):
            raise ValidationError(f"prefix length {n} outside [0, {len(self.data)}]")
        return SymbolSequence(self.alphabet, self.data[:n])

    def array(self) -> np.ndarray:
        return np.asarray(self.data, dtype=np.int64)


def sequence_from_array(values, alphabet_size: int) -> SymbolSequence:
    return SymbolSequence(Alphabet(int(alphabet_size)), tuple(int(v) for v in values))


def load_sequence(path: str | os.PathLike) -> SymbolSequence:
    """Parse a sequence file.

    Raises ValidationError on a malformed header, non-integer symbols, or
    out-of-range symbols; the message names the offending token.
    """
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    tokens = text.split()
    if len(tokens) < 2 or tokens[0] != "alphabet":
        raise ValidationError(f"{path}: expected header 'alphabet N'")
    try:
        size = int(tokens[1])
    except ValueError:
        raise ValidationError(f"{path}: alphabet size {tokens[1]!r} is not an integer") from None
    symbols = []
    for tok in tokens[2:]:
        try:
            symbols.append(int(tok))
        except ValueError:
            raise ValidationError(f"{path}: symbol {tok!r} is not an integer") from None
    try:
        return SymbolSequence(Alphabet(size), tuple(symbols))
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def dump_sequence(seq: SymbolSequence, path: str | os.PathLike, width: int = 40) -> None:
    """Write a sequence file; symbols wrapped at `width` per line."""
    lines = [f"alphabet {seq.alphabet.size}"]
    data = seq.data
    for start in range(0, len(data), width):
        lines.append(" ".join(str(s) for s in data[start : start + width]))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
