"""Small shared helpers: key-value config parsing, deterministic phase
alignment, and the little-endian complex encoding used by every binary
format in the package."""

from __future__ import annotations

import numpy as np

from .errors import ConfigError

# Interleaved (real, imag) float64 pairs, little-endian, row-major.
COMPLEX_DTYPE = np.dtype("<c16")


def parse_key_values(text: str, source: str = "<config>") -> dict[str, str]:
    """Parse 'key = value' lines; '#' starts a comment, blanks are skipped.

    Duplicate keys are rejected so a typo cannot silently win.
    """
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if not key:
            raise ConfigError(f"{source}:{lineno}: empty key")
        if key in entries:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        entries[key] = value.strip()
    return entries


def phase_normalize_columns(m: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude entry is real and positive.

    Magnitude ties break toward the lowest entry index (np.argmax takes the
    first maximum). All-zero columns are left untouched. Returns a new array.
    """
    out = np.array(m, dtype=np.complex128)
    for j in range(out.shape[1]):
        col = out[:, j]
        pivot = col[int(np.argmax(np.abs(col)))]
        mag = abs(pivot)
        if mag > 0.0:
            out[:, j] = col * (np.conj(pivot) / mag)
    return out


def complex_to_bytes(m: np.ndarray) -> bytes:
    return np.ascontiguousarray(m, dtype=COMPLEX_DTYPE).tobytes()


def complex_from_bytes(buf: bytes, shape: tuple[int, ...]) -> np.ndarray:
    # frombuffer yields a read-only view; astype copies into a writable array.
    return np.frombuffer(buf, dtype=COMPLEX_DTYPE).reshape(shape).astype(np.complex128)
