"""Representation transforms between the spatial-frequency, angular-delay,
and sub-band eigenvector views of a channel sample.

The angular-delay map is a unitary 2-D DFT (forward over subcarriers,
inverse over ports), so it preserves Frobenius norm and its inverse is
exact. Tap selection keeps the L most energetic delay rows; re-embedding
zero-fills the rest. The eigenvector view averages the response per
sub-band and keeps the dominant eigenvector of each sub-band's Gram matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chanforge import DEFAULT_SCS_HZ, Cfr
from .errors import DegenerateInputError, InputError
from .util import phase_normalize_columns

TAP_POLICIES = ("top-energy", "first-L")


@dataclass(frozen=True)
class AngularDelay:
    """Full 2-D DFT image of a channel sample (delay rows x angle columns)."""

    data: np.ndarray
    subcarrier_spacing: float = DEFAULT_SCS_HZ
    sample_id: int = 0

    def __post_init__(self):
        data = np.array(self.data, dtype=np.complex128)
        if data.ndim != 2 or data.size == 0:
            raise InputError(f"AngularDelay data must be a non-empty 2-D matrix, got shape {data.shape}")
        if not np.all(np.isfinite(data)):
            raise InputError("AngularDelay data contains non-finite entries")
        data.flags.writeable = False
        object.__setattr__(self, "data", data)


@dataclass(frozen=True)
class TapChannel:
    """Rows of an angular-delay matrix kept after tap selection."""

    data: np.ndarray
    tap_indices: np.ndarray
    n_full: int
    subcarrier_spacing: float = DEFAULT_SCS_HZ
    sample_id: int = 0

    def __post_init__(self):
        data = np.array(self.data, dtype=np.complex128)
        indices = np.array(self.tap_indices, dtype=np.int64)
        if data.ndim != 2 or data.size == 0:
            raise InputError("TapChannel data must be a non-empty 2-D matrix")
        if not np.all(np.isfinite(data)):
            raise InputError("TapChannel data contains non-finite entries")
        if indices.ndim != 1 or len(indices) != data.shape[0]:
            raise InputError("tap_indices must list one row index per data row")
        if np.any(np.diff(indices) <= 0):
            raise InputError("tap_indices must be strictly increasing")
        if indices[0] < 0 or indices[-1] >= self.n_full:
            raise InputError(f"tap_indices must lie in [0, {self.n_full})")
        data.flags.writeable = False
        indices.flags.writeable = False
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "tap_indices", indices)

    @property
    def n_taps(self) -> int:
        return self.data.shape[0]


@dataclass(frozen=True)
class EvMatrix:
    """Dominant per-sub-band eigenvectors stacked as columns (ports x sub-bands)."""

    data: np.ndarray
    rank: int = 1

    def __post_init__(self):
        if self.rank != 1:
            raise InputError("only rank-1 eigenvector reports are supported")
        data = np.array(self.data, dtype=np.complex128)
        if data.ndim != 2 or data.size == 0:
            raise InputError("EvMatrix data must be a non-empty 2-D matrix")
        if not np.all(np.isfinite(data)):
            raise InputError("EvMatrix data contains non-finite entries")
        norms = np.linalg.norm(data, axis=0)
        if np.any(np.abs(norms - 1.0) > 1e-12):
            raise InputError("every EvMatrix column must be unit-norm within 1e-12")
        data.flags.writeable = False
        object.__setattr__(self, "data", data)

    @property
    def n_subbands(self) -> int:
        return self.data.shape[1]


def _as_sample(h) -> Cfr:
    """Accept a Cfr or any 2-D complex array-like."""
    if isinstance(h, Cfr):
        return h
    return Cfr(data=np.asarray(h))


def to_angular_delay(h) -> AngularDelay:
    """Unitary 2-D DFT: forward along subcarriers, inverse along ports."""
    h = _as_sample(h)
    data = np.fft.ifft(np.fft.fft(h.data, axis=0, norm="ortho"), axis=1, norm="ortho")
    return AngularDelay(data, h.subcarrier_spacing, h.sample_id)


def from_angular_delay(h_ad: AngularDelay) -> Cfr:
    """Exact inverse of to_angular_delay."""
    data = np.fft.fft(np.fft.ifft(h_ad.data, axis=0, norm="ortho"), axis=1, norm="ortho")
    return Cfr(data=data, subcarrier_spacing=h_ad.subcarrier_spacing, sample_id=h_ad.sample_id)


def select_taps(h_ad: AngularDelay, n_taps: int, policy: str = "top-energy") -> TapChannel:
    """Keep n_taps delay rows, in ascending row order.

    top-energy ranks rows by squared l2 norm, ties broken toward the lower
    index; first-L keeps rows 0..n_taps-1 regardless of energy.
    """
    n_full = h_ad.data.shape[0]
    if not 1 <= n_taps <= n_full:
        raise InputError(f"n_taps must lie in [1, {n_full}], got {n_taps}")
    if policy == "top-energy":
        energies = np.sum(np.abs(h_ad.data) ** 2, axis=1)
        # stable sort on negated energy: equal-energy rows keep index order
        ranked = np.argsort(-energies, kind="stable")
        indices = np.sort(ranked[:n_taps])
    elif policy == "first-L":
        indices = np.arange(n_taps)
    else:
        raise InputError(f"unknown tap policy {policy!r}; choose from {TAP_POLICIES}")
    return TapChannel(
        data=h_ad.data[indices],
        tap_indices=indices,
        n_full=n_full,
        subcarrier_spacing=h_ad.subcarrier_spacing,
        sample_id=h_ad.sample_id,
    )


def embed_taps(taps: TapChannel) -> AngularDelay:
    """Zero-fill the non-selected delay rows back to the full matrix."""
    full = np.zeros((taps.n_full, taps.data.shape[1]), dtype=np.complex128)
    full[taps.tap_indices] = taps.data
    return AngularDelay(full, taps.subcarrier_spacing, taps.sample_id)


def subband_average(h, n_subbands: int) -> np.ndarray:
    """Mean response per sub-band: an (n_subbands x N_t) matrix of row vectors.

    The subcarrier count must divide evenly into n_subbands.
    """
    h = _as_sample(h)
    n = h.n_subcarriers
    if n_subbands < 1:
        raise InputError("n_subbands must be >= 1")
    if n % n_subbands != 0:
        raise InputError(f"n_subcarriers={n} is not divisible by n_subbands={n_subbands}")
    per_band = n // n_subbands
    return h.data.reshape(n_subbands, per_band, h.n_ports).mean(axis=1)


def subband_eigenvectors(subband_rows) -> EvMatrix:
    """Dominant unit eigenvector of each sub-band's Gram matrix, one column each.

    For a 1 x N_t sub-band row h, the dominant eigenvector of h^H h is h^H up
    to scale, so the closed form conj(h)/||h|| applies. Columns then get the
    deterministic phase convention (largest-magnitude entry real positive,
    ties toward the lowest index).
    """
    rows = np.asarray(subband_rows, dtype=np.complex128)
    if rows.ndim != 2 or rows.size == 0:
        raise InputError("subband rows must form a non-empty 2-D array")
    columns = []
    for idx, row in enumerate(rows):
        norm = np.linalg.norm(row)
        if norm == 0.0:
            raise DegenerateInputError(f"sub-band {idx} averaged to the zero vector")
        columns.append(np.conj(row) / norm)
    data = phase_normalize_columns(np.stack(columns, axis=1))
    return EvMatrix(data=data, rank=1)
