"""Per-instance principal component analysis for CSI compression.

Every channel sample gets its own basis: the right singular vectors of the
raw matrix, with no mean removal, so that compressed @ transform^H is the
whole reconstruction and nothing else needs feeding back. Keeping the k
leading vectors is the best rank-k approximation in Frobenius norm, and the
tail singular values give the exact residual.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateInputError, FormatError, InputError
from .util import complex_from_bytes, complex_to_bytes, phase_normalize_columns
from .xforms import EvMatrix, TapChannel

MODE_AD = "AD"
MODE_EV = "EV"

_ORTHO_TOL = 1e-10


@dataclass(frozen=True)
class PcaBasis:
    """Orthonormal component columns plus the singular-value spectrum."""

    components: np.ndarray       # D x K_max, orthonormal columns
    singular_values: np.ndarray  # length K_max, nonincreasing, >= 0
    mode: str | None = None

    def __post_init__(self):
        comps = np.array(self.components, dtype=np.complex128)
        svals = np.array(self.singular_values, dtype=float)
        if comps.ndim != 2 or comps.size == 0:
            raise InputError("components must be a non-empty 2-D matrix")
        if svals.ndim != 1 or len(svals) != comps.shape[1]:
            raise InputError("need one singular value per component column")
        if np.any(svals < 0) or np.any(np.diff(svals) > 0):
            raise InputError("singular values must be nonnegative and nonincreasing")
        gram = comps.conj().T @ comps
        if np.max(np.abs(gram - np.eye(comps.shape[1]))) > _ORTHO_TOL:
            raise InputError(f"component columns must be orthonormal within {_ORTHO_TOL}")
        comps.flags.writeable = False
        svals.flags.writeable = False
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "singular_values", svals)

    @property
    def k_max(self) -> int:
        return self.components.shape[1]


@dataclass(frozen=True)
class CsiReport:
    """What the UE would feed back: projected payload plus the basis slice.

    transform columns are orthonormal at construction time; once a report
    has been through the quantizer (q_bits set) they are only approximately
    so, and the orthonormality check is skipped.
    """

    compressed: np.ndarray          # S x k
    transform: np.ndarray           # D x k
    mode: str | None = None
    q_bits: int | None = None
    tap_indices: np.ndarray | None = None  # AD only
    n_full: int | None = None              # AD only: delay rows before selection

    def __post_init__(self):
        compressed = np.array(self.compressed, dtype=np.complex128)
        transform = np.array(self.transform, dtype=np.complex128)
        if compressed.ndim != 2 or transform.ndim != 2:
            raise InputError("compressed and transform must be 2-D matrices")
        if compressed.shape[1] != transform.shape[1]:
            raise InputError(
                f"rank mismatch: compressed keeps {compressed.shape[1]} components, "
                f"transform keeps {transform.shape[1]}")
        if not (np.all(np.isfinite(compressed)) and np.all(np.isfinite(transform))):
            raise InputError("report payloads contain non-finite entries")
        if self.mode not in (None, MODE_AD, MODE_EV):
            raise InputError(f"mode must be {MODE_AD!r} or {MODE_EV!r}")
        if self.q_bits is not None and self.q_bits < 1:
            raise InputError("q_bits must be >= 1 when set")
        if self.q_bits is None:
            gram = transform.conj().T @ transform
            if np.max(np.abs(gram - np.eye(transform.shape[1]))) > _ORTHO_TOL:
                raise InputError("transform columns must be orthonormal before quantization")
        compressed.flags.writeable = False
        transform.flags.writeable = False
        object.__setattr__(self, "compressed", compressed)
        object.__setattr__(self, "transform", transform)
        if self.tap_indices is not None:
            indices = np.array(self.tap_indices, dtype=np.int64)
            indices.flags.writeable = False
            object.__setattr__(self, "tap_indices", indices)

    @property
    def k(self) -> int:
        return self.transform.shape[1]


def pca_fit(matrix, mode: str | None = None) -> PcaBasis:
    """Fit the per-instance basis: right singular vectors of the raw matrix.

    No mean is subtracted. Columns carry a deterministic phase (largest
    entry real positive) so repeated fits are bit-identical and usable in
    golden tests.
    """
    m = np.asarray(matrix, dtype=np.complex128)
    if m.ndim != 2 or m.size == 0:
        raise InputError("pca_fit needs a non-empty 2-D matrix")
    if not np.all(np.isfinite(m)):
        raise InputError("matrix contains non-finite entries")
    _, svals, vh = np.linalg.svd(m, full_matrices=False)
    components = phase_normalize_columns(vh.conj().T)
    return PcaBasis(components=components, singular_values=svals, mode=mode)


def choose_components(basis: PcaBasis, variance_threshold: float = 0.99) -> int:
    """Smallest k whose cumulative explained variance reaches the threshold.

    Threshold 1.0 therefore asks for the numerical rank. An all-zero
    spectrum has no meaningful answer and raises DegenerateInputError.
    """
    if not 0.0 < variance_threshold <= 1.0:
        raise InputError(f"variance_threshold must be in (0, 1], got {variance_threshold}")
    power = basis.singular_values ** 2
    cumulative = np.cumsum(power)
    if cumulative[-1] == 0.0:
        raise DegenerateInputError("cannot choose components: all singular values are zero")
    cumulative = cumulative / cumulative[-1]  # final entry becomes exactly 1.0
    return int(np.searchsorted(cumulative, variance_threshold, side="left")) + 1


def compress(matrix, basis: PcaBasis, k: int) -> CsiReport:
    """Project the matrix on the k leading components."""
    m = np.asarray(matrix, dtype=np.complex128)
    if m.ndim != 2 or m.shape[1] != basis.components.shape[0]:
        raise InputError(
            f"matrix has {m.shape[1] if m.ndim == 2 else '?'} columns, "
            f"basis expects {basis.components.shape[0]}")
    if not 1 <= k <= basis.k_max:
        raise InputError(f"k must lie in [1, {basis.k_max}], got {k}")
    v = basis.components[:, :k]
    return CsiReport(compressed=m @ v, transform=v, mode=basis.mode)


def reconstruct(report: CsiReport) -> np.ndarray:
    """Receiver-side inverse: compressed @ transform^H."""
    return report.compressed @ report.transform.conj().T


def compress_ad(taps: TapChannel, k: int, basis: PcaBasis | None = None) -> CsiReport:
    """Fit (or reuse) a basis on the tap matrix and compress it, carrying the
    tap bookkeeping needed to re-embed at the receiver."""
    if basis is None:
        basis = pca_fit(taps.data, mode=MODE_AD)
    report = compress(taps.data, basis, k)
    return replace(report, mode=MODE_AD, tap_indices=taps.tap_indices, n_full=taps.n_full)


def compress_ev(ev: EvMatrix, k: int, basis: PcaBasis | None = None) -> CsiReport:
    """Compress an eigenvector matrix; the sub-band axis is the sample axis,
    so the fit runs on the transpose (sub-bands x ports)."""
    if basis is None:
        basis = pca_fit(ev.data, mode=MODE_EV)
    return replace(compress(ev.data, basis, k), mode=MODE_EV)


# --------------------------------------------------------------------------
# Report serialization
#
#   mode u8 (0 = AD, 1 = EV) | q_bits u32 (0 = off) | S u32 | D u32 | k u32
#   | AD only: n_full u32 | L u32 | tap indices u32 each
#   | compressed payload | transform payload
#   payloads in the CFR1 complex encoding (f64 re, f64 im, little-endian)
# --------------------------------------------------------------------------

_REPORT_HEAD = struct.Struct("<BIIII")
_U32 = struct.Struct("<I")


def report_to_bytes(report: CsiReport) -> bytes:
    if report.mode not in (MODE_AD, MODE_EV):
        raise InputError("only AD or EV reports serialize")
    if report.mode == MODE_AD and (report.tap_indices is None or report.n_full is None):
        raise InputError("AD reports need tap_indices and n_full to serialize")
    s, k = report.compressed.shape
    d = report.transform.shape[0]
    parts = [_REPORT_HEAD.pack(0 if report.mode == MODE_AD else 1,
                               report.q_bits or 0, s, d, k)]
    if report.mode == MODE_AD:
        parts.append(_U32.pack(report.n_full))
        parts.append(_U32.pack(len(report.tap_indices)))
        parts.extend(_U32.pack(int(i)) for i in report.tap_indices)
    parts.append(complex_to_bytes(report.compressed))
    parts.append(complex_to_bytes(report.transform))
    return b"".join(parts)


def report_from_bytes(blob: bytes) -> CsiReport:
    if len(blob) < _REPORT_HEAD.size:
        raise FormatError("report shorter than its fixed header", offset=len(blob))
    mode_byte, q_bits, s, d, k = _REPORT_HEAD.unpack_from(blob, 0)
    if mode_byte not in (0, 1):
        raise FormatError(f"unknown mode byte {mode_byte}", offset=0)
    mode = MODE_AD if mode_byte == 0 else MODE_EV
    offset = _REPORT_HEAD.size
    tap_indices = None
    n_full = None
    if mode == MODE_AD:
        if len(blob) < offset + 8:
            raise FormatError("AD report truncated before tap header", offset=len(blob))
        (n_full,) = _U32.unpack_from(blob, offset)
        (n_taps,) = _U32.unpack_from(blob, offset + 4)
        offset += 8
        need = n_taps * 4
        if len(blob) < offset + need:
            raise FormatError("AD report truncated inside the tap index list", offset=len(blob))
        tap_indices = np.frombuffer(blob, dtype="<u4", count=n_taps, offset=offset).astype(np.int64)
        offset += need
    for name, shape in (("compressed", (s, k)), ("transform", (d, k))):
        need = shape[0] * shape[1] * 16
        if len(blob) < offset + need:
            raise FormatError(f"report truncated inside the {name} payload", offset=len(blob))
        if name == "compressed":
            compressed = complex_from_bytes(blob[offset:offset + need], shape)
        else:
            transform = complex_from_bytes(blob[offset:offset + need], shape)
        offset += need
    if offset != len(blob):
        raise FormatError(f"{len(blob) - offset} trailing bytes after the report", offset=offset)
    return CsiReport(compressed=compressed, transform=transform, mode=mode,
                     q_bits=q_bits or None, tap_indices=tap_indices, n_full=n_full)
