"""Uniform scalar quantization of complex feedback payloads.

Real and imaginary parts share one symmetric quantizer per matrix: 2**q
levels evenly spaced across [-scale, +scale] with both endpoints on the
grid, where scale is the largest absolute component (1.0 by convention for
an all-zero matrix). Codes bind to the nearest level, halves rounding away
from zero, so the worst-case component error is half the step:
scale / (2**q - 1). The scale itself travels as one float64 beside the
codes and is excluded from bit budgets; reports note this as a footnote.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, replace

import numpy as np

from .errors import FormatError, InputError
from .pca import CsiReport

_MAX_Q = 32


@dataclass(frozen=True)
class QuantizedMatrix:
    """Integer codes for the real and imaginary parts, plus the shared scale."""

    codes_real: np.ndarray
    codes_imag: np.ndarray
    scale: float
    q_bits: int

    def __post_init__(self):
        if not 1 <= self.q_bits <= _MAX_Q:
            raise InputError(f"q_bits must lie in [1, {_MAX_Q}], got {self.q_bits}")
        if not (np.isfinite(self.scale) and self.scale > 0):
            raise InputError("scale must be a positive finite real")
        top = (1 << self.q_bits) - 1
        frozen = []
        for name in ("codes_real", "codes_imag"):
            codes = np.array(getattr(self, name), dtype=np.uint32)
            if codes.ndim != 2 or codes.size == 0:
                raise InputError(f"{name} must be a non-empty 2-D integer matrix")
            if np.any(codes > top):
                raise InputError(f"{name} holds values above the top code {top}")
            codes.flags.writeable = False
            frozen.append(codes)
        if frozen[0].shape != frozen[1].shape:
            raise InputError("real and imaginary code matrices must share a shape")
        object.__setattr__(self, "codes_real", frozen[0])
        object.__setattr__(self, "codes_imag", frozen[1])

    @property
    def shape(self) -> tuple[int, int]:
        return self.codes_real.shape

    @property
    def n_levels(self) -> int:
        return 1 << self.q_bits


def _encode(values: np.ndarray, scale: float, q_bits: int) -> np.ndarray:
    top = (1 << q_bits) - 1
    step = 2.0 * scale / top
    # round half away from zero; the argument is nonnegative by construction
    codes = np.floor((values + scale) / step + 0.5)
    return np.clip(codes, 0, top).astype(np.uint32)


def quantize(matrix, q_bits: int) -> QuantizedMatrix:
    """Map each component to the nearest of 2**q_bits uniform levels."""
    m = np.asarray(matrix, dtype=np.complex128)
    if m.ndim != 2 or m.size == 0:
        raise InputError("quantize needs a non-empty 2-D matrix")
    if not np.all(np.isfinite(m)):
        raise InputError("matrix contains non-finite entries")
    if not 1 <= q_bits <= _MAX_Q:
        raise InputError(f"q_bits must lie in [1, {_MAX_Q}], got {q_bits}")
    scale = float(max(np.max(np.abs(m.real)), np.max(np.abs(m.imag))))
    if scale == 0.0:
        scale = 1.0  # all-zero matrix: fixed unit scale keeps the format total
    return QuantizedMatrix(
        codes_real=_encode(m.real, scale, q_bits),
        codes_imag=_encode(m.imag, scale, q_bits),
        scale=scale,
        q_bits=q_bits,
    )


def dequantize(qm: QuantizedMatrix) -> np.ndarray:
    """Map codes back to their level values."""
    step = 2.0 * qm.scale / ((1 << qm.q_bits) - 1)
    real = qm.codes_real * step - qm.scale
    imag = qm.codes_imag * step - qm.scale
    return real + 1j * imag


def quantize_report(report: CsiReport, q_bits: int) -> CsiReport:
    """Pass both payloads through the quantizer, recording q_bits on the report."""
    lossy_compressed = dequantize(quantize(report.compressed, q_bits))
    lossy_transform = dequantize(quantize(report.transform, q_bits))
    return replace(report, compressed=lossy_compressed, transform=lossy_transform,
                   q_bits=q_bits)


# --------------------------------------------------------------------------
# Serialization: q_bits u32 | rows u32 | cols u32 | scale f64
#                | packed real codes | packed imag codes
# Codes are bit-packed little-endian: each code contributes q_bits bits,
# least significant first, and the bitstream fills bytes LSB-first. Each
# plane pads independently to a byte boundary.
# --------------------------------------------------------------------------

_QM_HEAD = struct.Struct("<IIId")


def _pack_codes(codes: np.ndarray, q_bits: int) -> bytes:
    flat = codes.reshape(-1).astype(np.uint64)
    bit_positions = np.arange(q_bits, dtype=np.uint64)
    bits = ((flat[:, None] >> bit_positions[None, :]) & 1).astype(np.uint8)
    return np.packbits(bits.reshape(-1), bitorder="little").tobytes()


def _unpack_codes(buf: bytes, q_bits: int, count: int) -> np.ndarray:
    bits = np.unpackbits(np.frombuffer(buf, dtype=np.uint8),
                         count=count * q_bits, bitorder="little")
    weights = np.uint64(1) << np.arange(q_bits, dtype=np.uint64)
    values = (bits.reshape(count, q_bits).astype(np.uint64) * weights).sum(axis=1)
    return values.astype(np.uint32)


def quantized_to_bytes(qm: QuantizedMatrix) -> bytes:
    rows, cols = qm.shape
    head = _QM_HEAD.pack(qm.q_bits, rows, cols, qm.scale)
    return head + _pack_codes(qm.codes_real, qm.q_bits) + _pack_codes(qm.codes_imag, qm.q_bits)


def quantized_from_bytes(blob: bytes) -> QuantizedMatrix:
    if len(blob) < _QM_HEAD.size:
        raise FormatError("quantized matrix shorter than its header", offset=len(blob))
    q_bits, rows, cols, scale = _QM_HEAD.unpack_from(blob, 0)
    if not 1 <= q_bits <= _MAX_Q:
        raise FormatError(f"header q_bits {q_bits} outside [1, {_MAX_Q}]", offset=0)
    count = rows * cols
    plane = (count * q_bits + 7) // 8
    expected = _QM_HEAD.size + 2 * plane
    if len(blob) != expected:
        raise FormatError(f"expected {expected} bytes for a {rows}x{cols} matrix at "
                          f"q={q_bits}, got {len(blob)}",
                          offset=min(len(blob), expected))
    offset = _QM_HEAD.size
    codes_real = _unpack_codes(blob[offset:offset + plane], q_bits, count).reshape(rows, cols)
    codes_imag = _unpack_codes(blob[offset + plane:], q_bits, count).reshape(rows, cols)
    return QuantizedMatrix(codes_real=codes_real, codes_imag=codes_imag,
                           scale=scale, q_bits=q_bits)
