"""Reconstruction fidelity, feedback overhead, and bit-budget arithmetic."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, InputError

GCS_VARIANTS = ("vectorized", "per-column-mean")


def gcs(estimate, reference, variant: str = "vectorized") -> float:
    """Generalized cosine similarity between two equal-shape complex matrices.

    vectorized: |<vec(est), vec(ref)>| / (||est||_F ||ref||_F).
    per-column-mean: the same ratio per column, averaged; zero estimate
    columns contribute 0. A zero reference is degenerate either way.
    """
    est = np.asarray(estimate, dtype=np.complex128)
    ref = np.asarray(reference, dtype=np.complex128)
    if est.shape != ref.shape:
        raise InputError(f"shape mismatch: estimate {est.shape} vs reference {ref.shape}")
    if variant == "vectorized":
        ref_norm = np.linalg.norm(ref)
        if ref_norm == 0.0:
            raise DegenerateInputError("reference matrix is zero")
        est_norm = np.linalg.norm(est)
        if est_norm == 0.0:
            return 0.0
        return min(1.0, abs(np.vdot(est, ref)) / (est_norm * ref_norm))
    if variant == "per-column-mean":
        if est.ndim != 2:
            raise InputError("per-column-mean needs 2-D matrices")
        values = []
        for j in range(ref.shape[1]):
            ref_norm = np.linalg.norm(ref[:, j])
            if ref_norm == 0.0:
                raise DegenerateInputError(f"reference column {j} is zero")
            est_norm = np.linalg.norm(est[:, j])
            if est_norm == 0.0:
                values.append(0.0)
                continue
            values.append(min(1.0, abs(np.vdot(est[:, j], ref[:, j])) / (est_norm * ref_norm)))
        return float(np.mean(values))
    raise InputError(f"unknown gcs variant {variant!r}; choose from {GCS_VARIANTS}")


def overhead_reduction_ad(n_taps: int, n_ports: int, k: int) -> float:
    """Fraction of the raw L x N_t feedback saved by sending the k-component
    payload and transform instead: (L*N_t - (L + N_t) * k) / (L * N_t)."""
    if n_taps < 1 or n_ports < 1:
        raise InputError("n_taps and n_ports must be >= 1")
    if not 1 <= k <= n_ports:
        raise InputError(f"k must lie in [1, {n_ports}], got {k}")
    total = n_taps * n_ports
    return (total - (n_taps + n_ports) * k) / total


def overhead_reduction_ev(n_subbands: int, n_ports: int, k: int) -> float:
    """Eigenvector-mode analogue over the N_SB x N_t grid:
    (N_SB*N_t - (N_SB + N_t) * k) / (N_SB * N_t)."""
    if n_subbands < 1 or n_ports < 1:
        raise InputError("n_subbands and n_ports must be >= 1")
    if not 1 <= k <= n_subbands:
        raise InputError(f"k must lie in [1, {n_subbands}], got {k}")
    total = n_subbands * n_ports
    return (total - (n_subbands + n_ports) * k) / total


@dataclass(frozen=True)
class FeedbackSchedule:
    """Reporting cadence: the payload refreshes every period, the transform
    every k_refresh periods."""

    tau_p: float = 5e-3
    k_refresh: int = 1
    q_bits: int = 8

    def __post_init__(self):
        if not (np.isfinite(self.tau_p) and self.tau_p > 0):
            raise InputError("tau_p must be a positive duration in seconds")
        if self.k_refresh < 1:
            raise InputError("k_refresh must be >= 1")
        if self.q_bits < 1:
            raise InputError("q_bits must be >= 1")


def feedback_bits(mode: str, dims: tuple[int, int], k: int, sched: FeedbackSchedule) -> float:
    """Average feedback bits per reporting period.

    dims is (L, N_t) for AD or (N_SB, N_t) for EV. The per-period payload
    plus the transform amortized over k_refresh periods, times 2*q_bits per
    complex entry. The average need not be an integer; callers wanting a
    transmissible budget take the ceiling.
    """
    first, n_ports = dims
    if first < 1 or n_ports < 1:
        raise InputError("dims must be >= 1")
    if k < 1:
        raise InputError("k must be >= 1")
    if mode == "AD":
        payload = first * k          # L x k compressed taps
        transform = k * n_ports      # N_t x k basis slice
    elif mode == "EV":
        payload = n_ports * k        # N_t x k compressed eigenvectors
        transform = k * first        # N_SB x k basis slice
    else:
        raise InputError(f"unknown mode {mode!r}; choose 'AD' or 'EV'")
    return (payload + transform / sched.k_refresh) * 2.0 * sched.q_bits


def feedback_bits_ceil(mode: str, dims: tuple[int, int], k: int, sched: FeedbackSchedule) -> int:
    return math.ceil(feedback_bits(mode, dims, k, sched))


def percent_display(x: float, convention: str = "round") -> int:
    """Integer percent for table display.

    'round' is half away from zero; 'floor' truncates toward zero, with a
    one-nano-percent guard so a value that is an exact integer percent in
    real arithmetic is not pulled down by float dust.
    """
    if not np.isfinite(x):
        raise InputError("percent_display needs a finite value")
    v = 100.0 * x
    if convention == "round":
        return int(math.floor(v + 0.5)) if v >= 0 else int(math.ceil(v - 0.5))
    if convention == "floor":
        guard = math.copysign(1e-9, v)
        return int(math.trunc(v + guard))
    raise InputError(f"unknown convention {convention!r}; choose 'round' or 'floor'")
