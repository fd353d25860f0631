"""Config-driven experiment execution.

Per sample the pipeline is: transform, compress, optionally quantize and
dequantize, reconstruct, and (AD only) invert the transform with zero-filled
taps before scoring against the untouched ground truth. Sample evaluation
is pure in the sample, so any execution order aggregates identically;
results follow sample_id order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..chanforge import Dataset, generate_dataset, load_dataset
from ..errors import DataError, DegenerateInputError
from ..metrics import feedback_bits, FeedbackSchedule, gcs, overhead_reduction_ad, \
    overhead_reduction_ev, percent_display
from ..pca import choose_components, compress_ad, compress_ev, pca_fit, reconstruct
from ..quant import quantize_report
from ..xforms import TapChannel, embed_taps, from_angular_delay, select_taps, \
    subband_average, subband_eigenvectors, to_angular_delay
from .config import ExperimentConfig

#: Leading samples whose unquantized GCS is re-checked against the
#: sqrt(cumulative variance) identity on every run.
AUDIT_SAMPLES = 10
AUDIT_TOL = 1e-9


@dataclass(frozen=True)
class ResultRow:
    """One (k, q) cell of a benchmark run."""

    pipeline: str
    k: int
    q_bits: int | None
    mean_gcs: float
    gcs_p5: float
    gcs_p50: float
    gcs_p95: float
    mean_gcs_domain: float
    or_exact: float
    or_pct_round: int
    or_pct_floor: int
    mean_bits: float | None
    bits_ceil: int | None
    sample_count: int
    dataset_id: str

    def __post_init__(self):
        if not self.gcs_p5 <= self.gcs_p50 <= self.gcs_p95:
            raise DataError("GCS percentiles must be ordered")
        if self.sample_count < 1:
            raise DataError("sample_count must be >= 1")


@dataclass(frozen=True)
class SpectrumRow:
    """Mean variance mass of one component index across a dataset."""

    k: int
    mean_pct: float
    cum_pct: float
    frac_samples_covered: float


def _dataset_for(cfg: ExperimentConfig) -> tuple[Dataset, str]:
    if cfg.source == "load":
        dataset = load_dataset(cfg.dataset)
        return dataset, Path(cfg.dataset).stem
    gen = cfg.gen_config()
    return generate_dataset(gen), gen.dataset_id


def _check_dims(cfg: ExperimentConfig, dataset: Dataset) -> tuple[int, int]:
    if not dataset.samples:
        raise DataError("dataset has no samples")
    n, n_ports = dataset.samples[0].data.shape
    if cfg.pipeline == "AD":
        if cfg.taps > n:
            raise DataError(f"taps: L={cfg.taps} exceeds the dataset's N={n}")
        k_cap = min(cfg.taps, n_ports)
    else:
        if n % cfg.subbands != 0:
            raise DataError(f"subbands: N={n} is not divisible by n_subbands={cfg.subbands}")
        k_cap = min(n_ports, cfg.subbands)
    too_big = [k for k in cfg.components if k > k_cap]
    if too_big:
        raise DataError(f"components: k={max(too_big)} exceeds the rank cap {k_cap} "
                        f"of the {cfg.pipeline} representation")
    return n, n_ports


def _domain_matrix(sample, cfg: ExperimentConfig):
    """The representation PCA runs on: tap rows for AD, eigenvectors for EV."""
    if cfg.pipeline == "AD":
        return select_taps(to_angular_delay(sample), cfg.taps, cfg.tap_policy)
    return subband_eigenvectors(subband_average(sample, cfg.subbands))


def _evaluate_sample(sample, cfg: ExperimentConfig):
    """GCS of every (k, q) cell for one sample, plus the fitted spectrum."""
    try:
        domain = _domain_matrix(sample, cfg)
    except DegenerateInputError as exc:
        raise DataError(f"sample {sample.sample_id}: {exc}") from exc
    matrix = domain.data
    basis = pca_fit(matrix, mode=cfg.pipeline)
    cells: dict[tuple[int, int | None], tuple[float, float]] = {}
    for k in cfg.components:
        report = (compress_ad(domain, k, basis=basis) if cfg.pipeline == "AD"
                  else compress_ev(domain, k, basis=basis))
        for q in cfg.q_bits:
            lossy = quantize_report(report, q) if q is not None else report
            recon = reconstruct(lossy)
            g_domain = gcs(recon, matrix, cfg.gcs_variant)
            if cfg.pipeline == "AD":
                rebuilt = from_angular_delay(embed_taps(TapChannel(
                    recon, domain.tap_indices, domain.n_full,
                    domain.subcarrier_spacing, domain.sample_id)))
                g_full = gcs(rebuilt.data, sample.data, cfg.gcs_variant)
            else:
                g_full = g_domain
            cells[(k, q)] = (g_full, g_domain)
    return cells, basis.singular_values


def _audit_identity(sample_id, cells, spectrum, cfg: ExperimentConfig) -> None:
    """Unquantized domain GCS must match sqrt(cumulative variance fraction)."""
    if None not in cfg.q_bits:
        return
    power = spectrum ** 2
    cumulative = np.cumsum(power)
    total = cumulative[-1]
    if total == 0.0:
        raise DataError(f"sample {sample_id}: zero spectrum")
    for k in cfg.components:
        expected = math.sqrt(cumulative[k - 1] / total)
        got = cells[(k, None)][1]
        if abs(got - expected) > AUDIT_TOL:
            raise DataError(
                f"sample {sample_id}: unquantized GCS {got:.12f} at k={k} deviates "
                f"from the spectrum identity {expected:.12f}")


def run_experiment(cfg: ExperimentConfig) -> list[ResultRow]:
    """Run the configured sweep and aggregate one row per (k, q) cell."""
    dataset, dataset_id = _dataset_for(cfg)
    n, n_ports = _check_dims(cfg, dataset)

    full_gcs: dict[tuple[int, int | None], list[float]] = {
        (k, q): [] for k in cfg.components for q in cfg.q_bits}
    domain_gcs: dict[tuple[int, int | None], list[float]] = {
        (k, q): [] for k in cfg.components for q in cfg.q_bits}
    for i, sample in enumerate(dataset.samples):
        cells, spectrum = _evaluate_sample(sample, cfg)
        if i < AUDIT_SAMPLES:
            _audit_identity(sample.sample_id, cells, spectrum, cfg)
        for key, (g_full, g_domain) in cells.items():
            full_gcs[key].append(g_full)
            domain_gcs[key].append(g_domain)

    if cfg.pipeline == "AD":
        dims = (cfg.taps, n_ports)
        or_exact = {k: overhead_reduction_ad(cfg.taps, n_ports, k) for k in cfg.components}
    else:
        dims = (cfg.subbands, n_ports)
        or_exact = {k: overhead_reduction_ev(cfg.subbands, n_ports, k) for k in cfg.components}

    rows = []
    for k in cfg.components:
        for q in cfg.q_bits:
            values = np.array(full_gcs[(k, q)])
            p5, p50, p95 = np.percentile(values, [5, 50, 95])
            if q is None:
                mean_bits = bits_ceil = None
            else:
                sched = FeedbackSchedule(k_refresh=cfg.k_refresh, q_bits=q)
                mean_bits = feedback_bits(cfg.pipeline, dims, k, sched)
                bits_ceil = math.ceil(mean_bits)
            rows.append(ResultRow(
                pipeline=cfg.pipeline,
                k=k,
                q_bits=q,
                mean_gcs=float(values.mean()),
                gcs_p5=float(p5),
                gcs_p50=float(p50),
                gcs_p95=float(p95),
                mean_gcs_domain=float(np.mean(domain_gcs[(k, q)])),
                or_exact=or_exact[k],
                or_pct_round=percent_display(or_exact[k], "round"),
                or_pct_floor=percent_display(or_exact[k], "floor"),
                mean_bits=mean_bits,
                bits_ceil=bits_ceil,
                sample_count=len(dataset.samples),
                dataset_id=dataset_id,
            ))
    return rows


def emit_variance_spectrum(cfg: ExperimentConfig) -> list[SpectrumRow]:
    """Per-component mean explained-variance fraction over the dataset, with
    the fraction of samples covered by k components at the config threshold.

    mean_pct and cum_pct are fractions in [0, 1]; the mean_pct column sums
    to 1 across rows.
    """
    dataset, _ = _dataset_for(cfg)
    _check_dims(cfg, dataset)
    fractions = []
    needed = []
    for sample in dataset.samples:
        try:
            domain = _domain_matrix(sample, cfg)
        except DegenerateInputError as exc:
            raise DataError(f"sample {sample.sample_id}: {exc}") from exc
        basis = pca_fit(domain.data)
        power = basis.singular_values ** 2
        total = power.sum()
        if total == 0.0:
            raise DataError(f"sample {sample.sample_id}: zero spectrum")
        fractions.append(power / total)
        needed.append(choose_components(basis, cfg.variance_threshold))
    fractions = np.array(fractions)
    needed = np.array(needed)
    mean_fracs = fractions.mean(axis=0)
    cumulative = np.cumsum(mean_fracs)
    return [
        SpectrumRow(
            k=k,
            mean_pct=float(mean_fracs[k - 1]),
            cum_pct=float(cumulative[k - 1]),
            frac_samples_covered=float(np.mean(needed <= k)),
        )
        for k in range(1, fractions.shape[1] + 1)
    ]
