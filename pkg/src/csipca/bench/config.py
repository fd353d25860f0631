"""Experiment configuration: plain 'key = value' text files.

One config names a dataset (generated on the fly or loaded from a CFR1
file), a pipeline, and the sweep lists for components and quantizer widths.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

from ..chanforge import DEFAULT_GEOMETRY, DEFAULT_N_SUBCARRIERS, DEFAULT_SCS_HZ, GenConfig
from ..errors import ConfigError
from ..metrics import GCS_VARIANTS
from ..util import parse_key_values
from ..xforms import TAP_POLICIES

PIPELINES = ("AD", "EV")
SOURCES = ("generate", "load")


def _parse_int_list(value: str, key: str) -> tuple[int, ...]:
    try:
        items = tuple(int(tok) for tok in value.split(","))
    except ValueError as exc:
        raise ConfigError(f"{key}: expected comma-separated integers, got {value!r}") from exc
    if not items:
        raise ConfigError(f"{key}: list must be non-empty")
    return items


def _parse_q_list(value: str, key: str) -> tuple[int | None, ...]:
    items: list[int | None] = []
    for tok in value.split(","):
        tok = tok.strip()
        if tok == "off":
            items.append(None)
            continue
        try:
            items.append(int(tok))
        except ValueError as exc:
            raise ConfigError(f"{key}: expected integers or 'off', got {tok!r}") from exc
    if not items:
        raise ConfigError(f"{key}: list must be non-empty")
    return tuple(items)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one benchmark run needs; see configs/ for examples."""

    pipeline: str = "AD"
    source: str = "generate"
    profile: str = "low-spread-30ns"
    seed: int = 0
    count: int = 100
    n_subcarriers: int = DEFAULT_N_SUBCARRIERS
    scs_hz: float = DEFAULT_SCS_HZ
    rows: int = DEFAULT_GEOMETRY.rows
    cols: int = DEFAULT_GEOMETRY.cols
    polarizations: int = DEFAULT_GEOMETRY.polarizations
    element_spacing: float = DEFAULT_GEOMETRY.element_spacing
    dataset: str | None = None
    taps: int | None = None
    tap_policy: str = "top-energy"
    subbands: int = 13
    components: tuple[int, ...] = (1, 2, 3)
    q_bits: tuple[int | None, ...] = (None,)
    k_refresh: int = 1
    gcs_variant: str = "vectorized"
    variance_threshold: float = 0.99
    out_dir: str = "results"

    def __post_init__(self):
        if self.pipeline not in PIPELINES:
            raise ConfigError(f"pipeline: must be one of {PIPELINES}, got {self.pipeline!r}")
        if self.source not in SOURCES:
            raise ConfigError(f"source: must be one of {SOURCES}, got {self.source!r}")
        if self.source == "load" and not self.dataset:
            raise ConfigError("dataset: required when source = load")
        if self.source == "generate" and self.count < 1:
            raise ConfigError("count: must be >= 1 when source = generate")
        if self.pipeline == "AD":
            if self.taps is None:
                raise ConfigError("taps: required for the AD pipeline")
            if self.taps < 1:
                raise ConfigError("taps: must be >= 1")
            if self.tap_policy not in TAP_POLICIES:
                raise ConfigError(f"tap_policy: must be one of {TAP_POLICIES}")
            if self.source == "generate" and self.taps > self.n_subcarriers:
                raise ConfigError(f"taps: L={self.taps} exceeds n_subcarriers={self.n_subcarriers}")
        else:
            if self.subbands < 1:
                raise ConfigError("subbands: must be >= 1")
            if self.source == "generate" and self.n_subcarriers % self.subbands != 0:
                raise ConfigError(
                    f"subbands: n_subcarriers={self.n_subcarriers} is not divisible "
                    f"by subbands={self.subbands}")
        if not self.components:
            raise ConfigError("components: list must be non-empty")
        if any(k < 1 for k in self.components):
            raise ConfigError("components: every k must be >= 1")
        if not self.q_bits:
            raise ConfigError("q_bits: list must be non-empty")
        if any(q is not None and q < 1 for q in self.q_bits):
            raise ConfigError("q_bits: widths must be >= 1 or 'off'")
        if self.k_refresh < 1:
            raise ConfigError("k_refresh: must be >= 1")
        if self.gcs_variant not in GCS_VARIANTS:
            raise ConfigError(f"gcs_variant: must be one of {GCS_VARIANTS}")
        if not 0.0 < self.variance_threshold <= 1.0:
            raise ConfigError("variance_threshold: must lie in (0, 1]")
        # delegate generator-field validation (seed, count, dims, geometry)
        if self.source == "generate":
            try:
                self.gen_config()
            except ConfigError:
                raise
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc

    def gen_config(self) -> GenConfig:
        return GenConfig(
            profile=self.profile,
            seed=self.seed,
            count=self.count,
            rows=self.rows,
            cols=self.cols,
            polarizations=self.polarizations,
            element_spacing=self.element_spacing,
            n_subcarriers=self.n_subcarriers,
            scs_hz=self.scs_hz,
        )

    @classmethod
    def from_text(cls, text: str, source: str = "<config>") -> "ExperimentConfig":
        entries = parse_key_values(text, source=source)
        names = {f.name for f in fields(cls)}
        unknown = sorted(set(entries) - names)
        if unknown:
            raise ConfigError(f"{source}: unknown keys: {', '.join(unknown)}")
        kwargs: dict = {}
        for key, value in entries.items():
            if key == "components":
                kwargs[key] = _parse_int_list(value, key)
            elif key == "q_bits":
                kwargs[key] = _parse_q_list(value, key)
            elif key in ("scs_hz", "element_spacing", "variance_threshold"):
                try:
                    kwargs[key] = float(value)
                except ValueError as exc:
                    raise ConfigError(f"{key}: cannot parse {value!r} as a number") from exc
            elif key in ("seed", "count", "n_subcarriers", "rows", "cols", "polarizations",
                         "taps", "subbands", "k_refresh"):
                try:
                    kwargs[key] = int(value)
                except ValueError as exc:
                    raise ConfigError(f"{key}: cannot parse {value!r} as an integer") from exc
            else:
                kwargs[key] = value
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        return cls.from_text(path.read_text(), source=str(path))

    @property
    def dataset_id(self) -> str:
        if self.source == "load":
            return Path(self.dataset).stem
        return self.gen_config().dataset_id
