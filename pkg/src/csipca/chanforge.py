"""Synthetic multipath channel generation and dataset persistence.

The generator is a tapped-delay line: every propagation path contributes one
tap whose antenna signature is the steering vector of a planar panel array,
faded by a seeded complex-Gaussian coefficient. Summing the taps across the
subcarrier grid yields the spatial-frequency response of one channel sample.
Datasets round-trip losslessly through the binary CFR1 container defined at
the bottom of this module.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, fields
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ConfigError, FormatError, InputError
from .util import complex_from_bytes, complex_to_bytes, parse_key_values

DEFAULT_N_SUBCARRIERS = 624
DEFAULT_SCS_HZ = 15_000.0

STOCK_PROFILE_NAMES = ("low-spread-30ns", "high-spread-300ns")


@dataclass(frozen=True)
class ArrayGeometry:
    """Planar panel layout; port count is rows * cols * polarizations.

    element_spacing is in carrier wavelengths. Ports are indexed row-major
    over (row, col) with polarization fastest, which is also the column
    order of every matrix this package produces (identity port mapping).
    """

    rows: int
    cols: int
    polarizations: int
    element_spacing: float = 0.5

    def __post_init__(self):
        for name in ("rows", "cols", "polarizations"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise InputError(f"{name} must be an integer >= 1, got {value!r}")
        if self.polarizations not in (1, 2):
            raise InputError(f"polarizations must be 1 or 2, got {self.polarizations}")
        if not (np.isfinite(self.element_spacing) and self.element_spacing > 0):
            raise InputError("element_spacing must be a positive number of wavelengths")

    @property
    def n_ports(self) -> int:
        return self.rows * self.cols * self.polarizations


#: 32-port dual-polarized 2x8 panel at half-wavelength spacing.
DEFAULT_GEOMETRY = ArrayGeometry(rows=2, cols=8, polarizations=2, element_spacing=0.5)


@dataclass(frozen=True)
class MultipathProfile:
    """Deterministic path layout; fading and angle jitter are drawn per seed.

    Delays are seconds, powers are dB relative to the strongest path (any
    reference works: linear powers are normalized to sum to one). The
    per-path angular spread is the standard deviation, in degrees, of the
    seeded jitter added independently to each path's departure angles.
    """

    name: str
    path_delays: tuple[float, ...]
    path_powers_db: tuple[float, ...]
    azimuth_aod_deg: tuple[float, ...]
    zenith_aod_deg: tuple[float, ...]
    per_path_angular_spread_deg: float = 0.0

    def __post_init__(self):
        n = len(self.path_delays)
        if n == 0:
            raise InputError("profile needs at least one path")
        for name in ("path_powers_db", "azimuth_aod_deg", "zenith_aod_deg"):
            if len(getattr(self, name)) != n:
                raise InputError(f"{name} must have {n} entries to match path_delays")
            if not all(np.isfinite(v) for v in getattr(self, name)):
                raise InputError(f"{name} contains a non-finite value")
        delays = np.asarray(self.path_delays, dtype=float)
        if not np.all(np.isfinite(delays)) or np.any(delays < 0):
            raise InputError("path_delays must be finite and >= 0")
        if np.any(np.diff(delays) < 0):
            raise InputError("path_delays must be nondecreasing")
        if not (np.isfinite(self.per_path_angular_spread_deg) and self.per_path_angular_spread_deg >= 0):
            raise InputError("per_path_angular_spread_deg must be >= 0")

    @property
    def n_paths(self) -> int:
        return len(self.path_delays)

    @property
    def linear_powers(self) -> np.ndarray:
        """Per-path linear powers, normalized to sum to 1."""
        p = 10.0 ** (np.asarray(self.path_powers_db, dtype=float) / 10.0)
        return p / p.sum()


@dataclass(frozen=True)
class Cfr:
    """Spatial-frequency response of one channel sample (subcarriers x ports)."""

    data: np.ndarray
    subcarrier_spacing: float = DEFAULT_SCS_HZ
    sample_id: int = 0

    def __post_init__(self):
        data = np.array(self.data, dtype=np.complex128)
        if data.ndim != 2 or data.shape[0] < 1 or data.shape[1] < 1:
            raise InputError(f"Cfr data must be a non-empty 2-D matrix, got shape {data.shape}")
        if not np.all(np.isfinite(data)):
            raise InputError("Cfr data contains non-finite entries")
        if self.sample_id < 0:
            raise InputError("sample_id must be >= 0")
        data.flags.writeable = False
        object.__setattr__(self, "data", data)

    @property
    def n_subcarriers(self) -> int:
        return self.data.shape[0]

    @property
    def n_ports(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class DatasetMeta:
    """Provenance of a generated dataset: config digest plus the seed used."""

    config_hash: str
    seed: int


@dataclass(frozen=True)
class Dataset:
    """An ordered collection of channel samples sharing one grid.

    meta survives only in memory; the CFR1 container stores samples alone,
    so datasets read from disk come back with meta = None.
    """

    samples: tuple[Cfr, ...]
    meta: DatasetMeta | None = None

    def __post_init__(self):
        samples = tuple(self.samples)
        object.__setattr__(self, "samples", samples)
        if not samples:
            return
        shape = samples[0].data.shape
        scs = samples[0].subcarrier_spacing
        previous = -1
        for s in samples:
            if s.data.shape != shape:
                raise InputError(f"samples must share one (N, N_t) grid: {s.data.shape} != {shape}")
            if s.subcarrier_spacing != scs:
                raise InputError("samples must share one subcarrier spacing")
            if s.sample_id <= previous:
                raise InputError("sample_ids must be strictly increasing")
            previous = s.sample_id
        if samples[0].sample_id != 0:
            raise InputError("sample_ids must start at 0")

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)


def steering_vector(geometry: ArrayGeometry, azimuth_deg: float, zenith_deg: float) -> np.ndarray:
    """Unit-norm array response of a planar panel for one departure direction.

    The panel sits in the y-z plane, columns along y and rows along z, so
    broadside is +x (azimuth 0, zenith 90 deg). Co-located polarization
    ports share the geometric phase. Entries have magnitude 1/sqrt(n_ports).
    """
    if not (np.isfinite(azimuth_deg) and np.isfinite(zenith_deg)):
        raise InputError("steering angles must be finite")
    az = np.deg2rad(azimuth_deg)
    zen = np.deg2rad(zenith_deg)
    k_col = np.sin(zen) * np.sin(az)  # direction cosine along y
    k_row = np.cos(zen)               # direction cosine along z
    col_phase = np.arange(geometry.cols) * k_col
    row_phase = np.arange(geometry.rows) * k_row
    phase = 2.0 * np.pi * geometry.element_spacing * (row_phase[:, None] + col_phase[None, :])
    # Port order: row-major over the panel, polarization fastest.
    phase = np.repeat(phase.reshape(-1), geometry.polarizations)
    return np.exp(1j * phase) / np.sqrt(geometry.n_ports)


def generate_cir(profile: MultipathProfile, geometry: ArrayGeometry, seed) -> list[tuple[float, np.ndarray]]:
    """Draw one channel impulse response: a (delay, gain vector) tap per path.

    Each tap is sqrt(linear_power) * CN(0,1) fade on unit-modulus steering
    phases, so a path of linear power p carries mean energy p per port and
    the whole response has unit mean power per matrix entry. seed is
    anything numpy's default_rng accepts; a fixed (profile, geometry, seed)
    reproduces the taps bit for bit.
    """
    rng = np.random.default_rng(seed)
    powers = profile.linear_powers
    spread = profile.per_path_angular_spread_deg
    root_ports = np.sqrt(geometry.n_ports)
    taps = []
    for i in range(profile.n_paths):
        re, im = rng.standard_normal(2)
        fade = (re + 1j * im) / np.sqrt(2.0)
        jitter_az, jitter_zen = rng.standard_normal(2) * spread
        phases = root_ports * steering_vector(
            geometry,
            profile.azimuth_aod_deg[i] + jitter_az,
            profile.zenith_aod_deg[i] + jitter_zen,
        )
        taps.append((profile.path_delays[i], np.sqrt(powers[i]) * fade * phases))
    return taps


def cir_to_cfr(taps, n_subcarriers: int, scs: float, sample_id: int = 0) -> Cfr:
    """Sum tap responses over the subcarrier grid (frequency s * scs per row)."""
    if n_subcarriers < 1:
        raise InputError("n_subcarriers must be >= 1")
    if not (np.isfinite(scs) and scs > 0):
        raise InputError("scs must be a positive frequency in Hz")
    if not taps:
        raise InputError("taps must be non-empty")
    delays = np.array([t[0] for t in taps], dtype=float)
    gains = np.array([t[1] for t in taps], dtype=np.complex128)  # paths x ports
    freqs = np.arange(n_subcarriers, dtype=float) * float(scs)
    rotation = np.exp(-2j * np.pi * np.outer(freqs, delays))     # subcarriers x paths
    return Cfr(data=rotation @ gains, subcarrier_spacing=float(scs), sample_id=sample_id)


def generate_sample(profile, geometry, n_subcarriers, scs, seed: int, sample_id: int) -> Cfr:
    """One dataset sample; the RNG stream is keyed by (seed, sample_id), so
    samples can be produced independently and in any order."""
    taps = generate_cir(profile, geometry, seed=[seed, sample_id])
    return cir_to_cfr(taps, n_subcarriers, scs, sample_id=sample_id)


@dataclass(frozen=True)
class GenConfig:
    """Dataset-generation settings, readable and writable as key-value text."""

    profile: str = "low-spread-30ns"
    seed: int = 0
    count: int = 1
    rows: int = DEFAULT_GEOMETRY.rows
    cols: int = DEFAULT_GEOMETRY.cols
    polarizations: int = DEFAULT_GEOMETRY.polarizations
    element_spacing: float = DEFAULT_GEOMETRY.element_spacing
    n_subcarriers: int = DEFAULT_N_SUBCARRIERS
    scs_hz: float = DEFAULT_SCS_HZ

    def __post_init__(self):
        if self.seed < 0:
            raise ConfigError("seed: must be >= 0")
        if self.count < 0:
            raise ConfigError("count: must be >= 0")
        if self.n_subcarriers < 1:
            raise ConfigError("n_subcarriers: must be >= 1")
        if not (np.isfinite(self.scs_hz) and self.scs_hz > 0):
            raise ConfigError("scs_hz: must be > 0")
        try:
            self.geometry()
        except InputError as exc:
            raise ConfigError(str(exc)) from exc

    def geometry(self) -> ArrayGeometry:
        return ArrayGeometry(self.rows, self.cols, self.polarizations, self.element_spacing)

    def to_text(self) -> str:
        lines = [f"{f.name} = {getattr(self, f.name)}" for f in fields(self)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, source: str = "<gen-config>") -> "GenConfig":
        entries = parse_key_values(text, source=source)
        known = {f.name: f.type for f in fields(cls)}
        unknown = sorted(set(entries) - set(known))
        if unknown:
            raise ConfigError(f"{source}: unknown keys: {', '.join(unknown)}")
        kwargs = {}
        for key, value in entries.items():
            caster = float if key in ("element_spacing", "scs_hz") else (str if key == "profile" else int)
            try:
                kwargs[key] = caster(value)
            except ValueError as exc:
                raise ConfigError(f"{source}: {key}: cannot parse {value!r}") from exc
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path) -> "GenConfig":
        return cls.from_text(Path(path).read_text(), source=str(path))

    @property
    def config_hash(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()

    @property
    def dataset_id(self) -> str:
        stem = Path(self.profile).stem
        return f"{stem}-seed{self.seed}-n{self.count}"


def generate_dataset(cfg: GenConfig) -> Dataset:
    """Generate cfg.count samples. Sample i depends only on (cfg, i)."""
    profile = load_profile(cfg.profile)
    geometry = cfg.geometry()
    samples = tuple(
        generate_sample(profile, geometry, cfg.n_subcarriers, cfg.scs_hz, cfg.seed, i)
        for i in range(cfg.count)
    )
    return Dataset(samples=samples, meta=DatasetMeta(config_hash=cfg.config_hash, seed=cfg.seed))


def load_profile(name_or_path) -> MultipathProfile:
    """Resolve a stock profile name, or read a profile file from disk."""
    name_or_path = str(name_or_path)
    if name_or_path in STOCK_PROFILE_NAMES:
        text = resources.files("csipca").joinpath(f"profiles/{name_or_path}.profile").read_text()
        source = f"<stock:{name_or_path}>"
    elif Path(name_or_path).is_file():
        text = Path(name_or_path).read_text()
        source = name_or_path
    else:
        raise InputError(
            f"unknown profile {name_or_path!r}; stock profiles: {', '.join(STOCK_PROFILE_NAMES)}"
        )
    entries = parse_key_values(text, source=source)
    required = ("name", "delays_ns", "powers_db", "azimuth_aod_deg", "zenith_aod_deg")
    missing = sorted(set(required) - set(entries))
    if missing:
        raise ConfigError(f"{source}: missing keys: {', '.join(missing)}")

    def number_list(key):
        try:
            return tuple(float(tok) for tok in entries[key].split(","))
        except ValueError as exc:
            raise ConfigError(f"{source}: {key}: expected comma-separated numbers") from exc

    delays_s = tuple(v * 1e-9 for v in number_list("delays_ns"))
    try:
        spread = float(entries.get("angular_spread_deg", "0"))
    except ValueError as exc:
        raise ConfigError(f"{source}: angular_spread_deg: expected a number") from exc
    return MultipathProfile(
        name=entries["name"],
        path_delays=delays_s,
        path_powers_db=number_list("powers_db"),
        azimuth_aod_deg=number_list("azimuth_aod_deg"),
        zenith_aod_deg=number_list("zenith_aod_deg"),
        per_path_angular_spread_deg=spread,
    )


# --------------------------------------------------------------------------
# CFR1 container
#
#   header (32 bytes): magic "CFR1" | version u32 | N u32 | N_t u32
#                      | sample_count u64 | scs_hz f64
#   per sample:        sample_id u64 | N*N_t complex entries, row-major,
#                      each float64 real then float64 imag
#   everything little-endian
# --------------------------------------------------------------------------

_MAGIC = b"CFR1"
_VERSION = 1
_HEADER = struct.Struct("<4sIIIQd")
_SAMPLE_ID = struct.Struct("<Q")
COMPLEX_BYTES = 16


def save_dataset(dataset: Dataset, path) -> None:
    """Write a dataset to a CFR1 file. Empty datasets store a header with
    zero dimensions and zero spacing."""
    if dataset.samples:
        n, n_t = dataset.samples[0].data.shape
        scs = dataset.samples[0].subcarrier_spacing
    else:
        n = n_t = 0
        scs = 0.0
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, _VERSION, n, n_t, len(dataset.samples), scs))
        for sample in dataset.samples:
            fh.write(_SAMPLE_ID.pack(sample.sample_id))
            fh.write(complex_to_bytes(sample.data))


def load_dataset(path) -> Dataset:
    """Read a CFR1 file, validating structure as it goes.

    Raises FormatError with the byte offset of the first inconsistency.
    """
    blob = Path(path).read_bytes()
    if len(blob) < _HEADER.size:
        raise FormatError(f"file is {len(blob)} bytes, shorter than the {_HEADER.size}-byte header",
                          offset=len(blob))
    magic, version, n, n_t, sample_count, scs = _HEADER.unpack_from(blob, 0)
    if magic != _MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {_MAGIC!r}", offset=0)
    if version != _VERSION:
        raise FormatError(f"unsupported version {version}", offset=4)
    if sample_count > 0:
        if n == 0:
            raise FormatError("header declares zero subcarriers for a non-empty dataset", offset=8)
        if n_t == 0:
            raise FormatError("header declares zero ports for a non-empty dataset", offset=12)
    record_size = _SAMPLE_ID.size + n * n_t * COMPLEX_BYTES
    samples = []
    offset = _HEADER.size
    for i in range(sample_count):
        if offset + record_size > len(blob):
            raise FormatError(
                f"sample {i} truncated: record needs {record_size} bytes, "
                f"{len(blob) - offset} remain", offset=offset)
        (sample_id,) = _SAMPLE_ID.unpack_from(blob, offset)
        payload = blob[offset + _SAMPLE_ID.size: offset + record_size]
        data = complex_from_bytes(payload, (n, n_t))
        samples.append(Cfr(data=data, subcarrier_spacing=scs, sample_id=sample_id))
        offset += record_size
    if offset != len(blob):
        raise FormatError(f"{len(blob) - offset} trailing bytes after {sample_count} samples",
                          offset=offset)
    return Dataset(samples=tuple(samples), meta=None)
