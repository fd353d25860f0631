"""Generator and dataset I/O tests.

Oracles here are independent of the library code paths: steering phases are
recomputed element by element with scalar math, frequency responses with an
explicit double loop, and energy normalization with seeded Monte Carlo.
"""

import cmath
import math

import numpy as np
import pytest

from csipca import (ArrayGeometry, Cfr, Dataset, GenConfig, MultipathProfile,
                    DEFAULT_GEOMETRY, STOCK_PROFILE_NAMES, cir_to_cfr, generate_cir,
                    generate_dataset, generate_sample, load_dataset, load_profile,
                    save_dataset, steering_vector)
from csipca.errors import ConfigError, FormatError, InputError


def crandn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


# ---------------------------------------------------------------- steering

def steering_oracle(rows, cols, pols, spacing, az_deg, zen_deg):
    """Element-by-element phase computation with scalar math."""
    az = math.radians(az_deg)
    zen = math.radians(zen_deg)
    entries = []
    for r in range(rows):
        for c in range(cols):
            phase = 2.0 * math.pi * spacing * (r * math.cos(zen)
                                               + c * math.sin(zen) * math.sin(az))
            for _ in range(pols):
                entries.append(cmath.exp(1j * phase))
    return np.array(entries) / math.sqrt(rows * cols * pols)


def test_steering_broadside_pair():
    v = steering_vector(ArrayGeometry(1, 2, 1), azimuth_deg=0.0, zenith_deg=90.0)
    assert np.allclose(v, np.array([1.0, 1.0]) / np.sqrt(2), atol=1e-15)


def test_steering_matches_elementwise_oracle():
    geom = ArrayGeometry(2, 8, 2, element_spacing=0.5)
    v = steering_vector(geom, azimuth_deg=30.0, zenith_deg=95.0)
    oracle = steering_oracle(2, 8, 2, 0.5, 30.0, 95.0)
    assert np.max(np.abs(v - oracle)) < 1e-14


def test_steering_unit_norm_and_entry_magnitude():
    geom = ArrayGeometry(2, 8, 2)
    v = steering_vector(geom, azimuth_deg=-41.3, zenith_deg=101.7)
    assert abs(np.linalg.norm(v) - 1.0) < 1e-12
    assert np.allclose(np.abs(v), 1.0 / np.sqrt(32), atol=1e-12)


def test_steering_polarization_ports_colocated():
    # port order is row-major with polarization fastest, so entries pair up
    geom = ArrayGeometry(2, 8, 2)
    v = steering_vector(geom, azimuth_deg=17.0, zenith_deg=88.0)
    assert np.array_equal(v[0::2], v[1::2])


def test_steering_rejects_non_finite_angles():
    with pytest.raises(InputError):
        steering_vector(DEFAULT_GEOMETRY, float("nan"), 90.0)


def test_geometry_validation():
    with pytest.raises(InputError):
        ArrayGeometry(0, 8, 2)
    with pytest.raises(InputError):
        ArrayGeometry(2, 8, 3)
    with pytest.raises(InputError):
        ArrayGeometry(2, 8, 2, element_spacing=0.0)


# ---------------------------------------------------------------- profiles

def test_stock_profiles_load():
    low = load_profile("low-spread-30ns")
    high = load_profile("high-spread-300ns")
    assert low.n_paths == 5
    assert high.n_paths == 25
    assert abs(low.linear_powers.sum() - 1.0) < 1e-12
    assert abs(high.linear_powers.sum() - 1.0) < 1e-12
    assert max(low.path_delays) == pytest.approx(30e-9)
    assert max(high.path_delays) == pytest.approx(300e-9)


def test_unknown_profile_names_stock_options():
    with pytest.raises(InputError, match="low-spread-30ns"):
        load_profile("no-such-profile")


def test_profile_file_from_disk(tmp_path):
    text = ("name = custom\n"
            "delays_ns = 0, 100\n"
            "powers_db = 0, -3\n"
            "azimuth_aod_deg = 10, 20\n"
            "zenith_aod_deg = 90, 95\n"
            "angular_spread_deg = 1.5\n")
    path = tmp_path / "custom.profile"
    path.write_text(text)
    prof = load_profile(path)
    assert prof.name == "custom"
    assert prof.path_delays == pytest.approx((0.0, 100e-9))
    assert prof.per_path_angular_spread_deg == 1.5


def test_profile_missing_key(tmp_path):
    path = tmp_path / "bad.profile"
    path.write_text("name = bad\ndelays_ns = 0\npowers_db = 0\nazimuth_aod_deg = 0\n")
    with pytest.raises(ConfigError, match="zenith_aod_deg"):
        load_profile(path)


def test_profile_validation():
    with pytest.raises(InputError, match="nondecreasing"):
        MultipathProfile("x", (2e-9, 1e-9), (0, 0), (0, 0), (90, 90))
    with pytest.raises(InputError, match="path_powers_db"):
        MultipathProfile("x", (0.0, 1e-9), (0,), (0, 0), (90, 90))
    with pytest.raises(InputError):
        MultipathProfile("x", (), (), (), ())


def test_two_equal_paths_split_half():
    prof = MultipathProfile("pair", (0.0, 50e-9), (-3.0, -3.0), (0.0, 10.0), (90.0, 90.0))
    assert np.allclose(prof.linear_powers, [0.5, 0.5], atol=1e-15)


# ---------------------------------------------------------------- generate_cir

def test_generate_cir_deterministic():
    prof = load_profile("high-spread-300ns")
    a = generate_cir(prof, DEFAULT_GEOMETRY, seed=7)
    b = generate_cir(prof, DEFAULT_GEOMETRY, seed=7)
    assert len(a) == len(b) == 25
    for (da, ga), (db, gb) in zip(a, b):
        assert da == db
        assert np.array_equal(ga, gb)


def test_generate_cir_seed_changes_draw():
    prof = load_profile("low-spread-30ns")
    a = generate_cir(prof, DEFAULT_GEOMETRY, seed=1)
    b = generate_cir(prof, DEFAULT_GEOMETRY, seed=2)
    assert not np.allclose(a[0][1], b[0][1])


def test_single_path_tap_energy_monte_carlo():
    # one path at 0 dB: per-port tap energy |g|^2 / N_t averages to 1
    prof = MultipathProfile("single", (0.0,), (0.0,), (25.0,), (92.0,))
    geom = ArrayGeometry(1, 4, 2)
    total = 0.0
    n_seeds = 10_000
    for seed in range(n_seeds):
        (_, gain), = generate_cir(prof, geom, seed=seed)
        total += np.sum(np.abs(gain) ** 2) / geom.n_ports
    assert abs(total / n_seeds - 1.0) < 0.02


def test_tap_energy_split_follows_linear_powers():
    prof = MultipathProfile("pair", (0.0, 80e-9), (-3.0, -3.0), (5.0, -40.0), (90.0, 95.0))
    geom = ArrayGeometry(1, 4, 1)
    sums = np.zeros(2)
    n_seeds = 10_000
    for seed in range(n_seeds):
        taps = generate_cir(prof, geom, seed=seed)
        for i, (_, gain) in enumerate(taps):
            sums[i] += np.sum(np.abs(gain) ** 2) / geom.n_ports
    assert np.allclose(sums / n_seeds, [0.5, 0.5], atol=0.02)
    assert abs(sums.sum() / n_seeds - 1.0) < 0.02


# ---------------------------------------------------------------- cir_to_cfr

def test_cfr_matches_double_loop_oracle():
    rng = np.random.default_rng(3)
    n, n_t, n_paths = 6, 3, 4
    scs = 15e3
    delays = rng.uniform(0, 400e-9, n_paths)
    delays.sort()
    gains = crandn(rng, n_paths, n_t)
    taps = [(delays[p], gains[p]) for p in range(n_paths)]
    got = cir_to_cfr(taps, n, scs).data
    oracle = np.zeros((n, n_t), dtype=complex)
    for s in range(n):
        for t in range(n_t):
            acc = 0j
            for p in range(n_paths):
                acc += gains[p, t] * cmath.exp(-2j * math.pi * (s * scs) * delays[p])
            oracle[s, t] = acc
    assert np.max(np.abs(got - oracle)) < 1e-12 * np.max(np.abs(oracle))


def test_cfr_single_tap_at_zero_delay_is_flat():
    gain = np.array([1.0 + 2.0j, -0.5j])
    h = cir_to_cfr([(0.0, gain)], 8, 15e3).data
    assert np.allclose(h, np.tile(gain, (8, 1)), atol=1e-15)


def test_cfr_linear_in_taps():
    rng = np.random.default_rng(11)
    taps_a = [(50e-9, crandn(rng, 4)), (150e-9, crandn(rng, 4))]
    taps_b = [(90e-9, crandn(rng, 4))]
    lhs = cir_to_cfr(taps_a + taps_b, 16, 15e3).data
    rhs = cir_to_cfr(taps_a, 16, 15e3).data + cir_to_cfr(taps_b, 16, 15e3).data
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * np.max(np.abs(lhs))


def test_cfr_input_validation():
    with pytest.raises(InputError):
        cir_to_cfr([], 8, 15e3)
    with pytest.raises(InputError):
        cir_to_cfr([(0.0, np.ones(2))], 0, 15e3)
    with pytest.raises(InputError):
        cir_to_cfr([(0.0, np.ones(2))], 8, 0.0)


def test_mean_entry_power_is_one():
    # E[|H[s,t]|^2] = 1 for any profile: checked at 10^4 seeded samples
    prof = load_profile("low-spread-30ns")
    geom = ArrayGeometry(1, 4, 2)
    n = 32
    total = 0.0
    n_samples = 10_000
    for i in range(n_samples):
        h = generate_sample(prof, geom, n, 15e3, seed=99, sample_id=i)
        total += np.mean(np.abs(h.data) ** 2)
    assert abs(total / n_samples - 1.0) < 0.02


# ---------------------------------------------------------------- datasets

def test_generate_dataset_ids_and_meta():
    cfg = GenConfig(profile="low-spread-30ns", seed=5, count=4,
                    n_subcarriers=24, scs_hz=15e3)
    ds = generate_dataset(cfg)
    assert [s.sample_id for s in ds.samples] == [0, 1, 2, 3]
    assert ds.meta.seed == 5
    assert ds.meta.config_hash == cfg.config_hash
    # sample i depends only on (seed, i), not on the count
    solo = generate_sample(load_profile("low-spread-30ns"), cfg.geometry(), 24, 15e3, 5, 2)
    assert np.array_equal(ds.samples[2].data, solo.data)


def test_dataset_validation():
    h0 = Cfr(np.ones((4, 2)), 15e3, 0)
    h1 = Cfr(np.ones((4, 2)), 15e3, 1)
    with pytest.raises(InputError, match="strictly increasing"):
        Dataset((h1, h0.__class__(np.ones((4, 2)), 15e3, 1)))
    with pytest.raises(InputError, match="start at 0"):
        Dataset((h1,))
    with pytest.raises(InputError, match="share"):
        Dataset((h0, Cfr(np.ones((4, 3)), 15e3, 1)))
    Dataset(())  # empty is fine


def test_cfr_validation():
    with pytest.raises(InputError):
        Cfr(np.ones(4))
    with pytest.raises(InputError, match="non-finite"):
        Cfr(np.array([[np.nan, 0.0], [0.0, 0.0]]))


# ---------------------------------------------------------------- CFR1 format

def test_file_size_single_4x2_sample(tmp_path):
    # 32-byte header + 8-byte sample id + 4*2*16 payload = 168 bytes
    rng = np.random.default_rng(0)
    ds = Dataset((Cfr(crandn(rng, 4, 2), 15e3, 0),))
    path = tmp_path / "one.cfr1"
    save_dataset(ds, path)
    assert path.stat().st_size == 168


def test_roundtrip_bit_exact(tmp_path):
    rng = np.random.default_rng(42)
    samples = tuple(Cfr(crandn(rng, 5, 3), 30e3, i) for i in range(7))
    ds = Dataset(samples)
    path = tmp_path / "ds.cfr1"
    save_dataset(ds, path)
    back = load_dataset(path)
    assert len(back) == 7
    assert back.meta is None
    for a, b in zip(ds.samples, back.samples):
        assert a.sample_id == b.sample_id
        assert a.subcarrier_spacing == b.subcarrier_spacing
        assert a.data.tobytes() == b.data.tobytes()
    # save -> load -> save reproduces the bytes
    path2 = tmp_path / "ds2.cfr1"
    save_dataset(back, path2)
    assert path.read_bytes() == path2.read_bytes()


def test_empty_dataset_roundtrip(tmp_path):
    path = tmp_path / "empty.cfr1"
    save_dataset(Dataset(()), path)
    assert path.stat().st_size == 32
    assert len(load_dataset(path)) == 0


def test_bad_magic_offset_zero(tmp_path):
    path = tmp_path / "bad.cfr1"
    path.write_bytes(b"NOPE" + bytes(28))
    with pytest.raises(FormatError) as err:
        load_dataset(path)
    assert err.value.offset == 0


def test_short_header(tmp_path):
    path = tmp_path / "short.cfr1"
    path.write_bytes(b"CFR1\x01")
    with pytest.raises(FormatError, match="header"):
        load_dataset(path)


def test_unsupported_version_offset_four(tmp_path):
    rng = np.random.default_rng(1)
    path = tmp_path / "v9.cfr1"
    save_dataset(Dataset((Cfr(crandn(rng, 2, 2), 15e3, 0),)), path)
    blob = bytearray(path.read_bytes())
    blob[4] = 9
    path.write_bytes(bytes(blob))
    with pytest.raises(FormatError) as err:
        load_dataset(path)
    assert err.value.offset == 4


def test_truncated_sample_reports_record_offset(tmp_path):
    rng = np.random.default_rng(2)
    path = tmp_path / "trunc.cfr1"
    save_dataset(Dataset((Cfr(crandn(rng, 4, 2), 15e3, 0),
                          Cfr(crandn(rng, 4, 2), 15e3, 1))), path)
    blob = path.read_bytes()
    path.write_bytes(blob[:-10])  # cut into the second record
    with pytest.raises(FormatError) as err:
        load_dataset(path)
    assert err.value.offset == 32 + (8 + 4 * 2 * 16)  # start of sample 1


def test_trailing_bytes_rejected(tmp_path):
    rng = np.random.default_rng(3)
    path = tmp_path / "trail.cfr1"
    save_dataset(Dataset((Cfr(crandn(rng, 4, 2), 15e3, 0),)), path)
    path.write_bytes(path.read_bytes() + b"xx")
    with pytest.raises(FormatError, match="trailing"):
        load_dataset(path)


def test_zero_dims_with_samples_rejected(tmp_path):
    import struct
    path = tmp_path / "zero.cfr1"
    path.write_bytes(struct.pack("<4sIIIQd", b"CFR1", 1, 0, 2, 1, 15e3) + bytes(8))
    with pytest.raises(FormatError) as err:
        load_dataset(path)
    assert err.value.offset == 8


# ---------------------------------------------------------------- GenConfig

def test_gen_config_text_roundtrip():
    cfg = GenConfig(profile="high-spread-300ns", seed=9, count=12, n_subcarriers=48)
    again = GenConfig.from_text(cfg.to_text())
    assert again == cfg
    assert again.config_hash == cfg.config_hash


def test_gen_config_unknown_key():
    with pytest.raises(ConfigError, match="unknown keys"):
        GenConfig.from_text("profile = low-spread-30ns\nbogus = 1\n")


def test_gen_config_bad_value():
    with pytest.raises(ConfigError, match="seed"):
        GenConfig.from_text("seed = banana\n")
    with pytest.raises(ConfigError, match="count"):
        GenConfig(count=-1)


def test_stock_profile_names_stable():
    assert STOCK_PROFILE_NAMES == ("low-spread-30ns", "high-spread-300ns")
