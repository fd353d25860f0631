"""Numerical check that the stock profiles hit their design targets.

Run from the repo root: python3 scripts/tune_profiles.py
"""

import time

import numpy as np

from csipca import (choose_components, gcs, load_profile, pca_fit,
                    generate_sample, select_taps, subband_average,
                    subband_eigenvectors, to_angular_delay, compress,
                    reconstruct, quantize_report, embed_taps, from_angular_delay,
                    TapChannel, DEFAULT_GEOMETRY)

N = 624
SCS = 15e3
N_SAMPLES = 1000


def ad_needed(sample, l_taps):
    taps = select_taps(to_angular_delay(sample), l_taps)
    return choose_components(pca_fit(taps.data), 0.99)


def ev_needed(sample):
    ev = subband_eigenvectors(subband_average(sample, 13))
    return choose_components(pca_fit(ev.data), 0.99)


def main():
    t0 = time.perf_counter()
    low = load_profile("low-spread-30ns")
    high = load_profile("high-spread-300ns")
    geom = DEFAULT_GEOMETRY

    low_ad, low_ev, high_ev = [], [], []
    high_gcs = {1: [], 2: [], 3: []}
    for i in range(N_SAMPLES):
        s_low = generate_sample(low, geom, N, SCS, seed=11, sample_id=i)
        s_high = generate_sample(high, geom, N, SCS, seed=12, sample_id=i)
        low_ad.append(ad_needed(s_low, 5))
        low_ev.append(ev_needed(s_low))
        high_ev.append(ev_needed(s_high))
        taps = select_taps(to_angular_delay(s_high), 25)
        basis = pca_fit(taps.data)
        for k in (1, 2, 3):
            rec = reconstruct(compress(taps.data, basis, k))
            high_gcs[k].append(gcs(rec, taps.data))

    low_ad = np.array(low_ad)
    low_ev = np.array(low_ev)
    high_ev = np.array(high_ev)
    print(f"low  AD comps @0.99: frac<=2 {np.mean(low_ad <= 2):.3f} "
          f"(histogram {np.bincount(low_ad)[1:]})")
    print(f"low  EV comps @0.99: frac<=3 {np.mean(low_ev <= 3):.3f} "
          f"(histogram {np.bincount(low_ev)[1:]})")
    print(f"high EV comps @0.99: frac<=3 {np.mean(high_ev <= 3):.3f} "
          f"(histogram {np.bincount(high_ev)[1:]})")
    means = {k: np.mean(v) for k, v in high_gcs.items()}
    print(f"high AD domain GCS means: k1 {means[1]:.4f} k2 {means[2]:.4f} k3 {means[3]:.4f}")
    print(f"  ordering ok: {means[3] > means[2] > means[1]}, k3 >= 0.95: {means[3] >= 0.95}")

    # quantization sweep on 200 high-spread samples, k=3, full-band GCS
    qs = [4, 6, 8, 16, None]
    sums = {q: 0.0 for q in qs}
    for i in range(200):
        s = generate_sample(high, geom, N, SCS, seed=13, sample_id=i)
        taps = select_taps(to_angular_delay(s), 25)
        basis = pca_fit(taps.data)
        report = compress(taps.data, basis, 3)
        for q in qs:
            r = quantize_report(report, q) if q else report
            rebuilt = from_angular_delay(embed_taps(TapChannel(
                data=reconstruct(r), tap_indices=taps.tap_indices, n_full=N)))
            sums[q] += gcs(rebuilt.data, s.data)
    means_q = {q: sums[q] / 200 for q in qs}
    print("quant sweep (mean full-band GCS):",
          {str(q): round(v, 6) for q, v in means_q.items()})
    seq = [means_q[q] for q in qs]
    print(f"  nondecreasing: {all(a <= b + 1e-12 for a, b in zip(seq, seq[1:]))}, "
          f"q16 vs off: {abs(means_q[16] - means_q[None]):.2e}")
    print(f"elapsed {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
