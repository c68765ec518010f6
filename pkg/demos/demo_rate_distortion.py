"""Walkthrough: is observed degradation rate-limited or badly coded?

Computes the capacity of a few textbook channels, traces the binary
Hamming rate-distortion curve with the Blahut iteration, and classifies
hypothetical encoder operating points against the theoretical bound.

Run:  python3 demos/demo_rate_distortion.py
"""

import math

import numpy as np

from qoelab import (
    DiscreteChannel,
    DistortionMatrix,
    SourceModel,
    channel_capacity,
    empirical_source,
    frame_distortion,
    operating_point_check,
    rd_curve,
)

print("channel capacities (Blahut iteration, tol 1e-9 bits)")
for name, matrix in [
    ("noiseless binary", [[1, 0], [0, 1]]),
    ("BSC crossover 0.1", [[0.9, 0.1], [0.1, 0.9]]),
    ("erasure 0.3", [[0.7, 0, 0.3], [0, 0.7, 0.3]]),
]:
    res = channel_capacity(DiscreteChannel(matrix))
    print(f"  {name:20s} {res.capacity:.9f} bits ({res.iterations} iterations)")

print("\nbinary Hamming rate-distortion curve vs closed form 1 - H(D)")
source = SourceModel([0.5, 0.5])
hamming = DistortionMatrix([[0.0, 1.0], [1.0, 0.0]])
curve = rd_curve(source, hamming, np.linspace(-6, -0.5, 8), tol=1e-12)
for pt in curve:
    h = -pt.distortion * math.log2(pt.distortion) \
        - (1 - pt.distortion) * math.log2(1 - pt.distortion)
    print(f"  D={pt.distortion:.4f}  R={pt.rate:.6f}  closed form {1 - h:.6f}")

print("\noperating-point verdicts against the curve")
for rate, dist in [(0.3, 0.05), (0.95, 0.25), (curve[3].rate, curve[3].distortion)]:
    verdict = operating_point_check(curve, rate, dist)
    print(f"  rate={rate:.3f} bits at D={dist:.3f}: {verdict}")

print("\nframe-level plumbing: histogram source model and PSNR")
rng = np.random.default_rng(0)
reference = rng.integers(0, 256, (64, 64), dtype=np.uint8)
noisy = np.clip(reference.astype(int) + rng.integers(-4, 5, reference.shape), 0, 255)
src = empirical_source(reference)
mse, psnr = frame_distortion(reference, noisy.astype(np.uint8))
print(f"  source entropy {src.entropy_bits():.3f} bits/sample, "
      f"MSE {mse:.3f}, PSNR {psnr:.2f} dB")
