"""Walkthrough: Fisher-transform confidence intervals for correlations.

Shows how the interval tightens with the number of paired observations
and how the arctanh transform keeps the bounds inside (-1, 1) even for
strong correlations.

Run:  python3 demos/demo_confidence_intervals.py
"""

from qoelab import fisher_ci, pearson

print("95% CI for r = 0.9 as n grows")
for n in (5, 10, 30, 100, 300):
    ci = fisher_ci(0.9, n)
    print(f"  n={n:4d}  [{ci.low:.4f}, {ci.high:.4f}]  width {ci.high - ci.low:.4f}")

print("\nstrong correlations stay inside (-1, 1)")
for r in (0.99, 0.999, -0.999):
    ci = fisher_ci(r, 30)
    print(f"  r={r:+.3f}  [{ci.low:+.6f}, {ci.high:+.6f}]")

print("\ncorrelation of two noisy gradings of the same material")
x = [1.2, 2.1, 2.9, 3.8, 4.1, 3.2, 2.4, 1.8]
y = [1.4, 2.0, 3.1, 3.6, 4.3, 3.0, 2.6, 1.7]
r = pearson(x, y)
ci = fisher_ci(r, len(x))
print(f"  r = {r:.4f}, 95% CI [{ci.low:.4f}, {ci.high:.4f}] from n = {len(x)} pairs")
