"""Thin-shell Monte Carlo for the measure of the resonant manifold.

The manifold of k is parametrized by p = k1 - k, q = k2 - k with p . q = 0;
its measure is the limit of vol{|2 p . q| < eta} / (2 eta) as eta -> 0, the
thin-shell form of the frequency delta (|k1|^2 + |k2|^2 - |k|^2 - |k3|^2 = 2 p . q). Estimates
the measure of {|p| <= 1, |q| <= 1} in R^d x R^d by sampling p, q uniformly
in the unit balls, independently of the library's chart.

usage: python3 manifold_volume.py d [samples] [eta]
"""
import math
import sys

import numpy as np


def ball(n, d, rng):
    x = rng.normal(size=(n, d))
    x /= np.linalg.norm(x, axis=1)[:, None]
    return x * rng.random(n)[:, None] ** (1.0 / d)


def thin_shell(d, n, eta, seed=0):
    rng = np.random.default_rng(seed)
    vol = (math.pi ** (d / 2) / math.gamma(d / 2 + 1)) ** 2
    hits = 0
    chunk = 1_000_000
    for start in range(0, n, chunk):
        m = min(chunk, n - start)
        p, q = ball(m, d, rng), ball(m, d, rng)
        hits += int((np.abs(2.0 * (p * q).sum(1)) < eta).sum())
    frac = hits / n
    return vol * frac / (2 * eta), vol * math.sqrt(frac * (1 - frac) / n) / (2 * eta)


if __name__ == "__main__":
    d = int(sys.argv[1])
    n = int(float(sys.argv[2])) if len(sys.argv) > 2 else 20_000_000
    eta = float(sys.argv[3]) if len(sys.argv) > 3 else 1e-3
    est, se = thin_shell(d, n, eta)
    print(f"{est:.6f} {se:.6f}")
