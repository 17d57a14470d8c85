"""Exceptional rho^2 values for CHM with F = 0 via sympy.

For every triad k1 + k2 = k in [-K, K]^2 with m1 m2 m != 0, solves
omega(k1) + omega(k2) = omega(k) in x = rho^2 directly from
omega_k = -m rho / (m^2 + n^2 rho^2 + F rho^2) (the common factor -rho is
divided out) and keeps the positive real roots.

usage: python3 chm_exceptional.py K [F]
prints the number of distinct values followed by each value (sorted, 17 digits).
"""
import sys

import sympy as sp


def exceptional(K, F=sp.Integer(0)):
    x = sp.symbols("x", positive=True)
    w = lambda m, n: sp.Rational(m) / (m * m + (n * n + F) * x)
    pts = [(m, n) for m in range(-K, K + 1) for n in range(-K, K + 1)]
    roots = set()
    for i, (m1, n1) in enumerate(pts):
        for (m2, n2) in pts[i:]:
            m, n = m1 + m2, n1 + n2
            if abs(m) > K or abs(n) > K or m1 * m2 * m == 0:
                continue
            eq = sp.together(w(m1, n1) + w(m2, n2) - w(m, n))
            num = sp.numer(eq)
            if sp.expand(num) == 0:
                continue
            for r in sp.solve(num, x):
                r = sp.nsimplify(r)
                if r.is_real and r > 0:
                    roots.add(sp.radsimp(r))
    return sorted(roots, key=lambda r: float(r))


if __name__ == "__main__":
    K = int(sys.argv[1])
    F = sp.Rational(sys.argv[2]) if len(sys.argv) > 2 else sp.Integer(0)
    vals = exceptional(K, F)
    print(len(vals))
    for v in vals:
        print(f"{float(v):.17g} {v}")
