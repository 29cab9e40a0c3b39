"""Independent oracles used to freeze expected values and cross-check the library.

Everything in here is deliberately dumb and self-contained: no imports from
oscillabound, plain formulas only.  If an oracle and the library disagree, the
burden of proof is on the library.
"""

import cmath
import math
from fractions import Fraction

import numpy as np


def simpson_mu_hat(coeffs, a, T, tol=1e-12, n0=64, max_doublings=24):
    """Fixed-step composite Simpson for (1/(T-a)) * int_a^T cos(2*pi*Phi) dt.

    coeffs: dict {j: c_j} with Phi(t) = sum c_j * exp(j*t).  Doubles the step
    count until two successive values agree to tol.
    """
    items = sorted(coeffs.items())

    def integrand(t):
        phi = sum(float(c) * math.exp(j * t) for j, c in items)
        return math.cos(2.0 * math.pi * phi)

    def simpson(n):
        h = (T - a) / n
        ts = np.linspace(a, T, n + 1)
        phi = np.zeros_like(ts)
        for j, c in items:
            phi += float(c) * np.exp(j * ts)
        ys = np.cos(2.0 * np.pi * phi)
        s = ys[0] + ys[-1] + 4.0 * ys[1:-1:2].sum() + 2.0 * ys[2:-2:2].sum()
        return s * h / 3.0

    prev = simpson(n0)
    n = n0
    for _ in range(max_doublings):
        n *= 2
        cur = simpson(n)
        if abs(cur - prev) <= tol:
            return cur / (T - a)
        prev = cur
    raise RuntimeError("simpson oracle did not stabilize")


def brute_force_ball_sum(poly_coeffs, prime, r, K):
    """Average of psi(g(s)) over the ball p^{-r} Z_p, sampled mod p^K.

    poly_coeffs: dict {j: Fraction} for g(s) = sum_j g_j s^j (the full phase,
    lambda already multiplied in).  Samples s = p^{-r} u for u = 0..p^K-1 and
    returns the plain average of exp(2*pi*i*{g(s)}_p) — exact (up to float
    roundoff) as soon as K >= max_j (r*j - v_p(g_j)).

    The fractional-part computation is exact integer arithmetic: each term
    g_j p^{-r j} is written as A_j / (p^k * Q) with p not dividing Q; the
    fractional part of P(u)/(p^k Q) only depends on P(u) * Qinv mod p^k.
    """
    if not poly_coeffs:
        return complex(p_pow := 1.0)
    # write sum_j g_j p^{-rj} u^j over a common denominator p^k * Q
    k = 0
    Q = 1
    terms = []
    for j, c in poly_coeffs.items():
        if c == 0:
            continue
        num = c.numerator * pow(prime, max(0, -r * j)) if r < 0 else c.numerator
        den = c.denominator * (pow(prime, r * j) if r >= 0 else 1)
        if r < 0:
            den = c.denominator
        # normalize: value = num/den with den = p^e * d, gcd(d, p) = 1
        e = 0
        while den % prime == 0:
            den //= prime
            e += 1
        while num % prime == 0 and e > 0:
            num //= prime
            e -= 1
        terms.append((j, num, den, e))
        k = max(k, e)
        Q = Q * den // math.gcd(Q, den)
    if not terms:
        return 1.0 + 0.0j
    pk = prime**k
    mod = pk * Q
    qinv_num = {}
    coeffs_mod = {}
    for j, num, den, e in terms:
        scale = (pk // prime**e) * (Q // den)
        coeffs_mod[j] = (num * scale) % mod
    qinv = pow(Q, -1, pk) if k > 0 else 0
    # the phase is periodic in u mod p^k exactly; sampling fewer residues than
    # that averages over a strict subgroup and biases the result, so raise K
    # to the resolution depth whenever the caller's choice under-samples
    n = prime ** max(K, k)
    u = np.arange(n, dtype=object) if n > 2**20 else np.arange(n, dtype=np.int64)
    # Horner mod (pk * Q), then multiply by Qinv mod pk to read the p-part
    maxdeg = max(coeffs_mod)
    acc = np.zeros_like(u)
    for j in range(maxdeg, 0, -1):
        acc = (acc + coeffs_mod.get(j, 0)) % mod
        acc = (acc * u) % mod
    acc = (acc + coeffs_mod.get(0, 0)) % mod
    if k == 0:
        return 1.0 + 0.0j
    frac = ((acc % pk) * qinv) % pk
    phases = np.exp(2j * np.pi * np.asarray(frac, dtype=np.float64) / pk)
    return complex(phases.mean())


def brute_force_sphere_sum(poly_coeffs, prime, r, K):
    """Sum of psi over the sphere |s| = p^r, via ball(r) - ball(r-1).

    Returns the *sum* normalized the way a sphere character sum is: measure of
    the ball p^{-r} is p^r when haar(Z_p)=1 and we sum, i.e. the unnormalized
    integral over the sphere times p^{r}... concretely:
        S_r = p^r * avg_ball(r) - p^{r-1} * avg_ball(r-1)
    which is the integral of psi over the sphere scaled so that S_r at
    lambda=0 equals |C_r| / p^0 = p^r - p^{r-1}.
    """
    scaled = {j: Fraction(c) for j, c in poly_coeffs.items()}
    ball_r = brute_force_ball_sum(scaled, prime, r, K)
    ball_r1 = brute_force_ball_sum(scaled, prime, r - 1, max(K - 1, 0))
    return (prime**r) * ball_r - (prime ** (r - 1)) * ball_r1


def eval_poly_fraction(coeffs, x):
    """Horner evaluation of a coefficient list [a0, a1, ...] at a Fraction."""
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def poly_real_roots(coeffs, lo, hi):
    """All real roots of sum a_i x^i inside (lo, hi), via numpy eigenvalues."""
    cs = [float(c) for c in coeffs]
    while cs and cs[-1] == 0.0:
        cs.pop()
    if len(cs) <= 1:
        return []
    roots = np.roots(list(reversed(cs)))
    out = []
    for z in roots:
        if abs(z.imag) < 1e-9 and lo < z.real < hi:
            out.append(float(z.real))
    return sorted(out)


if __name__ == "__main__":
    # Freeze run: numbers printed here get copied into the test files.
    val = simpson_mu_hat({1: Fraction(1, 100)}, 1.0, 2.0)
    print("simpson mu_hat f=(x,x^2), lam=(0.01,0), window (1,2):", repr(val))

    # worked p-adic example p=3, f=(s,s^2), lam=(3,0): phase 3s
    s1 = brute_force_sphere_sum({1: Fraction(3)}, 3, 1, 4)
    s2 = brute_force_sphere_sum({1: Fraction(3)}, 3, 2, 4)
    print("sphere sums r=1, r=2 for phase 3s over Q_3:", s1, s2)
    L = 2 * (2 - 1 + 1) * (1 - Fraction(1, 3))
    total = (Fraction(1, 3) * 2 * s1.real + Fraction(1, 9) * 2 * s2.real) / L
    print("worked mu_hat:", total)

    # spot sphere sums used as frozen unit values
    print("p=3 phase s/3, r=0:", brute_force_sphere_sum({1: Fraction(1, 3)}, 3, 0, 3))
    print("p=3 phase s/9, r=1:", brute_force_sphere_sum({1: Fraction(1, 9)}, 3, 1, 4))
    print("p=2 phase s^2/4, r=0:", brute_force_sphere_sum({2: Fraction(1, 4)}, 2, 0, 4))

    # coarse grid scan: does f=(x,x^2) on window (1,2) admit mu_hat < 0?
    best = (1.0, None)
    for e1 in range(-3, 3):
        for s1g in (-1, 1):
            for e2 in range(-3, 3):
                for s2g in (-1, 1):
                    lam1 = s1g * 10.0**e1
                    lam2 = s2g * 10.0**e2
                    v = simpson_mu_hat({1: lam1, 2: lam2}, 1.0, 2.0, tol=1e-9)
                    if v < best[0]:
                        best = (v, (lam1, lam2))
    print("coarse-grid minimum for f=(x,x^2), window (1,2):", best)
