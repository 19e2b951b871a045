#!/usr/bin/env python3
"""Independent oracle for the frozen expected values used by the C++ tests.

Every formula here is written directly from its mathematical definition with
exact rational arithmetic (fractions.Fraction) wherever the inputs are
rational, and with scipy adaptive quadrature for the normal-model values.
Nothing in this file shares code with the C++ implementation.

Run:  python3 tests/oracles/derive_values.py
"""
from fractions import Fraction as Fr
import math

from scipy import integrate, stats


def floor_frac(x: Fr) -> int:
    return x.numerator // x.denominator


# ----- templates (level beta, 1-indexed, a[0] = 0) -----------------------

def lr_template(n, g, beta):
    a = [Fr(0)]
    for i in range(1, n + 1):
        f = floor_frac(g * i)
        a.append(Fr(f + 1) * beta / (n + f + 1 - i))
    return a


def bh_template(n, beta):
    return [Fr(0)] + [Fr(i) * beta / n for i in range(1, n + 1)]


def gbs_template(n, beta):
    return [Fr(0)] + [Fr(i) * beta / (n - i * (1 - beta) + 1) for i in range(1, n + 1)]


# ----- index maps ---------------------------------------------------------

def big_m(n, n0, g):
    n1 = n - n0
    return min(n0, floor_frac(g * n1 / (1 - g)) + 1)


def m_map(n, n0, g, i):
    if i == 0:
        return 0
    n1 = n - n0
    sols = [j for j in range(0, n1 + 1) if floor_frac(g * j / (1 - g)) + 1 == i]
    return max(sols)


def m_star(n, g, i):
    if i == 0:
        return 0
    return max(j for j in range(1, n + 1) if floor_frac(g * j) + 1 <= i)


def m_tilde(n, n0, g, i):
    if i == 0:
        return 0
    return min(m_star(n, g, i), i + (n - n0))


def m_bar(n, n0, g, k, i):
    if i == 0:
        return 0
    return max(i, k) + m_map(n, n0, g, i)


# ----- rescaling constants -------------------------------------------------

def c1_sd(a, n, g, k):
    best = None
    for n0 in range(k, n + 1):
        for i in range(1, big_m(n, n0, g) + 1):
            v = Fr(n0) * a[max(i, k) + m_map(n, n0, g, i)] / max(i, k)
            best = v if best is None or v > best else best
    return best


def c1_su(a, n, g, k):
    best = None
    for n0 in range(k, n + 1):
        for i in range(k, n0 + 1):
            v = Fr(n0) * a[m_tilde(n, n0, g, i)] / i
            best = v if best is None or v > best else best
    return best


def c2_sd(a, n, g, k):
    best = None
    for n0 in range(k, n + 1):
        s = Fr(0)
        for i in range(1, big_m(n, n0, g) + 1):
            s += (a[m_bar(n, n0, g, k, i)] - a[m_bar(n, n0, g, k, i - 1)]) / max(i, k)
        v = n0 * s
        best = v if best is None or v > best else best
    return best


def c2_su(a, n, g, k):
    best = None
    for n0 in range(k, n + 1):
        s = a[m_tilde(n, n0, g, k)] / k
        for i in range(k + 1, n0 + 1):
            s += (a[m_tilde(n, n0, g, i)] - a[m_tilde(n, n0, g, i - 1)]) / i
        v = n0 * s
        best = v if best is None or v > best else best
    return best


def c_pairwise_lr(n, k, alpha, F):
    best = None
    for n0 in range(k, n + 1):
        b = [Fr(0)] + [Fr(i) * alpha / n0 for i in range(1, n0 + 1)]
        cond = lambda u, v: F(u, v) / v
        s = cond(b[k], b[k]) / (k - 1)
        for l in range(k, n0):
            s += (cond(b[l + 1], b[k]) - cond(b[l], b[k])) / l
        v = (n0 - 1) * s
        best = v if best is None or v > best else best
    return best


def c3_sd(a, n, g, k, F):
    """max over n0 of min over K of the four-term stepdown bound."""
    best = None
    for n0 in range(k, n + 1):
        M = big_m(n, n0, g)
        mb = lambda i: m_bar(n, n0, g, k, i)
        vals = []
        for K in range(1, M + 1):
            t = Fr(0)
            for i in range(1, K + 1):
                t += Fr(n0) * (a[mb(i)] - a[mb(i - 1)]) / max(i, k)
            for i in range(K + 2, M + 1):
                ik = max(i, k)
                t += Fr(n0 * (n0 - 1)) * (F(a[mb(i)], a[mb(i)]) - F(a[mb(i - 1)], a[mb(i - 1)])) / (ik * (ik - 1))
            if M >= K + 1:
                k1 = max(K + 1, k)
                t += Fr(n0 * (n0 - 1)) * F(a[mb(K + 1)], a[mb(K + 1)]) / (k1 * (k1 - 1))
                t -= Fr(n0) * F(a[mb(K)], a[mb(K + 1)]) / k1
            vals.append(t)
        v = min(vals)
        best = v if best is None or v > best else best
    return best


def c3_su(a, n, g, k, F):
    """max over n0 of min over K of the five-term stepup bound."""
    best = None
    for n0 in range(k, n + 1):
        mt = lambda i: m_tilde(n, n0, g, i)

        def G(r, s):
            return (F(a[mt(r)], a[mt(s)]) - F(a[mt(r - 1)], a[mt(s)])
                    - F(a[mt(r)], a[mt(s - 1)]) + F(a[mt(r - 1)], a[mt(s - 1)]))

        vals = []
        for K in range(k, n0 + 1):
            t = Fr(n0) * a[mt(k - 1)] / k
            for r in range(k, K + 1):
                t += Fr(n0) * (a[mt(r)] - a[mt(r - 1)]) / r
            for r in range(K + 1, n0 + 1):
                t += Fr(n0) * (a[mt(r)] - a[mt(r - 1)]) / (r * r)
                for s in range(r + 1, n0 + 1):
                    t += Fr(n0 * (n0 - 1)) * G(r, s) / (r * s)
                t += Fr(n0 * (n0 - 1)) * (F(a[mt(r)], a[mt(r)]) - F(a[mt(r)], a[mt(r - 1)])) / (r * r)
            vals.append(t)
        v = min(vals)
        best = v if best is None or v > best else best
    return best


def indep(u, v):
    return u * v


def bisect(fun, target, lo=1e-12, hi=1 - 1e-12):
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if fun(mid) > target:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def two_sided_tail_quadrature(u, v, rho):
    """P(|Z1| >= z_{u/2}, |Z2| >= z_{v/2}) by 2-D adaptive quadrature of the density."""
    a = stats.norm.isf(u / 2)
    b = stats.norm.isf(v / 2)
    c = 1.0 / (2 * math.pi * math.sqrt(1 - rho * rho))

    def dens(y, x):
        return c * math.exp(-(x * x - 2 * rho * x * y + y * y) / (2 * (1 - rho * rho)))

    total = 0.0
    inf = math.inf
    for (x0, x1) in [(a, inf), (-inf, -a)]:
        for (y0, y1) in [(b, inf), (-inf, -b)]:
            val, _ = integrate.dblquad(dens, x0, x1, y0, y1, epsabs=1e-14, epsrel=1e-12)
            total += val
    return total


def main():
    g10 = Fr(1, 10)
    alpha = Fr(1, 20)
    n = 10

    print("index maps n=10 n0=7 g=1/10:",
          "M =", big_m(10, 7, g10), "m(1) =", m_map(10, 7, g10, 1),
          "m*(1) =", m_star(10, g10, 1), "m~(1) =", m_tilde(10, 7, g10, 1))

    print("c1_sd LR k=1 n=10 g=1/10:", c1_sd(lr_template(n, g10, alpha), n, g10, 1))
    c = c1_sd(bh_template(n, alpha), n, g10, 1)
    print("c1_sd BH k=1 n=10 g=1/10:", c, float(c))
    c = c1_su(gbs_template(n, alpha), n, g10, 1)
    print("c1_su GBS k=1 n=10 g=1/10:", c, float(c))
    c = c2_sd(lr_template(n, g10, alpha), n, g10, 2)
    print("c2_sd LR k=2 n=10 g=1/10:", c, float(c))
    c = c2_su(lr_template(n, g10, alpha), n, g10, 2)
    print("c2_su LR k=2 n=10 g=1/10:", c, float(c))
    c = c_pairwise_lr(n, 2, alpha, indep)
    print("c_pairwise_lr indep k=2 n=10:", c, float(c))
    c = c_pairwise_lr(n, 3, alpha, lambda u, v: min(u, v))
    print("c_pairwise_lr comonotone k=3 n=10:", c, float(c))

    for nn in (4, 6):
        a = lr_template(nn, g10, alpha)
        c = c3_sd(a, nn, g10, 1, indep)
        print(f"c3_sd indep LR k=1 n={nn} g=1/10 at beta=alpha:", c, float(c))
        c = c3_su(a, nn, g10, 1, indep)
        print(f"c3_su indep LR k=1 n={nn} g=1/10 at beta=alpha:", c, float(c))
        a4 = lr_template(nn, Fr(1, 4), alpha)
        c = c3_sd(a4, nn, Fr(1, 4), 2, indep)
        print(f"c3_sd indep LR k=2 n={nn} g=1/4 at beta=alpha:", c, float(c))
        c = c3_su(a4, nn, Fr(1, 4), 2, indep)
        print(f"c3_su indep LR k=2 n={nn} g=1/4 at beta=alpha:", c, float(c))

    g4 = Fr(1, 4)
    for nn, kk in ((12, 1), (12, 2), (12, 3)):
        a = lr_template(nn, g4, alpha)
        c = c3_sd(a, nn, g4, kk, indep)
        print(f"c3_sd indep LR k={kk} n={nn} g=1/4 at beta=alpha:", c, float(c))
        c = c3_su(a, nn, g4, kk, indep)
        print(f"c3_su indep LR k={kk} n={nn} g=1/4 at beta=alpha:", c, float(c))
        c = c2_sd(a, nn, g4, kk)
        print(f"c2_sd LR k={kk} n={nn} g=1/4:", c, float(c))
        c = c2_su(a, nn, g4, kk)
        print(f"c2_su LR k={kk} n={nn} g=1/4:", c, float(c))

    # Calibration target: C3_SD(beta) = 0.05 under independence, n=10, g=1/10, k=1.
    def c3sd_beta(beta):
        b = Fr(beta)
        return float(c3_sd(lr_template(n, g10, b), n, g10, 1, indep))

    beta = bisect(c3sd_beta, 0.05)
    print("calibrated beta* (c3_sd, indep, n=10, g=1/10, k=1):", repr(beta), c3sd_beta(beta))

    def c3su_beta(beta):
        b = Fr(beta)
        return float(c3_su(lr_template(n, g10, b), n, g10, 1, indep))

    beta = bisect(c3su_beta, 0.05)
    print("calibrated beta* (c3_su, indep, n=10, g=1/10, k=1):", repr(beta), c3su_beta(beta))

    print("two-sided F(0.05, 0.05; rho=0.5) by quadrature:",
          repr(two_sided_tail_quadrature(0.05, 0.05, 0.5)))
    print("two-sided F(0.2, 0.01; rho=0.3) by quadrature:",
          repr(two_sided_tail_quadrature(0.2, 0.01, 0.3)))
    print("Phi2(0,0,0.5) arcsine identity:", 0.25 + math.asin(0.5) / (2 * math.pi))
    print("Phi2(1,-0.5,-0.7) scipy:",
          repr(stats.multivariate_normal(mean=[0, 0], cov=[[1, -0.7], [-0.7, 1]]).cdf([1, -0.5])))
    print("p-value at z=1.959964:", 2 * stats.norm.sf(1.959964))


if __name__ == "__main__":
    main()
