#!/usr/bin/env python3
"""Generate high-precision reference values for the Rust test suites.

Evaluates closed forms with mpmath at 200-bit precision and prints them
as Rust constants/tables to stdout. The frozen copies live in the test
code; re-run this script to audit or regenerate them.

Usage: python3 tools/gen_reference_values.py
"""

import mpmath as mp

mp.mp.prec = 200  # bits


def fmt(x):
    return mp.nstr(x, 20)


def binary_kl(p, q):
    p, q = mp.mpf(p), mp.mpf(q)
    t1 = mp.mpf(0) if p == 0 else p * mp.log(p / q)
    t2 = mp.mpf(0) if p == 1 else (1 - p) * mp.log((1 - p) / (1 - q))
    return t1 + t2


def rhs_test_set(n, delta):
    return mp.log(1 / mp.mpf(delta)) / n


def rhs_occams_razor(n, delta, q):
    return (mp.log(1 / mp.mpf(q)) + mp.log(1 / mp.mpf(delta))) / n


def rhs_pac_bayes_point_mass(n, delta, q):
    return (mp.log(1 / mp.mpf(q)) + mp.log(2 * mp.sqrt(mp.mpf(n)) / mp.mpf(delta))) / n


def rhs_d_alpha(n, delta, q, alpha):
    a = mp.mpf(alpha)
    return (mp.log(1 / mp.mpf(q)) + a / (a - 1) * mp.log(1 / mp.mpf(delta))) / n


def rhs_hellinger_p(n, delta, q, p):
    p, q, delta = mp.mpf(p), mp.mpf(q), mp.mpf(delta)
    x = q ** (1 - p) * delta ** (-p)
    return mp.log(x - 1) / ((p - 1) * n)


def rhs_chi_squared(n, delta, q):
    q, delta = mp.mpf(q), mp.mpf(delta)
    return (mp.log((1 + q) / q) + 2 * mp.log(1 / delta)) / n


def main():
    print("// ---- binary KL ----")
    print(f"binary_kl(0.1, 0.4) = {fmt(binary_kl(mp.mpf('0.1'), mp.mpf('0.4')))}")
    print(f"ln(2)               = {fmt(mp.log(2))}")

    print("\n// ---- change-of-measure bound examples ----")
    print(f"sqrt(0.4)        = {fmt(mp.sqrt(mp.mpf('0.4')))}")
    print(f"sqrt(1.0625/11)  = {fmt(mp.sqrt(mp.mpf('1.0625') / 11))}")
    print(f"sqrt(0.4125)     = {fmt(mp.sqrt(mp.mpf('0.4125')))}")

    print("\n// ---- bound RHS values at n=100, delta=0.025, q=1/50 ----")
    n, d, q = 100, mp.mpf('0.025'), mp.mpf(1) / 50
    print(f"test_set             = {fmt(rhs_test_set(n, d))}")
    print(f"occams_razor         = {fmt(rhs_occams_razor(n, d, q))}")
    print(f"d_alpha(10)          = {fmt(rhs_d_alpha(n, d, q, 10))}")
    print(f"hellinger_p(10)      = {fmt(rhs_hellinger_p(n, d, q, 10))}")
    print(f"pac_bayes_point_mass = {fmt(rhs_pac_bayes_point_mass(n, d, q))}")
    print(f"chi_squared          = {fmt(rhs_chi_squared(n, d, q))}")
    print(f"chi_squared(q=0.5)   = {fmt(rhs_chi_squared(n, d, mp.mpf('0.5')))}")
    print(f"pac_bayes(n=400)     = {fmt(rhs_pac_bayes_point_mass(400, d, q))}")
    print(f"occam risk at L=0    = {fmt(1 - mp.exp(-rhs_occams_razor(n, d, q)))}")
    print(f"d_alpha(1e7)         = {fmt(rhs_d_alpha(n, d, q, mp.mpf(10) ** 7))}")

    print("\n// ---- population loss of the generating weights (1-D reduction) ----")
    # L(w*) for w*=(0.5,0.5): u = x.w* ~ N(0, s^2), s = |w*|; predictor sign(u).
    # L = E[sigma(u) 1{u<=0}] + E[(1-sigma(u)) 1{u>0}] = 2 E[sigma(u) 1{u<0}].
    s = mp.sqrt(mp.mpf('0.5'))
    f = lambda u: mp.npdf(u, 0, s) / (1 + mp.exp(-u))
    val = 2 * mp.quad(f, [-mp.inf, 0])
    print(f"L(w_star), w_star=(0.5,0.5) = {fmt(val)}")
    print(f"risk at L=0, test_set budget = {fmt(1 - mp.exp(-rhs_test_set(100, mp.mpf('0.025'))))}")

    print("\n// ---- Hellinger RHS 200-bit reference grid ----")
    print("// (n, delta, q_min, p, expected)")
    deltas = [mp.mpf('1e-9'), mp.mpf('1e-6'), mp.mpf('0.001'),
              mp.mpf('0.025'), mp.mpf('0.3'), mp.mpf('0.6'), mp.mpf('0.9')]
    qs = [mp.mpf('1e-9'), mp.mpf('1e-4'), mp.mpf('0.02'),
          mp.mpf('0.2'), mp.mpf('0.9')]
    ps = [mp.mpf('1.0001'), mp.mpf('1.5'), mp.mpf('2'), mp.mpf('10'),
          mp.mpf('1000'), mp.mpf('1e7')]
    ns = [1, 100, 10**6]
    rows = []
    i = 0
    while len(rows) < 50:
        dd = deltas[i % len(deltas)]
        qq = qs[(i // len(deltas)) % len(qs)]
        pp = ps[(i * 3 + 1) % len(ps)]
        nn = ns[i % len(ns)]
        rows.append((nn, dd, qq, pp))
        i += 1
    for (nn, dd, qq, pp) in rows:
        v = rhs_hellinger_p(nn, dd, qq, pp)
        print(f"({nn}, {fmt(dd)}, {fmt(qq)}, {fmt(pp)}, {fmt(v)}),")


if __name__ == "__main__":
    main()
