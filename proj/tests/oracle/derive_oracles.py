#!/usr/bin/env python3
"""Independent high-precision reference values for the unit tests.

Everything here is computed from scratch with mpmath (brute-force sums,
closed forms, root finding) and shares no code with the C++ library.
Running it prints the constants frozen in tests/support/oracle_values.hpp.
"""
import itertools

from mpmath import mp, mpf, exp, log, e, findroot, quad

mp.dps = 40


def partition_function(q, n, beta):
    # Z = q^{-2n} sum exp(-beta H), H = -(1/n) sum_{i,j} [sigma_i == tau_j]
    total = mpf(0)
    for cfg in itertools.product(range(q), repeat=2 * n):
        left, right = cfg[:n], cfg[n:]
        overlap = sum(1 for a in left for b in right if a == b)
        total += exp(beta * mpf(overlap) / n)
    return total / mpf(q) ** (2 * n)


def rel_entropy(nu):
    q = len(nu)
    return sum(x * log(x * q) for x in nu if x > 0)


def alpha(beta, g, n):
    return beta * sum(a * b for a, b in zip(g, n)) - rel_entropy(g) - rel_entropy(n)


def softmax(z, beta):
    w = [exp(beta * x) for x in z]
    s = sum(w)
    return [x / s for x in w]


def g_variation(a, b, beta):
    # sum_k int_0^1 |<b - a, grad g_k((1-t) a + t b)>| dt
    q = len(a)
    d = [y - x for x, y in zip(a, b)]

    def density(t):
        z = [(1 - t) * x + t * y for x, y in zip(a, b)]
        g = softmax(z, beta)
        acc = mpf(0)
        for k in range(q):
            acc += abs(sum(beta * g[k] * ((1 if k == j else 0) - g[j]) * d[j] for j in range(q)))
        return acc

    return quad(density, [0, 1])


def beta_s(q):
    # Tangency h = h' = 0 of h(t) = e^{bt} / (e^{bt} + (q-1) e^{b(1-t)/(q-1)}) - t.
    # Eliminating b gives b = (q-1) / (q t (1-t)) and a single equation in t.
    def eq(t):
        return (1 - q * t) / (q * t * (1 - t)) - log((1 - t) / (t * (q - 1)))

    t = findroot(eq, {3: 0.58, 4: 0.5, 5: 0.45}[q])
    return (q - 1) / (q * t * (1 - t)), t


def s_root(beta, q):
    return findroot(lambda s: (1 - exp(-beta * s)) / (1 + (q - 1) * exp(-beta * s)) - s, mpf("0.999"))


def main():
    out = {}
    out["Z_q3_n2_beta1"] = partition_function(3, 2, mpf(1))
    out["Z_q2_n1_beta1p3"] = partition_function(2, 1, mpf("1.3"))
    out["Z_q2_n2_beta0p7"] = partition_function(2, 2, mpf("0.7"))
    g = [mpf("0.6"), mpf("0.2"), mpf("0.2")]
    out["alpha_beta2_diag_0p6"] = alpha(mpf(2), g, g)
    out["alpha_beta1p5_mixed"] = alpha(mpf("1.5"), [mpf("0.5"), mpf("0.3"), mpf("0.2")],
                                       [mpf("0.1"), mpf("0.1"), mpf("0.8")])
    out["lmgf_e1_zero"] = log((e + 2) / 3)
    gv = softmax([mpf(1), mpf(0), mpf(0)], mpf(2))
    out["g_q3_beta2_e1_first"] = gv[0]
    out["g_q3_beta2_e1_rest"] = gv[1]
    third = mpf(1) / 3
    out["Dg_q3_beta1_rho_to_0p8"] = g_variation([third] * 3, [mpf("0.8"), mpf("0.1"), mpf("0.1")], mpf(1))
    out["rel_entropy_half_half_zero"] = rel_entropy([mpf("0.5"), mpf("0.5"), mpf(0)])
    out["beta_c_q3"] = 4 * log(2)
    out["beta_c_q4"] = 3 * log(3)
    for q in (3, 4, 5):
        b, t = beta_s(q)
        out[f"beta_s_q{q}"] = b
        out[f"t_star_q{q}"] = t
    out["s_q3_beta10"] = s_root(mpf(10), 3)
    out["s_q3_beta3"] = s_root(mpf(3), 3)
    for k, v in out.items():
        print(f"{k} = {mp.nstr(v, 25)}")


if __name__ == "__main__":
    main()
