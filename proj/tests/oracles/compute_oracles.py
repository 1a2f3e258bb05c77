"""Reference values frozen into the C++ unit tests.

Everything here is computed with mpmath at 30 digits, independently of the
library. Run: python3 tests/oracles/compute_oracles.py
"""
import mpmath as mp

mp.mp.dps = 30


def show(name, v):
    if isinstance(v, mp.mpc):
        print(f"{name}: {mp.nstr(v.real, 17)} {mp.nstr(v.imag, 17)}")
    else:
        print(f"{name}: {mp.nstr(v, 17)}")


# Fresnel-type integral over [10, 20]: ∫ e^{it²} dt
show("fresnel_10_20", mp.quad(lambda t: mp.expj(t * t), mp.linspace(10, 20, 200)))

# Generalized binomials
show("binom_2.5_3", mp.binomial(2.5, 3))
show("binom_2.5_4", mp.binomial(2.5, 4))
show("binom_3.7_6", mp.binomial(3.7, 6))


# Σ_{l≥L} l·|C(k,l)|, summed with Richardson/Euler acceleration
def series_tail(k, L):
    return mp.nsum(lambda l: l * abs(mp.binomial(k, l)), [L, mp.inf])


for k in (2.5, 3.7):
    for L in (5, 10, 20, 60):
        show(f"series_tail_{k}_{L}", series_tail(k, L))


# Unit bump h(1-u²)², u=(x-c)/s
def bump(c, s, h):
    return lambda x: h * (1 - ((x - c) / s) ** 2) ** 2 if abs(x - c) < s else mp.mpf(0)


b = bump(0, 1, 1)
show("bump_l1", mp.quad(b, [-1, 1]))
show("bump_moment_1.5", mp.quad(lambda x: abs(x) ** 1.5 * b(x), [-1, 0, 1]))
show("bump_llogl", mp.quad(lambda x: b(x) * mp.log(mp.e + b(x)), [-1, 0, 1]))
show("bump_deriv_l2", mp.sqrt(mp.quad(lambda u: (4 * u * (1 - u * u)) ** 2, [-1, 1])))
b2 = bump(0.7, 2.0, 1.5)
show("bump2_moment_1.5", mp.quad(lambda x: abs(x) ** 1.5 * b2(x), [-1.3, 0, 2.7]))
show("bump2_llogl", mp.quad(lambda x: b2(x) * mp.log(mp.e + b2(x)), [-1.3, 0.7, 2.7]))
show("bump2_l3", mp.quad(lambda x: b2(x) ** 3, [-1.3, 2.7]) ** (mp.mpf(1) / 3))

# Step function 1 on (-1,0), -3 on (0,2)
step_w = mp.quad(lambda x: (1 + abs(x) ** 1.5) * 1, [-1, 0]) + mp.quad(lambda x: (1 + x ** 1.5) * 3, [0, 2])
show("step_weighted_l1_1.5", step_w)
show("step_llogl", 1 * mp.log(mp.e + 1) + 2 * 3 * mp.log(mp.e + 3))

# Averages with oscillating phases (integrand e^{iγ(x−t)})
x, r = 2, 2.5
# window [x−r, x+r] = [−0.5, 4.5] clips the support to [−0.5, 1]
show("avg_char1_t3_x2_r2.5", abs(mp.quad(lambda t: mp.expj((x - t) ** 3), mp.linspace(-0.5, 1, 40))) / (2 * r))
x, r = 3, 4
show("avg_bump_abs2.5_x3_r4",
     abs(mp.quad(lambda t: b(t) * mp.expj(abs(x - t) ** 2.5), mp.linspace(-1, 1, 40))) / (2 * r))
x, r = 1, 1.5
show("avg_char1_sep_cos_x1_r1.5",
     abs(mp.quad(lambda t: mp.expj(mp.cos(x) * (x - t) ** 2), mp.linspace(-0.5, 1, 40))) / (2 * r))


# M_γ χ_[−1,1](x) for γ = t²: closed form through Fresnel integrals, maximised
# over r by a dense scan plus golden refinement.
def fres(a, b):
    # ∫_a^b e^{iu²} du
    k = mp.sqrt(2 / mp.pi)
    C = lambda u: mp.fresnelc(u * k) / k
    S = lambda u: mp.fresnels(u * k) / k
    return (C(b) - C(a)) + 1j * (S(b) - S(a))


def avg_t2(x, r):
    lo, hi = max(-1, x - r), min(1, x + r)
    if lo >= hi:
        return mp.mpf(0)
    return abs(fres(x - hi, x - lo)) / (2 * r)


def sup_t2(x):
    rs = [mp.mpf(10) ** (mp.mpf(i) / 2000 * 4 - 3) for i in range(2001)]
    vals = [avg_t2(x, r) for r in rs]
    i = max(range(len(vals)), key=lambda j: vals[j])
    lo, hi = rs[max(i - 1, 0)], rs[min(i + 1, len(rs) - 1)]
    g = (mp.sqrt(5) - 1) / 2
    for _ in range(200):
        a, c = hi - g * (hi - lo), lo + g * (hi - lo)
        if avg_t2(x, a) > avg_t2(x, c):
            hi = c
        else:
            lo = a
    return avg_t2(x, (lo + hi) / 2), (lo + hi) / 2


for x in (0.5, 3, 5):
    v, r = sup_t2(mp.mpf(x))
    show(f"M_t2_char1_x{x}", v)
    show(f"M_t2_char1_x{x}_rstar", r)

# Experiment constants
show("comparator_10", mp.fsum(1 / (k * mp.log(k + 1)) for k in range(1, 11)))
show("h1_partial_10", mp.fsum(1 / (k * mp.log(k + 1) ** 2) for k in range(1, 11)))
show("h1_series_bound", mp.fsum(1 / (k * mp.log(k + 1) ** 2) for k in range(1, 11)) + 1 / mp.log(10))
show("window_end_c6_d3_b1e-3", (1 / (2 * 6 * mp.mpf("1e-3"))) ** (mp.mpf(1) / 2))
show("decay_bound_x10", 2 / (mp.mpf(9.5) * 19))
show("llogl_A", mp.log(mp.e + 1) + mp.log(mp.e + 3))
show("weak_constant_ref", (11 + mp.sqrt(61)) / 12)
