# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled batch simulator.

Mirrors ``dynamics.simulate_path`` operation for operation (same libm calls,
same evaluation order) so both backends produce identical floats.
"""

from libc.math cimport exp, expm1, log, log1p, fabs, isinf
from libc.stdint cimport uint32_t, uint64_t, int32_t, int8_t

import numpy as np

cdef uint32_t PHILOX_M0 = 0xD2511F53
cdef uint32_t PHILOX_M1 = 0xCD9E8D57
cdef uint32_t PHILOX_W0 = 0x9E3779B9
cdef uint32_t PHILOX_W1 = 0xBB67AE85
cdef double INV_2_32 = 1.0 / 4294967296.0
cdef uint64_t MASK32 = 0xFFFFFFFFUL


cdef struct Model:
    double mu0, q0, q1, lam0, lam1, lamhat0, lamhat1, rho, eta, beta, eps
    int cost_code
    double c1, c2, cap
    int rule_code
    double r1, r2
    int mode, edu_on, theta_pin, horizon
    double L_U0, L_E0
    uint32_t key0, key1
    int check_h
    double h_delta, h_pstar
    int stop_at_break


cdef struct Out:
    int8_t* theta
    int32_t* n_edu
    int32_t* onset
    int32_t* break_k
    int32_t* violation_k
    int8_t* cascade_action
    double* W
    double* W_lb
    double* outlay
    int32_t* outlay_n
    double* L_U
    double* L_E
    int8_t* e1
    int32_t* sd_edu_n
    int32_t* sd_edu_correct


cdef inline void philox(uint32_t* c, uint32_t k0, uint32_t k1) noexcept nogil:
    cdef uint64_t p0, p1
    cdef uint32_t c0 = c[0], c1 = c[1], c2 = c[2], c3 = c[3]
    cdef int i
    for i in range(10):
        p0 = <uint64_t>PHILOX_M0 * c0
        p1 = <uint64_t>PHILOX_M1 * c2
        c0 = <uint32_t>(p1 >> 32) ^ c1 ^ k0
        c1 = <uint32_t>p1
        c2 = <uint32_t>(p0 >> 32) ^ c3 ^ k1
        c3 = <uint32_t>p0
        k0 = k0 + PHILOX_W0
        k1 = k1 + PHILOX_W1
    c[0] = c0
    c[1] = c1
    c[2] = c2
    c[3] = c3


cdef inline void block(const Model* m, uint64_t path, uint32_t period, double* u) noexcept nogil:
    cdef uint32_t c[4]
    c[0] = period
    c[1] = <uint32_t>(path & MASK32)
    c[2] = <uint32_t>(path >> 32)
    c[3] = 0  # equilibrium domain
    philox(c, m.key0, m.key1)
    cdef int i
    for i in range(4):
        u[i] = (<double>c[i] + 0.5) * INV_2_32


cdef inline double posterior(double L) noexcept nogil:
    cdef double z
    if L >= 0.0:
        return 1.0 / (1.0 + exp(-L))
    z = exp(L)
    return z / (1.0 + z)


cdef inline int act(double L, double Lam, int s, double eps) noexcept nogil:
    cdef double index = L + Lam * <double>(2 * s - 1)
    if index > eps:
        return 1
    if index < -eps:
        return 0
    return s


cdef inline int dominance(double L, double Lam, double eps) noexcept nogil:
    # -1 for signal-dominant, else the fixed action
    cdef int a0 = act(L, Lam, 0, eps)
    cdef int a1 = act(L, Lam, 1, eps)
    if a0 != a1:
        return -1
    return a0


cdef inline double accuracy(double L_dec, double Lam, double L_true, double r, double eps) noexcept nogil:
    cdef int a0 = act(L_dec, Lam, 0, eps)
    cdef int a1 = act(L_dec, Lam, 1, eps)
    cdef double p1 = posterior(L_true)
    cdef double p0 = 1.0 - p1
    cdef double acc = 0.0
    if a1 == 1:
        acc += p1 * r
    if a0 == 1:
        acc += p1 * (1.0 - r)
    if a0 == 0:
        acc += p0 * r
    if a1 == 0:
        acc += p0 * (1.0 - r)
    return acc


cdef inline int sgn(double x) noexcept nogil:
    return (x > 0.0) - (x < 0.0)


cdef inline double pmax(double a, double b) noexcept nogil:
    # Python's max(a, b): keeps a unless b is strictly larger
    return b if b > a else a


cdef inline double pmin(double a, double b) noexcept nogil:
    return b if b < a else a


cdef inline double softplus(double z) noexcept nogil:
    return pmax(z, 0.0) + log1p(exp(-fabs(z)))


cdef inline double cdf(const Model* m, double x) noexcept nogil:
    if m.cost_code == 0:
        if x <= 0.0:
            return 0.0
        if x >= m.c1:
            return 1.0
        return x / m.c1
    if m.cost_code == 1:
        if x <= 0.0:
            return 0.0
        return -expm1(-m.c1 * x)
    return posterior((x - m.c1) / m.c2)


cdef inline double tmoment(const Model* m, double x) noexcept nogil:
    cdef double y
    if m.cost_code == 0:
        x = pmin(x, m.c1)
        return x * x / (2.0 * m.c1)
    if m.cost_code == 1:
        if isinf(x):
            return 1.0 / m.c1
        y = m.c1 * x
        return (-expm1(-y) - y * exp(-y)) / m.c1
    return x * cdf(m, x) - m.c2 * (softplus((x - m.c1) / m.c2) - softplus(-m.c1 / m.c2))


cdef inline double sample(const Model* m, double u) noexcept nogil:
    if m.cost_code == 0:
        return u * m.c1
    if m.cost_code == 1:
        return -log1p(-u) / m.c1
    return pmax(0.0, m.c1 + m.c2 * log(u / (1.0 - u)))


cdef inline double clamp(double x, double lo, double hi) noexcept nogil:
    return pmax(lo, pmin(x, hi))


cdef inline double likelihood(int dom, int a, int theta, double r) noexcept nogil:
    if dom >= 0:
        return 1.0 if a == dom else 0.0
    return r if a == theta else 1.0 - r


cdef inline double tag_post(double p, double rho, int y) noexcept nogil:
    cdef double num, den
    if rho == 1.0:
        return 1.0 if y else 0.0
    if y:
        num = rho * p
        den = num + (1.0 - rho) * (1.0 - p)
    else:
        num = (1.0 - rho) * p
        den = num + rho * (1.0 - p)
    if den == 0.0:
        return p
    return num / den


cdef void run_path(const Model* m, uint64_t path, Py_ssize_t i, Out* o) noexcept nogil:
    cdef double u[4]
    cdef double L_U = m.L_U0, L_E = m.L_E0
    cdef double beta_pow = 1.0, W = 0.0, W_lb = 0.0, outlay = 0.0
    cdef double acc_E, acc_U, dv, s, p_edu, cost, r, w, x, gain, flip, lam, wt, num, den, dU, dE
    cdef int theta, k, dom_U, dom_E, e, sig, a, y, incorrect, ok, broken_before, dom
    cdef int onset = 0, break_k = 0, violation_k = 0, cascade_action = -1
    cdef int n_edu = 0, outlay_n = 0, sd_n = 0, sd_c = 0, e1 = 0

    if m.theta_pin >= 0:
        theta = m.theta_pin
    else:
        block(m, path, 0, u)
        theta = 1 if u[3] < m.mu0 else 0

    for k in range(1, m.horizon + 1):
        # public state at the start of the period
        acc_E = accuracy(L_E, m.lam1, L_E, m.q1, m.eps)
        acc_U = accuracy(L_U, m.lamhat0, L_E, m.q0, m.eps)
        dom_U = dominance(L_U, m.lamhat0, m.eps)
        dom_E = dominance(L_E, m.lam1, m.eps)
        dv = acc_E - acc_U
        incorrect = dom_U >= 0 and fabs(L_E) > m.eps and sgn(L_U) != sgn(L_E)
        if m.rule_code == 0:
            s = 0.0
        elif m.rule_code == 1:
            s = m.r1
        elif m.rule_code == 2:
            s = clamp(dv / m.r1 - dv, 0.0, m.cap - dv)
        else:
            s = clamp(m.r1 - dv, 0.0, m.cap - dv) if incorrect else 0.0
        x = dv + s
        p_edu = 0.0 if x <= 0.0 else cdf(m, x)

        block(m, path, <uint32_t>k, u)
        cost = sample(m, u[0])
        e = (1 if cost < dv + s else 0) if m.edu_on else 0
        r = m.q1 if e else m.q0
        sig = theta if u[1] < r else 1 - theta
        if e:
            a = act(L_E, m.lam1, sig, m.eps)
        else:
            a = act(L_U, m.lamhat0, sig, m.eps)
        y = 0
        if m.mode == 1:
            y = e if u[2] < m.rho else 1 - e
        w = (1.0 if a == theta else 0.0) - m.eta * cost * <double>e

        if onset == 0 and incorrect:
            onset = k
            cascade_action = dom_U
        broken_before = break_k != 0
        if m.check_h and not broken_before and violation_k == 0:
            ok = incorrect and dv >= m.h_delta
            if ok:
                flip = 1.0 if dom_E >= 0 else m.q1
                ok = flip >= m.h_pstar
            if not ok:
                violation_k = k
        if not broken_before:
            outlay += s * p_edu
            outlay_n += 1
        if e and dom_E < 0:
            sd_n += 1
            if a == theta:
                sd_c += 1
        n_edu += e
        if k == 1:
            e1 = e

        W += beta_pow * w
        x = pmax(dv + s, 0.0)
        gain = cdf(m, x) * dv - m.eta * tmoment(m, x)
        W_lb += beta_pow * gain
        beta_pow *= m.beta

        # belief update
        if m.mode == 0:
            dU = m.lamhat1 if e else m.lamhat0
            L_U = L_U + (dU if a else -dU)
            dom = dom_E if e else dom_U
            if dom >= 0:
                dE = 0.0
            else:
                dE = m.lam1 if e else m.lam0
                dE = dE if a else -dE
            L_E = L_E + dE
        else:
            wt = tag_post(p_edu, m.rho, y)
            lam = wt * m.lamhat1 + (1.0 - wt) * m.lamhat0
            L_U = L_U + (lam if a else -lam)
            num = wt * likelihood(dom_E, a, 1, m.q1) + (1.0 - wt) * likelihood(dom_U, a, 1, m.q0)
            den = wt * likelihood(dom_E, a, 0, m.q1) + (1.0 - wt) * likelihood(dom_U, a, 0, m.q0)
            if num == den:
                dE = 0.0
            else:
                dE = log(num / den)
            L_E = L_E + dE

        if onset != 0 and not broken_before and a != cascade_action:
            break_k = k
            if m.stop_at_break:
                break

    o.theta[i] = theta
    o.n_edu[i] = n_edu
    o.onset[i] = onset
    o.break_k[i] = break_k
    o.violation_k[i] = violation_k
    o.cascade_action[i] = cascade_action
    o.W[i] = W
    o.W_lb[i] = W_lb
    o.outlay[i] = outlay
    o.outlay_n[i] = outlay_n
    o.L_U[i] = L_U
    o.L_E[i] = L_E
    o.e1[i] = e1
    o.sd_edu_n[i] = sd_n
    o.sd_edu_correct[i] = sd_c


def run_chunk(dict spec, dict arrays, Py_ssize_t lo, Py_ssize_t hi, unsigned long long path_start):
    """Simulate output rows ``lo:hi`` (paths ``path_start+lo`` onward) in place, without the GIL."""
    cdef Model m
    m.mu0 = spec["mu0"]; m.q0 = spec["q0"]; m.q1 = spec["q1"]
    m.lam0 = spec["lam0"]; m.lam1 = spec["lam1"]
    m.lamhat0 = spec["lamhat0"]; m.lamhat1 = spec["lamhat1"]
    m.rho = spec["rho"]; m.eta = spec["eta"]; m.beta = spec["beta"]; m.eps = spec["epsilon"]
    m.cost_code = spec["cost_code"]; m.c1 = spec["c1"]; m.c2 = spec["c2"]; m.cap = spec["cap"]
    m.rule_code = spec["rule_code"]; m.r1 = spec["r1"]; m.r2 = spec["r2"]
    m.mode = spec["mode"]; m.edu_on = spec["edu_on"]; m.theta_pin = spec["theta_pin"]
    m.horizon = spec["horizon"]
    m.L_U0 = spec["L_U0"]; m.L_E0 = spec["L_E0"]
    m.key0 = spec["key0"]; m.key1 = spec["key1"]
    m.check_h = spec["check_h"]; m.h_delta = spec["h_delta"]; m.h_pstar = spec["h_pstar"]
    m.stop_at_break = spec["stop_at_break"]

    cdef int8_t[::1] theta = arrays["theta"]
    cdef int32_t[::1] n_edu = arrays["n_edu"]
    cdef int32_t[::1] onset = arrays["onset"]
    cdef int32_t[::1] break_k = arrays["break_k"]
    cdef int32_t[::1] violation_k = arrays["violation_k"]
    cdef int8_t[::1] cascade_action = arrays["cascade_action"]
    cdef double[::1] W = arrays["W"]
    cdef double[::1] W_lb = arrays["W_lb"]
    cdef double[::1] outlay = arrays["outlay"]
    cdef int32_t[::1] outlay_n = arrays["outlay_n"]
    cdef double[::1] L_U = arrays["L_U"]
    cdef double[::1] L_E = arrays["L_E"]
    cdef int8_t[::1] e1 = arrays["e1"]
    cdef int32_t[::1] sd_edu_n = arrays["sd_edu_n"]
    cdef int32_t[::1] sd_edu_correct = arrays["sd_edu_correct"]

    cdef Out o
    if hi <= lo:
        return
    o.theta = &theta[0]
    o.n_edu = &n_edu[0]
    o.onset = &onset[0]
    o.break_k = &break_k[0]
    o.violation_k = &violation_k[0]
    o.cascade_action = &cascade_action[0]
    o.W = &W[0]
    o.W_lb = &W_lb[0]
    o.outlay = &outlay[0]
    o.outlay_n = &outlay_n[0]
    o.L_U = &L_U[0]
    o.L_E = &L_E[0]
    o.e1 = &e1[0]
    o.sd_edu_n = &sd_edu_n[0]
    o.sd_edu_correct = &sd_edu_correct[0]

    cdef Py_ssize_t i
    with nogil:
        for i in range(lo, hi):
            run_path(&m, path_start + <uint64_t>i, i, &o)


def philox_block(unsigned long long seed, unsigned int domain, unsigned long long path, unsigned int period):
    """Four uniforms of one counter block; exposed for cross-backend tests."""
    cdef Model m
    cdef double u[4]
    cdef uint32_t c[4]
    c[0] = period
    c[1] = <uint32_t>(path & MASK32)
    c[2] = <uint32_t>(path >> 32)
    c[3] = domain
    philox(c, <uint32_t>(seed & MASK32), <uint32_t>(seed >> 32))
    return tuple((<double>c[j] + 0.5) * INV_2_32 for j in range(4))
