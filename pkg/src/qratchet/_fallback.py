"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``."""

import numpy as np


def _dv(m, a, c, x):
    out = np.zeros_like(x)
    for mj, aj, cj in zip(m, a, c):
        out -= aj * mj * np.sin(mj * x + cj)
    return out


def classical_evolve(q, p, mk, ak, ck, ml, al, cl, k_tilde, l_tilde, steps, sums):
    if sums.shape[0] < steps + 1:
        raise ValueError("sums too short")
    big_p = q + p
    sums[0] = np.sum(p)
    for t in range(1, steps + 1):
        big_p -= k_tilde * _dv(mk, ak, ck, q)
        q += l_tilde * _dv(ml, al, cl, big_p)
        sums[t] = np.sum(big_p - q)
    p[:] = big_p - q


def mul_moment(c, phase, weight):
    c *= phase
    return float(np.dot(c.real * c.real + c.imag * c.imag, weight))


def mul_inplace(c, phase):
    c *= phase
