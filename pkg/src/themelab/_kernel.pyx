# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled coefficient kernel; contract identical to ``_kernel_py``.

Coefficients stay arbitrary-precision Python ints; the win over the pure
kernel is loop overhead, not limb arithmetic, which is why the speedup is
largest for the dense Cauchy products inside embeddings and determinants.
"""

from math import gcd

BACKEND = "compiled"


def rat_norm(n, d):
    if d < 0:
        n, d = -n, -d
    if n == 0:
        return 0, 1
    g = gcd(n, d)
    if g > 1:
        n //= g
        d //= g
    return n, d


def v_neg(an, ad):
    return [-n for n in an], list(ad)


def v_add(an, ad, bn, bd):
    cdef Py_ssize_t i, size
    size = len(an)
    out_n = []
    out_d = []
    for i in range(size):
        n1 = an[i]
        n2 = bn[i]
        if n1 == 0:
            out_n.append(n2)
            out_d.append(bd[i])
            continue
        if n2 == 0:
            out_n.append(n1)
            out_d.append(ad[i])
            continue
        d1 = ad[i]
        d2 = bd[i]
        g = gcd(d1, d2)
        m1 = d2 // g
        n, d = rat_norm(n1 * m1 + n2 * (d1 // g), d1 * m1)
        out_n.append(n)
        out_d.append(d)
    return out_n, out_d


def v_sub(an, ad, bn, bd):
    return v_add(an, ad, [-n for n in bn], bd)


def v_scale(an, ad, cn, cd):
    cdef Py_ssize_t i, size
    size = len(an)
    if cn == 0:
        return [0] * size, [1] * size
    out_n = []
    out_d = []
    for i in range(size):
        n1 = an[i]
        g1 = gcd(abs(n1), cd) if n1 else cd
        g2 = gcd(abs(cn), ad[i])
        n, d = rat_norm((n1 // g1) * (cn // g2), (ad[i] // g2) * (cd // g1))
        out_n.append(n)
        out_d.append(d)
    return out_n, out_d


def v_mul(an, ad, bn, bd, out_len):
    cdef Py_ssize_t m, i, size
    size = out_len
    out_n = []
    out_d = []
    for m in range(size):
        acc_n = 0
        acc_d = 1
        for i in range(m + 1):
            n1 = an[i]
            n2 = bn[m - i]
            if n1 == 0 or n2 == 0:
                continue
            d1 = ad[i]
            d2 = bd[m - i]
            g1 = gcd(abs(n1), d2)
            g2 = gcd(abs(n2), d1)
            tn = (n1 // g1) * (n2 // g2)
            td = (d1 // g2) * (d2 // g1)
            g = gcd(acc_d, td)
            acc_n = acc_n * (td // g) + tn * (acc_d // g)
            acc_d = acc_d * (td // g)
        n, d = rat_norm(acc_n, acc_d)
        out_n.append(n)
        out_d.append(d)
    return out_n, out_d


def v_invert(an, ad, out_len):
    cdef Py_ssize_t m, i, size
    size = out_len
    inv_n, inv_d = rat_norm(ad[0], an[0])
    out_n = [inv_n]
    out_d = [inv_d]
    for m in range(1, size):
        acc_n = 0
        acc_d = 1
        for i in range(1, m + 1):
            n1 = an[i]
            n2 = out_n[m - i]
            if n1 == 0 or n2 == 0:
                continue
            d1 = ad[i]
            d2 = out_d[m - i]
            g1 = gcd(abs(n1), d2)
            g2 = gcd(abs(n2), d1)
            tn = (n1 // g1) * (n2 // g2)
            td = (d1 // g2) * (d2 // g1)
            g = gcd(acc_d, td)
            acc_n = acc_n * (td // g) + tn * (acc_d // g)
            acc_d = acc_d * (td // g)
        n, d = rat_norm(-acc_n * inv_n, acc_d * inv_d)
        out_n.append(n)
        out_d.append(d)
    return out_n, out_d


def v_deriv(an, ad):
    cdef Py_ssize_t m, size
    size = len(an)
    out_n = []
    out_d = []
    for m in range(1, size):
        n, d = rat_norm(an[m] * m, ad[m])
        out_n.append(n)
        out_d.append(d)
    return out_n, out_d
