"""Pure-Python coefficient kernel for truncated rational power series.

A coefficient vector is a pair of parallel sequences ``nums``/``dens`` of
Python ints with ``dens[i] > 0`` and ``gcd(nums[i], dens[i]) == 1``.  All
functions return freshly built lists and never mutate their inputs.  The
compiled twin in ``_kernel.pyx`` implements the identical contract; callers
pick one through ``themelab._backend``.

Binary operations require equal-length inputs; the series layer aligns
truncation orders before calling in.
"""

from math import gcd

BACKEND = "python"


def rat_norm(n, d):
    """Reduce n/d to lowest terms with a positive denominator."""
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
    out_n = []
    out_d = []
    for i in range(len(an)):
        n1, d1, n2, d2 = an[i], ad[i], bn[i], bd[i]
        if n1 == 0:
            out_n.append(n2)
            out_d.append(d2)
            continue
        if n2 == 0:
            out_n.append(n1)
            out_d.append(d1)
            continue
        g = gcd(d1, d2)
        m1 = d2 // g
        n, d = rat_norm(n1 * m1 + n2 * (d1 // g), d1 * m1)
        out_n.append(n)
        out_d.append(d)
    return out_n, out_d


def v_sub(an, ad, bn, bd):
    return v_add(an, ad, [-n for n in bn], bd)


def v_scale(an, ad, cn, cd):
    if cn == 0:
        return [0] * len(an), [1] * len(an)
    out_n = []
    out_d = []
    for i in range(len(an)):
        g1 = gcd(abs(an[i]), cd) if an[i] else cd
        g2 = gcd(abs(cn), ad[i])
        n, d = rat_norm((an[i] // g1) * (cn // g2), (ad[i] // g2) * (cd // g1))
        out_n.append(n)
        out_d.append(d)
    return out_n, out_d


def v_mul(an, ad, bn, bd, out_len):
    out_n = []
    out_d = []
    for m in range(out_len):
        acc_n, acc_d = 0, 1
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
    # caller guarantees an[0] != 0
    inv_n, inv_d = rat_norm(ad[0], an[0])
    out_n = [inv_n]
    out_d = [inv_d]
    for m in range(1, out_len):
        acc_n, acc_d = 0, 1
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
    out_n = []
    out_d = []
    for m in range(1, len(an)):
        n, d = rat_norm(an[m] * m, ad[m])
        out_n.append(n)
        out_d.append(d)
    return out_n, out_d
