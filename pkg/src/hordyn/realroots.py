"""Exact real-root counting and isolation for polynomials with rational coefficients.

Polynomials are lists of :class:`fractions.Fraction` in *ascending* order of
powers. Floats convert to ``Fraction`` exactly, so results are exact for the
double-precision coefficients handed in.
"""

from fractions import Fraction


def to_fractions(coeffs):
    """Ascending float (or int) coefficients -> trimmed ascending Fractions."""
    return trim([Fraction(c) for c in coeffs])


def trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def degree(p):
    return len(trim(p)) - 1


def evaluate(p, x):
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def derivative(p):
    return trim([k * c for k, c in enumerate(p)][1:])


def _divmod(a, b):
    a, b = trim(a), trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    r = list(a)
    lead = b[-1]
    while len(r) >= len(b) and r:
        shift = len(r) - len(b)
        f = r[-1] / lead
        q[shift] = f
        for i, c in enumerate(b):
            r[shift + i] -= f * c
        r = trim(r)
    return trim(q), r


def _monic(p):
    p = trim(p)
    return [c / p[-1] for c in p] if p else p


def gcd(a, b):
    a, b = trim(a), trim(b)
    while b:
        a, b = b, _divmod(a, b)[1]
    return _monic(a)


def squarefree_factors(p):
    """Yun's algorithm: monic ``f_1, f_2, ...`` with ``p = c * prod f_k**k``."""
    p = trim(p)
    if degree(p) < 1:
        return []
    dp = derivative(p)
    g = gcd(p, dp)
    c = _divmod(p, g)[0]
    d = _divmod(dp, g)[0]
    factors = []
    while degree(c) >= 1:
        d = trim([x - y for x, y in _zip_pad(d, derivative(c))])
        a = gcd(c, d) if d else _monic(c)
        factors.append(a)
        c = _divmod(c, a)[0]
        d = _divmod(d, a)[0] if d else []
    return factors


def _zip_pad(a, b):
    n = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (n - len(a))
    b = list(b) + [Fraction(0)] * (n - len(b))
    return zip(a, b)


def sturm_sequence(p):
    p = trim(p)
    seq = [p, derivative(p)]
    while seq[-1]:
        r = _divmod(seq[-2], seq[-1])[1]
        if not r:
            break
        seq.append([-c for c in r])
    return [s for s in seq if s]


def _sign_changes(values):
    signs = [v > 0 for v in values if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(p, a, b, seq=None):
    """Number of distinct real roots of ``p`` in the half-open interval ``(a, b]``."""
    seq = seq if seq is not None else sturm_sequence(p)
    va = _sign_changes([evaluate(s, a) for s in seq])
    vb = _sign_changes([evaluate(s, b) for s in seq])
    return va - vb


def cauchy_bound(p):
    """Every real root of ``p`` has absolute value below this bound."""
    p = trim(p)
    lead = abs(p[-1])
    return 1 + max((abs(c) / lead for c in p[:-1]), default=Fraction(0))


def squarefree_part(p):
    p = trim(p)
    if degree(p) < 1:
        return p
    return _divmod(p, gcd(p, derivative(p)))[0]


def isolate_positive_roots(p):
    """Disjoint intervals ``(lo, hi]``, each holding exactly one root in (0, inf).

    Sorted by position. ``p`` must not be the zero polynomial. Bisection runs on
    the square-free part with any root at zero divided out, so no interval
    endpoint is a root.
    """
    p = trim(p)
    if not p:
        raise ValueError("the zero polynomial has no isolated roots")
    while p[0] == 0:
        p = p[1:]
    q = squarefree_part(p)
    if degree(q) < 1:
        return []
    seq = sturm_sequence(q)
    stack = [(Fraction(0), cauchy_bound(q))]
    out = []
    while stack:
        lo, hi = stack.pop()
        k = count_roots(q, lo, hi, seq)
        if k == 0:
            continue
        if k == 1:
            out.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        step = (hi - lo) / 7
        while evaluate(q, mid) == 0:
            mid += step
            step /= 2
        stack.append((mid, hi))
        stack.append((lo, mid))
    return sorted(out)


def refine(p, interval, width):
    """Bisect an isolating interval ``(lo, hi]`` down to the given width."""
    lo, hi = interval
    q = squarefree_part(p)
    seq = sturm_sequence(q)
    while hi - lo > width:
        mid = (lo + hi) / 2
        if evaluate(q, mid) == 0:
            return mid, mid
        if count_roots(q, lo, mid, seq):
            hi = mid
        else:
            lo = mid
    return lo, hi


def nonnegative_on_halfline(p):
    """Exact test of ``p(u) >= 0`` for all ``u >= 0``.

    Holds iff ``p`` is zero, or its leading coefficient is positive and no root
    of odd multiplicity lies in ``(0, inf)``.
    """
    p = trim(p)
    if not p:
        return True
    if p[-1] < 0:
        return False
    if degree(p) == 0:
        return True
    factors = squarefree_factors(p)
    odd = [Fraction(1)]
    for k, f in enumerate(factors, start=1):
        if k % 2 == 1:
            odd = _mul(odd, f)
    if degree(odd) < 1:
        return True
    return not isolate_positive_roots(odd)


def positive_on_halfline(p):
    """Exact test of ``p(u) > 0`` for all ``u >= 0``."""
    p = trim(p)
    if not p or p[-1] < 0 or p[0] <= 0:
        return False
    return not isolate_positive_roots(p)


def _mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


multiply = _mul
