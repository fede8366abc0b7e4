# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled exact-rational kernels.

Rat is a reduced fraction with a 64-bit fast path: arithmetic runs on C
integers with 128-bit intermediates and silently promotes to Python big
integers on overflow, so every result is exact.  The module also carries
tight loops for polynomial products and square matrix products over Rat,
the two inner loops that dominate the identity-suite runtime.

kcert.scalars selects this module at import time and falls back to
fractions.Fraction when the extension is unavailable (or KCERT_PURE=1).
"""

from cpython.object cimport PyObject

cdef extern from "Python.h":
    long long PyLong_AsLongLongAndOverflow(object, int*) except? -1

cdef extern from *:
    """
    typedef __int128 kc_i128;
    """
    ctypedef long long kc_i128

import math

cdef long long LL_MAX = 9223372036854775807


cdef inline kc_i128 i128_gcd(kc_i128 a, kc_i128 b):
    cdef kc_i128 t
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b != 0:
        t = a % b
        a = b
        b = t
    return a


cdef object i128_to_pyint(kc_i128 x):
    # Manual conversion: Cython would truncate through the long long typedef.
    cdef bint neg = x < 0
    cdef kc_i128 a = -x if neg else x
    cdef unsigned long long lo = <unsigned long long> (a & <kc_i128> 0xFFFFFFFFFFFFFFFF)
    cdef unsigned long long hi = <unsigned long long> (a >> 64)
    obj = ((<object> hi) << 64) | (<object> lo)
    if neg:
        obj = -obj
    return obj


cdef class Rat


cdef inline Rat make_small(long long n, long long d):
    cdef Rat r = Rat.__new__(Rat)
    r.sn = n
    r.sd = d
    r.bn = None
    r.bd = None
    return r


cdef Rat make_big_reduced(object n, object d):
    # n, d reduced and sign-normalised already; demote if both fit.
    cdef int overflow = 0
    cdef long long cn, cd
    cn = PyLong_AsLongLongAndOverflow(n, &overflow)
    if not overflow:
        cd = PyLong_AsLongLongAndOverflow(d, &overflow)
        if not overflow:
            return make_small(cn, cd)
    cdef Rat r = Rat.__new__(Rat)
    r.sn = 0
    r.sd = 0
    r.bn = n
    r.bd = d
    return r


cdef Rat make_big(object n, object d):
    if d == 0:
        raise ZeroDivisionError("rational with zero denominator")
    if d < 0:
        n = -n
        d = -d
    if n == 0:
        return make_small(0, 1)
    g = math.gcd(n, d)
    if g != 1:
        n //= g
        d //= g
    return make_big_reduced(n, d)


cdef Rat rat_from_i128(kc_i128 num, kc_i128 den):
    # den != 0 guaranteed by callers.
    cdef kc_i128 g
    if den < 0:
        num = -num
        den = -den
    if num == 0:
        return make_small(0, 1)
    g = i128_gcd(num, den)
    num //= g
    den //= g
    if -LL_MAX <= num <= LL_MAX and den <= LL_MAX:
        return make_small(<long long> num, <long long> den)
    return make_big_reduced(i128_to_pyint(num), i128_to_pyint(den))


cdef inline bint is_big(Rat a):
    return a.bn is not None


cdef Rat rat_from_pyint(object v):
    cdef int overflow = 0
    cdef long long c = PyLong_AsLongLongAndOverflow(v, &overflow)
    if not overflow:
        return make_small(c, 1)
    cdef Rat r = Rat.__new__(Rat)
    r.sn = 0
    r.sd = 0
    r.bn = v
    r.bd = 1
    return r


cdef Rat rat_add(Rat a, Rat b):
    if not is_big(a) and not is_big(b):
        return rat_from_i128(
            (<kc_i128> a.sn) * b.sd + (<kc_i128> b.sn) * a.sd,
            (<kc_i128> a.sd) * b.sd,
        )
    return make_big(a.num_obj() * b.den_obj() + b.num_obj() * a.den_obj(),
                    a.den_obj() * b.den_obj())


cdef Rat rat_sub(Rat a, Rat b):
    if not is_big(a) and not is_big(b):
        return rat_from_i128(
            (<kc_i128> a.sn) * b.sd - (<kc_i128> b.sn) * a.sd,
            (<kc_i128> a.sd) * b.sd,
        )
    return make_big(a.num_obj() * b.den_obj() - b.num_obj() * a.den_obj(),
                    a.den_obj() * b.den_obj())


cdef Rat rat_mul(Rat a, Rat b):
    if not is_big(a) and not is_big(b):
        return rat_from_i128((<kc_i128> a.sn) * b.sn, (<kc_i128> a.sd) * b.sd)
    return make_big(a.num_obj() * b.num_obj(), a.den_obj() * b.den_obj())


cdef Rat rat_div(Rat a, Rat b):
    if not is_big(a) and not is_big(b):
        if b.sn == 0:
            raise ZeroDivisionError("division by zero rational")
        return rat_from_i128((<kc_i128> a.sn) * b.sd, (<kc_i128> a.sd) * b.sn)
    if b.num_obj() == 0:
        raise ZeroDivisionError("division by zero rational")
    return make_big(a.num_obj() * b.den_obj(), a.den_obj() * b.num_obj())


cdef int rat_cmp(Rat a, Rat b):
    cdef kc_i128 lhs, rhs
    if not is_big(a) and not is_big(b):
        lhs = (<kc_i128> a.sn) * b.sd
        rhs = (<kc_i128> b.sn) * a.sd
        if lhs < rhs:
            return -1
        if lhs > rhs:
            return 1
        return 0
    l = a.num_obj() * b.den_obj()
    r = b.num_obj() * a.den_obj()
    if l < r:
        return -1
    if l > r:
        return 1
    return 0


cdef class Rat:
    """Immutable reduced rational: numerator/denominator, denominator > 0."""

    cdef long long sn, sd
    cdef object bn, bd

    def __init__(self, value=0, den=None):
        cdef Rat other
        if isinstance(value, Rat) and den is None:
            other = <Rat> value
            self.sn = other.sn
            self.sd = other.sd
            self.bn = other.bn
            self.bd = other.bd
            return
        if isinstance(value, float) or isinstance(den, float):
            raise TypeError("exact scalar expected, not float")
        if isinstance(value, str):
            if den is not None:
                raise TypeError("string form takes no denominator")
            text = value.strip()
            if "/" in text:
                a, _, b = text.partition("/")
                n = int(a)
                d = int(b)
            else:
                n = int(text)
                d = 1
        elif isinstance(value, int):
            n = value
            d = 1 if den is None else den
            if not isinstance(d, int):
                raise TypeError("denominator must be an integer")
        else:
            raise TypeError(f"cannot build rational from {type(value).__name__}")
        cdef Rat built = make_big(n, d)
        self.sn = built.sn
        self.sd = built.sd
        self.bn = built.bn
        self.bd = built.bd

    cdef object num_obj(self):
        if self.bn is not None:
            return self.bn
        return self.sn

    cdef object den_obj(self):
        if self.bd is not None:
            return self.bd
        return self.sd

    @property
    def numerator(self):
        return self.num_obj()

    @property
    def denominator(self):
        return self.den_obj()

    def __add__(self, other):
        if isinstance(other, Rat):
            return rat_add(self, <Rat> other)
        if isinstance(other, int):
            return rat_add(self, rat_from_pyint(other))
        return NotImplemented

    def __radd__(self, other):
        if isinstance(other, int):
            return rat_add(rat_from_pyint(other), self)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, Rat):
            return rat_sub(self, <Rat> other)
        if isinstance(other, int):
            return rat_sub(self, rat_from_pyint(other))
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, int):
            return rat_sub(rat_from_pyint(other), self)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, Rat):
            return rat_mul(self, <Rat> other)
        if isinstance(other, int):
            return rat_mul(self, rat_from_pyint(other))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, int):
            return rat_mul(rat_from_pyint(other), self)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, Rat):
            return rat_div(self, <Rat> other)
        if isinstance(other, int):
            return rat_div(self, rat_from_pyint(other))
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, int):
            return rat_div(rat_from_pyint(other), self)
        return NotImplemented

    def __neg__(self):
        if self.bn is None:
            return make_small(-self.sn, self.sd)
        return make_big_reduced(-self.bn, self.bd)

    def __pos__(self):
        return self

    def __abs__(self):
        if self.bn is None:
            return make_small(-self.sn, self.sd) if self.sn < 0 else self
        return make_big_reduced(-self.bn, self.bd) if self.bn < 0 else self

    def __bool__(self):
        if self.bn is None:
            return self.sn != 0
        return True

    def __eq__(self, other):
        cdef Rat o
        if isinstance(other, Rat):
            o = <Rat> other
            if self.bn is None and o.bn is None:
                return self.sn == o.sn and self.sd == o.sd
            return self.num_obj() == o.num_obj() and self.den_obj() == o.den_obj()
        if isinstance(other, int):
            if self.bn is None:
                return self.sd == 1 and self.sn == other
            return self.bd == 1 and self.bn == other
        return NotImplemented

    def __lt__(self, other):
        return self._cmp_coerced(other) < 0

    def __le__(self, other):
        return self._cmp_coerced(other) <= 0

    def __gt__(self, other):
        return self._cmp_coerced(other) > 0

    def __ge__(self, other):
        return self._cmp_coerced(other) >= 0

    cdef int _cmp_coerced(self, other) except? -2:
        if isinstance(other, Rat):
            return rat_cmp(self, <Rat> other)
        if isinstance(other, int):
            return rat_cmp(self, rat_from_pyint(other))
        raise TypeError(f"cannot compare Rat with {type(other).__name__}")

    def __hash__(self):
        return hash((self.num_obj(), self.den_obj()))

    def __str__(self):
        if self.den_obj() == 1:
            return str(self.num_obj())
        return f"{self.num_obj()}/{self.den_obj()}"

    def __repr__(self):
        return f"Rat('{self.__str__()}')"

    def __reduce__(self):
        return (Rat, (self.__str__(),))


def poly_mul_rats(tuple a, tuple b):
    """Product of two coefficient tuples (lowest degree first), trimmed."""
    cdef Py_ssize_t la = len(a), lb = len(b), i, j, top
    if la == 0 or lb == 0:
        return ()
    cdef list out = [None] * (la + lb - 1)
    cdef Rat acc, ai
    for i in range(la):
        ai = <Rat> a[i]
        if ai.bn is None and ai.sn == 0:
            continue
        for j in range(lb):
            acc = rat_mul(ai, <Rat> b[j])
            if out[i + j] is not None:
                acc = rat_add(<Rat> out[i + j], acc)
            out[i + j] = acc
    cdef Rat zero = make_small(0, 1)
    for i in range(la + lb - 1):
        if out[i] is None:
            out[i] = zero
    top = la + lb - 1
    while top > 0:
        acc = <Rat> out[top - 1]
        if acc.bn is not None or acc.sn != 0:
            break
        top -= 1
    return tuple(out[:top])


def mat_mul_rats(tuple rows_a, tuple rows_b):
    """Square-matrix product over Rat entries; rows are tuples of Rat."""
    cdef Py_ssize_t n = len(rows_a), i, j, k
    cdef list out = []
    cdef list row
    cdef tuple arow
    cdef Rat acc, aik
    for i in range(n):
        arow = <tuple> rows_a[i]
        row = [None] * n
        for j in range(n):
            acc = make_small(0, 1)
            for k in range(n):
                aik = <Rat> arow[k]
                if aik.bn is None and aik.sn == 0:
                    continue
                acc = rat_add(acc, rat_mul(aik, <Rat> (<tuple> rows_b[k])[j]))
            row[j] = acc
        out.append(tuple(row))
    return tuple(out)
