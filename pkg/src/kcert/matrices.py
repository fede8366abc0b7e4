"""Square matrices over a localized algebra with level bookkeeping, plus the
certificate types every later construction consumes.

Invertibility is certificate-only: a matrix is "invertible" here exactly
when an explicit two-sided inverse is carried along, and verify() recomputes
the defining equations rather than trusting them.  Levels are recomputed
from entries; the worst-case rule level(a.b) >= min(levels) - 1 is a lower
bound the tests assert, never a substitute for recomputation.
"""

from .algebras import TRIVIAL, AlgebraElement
from .scalars import R1, _mat_mul_fast, rat


class MatrixError(ValueError):
    """Size or algebra mismatch in a matrix operation."""


class CertificateFailure(ValueError):
    """A certificate equation failed; carries the first offending entry."""

    def __init__(self, message, position=None, residual=None):
        super().__init__(message)
        self.position = position
        self.residual = residual


class FilteredMatrix:
    __slots__ = ("algebra", "n", "rows", "_level")

    def __init__(self, algebra, rows):
        rows = tuple(tuple(row) for row in rows)
        n = len(rows)
        for row in rows:
            if len(row) != n:
                raise MatrixError("matrix must be square")
        self.algebra = algebra
        self.n = n
        self.rows = rows
        self._level = None

    # -- constructors ------------------------------------------------------

    @classmethod
    def identity(cls, algebra, n):
        return cls.scalar_diag(algebra, R1, n)

    @classmethod
    def zeros(cls, algebra, n):
        z = algebra.zero()
        return cls(algebra, tuple(tuple(z for _ in range(n)) for _ in range(n)))

    @classmethod
    def scalar_diag(cls, algebra, value, n):
        z = algebra.zero()
        v = algebra.from_rational(rat(value))
        return cls(
            algebra,
            tuple(tuple(v if i == j else z for j in range(n)) for i in range(n)),
        )

    @classmethod
    def diag_bits(cls, algebra, bits):
        """0/1 scalar diagonal matrix from an iterable of bits."""
        z = algebra.zero()
        o = algebra.one()
        bits = tuple(bits)
        n = len(bits)
        return cls(
            algebra,
            tuple(
                tuple((o if bits[i] else z) if i == j else z for j in range(n))
                for i in range(n)
            ),
        )

    @classmethod
    def from_elements(cls, algebra, grid):
        rows = []
        for row in grid:
            out = []
            for e in row:
                if isinstance(e, AlgebraElement):
                    if e.algebra != algebra:
                        raise MatrixError("mixed-algebra entries")
                    out.append(e.payload)
                else:
                    out.append(algebra.element(e).payload)
            rows.append(tuple(out))
        return cls(algebra, rows)

    # -- basics ------------------------------------------------------------

    @property
    def level(self):
        if self._level is None:
            deg = self.algebra.degree
            self._level = min(
                (deg(p) for row in self.rows for p in row),
                default=self.algebra.max_level,
            )
        return self._level

    def entry(self, i, j):
        return AlgebraElement(self.algebra, self.rows[i][j])

    def _same(self, other):
        if not isinstance(other, FilteredMatrix):
            raise MatrixError("matrix expected")
        if other.algebra != self.algebra:
            raise MatrixError("algebra mismatch")
        if other.n != self.n:
            raise MatrixError(f"size mismatch {self.n} vs {other.n}")

    def __add__(self, other):
        self._same(other)
        return FilteredMatrix(
            self.algebra,
            tuple(
                tuple(a + b for a, b in zip(ra, rb))
                for ra, rb in zip(self.rows, other.rows)
            ),
        )

    def __sub__(self, other):
        self._same(other)
        return FilteredMatrix(
            self.algebra,
            tuple(
                tuple(a - b for a, b in zip(ra, rb))
                for ra, rb in zip(self.rows, other.rows)
            ),
        )

    def __neg__(self):
        return FilteredMatrix(
            self.algebra, tuple(tuple(-a for a in row) for row in self.rows)
        )

    def __matmul__(self, other):
        self._same(other)
        if self.algebra.kind == TRIVIAL and _mat_mul_fast is not None:
            return FilteredMatrix(self.algebra, _mat_mul_fast(self.rows, other.rows))
        n = self.n
        zero = self.algebra.zero()
        bt = tuple(zip(*other.rows))
        out = []
        for arow in self.rows:
            orow = []
            for bcol in bt:
                acc = zero
                for a, b in zip(arow, bcol):
                    if a and b:
                        acc = acc + a * b
                orow.append(acc)
            out.append(tuple(orow))
        return FilteredMatrix(self.algebra, out)

    def __eq__(self, other):
        return (
            isinstance(other, FilteredMatrix)
            and self.algebra == other.algebra
            and self.rows == other.rows
        )

    def __hash__(self):
        return hash((self.algebra, self.rows))

    def is_zero(self):
        return all(not p for row in self.rows for p in row)

    def scale(self, value):
        v = self.algebra.from_rational(rat(value))
        return FilteredMatrix(
            self.algebra, tuple(tuple(v * p for p in row) for row in self.rows)
        )

    def plus_scalar(self, value):
        """self + value * identity."""
        return self + FilteredMatrix.scalar_diag(self.algebra, value, self.n)

    # -- shape operations ----------------------------------------------------

    def direct_sum(self, other):
        if other.algebra != self.algebra:
            raise MatrixError("algebra mismatch")
        z = self.algebra.zero()
        n, m = self.n, other.n
        rows = []
        for i in range(n):
            rows.append(self.rows[i] + tuple(z for _ in range(m)))
        for i in range(m):
            rows.append(tuple(z for _ in range(n)) + other.rows[i])
        return FilteredMatrix(self.algebra, rows)

    def pad(self, k, fill=0):
        """Stabilize by a k-block of zeros (idempotents) or ones (invertibles)."""
        if k == 0:
            return self
        block = (
            FilteredMatrix.zeros(self.algebra, k)
            if fill == 0
            else FilteredMatrix.scalar_diag(self.algebra, fill, k)
        )
        return self.direct_sum(block)

    def sub_block(self, r0, r1, c0, c1):
        return FilteredMatrix(
            self.algebra, tuple(row[c0:c1] for row in self.rows[r0:r1])
        )

    def first_mismatch(self, other):
        """Position and residual of the first differing entry, or None."""
        self._same(other)
        for i in range(self.n):
            for j in range(self.n):
                if self.rows[i][j] != other.rows[i][j]:
                    return (i, j), self.rows[i][j] - other.rows[i][j]
        return None

    def __repr__(self):
        return f"FilteredMatrix(n={self.n}, level={self.level}, kind={self.algebra.kind})"


def mat_mul(a, b):
    """Exact matrix product; level >= min(level a, level b) - 1."""
    return a @ b


def direct_sum(a, b):
    """Block diagonal sum; level is the min of the levels."""
    return a.direct_sum(b)


def block2(a, b, c, d):
    """Assemble [[a, b], [c, d]] from equal-size square blocks."""
    if not (a.n == b.n == c.n == d.n):
        raise MatrixError("blocks must share one size")
    rows = []
    for i in range(a.n):
        rows.append(a.rows[i] + b.rows[i])
    for i in range(c.n):
        rows.append(c.rows[i] + d.rows[i])
    return FilteredMatrix(a.algebra, rows)


def split2(m):
    """Split an even-size matrix into its four half-size blocks."""
    if m.n % 2:
        raise MatrixError("odd size cannot split into 2x2 blocks")
    k = m.n // 2
    return (
        m.sub_block(0, k, 0, k),
        m.sub_block(0, k, k, m.n),
        m.sub_block(k, m.n, 0, k),
        m.sub_block(k, m.n, k, m.n),
    )


class InvertibleCert:
    """An invertible matrix carried together with its explicit inverse."""

    __slots__ = ("m", "m_inv")

    def __init__(self, m, m_inv, check=True):
        if m.algebra != m_inv.algebra or m.n != m_inv.n:
            raise MatrixError("certificate factors mismatch")
        self.m = m
        self.m_inv = m_inv
        if check:
            self.verify()

    @property
    def n(self):
        return self.m.n

    @property
    def algebra(self):
        return self.m.algebra

    @property
    def level(self):
        return min(self.m.level, self.m_inv.level)

    def verify(self):
        ident = FilteredMatrix.identity(self.m.algebra, self.m.n)
        bad = (self.m @ self.m_inv).first_mismatch(ident)
        if bad is None:
            bad = (self.m_inv @ self.m).first_mismatch(ident)
        if bad is not None:
            raise CertificateFailure(
                f"inverse certificate fails at {bad[0]}", bad[0], bad[1]
            )
        return self

    @classmethod
    def identity(cls, algebra, n):
        ident = FilteredMatrix.identity(algebra, n)
        return cls(ident, ident, check=False)

    @classmethod
    def from_unit_diag(cls, algebra, units):
        """Diagonal invertible from (payload, inverse payload) pairs."""
        z = algebra.zero()
        n = len(units)
        fwd = FilteredMatrix(
            algebra,
            tuple(
                tuple(units[i][0] if i == j else z for j in range(n))
                for i in range(n)
            ),
        )
        bwd = FilteredMatrix(
            algebra,
            tuple(
                tuple(units[i][1] if i == j else z for j in range(n))
                for i in range(n)
            ),
        )
        return cls(fwd, bwd, check=False)

    def inverse(self):
        return InvertibleCert(self.m_inv, self.m, check=False)

    def compose(self, other):
        """Certificate for self.m @ other.m."""
        if other.algebra != self.algebra:
            raise MatrixError("algebra mismatch")
        return InvertibleCert(
            self.m @ other.m, other.m_inv @ self.m_inv, check=False
        )

    def direct_sum(self, other):
        return InvertibleCert(
            self.m.direct_sum(other.m),
            self.m_inv.direct_sum(other.m_inv),
            check=False,
        )

    def pad(self, k):
        if k == 0:
            return self
        return InvertibleCert(self.m.pad(k, fill=1), self.m_inv.pad(k, fill=1), check=False)

    def __eq__(self, other):
        return (
            isinstance(other, InvertibleCert)
            and self.m == other.m
            and self.m_inv == other.m_inv
        )

    def __hash__(self):
        return hash((self.m, self.m_inv))

    def __repr__(self):
        return f"InvertibleCert(n={self.n}, level={self.level})"


class IdempotentCert:
    """An idempotent matrix; verify() recomputes p @ p == p."""

    __slots__ = ("p",)

    def __init__(self, p, check=True):
        self.p = p
        if check:
            self.verify()

    @property
    def n(self):
        return self.p.n

    @property
    def algebra(self):
        return self.p.algebra

    @property
    def level(self):
        return self.p.level

    def verify(self):
        bad = (self.p @ self.p).first_mismatch(self.p)
        if bad is not None:
            raise CertificateFailure(
                f"idempotent certificate fails at {bad[0]}", bad[0], bad[1]
            )
        return self

    def complement(self):
        """1 - p, also idempotent."""
        return IdempotentCert(
            FilteredMatrix.identity(self.p.algebra, self.p.n) - self.p, check=False
        )

    def direct_sum(self, other):
        return IdempotentCert(self.p.direct_sum(other.p), check=False)

    def pad(self, k):
        return IdempotentCert(self.p.pad(k, fill=0), check=False) if k else self

    def __eq__(self, other):
        return isinstance(other, IdempotentCert) and self.p == other.p

    def __hash__(self):
        return hash(self.p)

    def __repr__(self):
        return f"IdempotentCert(n={self.n}, level={self.level})"


def check_idempotent(m):
    """Certificate iff m @ m == m exactly; CertificateFailure carries the
    first offending entry otherwise."""
    return IdempotentCert(m, check=True)


class ElementaryMatrix:
    """Identity plus one off-diagonal entry; always invertible."""

    __slots__ = ("algebra", "n", "i", "j", "entry")

    def __init__(self, algebra, n, i, j, entry):
        if i == j or not (0 <= i < n and 0 <= j < n):
            raise MatrixError("elementary matrix needs off-diagonal position")
        if isinstance(entry, AlgebraElement):
            entry = entry.payload
        if not algebra.accepts(entry):
            raise MatrixError("entry not in the algebra")
        self.algebra = algebra
        self.n = n
        self.i = i
        self.j = j
        self.entry = entry

    def expand(self):
        m = FilteredMatrix.identity(self.algebra, self.n)
        rows = [list(r) for r in m.rows]
        rows[self.i][self.j] = self.entry
        return FilteredMatrix(self.algebra, rows)

    def negated(self):
        return ElementaryMatrix(self.algebra, self.n, self.i, self.j, -self.entry)


def elementary_expand(e):
    """Invertible certificate E(a) with inverse E(-a)."""
    return InvertibleCert(e.expand(), e.negated().expand(), check=False)


def conjugate(p, u):
    """u p u^{-1}; conjugating an idempotent certificate re-certifies it."""
    if isinstance(p, IdempotentCert):
        return IdempotentCert(u.m @ p.p @ u.m_inv, check=True)
    if isinstance(p, FilteredMatrix):
        return u.m @ p @ u.m_inv
    raise MatrixError("conjugate expects a matrix or idempotent certificate")


def o_map(u):
    """diag(u, u^{-1}) with its inverse diag(u^{-1}, u); level preserved."""
    return InvertibleCert(
        u.m.direct_sum(u.m_inv), u.m_inv.direct_sum(u.m), check=False
    )


def is_o_shaped(cert):
    """True when cert is literally diag(alpha, alpha^{-1}) on half blocks."""
    if cert.n % 2:
        return False
    a, b, c, d = split2(cert.m)
    if not (b.is_zero() and c.is_zero()):
        return False
    ident = FilteredMatrix.identity(cert.algebra, a.n)
    return (a @ d) == ident and (d @ a) == ident


def o_blocks(cert):
    """The (alpha, alpha^{-1}) halves of an O-shaped certificate."""
    if not is_o_shaped(cert):
        raise CertificateFailure("certificate is not O-shaped")
    a, _, _, d = split2(cert.m)
    return InvertibleCert(a, d, check=False)


def permutation_cert(algebra, perm):
    """Permutation matrix cert; conjugation pulls indices back through perm:
    (P M P^{-1})[a][b] = M[perm[a]][perm[b]]."""
    n = len(perm)
    z = algebra.zero()
    o = algebra.one()
    fwd = tuple(
        tuple(o if j == perm[i] else z for j in range(n)) for i in range(n)
    )
    inv = tuple(
        tuple(o if perm[j] == i else z for j in range(n)) for i in range(n)
    )
    return InvertibleCert(
        FilteredMatrix(algebra, fwd), FilteredMatrix(algebra, inv), check=False
    )


def block_swap_cert(algebra, k):
    """Plain swap of the two k-blocks: P diag(A,B) P^{-1} = diag(B,A)."""
    return permutation_cert(algebra, tuple(range(k, 2 * k)) + tuple(range(k)))


def rotation_swap_cert(algebra, k):
    """Signed rotation [[0,-1],[1,0]] in k-blocks; conjugating diag(B, A)
    by it gives diag(A, B)."""
    z = FilteredMatrix.zeros(algebra, k)
    ident = FilteredMatrix.identity(algebra, k)
    fwd = block2(z, -ident, ident, z)
    inv = block2(z, ident, -ident, z)
    return InvertibleCert(fwd, inv, check=False)


def involution_cert(p):
    """W = [[p, 1-p], [1-p, p]] from an idempotent certificate; W^2 = 1 and
    W diag(1, 0) W = p + (1 - p)."""
    q = p.complement().p
    w = block2(p.p, q, q, p.p)
    return InvertibleCert(w, w, check=False)


def apply_hom_matrix(h, m):
    """Entrywise image of a matrix under a filtered hom."""
    if m.algebra != h.source:
        raise MatrixError("matrix not over the hom's source algebra")
    f = h.apply_payload
    return FilteredMatrix(
        h.target, tuple(tuple(f(p) for p in row) for row in m.rows)
    )


def apply_hom_invertible(h, cert):
    """Hom image of an invertible certificate; the image witnesses itself."""
    return InvertibleCert(
        apply_hom_matrix(h, cert.m), apply_hom_matrix(h, cert.m_inv), check=False
    )


def apply_hom_idempotent(h, cert):
    return IdempotentCert(apply_hom_matrix(h, cert.p), check=False)


def section_matrix(h, m):
    """Entrywise section lift of a matrix through a surjective hom."""
    if m.algebra != h.target:
        raise MatrixError("matrix not over the hom's target algebra")
    s = h.section_payload
    return FilteredMatrix(
        h.source, tuple(tuple(s(p) for p in row) for row in m.rows)
    )
