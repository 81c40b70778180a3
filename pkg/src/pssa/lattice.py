"""Exact integer-lattice arithmetic for resonance matrices.

Everything here works on Python ints and :class:`fractions.Fraction`, so
unimodularity, lattice equality and dual bases are decided exactly. Public
functions accept anything convertible to an integer matrix and return plain
nested lists or numpy ``int64`` arrays.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DimensionError, NotUnimodular, SingularGram

IntMatrix = list[list[int]]


def as_int_matrix(A) -> IntMatrix:
    """Convert to a list of integer rows; a flat sequence is one row."""
    arr = np.asarray(A, dtype=object)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2 or 0 in arr.shape:
        raise DimensionError(f"expected a nonempty integer matrix, got shape {arr.shape}")
    rows = []
    for row in arr:
        out = []
        for v in row:
            iv = int(v)
            if iv != v:
                raise DimensionError(f"entry {v!r} is not an integer")
            out.append(iv)
        rows.append(out)
    return rows


def det_int(M: Sequence[Sequence[int]]) -> int:
    """Determinant of a square integer matrix (fraction-free Bareiss elimination)."""
    a = [list(map(int, row)) for row in M]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[-1][-1]


def maximal_minors(A) -> list[int]:
    A = as_int_matrix(A)
    k, n = len(A), len(A[0])
    return [det_int([[row[c] for c in cols] for row in A]) for cols in itertools.combinations(range(n), k)]


def is_unimodular(A) -> bool:
    """True iff the gcd of all k x k minors of the k x n matrix ``A`` is 1."""
    A = as_int_matrix(A)
    k, n = len(A), len(A[0])
    if not 1 <= k <= n:
        raise DimensionError(f"need 1 <= k <= n, got a {k} x {n} matrix")
    if all(v == 0 for row in A for v in row):
        raise DimensionError("zero matrix")
    g = 0
    for m in maximal_minors(A):
        g = math.gcd(g, m)
        if g == 1:
            return True
    return g == 1


def require_unimodular(A) -> IntMatrix:
    A = as_int_matrix(A)
    if not is_unimodular(A):
        raise NotUnimodular(f"matrix {A} is not unimodular")
    return A


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, x, y) with x*a + y*b = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def hermite_normal_form(A) -> tuple[IntMatrix, IntMatrix]:
    """Row-style Hermite normal form.

    Returns ``(H, U)`` with ``U @ A == H``, ``U`` unimodular, ``H`` in row
    echelon form with positive pivots and the entries above each pivot reduced
    into ``[0, pivot)``. Two full-row-rank matrices span the same row lattice
    iff their ``H`` agree.
    """
    H = [row[:] for row in as_int_matrix(A)]
    m, n = len(H), len(H[0])
    U = [[int(i == j) for j in range(m)] for i in range(m)]

    def combine(r, i, x, y, u, v):
        # rows (r, i) <- (x*r + y*i, u*r + v*i); callers keep x*v - y*u = 1
        for M in (H, U):
            rr, ri = M[r], M[i]
            M[r] = [x * a + y * b for a, b in zip(rr, ri)]
            M[i] = [u * a + v * b for a, b in zip(rr, ri)]

    r = 0
    for col in range(n):
        if r == m:
            break
        for i in range(r + 1, m):
            b = H[i][col]
            if b == 0:
                continue
            a = H[r][col]
            g, x, y = _egcd(a, b)
            combine(r, i, x, y, -b // g, a // g)
        pivot = H[r][col]
        if pivot == 0:
            continue
        if pivot < 0:
            H[r] = [-v for v in H[r]]
            U[r] = [-v for v in U[r]]
            pivot = -pivot
        for i in range(r):
            q = H[i][col] // pivot
            if q:
                H[i] = [a - q * b for a, b in zip(H[i], H[r])]
                U[i] = [a - q * b for a, b in zip(U[i], U[r])]
        r += 1
    return H, U


def canonical_form(A) -> tuple[tuple[int, ...], ...]:
    """Hashable canonical representative of the row lattice of ``A``."""
    H, _ = hermite_normal_form(A)
    return tuple(tuple(row) for row in H if any(row))


def rational_inverse(M) -> list[list[Fraction]]:
    """Exact inverse of a square rational matrix (Gauss-Jordan on Fractions)."""
    n = len(M)
    aug = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise SingularGram("matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [v / p for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def _matmul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


def _transpose(A):
    return [list(col) for col in zip(*A)]


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


@dataclass(frozen=True)
class DualLatticeBasis:
    """Exact basis ``B = A^T (A A^T)^-1`` of the dual lattice, as an ``n x k`` matrix."""

    entries: tuple[tuple[Fraction, ...], ...]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.entries), len(self.entries[0])

    def to_float(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.entries])

    def to_strings(self) -> list[list[str]]:
        return [[f"{v.numerator}/{v.denominator}" for v in row] for row in self.entries]

    @classmethod
    def from_strings(cls, rows) -> "DualLatticeBasis":
        return cls(tuple(tuple(Fraction(v) for v in row) for row in rows))


def dual_lattice_basis(A) -> DualLatticeBasis:
    """Dual-lattice basis ``A^T (A A^T)^-1``; satisfies ``A B = I`` exactly."""
    A = as_int_matrix(A)
    gram = _matmul(A, _transpose(A))
    try:
        inv = rational_inverse(gram)
    except SingularGram:
        raise SingularGram(f"A A^T is singular for A = {A}") from None
    B = _matmul(_transpose(A), inv)
    return DualLatticeBasis(tuple(tuple(row) for row in B))


def complete_to_unimodular(A) -> np.ndarray:
    """Extend a unimodular ``k x n`` matrix to an ``n x n`` matrix with ``|det| = 1``.

    Column-reduce ``A`` to ``[I | 0]`` with a unimodular transform ``V``; the
    inverse of ``V`` then has ``A`` as its first ``k`` rows. The added rows are
    LLL-reduced and size-reduced against ``A`` to keep them short, which does
    not change ``|det|``.
    """
    A = require_unimodular(A)
    k, n = len(A), len(A[0])
    H, U = hermite_normal_form(_transpose(A))
    # unimodularity forces the top k x k block of H to be the identity
    assert all(H[i][j] == int(i == j) for i in range(k) for j in range(k))
    C = _transpose([[int(v) for v in row] for row in _exact_int_inverse(U)])
    assert C[:k] == A
    extra = C[k:]
    if len(extra) > 1:
        extra = lll_reduce(extra)
    extra = [_size_reduce(row, A) for row in extra]
    C = A + extra
    d = det_int(C)
    if d == -1 and n > k:
        C[-1] = [-v for v in C[-1]]
    assert abs(det_int(C)) == 1
    return np.array(C, dtype=np.int64)


def _exact_int_inverse(U) -> list[list[int]]:
    inv = rational_inverse(U)
    out = []
    for row in inv:
        if any(v.denominator != 1 for v in row):
            raise NotUnimodular("transform is not unimodular")
        out.append([int(v) for v in row])
    return out


def _size_reduce(row: list[int], A: IntMatrix) -> list[int]:
    """Subtract the integer combination of A's rows nearest to ``row``'s projection."""
    gram_inv = rational_inverse(_matmul(A, _transpose(A)))
    coeffs = [sum(gi * _dot(a, row) for gi, a in zip(g_row, A)) for g_row in gram_inv]
    out = list(row)
    for q, a in zip(coeffs, A):
        z = round(q)
        if z:
            out = [x - z * y for x, y in zip(out, a)]
    return out


def _gram_schmidt(b):
    bstar, mu = [], [[Fraction(0)] * len(b) for _ in b]
    norms = []
    for i, v in enumerate(b):
        w = [Fraction(x) for x in v]
        for j in range(i):
            mu[i][j] = _dot(v, bstar[j]) / norms[j] if norms[j] else Fraction(0)
            w = [x - mu[i][j] * y for x, y in zip(w, bstar[j])]
        bstar.append(w)
        norms.append(_dot(w, w))
    return norms, mu


def lll_reduce(rows, delta: Fraction = Fraction(3, 4)) -> IntMatrix:
    """LLL reduction of independent integer rows (exact rational arithmetic)."""
    b = [list(r) for r in as_int_matrix(rows)]
    k = len(b)
    if k < 2:
        return b
    norms, mu = _gram_schmidt(b)
    i = 1
    while i < k:
        for j in range(i - 1, -1, -1):
            q = round(mu[i][j])
            if q:
                b[i] = [x - q * y for x, y in zip(b[i], b[j])]
                norms, mu = _gram_schmidt(b)
        if norms[i] >= (delta - mu[i][i - 1] ** 2) * norms[i - 1]:
            i += 1
        else:
            b[i], b[i - 1] = b[i - 1], b[i]
            norms, mu = _gram_schmidt(b)
            i = max(i - 1, 1)
    return b


def gauss_reduce(u, v) -> IntMatrix:
    """Lagrange-Gauss reduction of a rank-2 lattice basis; shorter vector first."""
    u, v = list(map(int, u)), list(map(int, v))
    if _dot(u, u) > _dot(v, v):
        u, v = v, u
    while True:
        q = round(Fraction(_dot(u, v), _dot(u, u)))
        v = [a - q * b for a, b in zip(v, u)]
        if _dot(v, v) >= _dot(u, u):
            return [u, v]
        u, v = v, u


def reduce_resonance_basis(A) -> np.ndarray:
    """A basis ``Z A`` (``Z`` in GL(k, Z)) of the same lattice with more nearly orthogonal rows."""
    A = require_unimodular(A)
    if len(A) == 1:
        out = A
    elif len(A) == 2:
        out = gauss_reduce(*A)
    else:
        out = lll_reduce(A)
    return np.array(out, dtype=np.int64)


def row_angles_deg(A) -> list[float]:
    """Pairwise angles between rows, folded into [0, 90] degrees."""
    A = np.asarray(A, dtype=float)
    angles = []
    for i, j in itertools.combinations(range(A.shape[0]), 2):
        c = abs(A[i] @ A[j]) / (np.linalg.norm(A[i]) * np.linalg.norm(A[j]))
        angles.append(float(np.degrees(np.arccos(min(1.0, c)))))
    return angles


def in_row_lattice(v, A) -> bool:
    """Whether integer vector ``v`` is an integer combination of the rows of ``A``."""
    H = [row for row in hermite_normal_form(A)[0] if any(row)]
    r = [int(x) for x in v]
    for row in H:
        col = next(j for j, x in enumerate(row) if x)
        if r[col] % row[col]:
            return False
        q = r[col] // row[col]
        r = [a - q * b for a, b in zip(r, row)]
    return not any(r)


def same_lattice(A, B) -> bool:
    """Mutual membership: every row of each matrix lies in the other's row lattice."""
    A, B = as_int_matrix(A), as_int_matrix(B)
    return all(in_row_lattice(row, B) for row in A) and all(in_row_lattice(row, A) for row in B)


def cvp_oracle(B, target) -> np.ndarray:
    """Exact closest vector of the lattice spanned by the columns of ``B`` (k <= 3).

    Test oracle only. With ``z0`` the real least-squares coefficients, any
    closer lattice point ``B z`` has ``||B (z - z0)|| <= ||B (round(z0) - z0)||``,
    so enumerating ``|z - z0|_inf <= rho / sigma_min(B)`` is exhaustive.
    """
    if isinstance(B, DualLatticeBasis):
        B = B.to_float()
    B = np.asarray(B, dtype=float)
    if B.ndim == 1:
        B = B[:, None]
    k = B.shape[1]
    if k > 3:
        raise DimensionError("brute-force CVP is limited to k <= 3")
    t = np.asarray(target, dtype=float).ravel()
    z0, *_ = np.linalg.lstsq(B, t, rcond=None)
    rho = np.linalg.norm(B @ (np.round(z0) - z0))
    smin = np.linalg.svd(B, compute_uv=False)[-1]
    radius = rho / smin + 1e-9
    ranges = [range(int(np.floor(c - radius)), int(np.ceil(c + radius)) + 1) for c in z0]
    best, best_d = None, np.inf
    for z in itertools.product(*ranges):
        p = B @ np.array(z, dtype=float)
        d = np.linalg.norm(t - p)
        if d < best_d - 1e-12:
            best, best_d = p, d
    return best
