"""Exact linear algebra over a prime field F_p or over the rationals.

Matrices are numpy arrays: ``int64`` with canonical residues in ``[0, p)``
for prime mode, ``object`` arrays holding ints / ``Fraction`` for rational
mode.  All reductions are plain Gaussian elimination with the fixed pivot
convention (leftmost nonzero column, topmost row, pivots normalized to 1),
so kernels, solves and reduced forms are deterministic functions of the
input.

The default prime is 2^31 - 1.  This is the largest modulus for which a
single product of two canonical residues fits into int64, which lets the
elimination kernels run vectorized with a reduction after every
outer-product update.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import InputError

DEFAULT_PRIME = 2_147_483_647

_MATMUL_CHUNK = 1 << 14


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for all 64-bit integers."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class Field:
    """Arithmetic context: ``prime`` mode (default) or ``rational`` mode."""

    mode: str
    p: Optional[int] = None

    @staticmethod
    def prime(p: int = DEFAULT_PRIME) -> "Field":
        if not is_prime(p):
            raise InputError(f"modulus {p} is not prime")
        if p.bit_length() > 31:
            raise InputError(f"modulus {p} too large for the int64 kernels")
        return Field("prime", p)

    @staticmethod
    def rational() -> "Field":
        return Field("rational", None)

    # -- construction -------------------------------------------------

    def asarray(self, data, shape: Optional[tuple[int, int]] = None) -> np.ndarray:
        """Normalize ``data`` into a canonical matrix of this field."""
        if self.mode == "prime":
            a = np.asarray(data, dtype=np.int64)
            if shape is not None:
                a = a.reshape(shape) if a.size else np.zeros(shape, dtype=np.int64)
            return a % self.p
        a = np.asarray(data, dtype=object)
        if shape is not None:
            a = a.reshape(shape) if a.size else np.zeros(shape, dtype=object)
        return a

    def zeros(self, rows: int, cols: int) -> np.ndarray:
        dtype = np.int64 if self.mode == "prime" else object
        return np.zeros((rows, cols), dtype=dtype)

    def eye(self, n: int) -> np.ndarray:
        dtype = np.int64 if self.mode == "prime" else object
        return np.eye(n, dtype=dtype)

    # -- scalar helpers ------------------------------------------------

    def inv_scalar(self, x):
        if self.mode == "prime":
            return pow(int(x), self.p - 2, self.p)
        return Fraction(1, 1) / x

    def reduce(self, m: np.ndarray) -> np.ndarray:
        return m % self.p if self.mode == "prime" else m

    # -- elementwise / products ----------------------------------------

    def add(self, a, b):
        return self.reduce(a + b)

    def sub(self, a, b):
        return self.reduce(a - b)

    def neg(self, a):
        return self.reduce(-a)

    def scale(self, c, m):
        if self.mode == "prime":
            return (int(c) % self.p) * m % self.p
        return c * m

    def submul(self, v, c, row):
        """Return v - c*row, reduced.  Inputs must be canonical."""
        if self.mode == "prime":
            return (v - int(c) * row) % self.p
        return v - c * row

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Exact matrix product.

        Prime mode splits the left factor into 16-bit halves and chunks the
        inner dimension so every intermediate stays within int64.
        """
        if a.shape[1] != b.shape[0]:
            raise InputError(f"matmul shape mismatch {a.shape} x {b.shape}")
        if self.mode == "rational":
            if 0 in a.shape or 0 in b.shape:
                return self.zeros(a.shape[0], b.shape[1])
            return a @ b
        p = self.p
        out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
        if 0 in a.shape or 0 in b.shape:
            return out
        hi, lo = a >> 16, a & 0xFFFF
        shift = (1 << 16) % p
        for s in range(0, a.shape[1], _MATMUL_CHUNK):
            e = min(s + _MATMUL_CHUNK, a.shape[1])
            out = (out + (hi[:, s:e] @ b[s:e]) % p * shift) % p
            out = (out + lo[:, s:e] @ b[s:e]) % p
        return out

    def mm(self, *mats: np.ndarray) -> np.ndarray:
        """Chained matmul, left to right."""
        out = mats[0]
        for m in mats[1:]:
            out = self.matmul(out, m)
        return out

    def kron(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Kronecker product; shape (ra*rb) x (ca*cb)."""
        if 0 in a.shape or 0 in b.shape:
            return self.zeros(a.shape[0] * b.shape[0], a.shape[1] * b.shape[1])
        return self.reduce(np.kron(a, b))

    # -- elimination ----------------------------------------------------

    def rref(self, m: np.ndarray) -> tuple[np.ndarray, list[int]]:
        """Reduced row-echelon form and pivot columns (Gauss-Jordan)."""
        R = m.copy()
        rows, cols = R.shape
        pivots: list[int] = []
        r = 0
        for c in range(cols):
            if r == rows:
                break
            nz = np.nonzero(R[r:, c])[0]
            if nz.size == 0:
                continue
            pr = r + int(nz[0])
            if pr != r:
                R[[r, pr]] = R[[pr, r]]
            R[r] = self.scale(self.inv_scalar(R[r, c]), R[r])
            col = R[:, c].copy()
            col[r] = 0
            mask = col != 0
            if mask.any():
                R[mask] = self.reduce(R[mask] - np.outer(col[mask], R[r]))
            pivots.append(c)
            r += 1
        return R, pivots

    def rank(self, m: np.ndarray) -> int:
        """Rank via forward elimination on the smaller row dimension."""
        if 0 in m.shape:
            return 0
        if m.shape[0] > m.shape[1]:
            m = m.T
        R = np.ascontiguousarray(m).copy()
        rows, cols = R.shape
        r = 0
        for c in range(cols):
            if r == rows:
                break
            nz = np.nonzero(R[r:, c])[0]
            if nz.size == 0:
                continue
            pr = r + int(nz[0])
            if pr != r:
                R[[r, pr]] = R[[pr, r]]
            row = self.scale(self.inv_scalar(R[r, c]), R[r, c:])
            R[r, c:] = row
            below = R[r + 1 :, c]
            mask = below != 0
            if mask.any():
                block = R[r + 1 :, c:]
                block[mask] = self.reduce(block[mask] - np.outer(below[mask], row))
            r += 1
        return r

    def kernel_basis(self, m: np.ndarray) -> np.ndarray:
        """Columns form the canonical basis of the right null space.

        Basis vectors carry 1 at each free column of the RREF (in increasing
        order) and the negated RREF entries at the pivot columns, so
        ``m @ kernel_basis(m) == 0`` and the count is ``cols - rank``.
        """
        cols = m.shape[1]
        if m.shape[0] == 0:
            return self.eye(cols)
        R, pivots = self.rref(m)
        pivset = set(pivots)
        free = [c for c in range(cols) if c not in pivset]
        K = self.zeros(cols, len(free))
        for j, fc in enumerate(free):
            K[fc, j] = 1
            for i, pc in enumerate(pivots):
                K[pc, j] = self.neg(R[i, fc])
        return K

    def solve(self, a: np.ndarray, b: np.ndarray) -> Optional[np.ndarray]:
        """One solution of a@x = b (free variables zero), or None."""
        b = self.asarray(b).reshape(-1)
        if a.shape[0] != b.shape[0]:
            raise InputError("solve: dimension mismatch")
        X = self.solve_matrix(a, b.reshape(-1, 1))
        return None if X is None else X[:, 0]

    def solve_matrix(self, a: np.ndarray, B: np.ndarray) -> Optional[np.ndarray]:
        """Solve a@X = B columnwise; None if any column is unsolvable."""
        n = a.shape[1]
        aug = np.hstack([a, B]) if n else B.copy()
        R, pivots = self.rref(aug)
        if any(pc >= n for pc in pivots):
            return None
        X = self.zeros(n, B.shape[1])
        for i, pc in enumerate(pivots):
            X[pc] = R[i, n:]
        return X

    def inv(self, m: np.ndarray) -> Optional[np.ndarray]:
        """Inverse of a square matrix, or None when singular."""
        if m.shape[0] != m.shape[1]:
            raise InputError("inv: matrix not square")
        return self.solve_matrix(m, self.eye(m.shape[0]))

    def column_space(self, m: np.ndarray) -> np.ndarray:
        """Original columns of ``m`` at the RREF pivot positions."""
        if 0 in m.shape:
            return self.zeros(m.shape[0], 0)
        _, pivots = self.rref(m)
        return m[:, pivots]

    # -- randomness -----------------------------------------------------

    def rand_matrix(self, rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
        if self.mode == "prime":
            return rng.integers(0, self.p, size=(rows, cols), dtype=np.int64)
        vals = rng.integers(0, 1 << 20, size=(rows, cols))
        return np.array(vals, dtype=object)

    def rand_invertible(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if n == 0:
            return self.zeros(0, 0)
        while True:
            g = self.rand_matrix(rng, n, n)
            if self.rank(g) == n:
                return g

    # -- predicates -----------------------------------------------------

    def is_zero(self, m: np.ndarray) -> bool:
        return bool(np.all(m == 0))

    def eq(self, a: np.ndarray, b: np.ndarray) -> bool:
        return a.shape == b.shape and bool(np.all(a == b))
