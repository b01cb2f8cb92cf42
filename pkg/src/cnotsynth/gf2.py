"""Dense GF(2) parity-matrix algebra for CNOT circuits.

A CNOT circuit on n qubits acts linearly on qubit parities.  The action is
captured by an n x n Boolean matrix: starting from the identity, every gate
CNOT(control, target) XORs the control row into the target row.  Row i,
column j is 1 iff the output parity of qubit i includes input qubit j.
"""
from __future__ import annotations

import random
from typing import Iterable, Sequence

import numpy as np


class ParityMatrix:
    """Square GF(2) matrix stored as a uint8 numpy array.

    Mutating operations (``row_xor``) act in place; ``rank`` and
    ``is_identity`` never modify the matrix.
    """

    __slots__ = ("bits",)

    def __init__(self, bits) -> None:
        arr = np.array(bits, dtype=np.uint8) % 2
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise ValueError(f"parity matrix must be square and non-empty, got shape {arr.shape}")
        self.bits = arr

    @property
    def n(self) -> int:
        return self.bits.shape[0]

    @classmethod
    def identity(cls, n: int) -> "ParityMatrix":
        if n < 1:
            raise ValueError("qubit count must be >= 1")
        return cls(np.eye(n, dtype=np.uint8))

    @classmethod
    def from_circuit(cls, gates: Iterable[tuple[int, int]], n: int) -> "ParityMatrix":
        """Build the parity matrix of a CNOT gate sequence.

        Args:
            gates: (control, target) pairs in temporal order.
            n: qubit count.

        Returns:
            The matrix obtained by applying ``row[target] ^= row[control]``
            to the identity, gate by gate.  Always invertible.
        """
        m = cls.identity(n)
        for k, (control, target) in enumerate(gates):
            if not (0 <= control < n and 0 <= target < n):
                raise ValueError(f"gate {k}: qubit index out of range for n={n}: ({control},{target})")
            if control == target:
                raise ValueError(f"gate {k}: control and target coincide ({control})")
            m.bits[target] ^= m.bits[control]
        return m

    def row_xor(self, src: int, dst: int) -> "ParityMatrix":
        """XOR row ``src`` into row ``dst`` in place.  Involution per (src, dst)."""
        if src == dst:
            raise ValueError("row_xor requires src != dst")
        n = self.n
        if not (0 <= src < n and 0 <= dst < n):
            raise ValueError(f"row index out of range for n={n}: ({src},{dst})")
        self.bits[dst] ^= self.bits[src]
        return self

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.bits, np.eye(self.n, dtype=np.uint8)))

    def rank(self) -> int:
        """GF(2) rank via Gaussian elimination on a copy."""
        return gf2_rank(self.bits)

    def copy(self) -> "ParityMatrix":
        return ParityMatrix(self.bits)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, ParityMatrix):
            return bool(np.array_equal(self.bits, other.bits))
        return NotImplemented

    def __repr__(self) -> str:
        rows = ",".join("".join(str(int(b)) for b in row) for row in self.bits)
        return f"ParityMatrix({self.n}x{self.n}: {rows})"


def gf2_rank(matrix) -> int:
    """Rank of a (not necessarily square) binary matrix over GF(2)."""
    mat = (np.array(matrix, dtype=np.uint8) % 2).copy()
    if mat.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    rows, cols = mat.shape
    rank = 0
    for col in range(cols):
        pivot = None
        for r in range(rank, rows):
            if mat[r, col]:
                pivot = r
                break
        if pivot is None:
            continue
        if pivot != rank:
            mat[[rank, pivot]] = mat[[pivot, rank]]
        for r in range(rows):
            if r != rank and mat[r, col]:
                mat[r] ^= mat[rank]
        rank += 1
        if rank == rows:
            break
    return rank


def solve_gf2(rows, y) -> np.ndarray | None:
    """Find a row subset of ``rows`` whose XOR equals ``y``.

    Solves x^T A = y over GF(2) for A of shape (m, k) and y of length k.

    Returns:
        A 0/1 indicator vector of length m (free variables fixed to 0), or
        ``None`` when ``y`` is outside the row span.
    """
    A = np.array(rows, dtype=np.uint8) % 2
    b = np.array(y, dtype=np.uint8) % 2
    if A.ndim != 2 or A.shape[0] < 1:
        raise ValueError("coefficient matrix must be non-empty and 2-d")
    m, k = A.shape
    if b.shape != (k,):
        raise ValueError(f"dimension mismatch: matrix has {k} columns, vector has shape {b.shape}")

    # Gauss-Jordan on [A^T | y]: unknowns select rows of A.
    aug = np.concatenate([A.T, b[:, None]], axis=1)
    pivot_cols: list[int] = []
    r = 0
    for c in range(m):
        pivot = None
        for rr in range(r, k):
            if aug[rr, c]:
                pivot = rr
                break
        if pivot is None:
            continue
        if pivot != r:
            aug[[r, pivot]] = aug[[pivot, r]]
        for rr in range(k):
            if rr != r and aug[rr, c]:
                aug[rr] ^= aug[r]
        pivot_cols.append(c)
        r += 1
        if r == k:
            break
    if np.any(aug[r:, m]):
        return None
    x = np.zeros(m, dtype=np.uint8)
    for i, c in enumerate(pivot_cols):
        x[c] = aug[i, m]
    return x


def xor_rows(matrix, indices: Sequence[int]) -> np.ndarray:
    """XOR of the selected rows; the all-zero vector for an empty selection."""
    mat = np.asarray(matrix, dtype=np.uint8)
    out = np.zeros(mat.shape[1], dtype=np.uint8)
    for i in indices:
        out ^= mat[i]
    return out


def random_invertible(n: int, seed: int) -> ParityMatrix:
    """Seeded random invertible matrix: identity hit by 5*n^2 row XORs."""
    if n < 1:
        raise ValueError("qubit count must be >= 1")
    m = ParityMatrix.identity(n)
    if n == 1:
        return m
    rng = random.Random(seed)
    for _ in range(5 * n * n):
        src = rng.randrange(n)
        dst = rng.randrange(n - 1)
        if dst >= src:
            dst += 1
        m.row_xor(src, dst)
    return m
