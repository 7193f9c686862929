"""Hypergraph representation and exact sparse row-matrix algebra.

Vertex adjacency is the Gram matrix of the incidence matrix: entry (i, j)
counts the hyperedges shared by vertices i and j, and the diagonal carries
each vertex's hyperedge degree. Entries stay integer-exact until the
adjustment stage converts rows to weights.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatch, EmptyHyperedge, InvalidHopCount, VertexIndexOutOfRange

__all__ = [
    "SparseRowMatrix",
    "Hypergraph",
    "build_hypergraph",
    "adjacency",
    "spmm",
    "khop_stack",
]


class SparseRowMatrix:
    """Immutable CSR matrix: per row, strictly increasing column indices, no stored zeros.

    `data` keeps whatever dtype it was built with; structural matrices use
    int64 so products of counts stay exact.
    """

    __slots__ = ("rows", "cols", "indptr", "indices", "data")

    def __init__(self, rows, cols, indptr, indices, data, validate=True):
        self.rows = int(rows)
        self.cols = int(cols)
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int64)
        self.data = np.asarray(data)
        if validate:
            self._check()

    def _check(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("negative matrix dimensions")
        if self.indptr.shape != (self.rows + 1,):
            raise ValueError("indptr length must be rows + 1")
        if self.indptr[0] != 0 or np.any(np.diff(self.indptr) < 0):
            raise ValueError("indptr must start at 0 and be non-decreasing")
        if self.indptr[-1] != len(self.indices) or len(self.indices) != len(self.data):
            raise ValueError("indices/data length disagrees with indptr")
        if len(self.indices):
            if self.indices.min() < 0 or self.indices.max() >= self.cols:
                raise ValueError("column index out of bounds")
        for r in range(self.rows):
            cols = self.indices[self.indptr[r] : self.indptr[r + 1]]
            if len(cols) > 1 and np.any(np.diff(cols) <= 0):
                raise ValueError(f"row {r}: column indices not strictly increasing")
        if np.any(self.data == 0):
            raise ValueError("explicit zeros are not allowed")

    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def nnz(self):
        return len(self.data)

    def row(self, i):
        """Return (column indices, values) views for row i."""
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return self.indices[lo:hi], self.data[lo:hi]

    @classmethod
    def from_dense(cls, arr):
        arr = np.asarray(arr)
        if arr.ndim != 2:
            raise ValueError("expected a 2-D array")
        return cls.from_scipy(sp.csr_array(arr))

    @classmethod
    def from_scipy(cls, mat):
        """Canonicalize a scipy sparse matrix (sorted columns, zeros dropped)."""
        mat = sp.csr_array(mat)
        mat.sum_duplicates()
        mat.sort_indices()
        mat.eliminate_zeros()
        return cls(mat.shape[0], mat.shape[1], mat.indptr, mat.indices, mat.data, validate=False)

    @classmethod
    def identity(cls, n, dtype=np.int64):
        idx = np.arange(n, dtype=np.int64)
        return cls(n, n, np.arange(n + 1), idx, np.ones(n, dtype=dtype), validate=False)

    def to_scipy(self):
        return sp.csr_array((self.data, self.indices, self.indptr), shape=self.shape)

    def to_dense(self):
        out = np.zeros(self.shape, dtype=self.data.dtype if self.nnz else np.int64)
        for r in range(self.rows):
            lo, hi = self.indptr[r], self.indptr[r + 1]
            out[r, self.indices[lo:hi]] = self.data[lo:hi]
        return out

    def transpose(self):
        return SparseRowMatrix.from_scipy(self.to_scipy().T)

    def equals(self, other):
        """Exact structural and value equality."""
        return (
            self.shape == other.shape
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.data, other.data)
        )

    def __repr__(self):
        return f"SparseRowMatrix(shape={self.shape}, nnz={self.nnz}, dtype={self.data.dtype})"


@dataclass(frozen=True)
class Hypergraph:
    """Vertex set plus hyperedge memberships, stored as an N x M incidence matrix.

    Every stored entry is 1; column j lists the member vertices of hyperedge j.
    """

    num_vertices: int
    num_hyperedges: int
    incidence: SparseRowMatrix


def build_hypergraph(vertex_count: int, hyperedges: Sequence[Iterable[int]]) -> Hypergraph:
    """Build a hypergraph from explicit hyperedge membership sets.

    Raises EmptyHyperedge for an edge with no vertices and
    VertexIndexOutOfRange for any member outside [0, vertex_count).
    """
    if vertex_count < 0:
        raise VertexIndexOutOfRange("vertex_count must be non-negative")
    rows = []
    cols = []
    for j, edge in enumerate(hyperedges):
        members = sorted(set(int(v) for v in edge))
        if not members:
            raise EmptyHyperedge(f"hyperedge {j} has no vertices")
        if members[0] < 0 or members[-1] >= vertex_count:
            bad = members[0] if members[0] < 0 else members[-1]
            raise VertexIndexOutOfRange(
                f"hyperedge {j} refers to vertex {bad}, valid range is [0, {vertex_count})"
            )
        rows.extend(members)
        cols.extend([j] * len(members))
    m = len(list(hyperedges))
    mat = sp.csr_array(
        (np.ones(len(rows), dtype=np.int64), (np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64))),
        shape=(vertex_count, m),
    )
    return Hypergraph(vertex_count, m, SparseRowMatrix.from_scipy(mat))


def adjacency(h: Hypergraph) -> SparseRowMatrix:
    """Vertex adjacency: incidence times its transpose, shared-hyperedge counts."""
    inc = h.incidence.to_scipy()
    return SparseRowMatrix.from_scipy(inc @ inc.T)


def spmm(a: SparseRowMatrix, b: SparseRowMatrix) -> SparseRowMatrix:
    """Exact sparse product a @ b; result stores no explicit zeros."""
    if a.cols != b.rows:
        raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
    return SparseRowMatrix.from_scipy(a.to_scipy() @ b.to_scipy())


def khop_stack(a: SparseRowMatrix, k: int) -> list[SparseRowMatrix]:
    """Return [a, a^2, ..., a^k] for square a; power p is spmm applied p - 1 times."""
    if k < 1:
        raise InvalidHopCount(f"hop count must be >= 1, got {k}")
    if a.rows != a.cols:
        raise DimensionMismatch(f"k-hop stack needs a square matrix, got {a.shape}")
    hops = [a]
    for _ in range(k - 1):
        hops.append(spmm(hops[-1], a))
    return hops
