"""Compressed sparse row matrix used throughout the feature pipeline.

Count matrices, TF-IDF matrices and classifier inputs all share this one
type. Values are float64 even for counts so transforms never change dtype.
"""

from __future__ import annotations

import numpy as np

from .errors import DataError


class SparseMatrix:
    """CSR matrix: row offsets, column indices and float64 values.

    Column indices are strictly increasing within each row; offsets are
    monotone. Instances are treated as immutable after construction.
    """

    __slots__ = ("n_rows", "n_cols", "indptr", "indices", "data")

    def __init__(self, n_rows, n_cols, indptr, indices, data, check=True):
        self.n_rows = int(n_rows)
        self.n_cols = int(n_cols)
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int64)
        self.data = np.asarray(data, dtype=np.float64)
        if check:
            self.validate()

    def validate(self):
        """Raise DataError unless the CSR structure is well-formed."""
        if self.indptr.shape != (self.n_rows + 1,):
            raise DataError("CSR indptr length must be n_rows + 1")
        if self.indptr[0] != 0 or self.indptr[-1] != len(self.indices):
            raise DataError("CSR indptr must start at 0 and end at nnz")
        if np.any(np.diff(self.indptr) < 0):
            raise DataError("CSR indptr must be monotone non-decreasing")
        if len(self.indices) != len(self.data):
            raise DataError("CSR indices and data must have equal length")
        if len(self.indices):
            if self.indices.min() < 0 or self.indices.max() >= self.n_cols:
                raise DataError("CSR column index out of range")
        for i in range(self.n_rows):
            row = self.indices[self.indptr[i]:self.indptr[i + 1]]
            if len(row) > 1 and np.any(np.diff(row) <= 0):
                raise DataError(f"CSR columns not strictly increasing in row {i}")

    @property
    def shape(self):
        return (self.n_rows, self.n_cols)

    @property
    def nnz(self):
        return len(self.data)

    @classmethod
    def from_rows(cls, rows, n_cols):
        """Build from an iterable of {column: value} dicts, one per row."""
        indptr = [0]
        indices = []
        data = []
        for row in rows:
            for col in sorted(row):
                val = row[col]
                if val != 0.0:
                    indices.append(col)
                    data.append(float(val))
            indptr.append(len(indices))
        return cls(len(indptr) - 1, n_cols, indptr, indices, data, check=False)

    @classmethod
    def from_dense(cls, array):
        arr = np.asarray(array, dtype=np.float64)
        if arr.ndim != 2:
            raise DataError("from_dense expects a 2-D array")
        indptr = [0]
        indices = []
        data = []
        for i in range(arr.shape[0]):
            nz = np.nonzero(arr[i])[0]
            indices.extend(nz.tolist())
            data.extend(arr[i, nz].tolist())
            indptr.append(len(indices))
        return cls(arr.shape[0], arr.shape[1], indptr, indices, data, check=False)

    def to_dense(self, max_cells=None):
        """Materialize as a dense array; guard against pathological sizes."""
        cells = self.n_rows * self.n_cols
        if max_cells is not None and cells > max_cells:
            raise DataError(
                f"densifying {self.n_rows}x{self.n_cols} exceeds the "
                f"{max_cells}-cell limit"
            )
        out = np.zeros((self.n_rows, self.n_cols))
        row_ids = np.repeat(np.arange(self.n_rows), np.diff(self.indptr))
        out[row_ids, self.indices] = self.data
        return out

    def row(self, i):
        """View of (column indices, values) for row i."""
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return self.indices[lo:hi], self.data[lo:hi]

    def row_ids(self):
        """Row index of every stored entry, aligned with indices/data."""
        return np.repeat(np.arange(self.n_rows), np.diff(self.indptr))

    def select_rows(self, which):
        """New matrix holding the given rows, in the given order."""
        which = np.asarray(which, dtype=np.int64)
        counts = np.diff(self.indptr)[which]
        indptr = np.concatenate(([0], np.cumsum(counts)))
        total = int(indptr[-1])
        indices = np.empty(total, dtype=np.int64)
        data = np.empty(total)
        pos = 0
        for r in which:
            lo, hi = self.indptr[r], self.indptr[r + 1]
            n = hi - lo
            indices[pos:pos + n] = self.indices[lo:hi]
            data[pos:pos + n] = self.data[lo:hi]
            pos += n
        return SparseMatrix(len(which), self.n_cols, indptr, indices, data,
                            check=False)

    def select_columns(self, cols):
        """Project onto the given (ascending) columns, reindexed to 0..k-1."""
        cols = np.asarray(cols, dtype=np.int64)
        lookup = np.full(self.n_cols, -1, dtype=np.int64)
        lookup[cols] = np.arange(len(cols))
        mapped = lookup[self.indices] if len(self.indices) else self.indices
        keep = mapped >= 0
        prefix = np.concatenate(([0], np.cumsum(keep)))
        indptr = prefix[self.indptr]
        return SparseMatrix(self.n_rows, len(cols), indptr, mapped[keep],
                            self.data[keep], check=False)

    def scale_columns(self, factors):
        factors = np.asarray(factors, dtype=np.float64)
        data = self.data * factors[self.indices] if len(self.data) else self.data
        return SparseMatrix(self.n_rows, self.n_cols, self.indptr,
                            self.indices, data, check=False)

    def normalize_rows_l2(self):
        """Scale each nonzero row to unit L2 norm; zero rows stay zero."""
        sq = np.concatenate(([0.0], np.cumsum(self.data ** 2)))
        norms = np.sqrt(sq[self.indptr[1:]] - sq[self.indptr[:-1]])
        scale = np.where(norms > 0.0, 1.0 / np.where(norms > 0.0, norms, 1.0), 0.0)
        data = self.data * np.repeat(scale, np.diff(self.indptr)) if len(self.data) else self.data
        return SparseMatrix(self.n_rows, self.n_cols, self.indptr,
                            self.indices, data, check=False)

    def column_sums(self):
        return np.bincount(self.indices, weights=self.data,
                           minlength=self.n_cols)

    def column_nnz(self):
        """Per-column count of stored entries (document frequency for counts)."""
        return np.bincount(self.indices, minlength=self.n_cols)

    def row_nnz(self):
        return np.diff(self.indptr)

    def dot_dense(self, W):
        """X @ W for a dense (n_cols,) or (n_cols, m) W."""
        W = np.asarray(W, dtype=np.float64)
        vec = W.ndim == 1
        if vec:
            W = W[:, None]
        out = np.zeros((self.n_rows, W.shape[1]))
        if len(self.data):
            np.add.at(out, self.row_ids(), self.data[:, None] * W[self.indices])
        return out[:, 0] if vec else out

    def transpose_dot(self, v):
        """X.T @ v for a dense (n_rows,) v."""
        v = np.asarray(v, dtype=np.float64)
        if not len(self.data):
            return np.zeros(self.n_cols)
        return np.bincount(self.indices, weights=self.data * v[self.row_ids()],
                           minlength=self.n_cols)

    def equals(self, other):
        return (self.shape == other.shape
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices)
                and np.array_equal(self.data, other.data))

    def __repr__(self):
        return f"SparseMatrix({self.n_rows}x{self.n_cols}, nnz={self.nnz})"
