"""Similarity-driven rebalancing of structural features.

High-degree vertices keep only their most similar neighbors (prune), and
low-degree vertices gain their most similar non-neighbors (augment); rows are
then normalized to sum to 1. The self entry of each row (a vertex's own
hyperedge-degree count in the adjacency diagonal) is removed before either
step and never re-added: self-similarity is always 1 and would otherwise
consume the retention budget.

Ties in similarity are broken toward the lower vertex index so outputs are
platform-independent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import SparseRowMatrix
from .errors import DimensionMismatch
from .features import StructuralFeatures

__all__ = [
    "AdjustmentConfig",
    "AdjustedStructuralFeatures",
    "neighbor_mask",
    "augment_f2",
    "prune_f1",
    "normalize_row",
    "adjust_all",
]


@dataclass(frozen=True)
class AdjustmentConfig:
    """Retention cap (n_max), neighbor floor (m_min), and hop count k."""

    n_max: int = 32
    m_min: int = 4
    k: int = 2

    def __post_init__(self):
        if not (1 <= self.m_min <= self.n_max):
            raise ValueError(f"need 1 <= m_min <= n_max, got m_min={self.m_min}, n_max={self.n_max}")
        if self.k < 1:
            raise ValueError(f"hop count must be >= 1, got {self.k}")


@dataclass(frozen=True)
class AdjustedStructuralFeatures:
    """Hop stack of rebalanced, row-normalized adjacency variants (float entries)."""

    hops: list[SparseRowMatrix]

    @property
    def num_vertices(self):
        return self.hops[0].rows

    @property
    def k(self):
        return len(self.hops)


def _top_by_similarity(candidates, sim_row, count):
    """Highest-similarity candidate indices; ties go to the lower index."""
    order = np.lexsort((candidates, -sim_row[candidates]))
    return candidates[order[:count]]


def neighbor_mask(row: np.ndarray, self_index: int) -> np.ndarray:
    """Complement of a binarized neighbor row, with the self position forced to 0."""
    mask = (np.asarray(row) == 0).astype(np.int64)
    mask[self_index] = 0
    return mask


def augment_f2(row: np.ndarray, sim_row: np.ndarray, m_min: int, self_index: int) -> np.ndarray:
    """Raise a row to at least m_min neighbors using the most similar non-neighbors.

    Existing neighbors are never removed. If fewer candidates exist than
    needed, all of them are added.
    """
    out = np.asarray(row).copy()
    have = int(np.count_nonzero(out)) - int(out[self_index] != 0)
    need = m_min - have
    if need <= 0:
        return out
    candidates = np.flatnonzero(neighbor_mask(out, self_index))
    chosen = _top_by_similarity(candidates, np.asarray(sim_row), need)
    out[chosen] = 1
    return out


def prune_f1(row: np.ndarray, sim_row: np.ndarray, n_max: int, self_index: int) -> np.ndarray:
    """Cap a row at n_max neighbors, keeping the most similar ones; drops the self entry."""
    out = np.asarray(row).copy()
    out[self_index] = 0
    neighbors = np.flatnonzero(out)
    if len(neighbors) > n_max:
        keep = _top_by_similarity(neighbors, np.asarray(sim_row), n_max)
        out[:] = 0
        out[keep] = 1
    return out


def normalize_row(row: np.ndarray) -> np.ndarray:
    """Turn a 0/1 row into weights 1/degree; an all-zero row stays all-zero."""
    row = np.asarray(row, dtype=np.float64)
    degree = np.count_nonzero(row)
    if degree == 0:
        return row.copy()
    return row / degree


def adjust_all(
    sf: StructuralFeatures, s: np.ndarray, cfg: AdjustmentConfig
) -> AdjustedStructuralFeatures:
    """Rebalance every hop: binarize, drop self, augment, prune, normalize.

    The same raw-feature similarity matrix adjusts every hop, and the
    augment step runs before the prune step so the m_min floor survives
    pruning whenever m_min <= n_max.
    """
    n = sf.num_vertices
    s = np.asarray(s, dtype=np.float64)
    if s.shape != (n, n):
        raise DimensionMismatch(f"similarity matrix is {s.shape}, expected {(n, n)}")
    if cfg.n_max >= n:
        raise DimensionMismatch(f"n_max={cfg.n_max} must be < num_vertices={n}")
    adjusted = []
    for hop in sf.hops:
        if hop.shape != (n, n):
            raise DimensionMismatch(f"hop matrix is {hop.shape}, expected {(n, n)}")
        indptr = [0]
        indices = []
        data = []
        for i in range(n):
            row = np.zeros(n, dtype=np.int64)
            row[hop.row(i)[0]] = 1
            row[i] = 0
            row = augment_f2(row, s[i], cfg.m_min, i)
            row = prune_f1(row, s[i], cfg.n_max, i)
            weights = normalize_row(row)
            nz = np.flatnonzero(weights)
            indices.append(nz)
            data.append(weights[nz])
            indptr.append(indptr[-1] + len(nz))
        adjusted.append(
            SparseRowMatrix(
                n,
                n,
                np.array(indptr, dtype=np.int64),
                np.concatenate(indices) if indices else np.array([], dtype=np.int64),
                np.concatenate(data) if data else np.array([], dtype=np.float64),
                validate=False,
            )
        )
    return AdjustedStructuralFeatures(hops=adjusted)
