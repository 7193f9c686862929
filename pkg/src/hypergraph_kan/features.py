"""Per-vertex structural features and raw-feature cosine similarity."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Hypergraph, SparseRowMatrix, adjacency, khop_stack

__all__ = [
    "StructuralFeatures",
    "as_feature_matrix",
    "structural_features",
    "cosine_similarity",
]


@dataclass(frozen=True)
class StructuralFeatures:
    """Hop stack [A, A^2, ..., A^k]; row i of hop p is vertex i's p-hop profile."""

    hops: list[SparseRowMatrix]

    @property
    def num_vertices(self):
        return self.hops[0].rows

    @property
    def k(self):
        return len(self.hops)


def as_feature_matrix(values) -> np.ndarray:
    """Validate and return a dense float64 N x d feature matrix.

    Rejects empty or non-finite input; accepts anything array-like.
    """
    x = np.ascontiguousarray(values, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
        raise ValueError(f"feature matrix must be 2-D and non-empty, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("feature matrix contains NaN or Inf")
    return x


def structural_features(h: Hypergraph, k: int) -> StructuralFeatures:
    """k-hop neighbor profiles: the adjacency power stack of the hypergraph."""
    return StructuralFeatures(hops=khop_stack(adjacency(h), k))


def cosine_similarity(x: np.ndarray) -> np.ndarray:
    """Dense N x N cosine similarity of feature rows.

    Rows with zero norm are treated as dissimilar to everything (similarity 0,
    including to themselves), so the output never contains NaN.
    """
    x = as_feature_matrix(x)
    norms = np.linalg.norm(x, axis=1)
    safe = np.where(norms > 0.0, norms, 1.0)
    unit = x / safe[:, None]
    unit[norms == 0.0] = 0.0
    return unit @ unit.T
