"""Cosine similarity, pooling, and normalization primitives.

Shared by the redundancy graph (GSP side) and the kernel builder (QCSP
side).  All functions promote to float64 and are pure.  Zero-norm rows
get cosine 0 by convention, which keeps NaN out of the pipeline and
makes an all-zero token maximally non-redundant and non-relevant.
"""

from __future__ import annotations

import numpy as np


def l2_normalize_rows(m: np.ndarray) -> np.ndarray:
    """Scale each row to unit Euclidean norm; zero rows stay zero."""
    m = np.asarray(m, dtype=np.float64)
    norms = np.linalg.norm(m, axis=1, keepdims=True)
    safe = np.where(norms > 0.0, norms, 1.0)
    return m / safe


def cosine_similarity_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise cosines, entry (i, j) = cos(a_i, b_j); 0 when either row is zero."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[1]:
        raise ValueError(f"column counts must match, got {a.shape} and {b.shape}")
    return l2_normalize_rows(a) @ l2_normalize_rows(b).T


def mean_pool(q: np.ndarray) -> np.ndarray:
    """Elementwise mean over rows (the pooled query embedding)."""
    q = np.asarray(q, dtype=np.float64)
    if q.ndim != 2 or q.shape[0] < 1:
        raise ValueError("mean_pool needs at least one row")
    return q.mean(axis=0)


def relevance_scores(h_v: np.ndarray, h_mu: np.ndarray) -> np.ndarray:
    """Raw relevance r_i = cos(h_i, h_mu), in [-1, 1]."""
    h_mu = np.asarray(h_mu, dtype=np.float64)
    if h_mu.ndim != 1:
        raise ValueError("h_mu must be a vector")
    # exactly the single-column cosine matrix, so the two paths never diverge
    return cosine_similarity_matrix(h_v, h_mu[None, :])[:, 0]


RELEVANCE_FLOOR = 1e-6


def min_max_normalize(v: np.ndarray) -> np.ndarray:
    """Map to [0, 1] by (v - min)/(max - min), then floor at 1e-6.

    A constant vector maps to all ones: uniform relevance must degrade
    the kernel to pure diversity, not to zero.  The floor keeps every
    token selectable when the budget approaches n.
    """
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("min_max_normalize needs a nonempty vector")
    lo, hi = v.min(), v.max()
    if hi == lo:
        return np.ones_like(v)
    return np.maximum((v - lo) / (hi - lo), RELEVANCE_FLOOR)
