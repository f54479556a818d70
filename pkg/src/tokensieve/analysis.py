"""Embedding-level diagnostics on token grids, and a FLOPs estimator.

Tokens are assumed to lie on a height x width grid in row-major order,
token i at (i // width, i % width).  Local entropy measures how much a
token's 3x3 Moore neighborhood varies along its principal direction;
flat image regions give near-zero entropy, textured regions approach
log(number of bins).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import normal_stream
from .similarity import cosine_similarity_matrix

ENTROPY_BINS = 20
ENTROPY_EPS = 1e-8
_POWER_ITERS = 100
_POWER_TOL = 1e-10
_POWER_SEED = 0x1D5EED


@dataclass(frozen=True)
class GridShape:
    height: int
    width: int

    def check(self, n: int) -> None:
        if self.height < 1 or self.width < 1 or self.height * self.width != n:
            raise ValueError(f"grid {self.height}x{self.width} does not tile {n} tokens")


@dataclass(frozen=True)
class ModelProfile:
    layers: int
    hidden_dim: int
    ffn_dim: int

    def __post_init__(self):
        if min(self.layers, self.hidden_dim, self.ffn_dim) < 1:
            raise ValueError("profile dimensions must be positive")


def _moore_neighborhood(row: int, col: int, grid: GridShape) -> list[int]:
    cells = []
    for dr in (-1, 0, 1):
        for dc in (-1, 0, 1):
            r, c = row + dr, col + dc
            if 0 <= r < grid.height and 0 <= c < grid.width:
                cells.append(r * grid.width + c)
    return cells


def _principal_direction(x: np.ndarray) -> np.ndarray:
    """First principal component of the rows of x by power iteration.

    Deterministic start vector; iterates v <- X^T X v (without forming
    the covariance) up to 100 rounds or until the direction moves less
    than 1e-10.  A zero-variance neighborhood returns the start vector
    unchanged, projecting everything to a single value.
    """
    d = x.shape[1]
    # fixed-seed pseudo-random start; overlap with the leading component
    # is nonzero with probability 1
    v = normal_stream(_POWER_SEED, d)
    v /= np.linalg.norm(v)
    for _ in range(_POWER_ITERS):
        w = x.T @ (x @ v)
        norm = np.linalg.norm(w)
        if norm <= 1e-300:
            return v
        w /= norm
        # sign-align so the tolerance test sees direction, not orientation
        if w @ v < 0:
            w = -w
        if np.linalg.norm(w - v) <= _POWER_TOL:
            return w
        v = w
    return v


def local_entropy_map(h_v: np.ndarray, grid: GridShape) -> np.ndarray:
    """Per-token entropy of binned neighborhood projections (Moore, hop 1)."""
    h_v = np.asarray(h_v, dtype=np.float64)
    grid.check(h_v.shape[0])
    out = np.empty(h_v.shape[0])
    for row in range(grid.height):
        for col in range(grid.width):
            tok = row * grid.width + col
            hood = h_v[_moore_neighborhood(row, col, grid)]
            centered = hood - hood.mean(axis=0)
            proj = centered @ _principal_direction(centered)
            lo, hi = proj.min(), proj.max()
            if hi > lo:
                bins = np.minimum(
                    ((proj - lo) / (hi - lo) * ENTROPY_BINS).astype(np.int64),
                    ENTROPY_BINS - 1)
            else:
                bins = np.zeros(len(proj), dtype=np.int64)
            counts = np.bincount(bins, minlength=ENTROPY_BINS)
            # empty bins carry no mass and stay out of the sum; the
            # single-bin case must come out at ~1e-8, not ~20*eps*|log eps|
            p = counts[counts > 0] / len(proj) + ENTROPY_EPS
            # single occupied bin gives -(1+eps)log(1+eps) ~ -1e-8; keep
            # the nonnegativity contract
            out[tok] = max(0.0, -float(np.sum(p * np.log(p))))
    return out


def mean_neighbor_similarity(h_v: np.ndarray, grid: GridShape) -> np.ndarray:
    """Per-token mean cosine to its Moore neighbors (center excluded)."""
    h_v = np.asarray(h_v, dtype=np.float64)
    grid.check(h_v.shape[0])
    out = np.empty(h_v.shape[0])
    for row in range(grid.height):
        for col in range(grid.width):
            tok = row * grid.width + col
            others = [i for i in _moore_neighborhood(row, col, grid) if i != tok]
            sims = cosine_similarity_matrix(h_v[tok][None, :], h_v[others])
            out[tok] = float(sims.mean())
    return out


def similarity_by_distance_profile(h_v: np.ndarray, grid: GridShape,
                                   max_dist: int) -> np.ndarray:
    """Mean cosine over unordered token pairs at Manhattan distance 1..max_dist."""
    h_v = np.asarray(h_v, dtype=np.float64)
    n = h_v.shape[0]
    grid.check(n)
    if max_dist < 1:
        raise ValueError("max_dist must be >= 1")
    sims = cosine_similarity_matrix(h_v, h_v)
    rows = np.arange(n) // grid.width
    cols = np.arange(n) % grid.width
    dist = np.abs(rows[:, None] - rows[None, :]) + np.abs(cols[:, None] - cols[None, :])
    iu = np.triu_indices(n, 1)
    pair_sims = sims[iu]
    pair_dist = dist[iu]
    out = np.full(max_dist, np.nan)
    for delta in range(1, max_dist + 1):
        mask = pair_dist == delta
        if mask.any():
            out[delta - 1] = pair_sims[mask].mean()
    return out


def flops_estimate(n_tokens: int, profile: ModelProfile) -> float:
    """Prefill FLOPs: per layer 4nd^2 (projections) + 2n^2 d (attention)
    + 2ndm (FFN).  Only ratios between token counts are meaningful."""
    if n_tokens < 0:
        raise ValueError("token count must be nonnegative")
    n = float(n_tokens)
    d = float(profile.hidden_dim)
    m = float(profile.ffn_dim)
    return profile.layers * (4.0 * n * d * d + 2.0 * n * n * d + 2.0 * n * d * m)
