"""Query-conditioned kernel construction and greedy MAP selection.

The kernel is L(i,j) = r_i * r_j * <u_i, u_j> for l2-normalized token
rows u and normalized relevance r, i.e. the Gram matrix of the rows
r_i * u_i.  Greedy MAP maintains, per candidate, the residual gain
v_i^2 (the determinant ratio a selection would contribute) and a
coefficient vector u_i via incremental Cholesky updates:

    j      = argmax over unselected i of v_i^2   (ties: lower index)
    e_i    = (L(j,i) - <u_j, u_i>) / sqrt(v_j^2 + eps)
    u_i   += [e_i]
    v_i^2 -= e_i^2

Candidates whose v^2 has fallen to <= 0 are never picked; if none are
positive the kernel rank is exhausted and the remaining budget is
padded by ascending index so callers always get exactly k indices.

Two step-loop backends exist: a compiled one (tokensieve._native) and a
numpy one, chosen at import with identical selection semantics.
"""

from __future__ import annotations

import numpy as np

from .similarity import l2_normalize_rows, mean_pool, min_max_normalize, relevance_scores

try:
    from ._native import greedy_steps as _native_steps
except ImportError:
    _native_steps = None

EPS = 1e-6
MATERIALIZE_THRESHOLD = 4096


def available_backends() -> tuple[str, ...]:
    return ("native", "python") if _native_steps is not None else ("python",)


def default_backend() -> str:
    return available_backends()[0]


class DppKernel:
    """Relevance-reweighted similarity kernel, materialized or row-on-demand.

    Entries come from the scaled rows V = diag(relevance) @ unit_rows, so
    the matrix is symmetric PSD by construction with diagonal relevance^2
    (zero-embedding rows get diagonal 0).  Matrices up to
    materialize_threshold rows are stored densely; beyond that only V is
    kept and rows are computed on demand, which is all greedy MAP needs.
    """

    def __init__(self, unit_rows: np.ndarray, relevance: np.ndarray,
                 materialize_threshold: int = MATERIALIZE_THRESHOLD):
        self.unit = unit_rows
        self.relevance = relevance
        self.n = unit_rows.shape[0]
        self.materialize_threshold = materialize_threshold
        self._scaled = unit_rows * relevance[:, None]
        self._L = None
        if self.n <= materialize_threshold:
            self.materialize()

    @property
    def materialized(self) -> bool:
        return self._L is not None

    def materialize(self) -> np.ndarray:
        if self._L is None:
            l = self._scaled @ self._scaled.T
            # force exact symmetry; gemm may differ across the diagonal by ~1e-17
            self._L = np.tril(l) + np.tril(l, -1).T
        return self._L

    def row(self, j: int) -> np.ndarray:
        if self._L is not None:
            return self._L[j]
        return self._scaled @ self._scaled[j]

    def entry(self, i: int, j: int) -> float:
        if self._L is not None:
            return float(self._L[i, j])
        return float(self._scaled[i] @ self._scaled[j])

    def diagonal(self) -> np.ndarray:
        if self._L is not None:
            return np.diagonal(self._L).copy()
        return np.einsum("ij,ij->i", self._scaled, self._scaled)

    def sim_matrix(self) -> np.ndarray:
        """The underlying cosine matrix S' of the normalized rows (uncached)."""
        s = self.unit @ self.unit.T
        return np.tril(s) + np.tril(s, -1).T


def build_kernel(h_v: np.ndarray, r_norm: np.ndarray,
                 materialize_threshold: int = MATERIALIZE_THRESHOLD) -> DppKernel:
    h_v = np.asarray(h_v, dtype=np.float64)
    r = np.asarray(r_norm, dtype=np.float64)
    if h_v.ndim != 2 or r.ndim != 1 or h_v.shape[0] != r.shape[0]:
        raise ValueError(f"shape mismatch: tokens {h_v.shape}, relevance {r.shape}")
    if r.size and (r.min() < -1e-12 or r.max() > 1.0 + 1e-12):
        raise ValueError("normalized relevance must lie in [0, 1]")
    return DppKernel(l2_normalize_rows(h_v), r, materialize_threshold)


class GreedyState:
    """Resumable greedy MAP state; extend(k) is prefix-consistent.

    v_sq holds residual gains (selected entries are parked at -inf),
    order/gains record each step's winner and its v^2 at selection time,
    and coefficients(i) returns the candidate's Cholesky row u_i.
    """

    def __init__(self, kernel: DppKernel, eps: float = EPS, backend: str | None = None):
        if backend is None:
            backend = "native" if (_native_steps is not None and kernel.materialized) else "python"
        if backend == "native":
            if _native_steps is None:
                raise ValueError("native backend is not built")
            kernel.materialize()
        elif backend != "python":
            raise ValueError(f"unknown backend {backend!r}")
        self.kernel = kernel
        self.backend = backend
        self.eps = float(eps)
        n = kernel.n
        self.v_sq = kernel.diagonal().astype(np.float64)
        self.selected = np.zeros(n, dtype=np.uint8)
        self.order = np.full(n, -1, dtype=np.int64)
        self.gains = np.zeros(n)
        self.exhausted = False
        self.t = 0
        self._cis = None  # (cap, n) for python, (n, cap) for native

    def _ensure_capacity(self, k: int) -> None:
        cap = 0 if self._cis is None else (
            self._cis.shape[0] if self.backend == "python" else self._cis.shape[1])
        if k <= cap:
            return
        new_cap = min(self.kernel.n, max(k, 2 * cap, 16))
        n = self.kernel.n
        if self.backend == "python":
            fresh = np.empty((new_cap, n))
            if self.t:
                fresh[: self.t] = self._cis[: self.t]
        else:
            fresh = np.empty((n, new_cap))
            if self.t:
                fresh[:, : self.t] = self._cis[:, : self.t]
        self._cis = fresh

    def coefficients(self, i: int) -> np.ndarray:
        if self.t == 0:
            return np.zeros(0)
        if self.backend == "python":
            return self._cis[: self.t, i].copy()
        return self._cis[i, : self.t].copy()

    def extend(self, k: int) -> None:
        """Grow the selection order to length k (no-op if already there)."""
        n = self.kernel.n
        if not 1 <= k <= n:
            raise ValueError(f"k must lie in [1, {n}], got {k}")
        if k <= self.t:
            return
        if not self.exhausted:
            self._ensure_capacity(k)
            if self.backend == "native":
                t_done, ex = _native_steps(
                    self.kernel.materialize(), self._cis, self.v_sq, self.selected,
                    self.order, self.gains, self.t, k, self.eps)
            else:
                t_done, ex = self._python_steps(self.t, k)
            self.t = t_done
            self.exhausted = bool(ex)
        if self.exhausted and self.t < k:
            # kernel rank exhausted: pad by ascending index to honor the budget
            pad = np.flatnonzero(self.selected == 0)[: k - self.t]
            for idx in pad:
                self.order[self.t] = idx
                self.gains[self.t] = 0.0
                self.selected[idx] = 1
                self.v_sq[idx] = -np.inf
                self.t += 1

    def _python_steps(self, t_start: int, t_stop: int) -> tuple[int, bool]:
        v = self.v_sq
        cis = self._cis
        kernel = self.kernel
        for t in range(t_start, t_stop):
            j = int(np.argmax(v))
            vj = v[j]
            if not vj > 0.0:
                return t, True
            denom = np.sqrt(vj + self.eps)
            row = kernel.row(j)
            if t == 0:
                eis = row / denom
            else:
                eis = (row - cis[:t, j] @ cis[:t, :]) / denom
            cis[t, :] = eis
            v -= eis * eis
            v[j] = -np.inf
            self.selected[j] = 1
            self.order[t] = j
            self.gains[t] = vj
        return t_stop, False


def greedy_map(kernel: DppKernel, k: int, eps: float = EPS,
               backend: str | None = None) -> list[int]:
    """Exactly k distinct indices in selection order."""
    state = GreedyState(kernel, eps=eps, backend=backend)
    state.extend(k)
    return [int(i) for i in state.order[:k]]


def qcsp_select(h_v: np.ndarray, h_q: np.ndarray, k: int,
                eps: float = EPS, backend: str | None = None) -> list[int]:
    """Relevance scoring against the pooled query, then greedy MAP."""
    r_norm = min_max_normalize(relevance_scores(h_v, mean_pool(h_q)))
    return greedy_map(build_kernel(h_v, r_norm), k, eps=eps, backend=backend)
