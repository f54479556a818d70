"""Intersection fusion of the redundancy-pruned and query-conditioned
selections, plus the ablation baselines.

The fused rule: take the redundancy-filtered candidate set G, walk the
full greedy MAP order, and keep each G-member encountered until the
budget m is met; if the walk runs out of G-members the remaining slots
are filled with the earliest not-yet-kept tokens of the same greedy
order.  Because greedy selection is prefix-consistent, walking one
length-n order is equivalent to re-running it with increasing budgets.
The walk extends the greedy state in predicted chunks rather than
computing all n steps up front; the kept set only depends on the order,
so overshooting a chunk never changes the result.
"""

from __future__ import annotations

import numpy as np

from .gsp import DEFAULT_GAMMA, DEFAULT_TAU, gsp_select
from .qcsp import EPS, GreedyState, build_kernel, greedy_map
from .rng import SplitMix64
from .similarity import mean_pool, min_max_normalize, relevance_scores
from .tensor_io import Selection


def _relevance_for(h_v: np.ndarray, h_q) -> np.ndarray:
    if h_q is None:
        # no query: uniform relevance, selection degrades to pure diversity
        return np.ones(h_v.shape[0])
    return min_max_normalize(relevance_scores(h_v, mean_pool(h_q)))


def script_select(h_v: np.ndarray, h_q, m: int, tau: float = DEFAULT_TAU,
                  gamma: float = DEFAULT_GAMMA, gsp_keep: int | None = None,
                  eps: float = EPS, backend: str | None = None) -> Selection:
    """Budget-m fused selection; kept order follows the greedy-order scan."""
    h_v = np.asarray(h_v, dtype=np.float64)
    n = h_v.shape[0]
    if not 1 <= m <= n:
        raise ValueError(f"budget must lie in [1, {n}], got {m}")
    if gsp_keep is None:
        gsp_keep = min(n, 2 * m)
    if not 1 <= gsp_keep <= n:
        raise ValueError(f"gsp_keep must lie in [1, {n}], got {gsp_keep}")

    g_members = set(gsp_select(h_v, tau, gamma, gsp_keep).kept)
    state = GreedyState(build_kernel(h_v, _relevance_for(h_v, h_q)), eps=eps, backend=backend)

    kept: list[int] = []
    g_unseen = len(g_members)
    scanned = 0
    target = min(n, m)
    while True:
        state.extend(target)
        while scanned < state.t and len(kept) < m and g_unseen > 0:
            idx = int(state.order[scanned])
            scanned += 1
            if idx in g_members:
                kept.append(idx)
                g_unseen -= 1
        if len(kept) == m or g_unseen == 0 or state.t == n:
            break
        # the g_unseen remaining members are spread over the n - scanned
        # unwalked positions; predict the walk length with 10% headroom
        need = m - len(kept)
        predicted = scanned + need * (n - scanned) / g_unseen
        target = min(n, max(state.t + 32, int(1.1 * predicted)))

    tags = ["intersection"] * len(kept)
    if len(kept) < m:
        # not enough intersection members anywhere: fill from the greedy
        # order itself, earliest first
        state.extend(min(n, max(m, state.t)))
        kept_set = set(kept)
        for idx in state.order[: state.t]:
            if len(kept) == m:
                break
            idx = int(idx)
            if idx not in kept_set:
                kept.append(idx)
                tags.append("qcsp-fill")
    return Selection(
        kept=kept,
        n_original=n,
        stage_tags=tags,
        params={"mode": "script", "m": m, "tau": tau, "gamma": gamma,
                "gsp_keep": gsp_keep, "eps": eps},
    )


def baseline_random(n: int, m: int, seed: int) -> Selection:
    if not 1 <= m <= n:
        raise ValueError(f"budget must lie in [1, {n}], got {m}")
    kept = SplitMix64(seed).sample_without_replacement(n, m)
    return Selection(kept, n, ["baseline"] * m, {"mode": "random", "m": m, "seed": seed})


def baseline_topk_relevance(h_v: np.ndarray, h_q: np.ndarray, m: int) -> Selection:
    """Top-m tokens by raw relevance, descending; ties to lower index."""
    h_v = np.asarray(h_v, dtype=np.float64)
    n = h_v.shape[0]
    if not 1 <= m <= n:
        raise ValueError(f"budget must lie in [1, {n}], got {m}")
    raw = relevance_scores(h_v, mean_pool(h_q))
    ranked = np.argsort(-raw, kind="stable")
    return Selection([int(i) for i in ranked[:m]], n, ["baseline"] * m,
                     {"mode": "topk", "m": m})


def baseline_diversity_only(h_v: np.ndarray, m: int,
                            backend: str | None = None) -> Selection:
    """Greedy MAP with uniform relevance: diversity with no query signal."""
    h_v = np.asarray(h_v, dtype=np.float64)
    n = h_v.shape[0]
    if not 1 <= m <= n:
        raise ValueError(f"budget must lie in [1, {n}], got {m}")
    kept = greedy_map(build_kernel(h_v, np.ones(n)), m, backend=backend)
    return Selection(kept, n, ["baseline"] * m, {"mode": "diversity", "m": m})


def baseline_gsp_only(h_v: np.ndarray, m: int, tau: float = DEFAULT_TAU,
                      gamma: float = DEFAULT_GAMMA) -> Selection:
    return gsp_select(h_v, tau, gamma, keep=m)
