"""Max-flow on bipartite transport graphs and bottleneck matching.

Both routines are deterministic: vertices are scanned in index order.
"""
from __future__ import annotations

from collections import deque

import numpy as np


def bipartite_max_flow(supply, demand, adjacency, slack: float = 1e-12):
    """Dinic max-flow for source -> supply_i -> demand_j -> sink.

    Middle edges (``adjacency[i, j]`` true) have infinite capacity. Returns the
    flow value and the boolean mask of supply vertices reachable from the
    source in the final residual graph (the source side of a minimum cut).
    Residual capacities at or below ``slack`` count as saturated.
    """
    supply = np.asarray(supply, dtype=float)
    demand = np.asarray(demand, dtype=float)
    adjacency = np.asarray(adjacency, dtype=bool)
    n, k = len(supply), len(demand)
    if n == 0:
        return 0.0, np.zeros(0, dtype=bool)
    # node ids: 0 source, 1..n supply, n+1..n+k demand, n+k+1 sink
    src, sink = 0, n + k + 1
    size = n + k + 2
    head: list[list[int]] = [[] for _ in range(size)]
    to: list[int] = []
    cap: list[float] = []

    def edge(u, v, c):
        head[u].append(len(to))
        to.append(v)
        cap.append(c)
        head[v].append(len(to))
        to.append(u)
        cap.append(0.0)

    for i in range(n):
        edge(src, 1 + i, float(supply[i]))
    rows, cols = np.nonzero(adjacency)
    for i, j in zip(rows.tolist(), cols.tolist()):
        edge(1 + i, n + 1 + j, np.inf)
    for j in range(k):
        edge(n + 1 + j, sink, float(demand[j]))

    total = 0.0
    while True:
        level = [-1] * size
        level[src] = 0
        queue = deque([src])
        while queue:
            u = queue.popleft()
            for e in head[u]:
                if cap[e] > slack and level[to[e]] < 0:
                    level[to[e]] = level[u] + 1
                    queue.append(to[e])
        if level[sink] < 0:
            break
        it = [0] * size

        def push(u, f):
            if u == sink:
                return f
            while it[u] < len(head[u]):
                e = head[u][it[u]]
                v = to[e]
                if cap[e] > slack and level[v] == level[u] + 1:
                    got = push(v, min(f, cap[e]))
                    if got > 0:
                        cap[e] -= got
                        cap[e ^ 1] += got
                        return got
                it[u] += 1
            return 0.0

        while True:
            f = push(src, np.inf)
            if f <= 0:
                break
            total += f

    reach = [False] * size
    reach[src] = True
    queue = deque([src])
    while queue:
        u = queue.popleft()
        for e in head[u]:
            if cap[e] > slack and not reach[to[e]]:
                reach[to[e]] = True
                queue.append(to[e])
    return total, np.array(reach[1:n + 1], dtype=bool)


def perfect_matching(adjacency) -> list[int] | None:
    """Kuhn's augmenting-path matching of rows to columns; None if not perfect.

    Rows are processed in index order and each scans columns in index order,
    which makes the returned matching deterministic.
    """
    adjacency = np.asarray(adjacency, dtype=bool)
    n, k = adjacency.shape
    if n != k:
        return None
    neighbours = [np.nonzero(adjacency[i])[0].tolist() for i in range(n)]
    match_col = [-1] * k

    def augment(i, seen):
        for j in neighbours[i]:
            if not seen[j]:
                seen[j] = True
                if match_col[j] < 0 or augment(match_col[j], seen):
                    match_col[j] = i
                    return True
        return False

    for i in range(n):
        if not augment(i, [False] * k):
            return None
    match_row = [-1] * n
    for j, i in enumerate(match_col):
        match_row[i] = j
    return match_row


def bottleneck_matching(cost) -> tuple[float, list[int]]:
    """Bijection rows -> columns minimising the largest matched cost.

    Binary search over the sorted distinct costs for the smallest threshold
    admitting a perfect matching.
    """
    cost = np.asarray(cost, dtype=float)
    n = cost.shape[0]
    if n == 0:
        return 0.0, []
    if cost.shape != (n, n):
        raise ValueError("bottleneck matching needs a square cost matrix")
    values = np.unique(cost)
    lo, hi = 0, len(values) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if perfect_matching(cost <= values[mid]) is None:
            lo = mid + 1
        else:
            hi = mid
    return float(values[lo]), perfect_matching(cost <= values[lo])
