"""Hopcroft-Karp maximum bipartite matching.

Left and right vertices are arbitrary hashables. Adjacency lists are scanned
in the order given, so the matching is deterministic for a fixed input.
"""
from __future__ import annotations

from collections import deque
from typing import Hashable, Mapping, Sequence

_INF = float("inf")


def hopcroft_karp(adj: Mapping[Hashable, Sequence[Hashable]]) -> dict:
    """Maximum matching as a dict left -> right."""
    left = list(adj)
    match_l: dict = {}
    match_r: dict = {}
    dist: dict = {}

    def bfs() -> bool:
        queue = deque()
        for u in left:
            if u in match_l:
                dist[u] = _INF
            else:
                dist[u] = 0
                queue.append(u)
        found = False
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                w = match_r.get(v)
                if w is None:
                    found = True
                elif dist[w] == _INF:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return found

    def dfs(u) -> bool:
        for v in adj[u]:
            w = match_r.get(v)
            if w is None or (dist[w] == dist[u] + 1 and dfs(w)):
                match_l[u] = v
                match_r[v] = u
                return True
        dist[u] = _INF
        return False

    while bfs():
        for u in left:
            if u not in match_l:
                dfs(u)
    return match_l
