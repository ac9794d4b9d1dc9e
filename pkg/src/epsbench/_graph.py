"""Directed-graph helpers: Tarjan's algorithm, iteratively, plus recurrent-class
selection used when trimming sampled machines."""

from __future__ import annotations

from typing import Sequence


def strongly_connected_components(adjacency: Sequence[Sequence[int]]) -> list[list[int]]:
    """Strongly connected components of a directed graph.

    ``adjacency[v]`` lists the successors of vertex v (duplicates are fine).
    Iterative Tarjan, so graphs with tens of thousands of vertices do not
    touch the Python recursion limit. Components come out in Tarjan order
    (reverse topological); vertices within a component are sorted.
    """
    n = len(adjacency)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    components: list[list[int]] = []
    counter = 0

    for root in range(n):
        if index[root] != -1:
            continue
        # Each work-stack frame is (vertex, iterator position into successors).
        work = [(root, 0)]
        while work:
            v, pos = work.pop()
            if pos == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            succ = adjacency[v]
            for i in range(pos, len(succ)):
                w = succ[i]
                if index[w] == -1:
                    work.append((v, i + 1))
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comp.sort()
                components.append(comp)
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    return components


def recurrent_components(
    adjacency: Sequence[Sequence[int]],
) -> tuple[list[list[int]], list[list[int]]]:
    """(all SCCs, those with no edge leaving them)."""
    comps = strongly_connected_components(adjacency)
    member = [0] * len(adjacency)
    for ci, comp in enumerate(comps):
        for v in comp:
            member[v] = ci
    recurrent = []
    for ci, comp in enumerate(comps):
        closed = all(member[w] == ci for v in comp for w in adjacency[v])
        if closed:
            recurrent.append(comp)
    return comps, recurrent
