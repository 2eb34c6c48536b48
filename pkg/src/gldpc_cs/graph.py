"""The hashing matrix H and the support-restricted bipartite graph.

H is never stored: column i of H is the set bins_of(i), drawn from the
left d-regular ensemble by a generator keyed on (seed, i).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Tuple

import numpy as np

from .prf import KeyedStream

DENSE_GUARD = 10**8


@dataclass(frozen=True)
class BinHasher:
    b: int
    d: int
    seed: int
    stream: KeyedStream = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not 1 <= self.d <= self.b:
            raise ValueError(f"Need 1 <= d <= b, got d={self.d}, b={self.b}")
        object.__setattr__(self, "stream", KeyedStream(self.seed, "graph"))

    def bins_of(self, i: int) -> Tuple[int, ...]:
        """The d distinct bins of signal index i, sorted."""
        if self.d == self.b:
            return tuple(range(self.b))
        rng = self.stream.generator(i)
        chosen: List[int] = []
        # Rejection sampling keeps the draw uniform over d-subsets.
        while len(chosen) < self.d:
            for candidate in rng.integers(0, self.b, size=self.d).tolist():
                if candidate not in chosen:
                    chosen.append(candidate)
                    if len(chosen) == self.d:
                        break
        return tuple(sorted(chosen))

    def contains(self, i: int, j: int) -> bool:
        """H_ij == 1."""
        return j in self.bins_of(i)


def h_matrix(hasher: BinHasher, n: int) -> np.ndarray:
    """Dense b x n 0/1 matrix H. Only for tiny n."""
    if hasher.b * n > DENSE_GUARD:
        raise ValueError(f"Refusing to materialize H with {hasher.b} x {n} entries")
    h = np.zeros((hasher.b, n), dtype=np.int8)
    for i in range(n):
        h[list(hasher.bins_of(i)), i] = 1
    return h


@dataclass
class SupportGraph:
    support: Tuple[int, ...]
    edges: List[Tuple[int, int]]
    signal_bins: Dict[int, Tuple[int, ...]]
    bin_signals: Dict[int, Tuple[int, ...]]
    d: int

    @property
    def bins(self) -> Tuple[int, ...]:
        return tuple(sorted(self.bin_signals))


def build_support_graph(support: Iterable[int], hasher: BinHasher) -> SupportGraph:
    ordered = tuple(sorted(set(int(i) for i in support)))
    edges: List[Tuple[int, int]] = []
    signal_bins: Dict[int, Tuple[int, ...]] = {}
    bin_members: Dict[int, List[int]] = {}
    for i in ordered:
        bins = hasher.bins_of(i)
        signal_bins[i] = bins
        for j in bins:
            edges.append((i, j))
            bin_members.setdefault(j, []).append(i)
    return SupportGraph(
        support=ordered,
        edges=edges,
        signal_bins=signal_bins,
        bin_signals={j: tuple(members) for j, members in bin_members.items()},
        d=hasher.d,
    )


class ComponentKind(str, Enum):
    TREE = "tree"
    UNICYCLIC = "unicyclic"
    COMPLEX = "complex"


@dataclass(frozen=True)
class Component:
    signals: Tuple[int, ...]
    bins: Tuple[int, ...]
    edges: int

    @property
    def nodes(self) -> int:
        return len(self.signals) + len(self.bins)

    @property
    def kind(self) -> ComponentKind:
        excess = self.edges - self.nodes
        if excess == -1:
            return ComponentKind.TREE
        if excess == 0:
            return ComponentKind.UNICYCLIC
        return ComponentKind.COMPLEX


@dataclass(frozen=True)
class ComponentReport:
    components: Tuple[Component, ...]

    def count(self, kind: ComponentKind) -> int:
        return sum(1 for comp in self.components if comp.kind is kind)

    @property
    def largest_signals(self) -> int:
        return max((len(comp.signals) for comp in self.components), default=0)

    @property
    def tree_or_unicyclic(self) -> bool:
        return self.count(ComponentKind.COMPLEX) == 0

    def kind_of(self, i: int) -> ComponentKind:
        for comp in self.components:
            if i in comp.signals:
                return comp.kind
        raise KeyError(i)


class UnionFind:
    """Disjoint sets with path compression and union by size."""

    def __init__(self, size: int):
        self.parents = list(range(size))
        self.sizes = [1] * size

    def find(self, elem: int) -> int:
        root = elem
        while root != self.parents[root]:
            root = self.parents[root]
        while elem != root:
            self.parents[elem], elem = root, self.parents[elem]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.sizes[ra] < self.sizes[rb]:
            ra, rb = rb, ra
        self.parents[rb] = ra
        self.sizes[ra] += self.sizes[rb]


def component_census(g: SupportGraph) -> ComponentReport:
    """Split the graph into connected components and classify each one."""
    signal_ids = {i: pos for pos, i in enumerate(g.support)}
    bins = g.bins
    bin_ids = {j: len(signal_ids) + pos for pos, j in enumerate(bins)}
    uf = UnionFind(len(signal_ids) + len(bin_ids))
    for i, j in g.edges:
        uf.union(signal_ids[i], bin_ids[j])

    signals: Dict[int, List[int]] = {}
    members: Dict[int, List[int]] = {}
    edge_counts: Dict[int, int] = {}
    for i in g.support:
        signals.setdefault(uf.find(signal_ids[i]), []).append(i)
    for j in bins:
        members.setdefault(uf.find(bin_ids[j]), []).append(j)
    for i, _ in g.edges:
        root = uf.find(signal_ids[i])
        edge_counts[root] = edge_counts.get(root, 0) + 1

    components = tuple(
        Component(signals=tuple(sig), bins=tuple(members.get(root, ())), edges=edge_counts.get(root, 0))
        for root, sig in sorted(signals.items(), key=lambda item: item[1][0])
    )
    return ComponentReport(components=components)


__all__ = [
    "BinHasher",
    "Component",
    "ComponentKind",
    "ComponentReport",
    "SupportGraph",
    "UnionFind",
    "build_support_graph",
    "component_census",
    "h_matrix",
]
