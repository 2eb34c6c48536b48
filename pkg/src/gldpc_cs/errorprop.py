"""Error propagation through the peeling process.

Each recovered signal i carries a point error e_i from the noise of its
recovery bin m(i). Peeling an estimate into a bin leaves its error behind,
so later estimates from that bin inherit it:

    p_i = e_i + sum_{j in in(i)} (-1/c) g_i^T q_j
    q_j = sum_{l in in(j)} p_l g_l

The analysis runs beside the decoder with oracle access to the true noise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Tuple

import numpy as np

from .columns import ColumnGenerator
from .decoder import DecodeResult
from .graph import BinHasher, ComponentKind, build_support_graph, component_census
from .scheme import SparseSignal

MAX_PATHS = 2


class ComplexComponentError(ValueError):
    """Path expansion requested inside a component with more than one cycle."""


@dataclass(frozen=True)
class ErrorNode:
    index: int
    iteration: int
    bin: int
    point_error: float


@dataclass
class ErrorGraph:
    """Recovered signals (in recovery order) and the signals peeled into each bin."""

    nodes: Dict[int, ErrorNode]
    bin_inputs: Dict[int, Tuple[int, ...]]
    c: int
    component_kinds: Dict[int, ComponentKind] = field(default_factory=dict)

    def ordered(self) -> List[ErrorNode]:
        position = {i: pos for pos, i in enumerate(self.nodes)}
        return sorted(self.nodes.values(), key=lambda node: (node.iteration, position[node.index]))

    def inputs_of(self, i: int) -> Tuple[int, ...]:
        """Recovered signals whose residuals reached x_i through its recovery bin."""
        return tuple(l for l in self.bin_inputs.get(self.nodes[i].bin, ()) if l in self.nodes)


@dataclass(frozen=True)
class PathTerm:
    source: int
    count: int
    coefficients: Tuple[float, ...]


def point_error(i: int, noise: np.ndarray, gen: ColumnGenerator) -> float:
    """e_i = -(1/c) g_i^T z_m(i)."""
    return -float(gen.column(i) @ noise) / gen.c


def component_kinds(support: Iterable[int], hasher: BinHasher) -> Dict[int, ComponentKind]:
    report = component_census(build_support_graph(support, hasher))
    return {i: comp.kind for comp in report.components for i in comp.signals}


def build_error_graph(
    result: DecodeResult,
    hasher: BinHasher,
    gen: ColumnGenerator,
    noise_of_bin: Callable[[int], np.ndarray],
) -> ErrorGraph:
    nodes = {
        entry.index: ErrorNode(
            index=entry.index,
            iteration=entry.iteration,
            bin=entry.bin,
            point_error=point_error(entry.index, noise_of_bin(entry.bin), gen),
        )
        for entry in result.trace
    }
    inputs: Dict[int, List[int]] = {}
    for step in result.subtractions:
        inputs.setdefault(step.bin, []).append(step.index)
    return ErrorGraph(
        nodes=nodes,
        bin_inputs={j: tuple(ls) for j, ls in inputs.items()},
        c=gen.c,
        component_kinds=component_kinds(nodes, hasher),
    )


def propagate(graph: ErrorGraph, gen: ColumnGenerator) -> Tuple[Dict[int, float], Dict[int, np.ndarray]]:
    """Message passing in recovery order; returns (p_i per node, q_j per bin)."""
    p: Dict[int, float] = {}
    q: Dict[int, np.ndarray] = {}

    def bin_error(j: int) -> np.ndarray:
        if j not in q:
            q[j] = sum(
                (p[l] * gen.column(l) for l in graph.bin_inputs.get(j, ()) if l in p),
                np.zeros(graph.c),
            )
        return q[j]

    for node in graph.ordered():
        total = node.point_error
        if graph.inputs_of(node.index):
            total += -float(gen.column(node.index) @ bin_error(node.bin)) / graph.c
        p[node.index] = total
    for j in graph.bin_inputs:
        bin_error(j)
    return p, q


def path_counts(graph: ErrorGraph, i: int) -> Dict[int, int]:
    """Number of directed paths from each earlier signal to x_i."""
    counts: Dict[int, int] = {}
    stack = [i]
    while stack:
        target = stack.pop()
        for source in graph.inputs_of(target):
            counts[source] = counts.get(source, 0) + 1
            stack.append(source)
    return counts


def _require_expandable(graph: ErrorGraph, i: int) -> Dict[int, int]:
    if graph.component_kinds.get(i) is ComponentKind.COMPLEX:
        raise ComplexComponentError(f"Signal {i} lies in a complex component; path counts are unbounded")
    counts = path_counts(graph, i)
    crowded = {l: n for l, n in counts.items() if n > MAX_PATHS}
    if crowded:
        raise ComplexComponentError(f"Signal {i} has more than {MAX_PATHS} paths from {sorted(crowded)}")
    return counts


def path_expansion(graph: ErrorGraph, i: int, gen: ColumnGenerator) -> List[PathTerm]:
    """p_i = e_i + sum over sources l and paths of e_l * d_{l,p}."""
    _require_expandable(graph, i)
    coefficients: Dict[int, List[float]] = {}
    stack: List[Tuple[int, float]] = [(i, 1.0)]
    while stack:
        target, weight = stack.pop()
        g_target = gen.column(target)
        for source in graph.inputs_of(target):
            d = weight * -float(g_target @ gen.column(source)) / graph.c
            coefficients.setdefault(source, []).append(d)
            stack.append((source, d))
    return [
        PathTerm(source=l, count=len(ds), coefficients=tuple(ds))
        for l, ds in sorted(coefficients.items())
    ]


def expanded_error(graph: ErrorGraph, i: int, terms: List[PathTerm]) -> float:
    return graph.nodes[i].point_error + sum(
        graph.nodes[term.source].point_error * d for term in terms for d in term.coefficients
    )


def variance_bound(graph: ErrorGraph, i: int, sigma2: float, c: int) -> float:
    """var(p_i) <= (1 + sum_l P(l, i)^2) sigma^2 / c."""
    counts = _require_expandable(graph, i)
    return (1 + sum(n * n for n in counts.values())) * sigma2 / c


def classification_ok(result: DecodeResult, signal: SparseSignal, hasher: BinHasher) -> bool:
    """Support recovered exactly and every recovery bin held only its own signal plus peeled residuals."""
    if set(result.recovered_support()) != set(signal.support()):
        return False
    graph = build_support_graph(signal.support(), hasher)
    peeled: Dict[int, set] = {}
    for step in result.subtractions:
        peeled.setdefault(step.bin, set()).add(step.index)
    for entry in result.trace:
        others = set(graph.bin_signals.get(entry.bin, ())) - {entry.index}
        if others != peeled.get(entry.bin, set()):
            return False
    return True


__all__ = [
    "ComplexComponentError",
    "ErrorGraph",
    "ErrorNode",
    "PathTerm",
    "build_error_graph",
    "classification_ok",
    "component_kinds",
    "expanded_error",
    "path_counts",
    "path_expansion",
    "point_error",
    "propagate",
    "variance_bound",
]
