"""Diffusion model classes and structural validation.

Node-independent models carry one finite-support distribution per node;
correlated models carry a single joint distribution over whole
configurations.  ``validate_model`` reports invariant violations as data so
malformed inputs can be diagnosed in full; engines assume validated models.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .core import (
    ONE,
    FiniteSupportDistribution,
    Hypergraph,
    MonotoneDNF,
    NodeSet,
    NodeUniverse,
    ThresholdTable,
    ThresholdVector,
    ZERO,
)


class NodeIndependenceError(ValueError):
    """Operation requires a node-independent model but got a correlated one."""


@dataclass(frozen=True)
class GeneralThresholdModel:
    """Monotone normalized threshold table per node; thresholds are drawn
    independently and uniformly from [0, 1] at the start of a diffusion."""

    universe: NodeUniverse
    tables: tuple[ThresholdTable, ...]

    def __post_init__(self):
        object.__setattr__(self, "tables", tuple(self.tables))

    def table(self, v: int) -> ThresholdTable:
        return self.tables[v]


@dataclass(frozen=True)
class TriggeringModel:
    """Per-node distribution over triggering sets: any active member of the
    sampled set activates the node."""

    universe: NodeUniverse
    triggering_sets: tuple[FiniteSupportDistribution, ...]

    def __post_init__(self):
        object.__setattr__(self, "triggering_sets", tuple(self.triggering_sets))


@dataclass(frozen=True)
class HypergraphTriggeringModel:
    """Per-node distribution over subsets of incoming hyperedges; the sampled
    subsets combine into one live hypergraph."""

    universe: NodeUniverse
    edge_sets: tuple[FiniteSupportDistribution, ...]

    def __post_init__(self):
        object.__setattr__(self, "edge_sets", tuple(self.edge_sets))


@dataclass(frozen=True)
class CorrelatedSHDModel:
    """Joint distribution over whole hypergraphs; incoming edges of different
    nodes may be correlated."""

    universe: NodeUniverse
    hypergraphs: FiniteSupportDistribution


@dataclass(frozen=True)
class SBFDModel:
    """Node-independent stochastic Boolean-function diffusion: per-node
    distribution over monotone normalized activation functions."""

    universe: NodeUniverse
    functions: tuple[FiniteSupportDistribution, ...]

    def __post_init__(self):
        object.__setattr__(self, "functions", tuple(self.functions))

    def activation_probability(self, v: int, active: Union[NodeSet, int]) -> Fraction:
        """Set-node activation probability: mass of node v's functions that
        accept the active set."""
        mask = active.mask if isinstance(active, NodeSet) else int(active)
        total = ZERO
        for p, g in self.functions[v].atoms:
            if g.evaluate(mask):
                total += p
        return total


@dataclass(frozen=True)
class CorrelatedSBFDModel:
    """Joint distribution over whole activation-function tuples (one function
    per node within each atom)."""

    universe: NodeUniverse
    function_tuples: FiniteSupportDistribution


@dataclass(frozen=True)
class CGTModel:
    """Threshold tables plus a joint (possibly correlated) finite-support
    distribution over threshold vectors."""

    universe: NodeUniverse
    tables: tuple[ThresholdTable, ...]
    thresholds: FiniteSupportDistribution

    def __post_init__(self):
        object.__setattr__(self, "tables", tuple(self.tables))


#: Every model class accepted by the engines and the CLI.
Model = Union[
    GeneralThresholdModel,
    TriggeringModel,
    HypergraphTriggeringModel,
    CorrelatedSHDModel,
    SBFDModel,
    CorrelatedSBFDModel,
    CGTModel,
]

NODE_INDEPENDENT_KINDS = (
    GeneralThresholdModel,
    TriggeringModel,
    HypergraphTriggeringModel,
    SBFDModel,
)


def _check_distribution(dist, where: str, check_config) -> list[str]:
    problems = []
    seen = set()
    for p, cfg in dist.atoms:
        if p <= 0:
            problems.append(f"atom mass {p} not positive {where}")
        from .core import config_sort_key

        key = config_sort_key(cfg)
        if key in seen:
            problems.append(f"duplicate configuration {where}")
        seen.add(key)
        problems.extend(check_config(cfg))
    if dist.total_mass() != ONE:
        problems.append(f"mass sum != 1 {where} (got {dist.total_mass()})")
    return problems


def _check_node_set(s: NodeSet, universe: NodeUniverse, where: str) -> list[str]:
    if s.universe != universe:
        return [f"node set over a different universe {where}"]
    return []


def _check_hyperedge(edge, universe: NodeUniverse, where: str) -> list[str]:
    problems = _check_node_set(edge.tail, universe, where)
    if problems:
        return problems
    if not 0 <= edge.head < universe.n:
        return [f"hyperedge head index {edge.head} out of range {where}"]
    head_label = universe.names[edge.head]
    if edge.tail.mask == 0:
        problems.append(f"hyperedge into {head_label!r} has an empty tail {where}")
    if edge.head in edge.tail:
        problems.append(f"hyperedge into {head_label!r} contains its head in the tail {where}")
    return problems


def _check_hypergraph(g: Hypergraph, universe: NodeUniverse, where: str) -> list[str]:
    if g.universe != universe:
        return [f"hypergraph over a different universe {where}"]
    problems = []
    for edge in g.edges_sorted():
        problems.extend(_check_hyperedge(edge, universe, where))
    return problems


def _check_dnf(g: MonotoneDNF, universe: NodeUniverse, owner: int | None, where: str) -> list[str]:
    if g.universe != universe:
        return [f"activation function over a different universe {where}"]
    problems = []
    if owner is not None and g.owner != owner:
        problems.append(
            f"activation function owner {universe.names[g.owner]!r} does not match node "
            f"{universe.names[owner]!r} {where}"
        )
    sets = g.minimal_true_sets
    for s in sets:
        problems.extend(_check_node_set(s, universe, where))
        if s.mask == 0:
            problems.append(f"minimal true set is empty (function not normalized) {where}")
        elif g.owner in s:
            problems.append(
                f"minimal true set for node {universe.names[g.owner]!r} contains the owner {where}"
            )
    for i, a in enumerate(sets):
        for b in sets[i + 1 :]:
            if a.mask & b.mask in (a.mask, b.mask):
                problems.append(
                    f"minimal true sets not an antichain "
                    f"({{{','.join(a.labels())}}} vs {{{','.join(b.labels())}}}) {where}"
                )
    return problems


def _check_table(t: ThresholdTable, universe: NodeUniverse, owner: int | None, where: str) -> list[str]:
    if t.universe != universe:
        return [f"threshold table over a different universe {where}"]
    problems = []
    if owner is not None and t.owner != owner:
        problems.append(f"threshold table owner mismatch {where}")
    owner_label = universe.names[t.owner]
    seen_masks = set()
    for s, v in t.entries:
        problems.extend(_check_node_set(s, universe, where))
        if v < 0 or v > 1:
            problems.append(f"value {v} outside [0, 1] for node {owner_label!r} {where}")
        if s.mask == 0 and v != 0:
            problems.append(f"f(∅) must be 0 for node {owner_label!r} {where}")
        if t.owner in s:
            problems.append(f"stored set for node {owner_label!r} contains the owner {where}")
        if s.mask in seen_masks:
            problems.append(f"duplicate stored set for node {owner_label!r} {where}")
        seen_masks.add(s.mask)
    return problems


def _check_theta(theta, universe: NodeUniverse, where: str) -> list[str]:
    if not isinstance(theta, ThresholdVector):
        return [f"threshold atom is not a threshold vector {where}"]
    problems = []
    if len(theta) != universe.n:
        problems.append(f"threshold vector length {len(theta)} != n = {universe.n} {where}")
    for i, v in enumerate(theta):
        if v < 0 or v > 1:
            problems.append(f"threshold {v} outside [0, 1] at position {i} {where}")
    return problems


def validate_model(model) -> list[str]:
    """Check every structural invariant of a model or core object.

    Returns the list of violations (empty list means OK); violations are
    data, not faults.
    """
    if isinstance(model, Hypergraph):
        return _check_hypergraph(model, model.universe, "")
    if isinstance(model, MonotoneDNF):
        return _check_dnf(model, model.universe, None, "")
    if isinstance(model, ThresholdTable):
        return _check_table(model, model.universe, None, "")
    if isinstance(model, FiniteSupportDistribution):
        return _check_distribution(model, "", lambda cfg: [])

    u = model.universe
    problems: list[str] = []

    def per_node(items, what):
        if len(items) != u.n:
            problems.append(f"expected one {what} per node, got {len(items)} for n = {u.n}")
            return False
        return True

    if isinstance(model, GeneralThresholdModel):
        if per_node(model.tables, "threshold table"):
            for v, t in enumerate(model.tables):
                problems.extend(_check_table(t, u, v, ""))
    elif isinstance(model, TriggeringModel):
        if per_node(model.triggering_sets, "triggering distribution"):
            for v, dist in enumerate(model.triggering_sets):
                where = f"for node {u.names[v]!r}"

                def check(cfg, v=v, where=where):
                    if not isinstance(cfg, NodeSet):
                        return [f"triggering atom is not a node set {where}"]
                    out = _check_node_set(cfg, u, where)
                    if not out and v in cfg:
                        out.append(f"triggering set {where} contains the node itself")
                    return out

                problems.extend(_check_distribution(dist, where, check))
    elif isinstance(model, HypergraphTriggeringModel):
        if per_node(model.edge_sets, "hyperedge-subset distribution"):
            for v, dist in enumerate(model.edge_sets):
                where = f"for node {u.names[v]!r}"

                def check(cfg, v=v, where=where):
                    if not isinstance(cfg, frozenset):
                        return [f"hyperedge atom is not a set of hyperedges {where}"]
                    out = []
                    for edge in cfg:
                        out.extend(_check_hyperedge(edge, u, where))
                        if edge.head != v:
                            out.append(f"hyperedge with head {u.names[edge.head]!r} listed {where}")
                    return out

                problems.extend(_check_distribution(dist, where, check))
    elif isinstance(model, CorrelatedSHDModel):
        problems.extend(
            _check_distribution(
                model.hypergraphs,
                "in the hypergraph distribution",
                lambda cfg: _check_hypergraph(cfg, u, "in an atom")
                if isinstance(cfg, Hypergraph)
                else ["atom is not a hypergraph"],
            )
        )
    elif isinstance(model, SBFDModel):
        if per_node(model.functions, "function distribution"):
            for v, dist in enumerate(model.functions):
                where = f"for node {u.names[v]!r}"
                problems.extend(
                    _check_distribution(
                        dist,
                        where,
                        lambda cfg, v=v, where=where: _check_dnf(cfg, u, v, where)
                        if isinstance(cfg, MonotoneDNF)
                        else [f"function atom is not a monotone DNF {where}"],
                    )
                )
    elif isinstance(model, CorrelatedSBFDModel):

        def check_tuple(cfg):
            if not isinstance(cfg, tuple):
                return ["atom is not a tuple of activation functions"]
            if len(cfg) != u.n:
                return [f"function tuple has {len(cfg)} entries for n = {u.n}"]
            out = []
            for v, g in enumerate(cfg):
                out.extend(_check_dnf(g, u, v, "in an atom"))
            return out

        problems.extend(
            _check_distribution(model.function_tuples, "in the function distribution", check_tuple)
        )
    elif isinstance(model, CGTModel):
        if per_node(model.tables, "threshold table"):
            for v, t in enumerate(model.tables):
                problems.extend(_check_table(t, u, v, ""))
        problems.extend(
            _check_distribution(
                model.thresholds,
                "in the threshold distribution",
                lambda cfg: _check_theta(cfg, u, "in an atom"),
            )
        )
    else:
        raise TypeError(f"unsupported model type {type(model).__name__}")
    return problems
