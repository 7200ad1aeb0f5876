"""Constructive conversions between the diffusion model classes.

Every node-independent kind (threshold, triggering, hypergraph triggering,
Boolean-function) converts to every other; the conversions preserve the
induced distribution over activation sequences exactly, which the test suite
checks by exhaustive enumeration on small universes.

``gt_to_sbfd`` uses the *level-set representation*: each threshold table is
split into nested indicator functions weighted by the gaps between its
distinct effective values, with any residual mass on the constant-0
function.  This is the unique node-independent distribution over nested
monotone functions whose set-node activation probabilities reproduce the
table, but it is not the only equivalent representation: converters are
non-injective and are tested through distribution equality, not structure.

Conversions to or from correlated kinds are rejected: a correlated
hypergraph or function model is strictly more expressive than correlated
thresholds, so no general converter exists.
"""

from __future__ import annotations

from fractions import Fraction

from .core import (
    ONE,
    ZERO,
    FiniteSupportDistribution,
    Hyperedge,
    Hypergraph,
    MonotoneDNF,
    NodeSet,
    ThresholdTable,
    antichain_minimize,
    merge_atoms,
    submasks,
)
from .models import (
    CGTModel,
    CorrelatedSBFDModel,
    CorrelatedSHDModel,
    GeneralThresholdModel,
    HypergraphTriggeringModel,
    NodeIndependenceError,
    SBFDModel,
    TriggeringModel,
)


class ConversionError(ValueError):
    """No converter exists for the requested direction."""


def hypergraph_to_dnf(g: Hypergraph) -> tuple[MonotoneDNF, ...]:
    """Per node, the disjunction over incoming tail sets, antichain-minimized.

    The resulting Boolean transition reproduces the hypergraph propagation
    step for step; nodes with no incoming edges get the constant-0 function.
    """
    u = g.universe
    tails: list[list[NodeSet]] = [[] for _ in range(u.n)]
    for edge in g.edges_sorted():
        tails[edge.head].append(edge.tail)
    return tuple(antichain_minimize(u, v, tails[v]) for v in range(u.n))


def dnf_to_hypergraph(functions: tuple[MonotoneDNF, ...]) -> Hypergraph:
    """One hyperedge per minimal true set; inverse of ``hypergraph_to_dnf``
    on hypergraphs whose tail sets already form an antichain per head."""
    if not functions:
        raise ValueError("need at least one activation function")
    u = functions[0].universe
    edges = []
    for v, g in enumerate(functions):
        if g.owner != v:
            raise ValueError(f"function at position {v} is owned by node index {g.owner}")
        for s in g.minimal_true_sets:
            edges.append(Hyperedge(s, v))
    return Hypergraph.from_edges(u, edges)


def triggering_to_hypergraph_triggering(model: TriggeringModel) -> HypergraphTriggeringModel:
    """Replace each triggering set by its singleton-tail hyperedges; the two
    models induce identical sequence distributions on every seed set."""
    u = model.universe
    per_node = []
    for v, dist in enumerate(model.triggering_sets):
        atoms = []
        for p, t in dist.atoms:
            edges = frozenset(Hyperedge(NodeSet(u, 1 << i), v) for i in t)
            atoms.append((p, edges))
        per_node.append(FiniteSupportDistribution(tuple(atoms)))
    return HypergraphTriggeringModel(u, tuple(per_node))


def _level_values(table: ThresholdTable) -> list[tuple[Fraction, list[NodeSet]]]:
    # Distinct effective values (ascending, 0 excluded) with, per value, the
    # stored sets whose effective value reaches it.
    effective = table.effective_entries()
    values = sorted({v for _, v in effective if v > 0})
    return [(a, [s for s, v in effective if v >= a]) for a in values]


def gt_to_sbfd(model: GeneralThresholdModel) -> SBFDModel:
    """Level-set representation of a threshold model.

    Per node, with 0 = a_0 < a_1 < ... < a_m the distinct effective table
    values: one atom of mass a_i - a_{i-1} whose function accepts exactly the
    sets with table value >= a_i, plus mass 1 - a_m on the constant-0
    function when a_m < 1.  Set-node activation probabilities equal the
    table values exactly, and the functions are nested.
    """
    u = model.universe
    per_node = []
    for v, table in enumerate(model.tables):
        atoms = []
        prev = ZERO
        for a, generators in _level_values(table):
            atoms.append((a - prev, antichain_minimize(u, v, generators)))
            prev = a
        if prev < ONE:
            atoms.append((ONE - prev, MonotoneDNF.constant_false(u, v)))
        per_node.append(FiniteSupportDistribution(tuple(atoms)))
    return SBFDModel(u, tuple(per_node))


def sbfd_to_gt(model: SBFDModel) -> GeneralThresholdModel:
    """Threshold tables from set-node activation probabilities.

    Per node, f(S) is the total mass of functions accepting S; the table
    stores a value only at sets where it strictly exceeds every proper
    subset, which is the minimal sparse form under max-closure.
    """
    if not isinstance(model, SBFDModel):
        raise NodeIndependenceError(
            "threshold conversion requires a node-independent Boolean-function model"
        )
    u = model.universe
    tables = []
    for v in range(u.n):
        others = u.full_mask & ~(1 << v)
        order = sorted(submasks(others), key=lambda m: (m.bit_count(), m))
        value_at: dict[int, Fraction] = {}
        stored: dict[int, Fraction] = {}
        for m in order:
            f = model.activation_probability(v, m)
            below = ZERO
            for i in bit_indices(m):
                sub = m & ~(1 << i)
                if value_at[sub] > below:
                    below = value_at[sub]
            value_at[m] = max(f, below)
            if f > below:
                stored[m] = f
        tables.append(
            ThresholdTable(u, v, tuple((NodeSet(u, m), f) for m, f in stored.items()))
        )
    return GeneralThresholdModel(u, tuple(tables))


def parameter_count(n: int) -> tuple[int, int]:
    """Parameters needed to specify, over n nodes, a full threshold model
    versus a full hypergraph triggering model: (n*(2^(n-1)-1), n*2^(2^(n-1)-1)).

    The first grows exponentially, the second doubly exponentially: the
    threshold form is the minimal parameterization of this model family.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    return n * (2 ** (n - 1) - 1), n * 2 ** (2 ** (n - 1) - 1)


# ---------------------------------------------------------------------------
# conversion orchestration (CLI `convert`)


def _sbfd_to_hypergraph_triggering(model: SBFDModel) -> HypergraphTriggeringModel:
    u = model.universe
    per_node = []
    for v, dist in enumerate(model.functions):
        pairs = []
        for p, g in dist.atoms:
            edges = frozenset(Hyperedge(s, v) for s in g.minimal_true_sets)
            pairs.append((p, edges))
        per_node.append(merge_atoms(pairs))
    return HypergraphTriggeringModel(u, tuple(per_node))


def _hypergraph_triggering_to_sbfd(model: HypergraphTriggeringModel) -> SBFDModel:
    u = model.universe
    per_node = []
    for v, dist in enumerate(model.edge_sets):
        pairs = []
        for p, edges in dist.atoms:
            tails = [e.tail for e in edges]
            pairs.append((p, antichain_minimize(u, v, tails)))
        per_node.append(merge_atoms(pairs))
    return SBFDModel(u, tuple(per_node))


def _triggering_to_sbfd(model: TriggeringModel) -> SBFDModel:
    u = model.universe
    per_node = []
    for v, dist in enumerate(model.triggering_sets):
        pairs = []
        for p, t in dist.atoms:
            singletons = [NodeSet(u, 1 << i) for i in t]
            pairs.append((p, antichain_minimize(u, v, singletons)))
        per_node.append(merge_atoms(pairs))
    return SBFDModel(u, tuple(per_node))


#: Model kinds the `convert` entry point accepts as targets.
CONVERT_TARGETS = ("gt", "sbfd", "hypergraph_triggering")


def convert_model(model, target: str):
    """Convert a node-independent model to the requested kind.

    Correlated models (joint hypergraph, function, or threshold
    distributions) are rejected: correlations across nodes cannot be folded
    into any node-independent kind, and the correlated threshold kind cannot
    express general correlated models either.
    """
    if target not in CONVERT_TARGETS:
        raise ConversionError(f"unknown conversion target {target!r}")
    if isinstance(model, (CorrelatedSHDModel, CorrelatedSBFDModel, CGTModel)):
        raise ConversionError(
            f"cannot convert a correlated model ({type(model).__name__}): "
            "no equivalence-preserving converter exists for correlated kinds"
        )

    if isinstance(model, GeneralThresholdModel):
        as_sbfd = gt_to_sbfd(model)
    elif isinstance(model, TriggeringModel):
        if target == "hypergraph_triggering":
            return triggering_to_hypergraph_triggering(model)
        as_sbfd = _triggering_to_sbfd(model)
    elif isinstance(model, HypergraphTriggeringModel):
        as_sbfd = _hypergraph_triggering_to_sbfd(model)
    elif isinstance(model, SBFDModel):
        as_sbfd = model
    else:
        raise ConversionError(f"unsupported source model {type(model).__name__}")

    if target == "sbfd":
        return as_sbfd
    if target == "gt":
        return sbfd_to_gt(as_sbfd)
    return _sbfd_to_hypergraph_triggering(as_sbfd)
