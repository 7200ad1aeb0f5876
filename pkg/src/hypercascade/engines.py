"""Deterministic propagation primitives and seeded stochastic diffusion.

Public operations take and return :class:`NodeSet` / :class:`ProgressiveSequence`
values; the mask-level helpers (``_*_sequence``) are shared with the exact
enumerator and the Monte-Carlo estimator, which pre-compile a model once and
then run bitmask-only inner loops.

Sampling follows the contract in :mod:`hypercascade.rng`: one draw per node
and trial for node-independent models (slot = node index), one whole-model
draw per trial for correlated models (slot = n).  ``sample_diffuse`` is trial
0 of the given master seed, so a recorded seed reproduces the sequence
exactly.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Sequence

from . import rng
from .core import (
    Hypergraph,
    MonotoneDNF,
    NodeSet,
    ProgressiveSequence,
    ThresholdVector,
    UniverseMismatchError,
    bit_indices,
)
from .models import (
    CGTModel,
    CorrelatedSBFDModel,
    CorrelatedSHDModel,
    GeneralThresholdModel,
    HypergraphTriggeringModel,
    SBFDModel,
    TriggeringModel,
)

# ---------------------------------------------------------------------------
# mask-level steppers


def _bfs_step_mask(edges, active: int) -> int:
    # edges: sequence of (tail_mask, head_bit); one-step hyperedge rule.
    new = active
    for tail, head_bit in edges:
        if not new & head_bit and tail & active == tail:
            new |= head_bit
    return new


def _bfs_sequence(edges, seed: int, n: int) -> tuple[int, ...]:
    masks = [seed]
    cur = seed
    while len(masks) < n:
        nxt = _bfs_step_mask(edges, cur)
        if nxt == cur:
            break
        masks.append(nxt)
        cur = nxt
    return tuple(masks)


def _cover_step_mask(per_node_sets, active: int) -> int:
    # per_node_sets[v]: masks whose containment in the active set turns v on.
    new = active
    for v, sets in enumerate(per_node_sets):
        bit = 1 << v
        if active & bit:
            continue
        for m in sets:
            if m & active == m:
                new |= bit
                break
    return new


def _cover_sequence(per_node_sets, seed: int, n: int) -> tuple[int, ...]:
    masks = [seed]
    cur = seed
    while len(masks) < n:
        nxt = _cover_step_mask(per_node_sets, cur)
        if nxt == cur:
            break
        masks.append(nxt)
        cur = nxt
    return tuple(masks)


def _intersect_sequence(trigger_masks, seed: int, n: int) -> tuple[int, ...]:
    # trigger_masks[v]: sampled triggering set; any active member activates v.
    masks = [seed]
    cur = seed
    while len(masks) < n:
        nxt = cur
        for v, t in enumerate(trigger_masks):
            bit = 1 << v
            if not cur & bit and t & cur:
                nxt |= bit
        if nxt == cur:
            break
        masks.append(nxt)
        cur = nxt
    return tuple(masks)


def _gt_value(table_desc, active: int) -> Fraction:
    # table_desc: (mask, value) pairs sorted by value descending; max-closure.
    for m, v in table_desc:
        if m & active == m:
            return v
    return Fraction(0)


def _gt_fixed_sequence(tables_desc, theta, seed: int, n: int) -> tuple[int, ...]:
    masks = [seed]
    cur = seed
    while len(masks) < n:
        nxt = cur
        for v in range(n):
            bit = 1 << v
            if not cur & bit and _gt_value(tables_desc[v], cur) >= theta[v]:
                nxt |= bit
        if nxt == cur:
            break
        masks.append(nxt)
        cur = nxt
    return tuple(masks)


# ---------------------------------------------------------------------------
# compiled model views


def compile_hypergraph(g: Hypergraph) -> tuple[tuple[int, int], ...]:
    return tuple((e.tail.mask, 1 << e.head) for e in g.edges_sorted())


def compile_function_tuple(functions: Sequence[MonotoneDNF]) -> tuple[tuple[int, ...], ...]:
    return tuple(g.set_masks() for g in functions)


def compile_tables(model) -> tuple[tuple[tuple[int, Fraction], ...], ...]:
    return tuple(
        tuple(
            sorted(((s.mask, v) for s, v in t.entries), key=lambda e: e[1], reverse=True)
        )
        for t in model.tables
    )


# ---------------------------------------------------------------------------
# public deterministic operations


def _require_universe(universe, s: NodeSet) -> None:
    if s.universe != universe:
        raise UniverseMismatchError("seed set belongs to a different universe")


def _require_seed(universe, s0: NodeSet) -> int:
    _require_universe(universe, s0)
    if s0.mask == 0:
        raise ValueError("seed set must be nonempty")
    return s0.mask


def bfs_step(g: Hypergraph, active: NodeSet) -> NodeSet:
    """One propagation step: add every head whose tail set is fully active."""
    _require_universe(g.universe, active)
    return NodeSet(g.universe, _bfs_step_mask(compile_hypergraph(g), active.mask))


def bfs_propagate(g: Hypergraph, seed: NodeSet) -> ProgressiveSequence:
    """Deterministic propagation on a hypergraph, reported at length n."""
    s0 = _require_seed(g.universe, seed)
    return ProgressiveSequence(g.universe, _bfs_sequence(compile_hypergraph(g), s0, g.universe.n))


def boolean_transition(functions: Sequence[MonotoneDNF], state: NodeSet) -> NodeSet:
    """One step of the Boolean transition: v is on in the result when it was
    already on or its activation function accepts the other nodes' states."""
    u = state.universe
    if len(functions) != u.n:
        raise ValueError(f"expected {u.n} activation functions, got {len(functions)}")
    for v, g in enumerate(functions):
        if g.owner != v:
            raise ValueError(f"function at position {v} is owned by node index {g.owner}")
        if g.universe != u:
            raise UniverseMismatchError("activation function over a different universe")
    return NodeSet(u, _cover_step_mask(compile_function_tuple(functions), state.mask))


def sbfd_diffuse(functions: Sequence[MonotoneDNF], seed: NodeSet) -> ProgressiveSequence:
    """Repeatedly apply the Boolean transition from the seed, reported at length n."""
    u = seed.universe
    s0 = _require_seed(u, seed)
    if len(functions) != u.n:
        raise ValueError(f"expected {u.n} activation functions, got {len(functions)}")
    for v, g in enumerate(functions):
        if g.owner != v:
            raise ValueError(f"function at position {v} is owned by node index {g.owner}")
    return ProgressiveSequence(u, _cover_sequence(compile_function_tuple(functions), s0, u.n))


def gt_diffuse_fixed(
    model: GeneralThresholdModel, theta: ThresholdVector | Sequence[Fraction], seed: NodeSet
) -> ProgressiveSequence:
    """Threshold diffusion under a fixed threshold vector.

    A node activates as soon as its table value on the active set reaches its
    threshold; in particular a node with threshold 0 activates at the first
    step (its normalized table value is always >= 0).
    """
    u = model.universe
    s0 = _require_seed(u, seed)
    values = tuple(Fraction(v) for v in theta)
    if len(values) != u.n:
        raise ValueError(f"expected {u.n} thresholds, got {len(values)}")
    return ProgressiveSequence(u, _gt_fixed_sequence(compile_tables(model), values, s0, u.n))


# ---------------------------------------------------------------------------
# seeded sampling


def _per_node_samplers(distributions, compile_config):
    compiled = []
    for dist in distributions:
        thresholds = rng.cdf_thresholds([p for p, _ in dist.atoms])
        configs = tuple(compile_config(cfg) for _, cfg in dist.atoms)
        compiled.append((thresholds, configs))
    return compiled

def _pick(compiled_node, master_seed: int, trial: int, slot: int):
    thresholds, configs = compiled_node
    return configs[rng.pick_index(thresholds, rng.unit_draw(master_seed, trial, slot))]


def compiled_sampler(model, seed: NodeSet) -> Callable[[int, int], tuple[int, ...]]:
    """Compile ``model`` into ``run(master_seed, trial) -> trimmed mask tuple``.

    One compilation serves any number of trials; trials are independent
    streams, so Monte-Carlo runs may be split across workers by trial range.
    """
    u = model.universe
    s0 = _require_seed(u, seed)
    n = u.n
    whole = n  # slot for whole-model draws

    if isinstance(model, GeneralThresholdModel):
        tables = compile_tables(model)

        def run(master_seed: int, trial: int) -> tuple[int, ...]:
            theta = tuple(rng.uniform_fraction(master_seed, trial, v) for v in range(n))
            return _gt_fixed_sequence(tables, theta, s0, n)

    elif isinstance(model, TriggeringModel):
        per_node = _per_node_samplers(model.triggering_sets, lambda s: s.mask)

        def run(master_seed: int, trial: int) -> tuple[int, ...]:
            triggers = tuple(
                _pick(per_node[v], master_seed, trial, v) for v in range(n)
            )
            return _intersect_sequence(triggers, s0, n)

    elif isinstance(model, HypergraphTriggeringModel):
        per_node = _per_node_samplers(
            model.edge_sets,
            lambda edges: tuple((e.tail.mask, 1 << e.head) for e in sorted(edges, key=lambda e: e.sort_key())),
        )

        def run(master_seed: int, trial: int) -> tuple[int, ...]:
            edges: list[tuple[int, int]] = []
            for v in range(n):
                edges.extend(_pick(per_node[v], master_seed, trial, v))
            return _bfs_sequence(edges, s0, n)

    elif isinstance(model, SBFDModel):
        per_node = _per_node_samplers(model.functions, lambda g: g.set_masks())

        def run(master_seed: int, trial: int) -> tuple[int, ...]:
            functions = tuple(_pick(per_node[v], master_seed, trial, v) for v in range(n))
            return _cover_sequence(functions, s0, n)

    elif isinstance(model, CorrelatedSHDModel):
        thresholds = rng.cdf_thresholds([p for p, _ in model.hypergraphs.atoms])
        graphs = tuple(compile_hypergraph(g) for _, g in model.hypergraphs.atoms)

        def run(master_seed: int, trial: int) -> tuple[int, ...]:
            draw = rng.unit_draw(master_seed, trial, whole)
            return _bfs_sequence(graphs[rng.pick_index(thresholds, draw)], s0, n)

    elif isinstance(model, CorrelatedSBFDModel):
        thresholds = rng.cdf_thresholds([p for p, _ in model.function_tuples.atoms])
        tuples = tuple(compile_function_tuple(fs) for _, fs in model.function_tuples.atoms)

        def run(master_seed: int, trial: int) -> tuple[int, ...]:
            draw = rng.unit_draw(master_seed, trial, whole)
            return _cover_sequence(tuples[rng.pick_index(thresholds, draw)], s0, n)

    elif isinstance(model, CGTModel):
        tables = compile_tables(model)
        thresholds = rng.cdf_thresholds([p for p, _ in model.thresholds.atoms])
        vectors = tuple(tuple(theta) for _, theta in model.thresholds.atoms)

        def run(master_seed: int, trial: int) -> tuple[int, ...]:
            draw = rng.unit_draw(master_seed, trial, whole)
            return _gt_fixed_sequence(tables, vectors[rng.pick_index(thresholds, draw)], s0, n)

    else:
        raise TypeError(f"unsupported model type {type(model).__name__}")
    return run


def sample_diffuse(model, seed: NodeSet, rng_seed: int) -> ProgressiveSequence:
    """Sample one configuration from the model and run its deterministic
    diffusion; identical (model, seed, rng_seed) always yields the same
    sequence.  Equals trial 0 of a Monte-Carlo run with the same master seed.
    """
    run = compiled_sampler(model, seed)
    return ProgressiveSequence(model.universe, run(rng_seed, 0))


def cgt_diffuse(model: CGTModel, seed: NodeSet, rng_seed: int) -> ProgressiveSequence:
    """Sample a joint threshold vector, then run the fixed-threshold diffusion."""
    if not isinstance(model, CGTModel):
        raise TypeError("cgt_diffuse requires a correlated general threshold model")
    return sample_diffuse(model, seed, rng_seed)
