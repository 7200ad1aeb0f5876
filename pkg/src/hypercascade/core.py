"""Shared domain types for stochastic network diffusion.

Node sets are dense bitmasks over a fixed, ordered node universe, and every
probability is an exact :class:`fractions.Fraction`, so distribution equality
can be decided without tolerances.  All types are immutable after
construction and safe to share across workers.

Constructors here are deliberately permissive about *model-data* invariants
(mass sums, antichain structure, normalization): those are reported by
``validate_model`` in :mod:`hypercascade.models` rather than raised, so that
malformed input files can be diagnosed in full.  Plain programming errors
(mixing universes, out-of-range bitmasks) raise immediately.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

ZERO = Fraction(0)
ONE = Fraction(1)

#: Exact rational probability; arbitrary precision, canonical reduced form.
Probability = Fraction


class ValidationError(ValueError):
    """Model data violates a structural invariant."""


class UniverseMismatchError(ValueError):
    """Two objects over different node universes were combined."""


def as_probability(value: Union[int, str, Fraction]) -> Fraction:
    """Coerce to an exact rational and require it to lie in [0, 1]."""
    p = Fraction(value)
    if p < 0 or p > 1:
        raise ValidationError(f"probability {p} outside [0, 1]")
    return p


def bit_indices(mask: int) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def submasks(mask: int) -> Iterator[int]:
    """Yield every submask of ``mask``, including 0 and ``mask`` itself."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


@dataclass(frozen=True)
class NodeUniverse:
    """Ordered set of distinct node labels; indices are stable for its lifetime."""

    names: tuple[str, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        names = tuple(self.names)
        if not names:
            raise ValidationError("node universe must contain at least one node")
        if len(set(names)) != len(names):
            raise ValidationError("node labels must be unique")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "_index", {name: i for i, name in enumerate(names)})

    @property
    def n(self) -> int:
        return len(self.names)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise KeyError(f"unknown node label {label!r}") from None

    def labels_of(self, mask: int) -> tuple[str, ...]:
        """Labels of the set bits, in universe order."""
        return tuple(self.names[i] for i in bit_indices(mask))

    def empty_set(self) -> "NodeSet":
        return NodeSet(self, 0)

    def full_set(self) -> "NodeSet":
        return NodeSet(self, self.full_mask)

    def subset(self, labels: Iterable[str]) -> "NodeSet":
        return NodeSet.from_labels(self, labels)

    def singleton(self, label: str) -> "NodeSet":
        return NodeSet(self, 1 << self.index(label))

    def all_nonempty_subsets(self) -> Iterator["NodeSet"]:
        """All 2^n - 1 nonempty node sets, in ascending mask order."""
        for mask in range(1, self.full_mask + 1):
            yield NodeSet(self, mask)


@dataclass(frozen=True, repr=False)
class NodeSet:
    """Subset of a node universe, stored as a dense bitmask."""

    universe: NodeUniverse
    mask: int

    def __post_init__(self):
        if not 0 <= self.mask <= self.universe.full_mask:
            raise ValueError(f"mask {self.mask:#x} outside universe of size {self.universe.n}")

    @classmethod
    def from_labels(cls, universe: NodeUniverse, labels: Iterable[str]) -> "NodeSet":
        mask = 0
        for label in labels:
            mask |= 1 << universe.index(label)
        return cls(universe, mask)

    @classmethod
    def from_indices(cls, universe: NodeUniverse, indices: Iterable[int]) -> "NodeSet":
        mask = 0
        for i in indices:
            mask |= 1 << i
        return cls(universe, mask)

    def _same_universe(self, other: "NodeSet") -> None:
        if self.universe != other.universe:
            raise UniverseMismatchError("node sets belong to different universes")

    def labels(self) -> tuple[str, ...]:
        return self.universe.labels_of(self.mask)

    def indices(self) -> tuple[int, ...]:
        return tuple(bit_indices(self.mask))

    def __contains__(self, index: int) -> bool:
        return bool(self.mask >> index & 1)

    def __iter__(self) -> Iterator[int]:
        return bit_indices(self.mask)

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __bool__(self) -> bool:
        return self.mask != 0

    def __or__(self, other: "NodeSet") -> "NodeSet":
        self._same_universe(other)
        return NodeSet(self.universe, self.mask | other.mask)

    def __and__(self, other: "NodeSet") -> "NodeSet":
        self._same_universe(other)
        return NodeSet(self.universe, self.mask & other.mask)

    def __sub__(self, other: "NodeSet") -> "NodeSet":
        self._same_universe(other)
        return NodeSet(self.universe, self.mask & ~other.mask)

    def __le__(self, other: "NodeSet") -> bool:
        self._same_universe(other)
        return self.mask & other.mask == self.mask

    def issubset(self, other: "NodeSet") -> bool:
        return self <= other

    def complement(self) -> "NodeSet":
        return NodeSet(self.universe, self.universe.full_mask & ~self.mask)

    def __repr__(self) -> str:
        return "NodeSet({%s})" % ", ".join(self.labels())


@dataclass(frozen=True)
class Hyperedge:
    """Many-to-one connection: when all tail nodes are active, the head may activate."""

    tail: NodeSet
    head: int

    def sort_key(self) -> tuple[int, int]:
        return (self.head, self.tail.mask)


@dataclass(frozen=True)
class Hypergraph:
    """Directed hypergraph over a node universe; duplicate edges collapse."""

    universe: NodeUniverse
    edges: frozenset[Hyperedge]

    def __post_init__(self):
        object.__setattr__(self, "edges", frozenset(self.edges))

    @classmethod
    def from_edges(cls, universe: NodeUniverse, edges: Iterable[Hyperedge]) -> "Hypergraph":
        return cls(universe, frozenset(edges))

    def edges_sorted(self) -> tuple[Hyperedge, ...]:
        return tuple(sorted(self.edges, key=Hyperedge.sort_key))

    def edges_into(self, head: int) -> tuple[Hyperedge, ...]:
        return tuple(e for e in self.edges_sorted() if e.head == head)


def _canonical_set_order(sets: Iterable[NodeSet]) -> tuple[NodeSet, ...]:
    # Canonical order: by cardinality, then bitmask value.
    return tuple(sorted(sets, key=lambda s: (len(s), s.mask)))


@dataclass(frozen=True)
class MonotoneDNF:
    """Monotone normalized Boolean activation function as an antichain of
    minimal true sets over the nodes other than the owner.

    Evaluates to 1 on an active set exactly when some minimal true set is
    contained in it; the empty antichain is the constant-0 function.
    """

    universe: NodeUniverse
    owner: int
    minimal_true_sets: tuple[NodeSet, ...]
    _masks: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        sets = _canonical_set_order(self.minimal_true_sets)
        object.__setattr__(self, "minimal_true_sets", sets)
        object.__setattr__(self, "_masks", tuple(s.mask for s in sets))

    @classmethod
    def constant_false(cls, universe: NodeUniverse, owner: int) -> "MonotoneDNF":
        return cls(universe, owner, ())

    @property
    def is_constant_false(self) -> bool:
        return not self.minimal_true_sets

    def set_masks(self) -> tuple[int, ...]:
        return self._masks

    def evaluate(self, active: Union["NodeSet", int]) -> bool:
        """True when some minimal true set is contained in the active set.

        The owner's own bit in ``active`` is irrelevant: minimal true sets
        never contain the owner.
        """
        mask = active.mask if isinstance(active, NodeSet) else int(active)
        return any(m & mask == m for m in self._masks)

    def sort_key(self):
        return (self.owner, tuple((len(s), s.mask) for s in self.minimal_true_sets))


def antichain_minimize(
    universe: NodeUniverse, owner: int, sets: Iterable[NodeSet]
) -> MonotoneDNF:
    """Reduce a family of true sets to its inclusion-minimal antichain.

    Evaluation semantics are unchanged: a superset of a listed set is
    absorbed by it.  Result order is canonical (cardinality, then bitmask).
    Raises :class:`ValidationError` if any set contains the owner.
    """
    owner_bit = 1 << owner
    masks = []
    for s in sets:
        if s.universe != universe:
            raise UniverseMismatchError("true set belongs to a different universe")
        if s.mask & owner_bit:
            raise ValidationError(
                f"true set for node {universe.names[owner]!r} contains the owner"
            )
        masks.append(s.mask)
    masks = sorted(set(masks), key=lambda m: (m.bit_count(), m))
    minimal: list[int] = []
    for m in masks:
        if not any(kept & m == kept for kept in minimal):
            minimal.append(m)
    return MonotoneDNF(universe, owner, tuple(NodeSet(universe, m) for m in minimal))


@dataclass(frozen=True)
class ThresholdTable:
    """Sparse monotone normalized set function with values in [0, 1].

    The effective value at S is the max stored value over stored subsets of
    S (default 0): the minimal monotone extension of the stored entries.
    Monotonicity therefore holds by construction; storing the empty set with
    a nonzero value is flagged by validation.
    """

    universe: NodeUniverse
    owner: int
    entries: tuple[tuple[NodeSet, Fraction], ...]

    def __post_init__(self):
        pairs = [(s, Fraction(v)) for s, v in self.entries]
        pairs.sort(key=lambda p: (len(p[0]), p[0].mask))
        object.__setattr__(self, "entries", tuple(pairs))

    @classmethod
    def from_mapping(
        cls,
        universe: NodeUniverse,
        owner: int,
        mapping: Mapping[NodeSet, Union[Fraction, int, str]],
    ) -> "ThresholdTable":
        return cls(universe, owner, tuple(mapping.items()))

    def value(self, active: Union[NodeSet, int]) -> Fraction:
        """Effective value: max stored value over stored subsets (default 0)."""
        mask = active.mask if isinstance(active, NodeSet) else int(active)
        best = ZERO
        for s, v in self.entries:
            if s.mask & mask == s.mask and v > best:
                best = v
        return best

    def effective_entries(self) -> tuple[tuple[NodeSet, Fraction], ...]:
        """Stored sets with their closure values (a stored subset may dominate)."""
        return tuple((s, self.value(s)) for s, _ in self.entries)


@dataclass(frozen=True)
class ThresholdVector:
    """One threshold per node, each in [0, 1]."""

    values: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(Fraction(v) for v in self.values))

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i: int) -> Fraction:
        return self.values[i]

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.values)


@dataclass(frozen=True, repr=False)
class ProgressiveSequence:
    """Activation sequence (S_0, ..., S_{n-1}): nondecreasing, frozen after the
    first repeat, nonempty start.

    Stored trimmed at stabilization; :attr:`full_masks` pads with the fixed
    point back to length n, and equality/hashing agree with full-length
    comparison because trimming is canonical.
    """

    universe: NodeUniverse
    masks: tuple[int, ...]

    def __post_init__(self):
        masks = tuple(self.masks)
        if not masks:
            raise ValueError("activation sequence must not be empty")
        if masks[0] == 0:
            raise ValueError("activation sequence must start from a nonempty seed")
        full = self.universe.full_mask
        trimmed = [masks[0]]
        frozen = False
        for prev, cur in zip(masks, masks[1:]):
            if cur & ~full:
                raise ValueError("activation set outside the universe")
            if prev & cur != prev:
                raise ValueError("activation sets must be nondecreasing")
            if cur == prev:
                frozen = True
            elif frozen:
                raise ValueError("activation sequence grew again after stabilizing")
            else:
                trimmed.append(cur)
        if masks[0] & ~full:
            raise ValueError("activation set outside the universe")
        if len(masks) > self.universe.n:
            raise ValueError(f"activation sequence longer than n = {self.universe.n}")
        object.__setattr__(self, "masks", tuple(trimmed))

    @classmethod
    def from_node_sets(cls, sets: Sequence[NodeSet]) -> "ProgressiveSequence":
        if not sets:
            raise ValueError("activation sequence must not be empty")
        return cls(sets[0].universe, tuple(s.mask for s in sets))

    @property
    def seed_mask(self) -> int:
        return self.masks[0]

    @property
    def final_mask(self) -> int:
        return self.masks[-1]

    @property
    def full_masks(self) -> tuple[int, ...]:
        """Length-n form, padded with the fixed point."""
        pad = self.universe.n - len(self.masks)
        return self.masks + (self.masks[-1],) * pad

    def node_sets(self) -> tuple[NodeSet, ...]:
        return tuple(NodeSet(self.universe, m) for m in self.full_masks)

    def __repr__(self) -> str:
        parts = ["{%s}" % ",".join(self.universe.labels_of(m)) for m in self.masks]
        return "ProgressiveSequence(%s)" % " -> ".join(parts)


def config_sort_key(config):
    """Canonical ordering key for finite-support atom configurations.

    Supports every configuration kind used by the models: node sets,
    monotone DNFs, hypergraphs, hyperedge subsets, threshold vectors, and
    per-node function tuples.
    """
    if isinstance(config, NodeSet):
        return ("set", config.mask)
    if isinstance(config, MonotoneDNF):
        return ("dnf",) + config.sort_key()
    if isinstance(config, Hypergraph):
        return ("hypergraph", tuple(e.sort_key() for e in config.edges_sorted()))
    if isinstance(config, ThresholdVector):
        return ("theta", config.values)
    if isinstance(config, frozenset):
        return ("edges", tuple(sorted(e.sort_key() for e in config)))
    if isinstance(config, tuple):
        return ("functions", tuple(config_sort_key(c) for c in config))
    raise TypeError(f"unsupported configuration type {type(config).__name__}")


@dataclass(frozen=True)
class FiniteSupportDistribution:
    """Explicit finite-support distribution: a list of (probability, configuration)
    atoms in canonical configuration order.

    Valid distributions have strictly positive masses summing to exactly 1
    and pairwise-distinct configurations (checked by ``validate_model``).
    """

    atoms: tuple[tuple[Fraction, object], ...]

    def __post_init__(self):
        atoms = tuple(
            sorted(
                ((Fraction(p), cfg) for p, cfg in self.atoms),
                key=lambda a: config_sort_key(a[1]),
            )
        )
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def point_mass(cls, config) -> "FiniteSupportDistribution":
        return cls(((ONE, config),))

    @property
    def support_size(self) -> int:
        return len(self.atoms)

    def total_mass(self) -> Fraction:
        return sum((p for p, _ in self.atoms), ZERO)

    def configurations(self) -> tuple:
        return tuple(cfg for _, cfg in self.atoms)


def merge_atoms(pairs: Iterable[tuple[Fraction, object]]) -> FiniteSupportDistribution:
    """Build a distribution from (mass, configuration) pairs, merging the
    masses of equal configurations (used by model converters, where distinct
    source atoms may map to one target configuration)."""
    acc: dict = {}
    order: dict = {}
    for p, cfg in pairs:
        key = config_sort_key(cfg)
        if key in acc:
            acc[key] = (acc[key][0] + Fraction(p), acc[key][1])
        else:
            acc[key] = (Fraction(p), cfg)
    return FiniteSupportDistribution(tuple(acc.values()))
