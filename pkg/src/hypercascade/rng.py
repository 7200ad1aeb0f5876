"""Deterministic counter-based randomness for reproducible sampling.

Every random draw is a pure function of ``(master_seed, trial, slot)``:
the three 64-bit words are chained through the SplitMix64 finalizer, so the
same inputs yield the same draw on every platform and trials can run in any
order or in parallel.

Stream derivation (the reproducibility contract recorded alongside results):

* slot ``v`` in ``0..n-1`` is node ``v``'s stream for one trial (per-node
  triggering sets, hyperedge subsets, Boolean functions, thresholds);
* slot ``n`` is the whole-model stream used when one configuration is drawn
  jointly (correlated hypergraph/function/threshold distributions).

A draw is the top 53 bits of the mixed word, read as the exact rational
``draw / 2**53``; finite-support sampling applies the inverse CDF over the
canonical atom order to that rational.
"""

from __future__ import annotations

import bisect
from fractions import Fraction
from typing import Sequence

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

#: Uniform draws are integers in [0, 2**53) over this denominator.
UNIT_DENOMINATOR = 1 << 53


def mix64(z: int) -> int:
    """SplitMix64 finalizer (expects a pre-masked 64-bit word)."""
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & MASK64
    return z ^ (z >> 31)


def stream_word(master_seed: int, trial: int, slot: int) -> int:
    """64-bit word for the (master_seed, trial, slot) stream."""
    h = mix64(master_seed & MASK64)
    h = mix64(((h + _GOLDEN) & MASK64) ^ (trial & MASK64))
    h = mix64(((h + _GOLDEN) & MASK64) ^ (slot & MASK64))
    return h


def unit_draw(master_seed: int, trial: int, slot: int) -> int:
    """Integer draw in [0, 2**53), uniform over the stream word's top bits."""
    return stream_word(master_seed, trial, slot) >> 11


def uniform_fraction(master_seed: int, trial: int, slot: int) -> Fraction:
    """Exact rational draw with fixed denominator 2**53."""
    return Fraction(unit_draw(master_seed, trial, slot), UNIT_DENOMINATOR)


def cdf_thresholds(masses: Sequence[Fraction]) -> list[int]:
    """Integer inverse-CDF thresholds: atom i covers draws in
    [ceil(cum_{i-1} * 2**53), ceil(cum_i * 2**53)).

    Exact when cumulative masses are dyadic with denominator dividing 2**53;
    otherwise each atom's sampling mass is within 2**-53 of its true mass.
    """
    thresholds = []
    cum = Fraction(0)
    for p in masses:
        cum += p
        num, den = cum.numerator, cum.denominator
        thresholds.append(-((-num << 53) // den))
    return thresholds


def pick_index(thresholds: Sequence[int], draw: int) -> int:
    """Index of the atom whose threshold interval contains ``draw``."""
    return bisect.bisect_right(thresholds, draw)
