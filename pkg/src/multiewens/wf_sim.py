"""Forward Wright-Fisher simulation with k mutation classes.

A population of 2N genes resamples parents uniformly each generation; a child
inherits its parent's allele with probability 1 - sum(mu_l) or mutates to a
brand-new allele of class l with probability mu_l (infinite-alleles: ids are
never reused).  With mu_l = theta_l/(4N), sampled compositions approach the
k-class Ewens law.  The ancestral line-counting process is exposed through
its exact finite-N transition probabilities and its limiting generator.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .measure import _params
from .partitions import MultiplePartition, YoungDiagram

__all__ = [
    "Population",
    "wf_step",
    "sample_composition",
    "stationary_partition_counts",
    "transition_prob",
    "AncestralGenerator",
    "ancestral_generator",
]


@dataclass
class Population:
    """2N genes, each an (allele id, class label) pair; ids are per-class serials."""

    ids: np.ndarray
    classes: np.ndarray
    k: int
    generation: int = 0
    next_ids: np.ndarray = field(default=None)  # fresh serial per class

    def __post_init__(self):
        if self.ids.shape != self.classes.shape or self.ids.ndim != 1:
            raise ValueError("ids and classes must be equal-length vectors")
        if self.next_ids is None:
            self.next_ids = np.zeros(self.k, dtype=np.int64)
            for l in range(self.k):
                mask = self.classes == l
                if mask.any():
                    self.next_ids[l] = self.ids[mask].max() + 1

    @property
    def size(self) -> int:
        """Number of genes, i.e. 2N."""
        return self.ids.size

    @classmethod
    def founding(cls, two_n: int, k: int) -> "Population":
        """Monomorphic start: everyone carries allele 0 of class 1."""
        if two_n < 1 or two_n % 2:
            raise ValueError("population size 2N must be a positive even integer")
        return cls(
            ids=np.zeros(two_n, dtype=np.int64),
            classes=np.zeros(two_n, dtype=np.int64),
            k=k,
        )

    def to_json_dict(self) -> dict:
        return {
            "generation": int(self.generation),
            "k": self.k,
            "ids": self.ids.tolist(),
            "classes": (self.classes + 1).tolist(),  # 1-based labels outside
            "next_ids": self.next_ids.tolist(),
        }


def wf_step(pop: Population, mus: Sequence[float], rng: np.random.Generator) -> Population:
    """Advance one generation in place: uniform parents, then mutation.

    mus are the per-class mutation probabilities; their sum must be < 1.
    Fresh alleles get never-before-seen (class, serial) identifiers.
    """
    mus = np.asarray([float(m) for m in mus], dtype=float)
    if mus.size != pop.k:
        raise ValueError(f"need k={pop.k} mutation probabilities")
    if (mus < 0).any() or mus.sum() >= 1.0:
        raise ValueError("mutation probabilities must be nonnegative with sum < 1")
    two_n = pop.size
    parents = rng.integers(0, two_n, size=two_n)
    pop.ids = pop.ids[parents]
    pop.classes = pop.classes[parents]
    u = rng.random(two_n)
    edges = np.concatenate(([0.0], np.cumsum(mus)))
    for l in range(pop.k):
        mask = (u >= edges[l]) & (u < edges[l + 1])
        count = int(mask.sum())
        if count:
            pop.ids[mask] = pop.next_ids[l] + np.arange(count)
            pop.classes[mask] = l
            pop.next_ids[l] += count
    pop.generation += 1
    return pop


def sample_composition(pop: Population, n: int, seed_or_rng) -> MultiplePartition:
    """Allelic composition of a uniform sample of n genes without replacement."""
    if n > pop.size:
        raise ValueError(f"sample size {n} exceeds population size {pop.size}")
    rng = (
        seed_or_rng
        if isinstance(seed_or_rng, np.random.Generator)
        else np.random.default_rng(seed_or_rng)
    )
    picks = rng.choice(pop.size, size=n, replace=False)
    return _composition_of(pop.ids[picks], pop.classes[picks], pop.k)


def _composition_of(ids: np.ndarray, classes: np.ndarray, k: int) -> MultiplePartition:
    counts = Counter(zip(classes.tolist(), ids.tolist()))
    rows: list[list[int]] = [[] for _ in range(k)]
    for (cls, _), c in counts.items():
        rows[cls].append(c)
    return MultiplePartition(
        tuple(YoungDiagram(tuple(sorted(r, reverse=True))) for r in rows)
    )


def stationary_partition_counts(
    two_n: int,
    theta,
    sample_size: int,
    reps: int,
    seed: int,
    burn_gens: int | None = None,
    thin_gens: int | None = None,
) -> Counter:
    """Empirical composition law near stationarity.

    Runs a single population with mu_l = theta_l/(4N) (2N = two_n), burns in
    for 20N generations, then records `reps` sample compositions thinned by
    N generations.  The burn-in and thinning defaults follow the O(N)
    time-to-ancestry heuristic.
    """
    params = _params(theta)
    half_n = two_n // 2
    if burn_gens is None:
        burn_gens = 20 * half_n
    if thin_gens is None:
        thin_gens = half_n
    mus = [float(t) / (2 * two_n) for t in params.thetas]
    rng = np.random.default_rng(seed)
    pop = Population.founding(two_n, params.k)
    for _ in range(burn_gens):
        wf_step(pop, mus, rng)
    counts: Counter = Counter()
    for _ in range(reps):
        for _ in range(thin_gens):
            wf_step(pop, mus, rng)
        counts[sample_composition(pop, sample_size, rng)] += 1
    return counts


@lru_cache(maxsize=None)
def _stirling_second(p: int, m: int) -> int:
    """Partitions of a p-set into m nonempty blocks."""
    if p == 0:
        return 1 if m == 0 else 0
    if m == 0 or m > p:
        return 0
    return m * _stirling_second(p - 1, m) + _stirling_second(p - 1, m - 1)


def transition_prob(p: int, m: int, two_n: int, mus: Sequence) -> Fraction:
    """Exact probability that p sampled genes have m distinct parental
    lineages one generation back, counting only non-mutant children.

    Mixes the no-mutation ancestry count over the binomial number of
    mutants: sum_j C(p,j) (1-M)^{p-j} M^j P0(p-j, m) with M = sum(mus) and
    P0(q, m) = S(q, m) (2N)(2N-1)...(2N-m+1) / (2N)^q, P0(q, 0) = [q == 0].
    Rational mus give an exact Fraction.
    """
    if not 0 <= m <= p <= two_n:
        raise ValueError("need 0 <= m <= p <= 2N")
    mus = [Fraction(v) if not isinstance(v, Fraction) else v for v in mus]
    total_mu = sum(mus)
    if total_mu >= 1:
        raise ValueError("mutation probabilities must sum to < 1")

    def p0(q: int, mm: int) -> Fraction:
        if mm == 0:
            return Fraction(1 if q == 0 else 0)
        falling = 1
        for i in range(mm):
            falling *= two_n - i
        return Fraction(_stirling_second(q, mm) * falling, two_n**q)

    total = Fraction(0)
    for j in range(p - m + 1):
        total += (
            math.comb(p, j)
            * (1 - total_mu) ** (p - j)
            * total_mu**j
            * p0(p - j, m)
        )
    return total


@dataclass(frozen=True)
class AncestralGenerator:
    """Generator of the limiting pure-death ancestral process on {0..n}."""

    q: np.ndarray
    n: int
    thetas: tuple

    def rate(self, j: int) -> float:
        """Total departure rate from state j: (j(j-1) + w j)/4."""
        return -self.q[j, j]


def ancestral_generator(n: int, theta) -> AncestralGenerator:
    """Tridiagonal generator with q_{j,j-1} = (j(j-1) + w j)/4.

    State 0 is absorbing; rows sum to zero.  The jump from j splits into a
    coalescence with probability (j-1)/(j-1+w) and a class-l mutation with
    probability theta_l/(j-1+w), matching :func:`samplers.coalescent_rates`.
    """
    params = _params(theta)
    w = float(params.w)
    q = np.zeros((n + 1, n + 1))
    for j in range(1, n + 1):
        rate = (j * (j - 1) + w * j) / 4.0
        q[j, j] = -rate
        q[j, j - 1] = rate
    return AncestralGenerator(q, n, tuple(params.thetas))
