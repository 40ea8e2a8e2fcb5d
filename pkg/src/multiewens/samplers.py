"""Monte Carlo generators whose laws are the k-class Ewens measure.

Three routes to the same distribution: the generalized Hoppe urn (one black
object of mass theta_l per class plus unit-mass colors), the coalescent-style
per-step rates it realises, and the paintbox over class-weighted ranked
frequencies drawn from the multiple Poisson-Dirichlet law.

Seeding contract: every sampler takes a 64-bit integer seed and is bit
deterministic for a fixed platform and library version.  Parallel workers
should derive child seeds with :func:`derive_seed`, which applies the
SplitMix64 mixer to (seed, worker index): child = mix(mix(seed) + 1 + index).
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .measure import _params
from .partitions import LabeledSetPartition, MultiplePartition, YoungDiagram

__all__ = [
    "derive_seed",
    "UrnState",
    "hoppe_urn_sample",
    "hoppe_urn_partition_counts",
    "coalescent_rates",
    "FrequencyRanked",
    "pd_sample",
    "paintbox_sample",
    "paintbox_pmf",
    "monomial_symmetric",
]

_MASK64 = (1 << 64) - 1


def _splitmix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, index: int) -> int:
    """Child seed for worker `index`: SplitMix64(SplitMix64(seed) + 1 + index)."""
    return _splitmix64((_splitmix64(seed & _MASK64) + 1 + index) & _MASK64)


@dataclass(frozen=True)
class UrnState:
    """Snapshot of the generalized Hoppe urn.

    colors[i] = (class label 1..k, count) for the i-th color created; the
    black objects are implicit with masses thetas.  total is the number of
    non-black objects, i.e. the sum of all counts.
    """

    colors: tuple[tuple[int, int], ...]
    thetas: tuple
    total: int

    def __post_init__(self):
        if any(c < 1 for _, c in self.colors):
            raise ValueError("every color present has at least one object")
        if sum(c for _, c in self.colors) != self.total:
            raise ValueError("total must count the non-black objects")

    def partition(self) -> MultiplePartition:
        """Colour counts per class, ranked: the urn's multiple partition."""
        rows: list[list[int]] = [[] for _ in range(len(self.thetas))]
        for cls, c in self.colors:
            rows[cls - 1].append(c)
        return MultiplePartition(
            tuple(YoungDiagram(tuple(sorted(r, reverse=True))) for r in rows)
        )


def _urn_run(n: int, thetas: Sequence[float], rng: random.Random):
    """Run the urn for n draws.

    Returns (classes, counts, founder): class and count per color in
    creation order, and for each draw j the index of the color it joined
    (or founded)."""
    w = float(sum(thetas))
    k = len(thetas)
    classes: list[int] = []  # class of each color, 1-based
    counts: list[int] = []
    founder: list[int] = []
    for j in range(n):
        u = rng.random() * (w + j)
        if u < w:
            # black object: found a new color in the chosen class
            cls = k
            for l in range(k - 1):
                if u < thetas[l]:
                    cls = l + 1
                    break
                u -= thetas[l]
            classes.append(cls)
            counts.append(1)
            founder.append(len(counts) - 1)
        else:
            v = u - w
            idx = 0
            for idx, c in enumerate(counts):
                if v < c:
                    break
                v -= c
            counts[idx] += 1
            founder.append(idx)
    return classes, counts, founder


def _rows_key(classes: list[int], counts: list[int], k: int) -> tuple:
    rows: list[list[int]] = [[] for _ in range(k)]
    for cls, c in zip(classes, counts):
        rows[cls - 1].append(c)
    return tuple(tuple(sorted(r, reverse=True)) for r in rows)


def hoppe_urn_sample(
    n: int, theta, seed: int
) -> tuple[MultiplePartition, LabeledSetPartition]:
    """One draw of the generalized Hoppe urn after n steps.

    At step j an object is chosen with probability proportional to mass:
    the class-l black object (mass theta_l) founds a new color of class l,
    an existing color (mass = its count) gains one object of its color.
    Returns both the color-count multiple partition and the labelled set
    partition of the draw indices 1..n, whose blocks are the colors.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    params = _params(theta)
    thetas = [float(t) for t in params.thetas]
    rng = random.Random(seed)
    classes, counts, founder = _urn_run(n, thetas, rng)
    state = UrnState(tuple(zip(classes, counts)), params.thetas, total=n)
    members: dict[int, set[int]] = {}
    for j, idx in enumerate(founder, start=1):
        members.setdefault(idx, set()).add(j)
    blocks = tuple(
        (classes[idx], frozenset(elems)) for idx, elems in members.items()
    )
    return state.partition(), LabeledSetPartition(blocks, n=n)


def hoppe_urn_partition_counts(
    n: int, theta, reps: int, seed: int
) -> Counter:
    """Empirical counts of urn multiple partitions over `reps` runs.

    Same process as :func:`hoppe_urn_sample` on a single stream, without the
    per-run set-partition bookkeeping; keys are MultiplePartition.
    """
    params = _params(theta)
    thetas = [float(t) for t in params.thetas]
    k = params.k
    rng = random.Random(seed)
    raw: Counter = Counter()
    for _ in range(reps):
        classes, counts, _ = _urn_run(n, thetas, rng)
        raw[_rows_key(classes, counts, k)] += 1
    out: Counter = Counter()
    for key, c in raw.items():
        out[MultiplePartition(tuple(YoungDiagram(r) for r in key))] = c
    return out


def coalescent_rates(j: int, theta):
    """Jump-chain split for the ancestral death process at state j.

    Returns (coalesce_prob, per-class mutation probs): (j-1)/(j-1+w) and
    theta_l/(j-1+w).  Exact when theta is rational.  The probs sum to 1.
    """
    if j < 1:
        raise ValueError("j must be >= 1")
    params = _params(theta)
    w = params.w
    denom = (j - 1) + w
    if params.is_exact:
        coalesce = Fraction(j - 1) / Fraction(denom)
        mutation = tuple(Fraction(t) / Fraction(denom) for t in params.thetas)
    else:
        coalesce = (j - 1) / denom
        mutation = tuple(t / denom for t in params.thetas)
    return coalesce, mutation


@dataclass(frozen=True)
class FrequencyRanked:
    """Ranked per-class frequencies with class weights summing to one.

    freqs[l] is weakly decreasing and sums to deltas[l] up to a truncation
    remainder smaller than eps (the mass cut off when the stick-breaking
    residual drops below eps).
    """

    freqs: tuple[tuple[float, ...], ...]
    deltas: tuple[float, ...]
    eps: float

    def __post_init__(self):
        freqs = tuple(tuple(float(x) for x in seq) for seq in self.freqs)
        deltas = tuple(float(d) for d in self.deltas)
        object.__setattr__(self, "freqs", freqs)
        object.__setattr__(self, "deltas", deltas)
        if len(freqs) != len(deltas):
            raise ValueError("need one frequency sequence per class")
        if not 0 < self.eps < 1:
            raise ValueError("eps must be in (0, 1)")
        if abs(sum(deltas) - 1.0) > 1e-9:
            raise ValueError("class weights must sum to 1")
        for seq, d in zip(freqs, deltas):
            if any(x < 0 for x in seq):
                raise ValueError("frequencies must be nonnegative")
            if any(seq[i] < seq[i + 1] for i in range(len(seq) - 1)):
                raise ValueError("frequencies must be weakly decreasing")
            total = math.fsum(seq)
            if total > d + 1e-9 or d - total > self.eps * max(d, 1e-300) + 1e-12:
                raise ValueError(
                    f"class mass {total} inconsistent with weight {d} at eps={self.eps}"
                )

    @property
    def k(self) -> int:
        return len(self.freqs)

    def remainder(self, l: int) -> float:
        """Truncated mass of class l (0-based index into freqs)."""
        return max(0.0, self.deltas[l] - math.fsum(self.freqs[l]))


def _gem_sticks(rng: np.random.Generator, theta: float, eps: float) -> list[float]:
    """Stick-breaking GEM(theta) weights of the unit stick until the
    residual drops below eps; returned unordered."""
    xs: list[float] = []
    remaining = 1.0
    while remaining >= eps:
        for b in rng.beta(1.0, theta, size=16):
            xs.append(remaining * b)
            remaining *= 1.0 - b
            if remaining < eps:
                break
    return xs


def pd_sample(theta, eps: float, seed: int) -> FrequencyRanked:
    """Draw ranked class frequencies from the multiple Poisson-Dirichlet law.

    Class weights (delta_1..delta_k) come from the Dirichlet(theta) law;
    within class l an independent PD(theta_l) sequence is generated by
    stick breaking, truncated once the residual mass falls below eps,
    sorted descending and scaled by delta_l.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must be in (0, 1)")
    params = _params(theta)
    thetas = [float(t) for t in params.thetas]
    rng = np.random.default_rng(seed)
    if params.k == 1:
        deltas = np.ones(1)  # Dirichlet with one component, exactly
    else:
        deltas = rng.dirichlet(thetas)
    freqs = []
    for th, d in zip(thetas, deltas):
        sticks = _gem_sticks(rng, th, eps)
        sticks.sort(reverse=True)
        freqs.append(tuple(d * x for x in sticks))
    return FrequencyRanked(tuple(freqs), tuple(float(d) for d in deltas), eps)


def paintbox_sample(n: int, f: FrequencyRanked, seed: int) -> MultiplePartition:
    """Paint n i.i.d. samples with the frequencies of f and group by type.

    The truncation remainder of each class is spread over fresh singleton
    types: a draw landing there becomes its own new allele of that class,
    so no probability is lost (bias O(n * eps)).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    probs: list[float] = []
    owner: list[int] = []  # class index per regular type
    for l, seq in enumerate(f.freqs):
        probs.extend(seq)
        owner.extend([l] * len(seq))
    remainders = [f.remainder(l) for l in range(f.k)]
    probs.extend(remainders)
    p = np.asarray(probs, dtype=float)
    p /= p.sum()
    counts = rng.multinomial(n, p)
    regular = counts[: len(owner)]
    fresh = counts[len(owner):]
    rows: list[list[int]] = [[] for _ in range(f.k)]
    for cls, c in zip(owner, regular):
        if c > 0:
            rows[cls].append(int(c))
    for l, c in enumerate(fresh):
        rows[l].extend([1] * int(c))
    comps = tuple(YoungDiagram(tuple(sorted(r, reverse=True))) for r in rows)
    return MultiplePartition(comps)


def _augmented_monomial(parts: tuple[int, ...], power_sums):
    """sum over pairwise-distinct indices i_1..i_r of prod x_{i_t}^{parts[t]}.

    power_sums maps exponent m to p_m = sum_i x_i^m; values may be scalars
    or numpy arrays (vectorised over independent frequency draws).
    """
    if not parts:
        return 1
    head, rest = parts[0], parts[1:]
    total = power_sums[head] * _augmented_monomial(rest, power_sums)
    for t in range(len(rest)):
        merged = rest[:t] + (rest[t] + head,) + rest[t + 1:]
        total = total - _augmented_monomial(merged, power_sums)
    return total


def monomial_symmetric(rows: Sequence[int], power_sums) -> float:
    """Monomial symmetric function m_lambda via power sums.

    rows is the partition (weakly decreasing); power_sums maps m to
    sum_i x_i^m for every m up to sum(rows).  Division by the part
    multiplicities turns the distinct-index sum into m_lambda.
    """
    parts = tuple(rows)
    value = _augmented_monomial(parts, power_sums)
    mult: dict[int, int] = {}
    for r in parts:
        mult[r] = mult.get(r, 0) + 1
    denom = 1
    for m in mult.values():
        denom *= math.factorial(m)
    return value / denom


def power_sums_of(xs: Sequence[float], max_power: int) -> dict[int, float]:
    arr = np.asarray(xs, dtype=float)
    return {m: float(np.sum(arr**m)) for m in range(1, max_power + 1)}


def paintbox_pmf(p: MultiplePartition, f: FrequencyRanked) -> float:
    """Probability that the paintbox over f produces the multiple partition p.

    n! / prod_{l,j} (j!)^{m_j^(l)} times the product over classes of the
    monomial symmetric function of lambda^(l) at the class frequencies.
    Empty components contribute a factor 1.
    """
    if p.k != f.k:
        raise ValueError(f"partition has k={p.k} but frequencies have k={f.k}")
    n = p.n
    value = float(math.factorial(n))
    for comp, seq in zip(p.components, f.freqs):
        for j, m in comp.multiplicities().items():
            value /= float(math.factorial(j)) ** m
        if comp.rows:
            ps = power_sums_of(seq, comp.size)
            value *= monomial_symmetric(comp.rows, ps)
    return value
