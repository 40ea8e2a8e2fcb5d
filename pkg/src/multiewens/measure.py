"""The Ewens measure on multiple partitions and its exact structure.

With k allele classes carrying mutation masses theta_1..theta_k (sum w), the
sampling law of the allele-count matrix a_j^(l) of an n-sample is

    n! / (w)_n * prod_{l,j} (theta_l/j)^{a_j^(l)} / a_j^(l)!

Two numeric backends coexist: exact rationals whenever every theta is an int
or Fraction (the oracle path), and log-space floats otherwise, which stays
finite far beyond the n where (w)_n would overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .partitions import (
    LabeledSetPartition,
    MultiplePartition,
    YoungDiagram,
    enumerate_multipartitions,
    compositions_of,
    partitions_of,
    union,
)

__all__ = [
    "MutationParams",
    "pochhammer",
    "log_pochhammer",
    "refined_esf_pmf",
    "refined_esf_log_pmf",
    "refined_esf_pmf_factorized",
    "classical_ewens_pmf",
    "classical_ewens_log_pmf",
    "downward_transition",
    "check_consistency",
    "union_marginal_check",
    "vandermonde_check",
    "labeled_set_partition_pmf",
    "CheckReport",
]

Numeric = Union[int, Fraction, float]


@dataclass(frozen=True)
class MutationParams:
    """Per-class mutation masses theta_l > 0; w is their sum.

    Pass ints or Fractions to unlock the exact rational backend; floats
    route every evaluation through log space.
    """

    thetas: tuple[Numeric, ...]

    def __post_init__(self):
        thetas = tuple(self.thetas)
        object.__setattr__(self, "thetas", thetas)
        if len(thetas) < 1:
            raise ValueError("need at least one mutation class")
        if any(t <= 0 for t in thetas):
            raise ValueError(f"all mutation masses must be positive, got {thetas}")

    @property
    def k(self) -> int:
        return len(self.thetas)

    @property
    def w(self) -> Numeric:
        return sum(self.thetas)

    @property
    def is_exact(self) -> bool:
        return all(isinstance(t, (int, Fraction)) for t in self.thetas)


def _params(theta) -> MutationParams:
    if isinstance(theta, MutationParams):
        return theta
    return MutationParams(tuple(theta))


def pochhammer(x: Numeric, n: int):
    """Rising factorial x(x+1)...(x+n-1); equals 1 when n = 0.

    The result keeps the numeric kind of x (int, Fraction, or float),
    including the empty product.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    result = x**0
    for i in range(n):
        result = result * (x + i)
    return result


def log_pochhammer(x: float, n: int) -> float:
    """log of the rising factorial, for x > 0."""
    if n == 0:
        return 0.0
    return math.lgamma(x + n) - math.lgamma(x)


def _check_k(p: MultiplePartition, params: MutationParams):
    if p.k != params.k:
        raise ValueError(
            f"partition has k={p.k} components but theta has k={params.k}"
        )


def refined_esf_pmf(p: MultiplePartition, theta) -> Numeric:
    """Probability of the multiple partition p under the k-class Ewens law.

    Exact Fraction for rational theta, float (from log space) otherwise.
    """
    params = _params(theta)
    _check_k(p, params)
    if not params.is_exact:
        return math.exp(refined_esf_log_pmf(p, params))
    n = p.n
    value = Fraction(math.factorial(n), 1) / pochhammer(Fraction(params.w), n)
    for l, comp in enumerate(p.components):
        th = Fraction(params.thetas[l])
        for j, a in comp.multiplicities().items():
            value *= (th / j) ** a / math.factorial(a)
    return value


def refined_esf_log_pmf(p: MultiplePartition, theta) -> float:
    params = _params(theta)
    _check_k(p, params)
    n = p.n
    total = math.lgamma(n + 1) - log_pochhammer(float(params.w), n)
    for l, comp in enumerate(p.components):
        log_th = math.log(float(params.thetas[l]))
        for j, a in comp.multiplicities().items():
            total += a * (log_th - math.log(j)) - math.lgamma(a + 1)
    return total


def classical_ewens_pmf(diagram: YoungDiagram, theta: Numeric) -> Numeric:
    """Single-class Ewens probability of a Young diagram with n boxes."""
    if theta <= 0:
        raise ValueError("theta must be positive")
    if isinstance(theta, float):
        return math.exp(classical_ewens_log_pmf(diagram, theta))
    n = diagram.size
    th = Fraction(theta)
    value = Fraction(math.factorial(n), 1) * th ** diagram.n_rows / pochhammer(th, n)
    for j, m in diagram.multiplicities().items():
        value /= Fraction(j) ** m * math.factorial(m)
    return value


def classical_ewens_log_pmf(diagram: YoungDiagram, theta: float) -> float:
    n = diagram.size
    total = (
        math.lgamma(n + 1)
        + diagram.n_rows * math.log(theta)
        - log_pochhammer(float(theta), n)
    )
    for j, m in diagram.multiplicities().items():
        total -= m * math.log(j) + math.lgamma(m + 1)
    return total


def refined_esf_pmf_factorized(p: MultiplePartition, theta) -> Numeric:
    """Same law, evaluated through the conditional factorization.

    Component sizes follow a Dirichlet-multinomial-type weight
    (theta_1)_{n_1}...(theta_k)_{n_k}/(w)_n * n!/(n_1!...n_k!), and each
    component is an independent single-class Ewens diagram given its size.
    Kept separate from :func:`refined_esf_pmf` as a cross-checking route.
    """
    params = _params(theta)
    _check_k(p, params)
    n = p.n
    sizes = [c.size for c in p.components]
    if not params.is_exact:
        total = math.lgamma(n + 1) - log_pochhammer(float(params.w), n)
        for th, comp, m in zip(params.thetas, p.components, sizes):
            total += log_pochhammer(float(th), m) - math.lgamma(m + 1)
            total += classical_ewens_log_pmf(comp, float(th))
        return math.exp(total)
    value = Fraction(math.factorial(n), 1) / pochhammer(Fraction(params.w), n)
    for th, comp, m in zip(params.thetas, p.components, sizes):
        value *= pochhammer(Fraction(th), m) / math.factorial(m)
        value *= classical_ewens_pmf(comp, Fraction(th))
    return value


def downward_transition(p: MultiplePartition) -> dict[MultiplePartition, Fraction]:
    """Law of the sub-sample of size n-1 drawn from a sample shaped like p.

    Removing one box from a row of length L in component l has probability
    m_L(lambda^(l)) * L / n.  The kernel does not depend on theta.
    """
    n = p.n
    if n == 0:
        raise ValueError("cannot sub-sample an empty multiple partition")
    children: dict[MultiplePartition, Fraction] = {}
    for l, comp in enumerate(p.components):
        for length, mult in comp.multiplicities().items():
            shrunk = comp.remove_box_from_row(length)
            comps = list(p.components)
            comps[l] = shrunk
            child = MultiplePartition(tuple(comps))
            prob = Fraction(mult * length, n)
            children[child] = children.get(child, Fraction(0)) + prob
    return children


@dataclass(frozen=True)
class CheckReport:
    """Outcome of an exact verification sweep."""

    name: str
    ok: bool
    failures: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def check_consistency(n: int, k: int, theta) -> CheckReport:
    """Exact check that sub-sampling maps the size-n law onto the size-(n-1) law.

    Verifies M_{n-1}(mu) == sum_p T(p -> mu) M_n(p) for every mu, in
    rational arithmetic.  Requires rational theta; desk scale n.
    """
    params = _params(theta)
    if not params.is_exact:
        raise ValueError("consistency check needs rational theta")
    if n < 1:
        return CheckReport("consistency", True)
    pushed: dict[MultiplePartition, Fraction] = {}
    for p in enumerate_multipartitions(n, k):
        mass = refined_esf_pmf(p, params)
        for child, prob in downward_transition(p).items():
            pushed[child] = pushed.get(child, Fraction(0)) + prob * mass
    failures = []
    for mu in enumerate_multipartitions(n - 1, k):
        expected = refined_esf_pmf(mu, params)
        got = pushed.get(mu, Fraction(0))
        if got != expected:
            failures.append(f"mu={multilists(mu)}: pushed {got} != pmf {expected}")
    return CheckReport("consistency", not failures, tuple(failures))


def union_marginal_check(n: int, k: int, theta) -> CheckReport:
    """Exact check that forgetting class labels gives classical Ewens at w."""
    params = _params(theta)
    if not params.is_exact:
        raise ValueError("union marginal check needs rational theta")
    grouped: dict[YoungDiagram, Fraction] = {}
    for p in enumerate_multipartitions(n, k):
        lam = union(p)
        grouped[lam] = grouped.get(lam, Fraction(0)) + refined_esf_pmf(p, params)
    w = Fraction(params.w)
    failures = []
    for rows in partitions_of(n):
        lam = YoungDiagram(rows)
        expected = classical_ewens_pmf(lam, w)
        got = grouped.get(lam, Fraction(0))
        if got != expected:
            failures.append(f"lambda={rows}: grouped {got} != Ewens {expected}")
    return CheckReport("union-marginal", not failures, tuple(failures))


def vandermonde_check(n: int, k: int, theta) -> bool:
    """n! * sum over n_1+..+n_k=n of prod (theta_l)_{n_l}/n_l! == (w)_n, exactly."""
    params = _params(theta)
    if not params.is_exact:
        raise ValueError("identity check needs rational theta")
    thetas = [Fraction(t) for t in params.thetas]
    total = Fraction(0)
    for sizes in compositions_of(n, k):
        term = Fraction(1)
        for th, m in zip(thetas, sizes):
            term *= pochhammer(th, m) / math.factorial(m)
        total += term
    return math.factorial(n) * total == pochhammer(Fraction(params.w), n)


def labeled_set_partition_pmf(s: LabeledSetPartition, theta) -> Numeric:
    """Probability of a labelled set partition of the gene labels {1..n}.

    prod over blocks of theta_{label} * (|B|-1)!, divided by (w)_n.  Depends
    on the blocks only through sizes and labels (exchangeable).
    """
    params = _params(theta)
    if any(label > params.k for label, _ in s.blocks):
        raise ValueError(f"block label out of range 1..{params.k}")
    if not params.is_exact:
        total = -log_pochhammer(float(params.w), s.n)
        for label, elems in s.blocks:
            total += math.log(float(params.thetas[label - 1]))
            total += math.lgamma(len(elems))
        return math.exp(total)
    value = Fraction(1) / pochhammer(Fraction(params.w), s.n)
    for label, elems in s.blocks:
        value *= Fraction(params.thetas[label - 1]) * math.factorial(len(elems) - 1)
    return value


def multilists(p: MultiplePartition) -> str:
    """Compact string form of a multiple partition for report messages."""
    return str([list(c.rows) for c in p.components])
