"""Finite value spaces, exact distributions, multisets and fuzzy predicates.

Probabilities are :class:`fractions.Fraction` throughout.  The only floating
point quantity in this module is the Kullback-Leibler divergence.
"""

from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction
from itertools import product
from numbers import Rational
from typing import Any, Hashable, Iterable, Iterator, Mapping, Sequence

from .errors import DomainError, EmptyMultiset, InfiniteDivergence, ZeroValidity

Value = Hashable

ZERO = Fraction(0)
ONE = Fraction(1)


def as_rational(value: Any) -> Fraction:
    """Coerce ints, Fractions and ``"a/b"`` strings; floats are refused."""
    if isinstance(value, bool):
        raise TypeError("booleans are not probabilities")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}: {value!r}")


def format_rational(r: Fraction) -> str:
    return str(r)


class Space:
    """An explicitly ordered finite set of values."""

    __slots__ = ("elements", "_index", "_hash")

    def __init__(self, elements: Iterable[Value]):
        self.elements = tuple(elements)
        self._index = {x: i for i, x in enumerate(self.elements)}
        if len(self._index) != len(self.elements):
            raise DomainError(f"duplicate values in space {self.elements!r}")
        self._hash = hash(self.elements)

    @classmethod
    def of(cls, *labels: Value) -> "Space":
        return cls(labels)

    def index(self, x: Value) -> int:
        try:
            return self._index[x]
        except (KeyError, TypeError):
            raise DomainError(f"{x!r} is not in {self!r}") from None

    def __contains__(self, x: object) -> bool:
        try:
            return x in self._index
        except TypeError:
            return False

    def __iter__(self) -> Iterator[Value]:
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Space) and self.elements == other.elements

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        if len(self.elements) > 8:
            head = ", ".join(render_value(x) for x in self.elements[:6])
            return f"Space({head}, ... {len(self.elements)} values)"
        return f"Space({', '.join(render_value(x) for x in self.elements)})"


def product_space(a: Space, b: Space) -> Space:
    return Space(product(a.elements, b.elements))


def tuple_space(base: Space, k: int) -> Space:
    """``base`` to the power ``k`` as k-tuples, lexicographic in the base order."""
    return Space(product(base.elements, repeat=k))


def render_value(x: Value) -> str:
    if isinstance(x, tuple):
        return "(" + ",".join(render_value(v) for v in x) + ")"
    return str(x)


def _check_same_space(a: Space, b: Space, what: str) -> None:
    if a != b:
        raise DomainError(f"{what}: space mismatch {a!r} vs {b!r}")


class _Weighted:
    """Dense value table over a space; shared by distributions and predicates."""

    __slots__ = ("space", "_values")

    def __init__(self, space: Space, values: Mapping[Value, Any] | Sequence[Any]):
        if not isinstance(space, Space):
            space = Space(space)
        self.space = space
        if isinstance(values, Mapping):
            table = [ZERO] * len(space)
            for x, w in values.items():
                table[space.index(x)] = as_rational(w)
        else:
            if len(values) != len(space):
                raise DomainError(f"expected {len(space)} entries, got {len(values)}")
            table = [as_rational(w) for w in values]
        self._values = tuple(table)

    def __getitem__(self, x: Value) -> Fraction:
        return self._values[self.space.index(x)]

    def items(self) -> Iterator[tuple[Value, Fraction]]:
        return zip(self.space.elements, self._values)

    def values(self) -> tuple[Fraction, ...]:
        return self._values

    def __eq__(self, other: object) -> bool:
        return (
            type(other) is type(self)
            and self.space == other.space
            and self._values == other._values
        )

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.space, self._values))

    def as_dict(self) -> dict[Value, Fraction]:
        return dict(self.items())


class Distribution(_Weighted):
    """Finite probability distribution with exact rational weights summing to 1."""

    __slots__ = ("_thresholds",)

    def __init__(self, space, weights):
        super().__init__(space, weights)
        if any(w < 0 for w in self._values):
            raise DomainError("negative probability")
        total = sum(self._values, ZERO)
        if total != 1:
            raise DomainError(f"weights sum to {total}, expected 1")
        self._thresholds = None

    @classmethod
    def uniform(cls, space: Space | Iterable[Value]) -> "Distribution":
        space = space if isinstance(space, Space) else Space(space)
        if not len(space):
            raise DomainError("uniform distribution on an empty space")
        return cls(space, [Fraction(1, len(space))] * len(space))

    @classmethod
    def point(cls, space: Space | Iterable[Value], x: Value) -> "Distribution":
        space = space if isinstance(space, Space) else Space(space)
        return cls(space, {x: ONE})

    @classmethod
    def normalised(cls, space, weights) -> "Distribution":
        """Scale non-negative weights so they sum to one."""
        raw = _Weighted(space, weights)
        total = sum(raw.values(), ZERO)
        if total <= 0:
            raise ZeroValidity("cannot normalise weights with zero total")
        return cls(raw.space, [w / total for w in raw.values()])

    def support(self) -> tuple[Value, ...]:
        return tuple(x for x, w in self.items() if w > 0)

    def thresholds53(self) -> tuple[int, ...]:
        """Cumulative weights scaled to 2**53, rounded up.

        A uniform integer ``u`` in ``[0, 2**53)`` selects the first index whose
        threshold exceeds ``u``; this is exact inverse-CDF sampling up to the
        53-bit resolution of ``u``.
        """
        if self._thresholds is None:
            acc = ZERO
            out = []
            for w in self._values:
                acc += w
                out.append(-((-acc.numerator << 53) // acc.denominator))
            self._thresholds = tuple(out)
        return self._thresholds

    def __repr__(self) -> str:
        body = " + ".join(f"{w}|{render_value(x)}>" for x, w in self.items() if w)
        return f"Distribution({body})"


class Predicate(_Weighted):
    """Fuzzy predicate: a map from the space into ``[0, 1]``."""

    __slots__ = ()

    def __init__(self, space, values):
        super().__init__(space, values)
        if any(v < 0 or v > 1 for v in self._values):
            raise DomainError("predicate values must lie in [0, 1]")

    @classmethod
    def truth(cls, space: Space) -> "Predicate":
        return cls(space, [ONE] * len(space))

    @classmethod
    def falsity(cls, space: Space) -> "Predicate":
        return cls(space, [ZERO] * len(space))

    @classmethod
    def point(cls, space: Space, x: Value) -> "Predicate":
        return point_predicate(x, space)

    @classmethod
    def from_distribution(cls, tau: Distribution) -> "Predicate":
        """Read a distribution as the predicate ``sum_y tau(y) * 1_y``."""
        return cls(tau.space, tau.values())

    def __and__(self, other: "Predicate") -> "Predicate":
        return conjoin(self, other)

    def __pow__(self, n: int) -> "Predicate":
        return predicate_pow(self, n)

    def __repr__(self) -> str:
        body = ", ".join(f"{render_value(x)}: {v}" for x, v in self.items())
        return f"Predicate({body})"


class Multiset:
    """Finite multiset over a declared space, stored as a count vector."""

    __slots__ = ("space", "counts", "_hash")

    def __init__(self, space: Space, counts: Mapping[Value, int] | Sequence[int]):
        if not isinstance(space, Space):
            space = Space(space)
        self.space = space
        if isinstance(counts, Mapping):
            table = [0] * len(space)
            for x, n in counts.items():
                table[space.index(x)] = n
        else:
            if len(counts) != len(space):
                raise DomainError(f"expected {len(space)} counts, got {len(counts)}")
            table = list(counts)
        for n in table:
            if isinstance(n, bool) or not isinstance(n, int) or n < 0:
                raise DomainError(f"multiplicities must be natural numbers, got {n!r}")
        self.counts = tuple(table)
        self._hash = hash((space, self.counts))

    def __getitem__(self, x: Value) -> int:
        return self.counts[self.space.index(x)]

    def items(self) -> Iterator[tuple[Value, int]]:
        return zip(self.space.elements, self.counts)

    @property
    def size(self) -> int:
        return sum(self.counts)

    def __len__(self) -> int:
        return self.size

    def support(self) -> tuple[Value, ...]:
        return tuple(x for x, n in self.items() if n)

    def elements(self) -> Iterator[Value]:
        """Each value repeated by its multiplicity, in space order."""
        for x, n in self.items():
            for _ in range(n):
                yield x

    def __add__(self, other: "Multiset") -> "Multiset":
        _check_same_space(self.space, other.space, "multiset sum")
        return Multiset(self.space, [a + b for a, b in zip(self.counts, other.counts)])

    def scaled(self, factor: int) -> "Multiset":
        return Multiset(self.space, [n * factor for n in self.counts])

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Multiset)
            and self.space == other.space
            and self.counts == other.counts
        )

    def __hash__(self) -> int:
        return self._hash

    def __str__(self) -> str:
        parts = [f"{n}{render_value(x)}" for x, n in self.items() if n]
        return "+".join(parts) if parts else "0"

    def __repr__(self) -> str:
        return f"Multiset({self})"


# -- predicates ---------------------------------------------------------------


def point_predicate(x: Value, space: Space) -> Predicate:
    if x not in space:
        raise DomainError(f"{x!r} is not in {space!r}")
    return Predicate(space, {x: ONE})


def conjoin(p1: Predicate, p2: Predicate) -> Predicate:
    _check_same_space(p1.space, p2.space, "conjunction")
    return Predicate(p1.space, [a * b for a, b in zip(p1.values(), p2.values())])


def predicate_pow(p: Predicate, n: int) -> Predicate:
    if n < 0:
        raise DomainError("predicate power must be a natural number")
    return Predicate(p.space, [v**n for v in p.values()])


# -- validity and conditioning ------------------------------------------------


def validity(omega: Distribution, p: Predicate) -> Fraction:
    _check_same_space(omega.space, p.space, "validity")
    return sum((w * v for w, v in zip(omega.values(), p.values())), ZERO)


def update(omega: Distribution, p: Predicate) -> Distribution:
    """Condition ``omega`` on the fuzzy predicate ``p``."""
    v = validity(omega, p)
    if v == 0:
        raise ZeroValidity("conditioning on a predicate with zero validity")
    return Distribution(omega.space, [w * q / v for w, q in zip(omega.values(), p.values())])


# -- multisets ----------------------------------------------------------------


def acc(xs: Iterable[Value], space: Space | None = None) -> Multiset:
    """Count occurrences.  Without a space, values are ordered by first appearance."""
    xs = list(xs)
    counts = Counter(xs)
    if space is None:
        space = Space(dict.fromkeys(xs))
    return Multiset(space, counts)


def flrn(phi: Multiset) -> Distribution:
    """Frequentist learning: normalise counts into a distribution."""
    k = phi.size
    if k == 0:
        raise EmptyMultiset("cannot normalise the empty multiset")
    return Distribution(phi.space, [Fraction(n, k) for n in phi.counts])


def uniform_draw(xs: Sequence[Value], space: Space | None = None) -> Distribution:
    """Uniform choice among list positions (duplicates add up)."""
    return flrn(acc(xs, space))


def coef(phi: Multiset) -> int:
    """Multinomial coefficient ``||phi||! / prod_x phi(x)!``."""
    out = math.factorial(phi.size)
    for n in phi.counts:
        out //= math.factorial(n)
    return out


# -- products -----------------------------------------------------------------


def tensor(omega: Distribution, rho: Distribution) -> Distribution:
    space = product_space(omega.space, rho.space)
    return Distribution(space, [a * b for a in omega.values() for b in rho.values()])


def power(omega: Distribution, k: int) -> Distribution:
    """``omega`` tensored with itself ``k`` times, over flat k-tuples."""
    if k < 1:
        raise DomainError("tensor power needs k >= 1")
    space = tuple_space(omega.space, k)
    weights = []
    for combo in product(omega.values(), repeat=k):
        w = ONE
        for c in combo:
            w *= c
        weights.append(w)
    return Distribution(space, weights)


# -- divergence ---------------------------------------------------------------


def _ln(r: Fraction) -> float:
    # log of numerator and denominator separately survives huge big-int fractions
    return math.log(r.numerator) - math.log(r.denominator)


def kl_divergence(omega: Distribution, rho: Distribution) -> float:
    """Kullback-Leibler divergence ``D(omega, rho)`` in nats.

    Uses ``0 * ln(0/r) = 0``; positive mass where ``rho`` vanishes raises
    :class:`InfiniteDivergence`.
    """
    _check_same_space(omega.space, rho.space, "KL divergence")
    total = 0.0
    for x, w, r in zip(omega.space.elements, omega.values(), rho.values()):
        if w == 0:
            continue
        if r == 0:
            raise InfiniteDivergence(f"{render_value(x)} has mass {w} but reference mass 0")
        total += float(w) * _ln(w / r)
    return total
