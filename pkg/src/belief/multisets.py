"""Multinomials, arrangements and the multiset functor lifted to channels.

Everything here enumerates ``M[K](X)`` (multisets of size K) or ``X^K``
explicitly, so sizes are guarded by :func:`enumeration_caps`.
"""

from __future__ import annotations

import math
import os
from fractions import Fraction
from functools import lru_cache

from .channels import Channel, dagger, jeffrey_update, push
from .core import (
    ONE,
    ZERO,
    Distribution,
    Multiset,
    Predicate,
    Space,
    Value,
    coef,
    flrn,
    point_predicate,
    tuple_space,
    update,
)
from .errors import DomainError, EmptyMultiset, ResourceLimit, ZeroValidity

DEFAULT_MULTISET_CAP = 10_000
DEFAULT_TUPLE_CAP = 100_000


def enumeration_caps() -> tuple[int, int]:
    """``(multiset cap, tuple cap)``; ``BELIEF_ENUM_CAP`` overrides both."""
    raw = os.environ.get("BELIEF_ENUM_CAP")
    if raw:
        cap = int(raw)
        return cap, cap
    return DEFAULT_MULTISET_CAP, DEFAULT_TUPLE_CAP


def count_multisets(n: int, k: int) -> int:
    return math.comb(k + n - 1, n - 1) if n else int(k == 0)


def _check_k(k: int) -> None:
    if isinstance(k, bool) or not isinstance(k, int) or k < 1:
        raise DomainError(f"multiset size must be a positive integer, got {k!r}")


def _guard_multisets(base: Space, k: int) -> None:
    cap, _ = enumeration_caps()
    size = count_multisets(len(base), k)
    if size > cap:
        raise ResourceLimit(f"M[{k}] over {len(base)} values", size, cap)


def _guard_tuples(base: Space, k: int) -> None:
    _, cap = enumeration_caps()
    size = len(base) ** k
    if size > cap:
        raise ResourceLimit(f"{len(base)}-value tuples of length {k}", size, cap)


def _count_vectors(n: int, k: int):
    # lexicographically descending: k copies of the first value come first
    if n == 1:
        yield (k,)
        return
    for first in range(k, -1, -1):
        for rest in _count_vectors(n - 1, k - first):
            yield (first, *rest)


class MultisetSpace(Space):
    """All multisets of size ``k`` over ``base`` in canonical order.

    The order is lexicographic on count vectors, largest count of the first
    base value first (so ``2h, 1h1t, 2t`` for a coin).
    """

    __slots__ = ("base", "k")

    def __init__(self, base: Space, k: int):
        _check_k(k)
        _guard_multisets(base, k)
        self.base = base
        self.k = k
        super().__init__(Multiset(base, v) for v in _count_vectors(len(base), k))


def multisets(base: Space, k: int) -> MultisetSpace:
    _check_k(k)
    _guard_multisets(base, k)
    return _multisets(base, k)


def tuples(base: Space, k: int) -> Space:
    _check_k(k)
    _guard_tuples(base, k)
    return _tuples(base, k)


@lru_cache(maxsize=256)
def _multisets(base: Space, k: int) -> MultisetSpace:
    return MultisetSpace(base, k)


@lru_cache(maxsize=256)
def _tuples(base: Space, k: int) -> Space:
    return tuple_space(base, k)


def multinomial_probability(omega: Distribution, phi: Multiset) -> Fraction:
    """``mn[K](omega)(phi)`` for a single multiset, without enumerating."""
    if phi.space != omega.space:
        raise DomainError("multiset and distribution live on different spaces")
    p = Fraction(coef(phi))
    for w, n in zip(omega.values(), phi.counts):
        if n:
            p *= w**n
            if not p:
                break
    return p


def multinomial(k: int, omega: Distribution) -> Distribution:
    """Distribution of the multiset of ``k`` independent draws from ``omega``."""
    _check_k(k)
    space = multisets(omega.space, k)
    return Distribution(space, [multinomial_probability(omega, phi) for phi in space])


def arrangements(phi: Multiset) -> list[tuple[Value, ...]]:
    """Distinct sequences accumulating to ``phi``, in lexicographic order."""
    labels = phi.space.elements
    counts = list(phi.counts)
    out: list[tuple[Value, ...]] = []
    prefix: list[Value] = []

    def extend(remaining: int) -> None:
        if not remaining:
            out.append(tuple(prefix))
            return
        for i, n in enumerate(counts):
            if n:
                counts[i] -= 1
                prefix.append(labels[i])
                extend(remaining - 1)
                prefix.pop()
                counts[i] += 1

    extend(phi.size)
    return out


def arr(phi: Multiset) -> Distribution:
    """Uniform distribution over the orderings of ``phi``."""
    k = phi.size
    if k == 0:
        raise EmptyMultiset("arrangement of the empty multiset")
    space = tuples(phi.space, k)
    w = Fraction(1, coef(phi))
    return Distribution(space, {xs: w for xs in arrangements(phi)})


def acc_channel(base: Space, k: int) -> Channel:
    """Deterministic channel ``X^K -> M[K](X)`` forgetting order."""
    ms = multisets(base, k)
    return Channel.deterministic(tuples(base, k), ms, lambda xs: _acc_tuple(base, xs))


def arr_channel(base: Space, k: int) -> Channel:
    ms = multisets(base, k)
    return Channel(ms, tuples(base, k), {phi: arr(phi) for phi in ms})


def flrn_channel(base: Space, k: int) -> Channel:
    ms = multisets(base, k)
    return Channel(ms, base, {phi: flrn(phi) for phi in ms})


def multinomial_channel(c: Channel, k: int) -> Channel:
    """``x -> mn[K](c(x))``."""
    ms = multisets(c.codomain, k)
    return Channel(c.domain, ms, {x: multinomial(k, row) for x, row in c.rows()})


def _acc_tuple(base: Space, xs: tuple) -> Multiset:
    counts = [0] * len(base)
    for x in xs:
        counts[base.index(x)] += 1
    return Multiset(base, counts)


def ext_channel(c: Channel, k: int) -> Channel:
    """The channel ``M[K](X) -> M[K](Y)`` induced by ``c``.

    Row ``phi`` is ``acc >> (c^K >> arr(phi))``: arrange ``phi`` uniformly,
    push each position through ``c`` independently, and forget the order of
    the outputs.  The tensor power is never materialised; each arrangement is
    accumulated one position at a time.
    """
    _check_k(k)
    if not c.is_total:
        raise DomainError("multiset extension of a partial channel")
    xs_space = multisets(c.domain, k)
    ys_space = multisets(c.codomain, k)
    _guard_tuples(c.domain, k)
    n_out = len(c.codomain)
    row_vals = {x: row.values() for x, row in c.rows()}

    @lru_cache(maxsize=None)
    def accumulate(seq: tuple) -> dict[tuple, Fraction]:
        # distribution of the count vector of (c(x1), ..., c(xm))
        if not seq:
            return {(0,) * n_out: ONE}
        prev = accumulate(seq[:-1])
        vals = row_vals[seq[-1]]
        out: dict[tuple, Fraction] = {}
        for counts, w in prev.items():
            for j, v in enumerate(vals):
                if v:
                    key = counts[:j] + (counts[j] + 1,) + counts[j + 1 :]
                    out[key] = out.get(key, ZERO) + w * v
        return out

    rows = {}
    for phi in xs_space:
        arrs = arrangements(phi)
        share = Fraction(1, len(arrs))
        total: dict[tuple, Fraction] = {}
        for seq in arrs:
            for counts, w in accumulate(seq).items():
                total[counts] = total.get(counts, ZERO) + share * w
        rows[phi] = Distribution(ys_space, {Multiset(c.codomain, v): w for v, w in total.items()})
    return Channel(xs_space, ys_space, rows)


# -- likelihoods --------------------------------------------------------------


def _check_data(c: Channel, psi: Multiset) -> int:
    if psi.space != c.codomain:
        raise DomainError("data multiset is not over the channel codomain")
    if psi.size < 1:
        raise EmptyMultiset("likelihood of the empty multiset")
    return psi.size


def jeffrey_likelihood(omega: Distribution, c: Channel, psi: Multiset) -> Fraction:
    """Probability of ``psi`` when every data point gets a fresh latent state."""
    _check_data(c, psi)
    return multinomial_probability(push(c, omega), psi)


def pearl_likelihood(omega: Distribution, c: Channel, psi: Multiset) -> Fraction:
    """Probability of ``psi`` when one latent state generates all data points."""
    _check_data(c, psi)
    return sum(
        (w * multinomial_probability(c(x), psi) for x, w in omega.items() if w),
        ZERO,
    )


def pearl_multinomial_evidence(c: Channel, psi: Multiset) -> Predicate:
    """The pulled point predicate ``x -> mn[K](c(x))(psi)``."""
    _check_data(c, psi)
    return Predicate(c.domain, [multinomial_probability(row, psi) for _, row in c.rows()])


def pearl_multinomial_update(omega: Distribution, c: Channel, psi: Multiset) -> Distribution:
    return update(omega, pearl_multinomial_evidence(c, psi))


def multinomial_update(omega: Distribution, c: Channel, psi: Multiset) -> Distribution:
    """Update ``mn[K](omega)`` with the point evidence ``psi`` pulled along
    the extended channel; the result lives on ``M[K](X)``."""
    k = _check_data(c, psi)
    ext = ext_channel(c, k)
    evidence = Predicate(ext.domain, [row[psi] for _, row in ext.rows()])
    try:
        return update(multinomial(k, omega), evidence)
    except ZeroValidity:
        raise ZeroValidity(f"data {psi} has zero Jeffrey likelihood") from None


def flrn_push(sigma: Distribution) -> Distribution:
    """Expected empirical frequency ``(1/K) sum_phi sigma(phi) phi(x)``."""
    space = sigma.space
    if not isinstance(space, MultisetSpace):
        raise DomainError("flrn_push needs a distribution over a multiset space")
    totals = [ZERO] * len(space.base)
    for phi, w in sigma.items():
        if w:
            for i, n in enumerate(phi.counts):
                if n:
                    totals[i] += w * n
    return Distribution(space.base, [t / space.k for t in totals])


def variational_fit(sigma: Distribution) -> Distribution:
    """The ``omega`` whose multinomial is KL-closest to ``sigma``.

    The minimiser is available in closed form: it is the expected empirical
    frequency of ``sigma``.
    """
    return flrn_push(sigma)


def dagger_commutation_check(c: Channel, omega: Distribution, k: int) -> bool:
    """Whether extending the inversion equals inverting the extension.

    Compares ``ext_channel(dagger(c, omega), k)`` against
    ``dagger(ext_channel(c, k), mn[k](omega))`` row by row, exactly.
    """
    pred = push(c, omega)
    zero = [y for y, w in pred.items() if not w]
    if zero:
        raise ZeroValidity(f"prediction has zero mass at {zero!r}; both inversions must be total")
    lhs = ext_channel(dagger(c, omega), k)
    rhs = dagger(ext_channel(c, k), multinomial(k, omega))
    return lhs == rhs


def jeffrey_via_multinomial(omega: Distribution, c: Channel, psi: Multiset) -> tuple[Distribution, Distribution]:
    """Both sides of the frequentist-learning characterisation of Jeffrey's rule."""
    return flrn_push(multinomial_update(omega, c, psi)), jeffrey_update(omega, c, flrn(psi))


def singleton(x: Value, base: Space) -> Multiset:
    return Multiset(base, {x: 1})


def point_on_multisets(psi: Multiset) -> Predicate:
    return point_predicate(psi, multisets(psi.space, psi.size))
