"""Channels (stochastic maps between finite spaces) and the two update rules."""

from __future__ import annotations

from typing import Callable, Iterable, Mapping

from .core import (
    ONE,
    ZERO,
    Distribution,
    Multiset,
    Predicate,
    Space,
    Value,
    point_predicate,
    product_space,
    render_value,
    tensor,
    tuple_space,
    update,
)
from .errors import DomainError, ZeroValidity


class Channel:
    """A row table ``x -> Distribution over codomain``.

    A channel may be *partial*: some domain values then carry no row and
    asking for one raises :class:`ZeroValidity`.  Bayesian inversions are the
    only partial channels built by this package; their missing rows are the
    observations with zero predicted probability.
    """

    __slots__ = ("domain", "codomain", "_rows")

    def __init__(
        self,
        domain: Space,
        codomain: Space,
        rows: Mapping[Value, Distribution | Mapping[Value, object]],
        *,
        partial: bool = False,
    ):
        self.domain = domain if isinstance(domain, Space) else Space(domain)
        self.codomain = codomain if isinstance(codomain, Space) else Space(codomain)
        table: dict[Value, Distribution] = {}
        for x, row in rows.items():
            self.domain.index(x)
            if not isinstance(row, Distribution):
                row = Distribution(self.codomain, row)
            elif row.space != self.codomain:
                raise DomainError(f"row {render_value(x)} is not over the codomain")
            table[x] = row
        if not partial:
            missing = [x for x in self.domain if x not in table]
            if missing:
                raise DomainError(f"channel has no row for {missing!r}")
        # keep declared order
        self._rows = {x: table[x] for x in self.domain if x in table}

    @classmethod
    def from_function(cls, domain: Space, codomain: Space, f: Callable[[Value], Distribution]) -> "Channel":
        return cls(domain, codomain, {x: f(x) for x in domain})

    @classmethod
    def deterministic(cls, domain: Space, codomain: Space, f: Callable[[Value], Value]) -> "Channel":
        return cls(domain, codomain, {x: Distribution.point(codomain, f(x)) for x in domain})

    @property
    def is_total(self) -> bool:
        return len(self._rows) == len(self.domain)

    def defined(self) -> tuple[Value, ...]:
        return tuple(self._rows)

    def __call__(self, x: Value) -> Distribution:
        self.domain.index(x)
        try:
            return self._rows[x]
        except KeyError:
            raise ZeroValidity(f"row {render_value(x)} is undefined (zero predicted probability)") from None

    def rows(self):
        return self._rows.items()

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Channel)
            and self.domain == other.domain
            and self.codomain == other.codomain
            and self._rows == other._rows
        )

    def __hash__(self) -> int:
        return hash((self.domain, self.codomain, tuple(self._rows.items())))

    def __repr__(self) -> str:
        return f"Channel({self.domain!r} -> {self.codomain!r}, {len(self._rows)} rows)"


def identity(space: Space) -> Channel:
    return Channel.deterministic(space, space, lambda x: x)


def push(c: Channel, omega: Distribution) -> Distribution:
    """Pushforward (prediction) of ``omega`` along ``c``."""
    if omega.space != c.domain:
        raise DomainError("pushforward: distribution is not over the channel domain")
    out = [ZERO] * len(c.codomain)
    for x, w in omega.items():
        if not w:
            continue
        for j, v in enumerate(c(x).values()):
            if v:
                out[j] += w * v
    return Distribution(c.codomain, out)


def pull(c: Channel, q: Predicate) -> Predicate:
    """Pullback ``x -> sum_y c(x)(y) q(y)`` of a predicate on the codomain."""
    if q.space != c.codomain:
        raise DomainError("pullback: predicate is not over the channel codomain")
    if not c.is_total:
        raise DomainError("pullback along a partial channel")
    qs = q.values()
    return Predicate(
        c.domain,
        [sum((a * b for a, b in zip(row.values(), qs) if a), ZERO) for row in c._rows.values()],
    )


def compose(d: Channel, c: Channel) -> Channel:
    """Kleisli composite: first ``c``, then ``d``."""
    if c.codomain != d.domain:
        raise DomainError("composition: codomain of the first channel differs from domain of the second")
    rows = {}
    for x, row in c.rows():
        try:
            rows[x] = push(d, row)
        except ZeroValidity:
            continue
    return Channel(c.domain, d.codomain, rows, partial=True)


def tensor_channel(c: Channel, d: Channel) -> Channel:
    domain = product_space(c.domain, d.domain)
    codomain = product_space(c.codomain, d.codomain)
    rows = {
        (x, y): tensor(cx, dy)
        for x, cx in c.rows()
        for y, dy in d.rows()
    }
    return Channel(domain, codomain, rows, partial=True)


def power_channel(c: Channel, k: int) -> Channel:
    """``c`` tensored ``k`` times, acting on flat k-tuples."""
    if k < 1:
        raise DomainError("channel power needs k >= 1")
    domain = tuple_space(c.domain, k)
    codomain = tuple_space(c.codomain, k)
    rows = {}
    for xs in domain:
        weights = [ONE]
        for x in xs:
            vals = c(x).values()
            weights = [w * v for w in weights for v in vals]
        rows[xs] = Distribution(codomain, weights)
    return Channel(domain, codomain, rows)


def dagger(c: Channel, omega: Distribution) -> Channel:
    """Bayesian inversion of ``c`` with respect to the prior ``omega``.

    Rows exist only for observations with positive predicted probability.
    """
    pred = push(c, omega)
    rows = {}
    for y, py in pred.items():
        if not py:
            continue
        j = c.codomain.index(y)
        rows[y] = Distribution(
            c.domain,
            [w * c(x).values()[j] / py if w else ZERO for x, w in omega.items()],
        )
    return Channel(c.codomain, c.domain, rows, partial=True)


# -- update rules -------------------------------------------------------------


def pearl_update(omega: Distribution, c: Channel, q: Predicate) -> Distribution:
    return update(omega, pull(c, q))


def pearl_update_repeated(omega: Distribution, c: Channel, psi: Multiset) -> Distribution:
    """Update once per data point of ``psi``, computed in closed form.

    Successive updates commute, so the posterior is proportional to
    ``omega(x) * prod_y c(x)(y) ** psi(y)``.
    """
    if psi.space != c.codomain:
        raise DomainError("data multiset is not over the channel codomain")
    support = [(c.codomain.index(y), n) for y, n in psi.items() if n]
    weights = []
    for x, w in omega.items():
        if w:
            row = c(x).values()
            for j, n in support:
                w *= row[j] ** n
                if not w:
                    break
        weights.append(w)
    total = sum(weights, ZERO)
    if not total:
        raise ZeroValidity("the data has zero probability under every state")
    return Distribution(omega.space, [w / total for w in weights])


def pearl_update_iterated(omega: Distribution, c: Channel, data: Iterable[Value]) -> Distribution:
    """Literal successive updates with ``c -| 1_y``, one per item of ``data``."""
    for y in data:
        omega = update(omega, pull(c, point_predicate(y, c.codomain)))
    return omega


def jeffrey_update(omega: Distribution, c: Channel, tau: Distribution) -> Distribution:
    """Push the evidence distribution ``tau`` back through the inversion of ``c``."""
    if tau.space != c.codomain:
        raise DomainError("evidence distribution is not over the channel codomain")
    pred = push(c, omega)
    bad = [y for y, t in tau.items() if t and not pred[y]]
    if bad:
        raise ZeroValidity(
            "evidence puts mass on outcomes the prior predicts with probability 0: "
            + ", ".join(render_value(y) for y in bad)
        )
    return push(dagger(c, omega), tau)


def single_pearl_update(omega: Distribution, c: Channel, tau: Distribution) -> Distribution:
    """Pearl update with ``tau`` read as the soft predicate ``sum_y tau(y) 1_y``."""
    return pearl_update(omega, c, Predicate.from_distribution(tau))


def point_evidence(c: Channel, y: Value) -> Predicate:
    return pull(c, point_predicate(y, c.codomain))


