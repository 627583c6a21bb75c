"""Theorem checks on a concrete model, each reporting both sides it compares."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .channels import compose, dagger, jeffrey_update, pearl_update, pull, push, tensor_channel
from .core import (
    Distribution,
    Predicate,
    Space,
    conjoin,
    flrn,
    kl_divergence,
    point_predicate,
    predicate_pow,
    tensor,
    update,
    validity,
)
from .errors import DomainError
from .models import Model
from .multisets import (
    dagger_commutation_check,
    flrn_push,
    multinomial,
    multinomial_update,
    variational_fit,
)

KL_SLACK = 1e-9


@dataclass
class CheckResult:
    name: str
    passed: bool
    lhs: Fraction | float | str
    rhs: Fraction | float | str
    relation: str  # "==", "<=", ">="


def random_distribution(space: Space, rng: np.random.Generator, high: int = 1000) -> Distribution:
    """Full-support rational distribution with integer weights in ``[1, high]``."""
    weights = [int(w) for w in rng.integers(1, high + 1, size=len(space))]
    return Distribution.normalised(space, weights)


def _evidence_predicate(model: Model) -> Predicate:
    return Predicate.from_distribution(model.evidence())


def _data(model: Model):
    if model.data is None or not model.data.size:
        raise DomainError("this check needs data in the model")
    return model.data


def validity_increase(model: Model) -> list[CheckResult]:
    omega, c = model.prior, model.channel
    q = _evidence_predicate(model)
    post = pearl_update(omega, c, q)
    out = [
        CheckResult(
            "pearl validity increase (soft evidence)",
            validity(push(c, post), q) >= validity(push(c, omega), q),
            validity(push(c, post), q),
            validity(push(c, omega), q),
            ">=",
        )
    ]
    if model.data is not None and model.data.size:
        p = Predicate.truth(omega.space)
        for y, n in model.data.items():
            p = conjoin(p, predicate_pow(pull(c, point_predicate(y, c.codomain)), n))
        post = update(omega, p)
        out.append(
            CheckResult(
                "pearl validity increase (all data points)",
                validity(post, p) >= validity(omega, p),
                validity(post, p),
                validity(omega, p),
                ">=",
            )
        )
    return out


def kl_decrease(model: Model) -> list[CheckResult]:
    omega, c = model.prior, model.channel
    tau = model.evidence()
    post = jeffrey_update(omega, c, tau)
    after = kl_divergence(tau, push(c, post))
    before = kl_divergence(tau, push(c, omega))
    return [CheckResult("jeffrey divergence decrease", after <= before + KL_SLACK, after, before, "<=")]


def lemma41(model: Model) -> list[CheckResult]:
    omega, c = model.prior, model.channel
    q = _evidence_predicate(model)
    lhs, rhs = validity(push(c, omega), q), validity(omega, pull(c, q))
    out = [CheckResult("validity of a prediction equals validity of the pullback", lhs == rhs, lhs, rhs, "==")]

    labels = list(c.codomain)
    p1 = pull(c, point_predicate(labels[0], c.codomain))
    p2 = pull(c, point_predicate(labels[-1], c.codomain))
    twice = update(update(omega, p1), p2)
    once = update(omega, conjoin(p1, p2))
    out.append(CheckResult("successive updates equal one conjoined update", twice == once, str(twice), str(once), "=="))

    p = pull(c, q)
    post = update(omega, p)
    out.append(CheckResult("update increases validity", validity(post, p) >= validity(omega, p), validity(post, p), validity(omega, p), ">="))
    return out


def lemma53(model: Model) -> list[CheckResult]:
    omega, c = model.prior, model.channel
    pred = push(c, omega)
    if len(pred.support()) != len(pred.space):
        raise DomainError("dagger laws are checked on predictions with full support")
    d = dagger(c, omega)
    lhs = dagger(compose(d, c), omega)
    rhs = compose(dagger(c, omega), dagger(d, pred))
    out = [CheckResult("inversion reverses sequential composition", lhs == rhs, repr(lhs), repr(rhs), "==")]
    lhs = dagger(tensor_channel(c, c), tensor(omega, omega))
    rhs = tensor_channel(dagger(c, omega), dagger(c, omega))
    out.append(CheckResult("inversion preserves parallel composition", lhs == rhs, repr(lhs), repr(rhs), "=="))
    return out


def _matching_k(model: Model, k: int | None) -> int:
    psi = _data(model)
    if k is not None and k != psi.size:
        raise DomainError(f"K={k} differs from the data size {psi.size}")
    return psi.size


def thm83(model: Model, k: int | None = None) -> list[CheckResult]:
    _matching_k(model, k)
    omega, c, psi = model.prior, model.channel, _data(model)
    lhs = flrn_push(multinomial_update(omega, c, psi))
    rhs = jeffrey_update(omega, c, flrn(psi))
    checks = [CheckResult("multinomial update learns the jeffrey posterior", lhs == rhs, str(lhs), str(rhs), "==")]
    for x in omega.space:
        checks.append(CheckResult(f"  at {x}", lhs[x] == rhs[x], lhs[x], rhs[x], "=="))
    return checks


def prop82(model: Model, k: int | None = None) -> list[CheckResult]:
    if k is None:
        k = _data(model).size
    ok = dagger_commutation_check(model.channel, model.prior, k)
    return [CheckResult(f"multiset extension commutes with inversion (K={k})", ok, str(ok), "True", "==")]


def thm85(model: Model, k: int | None = None, challengers: int = 200, seed: int = 0) -> list[CheckResult]:
    _matching_k(model, k)
    omega, c, psi = model.prior, model.channel, _data(model)
    sigma = multinomial_update(omega, c, psi)
    fit = variational_fit(sigma)
    jeff = jeffrey_update(omega, c, flrn(psi))
    k = psi.size
    best = kl_divergence(sigma, multinomial(k, fit))
    rng = np.random.default_rng(seed)
    candidates = [omega] + [random_distribution(omega.space, rng) for _ in range(challengers)]
    rival = min(kl_divergence(sigma, multinomial(k, w)) for w in candidates)
    return [
        CheckResult("variational fit equals the jeffrey posterior", fit == jeff, str(fit), str(jeff), "=="),
        CheckResult(
            f"variational fit beats {len(candidates)} challengers",
            best <= rival + KL_SLACK,
            best,
            rival,
            "<=",
        ),
    ]


THEOREMS: dict[str, Callable[..., list[CheckResult]]] = {
    "validity-increase": validity_increase,
    "kl-decrease": kl_decrease,
    "lemma41": lemma41,
    "lemma53": lemma53,
    "thm83": thm83,
    "prop82": prop82,
    "thm85": thm85,
}
NEEDS_K = {"thm83", "prop82", "thm85"}
