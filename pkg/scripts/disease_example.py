"""The medical-test example end to end: three update rules, likelihoods and divergences."""

from __future__ import annotations

import argparse
from dataclasses import dataclass

from belief import (
    dagger,
    infer_enumerate,
    jeffrey_likelihood,
    jeffrey_update,
    kl_divergence,
    pearl_likelihood,
    pearl_update_repeated,
    push,
    single_pearl_update,
)
from belief.models import load_model
from belief.ppl import build_progs


@dataclass(frozen=True)
class Config:
    model: str = "disease"


def main(cfg: Config) -> None:
    m = load_model(cfg.model)
    omega, c, psi, tau = m.prior, m.channel, m.data, m.evidence()
    print(f"prior {omega}")
    print(f"data {psi}, empirical {tau}")
    print(f"prediction {push(c, omega)}")
    d = dagger(c, omega)
    for y, row in d.rows():
        print(f"inversion at {y}: {row}")

    rules = {
        "repeated Pearl": pearl_update_repeated(omega, c, psi),
        "single Pearl": single_pearl_update(omega, c, tau),
        "Jeffrey": jeffrey_update(omega, c, tau),
    }
    progs = build_progs(m)
    for (name, post), prog in zip(rules.items(), progs):
        same = "==" if infer_enumerate(prog) == post else "!="
        print(f"{name:15s} {post}  ({prog.name} enumeration {same})")

    print(f"Pearl likelihood   {pearl_likelihood(omega, c, psi)}")
    print(f"Jeffrey likelihood {jeffrey_likelihood(omega, c, psi)}")
    print(f"D(tau, prediction)         = {kl_divergence(tau, push(c, omega)):.5f}")
    print(f"D(tau, Jeffrey prediction) = {kl_divergence(tau, push(c, rules['Jeffrey'])):.5f}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--model", default=Config.model)
    main(Config(**vars(p.parse_args())))
