"""Door-policy simulation: how the admitted crowd compares to the target mix."""

from __future__ import annotations

import argparse
from dataclasses import dataclass

from belief import jeffrey_update, simulate_jeffrey_policy, simulate_pearl_policy, single_pearl_update
from belief.models import load_model
from belief.ppl import SamplerConfig, total_variation


@dataclass(frozen=True)
class Config:
    model: str = "club"
    admissions: int = 100_000
    seed: int = 1
    targets: str = "random"


def main(cfg: Config) -> None:
    m = load_model(cfg.model)
    tau = m.evidence()
    sampler = SamplerConfig(seed=cfg.seed, sample_count=cfg.admissions, count="accepted")
    print(f"target {tau}")
    for name, simulate, exact in (
        ("pearl", simulate_pearl_policy, single_pearl_update),
        ("jeffrey", simulate_jeffrey_policy, jeffrey_update),
    ):
        run = simulate(m.prior, m.channel, tau, sampler, cfg.targets)
        oracle = exact(m.prior, m.channel, tau)
        mix = {y: round(n / run.accepted, 4) for y, n in run.outcome_frequencies.items()}
        print(
            f"{name:8s} admitted {run.accepted}/{run.attempted}  outcome mix {mix}  "
            f"state TV to exact {total_variation(run.distribution(), oracle):.4f}"
        )


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--model", default=Config.model)
    p.add_argument("--admissions", type=int, default=Config.admissions)
    p.add_argument("--seed", type=int, default=Config.seed)
    p.add_argument("--targets", choices=("random", "cycle"), default=Config.targets)
    main(Config(**vars(p.parse_args())))
