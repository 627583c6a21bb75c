"""``belief`` command line: updates, likelihoods, theorem checks and samplers.

Every command builds a :class:`RunReport`.  Exact answers are stored as
rational strings and their float renderings are derived from those strings,
so the two can never disagree.
"""

from __future__ import annotations

import argparse
import decimal
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from . import checks as thm
from .channels import jeffrey_update, pearl_update_repeated, single_pearl_update
from .core import Distribution, Multiset, render_value
from .errors import BeliefError, ModelValidationError
from .models import Model, load_model
from .multisets import jeffrey_likelihood, pearl_likelihood
from .ppl import (
    FIXTURE_NAMES,
    SamplerConfig,
    SamplerReport,
    infer_enumerate,
    infer_reject,
    program_by_name,
    simulate_jeffrey_policy,
    simulate_pearl_policy,
    total_variation,
)

EXIT_OK, EXIT_FAILED_CHECK, EXIT_INVALID = 0, 1, 2
RULES = ("pearl-repeated", "pearl-single", "jeffrey")
RULE_PROGRAMS = {"pearl-repeated": "prog1", "pearl-single": "prog2", "jeffrey": "prog3"}


_FIFTEEN = decimal.Context(prec=15)
TABLE_RATIONAL_WIDTH = 40


def render_float(x: Fraction | float) -> str:
    """15 significant digits; rationals are divided in decimal so tiny values do not underflow."""
    if isinstance(x, float):
        return format(x, ".15g")
    x = Fraction(x)
    return format(_FIFTEEN.divide(decimal.Decimal(x.numerator), decimal.Decimal(x.denominator)), "g")


def _abbreviate(text: str) -> str:
    if len(text) <= TABLE_RATIONAL_WIDTH:
        return text
    num, _, den = text.partition("/")
    return f"{num[:6]}.../{den[:6]}... ({len(num)}/{len(den)} digits)"


@dataclass
class RunReport:
    """Everything a command produced, in a JSON-friendly shape."""

    command: str
    options: dict[str, Any] = field(default_factory=dict)
    exact: dict[str, dict[str, str]] = field(default_factory=dict)
    floats: dict[str, dict[str, str]] = field(default_factory=dict)
    checks: list[dict[str, Any]] = field(default_factory=list)
    meta: dict[str, Any] = field(default_factory=dict)
    elapsed: float = 0.0

    def add_exact(self, section: str, key: str, value: Fraction) -> None:
        text = str(Fraction(value))
        self.exact.setdefault(section, {})[key] = text
        self.floats.setdefault(section, {})[key] = render_float(Fraction(text))

    def add_distribution(self, section: str, dist: Distribution) -> None:
        for x, w in dist.items():
            self.add_exact(section, render_value(x), w)

    def add_float(self, section: str, key: str, value: float) -> None:
        """Quantities with no exact form (logarithms, distances)."""
        self.floats.setdefault(section, {})[key] = render_float(value)

    def add_check(self, result: thm.CheckResult) -> None:
        def side(v):
            return render_float(v) if isinstance(v, float) else str(v)

        self.checks.append(
            {
                "name": result.name,
                "passed": bool(result.passed),
                "lhs": side(result.lhs),
                "relation": result.relation,
                "rhs": side(result.rhs),
            }
        )

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        return cls(**json.loads(text))

    def to_table(self) -> str:
        opts = " ".join(
            str(v) if k == "program" else f"--{k} {v}" for k, v in self.options.items() if v is not None
        )
        lines = [f"belief {self.command} {opts}".rstrip()]
        for section, floats in self.floats.items():
            exact = self.exact.get(section, {})
            rows = [(k, _abbreviate(exact.get(k, "-")), v) for k, v in floats.items()]
            kw = max(len(section), *(len(r[0]) + 2 for r in rows)) + 2
            ew = max(len("exact"), *(len(r[1]) for r in rows)) + 2
            lines.append("")
            lines.append(f"{section:<{kw}}{'exact':<{ew}}float")
            lines.extend(f"  {k:<{kw - 2}}{e:<{ew}}{f}" for k, e, f in rows)
        if self.checks:
            lines.append("")
            for c in self.checks:
                mark = "PASS" if c["passed"] else "FAIL"
                lines.append(f"{mark}  {c['name']}: {c['lhs']} {c['relation']} {c['rhs']}")
        lines.append("")
        meta = "  ".join(f"{k}={v}" for k, v in self.meta.items())
        lines.append(f"{meta}  elapsed={self.elapsed:.3f}s".strip())
        return "\n".join(lines)


# -- commands -------------------------------------------------------------------


def _sampler_config(samples: int, seed: int, count: str, workers: int) -> SamplerConfig:
    return SamplerConfig(seed=seed, sample_count=samples, count=count, workers=workers)


def _add_sampler_run(report: RunReport, run: SamplerReport, cfg: SamplerConfig) -> None:
    report.meta.update(
        seed=cfg.seed,
        samples=cfg.sample_count,
        count=cfg.count,
        accepted=run.accepted,
        attempted=run.attempted,
    )
    report.add_exact("acceptance", "rate", Fraction(run.accepted, run.attempted))


def _need_data(model: Model, what: str) -> Multiset:
    if model.data is None or not model.data.size:
        raise ModelValidationError("data", f"{what} needs data in the model")
    return model.data


def exact_posterior(model: Model, rule: str) -> Distribution:
    if rule == "pearl-repeated":
        return pearl_update_repeated(model.prior, model.channel, _need_data(model, rule))
    if rule == "pearl-single":
        return single_pearl_update(model.prior, model.channel, model.evidence())
    if rule == "jeffrey":
        return jeffrey_update(model.prior, model.channel, model.evidence())
    raise ModelValidationError("--rule", f"unknown rule {rule!r}")


def cmd_update(
    model_path: str,
    rule: str,
    method: str = "exact",
    samples: int = 100_000,
    seed: int = 0,
    count: str = "accepted",
    workers: int = 1,
) -> RunReport:
    model = load_model(model_path)
    report = RunReport("update", {"model": model_path, "rule": rule, "method": method})
    exact = exact_posterior(model, rule)
    if method == "exact":
        report.add_distribution("posterior", exact)
    elif method == "reject":
        cfg = _sampler_config(samples, seed, count, workers)
        run = infer_reject(program_by_name(RULE_PROGRAMS[rule], model), cfg)
        report.add_distribution("posterior", run.distribution())
        report.add_distribution("exact posterior", exact)
        report.add_float("distance", "total variation", total_variation(run.distribution(), exact))
        _add_sampler_run(report, run, cfg)
    else:
        raise ModelValidationError("--method", f"unknown method {method!r}")
    return report


def cmd_likelihood(model_path: str, kind: str) -> RunReport:
    model = load_model(model_path)
    psi = _need_data(model, "a likelihood")
    report = RunReport("likelihood", {"model": model_path, "kind": kind})
    if kind == "pearl":
        value = pearl_likelihood(model.prior, model.channel, psi)
    elif kind == "jeffrey":
        value = jeffrey_likelihood(model.prior, model.channel, psi)
    else:
        raise ModelValidationError("--kind", f"unknown likelihood {kind!r}")
    report.add_exact("likelihood", kind, value)
    report.meta["data"] = str(psi)
    return report


def cmd_check(model_path: str, theorem: str, k: int | None = None, seed: int = 0) -> RunReport:
    model = load_model(model_path)
    if theorem not in thm.THEOREMS:
        raise ModelValidationError("--theorem", f"unknown theorem {theorem!r}")
    report = RunReport("check", {"model": model_path, "theorem": theorem, "K": k})
    fn = thm.THEOREMS[theorem]
    if theorem == "thm85":
        results = fn(model, k, seed=seed)
        report.meta["seed"] = seed
    elif theorem in thm.NEEDS_K:
        results = fn(model, k)
    else:
        results = fn(model)
    for r in results:
        report.add_check(r)
    return report


def cmd_simulate(
    model_path: str,
    policy: str,
    samples: int = 100_000,
    seed: int = 0,
    count: str = "accepted",
    targets: str = "random",
    workers: int = 1,
) -> RunReport:
    model = load_model(model_path)
    tau = model.evidence()
    report = RunReport("simulate", {"model": model_path, "policy": policy, "targets": targets})
    cfg = _sampler_config(samples, seed, count, workers)
    if policy == "pearl":
        run = simulate_pearl_policy(model.prior, model.channel, tau, cfg, targets)
        oracle = single_pearl_update(model.prior, model.channel, tau)
    elif policy == "jeffrey":
        run = simulate_jeffrey_policy(model.prior, model.channel, tau, cfg, targets)
        oracle = jeffrey_update(model.prior, model.channel, tau)
    else:
        raise ModelValidationError("--policy", f"unknown policy {policy!r}")
    report.add_distribution("admitted states", run.distribution())
    report.add_distribution("admitted outcomes", run.outcome_distribution())
    report.add_distribution("exact posterior", oracle)
    report.add_float("distance", "total variation", total_variation(run.distribution(), oracle))
    _add_sampler_run(report, run, cfg)
    return report


def cmd_ppl(
    prog_name: str,
    method: str = "exact",
    samples: int = 100_000,
    seed: int = 0,
    model_path: str | None = None,
    scale: int = 1,
    count: str = "accepted",
    workers: int = 1,
) -> RunReport:
    if prog_name not in FIXTURE_NAMES:
        raise ModelValidationError("program", f"unknown program {prog_name!r}; choose from {', '.join(FIXTURE_NAMES)}")
    is_policy = prog_name.startswith("ticker-")
    model_path = model_path or ("club" if is_policy else "disease")
    model = load_model(model_path)
    if scale != 1:
        if scale < 1:
            raise ModelValidationError("--scale", "must be a positive integer")
        model = model.with_data(_need_data(model, "--scale").scaled(scale))
    report = RunReport("ppl", {"program": prog_name, "model": model_path, "method": method, "scale": scale})

    if is_policy:
        rule = "pearl-single" if prog_name == "ticker-pearl" else "jeffrey"
        if method == "exact":
            report.add_distribution("posterior", exact_posterior(model, rule))
            return report
        sim = cmd_simulate(model_path, rule.split("-")[-1], samples, seed, count, workers=workers)
        sim.command, sim.options = report.command, report.options
        return sim

    prog = program_by_name(prog_name, model)
    if method == "exact":
        report.add_distribution("posterior", infer_enumerate(prog))
    elif method == "reject":
        cfg = _sampler_config(samples, seed, count, workers)
        run = infer_reject(prog, cfg)
        report.add_distribution("posterior", run.distribution())
        _add_sampler_run(report, run, cfg)
    else:
        raise ModelValidationError("--method", f"unknown method {method!r}")
    return report


# -- argument parsing -------------------------------------------------------------


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="belief", description="Pearl and Jeffrey updates on finite models.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, model: bool = True, sampler: bool = False) -> None:
        if model:
            p.add_argument("--model", required=True, help="model JSON file, or a bundled fixture name (disease, club)")
        if sampler:
            p.add_argument("--samples", type=_positive, default=100_000)
            p.add_argument("--seed", type=_u64, default=0)
            p.add_argument(
                "--count",
                choices=("accepted", "attempts"),
                default="accepted",
                help="whether --samples counts accepted traces or attempted ones",
            )
            p.add_argument("--workers", type=_positive, default=1)
        p.add_argument("--format", choices=("table", "json"), default="table")

    p = sub.add_parser("update", help="posterior under one of the update rules")
    p.add_argument("--rule", choices=RULES, required=True)
    p.add_argument("--method", choices=("exact", "reject"), default="exact")
    common(p, sampler=True)

    p = sub.add_parser("likelihood", help="Pearl or Jeffrey likelihood of the data")
    p.add_argument("--kind", choices=("pearl", "jeffrey"), required=True)
    common(p)

    p = sub.add_parser("check", help="verify a theorem on the model")
    p.add_argument("--theorem", choices=tuple(thm.THEOREMS), required=True)
    p.add_argument("--K", dest="k", type=_positive, default=None, help="multiset size (default: size of the data)")
    p.add_argument("--seed", type=_u64, default=0, help="seed for random challengers")
    common(p)

    p = sub.add_parser("simulate", help="run a door policy simulation")
    p.add_argument("--policy", choices=("pearl", "jeffrey"), required=True)
    p.add_argument("--targets", choices=("random", "cycle"), default="random")
    common(p, sampler=True)

    p = sub.add_parser("ppl", help="run a bundled program")
    p.add_argument("program", choices=FIXTURE_NAMES)
    p.add_argument("--method", choices=("exact", "reject"), default="exact")
    p.add_argument("--model", default=None, help="model to build the program from")
    p.add_argument("--scale", type=_positive, default=1, help="multiply the data counts")
    common(p, model=False, sampler=True)
    return parser


def run(args: argparse.Namespace) -> RunReport:
    if args.command == "update":
        return cmd_update(args.model, args.rule, args.method, args.samples, args.seed, args.count, args.workers)
    if args.command == "likelihood":
        return cmd_likelihood(args.model, args.kind)
    if args.command == "check":
        return cmd_check(args.model, args.theorem, args.k, args.seed)
    if args.command == "simulate":
        return cmd_simulate(
            args.model, args.policy, args.samples, args.seed, args.count, args.targets, args.workers
        )
    return cmd_ppl(
        args.program, args.method, args.samples, args.seed, args.model, args.scale, args.count, args.workers
    )


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        report = run(args)
    except BeliefError as exc:
        print(f"belief: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    report.elapsed = time.perf_counter() - start
    print(report.to_json() if args.format == "json" else report.to_table())
    return EXIT_OK if report.passed else EXIT_FAILED_CHECK


if __name__ == "__main__":
    sys.exit(main())
