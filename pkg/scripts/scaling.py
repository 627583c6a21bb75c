"""Repeated Pearl sharpens as data grows while Jeffrey and single Pearl only see frequencies."""

from __future__ import annotations

import argparse
import decimal
import time
from dataclasses import dataclass
from fractions import Fraction

from belief import flrn, jeffrey_update, pearl_update_repeated, single_pearl_update
from belief.models import load_model


@dataclass(frozen=True)
class Config:
    model: str = "disease"
    max_scale: int = 1000


def sci(r: Fraction) -> str:
    # decimal keeps exponents far below the float range
    d = decimal.Context(prec=4).divide(decimal.Decimal(r.numerator), decimal.Decimal(r.denominator))
    return f"{d:.3e}"


def main(cfg: Config) -> None:
    m = load_model(cfg.model)
    omega, c = m.prior, m.channel
    print(f"{'data':>14} {'repeated Pearl d':>18} {'1 - d':>13} {'single Pearl d':>15} {'Jeffrey d':>10} {'ms':>8}")
    scale = 1
    while scale <= cfg.max_scale:
        psi = m.data.scaled(scale)
        t0 = time.perf_counter()
        rep = pearl_update_repeated(omega, c, psi)
        ms = (time.perf_counter() - t0) * 1e3
        single = single_pearl_update(omega, c, flrn(psi))
        jeff = jeffrey_update(omega, c, flrn(psi))
        x = omega.space.elements[0]
        print(f"{str(psi):>14} {float(rep[x]):>18.12f} {sci(1 - rep[x]):>13} {float(single[x]):>15.6f} {float(jeff[x]):>10.6f} {ms:>8.2f}")
        scale *= 10


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--model", default=Config.model)
    p.add_argument("--max-scale", type=int, default=Config.max_scale)
    main(Config(**vars(p.parse_args())))
