"""Prior/channel/data bundles and their JSON model-file format."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any

from .channels import Channel, push
from .core import Distribution, Multiset, Space, flrn
from .errors import DomainError, ModelValidationError

_RATIONAL = re.compile(r"^\s*\d+\s*(/\s*\d+\s*)?$")


@dataclass(frozen=True)
class Model:
    """A prior over states, a test channel, and optional data / target."""

    prior: Distribution
    channel: Channel
    data: Multiset | None = None
    target: Distribution | None = None
    name: str = "model"

    @property
    def states(self) -> Space:
        return self.prior.space

    @property
    def outcomes(self) -> Space:
        return self.channel.codomain

    def evidence(self) -> Distribution:
        """The target distribution, falling back to the normalised data."""
        if self.target is not None:
            return self.target
        if self.data is not None and self.data.size:
            return flrn(self.data)
        raise ModelValidationError("target", "model has neither a target nor data")

    def prediction(self) -> Distribution:
        return push(self.channel, self.prior)

    def with_data(self, data: Multiset) -> "Model":
        return Model(self.prior, self.channel, data, self.target, self.name)

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "states": [str(x) for x in self.states],
            "outcomes": [str(y) for y in self.outcomes],
            "prior": {str(x): str(w) for x, w in self.prior.items()},
            "channel": {
                str(x): {str(y): str(v) for y, v in row.items()} for x, row in self.channel.rows()
            },
        }
        if self.data is not None:
            out["data"] = {str(y): n for y, n in self.data.items()}
        if self.target is not None:
            out["target"] = {str(y): str(w) for y, w in self.target.items()}
        return out


def build_disease_model() -> tuple[Distribution, Channel, Multiset, Distribution]:
    """5% prevalence, 90% sensitivity, 95% specificity; two positive tests, one negative."""
    m = disease_model()
    return m.prior, m.channel, m.data, m.evidence()


def disease_model() -> Model:
    states = Space.of("d", "nd")
    outcomes = Space.of("p", "n")
    prior = Distribution(states, {"d": Fraction(1, 20), "nd": Fraction(19, 20)})
    channel = Channel(
        states,
        outcomes,
        {
            "d": {"p": Fraction(9, 10), "n": Fraction(1, 10)},
            "nd": {"p": Fraction(1, 20), "n": Fraction(19, 20)},
        },
    )
    data = Multiset(outcomes, {"p": 2, "n": 1})
    return Model(prior, channel, data, None, "disease")


def club_model() -> Model:
    """People queueing for a club: age group, and their rock/pop preference.

    Management wants three quarters of the admitted audience to prefer rock.
    """
    states = Space.of("young", "old")
    outcomes = Space.of("rock", "pop")
    prior = Distribution(states, {"young": Fraction(1, 2), "old": Fraction(1, 2)})
    channel = Channel(
        states,
        outcomes,
        {
            "young": {"rock": Fraction(1, 4), "pop": Fraction(3, 4)},
            "old": {"rock": Fraction(2, 3), "pop": Fraction(1, 3)},
        },
    )
    target = Distribution(outcomes, {"rock": Fraction(3, 4), "pop": Fraction(1, 4)})
    return Model(prior, channel, None, target, "club")


FIXTURES = {"disease": "disease.json", "club": "club.json"}


# -- loading -----------------------------------------------------------------


def _rational(field: str, raw: Any) -> Fraction:
    if not isinstance(raw, str) or not _RATIONAL.match(raw):
        raise ModelValidationError(field, f"expected a rational string like '1/20', got {raw!r}")
    try:
        return Fraction(raw.replace(" ", ""))
    except ZeroDivisionError:
        raise ModelValidationError(field, f"zero denominator in {raw!r}") from None


def _labels(doc: dict, key: str) -> Space:
    raw = doc.get(key)
    if not isinstance(raw, list) or not raw or not all(isinstance(x, str) for x in raw):
        raise ModelValidationError(key, "expected a non-empty list of string labels")
    if len(set(raw)) != len(raw):
        raise ModelValidationError(key, "duplicate labels")
    return Space(raw)


def _table(field: str, raw: Any, space: Space) -> dict[str, Fraction]:
    if not isinstance(raw, dict):
        raise ModelValidationError(field, "expected an object keyed by label")
    out = {}
    for label, value in raw.items():
        if label not in space:
            raise ModelValidationError(f"{field}.{label}", "unknown label")
        out[label] = _rational(f"{field}.{label}", value)
        if out[label] > 1:
            raise ModelValidationError(f"{field}.{label}", "probability above 1")
    total = sum(out.values(), Fraction(0))
    if total != 1:
        raise ModelValidationError(field, f"sums to {total}, expected 1")
    return out


def parse_model(doc: Any, name: str = "model") -> Model:
    """Validate a decoded model document; every violation names its field."""
    if not isinstance(doc, dict):
        raise ModelValidationError("<root>", "expected a JSON object")
    unknown = set(doc) - {"states", "outcomes", "prior", "channel", "data", "target", "name"}
    if unknown:
        raise ModelValidationError(sorted(unknown)[0], "unknown field")
    states = _labels(doc, "states")
    outcomes = _labels(doc, "outcomes")
    prior = Distribution(states, _table("prior", doc.get("prior"), states))

    raw_channel = doc.get("channel")
    if not isinstance(raw_channel, dict):
        raise ModelValidationError("channel", "expected an object mapping states to rows")
    rows = {}
    for x in states:
        if x not in raw_channel:
            raise ModelValidationError(f"channel.{x}", "missing row")
        rows[x] = Distribution(outcomes, _table(f"channel.{x}", raw_channel[x], outcomes))
    for x in raw_channel:
        if x not in states:
            raise ModelValidationError(f"channel.{x}", "unknown state")
    channel = Channel(states, outcomes, rows)

    data = None
    if "data" in doc:
        raw = doc["data"]
        if not isinstance(raw, dict):
            raise ModelValidationError("data", "expected an object of outcome counts")
        counts = {}
        for y, n in raw.items():
            if y not in outcomes:
                raise ModelValidationError(f"data.{y}", "unknown outcome")
            if isinstance(n, bool) or not isinstance(n, int) or n < 0:
                raise ModelValidationError(f"data.{y}", f"expected a natural number, got {n!r}")
            counts[y] = n
        data = Multiset(outcomes, counts)

    target = None
    if "target" in doc:
        target = Distribution(outcomes, _table("target", doc["target"], outcomes))

    return Model(prior, channel, data, target, str(doc.get("name", name)))


def load_model(path: str | Path) -> Model:
    """Read a model file; bare fixture names (``disease``, ``club``) also work."""
    p = Path(path)
    if not p.exists() and str(path) in FIXTURES:
        text = resources.files("belief.data").joinpath(FIXTURES[str(path)]).read_text()
        name = str(path)
    else:
        try:
            text = p.read_text()
        except OSError as exc:
            raise ModelValidationError("--model", f"cannot read {path}: {exc.strerror}") from None
        name = p.stem
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelValidationError("<root>", f"invalid JSON: {exc}") from None
    try:
        return parse_model(doc, name)
    except DomainError as exc:
        raise ModelValidationError("<root>", str(exc)) from None
