from __future__ import annotations

import re
from fractions import Fraction

import hypothesis
import hypothesis.strategies as st

from belief import Channel, Distribution, Multiset, Space

hypothesis.settings.register_profile("default", max_examples=60, deadline=None)
hypothesis.settings.register_profile("thorough", max_examples=500, deadline=None)
hypothesis.settings.load_profile("default")


# -- strategies --------------------------------------------------------------------


def spaces(prefix: str = "x", min_size: int = 1, max_size: int = 3):
    return st.integers(min_size, max_size).map(lambda n: Space(f"{prefix}{i}" for i in range(n)))


def weights(n: int, full_support: bool = True):
    low = 1 if full_support else 0
    ws = st.lists(st.integers(low, 12), min_size=n, max_size=n)
    return ws if full_support else ws.filter(any)


@st.composite
def distributions(draw, space: Space, full_support: bool = True):
    return Distribution.normalised(space, draw(weights(len(space), full_support)))


@st.composite
def predicates(draw, space: Space):
    from belief import Predicate

    dens = st.integers(1, 6)
    vals = []
    for _ in space:
        d = draw(dens)
        vals.append(Fraction(draw(st.integers(0, d)), d))
    return Predicate(space, vals)


@st.composite
def channels(draw, dom: Space, cod: Space, full_support: bool = True):
    return Channel(dom, cod, {x: draw(distributions(cod, full_support)) for x in dom})


@st.composite
def multisets_over(draw, space: Space, min_size: int = 1, max_size: int = 4):
    counts = draw(st.lists(st.integers(0, max_size), min_size=len(space), max_size=len(space)))
    total = sum(counts)
    if total < min_size:
        counts[0] += min_size - total
    while sum(counts) > max_size:
        i = max(range(len(counts)), key=counts.__getitem__)
        counts[i] -= 1
    return Multiset(space, counts)


@st.composite
def models(draw, max_x: int = 3, max_y: int = 3):
    """``(prior, channel)`` with full support everywhere."""
    xs = draw(spaces("x", 1, max_x))
    ys = draw(spaces("y", 2, max_y))
    return draw(distributions(xs)), draw(channels(xs, ys))


# -- acceptance summary ---------------------------------------------------------------

_CRITERION = re.compile(r"test_criterion_(\d+)_")
_results: dict[int, list[bool]] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    if "test_acceptance.py" not in report.nodeid:
        return
    m = _CRITERION.search(report.nodeid)
    if m:
        _results.setdefault(int(m.group(1)), []).append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    from test_acceptance import CRITERIA

    terminalreporter.section("acceptance criteria")
    for n in sorted(_results):
        outcomes = _results[n]
        status = "PASS" if all(outcomes) else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {n}: {CRITERIA.get(n, '')} ({sum(outcomes)}/{len(outcomes)} tests)")
