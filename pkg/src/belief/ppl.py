"""A small probabilistic programming language over finite distributions.

Programs are straight-line lists of statements built with
:class:`ProgramBuilder`::

    prog = (
        ProgramBuilder("posterior")
        .sample("dis", prior)
        .sample("t", channel, "dis")          # t ~ channel(dis)
        .condition(lambda t: t == "p", "t")
        .returns("dis")
    )

Every expression is an ordinary Python function together with the names of
the binders it reads.  Because each binder ranges over a finite set, the
rejection backend evaluates expressions once per distinct argument tuple
across a whole batch of traces instead of once per trace.

Two backends:

* :func:`infer_enumerate` walks every trace and returns the exact posterior.
* :func:`infer_reject` runs seeded rejection sampling.  Trace ``i`` draws its
  ``j``-th random choice from word ``i`` of Philox4x64 stream ``(seed, j)``,
  so results depend only on the seed and the number of traces, never on
  batching or the number of worker threads.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Iterator, Literal, Sequence

import numpy as np

from .channels import Channel
from .core import ONE, ZERO, Distribution, Predicate, Space, Value, render_value, uniform_draw
from .errors import DomainError, ResourceLimit, ZeroAccepted, ZeroValidity

MASK64 = (1 << 64) - 1
DEFAULT_TRACE_CAP = 1_000_000


# -- AST ----------------------------------------------------------------------


@dataclass(frozen=True)
class Infer:
    """A nested inference; sampling from it draws from the exact posterior."""

    program: "Program"


@dataclass(frozen=True)
class Sample:
    binder: str
    source: Distribution | Callable[..., Distribution] | Infer
    args: tuple[str, ...] = ()


@dataclass(frozen=True)
class Condition:
    test: Callable[..., bool]
    args: tuple[str, ...] = ()


@dataclass(frozen=True)
class Let:
    binder: str
    fn: Callable[..., Value]
    args: tuple[str, ...] = ()


@dataclass(frozen=True)
class Return:
    fn: Callable[..., Value]
    args: tuple[str, ...] = ()
    space: Space | None = None


Statement = Sample | Condition | Let


@dataclass(frozen=True)
class Program:
    name: str
    statements: tuple[Statement, ...]
    result: Return
    params: tuple[str, ...] = ()

    def __post_init__(self):
        bound = set(self.params)
        for st in self.statements:
            for a in st.args:
                if a not in bound:
                    raise DomainError(f"{self.name}: {a!r} is read before it is bound")
            if isinstance(st, Sample) and isinstance(st.source, Infer):
                missing = set(st.source.program.params) - set(st.args)
                if missing:
                    raise DomainError(f"{self.name}: nested inference needs {sorted(missing)}")
            if isinstance(st, (Sample, Let)):
                bound.add(st.binder)
        for a in self.result.args:
            if a not in bound:
                raise DomainError(f"{self.name}: result reads unbound {a!r}")

    @property
    def sample_count(self) -> int:
        return sum(isinstance(st, Sample) for st in self.statements)


def _identity(x):
    return x


class ProgramBuilder:
    """Chainable constructor for :class:`Program`."""

    def __init__(self, name: str = "program", params: Sequence[str] = ()):
        self.name = name
        self.params = tuple(params)
        self._statements: list[Statement] = []

    def sample(self, binder: str, source, *args: str) -> "ProgramBuilder":
        """Bind ``binder`` to a draw from ``source``.

        ``source`` is a :class:`Distribution`, a function of ``args`` returning
        one (a :class:`Channel` works), or an :class:`Infer` node whose
        parameters are passed from ``args``.
        """
        if isinstance(source, Program):
            source = Infer(source)
        if isinstance(source, Infer) and not args:
            args = source.program.params
        if isinstance(source, Distribution) and args:
            raise DomainError("a fixed distribution takes no arguments")
        self._statements.append(Sample(binder, source, tuple(args)))
        return self

    def condition(self, test: Callable[..., bool], *args: str) -> "ProgramBuilder":
        self._statements.append(Condition(test, tuple(args)))
        return self

    def observe(self, binder: str, value: Value) -> "ProgramBuilder":
        """Shorthand for ``condition(binder == value)``."""
        return self.condition(lambda v, _want=value: v == _want, binder)

    def let(self, binder: str, fn: Callable[..., Value], *args: str) -> "ProgramBuilder":
        self._statements.append(Let(binder, fn, tuple(args)))
        return self

    def returns(self, expr: str | Callable[..., Value], *args: str, space: Space | None = None) -> Program:
        if isinstance(expr, str):
            result = Return(_identity, (expr,), space)
        else:
            result = Return(expr, tuple(args), space)
        return Program(self.name, tuple(self._statements), result, self.params)


# -- exact enumeration ---------------------------------------------------------


@dataclass(frozen=True)
class Trace:
    """One complete execution path: the sampled values and their probabilities."""

    steps: tuple[tuple[str, Value, Fraction], ...]
    accepted: bool
    value: Value = None

    @property
    def weight(self) -> Fraction:
        w = ONE
        for _, _, p in self.steps:
            w *= p
        return w


class _InferCache:
    def __init__(self, trace_cap: int):
        self.trace_cap = trace_cap
        self._store: dict[tuple, Distribution] = {}

    def get(self, node: Infer, values: tuple) -> Distribution:
        key = (id(node.program), values)
        dist = self._store.get(key)
        if dist is None:
            env = dict(zip(node.program.params, values))
            dist = _enumerate_posterior(node.program, env, self)
            self._store[key] = dist
        return dist


def _resolve(st: Sample, env: dict, cache: _InferCache) -> Distribution:
    args = tuple(env[a] for a in st.args)
    if isinstance(st.source, Distribution):
        return st.source
    if isinstance(st.source, Infer):
        return cache.get(st.source, args)
    dist = st.source(*args)
    if not isinstance(dist, Distribution):
        raise DomainError(f"sample source for {st.binder!r} did not return a Distribution")
    return dist


def _walk(prog: Program, env0: dict, cache: _InferCache, record: bool):
    """Depth-first over all traces with an explicit stack (programs may be deep).

    Yields ``(accepted, value, weight, steps)``.
    """
    statements = prog.statements
    n = len(statements)
    stack = [(0, env0, ONE, ())]
    visited = 0
    while stack:
        pc, env, weight, steps = stack.pop()
        while pc < n:
            st = statements[pc]
            if isinstance(st, Sample):
                dist = _resolve(st, env, cache)
                branches = [(x, p) for x, p in dist.items() if p]
                visited += len(branches) - 1
                if visited > cache.trace_cap:
                    raise ResourceLimit(f"trace space of {prog.name}", visited, cache.trace_cap)
                # push alternatives in reverse so the first value is explored first
                for x, p in reversed(branches[1:]):
                    child = dict(env)
                    child[st.binder] = x
                    stack.append((pc + 1, child, weight * p, steps + ((st.binder, x, p),) if record else steps))
                x, p = branches[0]
                env = dict(env)
                env[st.binder] = x
                weight = weight * p
                if record:
                    steps = steps + ((st.binder, x, p),)
            elif isinstance(st, Condition):
                if not st.test(*(env[a] for a in st.args)):
                    yield False, None, weight, steps
                    break
            else:
                env = dict(env)
                env[st.binder] = st.fn(*(env[a] for a in st.args))
            pc += 1
        else:
            value = prog.result.fn(*(env[a] for a in prog.result.args))
            yield True, value, weight, steps


def _enumerate_posterior(prog: Program, env0: dict, cache: _InferCache) -> Distribution:
    totals: dict[Value, Fraction] = {}
    for accepted, value, weight, _ in _walk(prog, env0, cache, record=False):
        if accepted:
            totals[value] = totals.get(value, ZERO) + weight
    mass = sum(totals.values(), ZERO)
    if not mass:
        raise ZeroValidity(f"every trace of {prog.name} violates a condition")
    space = prog.result.space or Space(totals)
    return Distribution(space, {v: w / mass for v, w in totals.items()})


def infer_enumerate(prog: Program, env: dict | None = None, *, trace_cap: int = DEFAULT_TRACE_CAP) -> Distribution:
    """Exact posterior over return values by exhaustive enumeration."""
    env = dict(env or {})
    missing = set(prog.params) - set(env)
    if missing:
        raise DomainError(f"{prog.name} needs parameters {sorted(missing)}")
    return _enumerate_posterior(prog, env, _InferCache(trace_cap))


def enumerate_traces(prog: Program, env: dict | None = None, *, trace_cap: int = DEFAULT_TRACE_CAP) -> Iterator[Trace]:
    """Every execution path of ``prog``, accepted or not."""
    cache = _InferCache(trace_cap)
    for accepted, value, _, steps in _walk(prog, dict(env or {}), cache, record=True):
        yield Trace(steps, accepted, value)


# -- seeded randomness -----------------------------------------------------------


def stream_words(seed: int, stream: int, start: int, count: int) -> np.ndarray:
    """Words ``start .. start+count`` of the Philox4x64 stream keyed by ``(seed, stream)``."""
    bitgen = np.random.Philox(key=((stream & MASK64) << 64) | (seed & MASK64))
    block, offset = divmod(start, 4)
    if block:
        bitgen.advance(block)
    return bitgen.random_raw(count + offset)[offset:]


def uniform53(seed: int, stream: int, start: int, count: int) -> np.ndarray:
    """Uniform integers in ``[0, 2**53)``; compare against ``p * 2**53`` to flip ``p``."""
    return (stream_words(seed, stream, start, count) >> np.uint64(11)).astype(np.int64)


def draw_indices(dist: Distribution, u: np.ndarray) -> np.ndarray:
    """Map 53-bit uniforms to positions in ``dist.space`` (inverse CDF)."""
    thresholds = np.asarray(dist.thresholds53(), dtype=np.int64)
    return np.searchsorted(thresholds, u, side="right")


def flip_threshold(p: Fraction) -> int:
    return -((-p.numerator << 53) // p.denominator)


@dataclass(frozen=True)
class SamplerConfig:
    """Rejection-sampling settings.

    ``count`` says what ``sample_count`` counts: attempted traces, or accepted
    ones (then sampling stops at the ``sample_count``-th acceptance, giving up
    after ``max_attempts``).
    """

    seed: int = 0
    sample_count: int = 100_000
    count: Literal["attempts", "accepted"] = "attempts"
    chunk_size: int = 1 << 16
    workers: int = 1
    max_attempts: int | None = None

    def __post_init__(self):
        if not 0 <= self.seed <= MASK64:
            raise DomainError("seed must be an unsigned 64-bit integer")
        if self.sample_count < 1:
            raise DomainError("sample_count must be positive")
        if self.count not in ("attempts", "accepted"):
            raise DomainError(f"unknown count mode {self.count!r}")
        if self.chunk_size < 1 or self.workers < 1:
            raise DomainError("chunk_size and workers must be positive")

    @property
    def attempt_limit(self) -> int:
        if self.count == "attempts":
            return self.sample_count
        return self.max_attempts or max(1000 * self.sample_count, 1_000_000)


@dataclass
class SamplerReport:
    """Outcome of a rejection run: counts per accepted value plus bookkeeping."""

    accepted: int
    attempted: int
    frequencies: dict[Value, int]
    seed: int
    outcome_frequencies: dict[Value, int] | None = None
    space: Space | None = None

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.attempted if self.attempted else 0.0

    def distribution(self) -> Distribution:
        space = self.space or Space(self.frequencies)
        return Distribution(space, {v: Fraction(n, self.accepted) for v, n in self.frequencies.items()})

    def outcome_distribution(self) -> Distribution:
        if self.outcome_frequencies is None:
            raise DomainError("this sampler does not record outcomes")
        total = sum(self.outcome_frequencies.values())
        return Distribution(
            Space(self.outcome_frequencies),
            {v: Fraction(n, total) for v, n in self.outcome_frequencies.items()},
        )

    def frequency(self, value: Value) -> float:
        return self.frequencies.get(value, 0) / self.accepted

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "accepted": self.accepted,
            "attempted": self.attempted,
            "frequencies": {render_value(v): n for v, n in self.frequencies.items()},
            "seed": self.seed,
        }
        if self.outcome_frequencies is not None:
            out["outcome_frequencies"] = {render_value(v): n for v, n in self.outcome_frequencies.items()}
        return out


def _ordered_counts(values: Sequence[Value], space: Space | None) -> dict[Value, int]:
    counts = Counter(values)
    order = space.elements if space is not None else dict.fromkeys(values)
    return {v: counts[v] for v in order if counts[v] or space is not None}


def total_variation(p: Distribution, q: Distribution) -> float:
    """Total-variation distance; values missing from one side count as zero."""
    keys = dict.fromkeys(itertools.chain(p.space, q.space))
    pd, qd = p.as_dict(), q.as_dict()
    return float(sum(abs(pd.get(k, ZERO) - qd.get(k, ZERO)) for k in keys) / 2)


# -- batched rejection backend -------------------------------------------------------


class _Codes:
    """Interns values so binder columns can be integer arrays."""

    def __init__(self):
        self.values: list[Value] = []
        self._index: dict[Value, int] = {}

    def code(self, v: Value) -> int:
        i = self._index.get(v)
        if i is None:
            i = self._index[v] = len(self.values)
            self.values.append(v)
        return i


def _groups(columns: list[np.ndarray]):
    """Distinct rows of the stacked columns and, per trace, its row number."""
    if not columns:
        return [()], None
    if len(columns) == 1:
        uniq, inverse = np.unique(columns[0], return_inverse=True)
        return [(int(u),) for u in uniq], inverse
    stacked = np.stack(columns, axis=1)
    uniq, inverse = np.unique(stacked, axis=0, return_inverse=True)
    return [tuple(int(v) for v in row) for row in uniq], inverse.reshape(-1)


def _tabulate(fn: Callable, args: tuple[str, ...], env: dict, codes: _Codes, n: int, out_code: Callable):
    """Evaluate ``fn`` once per distinct argument tuple; returns a code per trace."""
    keys, inverse = _groups([env[a] for a in args])
    table = np.empty(len(keys), dtype=np.int64)
    for g, key in enumerate(keys):
        table[g] = out_code(fn(*(codes.values[c] for c in key)))
    if inverse is None:
        return np.full(n, table[0], dtype=np.int64)
    return table[inverse]


def _run_chunk(prog: Program, seed: int, start: int, stop: int, cache: _InferCache):
    """Run traces ``start .. stop`` together; returns accepted indices and values."""
    codes = _Codes()
    n = stop - start
    alive = np.arange(start, stop, dtype=np.int64)
    env: dict[str, np.ndarray] = {}
    stream = 0
    for st in prog.statements:
        if not len(alive):
            break
        if isinstance(st, Sample):
            u = uniform53(seed, stream, start, n)[alive - start]
            stream += 1
            drawn = np.empty(len(alive), dtype=np.int64)
            keys, inverse = _groups([env[a] for a in st.args])
            for g, key in enumerate(keys):
                vals = tuple(codes.values[c] for c in key)
                sub = _resolve(st, dict(zip(st.args, vals)), cache)
                lookup = np.array([codes.code(x) for x in sub.space], dtype=np.int64)
                mask = slice(None) if inverse is None else inverse == g
                drawn[mask] = lookup[draw_indices(sub, u[mask])]
            env[st.binder] = drawn
        elif isinstance(st, Condition):
            keys, inverse = _groups([env[a] for a in st.args])
            verdict = np.array(
                [bool(st.test(*(codes.values[c] for c in key))) for key in keys], dtype=bool
            )
            keep = np.full(len(alive), verdict[0]) if inverse is None else verdict[inverse]
            alive = alive[keep]
            env = {k: v[keep] for k, v in env.items()}
        else:
            env[st.binder] = _tabulate(st.fn, st.args, env, codes, len(alive), codes.code)
    if not len(alive):
        return alive, []
    result = _tabulate(prog.result.fn, prog.result.args, env, codes, len(alive), codes.code)
    return alive, [codes.values[c] for c in result]


def _chunks(total: int, size: int, first: int = 0):
    for a in range(first, total, size):
        yield a, min(a + size, total)


def _map_chunks(fn, ranges, workers: int):
    if workers == 1:
        return [fn(a, b) for a, b in ranges]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda r: fn(*r), ranges))


def infer_reject(prog: Program, cfg: SamplerConfig = SamplerConfig(), *, trace_cap: int = DEFAULT_TRACE_CAP) -> SamplerReport:
    """Rejection sampling: run independent traces and keep those meeting every condition.

    Nested inferences are solved exactly and then sampled.
    """
    if prog.params:
        raise DomainError(f"{prog.name} has free parameters {list(prog.params)}")
    cache = _InferCache(trace_cap)
    limit = cfg.attempt_limit
    target = cfg.sample_count if cfg.count == "accepted" else None
    accepted_values: list[Value] = []
    attempted = 0
    position = 0
    wave = cfg.chunk_size * cfg.workers
    while position < limit:
        ranges = list(_chunks(min(position + wave, limit), cfg.chunk_size, position))
        results = _map_chunks(lambda a, b: _run_chunk(prog, cfg.seed, a, b, cache), ranges, cfg.workers)
        for (a, b), (idx, values) in zip(ranges, results):
            if target is not None and len(accepted_values) + len(values) >= target:
                need = target - len(accepted_values)
                accepted_values.extend(values[:need])
                attempted = int(idx[need - 1]) + 1
                return _report(prog, accepted_values, attempted, cfg)
            accepted_values.extend(values)
            attempted = b
        position = ranges[-1][1]
    if not accepted_values:
        raise ZeroAccepted(attempted, f"{prog.name}: no trace accepted after {attempted} attempts")
    return _report(prog, accepted_values, attempted, cfg)


def _report(prog: Program, values: list, attempted: int, cfg: SamplerConfig) -> SamplerReport:
    space = prog.result.space
    return SamplerReport(len(values), attempted, _ordered_counts(values, space), cfg.seed, space=space)


# -- samplers for a single update and the door policies ---------------------------------


def sample_posterior_update(omega: Distribution, p: Predicate, cfg: SamplerConfig = SamplerConfig()) -> SamplerReport:
    """Draw ``x`` from ``omega`` and keep it with probability ``p(x)``."""
    if omega.space != p.space:
        raise DomainError("predicate and distribution live on different spaces")
    flips = np.array([flip_threshold(v) for v in p.values()], dtype=np.int64)
    labels = omega.space.elements

    def chunk(a, b):
        xs = draw_indices(omega, uniform53(cfg.seed, 0, a, b - a))
        keep = uniform53(cfg.seed, 1, a, b - a) < flips[xs]
        return np.arange(a, b)[keep], xs[keep]

    idx, xs = _collect(chunk, cfg)
    return SamplerReport(
        len(xs), idx, _ordered_counts([labels[i] for i in xs], omega.space), cfg.seed, space=omega.space
    )


def _collect(chunk, cfg: SamplerConfig):
    """Concatenate per-chunk accepted draws, stopping as ``cfg.count`` dictates.

    Returns ``(attempted, accepted positions)``.
    """
    limit = cfg.attempt_limit
    target = cfg.sample_count if cfg.count == "accepted" else None
    parts = []
    have = 0
    position = 0
    wave = cfg.chunk_size * cfg.workers
    while position < limit:
        ranges = list(_chunks(min(position + wave, limit), cfg.chunk_size, position))
        for (a, b), (idx, xs) in zip(ranges, _map_chunks(chunk, ranges, cfg.workers)):
            if target is not None and have + len(xs) >= target:
                need = target - have
                parts.append(xs[:need])
                return int(idx[need - 1]) + 1, np.concatenate(parts)
            parts.append(xs)
            have += len(xs)
        position = ranges[-1][1]
    xs = np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)
    if not len(xs):
        raise ZeroAccepted(limit)
    return limit, xs


def _check_policy_inputs(omega: Distribution, c: Channel, tau: Distribution) -> None:
    if omega.space != c.domain:
        raise DomainError("prior is not over the channel domain")
    if tau.space != c.codomain:
        raise DomainError("target is not over the channel codomain")


def _cycle(tau: Distribution, limit: int = 1_000_000) -> np.ndarray:
    """Deterministic target sequence hitting each outcome in proportion to ``tau``."""
    lcm = 1
    for w in tau.values():
        lcm = math.lcm(lcm, w.denominator)
    if lcm > limit:
        raise ResourceLimit("target cycle", lcm, limit)
    seq = [i for i, w in enumerate(tau.values()) for _ in range(int(w * lcm))]
    return np.array(seq, dtype=np.int64)


def _people(omega: Distribution, c: Channel, seed: int, a: int, b: int):
    """States and preferences of persons ``a .. b`` in the queue."""
    xs = draw_indices(omega, uniform53(seed, 0, a, b - a))
    u = uniform53(seed, 1, a, b - a)
    ys = np.empty(b - a, dtype=np.int64)
    for i, x in enumerate(omega.space):
        mask = xs == i
        if mask.any():
            ys[mask] = draw_indices(c(x), u[mask])
    return xs, ys


TargetMode = Literal["random", "cycle"]


def simulate_pearl_policy(
    omega: Distribution,
    c: Channel,
    tau: Distribution,
    cfg: SamplerConfig = SamplerConfig(),
    targets: TargetMode = "random",
) -> SamplerReport:
    """Doorman clicking the ticker after every person.

    Accepted states follow the Pearl update with ``tau`` read as a soft predicate.
    """
    _check_policy_inputs(omega, c, tau)
    cycle = _cycle(tau) if targets == "cycle" else None

    def chunk(a, b):
        xs, ys = _people(omega, c, cfg.seed, a, b)
        if cycle is None:
            ts = draw_indices(tau, uniform53(cfg.seed, 2, a, b - a))
        else:
            ts = cycle[np.arange(a, b) % len(cycle)]
        keep = ys == ts
        return np.arange(a, b)[keep], np.stack([xs[keep], ys[keep]], axis=1)

    attempted, pairs = _collect(chunk, cfg)
    return _policy_report(omega, c, pairs, attempted, cfg)


def simulate_jeffrey_policy(
    omega: Distribution,
    c: Channel,
    tau: Distribution,
    cfg: SamplerConfig = SamplerConfig(),
    targets: TargetMode = "random",
) -> SamplerReport:
    """Doorman clicking the ticker only after admitting someone.

    Accepted states follow Jeffrey's update; accepted preferences follow ``tau``.
    The run is inherently sequential, so ``cfg.workers`` is ignored.
    """
    _check_policy_inputs(omega, c, tau)
    pred = [sum((w * c(x)[y] for x, w in omega.items()), ZERO) for y in c.codomain]
    if any(t and not p for t, p in zip(tau.values(), pred)):
        raise ZeroValidity("the target names an outcome nobody in the queue has")
    cycle = _cycle(tau) if targets == "cycle" else None
    limit = cfg.attempt_limit
    wanted = cfg.sample_count if cfg.count == "accepted" else None
    n_targets = len(tau.space)

    target_block: np.ndarray = np.empty(0, dtype=np.int64)
    block_start = 0

    def target(k: int) -> int:
        nonlocal target_block, block_start
        if cycle is not None:
            return int(cycle[k % len(cycle)])
        if not block_start <= k < block_start + len(target_block):
            block_start = k
            target_block = draw_indices(tau, uniform53(cfg.seed, 2, k, cfg.chunk_size))
        return int(target_block[k - block_start])

    admitted_x: list[np.ndarray] = []
    admitted_y: list[np.ndarray] = []
    admissions = 0
    current = target(0)
    attempted = 0
    for a, b in _chunks(limit, cfg.chunk_size):
        xs, ys = _people(omega, c, cfg.seed, a, b)
        positions = [np.flatnonzero(ys == j) for j in range(n_targets)]
        pos = 0
        taken: list[int] = []
        while True:
            where = positions[current]
            k = np.searchsorted(where, pos)
            if k == len(where):
                break
            i = int(where[k])
            taken.append(i)
            admissions += 1
            pos = i + 1
            current = target(admissions)
            if wanted is not None and admissions == wanted:
                break
        taken_arr = np.asarray(taken, dtype=np.int64)
        admitted_x.append(xs[taken_arr])
        admitted_y.append(ys[taken_arr])
        attempted = a + pos if wanted is not None and admissions == wanted else b
        if wanted is not None and admissions == wanted:
            break
    if not admissions:
        raise ZeroAccepted(attempted)
    pairs = np.stack([np.concatenate(admitted_x), np.concatenate(admitted_y)], axis=1)
    return _policy_report(omega, c, pairs, attempted, cfg)


def _policy_report(omega, c, pairs: np.ndarray, attempted: int, cfg: SamplerConfig) -> SamplerReport:
    xs_labels, ys_labels = omega.space.elements, c.codomain.elements
    freq_x = np.bincount(pairs[:, 0], minlength=len(xs_labels))
    freq_y = np.bincount(pairs[:, 1], minlength=len(ys_labels))
    return SamplerReport(
        accepted=len(pairs),
        attempted=attempted,
        frequencies={x: int(n) for x, n in zip(xs_labels, freq_x)},
        seed=cfg.seed,
        outcome_frequencies={y: int(n) for y, n in zip(ys_labels, freq_y)},
        space=omega.space,
    )


# -- the three medical-test programs -------------------------------------------------


@dataclass(frozen=True)
class Programs:
    repeated: Program
    single: Program
    nested: Program

    def __iter__(self):
        return iter((self.repeated, self.single, self.nested))


def _targets(model) -> Distribution:
    # the evidence each of prog2/prog3 draws its single observation from
    if model.target is not None:
        return model.target
    if model.data is None or not model.data.size:
        raise DomainError("the model has neither a target nor data")
    return uniform_draw(list(model.data.elements()), model.channel.codomain)


def repeated_program(model) -> Program:
    """Condition on every data point separately (repeated Pearl)."""
    if model.data is None or not model.data.size:
        raise DomainError("the repeated-conditioning program needs a non-empty data multiset")
    b = ProgramBuilder("prog1").sample("dis", model.prior)
    for i, y in enumerate(model.data.elements()):
        b.sample(f"test{i}", model.channel, "dis").observe(f"test{i}", y)
    return b.returns("dis", space=model.states)


def single_program(model) -> Program:
    """Condition once on a randomly drawn target (single Pearl)."""
    return (
        ProgramBuilder("prog2")
        .sample("target", _targets(model))
        .sample("dis", model.prior)
        .sample("test", model.channel, "dis")
        .condition(lambda test, target: test == target, "test", "target")
        .returns("dis", space=model.states)
    )


def nested_program(model) -> Program:
    """Draw a target, then sample the exact posterior for it (Jeffrey)."""
    inner = (
        ProgramBuilder("prog3-inner", params=("target",))
        .sample("dis", model.prior)
        .sample("test", model.channel, "dis")
        .condition(lambda test, target: test == target, "test", "target")
        .returns("dis", space=model.states)
    )
    return (
        ProgramBuilder("prog3")
        .sample("target", _targets(model))
        .sample("dis", Infer(inner), "target")
        .returns("dis", space=model.states)
    )


def build_progs(model=None) -> Programs:
    """The three ways of learning from a list of test outcomes (disease model by default).

    * ``prog1`` conditions on every outcome separately (repeated Pearl).
    * ``prog2`` conditions once on a randomly chosen outcome (single Pearl).
    * ``prog3`` picks a random outcome and samples the exact posterior for
      it (Jeffrey).
    """
    from .models import disease_model

    model = model or disease_model()
    return Programs(repeated_program(model), single_program(model), nested_program(model))


PROGRAM_NAMES = ("prog1", "prog2", "prog3")
POLICY_NAMES = ("ticker-pearl", "ticker-jeffrey")
FIXTURE_NAMES = PROGRAM_NAMES + POLICY_NAMES


def program_by_name(name: str, model=None) -> Program:
    from .models import disease_model

    builders = dict(zip(PROGRAM_NAMES, (repeated_program, single_program, nested_program)))
    if name not in builders:
        raise DomainError(f"unknown program {name!r}; choose from {', '.join(PROGRAM_NAMES)}")
    return builders[name](model or disease_model())
