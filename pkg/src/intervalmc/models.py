"""Labelled continuous-time Markov chains, reward structures, and their
interval-valued generalisation.

A chain is a dense rate matrix over a small state space (missions here stay
under ~40 states, so sparsity machinery is deliberately avoided).  Diagonal
entries are ignored on input, stored as zero, and never serialized; exit
rates are always derived from the off-diagonal row sums.  All types are
immutable after construction (arrays are copied and marked read-only), so
instances can be shared freely across threads.

The JSON document format is strict: unknown fields are rejected so that
typos in experiment configs fail loudly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterator, Mapping

import numpy as np

from .errors import (
    AbsorbingStateError,
    ModelError,
    OutOfIntervalError,
    ParseError,
)

# States are plain non-negative indices into their owning model.
StateId = int


def _frozen_array(values, shape, name):
    arr = np.array(values, dtype=float)
    if arr.shape != shape:
        raise ModelError(f"{name} has shape {arr.shape}, expected {shape}")
    arr.setflags(write=False)
    return arr


def _check_labels(labels, n):
    if len(labels) != n:
        raise ModelError(f"expected {n} label sets, got {len(labels)}")
    return tuple(frozenset(s) for s in labels)


@dataclass(frozen=True, eq=False)
class Ctmc:
    """A labelled CTMC: rate matrix, initial state, and atomic propositions.

    ``rates[i, j]`` is the transition rate from state ``i`` to ``j`` in
    events per time unit; the diagonal is forced to zero.  A state whose
    off-diagonal row sums to zero is absorbing, which is permitted and
    needed for terminal states.
    """

    rates: np.ndarray
    initial: StateId
    labels: tuple[frozenset[str], ...]

    def __post_init__(self):
        n = np.shape(self.rates)[0]
        rates = _frozen_array(self.rates, (n, n), "rates")
        off = rates[~np.eye(n, dtype=bool)]
        if not np.all(np.isfinite(off)) or np.any(off < 0):
            raise ModelError("off-diagonal rates must be finite and >= 0")
        if np.any(np.diag(rates) != 0):
            rates = rates.copy()
            np.fill_diagonal(rates, 0.0)
            rates.setflags(write=False)
        object.__setattr__(self, "rates", rates)
        object.__setattr__(self, "labels", _check_labels(self.labels, n))
        if not (0 <= self.initial < n):
            raise ModelError(f"initial state {self.initial} out of range")

    @property
    def state_count(self) -> int:
        return self.rates.shape[0]

    def states_with_label(self, label: str) -> np.ndarray:
        return np.array([label in ls for ls in self.labels], dtype=bool)

    def __eq__(self, other):
        return (
            isinstance(other, Ctmc)
            and self.initial == other.initial
            and self.labels == other.labels
            and np.array_equal(self.rates, other.rates)
        )


@dataclass(frozen=True, eq=False)
class RewardStructure:
    """Named reward structure over a chain.

    ``state_rewards[i]`` accrues per time unit spent in state ``i``;
    ``transition_rewards[i, j]`` is earned each time the ``i -> j``
    transition is taken.  Dimensions must match the owning model.
    """

    name: str
    state_rewards: np.ndarray
    transition_rewards: np.ndarray

    def __post_init__(self):
        n = np.shape(self.state_rewards)[0]
        sr = _frozen_array(self.state_rewards, (n,), "state_rewards")
        tr = _frozen_array(self.transition_rewards, (n, n), "transition_rewards")
        for arr, what in ((sr, "state"), (tr, "transition")):
            if not np.all(np.isfinite(arr)) or np.any(arr < 0):
                raise ModelError(f"{what} rewards must be finite and >= 0")
        object.__setattr__(self, "state_rewards", sr)
        object.__setattr__(self, "transition_rewards", tr)

    @classmethod
    def zeros(cls, name: str, state_count: int) -> "RewardStructure":
        return cls(name, np.zeros(state_count), np.zeros((state_count, state_count)))

    def __eq__(self, other):
        return (
            isinstance(other, RewardStructure)
            and self.name == other.name
            and np.array_equal(self.state_rewards, other.state_rewards)
            and np.array_equal(self.transition_rewards, other.transition_rewards)
        )


@dataclass(frozen=True, eq=False)
class IntervalCtmc:
    """A CTMC whose rates are closed intervals ``[lo, hi]``.

    Point rates are encoded as degenerate intervals (``lo == hi``).  Every
    entry must satisfy ``0 <= lo <= hi < inf``; intervals are independent
    per transition.
    """

    lo: np.ndarray
    hi: np.ndarray
    initial: StateId
    labels: tuple[frozenset[str], ...]

    def __post_init__(self):
        n = np.shape(self.lo)[0]
        lo = _frozen_array(self.lo, (n, n), "lo")
        hi = _frozen_array(self.hi, (n, n), "hi")
        mask = ~np.eye(n, dtype=bool)
        if np.any(lo[mask] < 0) or np.any(lo[mask] > hi[mask]):
            raise ModelError("interval bounds must satisfy 0 <= lo <= hi")
        if not np.all(np.isfinite(hi[mask])):
            raise ModelError("interval upper bounds must be finite")
        fixed = []
        for arr in (lo, hi):
            if np.any(np.diag(arr) != 0):
                arr = arr.copy()
                np.fill_diagonal(arr, 0.0)
                arr.setflags(write=False)
            fixed.append(arr)
        object.__setattr__(self, "lo", fixed[0])
        object.__setattr__(self, "hi", fixed[1])
        object.__setattr__(self, "labels", _check_labels(self.labels, n))
        if not (0 <= self.initial < n):
            raise ModelError(f"initial state {self.initial} out of range")

    @property
    def state_count(self) -> int:
        return self.lo.shape[0]

    def states_with_label(self, label: str) -> np.ndarray:
        return np.array([label in ls for ls in self.labels], dtype=bool)

    def __eq__(self, other):
        return (
            isinstance(other, IntervalCtmc)
            and self.initial == other.initial
            and self.labels == other.labels
            and np.array_equal(self.lo, other.lo)
            and np.array_equal(self.hi, other.hi)
        )

    @classmethod
    def from_point(cls, model: Ctmc) -> "IntervalCtmc":
        return cls(model.rates, model.rates, model.initial, model.labels)


@dataclass(frozen=True)
class RateObservation:
    """Running event count and exposure time for one transition rate.

    Singular-event rates keep ``count == 0`` by definition; only their
    exposure grows.
    """

    count: int = 0
    exposure: float = 0.0

    def __post_init__(self):
        if self.count < 0 or int(self.count) != self.count:
            raise ModelError("observation count must be a non-negative integer")
        if not (self.exposure >= 0.0) or not math.isfinite(self.exposure):
            raise ModelError("exposure must be finite and >= 0")


def exit_rate(model: Ctmc, s: StateId) -> float:
    """Total outgoing rate of ``s`` (zero for absorbing states)."""
    return float(model.rates[s].sum())


def exit_rates(model: Ctmc) -> np.ndarray:
    """Vector of total outgoing rates, one per state."""
    return model.rates.sum(axis=1)


def embedded_probs(model: Ctmc, s: StateId) -> np.ndarray:
    """Jump-chain distribution out of ``s``: each rate over the exit rate.

    Raises :class:`AbsorbingStateError` when ``s`` has no outgoing rate.
    """
    total = exit_rate(model, s)
    if total <= 0.0:
        raise AbsorbingStateError(f"state {s} is absorbing")
    return model.rates[s] / total


def interval_entries(model: IntervalCtmc) -> list[tuple[tuple[int, int], float, float]]:
    """Non-degenerate interval entries as ``((from, to), lo, hi)`` tuples."""
    rows, cols = np.nonzero(model.hi > model.lo)
    return [
        ((int(i), int(j)), float(model.lo[i, j]), float(model.hi[i, j]))
        for i, j in zip(rows, cols)
    ]


def instantiate(model: IntervalCtmc, point: Mapping[tuple[int, int], float] | None = None) -> Ctmc:
    """Fix every interval entry to a concrete rate and return the point chain.

    Degenerate entries may be omitted from ``point``; every non-degenerate
    entry must receive a value inside its interval, otherwise
    :class:`OutOfIntervalError` is raised.  Labels and the initial state
    carry over unchanged.
    """
    point = dict(point or {})
    rates = np.array(model.lo, dtype=float)
    for (i, j), value in point.items():
        lo, hi = model.lo[i, j], model.hi[i, j]
        if not (lo <= value <= hi):
            raise OutOfIntervalError(
                f"rate {value} for transition {i}->{j} outside [{lo}, {hi}]"
            )
        rates[i, j] = value
    for (i, j), lo, hi in interval_entries(model):
        if (i, j) not in point:
            raise OutOfIntervalError(
                f"no rate supplied for interval transition {i}->{j} [{lo}, {hi}]"
            )
    return Ctmc(rates, model.initial, model.labels)


def midpoint_instantiation(model: IntervalCtmc) -> Ctmc:
    """Point chain with every interval entry fixed at its midpoint."""
    point = {entry: (lo + hi) / 2.0 for entry, lo, hi in interval_entries(model)}
    return instantiate(model, point)


# --------------------------------------------------------------------------
# JSON document format
# --------------------------------------------------------------------------

_STATE_FIELDS = {"id", "labels"}
_TRANSITION_FIELDS = {"from", "to", "rate", "rewards"}
_TOP_FIELDS = {"states", "initial", "transitions", "state_rewards"}


def _reject_unknown(obj: dict, allowed: set[str], where: str):
    unknown = set(obj) - allowed
    if unknown:
        raise ParseError(f"unknown field(s) {sorted(unknown)}", where)


def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise ParseError(f"missing required field '{key}'", where)
    return obj[key]


def _as_number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError("expected a number", where)
    return float(value)


def load_model(text: str) -> tuple[IntervalCtmc, dict[str, RewardStructure]]:
    """Parse a model document into an interval chain plus its reward structures.

    Point rates load as degenerate intervals.  The format is strict: any
    field outside the schema raises :class:`ParseError` with a path.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", f"line {exc.lineno}") from exc
    if not isinstance(doc, dict):
        raise ParseError("top-level value must be an object", "$")
    _reject_unknown(doc, _TOP_FIELDS, "$")

    states = _require(doc, "states", "$")
    if not isinstance(states, list) or not states:
        raise ParseError("'states' must be a non-empty array", "states")
    ids = []
    labels_by_id = {}
    for idx, entry in enumerate(states):
        where = f"states[{idx}]"
        if not isinstance(entry, dict):
            raise ParseError("state must be an object", where)
        _reject_unknown(entry, _STATE_FIELDS, where)
        sid = _require(entry, "id", where)
        if isinstance(sid, bool) or not isinstance(sid, int) or sid < 0:
            raise ParseError("state id must be a non-negative integer", f"{where}.id")
        if sid in labels_by_id:
            raise ParseError(f"duplicate state id {sid}", f"{where}.id")
        raw_labels = entry.get("labels", [])
        if not isinstance(raw_labels, list) or any(
            not isinstance(l, str) or not l for l in raw_labels
        ):
            raise ParseError("labels must be non-empty strings", f"{where}.labels")
        ids.append(sid)
        labels_by_id[sid] = frozenset(raw_labels)
    if sorted(ids) != list(range(len(ids))):
        raise ParseError("state ids must be exactly 0..n-1", "states")
    n = len(ids)
    labels = tuple(labels_by_id[i] for i in range(n))

    initial = _require(doc, "initial", "$")
    if isinstance(initial, bool) or not isinstance(initial, int) or not (0 <= initial < n):
        raise ParseError("initial must be a valid state id", "initial")

    lo = np.zeros((n, n))
    hi = np.zeros((n, n))
    reward_names: set[str] = set()
    trans_rewards: dict[str, np.ndarray] = {}
    transitions = doc.get("transitions", [])
    if not isinstance(transitions, list):
        raise ParseError("'transitions' must be an array", "transitions")
    for idx, entry in enumerate(transitions):
        where = f"transitions[{idx}]"
        if not isinstance(entry, dict):
            raise ParseError("transition must be an object", where)
        _reject_unknown(entry, _TRANSITION_FIELDS, where)
        src = _require(entry, "from", where)
        dst = _require(entry, "to", where)
        for key, val in (("from", src), ("to", dst)):
            if isinstance(val, bool) or not isinstance(val, int) or not (0 <= val < n):
                raise ParseError("must be a valid state id", f"{where}.{key}")
        if src == dst:
            raise ParseError("self-loops are not allowed", where)
        rate = _require(entry, "rate", where)
        if isinstance(rate, dict):
            _reject_unknown(rate, {"lo", "hi"}, f"{where}.rate")
            r_lo = _as_number(_require(rate, "lo", f"{where}.rate"), f"{where}.rate.lo")
            r_hi = _as_number(_require(rate, "hi", f"{where}.rate"), f"{where}.rate.hi")
        else:
            r_lo = r_hi = _as_number(rate, f"{where}.rate")
        if not (0 <= r_lo <= r_hi) or not math.isfinite(r_hi):
            raise ParseError(
                f"rate bounds [{r_lo}, {r_hi}] must satisfy 0 <= lo <= hi < inf",
                f"{where}.rate",
            )
        lo[src, dst] = r_lo
        hi[src, dst] = r_hi
        rewards = entry.get("rewards", {})
        if not isinstance(rewards, dict):
            raise ParseError("'rewards' must be an object", f"{where}.rewards")
        for name, value in rewards.items():
            val = _as_number(value, f"{where}.rewards.{name}")
            if val < 0:
                raise ParseError("rewards must be >= 0", f"{where}.rewards.{name}")
            reward_names.add(name)
            trans_rewards.setdefault(name, np.zeros((n, n)))[src, dst] = val

    state_rewards: dict[str, np.ndarray] = {}
    raw_state_rewards = doc.get("state_rewards", {})
    if not isinstance(raw_state_rewards, dict):
        raise ParseError("'state_rewards' must be an object", "state_rewards")
    for name, mapping in raw_state_rewards.items():
        where = f"state_rewards.{name}"
        if not isinstance(mapping, dict):
            raise ParseError("must map state ids to numbers", where)
        vec = np.zeros(n)
        for key, value in mapping.items():
            try:
                sid = int(key)
            except ValueError:
                raise ParseError(f"bad state id '{key}'", where) from None
            if not (0 <= sid < n):
                raise ParseError(f"state id {sid} out of range", where)
            val = _as_number(value, f"{where}.{key}")
            if val < 0:
                raise ParseError("rewards must be >= 0", f"{where}.{key}")
            vec[sid] = val
        reward_names.add(name)
        state_rewards[name] = vec

    model = IntervalCtmc(lo, hi, initial, labels)
    structures = {
        name: RewardStructure(
            name,
            state_rewards.get(name, np.zeros(n)),
            trans_rewards.get(name, np.zeros((n, n))),
        )
        for name in sorted(reward_names)
    }
    return model, structures


def save_model(
    model: IntervalCtmc | Ctmc,
    rewards: Mapping[str, RewardStructure] | None = None,
) -> str:
    """Serialize a model (point chains become degenerate intervals).

    Rates round-trip bit-exactly: floats are written with Python's
    shortest exact decimal representation.
    """
    if isinstance(model, Ctmc):
        model = IntervalCtmc.from_point(model)
    rewards = dict(rewards or {})
    n = model.state_count
    doc: dict = {
        "states": [
            {"id": i, "labels": sorted(model.labels[i])} for i in range(n)
        ],
        "initial": model.initial,
        "transitions": [],
    }
    for i in range(n):
        for j in range(n):
            if i == j or (model.lo[i, j] == 0 and model.hi[i, j] == 0):
                continue
            entry: dict = {"from": i, "to": j}
            lo, hi = float(model.lo[i, j]), float(model.hi[i, j])
            entry["rate"] = lo if lo == hi else {"lo": lo, "hi": hi}
            tr = {
                name: float(rs.transition_rewards[i, j])
                for name, rs in sorted(rewards.items())
                if rs.transition_rewards[i, j] != 0
            }
            if tr:
                entry["rewards"] = tr
            doc["transitions"].append(entry)
    state_rewards = {
        name: {
            str(i): float(rs.state_rewards[i])
            for i in range(n)
            if rs.state_rewards[i] != 0
        }
        for name, rs in sorted(rewards.items())
        if np.any(rs.state_rewards != 0)
    }
    if state_rewards:
        doc["state_rewards"] = state_rewards
    return json.dumps(doc, indent=2)
