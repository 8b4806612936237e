"""Ensemble simulation of the repeated-action game.

A trace is one replicate: a hidden state, one signal atom per agent, and the
(n, horizon) action matrix produced by a profile.  Ensembles aggregate
learning/agreement frequencies over replicates with Wilson confidence
intervals.  Tail windows play the role of limiting action sets at a finite
horizon.

Determinism: replicate r of an ensemble with master seed s always uses
``np.random.default_rng([s, r])``, so results are independent of worker
count and replicate batching.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, asdict
from typing import Optional, Tuple

import numpy as np

from .beliefs import TieLog
from .stats import wilson_interval

__all__ = [
    "SimConfig",
    "Trace",
    "EnsembleTally",
    "EnsembleReport",
    "run_trace",
    "run_ensemble",
    "run_tally",
    "tail_action_set",
    "discounted_utility",
    "locality_coupling_test",
    "trace_rows",
    "write_trace_csv",
]


@dataclass(frozen=True)
class SimConfig:
    horizon: int = 30
    replicates: int = 100
    discount: float = 0.9
    tail_window: int = 5
    master_seed: int = 0
    engine: str = "exact"  # exact | sufficient-statistic | monte-carlo

    def __post_init__(self):
        if self.horizon < 1 or self.replicates < 1:
            raise ValueError("horizon and replicates must be >= 1")
        if not (0.0 < self.discount < 1.0):
            raise ValueError("discount must lie in (0, 1)")
        if not (1 <= self.tail_window <= self.horizon):
            raise ValueError("tail_window must lie in [1, horizon]")
        if self.engine not in ("exact", "sufficient-statistic", "monte-carlo"):
            raise ValueError(f"unknown engine {self.engine!r}")


@dataclass(frozen=True)
class Trace:
    state: int
    atoms: np.ndarray
    jitters: np.ndarray
    actions: np.ndarray  # (n, horizon) uint8
    tie_count: int
    replicate_index: int


def replicate_rng(master_seed: int, replicate_index: int):
    return np.random.default_rng([master_seed, replicate_index])


def run_trace(g, m, profile, config: SimConfig, replicate_index: int,
              inject=None) -> Trace:
    """Simulate one replicate.

    ``inject`` optionally overrides the random draw: a callable
    (rng, state, atoms) -> (state, atoms) applied after sampling, used to
    condition on rare events.
    """
    rng = replicate_rng(config.master_seed, replicate_index)
    state = int(rng.integers(0, 2))
    atoms = m.sample_atoms(rng, g.n, state)
    jitters = rng.uniform(0.0, m.jitter_width, size=g.n) \
        if m.jitter_width > 0 else np.zeros(g.n)
    if inject is not None:
        state, atoms = inject(rng, state, atoms)
        atoms = np.asarray(atoms)
    tie_log = TieLog()
    actions = profile.trace_actions(g, m, atoms, jitters, config.horizon,
                                    tie_log)
    return Trace(state, atoms, jitters, actions, tie_log.count,
                 replicate_index)


def tail_action_set(trace: Trace, agent: int, window: int) -> frozenset:
    """Set of actions the agent plays in the last ``window`` rounds -- the
    finite-horizon surrogate for its limiting action set."""
    return frozenset(int(a) for a in trace.actions[agent, -window:])


def discounted_utility(trace: Trace, agent: int, discount: float):
    """Realized discounted payoff (1-d) * sum d^t 1{A_t = S} over the
    simulated horizon, plus the maximum mass beyond it.

    Returns (value, remainder_bound): the infinite-horizon payoff lies in
    [value, value + remainder_bound].
    """
    T = trace.actions.shape[1]
    correct = (trace.actions[agent] == trace.state).astype(np.float64)
    weights = (1.0 - discount) * discount ** np.arange(T)
    return float(weights @ correct), float(discount ** T)


@dataclass
class EnsembleTally:
    """Mergeable sufficient statistics for an ensemble; addition over
    disjoint replicate sets is exact."""

    n_agents: int
    replicates: int = 0
    all_learn: int = 0
    agree: int = 0
    agent_learn: np.ndarray = None
    tie_events: int = 0

    def __post_init__(self):
        if self.agent_learn is None:
            self.agent_learn = np.zeros(self.n_agents, dtype=np.int64)

    def add_trace(self, trace: Trace, window: int):
        self.replicates += 1
        self.tie_events += trace.tie_count
        tail = trace.actions[:, -window:]
        has0 = (tail == 0).any(axis=1)
        has1 = (tail == 1).any(axis=1)
        # learned <=> the tail set is exactly {state}
        learned = (has1 == bool(trace.state)) & (has0 != bool(trace.state))
        self.agent_learn += learned
        self.all_learn += bool(learned.all())
        # agreement <=> every agent has the same tail action set
        self.agree += bool((has0 == has0[0]).all() and (has1 == has1[0]).all())

    def merge(self, other: "EnsembleTally"):
        if other.n_agents != self.n_agents:
            raise ValueError("tally shape mismatch")
        self.replicates += other.replicates
        self.all_learn += other.all_learn
        self.agree += other.agree
        self.agent_learn += other.agent_learn
        self.tie_events += other.tie_events
        return self


@dataclass(frozen=True)
class EnsembleReport:
    config: SimConfig
    n_agents: int
    replicates: int
    learning_freq: float
    learning_ci: Tuple[float, float]
    agreement_freq: float
    agreement_ci: Tuple[float, float]
    agent_learning: Tuple[float, ...]
    tie_rate: float
    graph_family: Optional[str] = None

    def to_dict(self):
        d = asdict(self)
        d["config"] = asdict(self.config)
        return d

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), indent=2, **kw)


def report_from_tally(tally: EnsembleTally, config: SimConfig,
                      graph_family=None) -> EnsembleReport:
    N = tally.replicates
    lf = tally.all_learn / N
    af = tally.agree / N
    return EnsembleReport(
        config=config,
        n_agents=tally.n_agents,
        replicates=N,
        learning_freq=lf,
        learning_ci=wilson_interval(tally.all_learn, N),
        agreement_freq=af,
        agreement_ci=wilson_interval(tally.agree, N),
        agent_learning=tuple(tally.agent_learn / N),
        tie_rate=tally.tie_events / (N * tally.n_agents * config.horizon),
        graph_family=graph_family,
    )


def run_tally(g, m, profile, config: SimConfig, replicate_indices,
              inject=None) -> EnsembleTally:
    """Tally a batch of replicates; used directly and by worker processes."""
    tally = EnsembleTally(g.n)
    for r in replicate_indices:
        trace = run_trace(g, m, profile, config, r, inject)
        tally.add_trace(trace, config.tail_window)
    return tally


def run_ensemble(g, m, profile, config: SimConfig, inject=None,
                 keep_traces: bool = False):
    """Run all replicates and summarize.  Returns (report, traces) where
    traces is None unless keep_traces is set."""
    tally = EnsembleTally(g.n)
    traces = [] if keep_traces else None
    for r in range(config.replicates):
        trace = run_trace(g, m, profile, config, r, inject)
        tally.add_trace(trace, config.tail_window)
        if keep_traces:
            traces.append(trace)
    report = report_from_tally(tally, config, g.family_tag)
    return report, traces


def trace_rows(trace: Trace, roles=None):
    """Flat (replicate, agent, role, t, action) rows for CSV export."""
    n, T = trace.actions.shape
    for i in range(n):
        role = roles.get(i, "") if roles else ""
        for t in range(T):
            yield (trace.replicate_index, i, role, t,
                   int(trace.actions[i, t]))


def write_trace_csv(path, traces, roles=None):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["replicate", "agent", "role", "t", "action"])
        for tr in traces:
            w.writerows(trace_rows(tr, roles))


def locality_coupling_test(g1, i1, g2, i2, r: int, profile1, profile2, m,
                           seed: int, horizon: Optional[int] = None) -> bool:
    """Check the finite-speed-of-information property: when the radius-(r+1)
    balls around (g1, i1) and (g2, i2) are isomorphic, coupling the signals
    through the witness map makes the roots' actions agree for all t <= r.

    Returns True when every checked round matches; raises ValueError when
    the balls are not isomorphic.
    """
    from .graphs import extract_ball, balls_isomorphic

    ok, mapping = balls_isomorphic(extract_ball(g1, i1, r + 1),
                                   extract_ball(g2, i2, r + 1))
    if not ok:
        raise ValueError("radius r+1 balls are not isomorphic")
    T = (r + 1) if horizon is None else horizon
    rng = np.random.default_rng(seed)
    state = int(rng.integers(0, 2))
    atoms1 = m.sample_atoms(rng, g1.n, state)
    extra = m.sample_atoms(rng, g2.n, state)
    atoms2 = np.array(extra)
    for v1, v2 in mapping.items():
        atoms2[v2] = atoms1[v1]
    jit1 = np.zeros(g1.n)
    jit2 = np.zeros(g2.n)
    a1 = profile1.trace_actions(g1, m, atoms1, jit1, T)
    a2 = profile2.trace_actions(g2, m, atoms2, jit2, T)
    upto = min(T, r + 1)
    return bool(np.array_equal(a1[i1, :upto], a2[i2, :upto]))
