"""Posterior computation for repeated-action games under a known pure
strategy profile.

The exact engine enumerates every joint atom assignment, replays the profile
forward, and sums the probability mass of assignments consistent with the
observed neighbor history.  The Monte Carlo engine replaces the enumeration
with likelihood weighting.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Optional, Tuple

import numpy as np

from .signals import logistic

DEFAULT_BUDGET = 10_000_000
TIE_TOL = 1e-12

__all__ = [
    "BudgetExceededError",
    "InconsistentHistoryError",
    "DegenerateEstimateError",
    "HistoryView",
    "BeliefState",
    "YDecomposition",
    "TieBreaker",
    "TieLog",
    "best_response",
    "exact_posterior",
    "mc_posterior",
    "y_decomposition",
    "lookahead_certainty",
    "outcome_distribution",
    "simulate_actions",
    "history_of",
    "view_from_actions",
]


class BudgetExceededError(RuntimeError):
    """Joint atom space too large for exact enumeration; use mc_posterior."""


class InconsistentHistoryError(ValueError):
    """The observed history has zero probability under the profile."""


class DegenerateEstimateError(RuntimeError):
    """Every Monte Carlo particle was inconsistent with the history."""


@dataclass(frozen=True)
class HistoryView:
    """What agent ``agent`` knows at time ``t``: its own signal atom and the
    actions of its closed neighborhood in rounds [0, t), stored round-major
    in the canonical (sorted) neighbor order."""

    agent: int
    t: int
    atom: int
    observed: Tuple[tuple, ...]

    def __post_init__(self):
        if len(self.observed) != self.t:
            raise ValueError("observed history length must equal t")


@dataclass(frozen=True)
class BeliefState:
    posterior: float
    time: int
    stderr: Optional[float] = None

    @property
    def log_odds(self) -> float:
        return math.log(self.posterior / (1.0 - self.posterior))


@dataclass(frozen=True)
class YDecomposition:
    y: float
    z0: float
    z: float


class TieLog:
    """Mutable tie-event counter threaded through trace generation."""

    def __init__(self):
        self.count = 0

    def add(self, k=1):
        self.count += k


@dataclass(frozen=True)
class TieBreaker:
    """Resolution rule for posteriors at exactly 1/2."""

    mode: str = "zero"

    def __post_init__(self):
        if self.mode not in ("zero", "one", "jitter"):
            raise ValueError(f"unknown tie-breaker mode {self.mode!r}")

    def resolve(self, jitter: float = 0.0, width: float = 0.0) -> int:
        if self.mode == "zero":
            return 0
        if self.mode == "one":
            return 1
        return 1 if (width > 0 and jitter < width / 2.0) else 0


def best_response(belief, tie_breaker: TieBreaker = TieBreaker("zero"),
                  tie_log: Optional[TieLog] = None,
                  jitter: float = 0.0, width: float = 0.0) -> int:
    """MAP action for a posterior; ties are resolved by the breaker and
    counted when a log is supplied."""
    p = belief.posterior if isinstance(belief, BeliefState) else float(belief)
    if p > 0.5 + TIE_TOL:
        return 1
    if p < 0.5 - TIE_TOL:
        return 0
    if tie_log is not None:
        tie_log.add()
    return tie_breaker.resolve(jitter, width)


# ---------------------------------------------------------------------------
# forward simulation helpers

def history_of(g, actions, i: int, t: int):
    """Round-major history tuple of agent i's closed neighborhood over
    [0, t); ``actions`` is round-major (list of per-agent tuples)."""
    nbrs = g.closed_nbrs(i)
    return tuple(tuple(actions[tau][j] for j in nbrs) for tau in range(t))


def simulate_actions(g, profile, atoms, horizon: int, tie_log=None):
    """Replay ``profile`` for ``horizon`` rounds given a full atom
    assignment.  Returns the round-major action list."""
    actions = []
    for t in range(horizon):
        row = tuple(
            profile.action(i, atoms[i], history_of(g, actions, i, t), tie_log)
            for i in range(g.n))
        actions.append(row)
    return actions


def view_from_actions(g, actions, atoms, agent: int, t: int) -> HistoryView:
    return HistoryView(agent, t, atoms[agent],
                       history_of(g, actions, agent, t))


def _check_budget(n_free: int, k: int, budget: int):
    if k ** n_free > budget:
        raise BudgetExceededError(
            f"{k}^{n_free} joint assignments exceed the budget of {budget}; "
            "use mc_posterior instead")


def _consistent_masses(g, m, profile, view: HistoryView, budget: int):
    """Yield (atoms, w0, w1) over assignments consistent with the view.

    The viewing agent's atom is clamped to the observed one; weights are the
    joint signal masses under each state (the agent's own atom mass
    included)."""
    n, k = g.n, m.k
    others = [j for j in range(n) if j != view.agent]
    _check_budget(len(others), k, budget)
    p0 = m.probs(0)
    p1 = m.probs(1)
    own0 = m.atom_prob(view.atom, 0)
    own1 = m.atom_prob(view.atom, 1)
    nbrs = g.closed_nbrs(view.agent)
    for combo in product(range(k), repeat=len(others)):
        atoms = [0] * n
        atoms[view.agent] = view.atom
        for j, a in zip(others, combo):
            atoms[j] = a
        actions = simulate_actions(g, profile, atoms, view.t)
        ok = all(
            tuple(actions[tau][j] for j in nbrs) == view.observed[tau]
            for tau in range(view.t))
        if not ok:
            continue
        w0 = own0
        w1 = own1
        for a in combo:
            w0 *= p0[a]
            w1 *= p1[a]
        yield atoms, w0, w1


def exact_posterior(g, m, profile, view: HistoryView,
                    budget: int = DEFAULT_BUDGET) -> BeliefState:
    """P(S=1 | own signal, observed neighbor actions) by full enumeration.

    Requires a pure (deterministic) profile.  The uniform prior on the state
    cancels in the ratio."""
    w0 = w1 = 0.0
    for _, a0, a1 in _consistent_masses(g, m, profile, view, budget):
        w0 += a0
        w1 += a1
    total = w0 + w1
    if total <= 0.0:
        raise InconsistentHistoryError(
            "observed history has zero probability under this profile")
    return BeliefState(w1 / total, view.t)


def mc_posterior(g, m, profile, view: HistoryView, particles: int,
                 rng) -> BeliefState:
    """Likelihood-weighting estimate of the exact posterior.

    For each state, ``particles`` joint assignments are drawn from the
    conditional signal law (own atom clamped); the weight of a particle is
    the indicator that the replayed history matches the observation.
    """
    if particles < 1:
        raise ValueError("particles must be >= 1")
    n = g.n
    others = [j for j in range(n) if j != view.agent]
    nbrs = g.closed_nbrs(view.agent)
    own = (m.atom_prob(view.atom, 0), m.atom_prob(view.atom, 1))
    hits = [0, 0]
    for s in (0, 1):
        draw = m.sample_atoms(rng, particles * len(others), s) if others else None
        for p_i in range(particles):
            atoms = [0] * n
            atoms[view.agent] = view.atom
            for idx, j in enumerate(others):
                atoms[j] = int(draw[p_i * len(others) + idx])
            actions = simulate_actions(g, profile, atoms, view.t)
            ok = all(
                tuple(actions[tau][j] for j in nbrs) == view.observed[tau]
                for tau in range(view.t))
            hits[s] += ok
    if hits[0] == 0 and hits[1] == 0:
        raise DegenerateEstimateError(
            "all particles inconsistent with the observed history")
    # masses m_s = P(own atom | s) * empirical consistency rate
    rate = [hits[s] / particles for s in (0, 1)]
    m0 = own[0] * rate[0]
    m1 = own[1] * rate[1]
    post = m1 / (m0 + m1)
    # delta-method standard error with an Agresti-style variance floor so a
    # zero observed variance never reports false certainty
    var = []
    for s in (0, 1):
        r = (hits[s] + 0.5) / (particles + 1.0)
        var.append(r * (1.0 - r) / particles)
    d1 = own[1] * m0 / (m0 + m1) ** 2
    d0 = own[0] * m1 / (m0 + m1) ** 2
    se = math.sqrt((d1 ** 2) * var[1] + (d0 ** 2) * var[0])
    return BeliefState(post, view.t, stderr=se)


class _ClampedProfile:
    """Wrapper forcing one agent to replay a fixed action sequence; all other
    agents follow the base profile."""

    def __init__(self, base, agent, action_seq):
        self.base = base
        self.agent = agent
        self.seq = tuple(action_seq)

    def action(self, i, atom, hist, tie_log=None):
        t = len(hist)
        if i == self.agent:
            if t >= len(self.seq):
                raise IndexError("clamped sequence too short")
            return self.seq[t]
        return self.base.action(i, atom, hist, tie_log)


def y_decomposition(g, m, profile, view: HistoryView,
                    budget: int = DEFAULT_BUDGET) -> YDecomposition:
    """Split the posterior log-odds into the history term Y and the private
    term Z_0; the identity Z = Y + Z_0 holds to 1e-9 on the exact engine."""
    z = exact_posterior(g, m, profile, view, budget).log_odds
    z0 = m.atoms[view.atom].z
    if view.t == 0:
        return YDecomposition(0.0, z0, z)
    nbrs = g.closed_nbrs(view.agent)
    self_pos = nbrs.index(view.agent)
    own_seq = tuple(view.observed[tau][self_pos] for tau in range(view.t))
    clamped = _ClampedProfile(profile, view.agent, own_seq)
    others = [j for j in range(g.n) if j != view.agent]
    _check_budget(len(others), m.k, budget)
    p0 = m.probs(0)
    p1 = m.probs(1)
    w0 = w1 = 0.0
    for combo in product(range(m.k), repeat=len(others)):
        atoms = [0] * g.n
        for j, a in zip(others, combo):
            atoms[j] = a
        actions = simulate_actions(g, clamped, atoms, view.t)
        ok = all(
            tuple(actions[tau][j] for j in nbrs) == view.observed[tau]
            for tau in range(view.t))
        if not ok:
            continue
        a0 = a1 = 1.0
        for a in combo:
            a0 *= p0[a]
            a1 *= p1[a]
        w0 += a0
        w1 += a1
    if w0 <= 0.0 or w1 <= 0.0:
        raise InconsistentHistoryError(
            "history carries zero mass under one of the states")
    return YDecomposition(math.log(w1 / w0), z0, z)


def outcome_distribution(g, m, profile, view: HistoryView,
                         budget: int = DEFAULT_BUDGET):
    """Distribution of the next observable neighbor-action row given the
    view.  Returns a list of (row, probability, extended_view)."""
    nbrs = g.closed_nbrs(view.agent)
    masses = {}
    total = 0.0
    for atoms, w0, w1 in _consistent_masses(g, m, profile, view, budget):
        actions = simulate_actions(g, profile, atoms, view.t + 1)
        row = tuple(actions[view.t][j] for j in nbrs)
        masses[row] = masses.get(row, 0.0) + w0 + w1
        total += w0 + w1
    if total <= 0.0:
        raise InconsistentHistoryError("view has zero mass")
    out = []
    for row, w in sorted(masses.items()):
        ext = HistoryView(view.agent, view.t + 1, view.atom,
                          view.observed + (row,))
        out.append((row, w / total, ext))
    return out


class _MyopicDeviation:
    """Profile equal to ``base`` except that one agent plays the exact
    myopic best response from time ``start_t`` onward."""

    def __init__(self, g, m, base, agent, start_t,
                 tie_breaker=TieBreaker("zero"), budget=DEFAULT_BUDGET):
        self.g = g
        self.m = m
        self.base = base
        self.agent = agent
        self.start_t = start_t
        self.tie_breaker = tie_breaker
        self.budget = budget
        self._cache = {}

    def action(self, i, atom, hist, tie_log=None):
        t = len(hist)
        if i != self.agent or t < self.start_t:
            return self.base.action(i, atom, hist, tie_log)
        key = (atom, hist)
        if key not in self._cache:
            view = HistoryView(i, t, atom, hist)
            try:
                post = exact_posterior(self.g, self.m, self, view,
                                       self.budget)
                act = best_response(post, self.tie_breaker)
            except InconsistentHistoryError:
                act = 0  # off-path completion; see MyopicExactProfile
            self._cache[key] = act
        return self._cache[key]


def lookahead_certainty(g, m, profile, view: HistoryView, ell_max: int = 3,
                        budget: int = DEFAULT_BUDGET):
    """Expected posterior certainty (|P(S=1|F) - 1/2|) ell rounds ahead,
    under the deviation where the viewing agent plays myopically from the
    view's time onward.  Returns a tuple of length ell_max + 1; the sequence
    is nondecreasing (submartingale property, checked in tests)."""
    dev = _MyopicDeviation(g, m, profile, view.agent, view.t, budget=budget)
    nbrs = g.closed_nbrs(view.agent)
    horizon = view.t + ell_max
    totals = [0.0] * (ell_max + 1)
    norm = 0.0
    post_cache = {}
    for atoms, w0, w1 in _consistent_masses(g, m, dev, view, budget):
        actions = simulate_actions(g, dev, atoms, horizon)
        for s, w in ((0, w0), (1, w1)):
            if w <= 0.0:
                continue
            norm += w
            for ell in range(ell_max + 1):
                tt = view.t + ell
                hist = tuple(
                    tuple(actions[tau][j] for j in nbrs) for tau in range(tt))
                key = (view.atom, hist)
                if key not in post_cache:
                    v = HistoryView(view.agent, tt, view.atom, hist)
                    post_cache[key] = exact_posterior(g, m, dev, v, budget)
                totals[ell] += w * abs(post_cache[key].posterior - 0.5)
    if norm <= 0.0:
        raise InconsistentHistoryError("view has zero mass")
    return tuple(v / norm for v in totals)
