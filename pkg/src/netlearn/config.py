"""Run configuration loading: INI or JSON files, environment overrides.

Sections/keys:
  [graph]   family = dicycle(20) | edge list file via ``file = path``
  [signal]  kind = symmetric_binary | royal_bounded | mad_king_asym
            q = 0.7               (symmetric_binary only)
            jitter_width = 0.0
  [profile] name = myopic | gossip | royal_family | mad_king
            tie = zero | one | jitter
            delta = 1.0           (mad_king)
            lam = 0.99            (mad_king)
  [sim]     horizon, replicates, discount, tail_window, seed, engine
  [output]  trace_csv = path, report_json = path

Environment variables NETLEARN_<SECTION>_<KEY> override file values, e.g.
NETLEARN_SIM_SEED=7.
"""
from __future__ import annotations

import configparser
import json
import os
from dataclasses import dataclass
from typing import Optional

from . import graphs, signals
from .dynamics import SimConfig

ENV_PREFIX = "NETLEARN"

_DEFAULTS = {
    "graph": {"family": "", "file": ""},
    "signal": {"kind": "symmetric_binary", "q": "0.7", "jitter_width": "0.0"},
    "profile": {"name": "myopic", "tie": "zero", "delta": "1.0",
                "lam": "0.99"},
    "sim": {"horizon": "30", "replicates": "100", "discount": "0.9",
            "tail_window": "5", "seed": "0", "engine": "exact"},
    "output": {"trace_csv": "", "report_json": ""},
}


@dataclass
class RunConfig:
    """Fully resolved run description."""

    graph_family: str
    graph_file: str
    signal_kind: str
    signal_q: float
    jitter_width: float
    profile_name: str
    tie_mode: str
    delta: float
    lam: float
    sim: SimConfig
    trace_csv: str
    report_json: str

    def build_graph(self):
        if self.graph_file:
            with open(self.graph_file) as f:
                return graphs.from_edge_list_text(f.read())
        if not self.graph_family:
            raise ValueError("config needs graph.family or graph.file")
        return graphs.generate(graphs.parse_family_string(self.graph_family),
                               seed=self.sim.master_seed)

    def build_signal_model(self):
        if self.signal_kind == "symmetric_binary":
            m = signals.symmetric_binary(self.signal_q)
        else:
            m = signals.builtin_family(self.signal_kind)
        if self.jitter_width > 0:
            m = signals.SignalModel(m.atoms, jitter_width=self.jitter_width)
        return m

    def build_profile(self, g, m):
        from . import strategies
        from .beliefs import TieBreaker
        kwargs = {"tie_breaker": TieBreaker(self.tie_mode)}
        if self.profile_name == "gossip" and self.jitter_width > 0:
            kwargs["jitter_width"] = self.jitter_width
        if self.profile_name == "mad_king":
            kwargs.update(delta=self.delta, lam=self.lam)
        return strategies.make_profile(self.profile_name, g, m, **kwargs)


def _merged(sections: dict) -> dict:
    data = {s: dict(kv) for s, kv in _DEFAULTS.items()}
    for s, kv in sections.items():
        if s not in data:
            raise ValueError(f"unknown config section [{s}]")
        for k, v in kv.items():
            if k not in data[s]:
                raise ValueError(f"unknown key {k!r} in section [{s}]")
            data[s][k] = str(v)
    return data


def _apply_env(data: dict, environ=None) -> dict:
    environ = os.environ if environ is None else environ
    for s, kv in data.items():
        for k in kv:
            name = f"{ENV_PREFIX}_{s.upper()}_{k.upper()}"
            if name in environ:
                kv[k] = environ[name]
    return data


def load_config(path: Optional[str] = None, overrides: Optional[dict] = None,
                environ=None) -> RunConfig:
    """Load an INI or JSON config file; missing path = all defaults.

    ``overrides`` is a {section: {key: value}} mapping applied last (used by
    CLI flags such as --seed).
    """
    sections = {}
    if path:
        if path.endswith(".json"):
            with open(path) as f:
                sections = json.load(f)
        else:
            cp = configparser.ConfigParser()
            if not cp.read(path):
                raise FileNotFoundError(path)
            sections = {s: dict(cp.items(s)) for s in cp.sections()}
    data = _apply_env(_merged(sections), environ)
    if overrides:
        for s, kv in overrides.items():
            for k, v in kv.items():
                if v is not None:
                    data[s][k] = str(v)
    sim = SimConfig(
        horizon=int(data["sim"]["horizon"]),
        replicates=int(data["sim"]["replicates"]),
        discount=float(data["sim"]["discount"]),
        tail_window=int(data["sim"]["tail_window"]),
        master_seed=int(data["sim"]["seed"]),
        engine=data["sim"]["engine"],
    )
    return RunConfig(
        graph_family=data["graph"]["family"],
        graph_file=data["graph"]["file"],
        signal_kind=data["signal"]["kind"],
        signal_q=float(data["signal"]["q"]),
        jitter_width=float(data["signal"]["jitter_width"]),
        profile_name=data["profile"]["name"],
        tie_mode=data["profile"]["tie"],
        delta=float(data["profile"]["delta"]),
        lam=float(data["profile"]["lam"]),
        sim=sim,
        trace_csv=data["output"]["trace_csv"],
        report_json=data["output"]["report_json"],
    )
