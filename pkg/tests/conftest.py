import random
from dataclasses import dataclass
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from fauxpas import scenario as sc
from fauxpas.agents import UtteranceSemantics
from fauxpas.dist import Dist
from fauxpas.posg import (ActionDecl, ActionKind, AgentId, JointObservation, Observation,
                          TransitionRule, VariableDecl, WorldModel, action_ref, iter_states)
from fauxpas.report import CompiledVariant


@pytest.fixture(scope="session")
def spec():
    return sc.ScenarioSpec()


@pytest.fixture(scope="session")
def world(spec):
    return sc.build_world(spec)


@pytest.fixture(scope="session")
def compiled(spec):
    return {v: CompiledVariant.build(spec, v) for v in sc.VARIANTS}


# -- random small worlds ------------------------------------------------------

@dataclass
class RandomWorld:
    """A random two-agent world plus the raw tables it was built from."""

    world: WorldModel
    initial: dict          # State -> Fraction
    action_prior: dict     # agent -> {action name: Fraction}
    table: dict            # (State, (name_a, name_b)) -> [(State, obs_a, obs_b, Fraction)]
    horizon: int
    semantics: UtteranceSemantics


def _weights(rng, n):
    raw = [rng.randint(1, 6) for _ in range(n)]
    total = sum(raw)
    return [Fraction(r, total) for r in raw]


def make_random_world(seed: int, horizon: int, public: bool = False) -> RandomWorld:
    rng = random.Random(seed)
    variables = tuple(VariableDecl(f"x{i}", tuple(f"v{j}" for j in range(rng.randint(1, 3))))
                      for i in range(rng.randint(1, 2)))
    states = list(iter_states(variables))
    support = rng.sample(states, rng.randint(1, len(states)))
    initial = dict(zip(support, _weights(rng, len(support))))

    names = {"a": ["noop", "act"], "b": ["noop", "u0", "u1"]}
    actions = (ActionDecl("a", "noop", ActionKind.NOOP), ActionDecl("a", "act"),
               ActionDecl("b", "noop", ActionKind.NOOP), ActionDecl("b", "u0", ActionKind.UTTERANCE),
               ActionDecl("b", "u1", ActionKind.UTTERANCE))
    action_prior = {}
    for agent, acts in names.items():
        chosen = rng.sample(acts, rng.randint(1, len(acts)))
        action_prior[agent] = dict(zip(chosen, _weights(rng, len(chosen))))

    def percepts(agent_actions):
        p = {}
        if rng.random() < 0.6:
            p["sig"] = f"s{rng.randint(0, 1)}"
        if rng.random() < 0.5:
            p[action_ref("b")] = agent_actions["b"]
        if rng.random() < 0.5:
            p[action_ref("a")] = agent_actions["a"]
        return Observation(frozenset(p.items()))

    table = {}
    for s in states:
        for na in names["a"]:
            for nb in names["b"]:
                k = rng.randint(1, 2)
                nexts = rng.sample(states, min(k, len(states)))
                outs = []
                for s2, w in zip(nexts, _weights(rng, len(nexts))):
                    acts = {"a": na, "b": nb}
                    za = percepts(acts)
                    outs.append((s2, za, za if public else percepts(acts), w))
                table[(s, (na, nb))] = outs

    def outcomes(s, a):
        rows = table[(s, (a.name("a"), a.name("b")))]
        return Dist(((s2, JointObservation((("a", za), ("b", zb)))), w) for s2, za, zb, w in rows)

    world = WorldModel(variables, (AgentId(1, "a"), AgentId(2, "b")), actions,
                       (TransitionRule(lambda s, a: True, outcomes, "table"),),
                       {ag: Dist(pr.items()) for ag, pr in action_prior.items()},
                       Dist(initial.items()))
    first = variables[0]
    semantics = UtteranceSemantics({
        "u0": lambda h: h.states[0][first.name] == first.domain[0],
        "u1": lambda h: h.states[-1][first.name] != first.domain[0],
    }, Fraction(1, 20), "b")
    return RandomWorld(world, initial, action_prior, table, horizon, semantics)


def brute_force_paths(rw: RandomWorld):
    """Enumerate (states, joint actions, obs_a, obs_b, weight) straight from the raw tables."""
    paths = [((s,), (), (), (), w) for s, w in rw.initial.items()]
    for _ in range(rw.horizon):
        nxt = []
        for states, acts, za, zb, w in paths:
            for na, pa in rw.action_prior["a"].items():
                for nb, pb in rw.action_prior["b"].items():
                    for s2, oa, ob, pt in rw.table[(states[-1], (na, nb))]:
                        nxt.append((states + (s2,), acts + ((na, nb),), za + (oa,), zb + (ob,),
                                    w * pa * pb * pt))
        paths = nxt
    return paths


@st.composite
def random_worlds(draw, max_histories=200, public=False):
    seed = draw(st.integers(0, 10**9))
    horizon = draw(st.integers(0, 3))
    rw = make_random_world(seed, horizon, public)
    n = len(rw.initial)
    for _ in range(horizon):
        n *= len(rw.action_prior["a"]) * len(rw.action_prior["b"]) * 2
    if n > max_histories:
        rw = make_random_world(seed, min(horizon, 1), public)
    return rw


# -- acceptance summary -------------------------------------------------------

_acceptance = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        why = ""
        if report.failed and hasattr(report.longrepr, "reprcrash"):
            why = report.longrepr.reprcrash.message.splitlines()[0]
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome, why))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome, why in _acceptance:
        line = f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}"
        terminalreporter.write_line(f"{line}  ({why})" if why else line)
