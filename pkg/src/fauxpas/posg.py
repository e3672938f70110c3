"""Finite partially observable stochastic games and exhaustive history enumeration.

A :class:`WorldModel` bundles state variables, agents, per-agent actions,
guarded transition rules and priors. :func:`enumerate_histories` unrolls it
to a fixed horizon and returns every positive-mass history, which is the
hypothesis space for all downstream inference.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field, replace
from numbers import Real
from typing import Callable, Iterable, Mapping, Sequence, Union

from .dist import Dist
from .errors import ExplosionGuard, NoMatchingRule, UndefinedSemantics

DEFAULT_HISTORY_CAP = 10**6


def action_ref(agent: str) -> str:
    """Percept reference for an agent's action."""
    return f"action:{agent}"


def var_ref(name: str) -> str:
    """Percept reference for a state variable."""
    return f"var:{name}"


@dataclass(frozen=True)
class VariableDecl:
    name: str
    domain: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "domain", tuple(self.domain))
        if not self.domain:
            raise ValueError(f"variable {self.name!r} has an empty domain")
        if len(set(self.domain)) != len(self.domain):
            raise ValueError(f"variable {self.name!r} has duplicate values")


@dataclass(frozen=True)
class State:
    """A total assignment, stored in declared-variable order."""

    values: tuple[tuple[str, str], ...]

    @classmethod
    def of(cls, variables: Sequence[VariableDecl], assignment: Mapping[str, str]) -> "State":
        missing = [v.name for v in variables if v.name not in assignment]
        if missing:
            raise ValueError(f"state leaves {missing} unassigned")
        extra = set(assignment) - {v.name for v in variables}
        if extra:
            raise ValueError(f"state assigns undeclared variables {sorted(extra)}")
        for v in variables:
            if assignment[v.name] not in v.domain:
                raise ValueError(f"{assignment[v.name]!r} not in domain of {v.name!r}")
        return cls(tuple((v.name, assignment[v.name]) for v in variables))

    def __getitem__(self, name: str) -> str:
        for k, v in self.values:
            if k == name:
                return v
        raise KeyError(name)

    def as_dict(self) -> dict[str, str]:
        return dict(self.values)

    def set(self, **changes: str) -> "State":
        unknown = set(changes) - {k for k, _ in self.values}
        if unknown:
            raise KeyError(f"unknown variables {sorted(unknown)}")
        return State(tuple((k, changes.get(k, v)) for k, v in self.values))

    def __repr__(self) -> str:
        return "State(" + ", ".join(f"{k}={v}" for k, v in self.values) + ")"


@dataclass(frozen=True)
class AgentId:
    index: int
    label: str


class ActionKind(enum.Enum):
    PHYSICAL = "physical"
    UTTERANCE = "utterance"
    NOOP = "noop"


@dataclass(frozen=True)
class ActionDecl:
    agent: str
    name: str
    kind: ActionKind = ActionKind.PHYSICAL

    def __repr__(self) -> str:
        return f"{self.agent}:{self.name}"


@dataclass(frozen=True)
class JointAction:
    """One action per agent, in agent-index order."""

    actions: tuple[ActionDecl, ...]

    def __getitem__(self, agent: str) -> ActionDecl:
        for a in self.actions:
            if a.agent == agent:
                return a
        raise KeyError(agent)

    def name(self, agent: str) -> str:
        return self[agent].name

    def __repr__(self) -> str:
        return "(" + ", ".join(repr(a) for a in self.actions) + ")"


@dataclass(frozen=True)
class Observation:
    """A set of ``(reference, value)`` percepts; each reference at most once."""

    percepts: frozenset[tuple[str, str]] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "percepts", frozenset(self.percepts))
        refs = [r for r, _ in self.percepts]
        if len(refs) != len(set(refs)):
            raise ValueError(f"observation repeats a reference: {sorted(self.percepts)}")

    @classmethod
    def of(cls, **percepts: str) -> "Observation":
        return cls(frozenset(percepts.items()))

    def get(self, ref: str, default=None):
        for r, v in self.percepts:
            if r == ref:
                return v
        return default

    def without(self, ref: str) -> "Observation":
        return Observation(frozenset(p for p in self.percepts if p[0] != ref))

    def with_percept(self, ref: str, value: str) -> "Observation":
        return Observation(self.without(ref).percepts | {(ref, value)})

    def __repr__(self) -> str:
        return "{" + ", ".join(f"{r}={v}" for r, v in sorted(self.percepts)) + "}"


@dataclass(frozen=True)
class JointObservation:
    observations: tuple[tuple[str, Observation], ...]

    @classmethod
    def of(cls, mapping: Mapping[str, Observation]) -> "JointObservation":
        return cls(tuple(mapping.items()))

    def __getitem__(self, agent: str) -> Observation:
        for a, z in self.observations:
            if a == agent:
                return z
        raise KeyError(agent)


Outcomes = Union[Dist, Callable[[State, JointAction], Dist]]


@dataclass(frozen=True)
class TransitionRule:
    """Guarded outcome distribution over ``(next_state, joint_observation)``.

    ``outcomes`` is either a fixed :class:`Dist` or a function of the
    matched ``(state, action)`` returning one.
    """

    guard: Callable[[State, JointAction], bool]
    outcomes: Outcomes
    name: str = ""

    def apply(self, state: State, action: JointAction) -> Dist:
        if isinstance(self.outcomes, Dist):
            return self.outcomes
        return self.outcomes(state, action)


@dataclass(frozen=True)
class History:
    """``(s0, a0, z0, ..., s_{T-1}, a_{T-1}, z_{T-1}, s_T)`` with its prior weight.

    The weight is excluded from equality and hashing, so a history can key
    a distribution whose masses differ from its prior weight.
    """

    states: tuple[State, ...]
    actions: tuple[JointAction, ...] = ()
    observations: tuple[JointObservation, ...] = ()
    weight: Real = field(default=1, compare=False)

    def __post_init__(self):
        if len(self.states) != len(self.actions) + 1 or len(self.actions) != len(self.observations):
            raise ValueError("history must alternate states, actions and observations")

    @property
    def horizon(self) -> int:
        return len(self.actions)

    @property
    def final(self) -> State:
        return self.states[-1]

    def truncate(self, steps: int) -> "History":
        return History(self.states[: steps + 1], self.actions[:steps], self.observations[:steps],
                       self.weight)

    def action(self, step: int, agent: str) -> str:
        return self.actions[step].name(agent)


@dataclass(frozen=True)
class Pin:
    """Fixes one agent's action at one step.

    ``public`` pins are common knowledge: they shape every agent's prior.
    Private pins only shape the realized history.
    """

    step: int
    agent: str
    action: str
    public: bool = True


@dataclass(frozen=True)
class Script:
    pins: tuple[Pin, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "pins", tuple(self.pins))
        keys = [(p.step, p.agent) for p in self.pins]
        if len(keys) != len(set(keys)):
            raise ValueError("script pins the same (step, agent) twice")
        if any(p.step < 0 for p in self.pins):
            raise ValueError("script steps must be non-negative")

    @classmethod
    def of(cls, pins: Mapping[tuple[int, str], str], public: bool = True) -> "Script":
        return cls(tuple(Pin(s, a, name, public) for (s, a), name in pins.items()))

    def pinned(self, step: int, agent: str) -> str | None:
        for p in self.pins:
            if p.step == step and p.agent == agent:
                return p.action
        return None

    def public(self) -> "Script":
        return Script(tuple(p for p in self.pins if p.public))

    @property
    def length(self) -> int:
        """Number of steps the script reaches into."""
        return max((p.step + 1 for p in self.pins), default=0)


ActionPrior = Union[Dist, Sequence[Dist]]


@dataclass(frozen=True)
class WorldModel:
    variables: tuple[VariableDecl, ...]
    agents: tuple[AgentId, ...]
    actions: tuple[ActionDecl, ...]
    transitions: tuple[TransitionRule, ...]
    action_prior: Mapping[str, ActionPrior]
    initial_state_prior: Dist
    history_cap: int = DEFAULT_HISTORY_CAP

    def __post_init__(self):
        for name in ("variables", "agents", "actions", "transitions"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if [a.index for a in self.agents] != list(range(1, len(self.agents) + 1)):
            raise ValueError("agent indices must run 1..n in order")
        labels = [a.label for a in self.agents]
        if len(set(labels)) != len(labels):
            raise ValueError("agent labels must be unique")
        for label in labels:
            owned = self.actions_of(label)
            if not owned:
                raise ValueError(f"agent {label!r} owns no actions")
            if not any(a.kind is ActionKind.NOOP for a in owned):
                raise ValueError(f"agent {label!r} has no noop action")
            if label not in self.action_prior:
                raise ValueError(f"no action prior for agent {label!r}")
            priors = self.action_prior[label]
            for prior in ([priors] if isinstance(priors, Dist) else priors):
                names = {a.name for a in owned}
                bad = [x for x in prior.support if x not in names]
                if bad:
                    raise ValueError(f"action prior of {label!r} mentions unknown actions {bad}")
        decl = {v.name: v for v in self.variables}
        for s in self.initial_state_prior.support:
            if [k for k, _ in s.values] != list(decl):
                raise ValueError(f"initial state {s!r} does not follow the declared variables")

    @property
    def agent_labels(self) -> tuple[str, ...]:
        return tuple(a.label for a in self.agents)

    def actions_of(self, agent: str) -> tuple[ActionDecl, ...]:
        return tuple(a for a in self.actions if a.agent == agent)

    def action(self, agent: str, name: str) -> ActionDecl:
        for a in self.actions:
            if a.agent == agent and a.name == name:
                return a
        raise KeyError(f"agent {agent!r} has no action {name!r}")

    def action_prior_at(self, agent: str, step: int) -> Dist:
        prior = self.action_prior[agent]
        if isinstance(prior, Dist):
            return prior
        return prior[min(step, len(prior) - 1)]

    def joint_action(self, **names: str) -> JointAction:
        return JointAction(tuple(self.action(a, names[a]) for a in self.agent_labels))

    def state(self, **assignment: str) -> State:
        return State.of(self.variables, assignment)


def transition(world: WorldModel, state: State, action: JointAction) -> Dist:
    """Outcome distribution over ``(next_state, joint_observation)``."""
    matched = [r for r in world.transitions if r.guard(state, action)]
    if not matched:
        raise NoMatchingRule(f"no transition rule covers {state!r} under {action!r}")
    if len(matched) > 1:
        names = [r.name or "<anonymous>" for r in matched]
        raise ValueError(f"overlapping transition rules {names} for {state!r} under {action!r}")
    return matched[0].apply(state, action)


def _step_actions(world: WorldModel, step: int, script: Script):
    per_agent = []
    for label in world.agent_labels:
        pinned = script.pinned(step, label)
        if pinned is not None:
            per_agent.append([(world.action(label, pinned), 1)])
        else:
            prior = world.action_prior_at(label, step)
            per_agent.append([(world.action(label, n), p) for n, p in prior.items() if p > 0])
    for combo in itertools.product(*per_agent):
        mass = 1
        for _, p in combo:
            mass = mass * p
        yield JointAction(tuple(a for a, _ in combo)), mass


def enumerate_histories(world: WorldModel, horizon: int, script: Script | None = None,
                        cap: int | None = None) -> Dist[History]:
    """Every positive-mass history of length ``horizon``, weighted by its prior.

    Scripted steps take their pinned action with probability one; the
    others follow the per-agent action priors, independently across agents.
    Raises :class:`ExplosionGuard` once the frontier outgrows ``cap``.
    """
    if horizon < 0:
        raise ValueError("horizon must be non-negative")
    script = script or Script()
    if script.length > horizon:
        raise ValueError(f"script reaches step {script.length - 1} beyond horizon {horizon}")
    cap = world.history_cap if cap is None else cap

    frontier: list[tuple[History, Real]] = [
        (History((s,)), p) for s, p in world.initial_state_prior.items() if p > 0
    ]
    memo: dict[tuple[State, JointAction], Dist] = {}
    for step in range(horizon):
        joint = list(_step_actions(world, step, script))
        expanded = []
        for h, w in frontier:
            s = h.final
            for a, pa in joint:
                key = (s, a)
                if key not in memo:
                    memo[key] = transition(world, s, a)
                for (s_next, z), pt in memo[key].items():
                    mass = w * pa * pt
                    if mass > 0:
                        expanded.append((History(h.states + (s_next,), h.actions + (a,),
                                                 h.observations + (z,)), mass))
            if len(expanded) > cap:
                raise ExplosionGuard(
                    f"more than {cap} histories by step {step + 1}; tighten the script or shrink domains")
        frontier = expanded
    if len(frontier) > cap:
        raise ExplosionGuard(f"{len(frontier)} histories exceed the cap of {cap}")
    return Dist((replace(h, weight=w), w) for h, w in frontier)


def observation_sequence(history: History, agent: str) -> tuple[Observation, ...]:
    """The agent's private projection ``(z^i_0, ..., z^i_{T-1})``."""
    return tuple(z[agent] for z in history.observations)


def evaluate_denotation(utterance: str | ActionDecl, semantics, history: History) -> bool:
    """Truth value of an utterance's predicate on a history."""
    name = utterance.name if isinstance(utterance, ActionDecl) else utterance
    predicate = semantics.predicates.get(name)
    if predicate is None:
        raise UndefinedSemantics(f"no denotation for utterance {name!r}")
    return bool(predicate(history))


def fully_observable(world: WorldModel) -> WorldModel:
    """Copy of ``world`` in which every agent receives every agent's percepts."""

    def broadcast(rule: TransitionRule) -> TransitionRule:
        def outcomes(state, action):
            merged = []
            for (s_next, z), p in rule.apply(state, action).items():
                union = frozenset().union(*(o.percepts for _, o in z.observations))
                shared = Observation(union)
                merged.append(((s_next, JointObservation(tuple((a, shared) for a, _ in z.observations))), p))
            return Dist.from_weights(merged)

        return TransitionRule(rule.guard, outcomes, rule.name)

    return replace(world, transitions=tuple(broadcast(r) for r in world.transitions))


def iter_states(variables: Iterable[VariableDecl]) -> Iterable[State]:
    """All assignments in declared order (last variable varies fastest)."""
    variables = tuple(variables)
    for combo in itertools.product(*(v.domain for v in variables)):
        yield State(tuple(zip((v.name for v in variables), combo)))
