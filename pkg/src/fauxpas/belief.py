"""Exact Bayesian beliefs over histories, and beliefs about other agents' beliefs.

Every agent conditions the same generative prior; agents differ only in the
observation sequences they condition on. Non-utterance percepts are
deterministic projections of a history (likelihood 0 or 1). Utterance
percepts carry the literal-listener likelihood when a belief is given
utterance semantics.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from numbers import Real
from typing import Callable, Hashable, Sequence

from .dist import Dist, expectation
from .errors import ZeroPosterior
from .posg import (History, Observation, Script, WorldModel, action_ref, enumerate_histories,
                   observation_sequence)

MERGE_TOL = 1e-9


@dataclass(frozen=True)
class QueryVariable:
    """A named, total function from histories to values."""

    name: str
    extractor: Callable[[History], Hashable] = field(compare=False)

    def __call__(self, history: History) -> Hashable:
        return self.extractor(history)


def state_variable(name: str, step: int = -1, label: str | None = None) -> QueryVariable:
    """Value of state variable ``name`` in the state at index ``step``."""
    return QueryVariable(label or f"{name}@{step}", lambda h: h.states[step][name])


def action_variable(agent: str, step: int, label: str | None = None) -> QueryVariable:
    """Name of the action ``agent`` took at ``step``."""
    return QueryVariable(label or f"{agent}.action@{step}", lambda h: h.action(step, agent))


@dataclass(frozen=True, eq=False)
class BeliefState:
    """A distribution over histories held by ``owner``.

    ``prior`` points at the unconditioned shared prior this belief descends
    from (``None`` for the prior itself). ``semantics``, when set, makes
    utterance percepts update by the literal-listener likelihood.
    """

    owner: str | None
    dist: Dist[History]
    conditioned_on: tuple[Observation, ...] = ()
    semantics: object | None = None
    prior: "BeliefState | None" = None
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def root(self) -> "BeliefState":
        return self if self.prior is None else self.prior

    @property
    def horizon(self) -> int:
        return self.dist.support[0].horizon

    def __len__(self) -> int:
        return len(self.dist)


def prior_belief(world: WorldModel, horizon: int, script: Script | None = None,
                 owner: str | None = None, semantics=None) -> BeliefState:
    """The unconditioned belief induced by the world's generative prior."""
    return BeliefState(owner, enumerate_histories(world, horizon, script), semantics=semantics)


def _utterance_ref(semantics) -> str | None:
    if semantics is None:
        return None
    return action_ref(semantics.speaker)


def observation_likelihood(history: History, agent: str, observed: Sequence[Observation],
                           start: int = 0, semantics=None) -> Real:
    """Probability that ``agent`` perceives ``observed`` from step ``start`` on in ``history``.

    Percepts must match the history's projection exactly. A heard utterance
    with a denotation additionally weighs the history by its literal
    likelihood; the speaker does not update on her own words.
    """
    ref = _utterance_ref(semantics) if semantics is not None and agent != semantics.speaker else None
    lik = 1
    for i, z in enumerate(observed):
        if history.observations[start + i][agent] != z:
            return 0
        heard = z.get(ref) if ref is not None else None
        if heard is not None and heard in semantics.predicates:
            lik = lik * semantics.likelihood(heard, history)
    return lik


def condition(belief: BeliefState, observed: Sequence[Observation],
              agent: str | None = None) -> BeliefState:
    """Bayes-update ``belief`` on the next ``len(observed)`` observations of ``agent``.

    Observations are aligned to the steps after those the belief is already
    conditioned on, so conditioning twice equals conditioning once on the
    concatenation.
    """
    agent = agent or belief.owner
    if agent is None:
        raise ValueError("conditioning needs an observing agent")
    if belief.conditioned_on and belief.owner not in (None, agent):
        raise ValueError(f"belief of {belief.owner!r} cannot be conditioned on {agent!r}'s observations")
    observed = tuple(observed)
    start = len(belief.conditioned_on)
    if start + len(observed) > belief.horizon:
        raise ValueError("more observations than steps in the history horizon")
    if not observed:
        return BeliefState(agent, belief.dist, belief.conditioned_on, belief.semantics, belief.prior)

    key = (agent, observed)
    if belief.prior is None and key in belief._cache:
        return belief._cache[key]
    posterior = belief.dist.reweight(
        lambda h: observation_likelihood(h, agent, observed, start, belief.semantics))
    if posterior is None:
        raise ZeroPosterior(f"no history is consistent with {agent!r} observing {list(observed)}")
    result = BeliefState(agent, posterior, belief.conditioned_on + observed, belief.semantics,
                         belief.root)
    if belief.prior is None:
        belief._cache[key] = result
    return result


def belief_from_history(prior: BeliefState, history: History, agent: str,
                        steps: int) -> BeliefState:
    """What ``agent`` believes after the first ``steps`` observations of ``history``."""
    return condition(prior.root, observation_sequence(history, agent)[:steps], agent)


def marginal(belief: BeliefState, variable: QueryVariable) -> Dist:
    """Distribution of ``variable`` under the belief."""
    return belief.dist.map(variable.extractor)


def induced_beliefs(belief: BeliefState, other: str, steps: int | None = None):
    """``(history, mass, other's belief)`` for every history the owner entertains.

    Each hypothesized history fixes the other agent's observation sequence,
    hence exactly one belief for them.
    """
    if other == belief.owner:
        raise ValueError("other agent must differ from the belief's owner")
    steps = len(belief.conditioned_on) if steps is None else steps
    return [(h, p, belief_from_history(belief, h, other, steps)) for h, p in belief.dist.items()]


def other_agent_belief(belief: BeliefState, other: str, variable: QueryVariable, value: Hashable,
                       steps: int | None = None) -> Dist:
    """The owner's distribution over ``other``'s probability that ``variable == value``.

    ``steps`` is how many of the other's observations they are assumed to
    have made; it defaults to the owner's own count.
    """
    pairs = [(marginal(b, variable).prob(value), p) for _, p, b in induced_beliefs(belief, other, steps)]
    return Dist.from_weights(pairs, merge_tol=MERGE_TOL)


def nested_expectation(belief: BeliefState, other: str, variable: QueryVariable, value: Hashable,
                       steps: int | None = None) -> Real:
    """Owner's expectation of the other's belief that ``variable == value``."""
    return expectation(other_agent_belief(belief, other, variable, value, steps))


__all__ = [
    "BeliefState", "QueryVariable", "action_variable", "belief_from_history", "condition",
    "expectation", "induced_beliefs", "marginal", "nested_expectation", "observation_likelihood",
    "other_agent_belief", "prior_belief", "state_variable",
]
