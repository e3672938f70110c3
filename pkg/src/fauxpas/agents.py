"""Speaker and listener models.

The speaker scores utterances by how they would move a literal listener's
beliefs about an informative variable and an evaluative variable, and picks
one by a softmax (Luce) rule. The sophisticated listener inverts that
speaker jointly over histories and speaker goals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from numbers import Real
from typing import Callable, Hashable, Mapping, Sequence

from .belief import BeliefState, QueryVariable, belief_from_history, condition, marginal
from .dist import Dist
from .errors import UndefinedSemantics, ZeroPosterior
from .posg import History, Observation, action_ref

DEFAULT_RATIONALITY = 3.0


@dataclass(frozen=True)
class UtteranceSemantics:
    """Truth-conditional predicates for a speaker's utterances, plus noise ``epsilon``."""

    predicates: Mapping[str, Callable[[History], bool]] = field(compare=False)
    epsilon: Real = 0.05
    speaker: str = "speaker"

    def __post_init__(self):
        if not 0 < self.epsilon < 0.5:
            raise ValueError(f"epsilon must lie in (0, 0.5), got {self.epsilon!r}")

    @property
    def utterances(self) -> tuple[str, ...]:
        return tuple(self.predicates)

    def holds(self, utterance: str, history: History) -> bool:
        predicate = self.predicates.get(utterance)
        if predicate is None:
            raise UndefinedSemantics(f"no denotation for utterance {utterance!r}")
        return bool(predicate(history))

    def likelihood(self, utterance: str, history: History) -> Real:
        return 1 - self.epsilon if self.holds(utterance, history) else self.epsilon


def literal_utterance_likelihood(utterance: str, semantics: UtteranceSemantics,
                                 history: History) -> Real:
    """Unnormalized literal-listener probability of hearing ``utterance`` in ``history``."""
    return semantics.likelihood(utterance, history)


@dataclass(frozen=True)
class SpeakerParams:
    theta_info: float
    theta_eval: float
    info_variable: QueryVariable
    eval_variable: QueryVariable
    eval_target: Hashable
    rationality: float = DEFAULT_RATIONALITY

    def __post_init__(self):
        if not self.rationality > 0:
            raise ValueError("rationality must be positive")

    @property
    def harmful(self) -> bool:
        return self.theta_eval < 0


@dataclass(frozen=True)
class SpeakerHypothesis:
    params: SpeakerParams
    prior_mass: float
    name: str = ""


@dataclass(frozen=True, eq=False)
class Exchange:
    """Who talks to whom, when, and against which shared prior.

    ``prior`` must carry the utterance semantics so that hearing an
    utterance updates by the literal likelihood. ``step`` is the index of
    the step at which the speaker talks.
    """

    prior: BeliefState
    speaker: str
    listener: str
    step: int
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.prior.semantics is None:
            raise ValueError("exchange prior needs utterance semantics")

    @property
    def semantics(self) -> UtteranceSemantics:
        return self.prior.semantics

    @property
    def utterances(self) -> tuple[str, ...]:
        return self.semantics.utterances

    def speaker_belief(self, history: History) -> BeliefState:
        """Speaker's belief just before talking, in ``history``."""
        return belief_from_history(self.prior, history, self.speaker, self.step)

    def listener_before(self, history: History) -> BeliefState:
        return belief_from_history(self.prior, history, self.listener, self.step)

    def heard(self, history: History, utterance: str) -> Observation:
        """Listener's observation at the utterance step, had ``utterance`` been said."""
        z = history.observations[self.step][self.listener]
        return z.with_percept(action_ref(self.speaker), utterance)

    def listener_after(self, history: History, utterance: str) -> BeliefState:
        before = self.listener_before(history)
        heard = self.heard(history, utterance)
        key = ("after", before.conditioned_on, heard)
        if key not in self._cache:
            self._cache[key] = condition(before, [heard], self.listener)
        return self._cache[key]


def delta_info(before: BeliefState, after: BeliefState, variable: QueryVariable,
               history: History) -> Real:
    """Change in the listener's belief in the informative variable's true value."""
    x = variable(history)
    return marginal(after, variable).prob(x) - marginal(before, variable).prob(x)


def delta_eval(before: BeliefState, after: BeliefState, variable: QueryVariable,
               target: Hashable) -> Real:
    """Change in the listener's belief that the evaluative variable takes its target value."""
    return marginal(after, variable).prob(target) - marginal(before, variable).prob(target)


def speaker_reward(params: SpeakerParams, d_info: Real, d_eval: Real) -> Real:
    return params.theta_info * d_info + params.theta_eval * d_eval


def expected_deltas(utterance: str, speaker_belief: BeliefState, params: SpeakerParams,
                    exchange: Exchange) -> tuple[Real, Real]:
    """Speaker's expected ``(delta_info, delta_eval)`` for saying ``utterance``.

    For each history the speaker entertains, the listener's before/after
    beliefs follow from that history's listener observations.
    """
    e_info = e_eval = 0
    for h, p in speaker_belief.dist.items():
        before = exchange.listener_before(h)
        key = ("deltas", before.conditioned_on, utterance, params.info_variable,
               params.info_variable(h), params.eval_variable, params.eval_target)
        if key not in exchange._cache:
            after = exchange.listener_after(h, utterance)
            exchange._cache[key] = (
                delta_info(before, after, params.info_variable, h),
                delta_eval(before, after, params.eval_variable, params.eval_target),
            )
        d_info, d_eval = exchange._cache[key]
        e_info = e_info + p * d_info
        e_eval = e_eval + p * d_eval
    return e_info, e_eval


def speaker_value(utterance: str, speaker_belief: BeliefState, params: SpeakerParams,
                  exchange: Exchange) -> Real:
    """Expected reward of ``utterance`` under the speaker's belief.

    The reward is linear in the deltas, so the expectation of the reward
    equals the reward of the expected deltas.
    """
    return speaker_reward(params, *expected_deltas(utterance, speaker_belief, params, exchange))


def luce_choice(values: Mapping[str, float], rationality: float) -> Dist[str]:
    """Softmax over ``values`` with inverse temperature ``rationality``."""
    if not values:
        raise ValueError("need at least one option")
    top = max(values.values())
    weights = {u: math.exp(rationality * (v - top)) for u, v in values.items()}
    total = math.fsum(weights.values())
    return Dist((u, w / total) for u, w in weights.items())


def speaker_policy(speaker_belief: BeliefState, params: SpeakerParams, exchange: Exchange,
                   utterances: Sequence[str] | None = None) -> Dist[str]:
    """Distribution over utterances, ``P(u)`` proportional to ``exp(rationality * V(u))``."""
    utterances = tuple(utterances or exchange.utterances)
    values = {u: float(speaker_value(u, speaker_belief, params, exchange)) for u in utterances}
    return luce_choice(values, params.rationality)


SpeakerModel = Callable[[BeliefState, SpeakerParams, History], Dist]


def sophisticated_listener(listener_prior: BeliefState, heard: str,
                           hypotheses: Sequence[SpeakerHypothesis], exchange: Exchange,
                           speaker_model: SpeakerModel | None = None) -> Dist:
    """Joint posterior over ``(history, speaker params)`` after hearing ``heard``.

    ``listener_prior`` is the listener's belief just before the utterance.
    ``speaker_model`` defaults to :func:`speaker_policy` applied to the
    speaker belief each history induces.
    """
    total_prior = math.fsum(float(hyp.prior_mass) for hyp in hypotheses)
    if not hypotheses or abs(total_prior - 1) > 1e-9:
        raise ValueError("hypothesis masses must sum to 1")
    policies: dict = {}
    weights = []
    for h, p in listener_prior.dist.items():
        b_s = exchange.speaker_belief(h)
        for hyp in hypotheses:
            if speaker_model is None:
                key = (id(b_s), hyp.params)
                if key not in policies:
                    policies[key] = speaker_policy(b_s, hyp.params, exchange)
                q = policies[key].prob(heard)
            else:
                q = speaker_model(b_s, hyp.params, h).prob(heard)
            weights.append(((h, hyp.params), p * hyp.prior_mass * q))
    if not any(w > 0 for _, w in weights):
        raise ZeroPosterior(f"{heard!r} has zero probability under every history and speaker goal")
    return Dist.from_weights(weights)


def hypothesis_posterior(joint: Dist) -> Dist:
    return joint.map(lambda pair: pair[1])


def history_posterior(joint: Dist) -> Dist:
    return joint.map(lambda pair: pair[0])
