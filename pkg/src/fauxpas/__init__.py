"""Exact inference over interaction histories for literal, intended and unintended meaning."""

from .agents import (Exchange, SpeakerHypothesis, SpeakerParams, UtteranceSemantics, delta_eval,
                     delta_info, expected_deltas, literal_utterance_likelihood, luce_choice,
                     sophisticated_listener, speaker_policy, speaker_reward, speaker_value)
from .belief import (BeliefState, QueryVariable, condition, expectation, marginal,
                     other_agent_belief, prior_belief)
from .dist import Dist
from .errors import (ExplosionGuard, FauxPasError, NoMatchingRule, SpecError, UndefinedSemantics,
                     UnknownKey, ZeroPosterior)
from .posg import (ActionDecl, ActionKind, AgentId, History, JointAction, JointObservation,
                   Observation, Pin, Script, State, TransitionRule, VariableDecl, WorldModel,
                   enumerate_histories, evaluate_denotation, observation_sequence, transition)
from .report import PredictionProfile, VariantComparison, compare_variants, prediction_profile
from .scenario import ScenarioSpec, build_world, load_scenario, script_variant, validate_spec

__version__ = "0.1.0"
