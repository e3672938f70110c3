"""Prediction profiles for scenario variants and their contrasts.

Each numeric field answers one of the seven survey questions Q1-Q7 put to
human readers of these stories; the mapping is also emitted with every run.

===================================================  ==========
field                                                question
===================================================  ==========
delta_eval                                           Q1
listener_expected_speaker_expected_delta_eval        Q2
listener_belief_speaker_wanted_harm                  Q3
listener_expected_speaker_knew_modification          Q4
speaker_knew_modification                            Q5
speaker_expected_delta_eval                          Q6
speaker_wanted_harm (the configured speaker's goal)  Q7
===================================================  ==========
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields

from .agents import (Exchange, SpeakerHypothesis, SpeakerParams, delta_eval, delta_info,
                     expected_deltas, hypothesis_posterior, sophisticated_listener)
from .belief import marginal, prior_belief
from .errors import ZeroPosterior
from .posg import enumerate_histories
from . import scenario as sc

TOL = 1e-6

Q_MAP = {
    "delta_eval": "Q1",
    "listener_expected_speaker_expected_delta_eval": "Q2",
    "listener_belief_speaker_wanted_harm": "Q3",
    "listener_expected_speaker_knew_modification": "Q4",
    "speaker_knew_modification": "Q5",
    "speaker_expected_delta_eval": "Q6",
    "speaker_wanted_harm": "Q7",
}


@dataclass(frozen=True)
class PredictionProfile:
    variant: str
    delta_info: float
    delta_eval: float
    speaker_expected_delta_info: float
    speaker_expected_delta_eval: float
    listener_expected_speaker_expected_delta_eval: float
    listener_belief_speaker_wanted_harm: float
    speaker_knew_modification: float
    listener_expected_speaker_knew_modification: float
    speaker_wanted_harm: float

    @property
    def faux_pas(self) -> bool:
        """Harm realized but not anticipated by the speaker."""
        return self.delta_eval < -TOL and abs(self.speaker_expected_delta_eval) < TOL

    @property
    def expected_insult(self) -> bool:
        """Harm realized and anticipated by the speaker."""
        return self.delta_eval < -TOL and self.speaker_expected_delta_eval < -TOL

    def numbers(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self) if f.name != "variant"}

    def to_dict(self) -> dict:
        d = asdict(self)
        d["faux_pas"] = self.faux_pas
        d["expected_insult"] = self.expected_insult
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PredictionProfile":
        return cls(**{f.name: d[f.name] for f in fields(cls)})


@dataclass(frozen=True)
class VariantComparison:
    shared: PredictionProfile
    diverging: PredictionProfile

    @property
    def contrasts(self) -> dict[str, float]:
        """Shared minus diverging, per numeric field."""
        a, b = self.shared.numbers(), self.diverging.numbers()
        return {k: a[k] - b[k] for k in a}

    def to_dict(self) -> dict:
        return {"shared": self.shared.to_dict(), "diverging": self.diverging.to_dict(),
                "contrasts": self.contrasts}


@dataclass(frozen=True, eq=False)
class CompiledVariant:
    """Everything needed to run inference on one variant of a scenario."""

    spec: sc.ScenarioSpec
    variant: str
    exchange: Exchange
    heard: str
    realized: object  # Dist[History]: scripted histories in which the utterance is true

    @classmethod
    def build(cls, spec: sc.ScenarioSpec, variant: str,
              history_cap: int | None = None) -> "CompiledVariant":
        world = sc.build_world(spec, history_cap)
        script = sc.script_variant(spec, variant)
        step, heard = sc.utterance_step(spec, variant)
        semantics = sc.build_semantics(spec, step)
        prior = prior_belief(world, spec.horizon, script.public(), semantics=semantics)
        exchange = Exchange(prior, sc.SPEAKER, sc.LISTENER, step)
        realized = enumerate_histories(world, spec.horizon, script).reweight(
            lambda h: semantics.holds(heard, h))
        if realized is None:
            raise ZeroPosterior(f"{heard!r} cannot be true in the {variant} script")
        return cls(spec, variant, exchange, heard, realized)


def prediction_profile(spec: sc.ScenarioSpec, variant: str, speaker_params: SpeakerParams | None = None,
                       hypotheses: tuple[SpeakerHypothesis, ...] | None = None,
                       history_cap: int | None = None) -> PredictionProfile:
    """Interactive-belief quantities after the variant's utterance.

    Each quantity is averaged over the realized histories (those consistent
    with the script in which the utterance is literally true); in the
    bundled scenarios every realized history gives both agents the same
    observations, so the average is over identical values.
    """
    cv = CompiledVariant.build(spec, variant, history_cap)
    ex, heard = cv.exchange, cv.heard
    params = speaker_params or sc.speaker_params(spec, ex.step)
    hyps = hypotheses or sc.hypotheses(spec, ex.step)
    modified = sc.listener_modified()

    acc = dict.fromkeys(f.name for f in fields(PredictionProfile) if f.name != "variant")
    for k in acc:
        acc[k] = 0.0
    for h, w in cv.realized.items():
        before, after = ex.listener_before(h), ex.listener_after(h, heard)
        b_s = ex.speaker_belief(h)
        e_info, e_eval = expected_deltas(heard, b_s, params, ex)

        nested_eval = nested_knew = 0.0
        for h2, p2 in after.dist.items():
            b_s2 = ex.speaker_belief(h2)
            nested_eval += p2 * expected_deltas(heard, b_s2, params, ex)[1]
            nested_knew += p2 * marginal(b_s2, modified).prob(sc.MODIFY)

        theta = hypothesis_posterior(sophisticated_listener(before, heard, hyps, ex))
        harm = sum(p for prm, p in theta.items() if prm.theta_eval < 0)

        values = {
            "delta_info": delta_info(before, after, params.info_variable, h),
            "delta_eval": delta_eval(before, after, params.eval_variable, params.eval_target),
            "speaker_expected_delta_info": e_info,
            "speaker_expected_delta_eval": e_eval,
            "listener_expected_speaker_expected_delta_eval": nested_eval,
            "listener_belief_speaker_wanted_harm": harm,
            "speaker_knew_modification": marginal(b_s, modified).prob(sc.MODIFY),
            "listener_expected_speaker_knew_modification": nested_knew,
            "speaker_wanted_harm": float(params.theta_eval < 0),
        }
        for k, v in values.items():
            acc[k] += w * float(v)
    return PredictionProfile(variant, **acc)


def compare_variants(spec: sc.ScenarioSpec, speaker_params: SpeakerParams | None = None,
                     hypotheses: tuple[SpeakerHypothesis, ...] | None = None,
                     variants: tuple[str, str] = ("shared", "diverging"),
                     history_cap: int | None = None) -> VariantComparison:
    first, second = (prediction_profile(spec, v, speaker_params, hypotheses, history_cap)
                     for v in variants)
    return VariantComparison(first, second)


def max_deviation(a: dict[str, float], b: dict[str, float]) -> float:
    """Largest absolute difference over the keys of ``a``."""
    return max((abs(a[k] - b[k]) for k in a), default=0.0) if a else math.nan
