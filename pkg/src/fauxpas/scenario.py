"""Curtains-family scenarios: validation, serialization and compilation to a world.

A scenario has one listener who may act on one object, one speaker whose
private perception of the object the utterances talk about, and named
variants that script who was present when the listener acted.

Scenario files are JSON documents. :func:`serialize` writes the canonical
form (sorted keys, two-space indent, trailing newline), and
``validate_spec(json.loads(serialize(spec))) == spec`` holds for every spec.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields, replace
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

from .agents import SpeakerHypothesis, SpeakerParams, UtteranceSemantics
from .belief import QueryVariable, action_variable, state_variable
from .dist import Dist
from .errors import SpecError, UnknownKey
from .posg import (ActionDecl, ActionKind, AgentId, JointObservation, Observation, Pin, Script,
                   State, TransitionRule, VariableDecl, WorldModel, action_ref, var_ref)

LISTENER = "listener"
SPEAKER = "speaker"

# fixed action vocabulary; utterances are added from the scenario
NOOP = "noop"
MODIFY = "modify"
WAIT = "wait"
ENTER = "enter"            # arrives in time to witness the listener's action
ENTER_LATE = "enter_late"  # arrives once the step's action is over
MOVES = (ENTER, ENTER_LATE)

ABILITY = "ability"
PERCEPTION = "perception"
MODIFIED = "modified"
LISTENER_LOCATION = "listener_location"
SPEAKER_LOCATION = "speaker_location"
OBJECT_LOCATION = "object_location"

VARIANTS = ("shared", "diverging")
PRESETS = ("curtain", "story-prize", "wine-bottle", "cupcakes", "parking")
ALIASES = {"curtains": "curtain"}


@dataclass(frozen=True)
class AgentSpec:
    name: str
    locations: tuple[str, ...] = ("inside", "outside")
    start: str = "inside"


@dataclass(frozen=True)
class ObjectSpec:
    label: str = "curtains"
    location: str = "inside"
    modified: bool = False
    action: str = "put up new curtains"


@dataclass(frozen=True)
class Priors:
    ability_high: float = 0.90
    perception_good: float = 0.50
    modify: float = 0.05
    speaker_enters_early: float = 0.50


@dataclass(frozen=True)
class UtteranceSpec:
    name: str
    means: str  # "true", "false" or "<variable>=<value>"


@dataclass(frozen=True)
class SpeakerModelSpec:
    theta_info: float = 1.0
    theta_eval: float = 0.0
    rationality: float = 3.0


@dataclass(frozen=True)
class HypothesisSpec:
    name: str
    theta_info: float
    theta_eval: float
    prior: float


def _default_variants() -> dict[str, tuple[Pin, ...]]:
    def pins(arrival):
        return (Pin(0, LISTENER, MODIFY, public=False), Pin(0, SPEAKER, arrival, public=True),
                Pin(1, SPEAKER, "looks bad", public=False))
    return {"shared": pins(ENTER), "diverging": pins(ENTER_LATE)}


@dataclass(frozen=True)
class ScenarioSpec:
    name: str = "curtain"
    listener: AgentSpec = AgentSpec("Paul", start="inside")
    speaker: AgentSpec = AgentSpec("Lisa", start="outside")
    object: ObjectSpec = ObjectSpec()
    priors: Priors = Priors()
    utterances: tuple[UtteranceSpec, ...] = (
        UtteranceSpec("looks good", "perception=good"),
        UtteranceSpec("looks bad", "perception=bad"),
        UtteranceSpec("<nothing>", "true"),
    )
    epsilon: float = 0.05
    horizon: int = 2
    variants: Mapping[str, tuple[Pin, ...]] = field(default_factory=_default_variants)
    speaker_model: SpeakerModelSpec = SpeakerModelSpec()
    hypotheses: tuple[HypothesisSpec, ...] = (
        HypothesisSpec("benign", 1.0, 0.0, 0.9),
        HypothesisSpec("harmful", 1.0, -1.0, 0.1),
    )
    overrides: tuple[str, ...] = field(default=(), compare=False)

    def __hash__(self):
        return hash(serialize(self))


# -- validation ---------------------------------------------------------------

def _check_keys(raw: Mapping, allowed, path: str, strict: bool):
    if not isinstance(raw, Mapping):
        raise SpecError(path, f"expected an object, got {type(raw).__name__}")
    if strict:
        for key in raw:
            if key not in allowed:
                raise UnknownKey(f"{path}.{key}" if path else key, "unrecognized field")


def _join(path, key):
    return f"{path}.{key}" if path else key


def _number(value, path, lo=None, hi=None, lo_open=False, hi_open=False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SpecError(path, f"expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise SpecError(path, "must be finite")
    if lo is not None and (value < lo or (lo_open and value == lo)):
        raise SpecError(path, f"{value!r} is out of range")
    if hi is not None and (value > hi or (hi_open and value == hi)):
        raise SpecError(path, f"{value!r} is out of range")
    return value


def _string(value, path) -> str:
    if not isinstance(value, str) or not value:
        raise SpecError(path, f"expected a non-empty string, got {value!r}")
    return value


def _agent(raw, default: AgentSpec, path, strict) -> AgentSpec:
    _check_keys(raw, ("name", "locations", "start"), path, strict)
    locations = raw.get("locations", list(default.locations))
    if not isinstance(locations, list) or not locations:
        raise SpecError(_join(path, "locations"), "expected a non-empty list")
    locations = tuple(_string(x, _join(path, "locations")) for x in locations)
    if len(set(locations)) != len(locations):
        raise SpecError(_join(path, "locations"), "duplicate location")
    start = _string(raw.get("start", default.start), _join(path, "start"))
    if start not in locations:
        raise SpecError(_join(path, "start"), f"{start!r} is not one of {list(locations)}")
    return AgentSpec(_string(raw.get("name", default.name), _join(path, "name")), locations, start)


def _means(value, path) -> str:
    value = _string(value, path)
    if value in ("true", "false"):
        return value
    var, sep, val = value.partition("=")
    if not sep or var != PERCEPTION or val not in ("good", "bad"):
        raise SpecError(path, f"expected 'true', 'false' or 'perception=good|bad', got {value!r}")
    return value


def validate_spec(raw: Mapping[str, Any] | None, strict: bool = True) -> ScenarioSpec:
    """Validate a parsed scenario document and fill in defaults.

    Fields that differ from the default Curtains scenario are listed in
    ``overrides``. Raises :class:`SpecError` naming the offending field, or
    :class:`UnknownKey` for unrecognized fields when ``strict``.
    """
    raw = {} if raw is None else raw
    d = ScenarioSpec()
    _check_keys(raw, ("name", "agents", "object", "priors", "utterances", "epsilon", "horizon",
                      "variants", "speaker_model", "hypotheses"), "", strict)

    name = _string(raw.get("name", d.name), "name")

    agents = raw.get("agents", {})
    _check_keys(agents, (LISTENER, SPEAKER), "agents", strict)
    listener = _agent(agents.get(LISTENER, {}), d.listener, "agents.listener", strict)
    speaker = _agent(agents.get(SPEAKER, {}), d.speaker, "agents.speaker", strict)

    obj_raw = raw.get("object", {})
    _check_keys(obj_raw, ("label", "location", "modified", "action"), "object", strict)
    modified = obj_raw.get("modified", d.object.modified)
    if not isinstance(modified, bool):
        raise SpecError("object.modified", "expected true or false")
    obj = ObjectSpec(_string(obj_raw.get("label", d.object.label), "object.label"),
                     _string(obj_raw.get("location", d.object.location), "object.location"),
                     modified,
                     _string(obj_raw.get("action", d.object.action), "object.action"))
    if obj.location not in listener.locations or obj.location not in speaker.locations:
        raise SpecError("object.location", f"{obj.location!r} must be a location of both agents")
    if listener.start != obj.location:
        raise SpecError("agents.listener.start", "the listener must start with the object")

    pr_raw = raw.get("priors", {})
    _check_keys(pr_raw, [f.name for f in fields(Priors)], "priors", strict)
    priors = Priors(**{f.name: _number(pr_raw.get(f.name, getattr(d.priors, f.name)),
                                       f"priors.{f.name}", 0.0, 1.0)
                       for f in fields(Priors)})

    utt_raw = raw.get("utterances", [{"name": u.name, "means": u.means} for u in d.utterances])
    if not isinstance(utt_raw, list) or not utt_raw:
        raise SpecError("utterances", "expected a non-empty list")
    utterances = []
    for i, u in enumerate(utt_raw):
        p = f"utterances[{i}]"
        _check_keys(u, ("name", "means"), p, True)
        if "name" not in u or "means" not in u:
            raise SpecError(p, "needs both 'name' and 'means'")
        utterances.append(UtteranceSpec(_string(u["name"], p + ".name"), _means(u["means"], p + ".means")))
    names = [u.name for u in utterances]
    if len(set(names)) != len(names):
        raise SpecError("utterances", "duplicate utterance name")
    if set(names) & {WAIT, *MOVES}:
        raise SpecError("utterances", "utterance names clash with speaker actions")

    epsilon = _number(raw.get("epsilon", d.epsilon), "epsilon", 0.0, 0.5, lo_open=True, hi_open=True)
    horizon = raw.get("horizon", d.horizon)
    if isinstance(horizon, bool) or not isinstance(horizon, int) or horizon < 0:
        raise SpecError("horizon", f"expected a non-negative integer, got {horizon!r}")

    var_raw = raw.get("variants")
    if var_raw is None:
        variants = _default_variants()
    else:
        _check_keys(var_raw, VARIANTS, "variants", strict)
        variants = {}
        for vname in VARIANTS:
            if vname not in var_raw:
                raise SpecError("variants", f"missing variant {vname!r}")
            variants[vname] = _pins(var_raw[vname], f"variants.{vname}", set(names))
    for vname, pins in variants.items():
        reach = max((p.step + 1 for p in pins), default=0)
        if reach > horizon:
            raise SpecError(f"variants.{vname}", f"script reaches step {reach - 1} beyond horizon {horizon}")
        if sum(p.agent == SPEAKER and p.action in names for p in pins) != 1:
            raise SpecError(f"variants.{vname}", "needs exactly one scripted speaker utterance")

    sm_raw = raw.get("speaker_model", {})
    _check_keys(sm_raw, ("theta_info", "theta_eval", "rationality"), "speaker_model", strict)
    speaker_model = SpeakerModelSpec(
        _number(sm_raw.get("theta_info", d.speaker_model.theta_info), "speaker_model.theta_info"),
        _number(sm_raw.get("theta_eval", d.speaker_model.theta_eval), "speaker_model.theta_eval"),
        _number(sm_raw.get("rationality", d.speaker_model.rationality), "speaker_model.rationality",
                0.0, lo_open=True),
    )

    hyp_raw = raw.get("hypotheses", [vars(h) for h in d.hypotheses])
    if not isinstance(hyp_raw, list) or not hyp_raw:
        raise SpecError("hypotheses", "expected a non-empty list")
    hypotheses = []
    for i, h in enumerate(hyp_raw):
        p = f"hypotheses[{i}]"
        _check_keys(h, ("name", "theta_info", "theta_eval", "prior"), p, True)
        missing = {"name", "theta_info", "theta_eval", "prior"} - set(h)
        if missing:
            raise SpecError(p, f"missing {sorted(missing)}")
        hypotheses.append(HypothesisSpec(_string(h["name"], p + ".name"),
                                         _number(h["theta_info"], p + ".theta_info"),
                                         _number(h["theta_eval"], p + ".theta_eval"),
                                         _number(h["prior"], p + ".prior", 0.0, 1.0)))
    if abs(math.fsum(h.prior for h in hypotheses) - 1) > 1e-9:
        raise SpecError("hypotheses", "priors must sum to 1")

    spec = ScenarioSpec(name, listener, speaker, obj, priors, tuple(utterances), epsilon, horizon,
                        variants, speaker_model, tuple(hypotheses))
    return replace(spec, overrides=_diff(spec, d))


def _pins(raw, path, utterances) -> tuple[Pin, ...]:
    if not isinstance(raw, list):
        raise SpecError(path, "expected a list of pins")
    allowed = {LISTENER: {NOOP, MODIFY}, SPEAKER: {WAIT, *MOVES, *utterances}}
    pins = []
    for i, p in enumerate(raw):
        pp = f"{path}[{i}]"
        _check_keys(p, ("step", "agent", "action", "public"), pp, True)
        step = p.get("step")
        if isinstance(step, bool) or not isinstance(step, int) or step < 0:
            raise SpecError(pp + ".step", f"expected a non-negative integer, got {step!r}")
        agent = p.get("agent")
        if agent not in allowed:
            raise SpecError(pp + ".agent", f"expected 'listener' or 'speaker', got {agent!r}")
        action = p.get("action")
        if action not in allowed[agent]:
            raise SpecError(pp + ".action", f"{action!r} is not an action of the {agent}")
        public = p.get("public", False)
        if not isinstance(public, bool):
            raise SpecError(pp + ".public", "expected true or false")
        pins.append(Pin(step, agent, action, public))
    try:
        Script(tuple(pins))
    except ValueError as e:
        raise SpecError(path, str(e)) from None
    return tuple(pins)


def _flatten(doc, prefix=""):
    if isinstance(doc, dict):
        for k, v in doc.items():
            yield from _flatten(v, _join(prefix, k))
    else:
        yield prefix, doc


def _diff(spec: ScenarioSpec, default: ScenarioSpec) -> tuple[str, ...]:
    ours, theirs = dict(_flatten(to_document(spec))), dict(_flatten(to_document(default)))
    return tuple(k for k in ours if ours[k] != theirs.get(k))


# -- serialization ------------------------------------------------------------

def to_document(spec: ScenarioSpec) -> dict:
    agent = lambda a: {"name": a.name, "locations": list(a.locations), "start": a.start}
    return {
        "name": spec.name,
        "agents": {LISTENER: agent(spec.listener), SPEAKER: agent(spec.speaker)},
        "object": {"label": spec.object.label, "location": spec.object.location,
                   "modified": spec.object.modified, "action": spec.object.action},
        "priors": {f.name: getattr(spec.priors, f.name) for f in fields(Priors)},
        "utterances": [{"name": u.name, "means": u.means} for u in spec.utterances],
        "epsilon": spec.epsilon,
        "horizon": spec.horizon,
        "variants": {v: [{"step": p.step, "agent": p.agent, "action": p.action, "public": p.public}
                         for p in pins] for v, pins in spec.variants.items()},
        "speaker_model": {"theta_info": spec.speaker_model.theta_info,
                          "theta_eval": spec.speaker_model.theta_eval,
                          "rationality": spec.speaker_model.rationality},
        "hypotheses": [{"name": h.name, "theta_info": h.theta_info, "theta_eval": h.theta_eval,
                        "prior": h.prior} for h in spec.hypotheses],
    }


def serialize(spec: ScenarioSpec) -> str:
    return json.dumps(to_document(spec), indent=2, sort_keys=True) + "\n"


def parse(text: str, strict: bool = True) -> ScenarioSpec:
    try:
        raw = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as e:
        raise SpecError("", f"not valid JSON: {e}") from None
    return validate_spec(raw, strict)


def list_presets(user_dir: str | Path | None = None) -> list[str]:
    """Bundled preset names, then ``*.json`` scenarios found in ``user_dir``."""
    names = list(PRESETS)
    if user_dir is not None:
        names += sorted(p.stem for p in Path(user_dir).glob("*.json") if p.stem not in PRESETS)
    return names


def load_scenario(name_or_path: str | Path, strict: bool = True) -> ScenarioSpec:
    """Load a bundled preset by name, or a scenario file by path."""
    name_or_path = ALIASES.get(str(name_or_path), name_or_path)
    if str(name_or_path) in PRESETS:
        text = resources.files("fauxpas.scenarios").joinpath(f"{name_or_path}.json").read_text()
    else:
        path = Path(name_or_path)
        if not path.exists():
            raise SpecError("", f"no preset or file named {str(name_or_path)!r}")
        text = path.read_text()
    return parse(text, strict)


# -- compilation --------------------------------------------------------------

def _observe(spec: ScenarioSpec, s: State, a, s_next: State) -> JointObservation:
    """Co-location observation rule.

    An agent perceives its own action, the other agent's non-movement action
    if both were in one place while it happened, the other agent's location
    if they end up together, and (speaker only) how the object looks when
    she ends up next to it. Entering is perceived as the mover's new
    location, not as the manner of arrival.
    """
    here = s[LISTENER_LOCATION]
    spk = a.name(SPEAKER)
    speaker_present = s[SPEAKER_LOCATION] == here or spk == ENTER
    together_after = s_next[SPEAKER_LOCATION] == s_next[LISTENER_LOCATION]

    z_l = {action_ref(LISTENER): a.name(LISTENER)}
    z_s = {action_ref(SPEAKER): spk}
    if speaker_present:
        z_s[action_ref(LISTENER)] = a.name(LISTENER)
        if spk not in MOVES:
            z_l[action_ref(SPEAKER)] = spk
    if together_after:
        z_l[var_ref(SPEAKER_LOCATION)] = s_next[SPEAKER_LOCATION]
        z_s[var_ref(LISTENER_LOCATION)] = s_next[LISTENER_LOCATION]
    if s_next[SPEAKER_LOCATION] == s_next[OBJECT_LOCATION]:
        z_s[var_ref(PERCEPTION)] = s_next[PERCEPTION]
    return JointObservation(((LISTENER, Observation(frozenset(z_l.items()))),
                             (SPEAKER, Observation(frozenset(z_s.items())))))


def _effect(spec: ScenarioSpec):
    def outcomes(s: State, a) -> Dist:
        changes = {}
        if a.name(SPEAKER) in MOVES:
            changes[SPEAKER_LOCATION] = s[LISTENER_LOCATION]
        if a.name(LISTENER) == MODIFY:
            changes[MODIFIED] = "yes"
            # the new object looks good to the speaker iff the listener's ability is high
            changes[PERCEPTION] = "good" if s[ABILITY] == "high" else "bad"
        s_next = s.set(**changes)
        return Dist.point((s_next, _observe(spec, s, a, s_next)))
    return outcomes


def build_world(spec: ScenarioSpec, history_cap: int | None = None) -> WorldModel:
    """Compile a scenario into a two-agent world model."""
    locations = tuple(dict.fromkeys(spec.listener.locations + spec.speaker.locations))
    variables = (
        VariableDecl(ABILITY, ("high", "low")),
        VariableDecl(PERCEPTION, ("good", "bad")),
        VariableDecl(MODIFIED, ("no", "yes")),
        VariableDecl(LISTENER_LOCATION, spec.listener.locations),
        VariableDecl(SPEAKER_LOCATION, spec.speaker.locations),
        VariableDecl(OBJECT_LOCATION, locations),
    )
    agents = (AgentId(1, LISTENER), AgentId(2, SPEAKER))
    utterances = tuple(u.name for u in spec.utterances)
    actions = (
        ActionDecl(LISTENER, NOOP, ActionKind.NOOP),
        ActionDecl(LISTENER, MODIFY, ActionKind.PHYSICAL),
        ActionDecl(SPEAKER, WAIT, ActionKind.NOOP),
        ActionDecl(SPEAKER, ENTER, ActionKind.PHYSICAL),
        ActionDecl(SPEAKER, ENTER_LATE, ActionKind.PHYSICAL),
    ) + tuple(ActionDecl(SPEAKER, u, ActionKind.UTTERANCE) for u in utterances)

    pr = spec.priors
    action_prior = {
        LISTENER: (Dist.from_weights([(NOOP, 1 - pr.modify), (MODIFY, pr.modify)]), Dist.point(NOOP)),
        SPEAKER: (Dist.from_weights([(ENTER, pr.speaker_enters_early),
                                     (ENTER_LATE, 1 - pr.speaker_enters_early)]),
                  Dist.uniform(utterances)),
    }
    initial = Dist.from_weights(
        (State.of(variables, {
            ABILITY: ability, PERCEPTION: perception,
            MODIFIED: "yes" if spec.object.modified else "no",
            LISTENER_LOCATION: spec.listener.start, SPEAKER_LOCATION: spec.speaker.start,
            OBJECT_LOCATION: spec.object.location,
        }), pa * pp)
        for ability, pa in (("high", pr.ability_high), ("low", 1 - pr.ability_high))
        for perception, pp in (("good", pr.perception_good), ("bad", 1 - pr.perception_good))
    )
    effect = _effect(spec)
    transitions = (
        TransitionRule(lambda s, a: a.name(LISTENER) == MODIFY, effect, "listener acts on the object"),
        TransitionRule(lambda s, a: a.name(LISTENER) == NOOP, effect, "listener idles"),
    )
    world = WorldModel(variables, agents, actions, transitions, action_prior, initial)
    return world if history_cap is None else replace(world, history_cap=history_cap)


def script_variant(spec: ScenarioSpec, variant: str) -> Script:
    """The action script of a named variant (``shared`` or ``diverging``)."""
    if variant not in spec.variants:
        raise SpecError("variants", f"unknown variant {variant!r}")
    return Script(spec.variants[variant])


def utterance_step(spec: ScenarioSpec, variant: str) -> tuple[int, str]:
    """``(step, utterance)`` of the variant's scripted speaker utterance."""
    names = {u.name for u in spec.utterances}
    for p in spec.variants[variant]:
        if p.agent == SPEAKER and p.action in names:
            return p.step, p.action
    raise SpecError(f"variants.{variant}", "no scripted speaker utterance")


def build_semantics(spec: ScenarioSpec, step: int) -> UtteranceSemantics:
    """Denotations evaluated on the state in which the speaker talks."""
    def predicate(means):
        if means in ("true", "false"):
            value = means == "true"
            return lambda h: value
        var, _, val = means.partition("=")
        return lambda h: h.states[step][var] == val
    return UtteranceSemantics({u.name: predicate(u.means) for u in spec.utterances}, spec.epsilon, SPEAKER)


def ability() -> QueryVariable:
    return state_variable(ABILITY, 0, "listener ability")


def perception(step: int) -> QueryVariable:
    return state_variable(PERCEPTION, step, f"speaker perception@{step}")


def listener_modified() -> QueryVariable:
    return action_variable(LISTENER, 0, "listener modifies at step 0")


def speaker_params(spec: ScenarioSpec, step: int, theta_info: float | None = None,
                   theta_eval: float | None = None) -> SpeakerParams:
    m = spec.speaker_model
    return SpeakerParams(
        m.theta_info if theta_info is None else theta_info,
        m.theta_eval if theta_eval is None else theta_eval,
        perception(step), ability(), "high", m.rationality)


def hypotheses(spec: ScenarioSpec, step: int) -> tuple[SpeakerHypothesis, ...]:
    return tuple(SpeakerHypothesis(speaker_params(spec, step, h.theta_info, h.theta_eval), h.prior, h.name)
                 for h in spec.hypotheses)
