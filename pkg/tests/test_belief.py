from collections import defaultdict
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from fauxpas import scenario as sc
from fauxpas.belief import (action_variable, condition, marginal, nested_expectation,
                            other_agent_belief, prior_belief, state_variable)
from fauxpas.dist import Dist
from fauxpas.errors import ZeroPosterior
from fauxpas.oracle import HIGH, CurtainsOracle
from fauxpas.posg import (ActionDecl, ActionKind, AgentId, JointObservation, Observation, State,
                          TransitionRule, VariableDecl, WorldModel, action_ref, enumerate_histories,
                          fully_observable, observation_sequence)

from conftest import brute_force_paths, random_worlds

# closed-form Curtains quantities at the default priors, as exact fractions
A, P, M, E = F(9, 10), F(1, 2), F(1, 20), F(1, 20)
POST_HIGH = A * E / (A * E + (1 - A) * (1 - E))          # listener after "looks bad", having modified


def query_variables(rw):
    qs = []
    for t in range(rw.horizon + 1):
        for v in rw.world.variables:
            qs.append((state_variable(v.name, t), v.domain))
    for t in range(rw.horizon):
        qs.append((action_variable("a", t), ("noop", "act")))
        qs.append((action_variable("b", t), ("noop", "u0", "u1")))
    return qs


# -- prior --------------------------------------------------------------------

def test_prior_marginals(world):
    prior = prior_belief(world, 2)
    assert marginal(prior, sc.ability()).prob("high") == pytest.approx(0.9, abs=1e-12)
    assert marginal(prior, sc.perception(0)).prob("good") == pytest.approx(0.5, abs=1e-12)
    assert marginal(prior, sc.listener_modified()).prob("modify") == pytest.approx(0.05, abs=1e-12)


def test_uniform_horizon_zero_prior():
    prior = prior_belief(two_state_world(), 0)
    assert [p for _, p in prior.dist.items()] == [F(1, 2), F(1, 2)]


def two_state_world():
    """Agent ``a`` sees a fixed binary state; ``b`` sees nothing."""
    x = VariableDecl("x", ("v0", "v1"))

    def stay(s, a):
        z = JointObservation((("a", Observation.of(x=s["x"])), ("b", Observation.of())))
        return Dist.point((s, z))

    return WorldModel((x,), (AgentId(1, "a"), AgentId(2, "b")),
                      (ActionDecl("a", "noop", ActionKind.NOOP), ActionDecl("b", "noop", ActionKind.NOOP)),
                      (TransitionRule(lambda s, a: True, stay),),
                      {"a": Dist.point("noop"), "b": Dist.point("noop")},
                      Dist.uniform([State.of((x,), {"x": "v0"}), State.of((x,), {"x": "v1"})]))


# -- conditioning -------------------------------------------------------------

def test_empty_conditioning_is_identity(world):
    prior = prior_belief(world, 2, owner="listener")
    assert condition(prior, ()).dist == prior.dist


def test_modify_and_bad_review_lower_ability(compiled):
    ex = compiled["shared"].exchange
    h = compiled["shared"].realized.support[0]
    after = ex.listener_after(h, "looks bad")
    assert marginal(after, sc.ability()).prob("high") < 0.9


def test_elimination():
    prior = prior_belief(two_state_world(), 1)
    h = prior.dist.support[0]
    post = condition(prior, observation_sequence(h, "a"), "a")
    assert post.dist.items() == ((h, 1),)
    assert condition(prior, observation_sequence(h, "b"), "b").dist == prior.dist


def test_zero_posterior(world):
    prior = prior_belief(world, 2)
    impossible = Observation.of(**{action_ref("listener"): "dance"})
    with pytest.raises(ZeroPosterior):
        condition(prior, (impossible,), "listener")


def test_single_history_marginal_is_point_mass(spec, world):
    full = sc.script_variant(spec, "shared")
    h = enumerate_histories(world, 2, full).support[0]
    b = condition(prior_belief(world, 2), observation_sequence(h, "speaker"), "speaker")
    assert marginal(b, sc.perception(0)).prob(h.states[0]["perception"]) in (0.5, 1.0)
    single = prior_belief(world, 2, full).dist.reweight(lambda x: x == h)
    assert marginal(type(b)(None, single), sc.ability()).items() == ((h.states[0]["ability"], 1.0),)


def test_diverging_listener_ability_posterior(compiled, spec):
    cv = compiled["diverging"]
    h = cv.realized.support[0]
    after = cv.exchange.listener_after(h, "looks bad")
    got = marginal(after, sc.ability()).prob("high")
    assert got == pytest.approx(float(POST_HIGH), abs=1e-12)
    grid = CurtainsOracle(spec, "diverging").listener_after(1, "looks bad")
    assert got == pytest.approx(grid[HIGH].sum(), abs=1e-9)


def test_nested_ability_expectation_diverging(compiled, spec):
    cv = compiled["diverging"]
    h = cv.realized.support[0]
    after = cv.exchange.listener_after(h, "looks bad")
    got = nested_expectation(after, "speaker", sc.ability(), "high", steps=2)

    # speaker arrived late and sees the object: good or bad
    good = (1 - M) * P + M * A
    p_high_good = ((1 - M) * P * A + M * A) / good
    p_high_bad = (1 - M) * (1 - P) * A / (1 - good)
    expected = POST_HIGH * p_high_good + (1 - POST_HIGH) * p_high_bad
    assert got == pytest.approx(float(expected), abs=1e-12)

    o = CurtainsOracle(spec, "diverging")
    grid = o.listener_after(1, "looks bad")
    brute = sum(grid[c] * o.speaker_belief(c)[HIGH].sum() for c in o.cells if grid[c] > 0)
    assert got == pytest.approx(brute, abs=1e-9)


def test_nested_modification_belief(compiled):
    shared, div = compiled["shared"], compiled["diverging"]
    h = shared.realized.support[0]
    nb = other_agent_belief(shared.exchange.listener_after(h, "looks bad"), "speaker",
                            sc.listener_modified(), "modify", steps=2)
    assert len(nb) == 1 and nb.support[0] == pytest.approx(1.0, abs=1e-12)

    h = div.realized.support[0]
    nb = other_agent_belief(div.exchange.listener_after(h, "looks bad"), "speaker",
                            sc.listener_modified(), "modify", steps=2)
    good = (1 - M) * P + M * A
    expected = POST_HIGH * M * A / good + (1 - POST_HIGH) * M * (1 - A) / (1 - good)
    assert nb.expectation() == pytest.approx(float(expected), abs=1e-12)
    assert 0 < nb.expectation() < 0.1          # stays close to the 0.05 prior
    assert all(p < 0.1 for p in nb.support)


# -- properties over random small worlds --------------------------------------

@settings(max_examples=150, deadline=None)
@given(random_worlds(), st.integers(0, 10**6), st.sampled_from(["a", "b"]), st.booleans())
def test_bayes_consistency_random(rw, pick, agent, with_semantics):
    sem = rw.semantics if with_semantics else None
    prior = prior_belief(rw.world, rw.horizon, semantics=sem)
    h = prior.dist.support[pick % len(prior.dist)]
    z = observation_sequence(h, agent)
    k = pick % (len(z) + 1)
    step = condition(condition(prior, z[:k], agent), z[k:], agent)
    batch = condition(prior, z, agent)
    assert step.dist.items() == batch.dist.items()
    assert step.conditioned_on == batch.conditioned_on
    assert set(batch.dist.support) <= set(prior.dist.support)      # support soundness
    assert sum(p for _, p in batch.dist.items()) == 1


def _direct_marginal(rw, agent, z, variable_of_path, semantics):
    """Posterior of a path feature, summed straight over the raw tables."""
    ref = action_ref("b")
    first = rw.world.variables[0]
    truth = {"u0": lambda states: states[0][first.name] == first.domain[0],
             "u1": lambda states: states[-1][first.name] != first.domain[0]}
    eps = rw.semantics.epsilon
    acc, total = defaultdict(F), F(0)
    for states, acts, za, zb, w in brute_force_paths(rw):
        seen = za if agent == "a" else zb
        lik = F(1)
        for mine, got in zip(seen, z):
            if mine != got:
                lik = 0
                break
            heard = dict(got.percepts).get(ref)
            if semantics and agent != "b" and heard in truth:
                lik *= (1 - eps) if truth[heard](states) else eps
        acc[variable_of_path(states, acts)] += w * lik
        total += w * lik
    return {k: v / total for k, v in acc.items() if v > 0}


@settings(max_examples=100, deadline=None)
@given(random_worlds(), st.integers(0, 10**6), st.sampled_from(["a", "b"]), st.booleans())
def test_marginals_match_direct_summation(rw, pick, agent, with_semantics):
    sem = rw.semantics if with_semantics else None
    prior = prior_belief(rw.world, rw.horizon, semantics=sem)
    h = prior.dist.support[pick % len(prior.dist)]
    z = observation_sequence(h, agent)
    post = condition(prior, z, agent)
    for t in range(rw.horizon + 1):
        for v in rw.world.variables:
            direct = _direct_marginal(rw, agent, z, lambda s, a: s[t][v.name], with_semantics)
            got = dict(marginal(post, state_variable(v.name, t)).items())
            assert got == direct
    for t in range(rw.horizon):
        direct = _direct_marginal(rw, agent, z, lambda s, a: a[t][1], with_semantics)
        assert dict(marginal(post, action_variable("b", t)).items()) == direct


@settings(max_examples=100, deadline=None)
@given(random_worlds(public=True), st.integers(0, 10**6))
def test_public_information_collapse_random(rw, pick):
    prior = prior_belief(rw.world, rw.horizon, owner="a")
    h = prior.dist.support[pick % len(prior.dist)]
    mine = condition(prior, observation_sequence(h, "a"), "a")
    for q, domain in query_variables(rw):
        own = marginal(mine, q)
        for value in domain:
            nb = other_agent_belief(mine, "b", q, value)
            assert nb.items() == ((own.prob(value), 1),)


@pytest.mark.parametrize("variant", sc.VARIANTS)
def test_public_information_collapse_curtains(spec, variant):
    world = fully_observable(sc.build_world(spec))
    script = sc.script_variant(spec, variant)
    sem = sc.build_semantics(spec, 1)
    prior = prior_belief(world, 2, script.public(), semantics=sem)
    for h in enumerate_histories(world, 2, script).support:
        z = observation_sequence(h, "listener")
        assert z == observation_sequence(h, "speaker")
        mine = condition(prior, z, "listener")
        for q, domain in ((sc.ability(), ("high", "low")), (sc.perception(0), ("good", "bad")),
                          (sc.perception(1), ("good", "bad")), (sc.perception(2), ("good", "bad")),
                          (sc.listener_modified(), ("noop", "modify")),
                          (action_variable("speaker", 0), sc.MOVES)):
            own = marginal(mine, q)
            for value in domain:
                nb = other_agent_belief(mine, "speaker", q, value)
                assert len(nb) == 1
                assert abs(nb.support[0] - own.prob(value)) < 1e-9
