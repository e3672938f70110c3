"""
Beliefs, and beliefs about beliefs
==================================

Each agent conditions the shared prior on its own observations. Because a
hypothesized history fixes what the *other* agent saw, the listener can
also hold a distribution over what the speaker believes.
"""

from fauxpas import scenario as sc
from fauxpas.belief import marginal, nested_expectation, other_agent_belief
from fauxpas.report import CompiledVariant

spec = sc.load_scenario("curtain")

for variant in sc.VARIANTS:
    cv = CompiledVariant.build(spec, variant)
    ex = cv.exchange
    h = cv.realized.support[0]

    before = ex.listener_before(h)
    after = ex.listener_after(h, cv.heard)
    print(f"\n{variant}")
    print("  listener P(ability high): before %.4f, after %.4f" % (
        marginal(before, sc.ability()).prob("high"), marginal(after, sc.ability()).prob("high")))

    speaker = ex.speaker_belief(h)
    print("  speaker P(listener modified): %.4f" % marginal(speaker, sc.listener_modified()).prob(sc.MODIFY))

    # listener's picture of the speaker's knowledge, as a distribution over probabilities
    nb = other_agent_belief(after, sc.SPEAKER, sc.listener_modified(), sc.MODIFY, steps=ex.step)
    print("  listener's view of that probability:", {round(float(x), 4): round(float(p), 4) for x, p in nb})
    print("  its mean: %.4f" % nested_expectation(after, sc.SPEAKER, sc.listener_modified(), sc.MODIFY,
                                                    steps=ex.step))
