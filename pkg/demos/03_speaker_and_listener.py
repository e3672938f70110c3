"""
Choosing what to say, and reading intent
========================================

A speaker scores each utterance by how it is expected to move the
listener's beliefs about the object's look (informativeness) and about the
listener's own ability (evaluation), then chooses softly. A listener who
knows this can infer which goal the speaker had.
"""

from fauxpas import scenario as sc
from fauxpas.agents import (hypothesis_posterior, sophisticated_listener, speaker_policy,
                            speaker_value)
from fauxpas.report import CompiledVariant

spec = sc.load_scenario("curtain")

for variant in sc.VARIANTS:
    cv = CompiledVariant.build(spec, variant)
    ex = cv.exchange
    h = cv.realized.support[0]
    b_s = ex.speaker_belief(h)
    print(f"\n{variant}")
    for hyp in sc.hypotheses(spec, ex.step):
        values = {u: speaker_value(u, b_s, hyp.params, ex) for u in ex.utterances}
        policy = speaker_policy(b_s, hyp.params, ex)
        print(f"  {hyp.name:8s}", "  ".join(f"{u}: V={v:+.3f} P={policy.prob(u):.3f}"
                                           for u, v in values.items()))

    joint = sophisticated_listener(ex.listener_before(h), cv.heard, sc.hypotheses(spec, ex.step), ex)
    theta = hypothesis_posterior(joint)
    names = {hyp.params: hyp.name for hyp in sc.hypotheses(spec, ex.step)}
    print("  listener's posterior on the speaker's goal:",
          {names[p]: round(float(q), 4) for p, q in theta.items()})
