"""
Faux pas versus expected insult
===============================

The same words hurt equally in both variants; what differs is whether the
speaker could have seen it coming. We print the two prediction profiles,
then sweep the listener's prior propensity to act and watch how much harm a
late-arriving speaker anticipates.
"""

from dataclasses import replace

import numpy as np

from fauxpas import scenario as sc
from fauxpas.report import Q_MAP, TOL, compare_variants, prediction_profile

spec = sc.load_scenario("curtain")
c = compare_variants(spec)
for k, v in c.shared.numbers().items():
    print(f"{k:46s} {Q_MAP.get(k, ''):3s} {v:+.6f} {c.diverging.numbers()[k]:+.6f}")
print("faux pas:", c.shared.faux_pas, c.diverging.faux_pas)

# the late speaker's anticipated harm scales with how likely acting was a priori
priors = np.logspace(-8, -1, 8)
anticipated = np.array([
    prediction_profile(replace(spec, priors=replace(spec.priors, modify=float(m))), "diverging")
    .speaker_expected_delta_eval for m in priors])
for m, e in zip(priors, anticipated):
    print(f"modify prior {m:.0e}: anticipated delta_eval {e:+.3e}  faux pas {abs(e) < TOL}")

# the presets only relabel the story
for name in sc.PRESETS:
    p = prediction_profile(sc.load_scenario(name), "diverging")
    print(f"{name:12s} delta_eval {p.delta_eval:+.4f}  anticipated {p.speaker_expected_delta_eval:+.4f}")
