"""
Enumerating what could have happened
====================================

The Curtains world: a listener at home may put up new curtains, a speaker
arrives (in time to watch, or too late) and comments on how they look.
Every history of a two-step episode is listed with its prior weight, and
we look at what each agent actually perceived.
"""

from fauxpas import scenario as sc
from fauxpas.posg import enumerate_histories, observation_sequence

spec = sc.load_scenario("curtain")
world = sc.build_world(spec)

# unscripted, every action follows its prior
histories = enumerate_histories(world, spec.horizon)
print(f"{len(histories)} histories, total mass {sum(p for _, p in histories):.12f}")

# the two scripted variants pin the listener's action, the speaker's arrival
# and the comment; what remains uncertain is ability and the initial look
for variant in sc.VARIANTS:
    script = sc.script_variant(spec, variant)
    scripted = enumerate_histories(world, spec.horizon, script)
    print(f"\n{variant}: {len(scripted)} histories")
    h = scripted.support[0]
    print("  states:", [dict(s.as_dict()) for s in h.states])
    for agent in (sc.LISTENER, sc.SPEAKER):
        for t, z in enumerate(observation_sequence(h, agent)):
            print(f"  {agent:8s} step {t}: {sorted(z.percepts)}")
