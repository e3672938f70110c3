"""Brute-force cross-check for Curtains-family scenarios.

Recomputes the prediction-profile quantities on a dense grid over the
joint ``ability x initial perception x listener action x speaker arrival``
with numpy, writing down who observes what by hand instead of going through
histories, observation projection or :mod:`fauxpas.belief`. Shares no
inference code with the engine.
"""

from __future__ import annotations

import numpy as np

from . import scenario as sc

HIGH, LOW = 0, 1
GOOD, BAD = 0, 1
IDLE, MODIFY = 0, 1
EARLY, LATE = 0, 1

_ARRIVAL = {sc.ENTER: EARLY, sc.ENTER_LATE: LATE}
_LISTENER_ACTION = {sc.NOOP: IDLE, sc.MODIFY: MODIFY}


def _pinned(spec, variant, step, agent, public_only):
    for p in spec.variants[variant]:
        if p.step == step and p.agent == agent and (p.public or not public_only):
            return p.action
    return None


def _axis(prior: list[float], pinned: int | None) -> np.ndarray:
    if pinned is None:
        return np.asarray(prior, dtype=float)
    out = np.zeros(len(prior))
    out[pinned] = 1.0
    return out


class CurtainsOracle:
    """Grid model of one variant. Axes of every joint array: ``[A, P0, M, E]``."""

    def __init__(self, spec: sc.ScenarioSpec, variant: str):
        step, heard = sc.utterance_step(spec, variant)
        if step != 1 or spec.horizon < 2:
            raise NotImplementedError("oracle covers scenarios that speak at step 1")
        for p in spec.variants[variant]:
            if p.step == 0 and p.agent == sc.SPEAKER and p.action not in _ARRIVAL:
                raise NotImplementedError("oracle needs the speaker to enter at step 0")
        if spec.object.modified:
            raise NotImplementedError("oracle assumes an unmodified object at the start")
        self.spec, self.variant, self.heard = spec, variant, heard
        self.utterances = [u.name for u in spec.utterances]
        pr = spec.priors

        def arrival(public_only):
            a = _pinned(spec, variant, 0, sc.SPEAKER, public_only)
            return _axis([pr.speaker_enters_early, 1 - pr.speaker_enters_early], None if a is None else _ARRIVAL[a])

        def action(public_only):
            a = _pinned(spec, variant, 0, sc.LISTENER, public_only)
            return _axis([1 - pr.modify, pr.modify], None if a is None else _LISTENER_ACTION[a])

        base = np.einsum("a,p->ap", [pr.ability_high, 1 - pr.ability_high],
                         [pr.perception_good, 1 - pr.perception_good])
        # what everyone knows vs. what actually happened
        self.prior = np.einsum("ap,m,e->apme", base, action(True), arrival(True))
        self.actual = np.einsum("ap,m,e->apme", base, action(False), arrival(False))

        # perception of the object when the speaker talks
        p1 = np.empty((2, 2, 2, 2), dtype=int)
        for a in (HIGH, LOW):
            for p0 in (GOOD, BAD):
                p1[a, p0, IDLE, :] = p0
                p1[a, p0, MODIFY, :] = GOOD if a == HIGH else BAD
        self.p1 = p1
        eps = spec.epsilon
        self.truth = {}
        for u in spec.utterances:
            if u.means in ("true", "false"):
                t = np.full((2, 2, 2, 2), u.means == "true")
            else:
                t = p1 == (GOOD if u.means.endswith("good") else BAD)
            self.truth[u.name] = t
        self.lik = {u: np.where(t, 1 - eps, eps) for u, t in self.truth.items()}
        self.cells = list(np.ndindex(2, 2, 2, 2))

    # -- listener -------------------------------------------------------------

    def listener_before(self, m: int) -> np.ndarray:
        """Listener's pre-utterance posterior; she observes only her own action."""
        w = self.prior.copy()
        w[:, :, 1 - m, :] = 0
        return w / w.sum()

    def listener_after(self, m: int, u: str) -> np.ndarray:
        w = self.listener_before(m) * self.lik[u]
        return w / w.sum()

    def _p_high(self, b):
        return b[HIGH].sum()

    def _p_perceived(self, b, x):
        return b[self.p1 == x].sum()

    def deltas(self, m: int, u: str, x: int) -> tuple[float, float]:
        before, after = self.listener_before(m), self.listener_after(m, u)
        return (self._p_perceived(after, x) - self._p_perceived(before, x),
                self._p_high(after) - self._p_high(before))

    # -- speaker --------------------------------------------------------------

    def speaker_belief(self, cell) -> np.ndarray:
        """Speaker sees how the object looks; she sees the listener act only if she came early."""
        a, p0, m, e = cell
        w = self.prior.copy()
        mask = np.zeros_like(w, dtype=bool)
        for c in self.cells:
            same = c[3] == e and self.p1[c] == self.p1[cell]
            if e == EARLY:
                same = same and c[2] == m
            mask[c] = same
        w[~mask] = 0
        return w / w.sum()

    def expected_deltas(self, cell, u: str) -> tuple[float, float]:
        b = self.speaker_belief(cell)
        e_info = e_eval = 0.0
        for c in self.cells:
            if b[c] > 0:
                di, de = self.deltas(c[2], u, self.p1[c])
                e_info += b[c] * di
                e_eval += b[c] * de
        return e_info, e_eval

    def values(self, cell, theta_info: float, theta_eval: float) -> dict[str, float]:
        out = {}
        for u in self.utterances:
            di, de = self.expected_deltas(cell, u)
            out[u] = theta_info * di + theta_eval * de
        return out

    def policy(self, cell, theta_info, theta_eval, rationality) -> dict[str, float]:
        v = self.values(cell, theta_info, theta_eval)
        x = rationality * np.array([v[u] for u in self.utterances])
        x = np.exp(x - x.max())
        x /= x.sum()
        return dict(zip(self.utterances, x))

    def theta_posterior(self, m: int) -> dict[str, float]:
        before = self.listener_before(m)
        rat = self.spec.speaker_model.rationality
        post = {}
        for h in self.spec.hypotheses:
            total = 0.0
            for c in self.cells:
                if before[c] > 0:
                    total += before[c] * self.policy(c, h.theta_info, h.theta_eval, rat)[self.heard]
            post[h.name] = h.prior * total
        z = sum(post.values())
        return {k: v / z for k, v in post.items()}

    # -- summary --------------------------------------------------------------

    def realized(self) -> np.ndarray:
        w = self.actual * self.truth[self.heard]
        return w / w.sum()

    def profile(self) -> dict[str, float]:
        sm = self.spec.speaker_model
        harmful = {h.name for h in self.spec.hypotheses if h.theta_eval < 0}
        real = self.realized()
        out = dict.fromkeys(("delta_info", "delta_eval", "speaker_expected_delta_info",
                             "speaker_expected_delta_eval", "listener_expected_speaker_expected_delta_eval",
                             "listener_belief_speaker_wanted_harm", "speaker_knew_modification",
                             "listener_expected_speaker_knew_modification", "speaker_wanted_harm"), 0.0)
        for c in self.cells:
            w = real[c]
            if w == 0:
                continue
            m = c[2]
            di, de = self.deltas(m, self.heard, self.p1[c])
            si, se = self.expected_deltas(c, self.heard)
            b_s = self.speaker_belief(c)
            after = self.listener_after(m, self.heard)
            nested_eval = sum(after[c2] * self.expected_deltas(c2, self.heard)[1]
                              for c2 in self.cells if after[c2] > 0)
            nested_knew = sum(after[c2] * self.speaker_belief(c2)[:, :, MODIFY, :].sum()
                              for c2 in self.cells if after[c2] > 0)
            theta = self.theta_posterior(m)
            row = {
                "delta_info": di, "delta_eval": de,
                "speaker_expected_delta_info": si, "speaker_expected_delta_eval": se,
                "listener_expected_speaker_expected_delta_eval": nested_eval,
                "listener_belief_speaker_wanted_harm": sum(theta[n] for n in harmful),
                "speaker_knew_modification": b_s[:, :, MODIFY, :].sum(),
                "listener_expected_speaker_knew_modification": nested_knew,
                "speaker_wanted_harm": float(sm.theta_eval < 0),
            }
            for k, v in row.items():
                out[k] += w * float(v)
        return out

    def prior_marginals(self) -> dict[str, float]:
        """Unconditioned marginals of the scenario's generative prior (no script)."""
        pr = self.spec.priors
        w = np.einsum("a,p,m->apm", [pr.ability_high, 1 - pr.ability_high],
                      [pr.perception_good, 1 - pr.perception_good], [1 - pr.modify, pr.modify])
        return {"ability_high": w[HIGH].sum(), "perception_good": w[:, GOOD].sum(),
                "modify": w[:, :, MODIFY].sum()}


def oracle_profile(spec: sc.ScenarioSpec, variant: str) -> dict[str, float]:
    return CurtainsOracle(spec, variant).profile()
