"""Command-line front end.

    fauxpas run --scenario curtain --variant both --format table
    fauxpas run --variant shared --format csv
    fauxpas run --oracle --format json
    fauxpas list [--user-dir DIR]

Exit codes: 0 ok, 1 other engine error, 2 scenario error, 3 impossible
observation, 4 history explosion.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import scenario as sc
from .errors import ExplosionGuard, FauxPasError, SpecError, ZeroPosterior
from .report import Q_MAP, PredictionProfile, prediction_profile

EXIT_OK, EXIT_ERROR, EXIT_SPEC, EXIT_ZERO, EXIT_EXPLOSION = 0, 1, 2, 3, 4
FORMAT_VERSION = 1


def _hypothesis_prior(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    try:
        if not (name and sep):
            raise ValueError
        return name, float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected NAME=PROB, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fauxpas", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="compute prediction profiles for a scenario")
    run.add_argument("--scenario", default="curtain", help="preset name or path to a scenario JSON file")
    run.add_argument("--variant", choices=("shared", "diverging", "both"), default="both")
    run.add_argument("--format", choices=("table", "csv", "json"), default="table")
    run.add_argument("--epsilon", type=float, help="literal-listener noise")
    run.add_argument("--rationality", type=float, help="speaker choice sharpness")
    run.add_argument("--theta-info", type=float, help="speaker weight on informativeness")
    run.add_argument("--theta-eval", type=float, help="speaker weight on the listener's evaluative belief")
    run.add_argument("--hypothesis-prior", type=_hypothesis_prior, action="append", default=[],
                     metavar="NAME=PROB", help="listener's prior on a speaker-goal hypothesis")
    run.add_argument("--history-cap", type=int, help="maximum number of enumerated histories")
    run.add_argument("--oracle", action="store_true", help="cross-check against brute-force enumeration")
    run.add_argument("--lenient", action="store_true", help="ignore unknown fields in scenario files")
    run.add_argument("--seed", type=int, help="accepted for interface stability; inference is exact")

    ls = sub.add_parser("list", help="list bundled presets and user scenarios")
    ls.add_argument("--user-dir", help="directory of additional *.json scenarios")
    return parser


def effective_spec(args) -> sc.ScenarioSpec:
    """Load the scenario and apply command-line overrides, re-validating the result."""
    spec = sc.load_scenario(args.scenario, strict=not args.lenient)
    doc = sc.to_document(spec)
    if args.epsilon is not None:
        doc["epsilon"] = args.epsilon
    for key in ("rationality", "theta_info", "theta_eval"):
        value = getattr(args, key)
        if value is not None:
            doc["speaker_model"][key] = value
    known = {h["name"] for h in doc["hypotheses"]}
    for name, prob in args.hypothesis_prior:
        if name not in known:
            raise SpecError("hypotheses", f"no hypothesis named {name!r}")
        for h in doc["hypotheses"]:
            if h["name"] == name:
                h["prior"] = prob
    return sc.validate_spec(doc)


def run(args, out=None) -> int:
    out = out or sys.stdout
    spec = effective_spec(args)
    variants = ("shared", "diverging") if args.variant == "both" else (args.variant,)
    profiles = {v: prediction_profile(spec, v, history_cap=args.history_cap) for v in variants}

    deviation = None
    if args.oracle:
        from .oracle import CurtainsOracle
        deviation = 0.0
        for v, prof in profiles.items():
            expected = CurtainsOracle(spec, v).profile()
            ours = prof.numbers()
            deviation = max(deviation, float(max(abs(ours[k] - expected[k]) for k in expected)))

    result = {
        "format_version": FORMAT_VERSION,
        "config": {"scenario": sc.to_document(spec), "variant": args.variant,
                   "history_cap": args.history_cap, "seed": args.seed},
        "profiles": {v: p.to_dict() for v, p in profiles.items()},
        "question_map": Q_MAP,
    }
    if len(profiles) == 2:
        a, b = profiles["shared"].numbers(), profiles["diverging"].numbers()
        result["contrasts"] = {k: a[k] - b[k] for k in a}
    if deviation is not None:
        result["oracle_max_abs_deviation"] = deviation

    if args.format == "json":
        out.write(emit_structured(result))
    elif args.format == "csv":
        out.write(emit_csv(profiles))
        if deviation is not None:
            out.write(f"# oracle_max_abs_deviation,{deviation!r}\n")
    else:
        out.write(emit_table(spec, profiles, result.get("contrasts"), deviation))
    return EXIT_OK


def emit_structured(result: dict) -> str:
    return json.dumps(result, indent=2, sort_keys=True) + "\n"


def parse_structured(text: str) -> dict[str, PredictionProfile]:
    """Profiles from the structured (JSON) output, numerically bit-exact."""
    doc = json.loads(text)
    return {v: PredictionProfile.from_dict(d) for v, d in doc["profiles"].items()}


def emit_csv(profiles: dict[str, PredictionProfile]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["variant", "field", "value"])
    for v, p in profiles.items():
        for k, x in p.numbers().items():
            w.writerow([v, k, repr(x)])
        w.writerow([v, "faux_pas", p.faux_pas])
        w.writerow([v, "expected_insult", p.expected_insult])
    return buf.getvalue()


def emit_table(spec, profiles, contrasts=None, deviation=None) -> str:
    cols = list(profiles) + (["shared - diverging"] if contrasts else [])
    rows = []
    for k in next(iter(profiles.values())).numbers():
        cells = [repr(p.numbers()[k]) for p in profiles.values()]
        if contrasts:
            cells.append(repr(contrasts[k]))
        rows.append([k, Q_MAP.get(k, "")] + cells)
    for flag in ("faux_pas", "expected_insult"):
        cells = [str(getattr(p, flag)) for p in profiles.values()] + ([""] if contrasts else [])
        rows.append([flag, ""] + cells)
    header = ["field", "Q"] + cols
    widths = [max(len(r[i]) for r in rows + [header]) for i in range(len(header))]
    line = lambda r: "  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip()

    o = spec.object
    lines = [
        f"scenario {spec.name}: {spec.speaker.name} (speaker) talks to {spec.listener.name} "
        f"(listener) about the {o.label} after the listener {o.action}",
        f"epsilon={spec.epsilon!r} rationality={spec.speaker_model.rationality!r} "
        f"theta=({spec.speaker_model.theta_info!r}, {spec.speaker_model.theta_eval!r}) "
        "hypotheses=" + ", ".join(f"{h.name}:({h.theta_info!r}, {h.theta_eval!r})@{h.prior!r}"
                                  for h in spec.hypotheses),
        "",
        line(header),
        line(["-" * w for w in widths]),
    ] + [line(r) for r in rows]
    if deviation is not None:
        lines += ["", f"oracle max |deviation| = {deviation!r}"]
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "list":
            for name in sc.list_presets(args.user_dir):
                print(name)
            return EXIT_OK
        return run(args)
    except SpecError as e:
        print(f"scenario error: {e}", file=sys.stderr)
        return EXIT_SPEC
    except ZeroPosterior as e:
        print(f"impossible observation: {e}", file=sys.stderr)
        return EXIT_ZERO
    except ExplosionGuard as e:
        print(f"history explosion: {e}", file=sys.stderr)
        return EXIT_EXPLOSION
    except FauxPasError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
