"""Command-line entry point: ``lyapnum {estimate,verify,oracle,zoo}``.

Exit codes: 0 success, 1 a theorem check failed, 2 bad configuration,
3 the estimation itself failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import report as rp
from .estimators import NUMBER_IDS, EstimatorConfig, estimate_all
from .shift_oracle import exact_L_estimates, format_exact
from .zoo import DEFAULT_REGISTRY, registry, resolve

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2, 3


class ConfigError(Exception):
    pass


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", default=None, help="named config (desk or smoke); default desk")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--delta0", type=float, default=None)
    p.add_argument("--levels", type=int, default=None)
    p.add_argument("--tail-fraction", type=float, default=None)
    p.add_argument("--strict-paper-n", action="store_true",
                   help="start the diameter-form separations at n = 1")
    p.add_argument("--jobs", type=int, default=1, help="worker threads (does not change results)")
    p.add_argument("--manifest", default=None, help="JSON run manifest; flags override it")


def _config(args, base: Optional[EstimatorConfig] = None) -> EstimatorConfig:
    overrides = {}
    for flag, key in (("seed", "rng_seed"), ("horizon", "horizon"), ("delta0", "delta0"),
                      ("levels", "delta_levels"), ("tail_fraction", "tail_fraction")):
        value = getattr(args, flag)
        if value is not None:
            overrides[key] = value
    if args.strict_paper_n:
        overrides["strict_paper_n"] = True
    if args.preset is not None or base is None:
        return EstimatorConfig.preset(args.preset or "desk", **overrides)
    return EstimatorConfig.from_dict({**base.to_dict(), **overrides})


def _manifests(args, systems: Sequence[str]) -> list:
    base = None
    out_dir = getattr(args, "out", None)
    if args.manifest:
        loaded = rp.RunManifest.load(args.manifest)
        base = loaded.config
        systems = systems or [loaded.system]
        out_dir = out_dir or loaded.out_dir
    if not systems:
        raise ConfigError("no system given")
    cfg = _config(args, base)
    if args.jobs < 1:
        raise ConfigError("--jobs must be >= 1")
    return [rp.RunManifest(name, cfg, out_dir or ".") for name in systems]


def _run(manifest: rp.RunManifest, jobs: int):
    spec = resolve(manifest.system, horizon=manifest.config.horizon)
    try:
        rep = estimate_all(spec, manifest.config, n_jobs=jobs)
    except ValueError:
        raise
    except Exception as exc:
        raise RuntimeError(f"estimation failed for {manifest.system}: {exc}") from exc
    theorems = rp.theorem_checks(rep, spec.flags)
    return spec, rep, theorems


def _summary(rep) -> str:
    vals = "  ".join(f"{k}={v:.6g}" for k, v in zip(NUMBER_IDS, rep.values))
    kind = "known" if rep.diameter_known else "estimated"
    return f"{rep.system}: {vals}  diam={rep.diameter:.6g} ({kind})"


def cmd_estimate(args) -> int:
    (manifest,) = _manifests(args, [args.system] if args.system else [])
    spec, rep, theorems = _run(manifest, args.jobs)
    text = rp.dumps(rp.report_to_dict(rep, spec, theorems))
    paths = rp.write_outputs(manifest.out_dir, text, rp.curves_csv(rep))
    if args.json:
        sys.stdout.write(text)
    else:
        print(_summary(rep))
        print("wrote " + ", ".join(str(p) for p in paths))
    return EXIT_OK


def cmd_verify(args) -> int:
    names = list(args.system or [])
    if not names and not args.manifest:
        names = list(DEFAULT_REGISTRY)
    manifests = _manifests(args, names)
    failed = False
    records = []
    for manifest in manifests:
        spec, rep, theorems = _run(manifest, args.jobs)
        failed |= any(t.failed for t in theorems)
        records.append({"system": rep.system, "values": list(rep.values), "diameter": rep.diameter,
                        "theorems": [vars(t) for t in theorems]})
        if not args.json:
            print(_summary(rep))
            for t in theorems:
                print(f"  {t.theorem_id:<9} {t.relation:<15} {t.verdict:<15} "
                      f"lhs={t.lhs:.6g} rhs={t.rhs:.6g} slack={t.slack:.3g}")
        if args.out:
            sub = f"{args.out}/{rep.system.replace(':', '_').replace(',', '_')}"
            rp.write_outputs(sub, rp.dumps(rp.report_to_dict(rep, spec, theorems)), rp.curves_csv(rep))
    if args.json:
        sys.stdout.write(rp.dumps({"systems": records, "passed": not failed}))
    return EXIT_FAIL if failed else EXIT_OK


def cmd_oracle(args) -> int:
    values = exact_L_estimates(args.k, args.m, args.W, args.N, args.tail_fraction, method=args.method)
    if args.json:
        print(json.dumps({k: str(v) for k, v in zip(NUMBER_IDS, values)}))
    else:
        print(format_exact(values))
    return EXIT_OK


def cmd_zoo(args) -> int:
    entries = []
    for spec in registry(args.pattern):
        s = spec.system
        entries.append({"name": spec.name, "params": spec.params, "flags": spec.flags,
                        "known_diameter": s.known_diameter})
    if args.json:
        print(json.dumps(entries, indent=2))
    else:
        for e in entries:
            flags = ",".join(f"{k}={'?' if v is None else int(v)}" for k, v in e["flags"].items())
            diam = "?" if e["known_diameter"] is None else f"{e['known_diameter']:g}"
            print(f"{e['name']:<22} diam={diam:<5} {flags}  {json.dumps(e['params'])}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lyapnum", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="estimate the four numbers for one system")
    p.add_argument("--system", default=None)
    p.add_argument("--out", default=None, help="output directory for report.json and curves.csv")
    p.add_argument("--json", action="store_true", help="print report.json to stdout")
    _add_config_flags(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("verify", help="estimate and check the theorem set")
    p.add_argument("--system", action="append", default=None,
                   help="system name; repeat for several (default: whole registry)")
    p.add_argument("--out", default=None, help="write one report directory per system here")
    p.add_argument("--json", action="store_true")
    _add_config_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="exact values for the full shift")
    p.add_argument("--k", type=int, required=True, help="alphabet size")
    p.add_argument("--m", type=int, required=True, help="cylinder depth")
    p.add_argument("--W", type=int, required=True, help="word length")
    p.add_argument("--N", type=int, required=True, help="horizon")
    p.add_argument("--tail-fraction", type=float, default=0.5)
    p.add_argument("--method", choices=("closed_form", "enumerate"), default="closed_form")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("zoo", help="list the built-in systems")
    p.add_argument("pattern", nargs="?", default="", help="substring filter")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_zoo)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
