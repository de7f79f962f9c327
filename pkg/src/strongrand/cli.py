"""Command-line front end.

    strongrand generate   --patients N --groups g [--seed S] [--format text|csv|json]
    strongrand verify     --patients N --groups g --trials T [--master-seed S]
    strongrand thresholds --survivors 12 11 ... | --patients N

Every flag can also come from the environment as STRONGRAND_<FLAG>, e.g.
STRONGRAND_PATIENTS=12; command-line values win. Exit codes: 0 success,
1 verification failure, 2 usage or validation error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from strongrand import __version__
from strongrand.bundle import FORMATS, emit_open, emit_sealed, generate_bundle
from strongrand.rng import SEED_MASK, SeedPolicy, clock_seed, make_source, replay_source
from strongrand.threshold import TrialConfig, compute_thresholds, generate_list
from strongrand.verify import fixed_first_row, identity_generator, run_suite

ENV_PREFIX = "STRONGRAND_"

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def _env(dest: str) -> Optional[str]:
    return os.environ.get(ENV_PREFIX + dest.upper())


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value <= SEED_MASK:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer: {text}")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _probability(text: str) -> float:
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"significance must lie in (0, 1), got {text}")
    return value


def _replay_values(text: str) -> List[float]:
    if text.startswith("@"):
        text = Path(text[1:]).read_text()
    return [float(tok) for tok in text.replace(",", " ").split()]


def _add(parser: argparse.ArgumentParser, flag: str, required: bool = False, **kw) -> None:
    """add_argument with an environment fallback for the default."""
    dest = flag.lstrip("-").replace("-", "_")
    env = _env(dest)
    if env is not None:
        if kw.get("action") == "store_true":
            kw["default"] = env.lower() not in ("", "0", "false", "no")
        else:
            kw["default"] = env
        required = False
    parser.add_argument(flag, required=required, **kw)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="strongrand", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"strongrand {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate an assignment list and phase schedule")
    _add(gen, "--patients", True, type=_positive_int, help="number of patients N")
    _add(gen, "--groups", True, type=_positive_int, help="number of groups/treatments g (must divide N)")
    _add(gen, "--seed", type=_seed, help="explicit 64-bit seed (default: clock-derived)")
    _add(gen, "--replay", type=_replay_values,
         help="replay these uniforms instead of a seeded source (comma/space separated, or @file)")
    _add(gen, "--design", choices=("crossover", "parallel"), default="crossover",
         help="crossover: g phases from a cyclic schedule; parallel: group m gets treatment m")
    _add(gen, "--format", choices=FORMATS, default="text")
    _add(gen, "--out", type=Path, help="output file (open formats) or directory (--sealed)")
    _add(gen, "--sealed", action="store_true", help="write the sealed envelope layout to --out")
    _add(gen, "--pin-timestamp", help="use this timestamp in the audit block")

    ver = sub.add_parser("verify", help="Monte Carlo uniformity checks")
    _add(ver, "--patients", True, type=_positive_int)
    _add(ver, "--groups", True, type=_positive_int)
    _add(ver, "--trials", type=_positive_int, default=100_000)
    _add(ver, "--significance", type=_probability, default=0.001)
    _add(ver, "--master-seed", type=_seed, help="default: clock-derived, echoed in the report")
    _add(ver, "--workers", type=_positive_int, default=1)
    _add(ver, "--format", choices=("text", "json"), default="text")
    _add(ver, "--out", type=Path)
    _add(ver, "--inject-identity-generator", action="store_true",
         help="negative control: replace the list generator with the identity permutation")
    _add(ver, "--inject-fixed-first-row", action="store_true",
         help="negative control: always use 1..g as the phase-1 row")

    thr = sub.add_parser("thresholds", help="print threshold sets T_k = k/n")
    group = thr.add_mutually_exclusive_group(required=True)
    group.add_argument("--survivors", type=_positive_int, nargs="+", help="survivor counts n")
    group.add_argument("--patients", type=_positive_int, help="full table for n = N, N-1, ..., 1")
    return parser


def parse_config(argv: Sequence[str]) -> Tuple[TrialConfig, argparse.Namespace]:
    """Parse a generate/verify command line into a validated TrialConfig.

    Raises SystemExit(2) on usage errors and ConfigError when g does not divide N.
    """
    args = build_parser().parse_args(argv)
    return _config(args), args


def _config(args: argparse.Namespace) -> TrialConfig:
    if args.command == "thresholds":
        raise ValueError("thresholds takes no trial configuration")
    seed = getattr(args, "seed", None)
    policy = SeedPolicy.clock() if seed is None else SeedPolicy.explicit(seed)
    return TrialConfig(args.patients, args.groups, policy)


def cmd_generate(config: TrialConfig, args: argparse.Namespace) -> int:
    if args.replay is not None:
        if args.seed is not None:
            raise ValueError("--seed and --replay are mutually exclusive")
        source = replay_source(args.replay)
    else:
        source = make_source(config.seed_policy)
    bundle = generate_bundle(config, source, args.design, args.pin_timestamp)
    if args.sealed:
        if args.out is None:
            raise ValueError("--sealed needs --out DIRECTORY")
        bundle.sealed = True
        files = emit_sealed(bundle, args.out)
        print(f"wrote {len(files)} files under {args.out}", file=sys.stderr)
        return EXIT_OK
    text = emit_open(bundle, args.format, args.out)
    if args.out is None:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(config: TrialConfig, args: argparse.Namespace) -> int:
    master = args.master_seed if args.master_seed is not None else clock_seed()
    report = run_suite(
        config,
        args.trials,
        significance=args.significance,
        master_seed=master,
        generator=identity_generator if args.inject_identity_generator else generate_list,
        phase_one=fixed_first_row if args.inject_fixed_first_row else generate_list,
        workers=args.workers,
    )
    if args.format == "json":
        text = json.dumps(report.to_dict(), indent=2) + "\n"
    else:
        text = report.to_text() + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text)
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_thresholds(args: argparse.Namespace) -> int:
    counts = args.survivors or list(range(args.patients, 0, -1))
    for n in counts:
        values = compute_thresholds(n).as_floats()[1:]
        print(f"n={n}: " + " ".join(f"{t:.12g}" for t in values))
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = build_parser().parse_args(argv)
        if args.command == "thresholds":
            return cmd_thresholds(args)
        config = _config(args)
        if args.command == "generate":
            return cmd_generate(config, args)
        return cmd_verify(config, args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"strongrand: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
