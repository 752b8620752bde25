"""Command-line interface: ``choi-gauge <subcommand> [options]``.

Exit codes: 0 on success, 1 when ``test --strict`` finds the data
inconsistent, 2 on malformed input or invalid options.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

import numpy as np

from . import campaign, tomography
from .channels import ChannelModel, ReadoutError, StrayLight
from .errors import ChoiGaugeError
from .witness import Witness, consistency_test, witness_from_vector

MODEL_KINDS = {
    "ideal": "ideal_rx",
    "detuned": "detuned",
    "correlated": "correlated_env",
    "pulse": "pulse_sequence",
}


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _pair(text: str) -> tuple[float, float]:
    vals = _floats(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError(f"expected EB,ED, got {text!r}")
    return vals[0], vals[1]


def _flag(value: str) -> bool:
    # "auto" resolves to the convention that reproduces exact Choi matrices
    return value in ("on", "auto")


def build_model(args, ratio: Optional[float] = None) -> ChannelModel:
    kind = MODEL_KINDS[args.model]
    if ratio is None:
        ratio = args.detuning[0] if args.detuning else 0.0
    readout = ReadoutError(*args.readout) if args.readout else None
    stray = StrayLight(args.stray) if args.stray is not None else None
    return ChannelModel(kind, ratio, readout, stray, n_pulses=args.pulses, env_prep=args.env_prep)


def _write(path: Optional[str], text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _format_matrix(m: np.ndarray) -> str:
    return "\n".join("  " + "  ".join(f"{z.real:+.4f}{z.imag:+.4f}j" for z in row) for row in m)


def cmd_simulate(args) -> int:
    model = build_model(args)
    counts = tomography.sample_counts(model, args.shots[0], args.seed)
    _write(args.out, tomography.counts_to_csv(counts))
    return 0


def cmd_reconstruct(args) -> int:
    counts = tomography.counts_from_csv(_read(args.inp))
    choi = tomography.reconstruct_choi(tomography.frequencies(counts), _flag(args.conjugate_b))
    if args.out:
        meta = {"n_shots": int(counts.shots.max()), "source": args.inp}
        _write(args.out, tomography.choi_to_json(choi, meta))
    vals = choi.eig().eigenvalues
    print("eigenvalues: " + " ".join(f"{v:.6f}" for v in vals))
    print(f"trace: {choi.trace:.6f}")
    return 0


def cmd_witness(args) -> int:
    flag = _flag(args.conjugate_b)
    if args.inp:
        choi, _ = tomography.choi_from_json(_read(args.inp))
        _, vec = tomography.min_eigenpair(choi)
        w = witness_from_vector(vec, flag)
    else:
        w = campaign.theoretical_witness(build_model(args), flag)
    _write(args.out, w.to_json())
    return 0


def cmd_test(args) -> int:
    if not args.witness:
        raise ChoiGaugeError("test needs --witness PATH")
    counts = tomography.counts_from_csv(_read(args.inp))
    w = Witness.from_json(_read(args.witness))
    report = consistency_test(w, counts, args.alpha)
    _write(args.out, report.to_json())
    return 1 if args.strict and report.inconsistent else 0


def cmd_sweep(args) -> int:
    records = []
    for ratio in args.detuning or [0.0]:
        model = build_model(args, ratio)
        records += campaign.sweep_shots(model, args.shots, args.reps, args.alpha, args.seed, args.threads)
    _write(args.out, campaign.sweep_to_csv(records))
    return 0


def cmd_states(args) -> int:
    if args.inp:
        f = tomography.frequencies(tomography.counts_from_csv(_read(args.inp)))
    else:
        f = tomography.exact_frequencies(build_model(args))
    for prep, rho in tomography.reconstruct_states(f).items():
        vals = np.linalg.eigvalsh(rho)
        print(f"{prep}: eigenvalues {vals[1]:.4f} {vals[0]:.4f}")
        print(_format_matrix(rho))
    return 0


def cmd_fixture(args) -> int:
    fx = campaign.load_fixture(args.name)
    report = campaign.analyze_fixture(fx, args.witness_source, args.alpha)
    _write(args.out, report.to_json())
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", choices=sorted(MODEL_KINDS), default="ideal")
    common.add_argument("--detuning", type=_floats, default=None, metavar="R[,R...]",
                        help="detuning ratio(s) delta/Omega")
    common.add_argument("--readout", type=_pair, default=None, metavar="EB,ED")
    common.add_argument("--stray", type=float, default=None, metavar="H", help="stray-light transfer")
    common.add_argument("--pulses", type=int, default=100, help="decoupling pulses (pulse model)")
    common.add_argument("--env-prep", default=None, help="environment preparation (pulse model)")
    common.add_argument("--shots", type=_ints, default=[394], metavar="N[,N...]")
    common.add_argument("--reps", type=int, default=1000)
    common.add_argument("--alpha", type=float, default=0.01)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=None)
    common.add_argument("--in", dest="inp", default=None, metavar="PATH")
    common.add_argument("--out", default=None, metavar="PATH")
    common.add_argument("--witness", default=None, metavar="PATH")
    common.add_argument("--conjugate-b", choices=("on", "off", "auto"), default="auto")
    common.add_argument("--strict", action="store_true")

    parser = argparse.ArgumentParser(prog="choi-gauge", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    specs = {
        "simulate": (cmd_simulate, "sample a counts CSV from a model"),
        "reconstruct": (cmd_reconstruct, "reconstruct a Choi matrix from counts"),
        "witness": (cmd_witness, "build a witness from a Choi file or a model"),
        "test": (cmd_test, "test counts against a witness"),
        "sweep": (cmd_sweep, "Monte Carlo sweep over shot numbers"),
        "states": (cmd_states, "print reconstructed output states"),
        "fixture": (cmd_fixture, "analyze a built-in experimental fixture"),
    }
    for name, (func, help_text) in specs.items():
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=func)
        if name == "fixture":
            p.add_argument("--name", default="correlated_experiment")
            p.add_argument("--witness-source", default="theoretical_correlation")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    needs_input = {"reconstruct", "test"}
    if args.command in needs_input and not args.inp:
        parser.error(f"{args.command} needs --in PATH")
    try:
        return args.func(args)
    except (ChoiGaugeError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
