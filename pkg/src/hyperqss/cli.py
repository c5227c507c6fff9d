"""Command-line front end."""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Sequence

import numpy as np

from .access import (AccessError, catalog, classify, format_structure, is_quantum, kind_predicates,
                     optimal_rate, parse_structure)
from .css.constructions import build_for_structure, build_scheme
from .css.scheme import SchemeDescriptor, UnsupportedClass, deal_secret
from .css.verify import rank_report, verify_perfect
from .ffield import FieldError, is_prime
from .metrics import efficiency_report, entropy_bound_check, rate_report
from .protocol import EveModel, NO_EVE, SessionConfig, detection_reference, run_session

CLASSES = [f"G{i}" for i in range(1, 13)]


class UsageError(Exception):
    pass


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _blocks(text: str | None) -> list[int] | None:
    if text is None:
        return None
    try:
        sizes = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"--blocks expects comma-separated integers, got {text!r}")
    if not sizes or any(s < 1 for s in sizes):
        raise UsageError("--blocks entries must be positive")
    return sizes


def _descriptor(args) -> SchemeDescriptor:
    if args.structure:
        return build_for_structure(parse_structure(args.structure), args.p, args.allow_fallback)
    if not args.cls:
        raise UsageError("give --class or --structure")
    return build_scheme(int(args.cls[1:]), _blocks(args.blocks), args.p, allow_fallback=args.allow_fallback)


def _secret(args, desc: SchemeDescriptor, rng: np.random.Generator) -> list[int]:
    if args.secret is None:
        return [int(v) for v in rng.integers(0, desc.p, size=desc.secret_len)]
    vals = [int(t) % desc.p for t in args.secret.split(",")]
    if len(vals) != desc.secret_len:
        raise UsageError(f"--secret needs {desc.secret_len} comma-separated values")
    return vals


def _eve(args) -> EveModel:
    if args.eve == "none":
        return NO_EVE
    phases = args.eve_phases.split(",") if args.eve_phases else None
    return EveModel.intercept(args.eve_basis, phases)


# -- subcommands: each returns (json object, csv text, plain text) ------------

def cmd_classify(args):
    text = args.target or args.structure
    if not text:
        raise UsageError("classify needs a structure")
    s = parse_structure(text)
    cls = classify(s)
    flags = kind_predicates(s)
    rate = optimal_rate(cls.class_id)
    out = {
        "structure": format_structure(s),
        "class": cls.label,
        "quantum": is_quantum(s),
        "hyperstar": flags.hyperstar,
        "hypercycle": flags.hypercycle,
        "hyperpath": flags.hyperpath,
        "blocks": [sorted(b) for b in cls.blocks],
        "rate": "hyperstar" if rate is None else str(rate),
    }
    row = [out["structure"], out["class"], out["quantum"], out["rate"]]
    text_out = f"{out['structure']}: {out['class']}, quantum={out['quantum']}, rate {out['rate']}\n"
    return out, _csv(["structure", "class", "quantum", "rate"], [row]), text_out


def cmd_build(args):
    desc = _descriptor(args)
    out = desc.to_json()
    rows = [[r.block, r.tag] + list(r.coeffs) for r in desc.rows]
    lines = [f"G{desc.class_id} over F_{desc.p}: {desc.secret_len} secret coordinate(s), "
             f"{desc.nvars - desc.secret_len} random variable(s)"]
    for b in range(1, desc.nblocks + 1):
        lines.append(f"  A{b} {sorted(desc.blocks[b - 1])}: {', '.join(desc.tags_of(b))}")
    return out, _csv(["block", "tag"] + list(desc.var_names), rows), "\n".join(lines) + "\n"


def cmd_verify(args):
    desc = _descriptor(args)
    rep = verify_perfect(desc, budget=args.trials, rng=np.random.default_rng(args.seed))
    exact = rank_report(desc)
    out = {"class": f"G{desc.class_id}", "p": desc.p, "mode": rep.mode, "transcripts": rep.transcripts,
           "recover_ok": rep.recover_ok, "secrecy_ok": rep.secrecy_ok, "stats": rep.stats,
           "rank_ok": exact.ok, "ok": rep.ok and exact.ok}
    row = [out["class"], desc.p, rep.mode, rep.transcripts, rep.recover_ok, rep.secrecy_ok, exact.ok]
    text = (f"G{desc.class_id} p={desc.p} {rep.mode} ({rep.transcripts} transcripts): "
            f"recovery {'ok' if rep.recover_ok else 'FAILED'}, secrecy {'ok' if rep.secrecy_ok else 'FAILED'}, "
            f"rank check {'ok' if exact.ok else 'FAILED'}\n")
    return out, _csv(["class", "p", "mode", "transcripts", "recover_ok", "secrecy_ok", "rank_ok"], [row]), text


def cmd_deal(args):
    desc = _descriptor(args)
    rng = np.random.default_rng(args.seed)
    secret = _secret(args, desc, rng)
    bundle = deal_secret(desc, secret, rng)
    out = {"secret": secret, "shares": bundle.to_json()}
    rows = [[x, t, v] for x, lst in bundle.shares.items() for t, v in lst]
    lines = [f"secret {secret}"] + [f"  P{x}: {[v for _, v in lst]}" for x, lst in bundle.shares.items()]
    return out, _csv(["participant", "tag", "value"], rows), "\n".join(lines) + "\n"


def _config(args, desc, seed) -> SessionConfig:
    return SessionConfig(desc, n_info=args.n_info, n_decoy=args.n_decoy, threshold=args.threshold, seed=seed)


def cmd_simulate(args):
    desc = _descriptor(args)
    secret = None if args.secret is None else _secret(args, desc, np.random.default_rng(args.seed))
    tr = run_session(_config(args, desc, args.seed), _eve(args), secret=secret)
    out = tr.to_json()
    rows = [[h.phase, h.sender, h.receiver, h.block, h.tag, h.basis, h.n_info, h.n_decoy,
             h.decoy_error_rate, h.verdict] for h in tr.hops]
    text = (f"dealt {list(tr.dealt)}; recovered {out['final']['recovered']}; match={tr.match}; "
            f"hops={len(tr.hops)}; aborted={tr.aborted}\n")
    return out, _csv(["phase", "sender", "receiver", "block", "tag", "basis", "n_info", "n_decoy",
                      "decoy_error_rate", "verdict"], rows), text


def trial_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def cmd_attack(args):
    desc = _descriptor(args)
    eve = _eve(args) if args.eve != "none" else EveModel.intercept(args.eve_basis)
    aborts, matches, decoys, errors = 0, 0, 0, 0
    for i in range(args.trials):
        tr = run_session(_config(args, desc, trial_seed(args.seed, i)), eve)
        aborts += tr.aborted is not None
        matches += tr.match
        for h in tr.hops:
            if h.phase in eve.phases:
                decoys += h.n_decoy
                errors += round(h.decoy_error_rate * h.n_decoy)
    out = {"trials": args.trials, "aborts": aborts, "abort_rate": aborts / max(1, args.trials),
           "undetected_matches": matches, "intercepted_decoys": decoys,
           "decoy_error_rate": errors / decoys if decoys else None,
           "reference_decoy_error_rate": detection_reference(desc.p, eve.basis_choice)}
    text = (f"{args.trials} trials: abort rate {out['abort_rate']:.4f}, per-decoy error rate "
            f"{out['decoy_error_rate']} (reference {out['reference_decoy_error_rate']:.4f})\n")
    return out, _csv(list(out), [list(out.values())]), text


def cmd_catalog(args):
    rows = catalog()
    out = [{"serial": r.serial, "structure": r.text, "class": f"G{r.class_id}", "rate": r.rate_label}
           for r in rows]
    text = "".join(f"{r.serial:3d} {r.text:<22} G{r.class_id:<3d} {r.rate_label}\n" for r in rows)
    return out, _csv(["serial", "structure", "class", "rate"],
                     [[r.serial, r.text, f"G{r.class_id}", r.rate_label] for r in rows]), text


def cmd_rates(args):
    if args.cls or args.structure:
        descs = [_descriptor(args)]
    else:
        descs = [build_scheme(c, _blocks(args.blocks) if args.blocks else None, args.p) for c in range(5, 13)]
    out, rows, lines = [], [], []
    for d in descs:
        rr = rate_report(d, args.n_info)
        er = efficiency_report(d, args.n_info, args.n_decoy)
        out.append({"rates": rr.to_json(), "entropy_bound_ok": entropy_bound_check(d),
                    "efficiency": er.to_json()})
        for r in er.rows:
            rows.append([f"G{d.class_id}", rr.classical_rate, rr.idealized_rate, r.mas, r.eta, r.eta_closed_form])
        lines.append(f"G{d.class_id}: classical {rr.classical_rate}, idealized {rr.idealized_rate}, "
                     + ", ".join(f"eta({r.mas})={r.eta}" for r in er.rows))
    return out, _csv(["class", "classical_rate", "idealized_rate", "mas", "eta", "eta_closed_form"], rows), \
        "\n".join(lines) + "\n"


COMMANDS = {
    "classify": cmd_classify,
    "build": cmd_build,
    "verify": cmd_verify,
    "deal": cmd_deal,
    "simulate": cmd_simulate,
    "attack": cmd_attack,
    "catalog": cmd_catalog,
    "rates": cmd_rates,
}


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, default=11, help="field size (prime)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--n-info", type=int, default=3, dest="n_info")
    common.add_argument("--n-decoy", type=int, default=10, dest="n_decoy")
    common.add_argument("--threshold", type=float, default=0.0)
    common.add_argument("--class", choices=CLASSES, dest="cls")
    common.add_argument("--blocks", help='block sizes, e.g. "1,1,2,1,1,1"')
    common.add_argument("--structure", help='e.g. "{1234,1267,456}"')
    common.add_argument("--allow-fallback", action="store_true", help="permit hyperstar classes")
    common.add_argument("--secret", help="comma-separated secret coordinates")
    common.add_argument("--eve", choices=["none", "intercept"], default="none")
    common.add_argument("--eve-basis", choices=["protocol", "all"], default="protocol")
    common.add_argument("--eve-phases", help="comma-separated subset of distribution,circulation,delivery")
    common.add_argument("--trials", type=int, default=None)
    common.add_argument("--format", choices=["json", "csv", "text"], default="json")
    common.add_argument("--out", help="write the report here instead of stdout")

    parser = argparse.ArgumentParser(prog="hyperqss", description="Hypercycle secret sharing toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "classify":
            sp.add_argument("target", nargs="?", help="structure text")
    return parser


def _check(args) -> None:
    if not is_prime(args.p) or args.p < 5:
        raise UsageError("--p must be a prime >= 5")
    if args.n_info < 1 or args.n_decoy < 0:
        raise UsageError("--n-info must be >= 1 and --n-decoy >= 0")
    if not 0.0 <= args.threshold <= 1.0:
        raise UsageError("--threshold must lie in [0, 1]")
    if args.trials is None:
        args.trials = 100_000 if args.command == "verify" else 100
    if args.trials < 1:
        raise UsageError("--trials must be positive")
    if args.eve_phases:
        bad = set(args.eve_phases.split(",")) - {"distribution", "circulation", "delivery"}
        if bad:
            raise UsageError(f"unknown --eve-phases entries {sorted(bad)}")


def main(argv: Sequence[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        _check(args)
        obj, csv_text, plain = COMMANDS[args.command](args)
    except UsageError as exc:
        parser.error(str(exc))          # exits with status 2
    except (AccessError, FieldError, UnsupportedClass, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.format == "json":
        report = json.dumps(obj, indent=2, sort_keys=True, default=str) + "\n"
    elif args.format == "csv":
        report = csv_text
    else:
        report = plain
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(report)
    else:
        sys.stdout.write(report)
    return 0


if __name__ == "__main__":
    sys.exit(main())
