"""Command-line front end: ``entlock verify|compute|table``.

Exit codes: 0 when every checked property holds, 1 on a violation, 2 on bad
flags or malformed input files. Every number written is in bits. Output is a
pure function of the flags and the seed, so repeated runs are byte-identical
unless ``--timing`` is given.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import entropy as ent
from . import harness
from .errors import EntlockError
from .measures import (
    accessible_information,
    entanglement_of_purification,
    flower_ensemble,
    squashed_measurement_bound,
    squashed_upper_bound,
)
from .optimize import OptConfig
from .serialize import FormatError, load_state
from .states import (
    AbelianGroup,
    DensityOperator,
    PureState,
    basis_ensembles,
    flower_purification_general,
    flower_state,
)
from .linalg import haar_unitary

VERIFY = ["lemma1", "lemma1-relent", "omega", "prop1", "prop2", "prop3",
          "omega-corollary", "coherent", "maassen-uffink", "all"]
COMPUTE = ["esq-flower", "ep", "iacc", "ef-flower", "entropy", "cmi"]
TABLE = ["locking-gap", "slack-histogram"]


class UsageError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def _common(p: argparse.ArgumentParser):
    p.add_argument("--d", type=_positive)
    p.add_argument("--m", type=_positive)
    p.add_argument("--samples", type=_nonneg)
    p.add_argument("--seed", type=int)
    p.add_argument("--restarts", type=_positive, default=16)
    p.add_argument("--threads", type=_positive, default=1)
    p.add_argument("--quick", action="store_true", help="cap samples at 100 and dimensions at 3")
    p.add_argument("--format", choices=["json", "csv"])
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--timing", action="store_true", help="record wall-clock time (breaks byte-identity)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entlock", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a property sweep")
    v.add_argument("target", choices=VERIFY)
    _common(v)
    v.add_argument("--group", choices=["zd", "z2l"], default="zd")
    v.add_argument("--env-dims", type=_int_list)
    v.add_argument("--env-dim", type=_positive)

    c = sub.add_parser("compute", help="evaluate a measure")
    c.add_argument("target", choices=COMPUTE)
    _common(c)
    c.add_argument("--env-dim", type=_positive)
    c.add_argument("--ext-dim", type=_positive)
    c.add_argument("--outcomes", type=_positive)
    c.add_argument("--state", help="serialized state (JSON)")
    c.add_argument("--aside", type=_int_list, help="factors on the A side")
    c.add_argument("--bside", type=_int_list, help="factors on the B side (default: the rest)")
    c.add_argument("--cond", type=_int_list, default=[], help="conditioning factors for cmi")
    c.add_argument("--conjugate-pair", action="store_true",
                   help="iacc: equal mixture of the computational and Fourier basis ensembles")

    t = sub.add_parser("table", help="emit plot-ready CSV")
    t.add_argument("target", choices=TABLE)
    _common(t)
    t.add_argument("--dims", type=_int_list, default=[2, 4, 8])
    t.add_argument("--bins", type=_positive, default=50)
    t.add_argument("--group", choices=["zd", "z2l"], default="zd")
    return parser


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("ENTLOCK_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"ENTLOCK_SEED must be an integer, got {env!r}") from None


def _cfg(args, seed: int) -> OptConfig:
    return OptConfig(restarts=4 if args.quick and args.restarts == 16 else args.restarts,
                     seed=seed, threads=args.threads)


def _emit(text: str, args):
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# -- verify --------------------------------------------------------------------

def _verify_one(target: str, args, seed: int) -> harness.SweepReport:
    quick = args.quick

    def dim(default):
        d = args.d or default
        return min(d, 3) if quick else d

    def n(default):
        s = args.samples if args.samples is not None else default
        return min(s, 100) if quick else s

    kw = {"seed": seed, "threads": args.threads, "timed": args.timing}
    if target == "lemma1":
        return harness.verify_lemma1(dim(3), args.group, n(1000), **kw)
    if target == "lemma1-relent":
        return harness.verify_lemma1_relent_form(dim(3), n(1000), group=args.group, **kw)
    if target == "omega":
        return harness.verify_omega_identities(dim(3), n(1000), group=args.group, **kw)
    if target == "prop1":
        return harness.verify_prop1(dim(2), n(1000), args.env_dims or (1, 2, 4), **kw)
    if target == "prop2":
        return harness.verify_prop2_formula(dim(2), args.m or 2, n(200), env_dim=args.env_dim, **kw)
    if target == "prop3":
        return harness.verify_prop3(dim(3), n(500), **kw)
    if target == "omega-corollary":
        return harness.verify_omega_corollary(dim(2), _cfg(args, seed), timed=args.timing)
    if target == "coherent":
        return harness.verify_coherent_info_bound(dim(3), n(1000), group=args.group, **kw)
    if target == "maassen-uffink":
        return harness.verify_maassen_uffink(dim(5), n(1000), **kw)
    raise UsageError(f"unknown verify target {target!r}")


def _verify_csv(reports) -> str:
    rows = []
    for r in reports:
        rows.append([r.property, "", r.samples, r.violations, r.min_slack])
        for name, b in sorted(r.breakdown.items()):
            if isinstance(b, dict):
                rows.append([r.property, name, b["samples"], b["violations"], b["min_slack"]])
    return _csv(["property", "group", "samples", "violations", "min_slack_bits"], rows)


def cmd_verify(args) -> int:
    seed = _seed(args)
    if args.target == "all":
        if args.d is not None:
            raise UsageError("--d is not accepted by 'verify all'")
        reports = harness.verify_all(seed, args.quick, args.samples, args.threads,
                                     _cfg(args, seed), args.timing)
    else:
        reports = [_verify_one(args.target, args, seed)]
    total = sum(r.violations for r in reports)
    if args.format == "csv":
        _emit(_verify_csv(reports), args)
    elif args.target == "all":
        _emit(_json({"reports": [r.to_dict() for r in reports], "violations": total,
                     "passed": total == 0, "seed": seed}), args)
    else:
        _emit(_json(reports[0].to_dict()), args)
    return 0 if total == 0 else 1


# -- compute -------------------------------------------------------------------

def _bit_value(quantity: str, value: float, **extra) -> dict:
    return {"quantity": quantity, "value_bits": value, **extra}


def _need_state(args):
    if not args.state:
        raise UsageError(f"'compute {args.target}' needs --state FILE")
    try:
        return load_state(args.state)
    except OSError as exc:
        raise UsageError(f"cannot read state file: {exc.strerror}") from None


def _sides(args, n: int) -> tuple[list[int], list[int]]:
    if not args.aside:
        raise UsageError("--aside is required")
    a = args.aside
    b = args.bside if args.bside else [k for k in range(n) if k not in a and k not in args.cond]
    for k in a + b + args.cond:
        if not 0 <= k < n:
            raise UsageError(f"factor {k} out of range for {n} factors")
    return a, b


def _flower_unitaries(d: int, m: int, seed: int):
    rng = np.random.default_rng([seed, 10**6])
    return [np.eye(d)] + [haar_unitary(d, rng) for _ in range(m - 1)]


def cmd_compute(args) -> dict:
    seed = _seed(args)
    cfg = _cfg(args, seed)
    target = args.target
    if target == "esq-flower":
        d, m = args.d or 2, args.m or 1
        vs = _flower_unitaries(d, m, seed)
        rho = flower_state(d, vs)
        env = args.env_dim or 4
        rep = squashed_upper_bound(rho, [0, 1], [2, 3], env, cfg)
        outcomes = args.outcomes or 2 * rep.meta["purifier_dim"]
        meas = squashed_measurement_bound(rho, [0, 1], [2, 3], outcomes, cfg)
        out = rep.to_dict()
        out["meta"].update({"d": d, "m": m, "formula_bits": 0.5 * math.log2(d) + math.log2(m) + 1,
                            "measurement_bound_bits": meas.value, "measurement_outcomes": outcomes})
        return out
    if target == "iacc":
        d = args.d or 2
        e0, e1 = basis_ensembles(d, AbelianGroup.cyclic(d).fourier())
        ens = e0.mix(e1) if args.conjugate_pair else e0
        rep = accessible_information(ens, args.outcomes or d * d, cfg)
        out = rep.to_dict()
        out["meta"].update({"d": d, "conjugate_pair": args.conjugate_pair})
        return out
    if target == "ef-flower":
        d, m = args.d or 2, args.m or 1
        vs = _flower_unitaries(d, m, seed)
        s_a = ent.subsystem_entropy(flower_purification_general(d, vs), [0, 1])
        rep = accessible_information(flower_ensemble(d, vs), args.outcomes or d * d, cfg)
        return _bit_value("entanglement_of_formation", s_a - rep.value, d=d, m=m,
                          entropy_bits=s_a, accessible_information_bits=rep.value,
                          iacc_report=rep.to_dict())
    state = _need_state(args)
    rho = state.density() if isinstance(state, PureState) else state
    n = len(rho.dims)
    if target == "entropy":
        factors = args.aside if args.aside else list(range(n))
        for k in factors:
            if not 0 <= k < n:
                raise UsageError(f"factor {k} out of range for {n} factors")
        return _bit_value("entropy", ent.subsystem_entropy(state, factors), factors=factors)
    a, b = _sides(args, n)
    if target == "cmi":
        if args.cond:
            val = ent.conditional_mutual_information(rho, a, b, args.cond)
        else:
            val = ent.mutual_information(rho, a, b)
        return _bit_value("conditional_mutual_information" if args.cond else "mutual_information",
                          val, aside=a, bside=b, cond=args.cond)
    if target == "ep":
        k = args.ext_dim or DensityOperator(rho.mat, rho.dims, validate=False).rank()
        rep = entanglement_of_purification(rho, a, b, k, cfg)
        out = rep.to_dict()
        out["meta"].update({"aside": a, "bside": b})
        return out
    raise UsageError(f"unknown compute target {target!r}")


# -- table ---------------------------------------------------------------------

def table_locking_gap(dims) -> str:
    rows = []
    for d in dims:
        if d < 2:
            raise UsageError("dimensions must be >= 2")
        rho = flower_state(d)
        full = 0.5 * ent.mutual_information(rho, [0, 1], [2, 3])
        flag = harness.classical_flag_extension(d)
        after = 0.5 * ent.conditional_mutual_information(flag, [0], [1, 2], [3])
        rows.append([d, full, after, full - after])
    return _csv(["d", "E_sq_full_bits", "E_sq_after_qubit_loss_bits", "gap_bits"], rows)


def table_slack_histogram(d: int, samples: int, bins: int, seed: int, group: str, threads: int) -> str:
    header = ["bin_lo_bits", "bin_hi_bits", "count"]
    slacks = [t["slack"] for _, t in harness.lemma1_slacks(d, samples, seed, group, threads=threads)]
    if not slacks:
        return _csv(header, [])
    counts, edges = np.histogram(slacks, bins=bins)
    rows = [[float(edges[i]), float(edges[i + 1]), int(counts[i])] for i in range(bins)]
    return _csv(header, rows)


def cmd_table(args) -> str:
    seed = _seed(args)
    if args.format == "json":
        raise UsageError("tables are emitted as CSV only")
    if args.target == "locking-gap":
        dims = [min(d, 3) for d in args.dims] if args.quick else args.dims
        return table_locking_gap(dims)
    d = args.d or 2
    samples = args.samples if args.samples is not None else 1000
    if args.quick:
        d, samples = min(d, 3), min(samples, 100)
    return table_slack_histogram(d, samples, args.bins, seed, args.group, args.threads)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "compute":
            if args.format == "csv":
                raise UsageError("compute emits JSON only")
            _emit(_json(cmd_compute(args)), args)
            return 0
        _emit(cmd_table(args), args)
        return 0
    except FormatError as exc:
        print(f"entlock: malformed state file: {exc}", file=sys.stderr)
        return 2
    except (UsageError, EntlockError, ValueError) as exc:
        print(f"entlock: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
