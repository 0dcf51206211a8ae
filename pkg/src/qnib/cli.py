"""``qnib`` command-line interface.

Exit codes: 0 success, 2 usage error (bad flags, malformed state/channel
strings, invalid config), 3 property violation found by ``verify``.
"""
import argparse
import json
import math
import os
import sys

import numpy as np

from . import suites
from .bell import (chsh_max, correlation_tensor, is_chsh_nbc_unital, mermin_svetlichny_bounds,
                   seesaw_max)
from .channels import QubitChannel, apply_to_party, is_cp
from .compat import (UnsharpObservable, is_2ibc_unital, is_n_ibc_white_noise, jointly_measurable,
                     white_noise_ibc_threshold)
from .errors import QnibError
from .experiments import (DEFAULT_SEED, MC_HEADER, SUMMARY_HEADER, SWEEP_HEADER, WGAP_HEADER,
                          MonteCarloConfig, SweepConfig, run_montecarlo, run_sweep, run_w_gap_scan,
                          w_gap_endpoints)
from .states import StateSpec, bell_state, make_state
from .thresholds import analytic_threshold, numeric_threshold

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VIOLATION = 3

SQRT2 = math.sqrt(2)


class UsageError(Exception):
    pass


def _fmt(x):
    return repr(float(x))


def _emit(dataset, out):
    if out:
        dataset.write(out)
    else:
        sys.stdout.write(dataset.to_csv())


# ---------------------------------------------------------------- argument types

def _state(text):
    try:
        return StateSpec.from_text(text, renormalize=True)
    except QnibError as exc:
        raise UsageError(f"--state: {exc}") from None


def _channel(text, flag="--noise"):
    try:
        ch = QubitChannel.from_text(text)
    except QnibError as exc:
        raise UsageError(f"{flag}: {exc}") from None
    check = is_cp(ch)
    if not check:
        raise UsageError(f"{flag}: channel is not completely positive: {check.witness}")
    return ch


def _parties(text):
    """``A``, ``AC``, ``0,2`` ... -> sorted list of 0-based party indices."""
    letters = {"a": 0, "b": 1, "c": 2}
    out = set()
    for tok in text.replace(",", " ").split():
        if tok.isdigit():
            out.add(int(tok))
        else:
            for ch in tok.lower():
                if ch not in letters:
                    raise UsageError(f"--party: unknown party {ch!r}")
                out.add(letters[ch])
    if not out or max(out) > 2:
        raise UsageError("--party: expected parties among A, B, C")
    return sorted(out)


_AXES = {"x": (1.0, 0.0, 0.0), "y": (0.0, 1.0, 0.0), "z": (0.0, 0.0, 1.0)}


def _observable(text, default_axis="z"):
    fields = {}
    for chunk in filter(None, (c.strip() for c in text.split(","))):
        key, sep, val = chunk.partition(":")
        if not sep:
            raise UsageError(f"--pair: malformed field {chunk!r} (expected key:value)")
        fields[key.strip().lower()] = val.strip()
    unknown = set(fields) - {"x", "eta", "axis", "theta"}
    if unknown:
        raise UsageError(f"--pair: unknown field {sorted(unknown)[0]!r}")
    try:
        x = float(fields.get("x", 0.0))
    except ValueError:
        raise UsageError("--pair: field x is not a number") from None
    try:
        eta = float(fields.get("eta", 1.0))
    except ValueError:
        raise UsageError("--pair: field eta is not a number") from None
    if "theta" in fields:
        try:
            th = math.radians(float(fields["theta"]))
        except ValueError:
            raise UsageError("--pair: field theta is not a number") from None
        axis = (math.sin(th), 0.0, math.cos(th))
    else:
        name = fields.get("axis", default_axis).lower()
        if name not in _AXES:
            raise UsageError(f"--pair: field axis must be x, y or z, got {name!r}")
        axis = _AXES[name]
    try:
        return UnsharpObservable.along(x, eta, axis)
    except QnibError as exc:
        raise UsageError(f"--pair: {exc}") from None


def _pair(text):
    """``OBS;OBS`` or ``OBS;orthogonal`` (same bias and sharpness along x)."""
    left, sep, right = text.partition(";")
    if not sep:
        raise UsageError("--pair: expected two observables separated by ';'")
    a = _observable(left)
    if right.strip().lower() in ("orthogonal", "orth", "perp"):
        b = UnsharpObservable.along(a.x, a.eta, (1.0, 0.0, 0.0))
    else:
        b = _observable(right, default_axis="x")
    return a, b


def _grid(items):
    """``name=start:stop:steps`` entries -> SweepConfig grid."""
    grid = {}
    for item in items or ():
        name, sep, rng = item.partition("=")
        parts = rng.split(":")
        if not sep or len(parts) != 3:
            raise UsageError(f"--grid: malformed entry {item!r} (expected name=start:stop:steps)")
        try:
            grid[name.strip()] = (float(parts[0]), float(parts[1]), int(parts[2]))
        except ValueError:
            raise UsageError(f"--grid: non-numeric range in {item!r}") from None
    return grid


# ---------------------------------------------------------------- subcommands

def cmd_compat(args):
    if args.white_noise is not None:
        bound = white_noise_ibc_threshold(args.dim, args.n)
        ok = is_n_ibc_white_noise(args.white_noise, args.dim, args.n)
        print(f"white-noise threshold (d={args.dim}, n={args.n}) = {bound} = {float(bound):.12g}")
        print(f"eta = {args.white_noise}: {'incompatibility breaking' if ok else 'not incompatibility breaking'}")
    if args.channel:
        ch = _channel(args.channel, "--channel")
        if not ch.is_unital:
            raise UsageError("--channel: 2-IBC query needs a unital channel")
        ok = is_2ibc_unital(ch)
        print(f"channel T = {tuple(ch.T)}: {'2-IBC' if ok else 'not 2-IBC'}")
    if args.pair:
        a, b = _pair(args.pair)
        print(f"A: x={a.x!r} eta={a.eta!r} axis={a.axis}")
        print(f"B: x={b.x!r} eta={b.eta!r} axis={b.axis}")
        print("compatible" if jointly_measurable(a, b) else "incompatible")
    if not (args.pair or args.channel or args.white_noise is not None):
        raise UsageError("compat: give at least one of --pair, --channel, --white-noise")
    return EXIT_OK


def cmd_chsh(args):
    ch = _channel(args.noise)
    rho = apply_to_party(ch, bell_state(args.bell), [0])
    value = chsh_max(rho)
    print(f"state: ({args.bell}) with noise {ch.to_text()} on party A")
    print(f"chsh_max = {_fmt(value)}")
    print("CHSH violation possible" if value > 2.0 + 1e-10 else "CHSH satisfied (local)")
    if ch.is_unital:
        nbc = is_chsh_nbc_unital(ch)
        ibc = is_2ibc_unital(ch.conjugate())
        print(f"CHSH-NBC: {'yes' if nbc else 'no'}")
        print(f"conjugate 2-IBC: {'yes' if ibc else 'no'}")
    if args.seesaw:
        print(f"# seed={args.seed}")
        v, _ = seesaw_max(rho, "CHSH", restarts=args.restarts, rng_seed=args.seed)
        print(f"seesaw CHSH = {_fmt(v)}")
    return EXIT_OK


def cmd_tripartite(args):
    spec = _state(args.state)
    ch = _channel(args.noise)
    parties = _parties(args.party)
    rho = apply_to_party(ch, make_state(spec), parties)
    t = correlation_tensor(rho)
    lam = t.singular_values()
    bm, bs = mermin_svetlichny_bounds(t)
    print(f"state: {spec.to_text()}")
    print(f"noise: {ch.to_text()} on parties {','.join('ABC'[p] for p in parties)}")
    print("flattening M[j, 3i+k]:")
    with np.printoptions(precision=6, suppress=True, linewidth=120):
        print(t.flattening)
    print("singular values: " + ", ".join(_fmt(v) for v in lam))
    print(f"lambda_1 = {_fmt(lam[0])}")
    print(f"maxM <= {_fmt(bm)}")
    print(f"maxS <= {_fmt(bs)}")
    if args.restarts > 0:
        print(f"# seed={args.seed}")
        for which in ("Mermin", "Svetlichny"):
            v, _ = seesaw_max(rho, which, restarts=args.restarts, rng_seed=args.seed)
            print(f"seesaw {which} = {_fmt(v)}")
    print("M-nonlocal possible" if bm > 2.0 + 1e-12 else "M-local (Mermin cannot be violated)")
    print("S-nonlocal possible" if bs > 4.0 + 1e-12 else "S-local (Svetlichny cannot be violated)")
    return EXIT_OK


def cmd_threshold(args):
    spec = _state(args.state)
    if args.numeric or spec.family == "Acin":
        rep = numeric_threshold(make_state(spec), args.n_noised, spec)
        source = "numeric"
    else:
        rep = analytic_threshold(spec, args.n_noised)
        source = "analytic"
    print(f"state: {spec.to_text()}")
    print(f"source: {source}")
    print(f"n_noised = {rep.n_noised}")
    print(f"lambda_max_unit = {_fmt(rep.lambda_max_unit)}")
    print(f"eta_M = {_fmt(rep.eta_M)}")
    print(f"eta_S = {_fmt(rep.eta_S)}")
    print(f"eta_2ibc = {_fmt(rep.eta_2ibc)}")
    if rep.eta_M_envelope is not None:
        print(f"eta_M_envelope = {_fmt(rep.eta_M_envelope)}")
        print(f"eta_S_envelope = {_fmt(rep.eta_S_envelope)}")
    print(f"always_breaks_flag = {rep.always_breaks_flag}")
    return EXIT_OK


def cmd_sweep(args):
    if args.w_gap:
        _emit(run_w_gap_scan(), args.out)
        lo, hi = w_gap_endpoints()
        print(f"# gap interval ({lo:.10f}, {hi:.10f})", file=sys.stderr)
        return EXIT_OK
    if not args.family:
        raise UsageError("sweep: --family is required (or use --w-gap)")
    grid = _grid(args.grid)
    if not grid:
        raise UsageError("sweep: at least one --grid entry is required")
    try:
        cfg = SweepConfig(args.family, grid, args.n_noised, args.out)
    except QnibError as exc:
        raise UsageError(f"sweep: {exc}") from None
    _emit(run_sweep(cfg), args.out)
    return EXIT_OK


def cmd_montecarlo(args):
    try:
        cfg = MonteCarloConfig(args.samples, seed=args.seed, workers=args.workers,
                               noised_party=_parties(args.party)[0])
    except QnibError as exc:
        raise UsageError(f"montecarlo: {exc}") from None
    print(f"# seed={args.seed}")
    res = run_montecarlo(cfg)
    if args.out:
        res.dataset().write(args.out)
    if args.summary_out:
        res.summary().write(args.summary_out)
    sys.stdout.write(res.summary().to_csv())
    if args.compare:
        print("# lambda_index,kind,empirical,quoted,reproduced")
        for k, kind, emp, quoted, ok in res.published_comparison():
            emp_s = "" if emp is None else _fmt(emp)
            print(f"# {k},{kind},{emp_s},{quoted!r},{'yes' if ok else 'no (discrepancy)'}")
    return EXIT_OK


def cmd_verify(args):
    names = suites.SUITES if args.suite == "all" else (args.suite,)
    print(f"# seed={args.seed}")
    failed = 0
    for name in names:
        data = suites.run_suite(name, seed=args.seed, workers=args.workers, size=args.size)
        ok = data.column("ok")
        passed = sum(bool(v) for v in ok)
        failed += len(ok) - passed
        print(f"{name}: {passed}/{len(ok)} passed")
        if args.out:
            os.makedirs(args.out, exist_ok=True)
            data.write(os.path.join(args.out, f"{name}.csv"))
    if failed:
        print(f"FAIL: {failed} violation(s)")
        return EXIT_VIOLATION
    print("OK")
    return EXIT_OK


# ---------------------------------------------------------------- parser

def _globals(parser, suppress):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--seed", type=_seed, default=d(DEFAULT_SEED),
                        help="RNG seed for randomized steps, decimal or 0x-hex (default 0x5EED)")
    parser.add_argument("--workers", type=int, default=d(None),
                        help="worker processes (default: $QNIB_WORKERS or 1)")
    parser.add_argument("--out", default=d(None), help="output CSV path (verify: output directory)")
    parser.add_argument("--config", default=d(None),
                        help="JSON file of flag defaults; explicit flags override it")


def _seed(text):
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("seed must be non-negative")
    return v


SCHEMAS = f"""CSV schemas (LF line endings, header row always written):
  sweep            {','.join(SWEEP_HEADER)}
  sweep --w-gap    {','.join(WGAP_HEADER)}
  montecarlo       {','.join(MC_HEADER)}
  summary          {','.join(SUMMARY_HEADER)}
"""

STATE_HELP = ("state spec FAMILY:key=value,...; families GHZ (a,b), W (a,b,c), MS (a,b), "
              "MixedGHZ (p), Acin (l0..l4,phi); amplitudes within 1e-3 of unit norm are rescaled")
CHANNEL_HELP = "channel iso:ETA, diag:EX,EY,EZ or t=(tx,ty,tz);T=(ex,ey,ez) (default iso:1)"


def build_parser():
    p = argparse.ArgumentParser(
        prog="qnib", description="Nonlocality and incompatibility breaking qubit channels.",
        epilog=SCHEMAS + "\nExit codes: 0 success, 2 usage error, 3 property violation.",
        formatter_class=argparse.RawDescriptionHelpFormatter)
    _globals(p, suppress=False)
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, help_, epilog=""):
        sp = sub.add_parser(name, help=help_, description=help_, epilog=epilog,
                            formatter_class=argparse.RawDescriptionHelpFormatter)
        _globals(sp, suppress=True)
        return sp

    sp = add("compat", "joint measurability and incompatibility-breaking queries",
             "observable syntax: x:BIAS,eta:SHARPNESS[,axis:x|y|z | ,theta:DEG]\n"
             "  e.g. --pair 'x:0,eta:0.70;orthogonal'   (second observable along x)\n")
    sp.add_argument("--pair", help="two observables OBS;OBS or OBS;orthogonal")
    sp.add_argument("--channel", help="unital channel whose conjugate is tested for 2-IBC")
    sp.add_argument("--white-noise", type=float, help="white-noise visibility to classify")
    sp.add_argument("--dim", type=int, default=2, help="Hilbert space dimension (default 2)")
    sp.add_argument("--n", type=int, default=2, help="number of observables (default 2)")
    sp.set_defaults(func=cmd_compat)

    sp = add("chsh", "maximal CHSH value of a noised Bell state and the NBC / 2-IBC verdicts")
    sp.add_argument("--bell", default="phi+", choices=["phi+", "phi-", "psi+", "psi-"],
                    help="two-qubit Bell state (default phi+)")
    sp.add_argument("--noise", default="iso:1", help=CHANNEL_HELP)
    sp.add_argument("--seesaw", action="store_true", help="also run the see-saw oracle")
    sp.add_argument("--restarts", type=int, default=64, help="see-saw restarts (default 64)")
    sp.set_defaults(func=cmd_chsh)

    sp = add("tripartite", "correlation tensor, singular values, Mermin/Svetlichny bounds and see-saw values")
    sp.add_argument("--state", required=True, help=STATE_HELP)
    sp.add_argument("--noise", default="iso:1", help=CHANNEL_HELP)
    sp.add_argument("--party", default="A", help="noised parties, e.g. A, AB, ABC (default A)")
    sp.add_argument("--restarts", type=int, default=64,
                    help="see-saw restarts; 0 skips the see-saw (default 64)")
    sp.set_defaults(func=cmd_tripartite)

    sp = add("threshold", "noise thresholds eta_M, eta_S for a state")
    sp.add_argument("--state", required=True, help=STATE_HELP)
    sp.add_argument("--n-noised", type=int, default=1, choices=[1, 2, 3],
                    help="number of parties under isotropic noise (default 1)")
    sp.add_argument("--numeric", action="store_true", help="use the numeric tensor instead of closed forms")
    sp.set_defaults(func=cmd_threshold)

    sp = add("sweep", "threshold sweep over a state family, written as CSV",
             "grid syntax: NAME=START:STOP:STEPS (repeatable); GHZ/MS sweep a, MixedGHZ p, W a and c\n"
             "config JSON keys: family, grid {name: [start, stop, steps]}, n_noised, out\n"
             f"columns: {','.join(SWEEP_HEADER)}\n"
             f"--w-gap columns: {','.join(WGAP_HEADER)}\n")
    sp.add_argument("--family", help="GHZ, W, MS or MixedGHZ")
    sp.add_argument("--grid", action="append", help="parameter range NAME=START:STOP:STEPS")
    sp.add_argument("--n-noised", type=int, default=1, choices=[1, 2, 3],
                    help="number of noised parties (default 1)")
    sp.add_argument("--w-gap", action="store_true",
                    help="isotropic-noise scan of the symmetric W state over [0.69, 0.74]")
    sp.set_defaults(func=cmd_sweep)

    sp = add("montecarlo", "random Acin states under random diagonal noise",
             f"--out columns: {','.join(MC_HEADER)}\n"
             f"summary columns (stdout, --summary-out): {','.join(SUMMARY_HEADER)}\n")
    sp.add_argument("--samples", type=int, default=100000, help="number of samples (default 100000)")
    sp.add_argument("--party", default="A", help="noised party A, B or C (default A)")
    sp.add_argument("--summary-out", help="write the summary CSV here")
    sp.add_argument("--compare", action="store_true", help="print the comparison with the quoted minima")
    sp.set_defaults(func=cmd_montecarlo)

    sp = add("verify", "randomized property suites; exit 3 on any violation",
             "suites: duality, oracle (see-saw <= bound), theorem (CHSH-NBC <=> 2-IBC),\n"
             "        chsh (closed form vs see-saw), scaling (eta^n law)\n"
             "--out DIR writes DIR/<suite>.csv with an ok column per item\n")
    sp.add_argument("--suite", default="all", choices=("all",) + suites.SUITES)
    sp.add_argument("--size", type=int, help="override the suite's item count")
    sp.set_defaults(func=cmd_verify)
    return p


def _apply_config(parser, argv):
    """Re-parse with the JSON config's values installed as defaults."""
    args = parser.parse_args(argv)
    if not args.config:
        return args
    try:
        with open(args.config, encoding="utf-8") as fh:
            conf = json.load(fh)
    except (OSError, ValueError) as exc:
        parser.error(f"--config: {exc}")
    if not isinstance(conf, dict):
        parser.error("--config: top level must be a JSON object")
    sub = parser._subparsers._group_actions[0].choices[args.command]
    dests = {a.dest for a in sub._actions}
    defaults = {}
    for key, val in conf.items():
        dest = key.replace("-", "_")
        if dest not in dests:
            parser.error(f"--config: unknown key {key!r} for {args.command}")
        if dest == "grid" and isinstance(val, dict):
            val = [f"{k}={v[0]}:{v[1]}:{v[2]}" for k, v in val.items()]
        if dest == "seed" and isinstance(val, str):
            val = _seed(val)
        defaults[dest] = val
    sub.set_defaults(**defaults)
    parser.set_defaults(**{k: v for k, v in defaults.items() if k in ("seed", "workers", "out")})
    return parser.parse_args(argv)


def main(argv=None):
    parser = build_parser()
    args = _apply_config(parser, argv)
    if args.workers is not None and args.workers < 1:
        parser.error("--workers must be >= 1")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"qnib {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QnibError as exc:
        print(f"qnib {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
