"""Command-line driver: reproducible experiment runs and table emission.

Subcommands
-----------
``run``          protocol runs: exact or sampled code-based fingerprinting,
                 or the small-alphabet phase protocol
``classical``    exhaustive SMP strategy search, lower-bound calculators,
                 break-even input length
``feasibility``  pulse-train slot counts, photon statistics, noisy Monte
                 Carlo error rates and dark-count sweeps
``codes``        export / import (show) / verify code files

Every option may also be given in a plain-text config file (one section
per subcommand, ``key = value``); explicit flags win over the file.
Unknown keys are rejected.  All randomness flows from one master seed
which is printed in every report.  Exit codes: 0 success, 1 usage or
domain error, 2 resource limit.
"""

from __future__ import annotations

import argparse
import configparser
import math
import re
import sys
from dataclasses import replace

from . import classical, ecc, physical, protocol, reports
from .errors import ConfigError, DomainError, QfpError, ResourceLimitError


class _UsageError(QfpError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits 2; we reserve 2
        raise _UsageError(f"{self.prog}: {message}")


# --- value parsers ----------------------------------------------------------

_LENGTH_UNITS = {"": 1.0, "m": 1.0, "km": 1e3}
_TIME_UNITS = {"": 1.0, "s": 1.0, "ms": 1e-3, "us": 1e-6, "ns": 1e-9,
               "ps": 1e-12}
_UNIT_RE = re.compile(r"^\s*([-+0-9.eE]+)\s*([a-z]*)\s*$")


def _with_units(units, what):
    def parse(text: str) -> float:
        match = _UNIT_RE.match(text)
        if not match or match.group(2) not in units:
            raise ValueError(
                f"cannot parse {what} {text!r} "
                f"(units: {', '.join(u for u in units if u)})"
            )
        return float(match.group(1)) * units[match.group(2)]

    return parse


parse_length = _with_units(_LENGTH_UNITS, "length")
parse_time = _with_units(_TIME_UNITS, "time")


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"cannot parse boolean {text!r}")


def _float_list(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part.strip()]


# --- config-file keys per subcommand (types drive conversion) ---------------

_CONFIG_TYPES = {
    "run": {
        "code": str, "n": int, "r": int, "m": int, "code_seed": int,
        "code_file": str, "x": str, "y": str, "exact": _parse_bool,
        "k": int, "epsilon": float, "trials": int, "seed": int,
        "phase_protocol": _parse_bool, "q": int, "phase_x": int,
        "phase_y": int, "all_pairs": _parse_bool, "out": str, "json": str,
    },
    "classical": {
        "q": int, "alice": int, "bob": int, "bounds": _parse_bool,
        "breakeven": _parse_bool, "n": int, "epsilon": float, "mu": float,
        "out": str, "json": str,
    },
    "feasibility": {
        "separation": parse_length, "period": parse_time, "index": float,
        "window_factor": float, "mu_photon": float, "noise": _parse_bool,
        "pn": float, "k": int, "trials": int, "seed": int,
        "dark": float, "transmission": float, "efficiency": float,
        "slots": int, "deterministic_source": _parse_bool,
        "sweep_dark": _float_list, "out": str, "json": str,
    },
    "codes": {},
}


def _load_config_section(path: str, section: str) -> dict:
    types = _CONFIG_TYPES[section]
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh, source=path)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    if not parser.has_section(section):
        return {}
    merged = {}
    for key, raw in parser.items(section):
        name = key.replace("-", "_")
        if name not in types:
            raise ConfigError(
                f"config {path!r} section [{section}]: unknown key {key!r}"
            )
        try:
            merged[name] = types[name](raw)
        except ValueError as exc:
            raise ConfigError(
                f"config {path!r} section [{section}], key {key!r}: {exc}"
            ) from exc
    return merged


def _apply_config(args: argparse.Namespace) -> None:
    if getattr(args, "config", None):
        for name, value in _load_config_section(args.config,
                                                args.command).items():
            if getattr(args, name, None) is None:
                setattr(args, name, value)


def _require(args, names) -> None:
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise _UsageError(
            f"missing required option(s): "
            + ", ".join("--" + n.replace("_", "-") for n in missing)
        )


def _default(args, name, value) -> None:
    if getattr(args, name, None) is None:
        setattr(args, name, value)


# --- run --------------------------------------------------------------------

PHASE_CSV_FIELDS = ("q", "x", "y", "pN_exact", "referee_error", "avg_error")


def _build_code(args) -> ecc.Code:
    if args.code_file is not None:
        return ecc.load_code(args.code_file)
    _require(args, ["code"])
    kind = args.code.strip().lower()
    if kind in ("identity", "repetition", "hadamard"):
        _require(args, ["n"])
    if kind == "identity":
        return ecc.identity_code(args.n)
    if kind == "repetition":
        _require(args, ["r"])
        return ecc.repetition_code(args.n, args.r)
    if kind == "hadamard":
        return ecc.hadamard_code(args.n)
    if kind in ("random", "randomlinear", "random-linear"):
        _require(args, ["n", "m"])
        _default(args, "code_seed", 0)
        return ecc.random_linear_code(args.n, args.m, args.code_seed)
    raise DomainError(f"unknown code kind {args.code!r}")


def _emit(args, fieldnames, rows, payload) -> None:
    if args.out:
        reports.write_csv(args.out, fieldnames, rows)
        print(f"wrote {args.out}")
    if args.json:
        reports.write_json(args.json, payload)
        print(f"wrote {args.json}")


def cmd_run(args) -> int:
    if args.phase_protocol:
        _require(args, ["q"])
        q = args.q
        if args.all_pairs:
            pairs = [(x, y) for x in range(q) for y in range(q)]
        else:
            _require(args, ["phase_x", "phase_y"])
            pairs = [(args.phase_x, args.phase_y)]
        avg = protocol.phase_protocol_average_error(q)
        rows = []
        for x, y in pairs:
            pn = protocol.phase_protocol_pn(q, x, y)
            rows.append({
                "q": q, "x": x, "y": y, "pN_exact": pn,
                "referee_error": pn if x == y else 1.0 - pn,
                "avg_error": avg,
            })
        payload = {"command": "run", "mode": "phase_protocol", "q": q,
                   "avg_error": avg, "rows": rows}
        print(f"phase protocol q={q}: average referee error = {avg!r}")
        _emit(args, PHASE_CSV_FIELDS, rows, payload)
        return 0

    code = _build_code(args)
    _require(args, ["x", "y"])
    if args.exact:
        row = protocol.exact_report_row(code, args.x, args.y)
        rows = [row]
        payload = {"command": "run", "mode": "exact", "rows": rows}
        print(f"exact: pN = {row['pN_exact']!r} verdict = {row['verdict']}")
    else:
        _default(args, "epsilon", 0.01)
        _default(args, "trials", 1)
        _default(args, "seed", 0)
        if args.k is not None:
            params = protocol.ProtocolParams(code.n, code, args.k,
                                             args.epsilon)
        else:
            params = protocol.ProtocolParams.for_error_target(code,
                                                              args.epsilon)
        batch = protocol.run_batch(params, args.x, args.y, args.seed,
                                   args.trials)
        rows = protocol.batch_report_rows(params, args.x, args.y, batch)
        payload = {"command": "run", "mode": "sampled",
                   "master_seed": batch.master_seed, "k": params.k,
                   "trials": batch.trials,
                   "not_equal_fraction": batch.not_equal_fraction,
                   "rows": rows}
        print(f"master_seed = {batch.master_seed}")
        print(f"sampled {batch.trials} trials, k = {params.k}: "
              f"NotEqual fraction = {batch.not_equal_fraction!r} "
              f"(exact pN = {batch.pn_exact!r})")
    _emit(args, protocol.RUN_CSV_FIELDS, rows, payload)
    return 0


# --- classical ---------------------------------------------------------------

BOUNDS_CSV_FIELDS = ("n", "ab_lower", "max_lower", "shared_bit_lower",
                     "quantum_cost_per_party", "breakeven")
SMP_CSV_FIELDS = ("q", "alice_msgs", "bob_msgs", "min_avg_error",
                  "misclassified_pairs", "worst_case_error",
                  "strategies_searched")


def cmd_classical(args) -> int:
    if args.bounds:
        _require(args, ["n"])
        if args.epsilon is not None or args.mu is not None:
            _default(args, "epsilon", 0.01)
            _default(args, "mu", 2.0)
            report = classical.full_bound_report(args.n, args.epsilon,
                                                 args.mu)
        else:
            report = classical.smp_equality_lower_bounds(args.n)
        row = {
            "n": report.n, "ab_lower": report.ab_lower,
            "max_lower": report.max_lower,
            "shared_bit_lower": report.shared_bit_lower,
            "quantum_cost_per_party": report.quantum_cost_per_party,
            "breakeven": report.breakeven,
        }
        print(f"n = {report.n}: ab_lower = {report.ab_lower!r}, "
              f"max_lower = {report.max_lower!r}, "
              f"shared_bit_lower = {report.shared_bit_lower!r}")
        if report.quantum_cost_per_party is not None:
            print(f"quantum cost per party = "
                  f"{report.quantum_cost_per_party!r}, "
                  f"breakeven = {report.breakeven}")
        _emit(args, BOUNDS_CSV_FIELDS, [row],
              {"command": "classical", "mode": "bounds", "rows": [row]})
        return 0

    if args.breakeven:
        _default(args, "epsilon", 0.01)
        _default(args, "mu", 2.0)
        n_star = classical.breakeven_n(args.epsilon, args.mu)
        nu = ecc.justesen_nu(args.mu)
        k = protocol.repetitions_needed(nu, args.epsilon)

        def sides(n):
            return k * (1.0 + math.log2(n)), math.sqrt(n) / 40.0

        lhs, rhs = sides(n_star)
        lhs_h, rhs_h = sides(max(1, n_star // 2))
        print(f"break-even n* = {n_star} (epsilon = {args.epsilon}, "
              f"mu = {args.mu}, nu = {nu!r}, k = {k})")
        print(f"at n*:   quantum k(1+log2 n) = {lhs!r} <= sqrt(n)/40 = "
              f"{rhs!r}")
        print(f"at n*/2: quantum k(1+log2 n) = {lhs_h!r} >  sqrt(n)/40 = "
              f"{rhs_h!r}")
        payload = {"command": "classical", "mode": "breakeven",
                   "epsilon": args.epsilon, "mu": args.mu, "nu": nu, "k": k,
                   "n_star": n_star, "quantum_at_n_star": lhs,
                   "classical_at_n_star": rhs,
                   "quantum_at_half": lhs_h, "classical_at_half": rhs_h}
        if args.json:
            reports.write_json(args.json, payload)
            print(f"wrote {args.json}")
        return 0

    _require(args, ["q", "alice", "bob"])
    result = classical.brute_force_smp(args.q, args.alice, args.bob)
    row = {
        "q": result.q, "alice_msgs": result.alice_msgs,
        "bob_msgs": result.bob_msgs,
        "min_avg_error": str(result.average_error),
        "misclassified_pairs": result.misclassified_pairs,
        "worst_case_error": result.worst_case_error,
        "strategies_searched": result.strategies_searched,
    }
    witness = result.witness
    print(f"searched {result.strategies_searched} strategies: "
          f"min average error = {result.average_error} "
          f"({result.misclassified_pairs} of {result.q**2} pairs)")
    print(f"alice map:   {list(witness.alice_map)}")
    print(f"bob map:     {list(witness.bob_map)}")
    print("referee table (rows = alice message, cols = bob message):")
    for i, table_row in enumerate(witness.referee):
        print(f"  msg {i}: " + "  ".join(v.value for v in table_row))
    payload = {"command": "classical", "mode": "brute_force", "rows": [row],
               "witness": {
                   "alice_map": list(witness.alice_map),
                   "bob_map": list(witness.bob_map),
                   "referee": [[v.value for v in r]
                               for r in witness.referee]}}
    _emit(args, SMP_CSV_FIELDS, [row], payload)
    return 0


# --- feasibility --------------------------------------------------------------

NOISE_CSV_FIELDS = ("parameter", "value", "false_equal_rate",
                    "false_equal_stderr", "false_notequal_rate",
                    "false_notequal_stderr", "abort_rate", "abort_stderr")


def _build_model(args) -> physical.ImperfectionModel:
    kwargs = {}
    if args.mu_photon is not None:
        kwargs["mean_photon_number"] = args.mu_photon
    if args.transmission is not None:
        kwargs["transmission"] = args.transmission
    if args.efficiency is not None:
        kwargs["detector_efficiency"] = args.efficiency
    if args.dark is not None:
        kwargs["dark_count_prob"] = args.dark
    if args.period is not None:
        kwargs["pulse_period"] = args.period
    if args.separation is not None:
        kwargs["separation"] = args.separation
    if args.index is not None:
        kwargs["refractive_index"] = args.index
    if args.deterministic_source is not None:
        kwargs["deterministic_source"] = args.deterministic_source
    if args.window_factor is not None:
        kwargs["window_factor"] = args.window_factor
    return physical.ImperfectionModel(**kwargs)


def _rates_row(parameter: str, value: float,
               rates: physical.NoiseRates) -> dict:
    return {
        "parameter": parameter, "value": value,
        "false_equal_rate": rates.false_equal_rate,
        "false_equal_stderr": rates.false_equal_stderr,
        "false_notequal_rate": rates.false_notequal_rate,
        "false_notequal_stderr": rates.false_notequal_stderr,
        "abort_rate": rates.abort_rate,
        "abort_stderr": rates.abort_stderr,
    }


def cmd_feasibility(args) -> int:
    model = _build_model(args)
    if args.noise or args.sweep_dark is not None:
        _require(args, ["pn"])
        _default(args, "k", 1)
        _default(args, "trials", 10_000)
        _default(args, "seed", 0)
        print(f"master_seed = {args.seed}")
        if args.sweep_dark is not None:
            rows = []
            for value in args.sweep_dark:
                swept = replace(model, dark_count_prob=value)
                rates = physical.conditional_error_with_noise(
                    swept, args.pn, args.k, args.trials, args.seed,
                    slots=args.slots)
                rows.append(_rates_row("dark_count_prob", value, rates))
                print(f"dark={value!r}: false_eq={rates.false_equal_rate!r} "
                      f"false_neq={rates.false_notequal_rate!r} "
                      f"abort={rates.abort_rate!r}")
        else:
            rates = physical.conditional_error_with_noise(
                model, args.pn, args.k, args.trials, args.seed,
                slots=args.slots)
            rows = [_rates_row("dark_count_prob", model.dark_count_prob,
                               rates)]
            print(f"false_equal = {rates.false_equal_rate!r} "
                  f"(+- {rates.false_equal_stderr!r})")
            print(f"false_notequal = {rates.false_notequal_rate!r} "
                  f"(+- {rates.false_notequal_stderr!r})")
            print(f"abort = {rates.abort_rate!r} "
                  f"(+- {rates.abort_stderr!r})")
        payload = {"command": "feasibility", "mode": "noise",
                   "master_seed": args.seed, "k": args.k,
                   "trials": args.trials, "pn": args.pn, "rows": rows}
        _emit(args, NOISE_CSV_FIELDS, rows, payload)
        return 0

    slots = physical.feasible_d(model)
    payload = {
        "command": "feasibility", "mode": "slots",
        "separation_m": model.separation,
        "pulse_period_s": model.pulse_period,
        "refractive_index": model.refractive_index,
        "window_factor": model.window_factor,
        "d_vacuum": slots.d_vacuum,
        "d_fiber": slots.d_fiber,
        "d_nominal_3us": slots.d_nominal_3us,
    }
    if args.mu_photon is not None:
        dist = physical.photon_number_distribution(args.mu_photon)
        payload["photon_statistics"] = {
            "mean_photon_number": args.mu_photon,
            "p_zero": dist.p_zero, "p_one": dist.p_one,
            "p_multi": dist.p_multi,
        }
        print(f"photon statistics (mean {args.mu_photon!r}): "
              f"p0 = {dist.p_zero!r}, p1 = {dist.p_one!r}, "
              f"p_multi = {dist.p_multi!r}")
    print(f"d_vacuum = {slots.d_vacuum}, d_fiber = {slots.d_fiber}, "
          f"d_nominal_3us = {slots.d_nominal_3us}")
    if args.json:
        reports.write_json(args.json, payload)
        print(f"wrote {args.json}")
    return 0


# --- codes ---------------------------------------------------------------------

def cmd_codes(args) -> int:
    if args.action == "export":
        ns = argparse.Namespace(code=args.kind, n=args.n, r=args.r, m=args.m,
                                code_seed=args.seed, code_file=None)
        code = _build_code(ns)
        ecc.save_code(code, args.out)
        print(f"wrote {args.out}: n={code.n} m={code.m} t={code.t} "
              f"kind={code.kind.value}")
        return 0
    code = ecc.load_code(args.infile)
    if args.action in ("show", "import"):
        print(f"n={code.n} m={code.m} t={code.t} kind={code.kind.value} "
              f"relative_distance={code.relative_distance!r}"
              + (" DEGENERATE" if code.degenerate else ""))
        return 0
    # verify: recompute the distance exhaustively and compare
    actual = ecc.min_distance_bruteforce(code)
    print(f"declared t = {code.t}, brute-forced t = {actual}")
    if actual != code.t:
        print("MISMATCH: declared distance is wrong", file=sys.stderr)
        return 1
    print("distance verified")
    return 0


# --- parser -----------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="qfp", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    run = sub.add_parser("run", help="protocol runs")
    run.add_argument("--config")
    run.add_argument("--code",
                     help="identity | repetition | hadamard | random")
    run.add_argument("--n", type=int, help="message length")
    run.add_argument("--r", type=int, help="repetition factor")
    run.add_argument("--m", type=int, help="codeword length (random codes)")
    run.add_argument("--code-seed", type=int, dest="code_seed")
    run.add_argument("--code-file", dest="code_file",
                     help="load a saved code instead of constructing one")
    run.add_argument("--x", help="Alice's input bits, e.g. 0000")
    run.add_argument("--y", help="Bob's input bits")
    run.add_argument("--exact", action="store_true", default=None,
                     help="exact port statistics only, no sampling")
    run.add_argument("--k", type=int, help="repetitions per protocol")
    run.add_argument("--epsilon", type=float,
                     help="target error (sets k when --k is absent)")
    run.add_argument("--trials", type=int, help="sampled protocols to run")
    run.add_argument("--seed", type=int, help="master seed")
    run.add_argument("--phase-protocol", action="store_true", default=None,
                     dest="phase_protocol",
                     help="single-symbol phase protocol instead of codes")
    run.add_argument("--q", type=int, help="phase-protocol alphabet size")
    run.add_argument("--phase-x", type=int, dest="phase_x")
    run.add_argument("--phase-y", type=int, dest="phase_y")
    run.add_argument("--all-pairs", action="store_true", default=None,
                     dest="all_pairs")
    run.add_argument("--out", help="CSV output path")
    run.add_argument("--json", help="JSON output path")
    run.set_defaults(handler=cmd_run)

    cla = sub.add_parser("classical", help="classical baselines")
    cla.add_argument("--config")
    cla.add_argument("--q", type=int, help="input alphabet size")
    cla.add_argument("--alice", type=int, help="alice's message count")
    cla.add_argument("--bob", type=int, help="bob's message count")
    cla.add_argument("--bounds", action="store_true", default=None,
                     help="lower-bound calculator for n-bit inputs")
    cla.add_argument("--breakeven", action="store_true", default=None,
                     help="search the quantum/classical break-even n")
    cla.add_argument("--n", type=int, help="input length for --bounds")
    cla.add_argument("--epsilon", type=float)
    cla.add_argument("--mu", type=float, help="code rate parameter")
    cla.add_argument("--out", help="CSV output path")
    cla.add_argument("--json", help="JSON output path")
    cla.set_defaults(handler=cmd_classical)

    fea = sub.add_parser("feasibility", help="pulse-train feasibility")
    fea.add_argument("--config")
    fea.add_argument("--L", "--separation", dest="separation",
                     type=parse_length, help="Alice-Bob distance (m, km)")
    fea.add_argument("--period", type=parse_time,
                     help="pulse period (s, ms, us, ns, ps)")
    fea.add_argument("--index", type=float, help="refractive index")
    fea.add_argument("--window-factor", type=float, dest="window_factor")
    fea.add_argument("--mu-photon", type=float, dest="mu_photon",
                     help="mean photon number of the attenuated train")
    fea.add_argument("--noise", action="store_true", default=None,
                     help="Monte Carlo error rates under imperfections")
    fea.add_argument("--pn", type=float,
                     help="per-run N-click probability of the clean protocol")
    fea.add_argument("--k", type=int)
    fea.add_argument("--trials", type=int)
    fea.add_argument("--seed", type=int)
    fea.add_argument("--dark", type=float, help="dark count prob per slot")
    fea.add_argument("--transmission", type=float)
    fea.add_argument("--efficiency", type=float)
    fea.add_argument("--slots", type=int,
                     help="dark-count slot window (default: from geometry)")
    fea.add_argument("--deterministic-source", action="store_true",
                     default=None, dest="deterministic_source")
    fea.add_argument("--sweep-dark", type=_float_list, dest="sweep_dark",
                     help="comma-separated dark count probabilities")
    fea.add_argument("--out", help="CSV output path")
    fea.add_argument("--json", help="JSON output path")
    fea.set_defaults(handler=cmd_feasibility)

    cod = sub.add_parser("codes", help="code file tools")
    cod_sub = cod.add_subparsers(dest="action", parser_class=_Parser)
    exp = cod_sub.add_parser("export")
    exp.add_argument("--kind", required=True,
                     help="identity | repetition | hadamard | random")
    exp.add_argument("--n", type=int, required=True)
    exp.add_argument("--r", type=int)
    exp.add_argument("--m", type=int)
    exp.add_argument("--seed", type=int)
    exp.add_argument("--out", required=True)
    show = cod_sub.add_parser("show", aliases=["import"])
    show.add_argument("--in", dest="infile", required=True)
    ver = cod_sub.add_parser("verify")
    ver.add_argument("--in", dest="infile", required=True)
    cod.set_defaults(handler=cmd_codes)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_usage(sys.stderr)
            return 1
        if args.command == "codes" and getattr(args, "action", None) is None:
            print("qfp codes: choose one of export, import, show, verify",
                  file=sys.stderr)
            return 1
        if args.command != "codes":
            _apply_config(args)
        return args.handler(args)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return 2
    except (QfpError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
