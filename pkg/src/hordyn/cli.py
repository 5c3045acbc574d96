"""Command line: ``hordyn simulate | certify | analyze | list-builtins``.

Exit codes: 0 success or property holds, 1 usage error, 2 integration
failure, 3 property fails, 4 analysis inapplicable.
"""

import argparse
import json
import sys

import numpy as np

from . import analysis, games
from .config import ConfigError, ScenarioConfig
from .errors import ConvergenceError, DomainError, GameError, IntegrationError, UnsupportedError
from .dynamics import integrate
from .lti import TransferFunction, passivity_report
from .simplex import dirichlet_interior

EXIT_OK, EXIT_USAGE, EXIT_INTEGRATION, EXIT_PROPERTY, EXIT_INAPPLICABLE = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _csv_floats(text):
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _add_game_flags(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--builtin", "--game", dest="builtin", choices=sorted(games.BUILTINS))
    g.add_argument("--matrix", help="payoff matrix as JSON, e.g. '[[0,1],[1,0]]'")
    g.add_argument("--game-file", help="JSON game config file")


def _add_rule_flags(p):
    p.add_argument("--rule", choices=["rd", "hord", "cascade"])
    p.add_argument("--num", type=_csv_floats)
    p.add_argument("--den", type=_csv_floats)


def _add_run_flags(p):
    p.add_argument("--config", help="scenario JSON (or a run metadata file)")
    p.add_argument("--x0", help="comma-separated strategy, or 'random'")
    p.add_argument("--state0", type=_csv_floats)
    p.add_argument("--method", choices=["rk4", "rk45"])
    p.add_argument("--dt", type=float)
    p.add_argument("--t-final", type=float)
    p.add_argument("--output-interval", type=float)
    p.add_argument("--seed", type=int)


def build_parser():
    parser = _Parser(prog="hordyn", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", help="integrate a closed loop and write a trajectory CSV")
    _add_game_flags(sim)
    _add_rule_flags(sim)
    _add_run_flags(sim)
    sim.add_argument("--out", help="CSV path (default: stdout)")
    sim.add_argument("--meta", help="metadata JSON path (default: <out>.json when --out is given)")

    cert = sub.add_parser("certify", help="passivity report, plus the global certificate with a game")
    cert.add_argument("--num", type=_csv_floats)
    cert.add_argument("--den", type=_csv_floats)
    cert.add_argument("--strict", action="store_true", help="require strict passivity")
    cert.add_argument("--omega-max", type=float, default=1e4)
    cert.add_argument("--samples", type=int, default=2000)
    _add_game_flags(cert)

    an = sub.add_parser("analyze", help="linearization, Nash, fixed points, incremental probes")
    an.add_argument("what", choices=["linearize", "nash", "exrd-fixed-point", "incremental",
                                     "contractiveness", "variational"])
    _add_game_flags(an)
    _add_rule_flags(an)
    _add_run_flags(an)
    an.add_argument("--damping", type=float, default=0.5)
    an.add_argument("--samples", type=int, default=50)

    sub.add_parser("list-builtins", help="print the built-in games")
    return parser


def _game_cfg(args):
    if args.builtin:
        return {"builtin": args.builtin}
    if args.matrix:
        try:
            return {"matrix": json.loads(args.matrix)}
        except json.JSONDecodeError as exc:
            raise ConfigError("matrix", f"invalid JSON: {exc}") from None
    if args.game_file:
        with open(args.game_file) as fh:
            return json.load(fh)
    return None


def scenario_from_args(args):
    """Merge ``--config`` with explicit flags (flags win) and validate."""
    doc = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            doc = json.load(fh)
        if "config" in doc and isinstance(doc["config"], dict):
            doc = doc["config"]
    game = _game_cfg(args)
    if game is not None:
        doc["game"] = game
    if args.rule is not None:
        rule = {"kind": args.rule}
        if args.rule != "rd":
            if args.num is None:
                raise ConfigError("num", "missing --num")
            if args.den is None:
                raise ConfigError("den", "missing --den")
            rule.update(num=args.num, den=args.den)
        doc["rule"] = rule
    elif args.num is not None or args.den is not None:
        raise ConfigError("rule", "--num/--den need --rule hord or --rule cascade")
    if args.x0 is not None:
        doc["x0"] = "random" if args.x0 == "random" else _csv_floats(args.x0)
    if args.state0 is not None:
        doc["state0"] = args.state0
    integ = dict(doc.get("integrator", {}))
    for key in ("method", "dt", "t_final", "output_interval"):
        v = getattr(args, key)
        if v is not None:
            integ[key] = v
    if integ:
        doc["integrator"] = integ
    if args.seed is not None:
        doc["seed"] = args.seed
    return ScenarioConfig.from_dict(doc)


def _dump(obj, out):
    out.write(json.dumps(obj, indent=2, sort_keys=True, default=analysis._jsonable) + "\n")


def cmd_simulate(args, out):
    cfg = scenario_from_args(args)
    system = cfg.build_system()
    state0 = cfg.initial_state(system)
    it = cfg.integrator
    try:
        traj = integrate(system, state0, it["t_final"], dt=it["dt"], method=it["method"],
                         output_interval=it["output_interval"])
    except IntegrationError as exc:
        print(f"integration failed at t={exc.t_last}: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION
    traj.meta["config"] = cfg.to_dict()
    traj.meta["seed"] = cfg.seed
    if args.out:
        with open(args.out, "w", newline="") as fh:
            traj.to_csv(fh)
    else:
        traj.to_csv(out)
    meta_path = args.meta or (args.out + ".json" if args.out else None)
    if meta_path:
        with open(meta_path, "w") as fh:
            fh.write(traj.meta_json() + "\n")
    x = traj.final_strategy()
    print("final x = " + ",".join(f"{v:.17g}" for v in x), file=sys.stderr)
    return EXIT_OK


def _tf_from_args(args):
    if args.num is None:
        raise ConfigError("num", "missing --num")
    if args.den is None:
        raise ConfigError("den", "missing --den")
    return TransferFunction(args.num, args.den)


def cmd_certify(args, out):
    tf = _tf_from_args(args)
    rep = passivity_report(tf, omega_max=args.omega_max, samples=args.samples)
    game_cfg = _game_cfg(args)
    if game_cfg is None:
        _dump(rep.to_dict(), out)
        ok = rep.strictly_passive if args.strict else rep.passive
        return EXIT_OK if ok else EXIT_PROPERTY
    game = games.game_from_config(game_cfg)
    cert = analysis.theorem3_certificate(game, tf)
    _dump({"passivity": rep.to_dict(), "global_certificate": cert.to_dict()}, out)
    ok = cert.verdict == "exponential" if args.strict else cert.verdict != "none"
    return EXIT_OK if ok else EXIT_PROPERTY


def _random_state(system, rng):
    return rng.normal(size=system.size)


def cmd_analyze(args, out):
    what = args.what
    game_cfg = _game_cfg(args)
    if game_cfg is None and not args.config:
        raise ConfigError("game", "missing --builtin/--matrix/--game-file")

    if what in ("nash", "exrd-fixed-point", "contractiveness"):
        game = games.game_from_config(game_cfg) if game_cfg else scenario_from_args(args).build_game()
        if what == "contractiveness":
            rep = games.contractiveness(game, seed=args.seed or 0)
            _dump(rep.to_dict(), out)
            return EXIT_OK if rep.verdict != "not_contractive" else EXIT_PROPERTY
        if not isinstance(game, games.MatrixGame):
            return _inapplicable(f"{what} needs a matrix game")
        if what == "nash":
            x, alpha = games.interior_nash(game)
            resid = float(np.linalg.norm(game.F @ x - alpha))
            _dump({"x": x, "alpha": alpha, "residual": resid, "nash_gap": games.nash_gap(game, x)}, out)
            return EXIT_OK
        try:
            fp = analysis.fixed_point_exrd(game, damping=args.damping)
        except ConvergenceError as exc:
            _dump({"error": str(exc), "residuals": exc.residuals}, out)
            return EXIT_PROPERTY
        _dump(fp.to_dict(), out)
        return EXIT_OK

    cfg = scenario_from_args(args)
    game = cfg.build_game()
    rule = cfg.build_rule()
    if what == "linearize":
        if rule.kind == "cascade":
            return _inapplicable("linearize applies to rd and hord rules")
        rep = analysis.linearize_higher_order(game, rule.tf)
        _dump(rep.to_dict(), out)
        return EXIT_OK if rep.max_real_part < 0 else EXIT_PROPERTY
    if what == "variational":
        if rule.kind == "higher_order":
            rule = type(rule)("cascade", _parallel_with_integrator(rule.tf))
        g = rule.tf if rule.tf is not None else TransferFunction([1.0], [1.0, 0.0])
        rng = np.random.default_rng(cfg.seed)
        rep = analysis.variational_sample_check(game, g, dirichlet_interior(game.n, args.samples, rng))
        _dump(rep.to_dict(), out)
        return EXIT_OK if rep.max_abscissa < 0 else EXIT_PROPERTY
    # incremental
    system = cfg.build_system()
    rng = np.random.default_rng(cfg.seed)
    a, b = _random_state(system, rng), _random_state(system, rng)
    it = cfg.integrator
    try:
        rep = analysis.incremental_probe(system, a, b, it["t_final"], dt=it["dt"], method=it["method"],
                                         output_interval=it["output_interval"])
    except IntegrationError as exc:
        print(f"integration failed at t={exc.t_last}: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION
    _dump(rep.to_dict(), out)
    converging = rep.final_distance <= 1e-4 or (rep.fitted_rate is not None and rep.fitted_rate < 0)
    return EXIT_OK if converging else EXIT_PROPERTY


def _parallel_with_integrator(h):
    return TransferFunction([1.0], [1.0, 0.0]) + h


def _inapplicable(reason):
    print(f"inapplicable: {reason}", file=sys.stderr)
    return EXIT_INAPPLICABLE


def cmd_list_builtins(args, out):
    _dump({name: {"matrix": make().F.tolist()} for name, make in sorted(games.BUILTINS.items())}, out)
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "certify": cmd_certify, "analyze": cmd_analyze,
            "list-builtins": cmd_list_builtins}


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (games.NoInteriorNashError, games.BoundaryNashError) as exc:
        return _inapplicable(str(exc))
    except UnsupportedError as exc:
        return _inapplicable(str(exc))
    except (DomainError, GameError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
