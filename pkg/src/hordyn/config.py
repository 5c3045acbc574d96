"""Scenario configuration shared by the command line and saved run metadata."""

from dataclasses import dataclass, field

import numpy as np

from .dynamics import ClosedLoopSystem, LearningRule
from .errors import DomainError, UnsupportedError
from .games import game_from_config
from .lti import TransferFunction
from .simplex import dirichlet_interior

RULE_NAMES = {"rd": "standard", "hord": "higher_order", "cascade": "cascade"}
INTEGRATOR_DEFAULTS = {"method": "rk45", "dt": 0.01, "t_final": 100.0, "output_interval": 0.1}


class ConfigError(DomainError):
    """Malformed configuration; ``field`` names the offending entry."""

    def __init__(self, field_name, message):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


def _reject_unknown(d, allowed, where):
    if not isinstance(d, dict):
        raise ConfigError(where, "expected an object")
    extra = set(d) - set(allowed)
    if extra:
        raise ConfigError(f"{where}.{sorted(extra)[0]}" if where else sorted(extra)[0], "unknown field")


def _floats(v, name):
    try:
        out = [float(c) for c in v]
    except (TypeError, ValueError):
        raise ConfigError(name, f"expected a list of numbers, got {v!r}") from None
    if not out or not all(np.isfinite(out)):
        raise ConfigError(name, "expected finite numbers")
    return out


@dataclass
class ScenarioConfig:
    game: dict
    rule: dict = field(default_factory=lambda: {"kind": "rd"})
    x0: object = None
    state0: list = None
    integrator: dict = field(default_factory=lambda: dict(INTEGRATOR_DEFAULTS))
    seed: int = 0

    FIELDS = ("game", "rule", "x0", "state0", "integrator", "seed")

    @classmethod
    def from_dict(cls, d):
        _reject_unknown(d, cls.FIELDS, "")
        if "game" not in d:
            raise ConfigError("game", "missing")
        game = d["game"]
        _reject_unknown(game, ("builtin", "matrix"), "game")
        try:
            game_from_config(game)
        except DomainError as exc:
            raise ConfigError("game", str(exc)) from None

        rule = dict(d.get("rule", {"kind": "rd"}))
        _reject_unknown(rule, ("kind", "num", "den"), "rule")
        kind = rule.get("kind")
        if kind not in RULE_NAMES:
            raise ConfigError("rule.kind", f"expected one of {sorted(RULE_NAMES)}, got {kind!r}")
        if kind == "rd":
            if "num" in rule or "den" in rule:
                raise ConfigError("rule.num", "standard replicator dynamics takes no transfer function")
        else:
            for key in ("num", "den"):
                if key not in rule:
                    raise ConfigError(f"rule.{key}", "missing")
                rule[key] = _floats(rule[key], f"rule.{key}")
            try:
                LearningRule(RULE_NAMES[kind], TransferFunction(rule["num"], rule["den"]))
            except (DomainError, UnsupportedError) as exc:
                raise ConfigError("rule.num", str(exc)) from None

        x0 = d.get("x0")
        if x0 is not None and x0 != "random":
            x0 = _floats(x0, "x0")
        state0 = d.get("state0")
        if state0 is not None:
            state0 = _floats(state0, "state0")
            if x0 is not None:
                raise ConfigError("state0", "give x0 or state0, not both")

        integ = dict(INTEGRATOR_DEFAULTS)
        given = d.get("integrator", {})
        _reject_unknown(given, INTEGRATOR_DEFAULTS, "integrator")
        integ.update(given)
        if integ["method"] not in ("rk4", "rk45"):
            raise ConfigError("integrator.method", f"expected rk4 or rk45, got {integ['method']!r}")
        for key in ("dt", "t_final", "output_interval"):
            try:
                integ[key] = float(integ[key])
            except (TypeError, ValueError):
                raise ConfigError(f"integrator.{key}", "expected a number") from None
            if not integ[key] > 0:
                raise ConfigError(f"integrator.{key}", "must be positive")

        seed = d.get("seed", 0)
        if not isinstance(seed, int) or isinstance(seed, bool):
            raise ConfigError("seed", "expected an integer")
        return cls(game=dict(game), rule=rule, x0=x0, state0=state0, integrator=integ, seed=seed)

    def to_dict(self):
        d = {"game": self.game, "rule": self.rule, "integrator": self.integrator, "seed": self.seed}
        if self.x0 is not None:
            d["x0"] = self.x0
        if self.state0 is not None:
            d["state0"] = self.state0
        return d

    def build_game(self):
        return game_from_config(self.game)

    def build_rule(self):
        kind = RULE_NAMES[self.rule["kind"]]
        tf = None if kind == "standard" else TransferFunction(self.rule["num"], self.rule["den"])
        return LearningRule(kind, tf)

    def build_system(self):
        return ClosedLoopSystem(self.build_rule(), self.build_game())

    def initial_state(self, sys):
        if self.state0 is not None:
            state = np.array(self.state0)
            if state.shape != (sys.size,):
                raise ConfigError("state0", f"expected {sys.size} entries, got {state.size}")
            return state
        if self.x0 == "random":
            rng = np.random.default_rng(self.seed)
            return sys.initial_state(dirichlet_interior(sys.n, 1, rng)[0])
        if self.x0 is not None:
            if len(self.x0) != sys.n:
                raise ConfigError("x0", f"expected {sys.n} entries, got {len(self.x0)}")
            if min(self.x0) <= 0:
                raise ConfigError("x0", "entries must be strictly positive")
        return sys.initial_state(self.x0)
