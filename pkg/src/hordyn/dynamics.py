"""Closed-loop learning dynamics in feedback with a population game.

Three learning rules are supported, all ending in the softmax choice map:

* ``standard``: replicator dynamics, score ``r`` integrates the payoff.
* ``higher_order``: the integrator plus an LTI system ``h(s)`` in parallel,
  both driven by the payoff; the strategy is ``softmax(r + m)``.
* ``cascade``: a general LTI system ``g(s)`` on every channel, strategy
  ``softmax(z)`` with ``z`` the LTI output.
"""

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError, IntegrationError, UnsupportedError
from .lti import TransferFunction, is_stable, realize
from .simplex import project_zero_mean, softmax

RULE_KINDS = ("standard", "higher_order", "cascade")


@dataclass(frozen=True)
class LearningRule:
    kind: str
    tf: TransferFunction = None
    stable: bool = None

    def __post_init__(self):
        if self.kind not in RULE_KINDS:
            raise DomainError(f"unknown rule kind {self.kind!r}")
        if self.kind == "standard":
            if self.tf is not None:
                raise DomainError("standard replicator dynamics takes no transfer function")
            return
        if self.tf is None:
            raise DomainError(f"{self.kind} rule needs a transfer function")
        if not self.tf.is_strictly_proper():
            raise UnsupportedError(f"{self.kind} rule needs a strictly proper transfer function")
        object.__setattr__(self, "stable", is_stable(self.tf))

    @classmethod
    def standard_rd(cls):
        return cls("standard")

    @classmethod
    def higher_order_rd(cls, h):
        return cls("higher_order", h)

    @classmethod
    def cascade(cls, g):
        return cls("cascade", g)

    def to_dict(self):
        d = {"kind": self.kind}
        if self.tf is not None:
            d.update(self.tf.to_dict())
        return d


class ClosedLoopSystem:
    """Learning rule in feedback with a game, as one flat ODE.

    ``layout`` maps block names (``"r"``, ``"xh"``, ``"xi"``) to slices of the
    state vector. LTI blocks use the channel-minor ordering of
    :class:`hordyn.lti.LiftedRealization`.

    With ``project=True`` (the default) the score block integrates the
    zero-mean part of the payoff. Softmax ignores the common mode, so the
    strategy path is unchanged while the score stays bounded.
    """

    def __init__(self, rule, game, project=True):
        self.rule = rule
        self.game = game
        self.n = game.n
        self.project = project
        n = self.n
        self.lifted = realize(rule.tf).lift(n) if rule.tf is not None else None
        if rule.kind == "standard":
            self.layout = {"r": slice(0, n)}
        elif rule.kind == "higher_order":
            self.layout = {"r": slice(0, n), "xh": slice(n, n + self.lifted.size)}
        else:
            self.layout = {"xi": slice(0, self.lifted.size)}
        self.size = max(s.stop for s in self.layout.values())

    def describe(self):
        return {"rule": self.rule.to_dict(), "game": _game_descriptor(self.game), "project": self.project}

    def score(self, state):
        """The softmax argument ``z`` for a state."""
        state = self._check(state)
        kind = self.rule.kind
        if kind == "standard":
            return state[self.layout["r"]]
        if kind == "higher_order":
            return state[self.layout["r"]] + self.lifted.output(state[self.layout["xh"]])
        return self.lifted.output(state[self.layout["xi"]])

    def strategy(self, state):
        return softmax(self.score(state))

    def _check(self, state):
        state = np.asarray(state, dtype=float)
        if state.shape != (self.size,):
            raise DomainError(f"state must have length {self.size}, got {state.shape}")
        return state

    def vector_field(self, state):
        state = self._check(state)
        if not np.all(np.isfinite(state)):
            raise IntegrationError("non-finite state", state=state.copy())
        x = softmax(self.score(state))
        p = self.game.payoff(x)
        if not np.all(np.isfinite(p)):
            raise IntegrationError("non-finite payoff", state=state.copy())
        out = np.empty(self.size)
        if "r" in self.layout:
            out[self.layout["r"]] = project_zero_mean(p) if self.project else p
        if "xh" in self.layout:
            out[self.layout["xh"]] = self.lifted.state_derivative(state[self.layout["xh"]], p)
        if "xi" in self.layout:
            out[self.layout["xi"]] = self.lifted.state_derivative(state[self.layout["xi"]], p)
        return out

    def initial_state(self, x0=None, internal=None):
        """State whose strategy is ``x0`` (uniform if omitted).

        Internal LTI states default to zero. For cascades, the LTI state is
        the minimum-norm solution of ``C xi_k = z_k`` channel by channel.
        """
        n = self.n
        z = np.zeros(n) if x0 is None else init_score_at(x0)
        state = np.zeros(self.size)
        kind = self.rule.kind
        if kind in ("standard", "higher_order"):
            state[self.layout["r"]] = z
            if kind == "higher_order" and internal is not None:
                state[self.layout["xh"]] = internal
        else:
            if internal is not None:
                state[self.layout["xi"]] = internal
                if x0 is not None:
                    raise DomainError("give either x0 or an internal state for a cascade, not both")
            else:
                C = self.lifted.ss.C[0]
                X = np.outer(C / (C @ C), z)
                state[self.layout["xi"]] = X.ravel()
        return state


def _game_descriptor(game):
    if hasattr(game, "to_dict"):
        return game.to_dict()
    return {"name": getattr(game, "name", None)}


def init_score_at(x, c=None):
    """Score ``log x + c`` whose softmax is ``x``; ``c`` defaults to the zero-mean choice."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or np.any(~np.isfinite(x)) or np.any(x <= 1e-300):
        raise DomainError(f"initial strategy must be strictly positive: {x}")
    x = x / x.sum()
    r = np.log(x)
    return r - r.mean() if c is None else r + c


def equilibrium_internal_state(rule, alpha, n):
    """Rest state of the added LTI block when the payoff sits at ``alpha 1``.

    Returns ``(xh, m)`` with ``xh = -alpha (A^{-1} B) kron 1_n`` and
    ``m = -alpha (C A^{-1} B) 1_n``.
    """
    if rule.kind != "higher_order":
        raise DomainError("equilibrium internal state is defined for higher-order rules")
    ss = realize(rule.tf)
    try:
        AinvB = np.linalg.solve(ss.A, ss.B)[:, 0]
    except np.linalg.LinAlgError:
        raise DomainError("A_h is singular") from None
    if np.linalg.cond(ss.A) > 1e12:
        raise DomainError("A_h is singular")
    xh = -alpha * np.kron(AinvB, np.ones(n))
    m = -alpha * float(ss.C[0] @ AinvB) * np.ones(n)
    return xh, m


# -- integration --------------------------------------------------------------


@dataclass
class Trajectory:
    t: np.ndarray
    states: np.ndarray
    x: np.ndarray
    p: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def n(self):
        return self.x.shape[1]

    def final_strategy(self):
        return self.x[-1]

    def to_csv(self, fh=None):
        """Write ``t,x1..xn,p1..pn`` at 17 significant digits; returns text if no handle."""
        buf = io.StringIO() if fh is None else fh
        w = csv.writer(buf, lineterminator="\n")
        n = self.n
        w.writerow(["t"] + [f"x{i + 1}" for i in range(n)] + [f"p{i + 1}" for i in range(n)])
        for t, x, p in zip(self.t, self.x, self.p):
            w.writerow([f"{v:.17g}" for v in (t, *x, *p)])
        if fh is None:
            return buf.getvalue()

    def meta_json(self):
        return json.dumps(self.meta, indent=2, sort_keys=True)


def _output_grid(t_final, output_interval):
    k = int(np.floor(t_final / output_interval + 1e-9))
    grid = output_interval * np.arange(k + 1)
    if t_final - grid[-1] > 1e-9 * max(1.0, t_final):
        grid = np.append(grid, t_final)
    else:
        grid[-1] = t_final
    return grid


def _rk4(f, y0, t_out, dt):
    ys = [y0.copy()]
    y, t = y0.copy(), 0.0
    for t_next in t_out[1:]:
        steps = max(int(round((t_next - t) / dt)), 1)
        h = (t_next - t) / steps
        for _ in range(steps):
            try:
                k1 = f(t, y)
                k2 = f(t + h / 2, y + h / 2 * k1)
                k3 = f(t + h / 2, y + h / 2 * k2)
                k4 = f(t + h, y + h * k3)
            except IntegrationError as exc:
                exc.t_last = t
                raise
            with np.errstate(over="ignore", invalid="ignore"):
                y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            t += h
            if not np.all(np.isfinite(y)):
                raise IntegrationError("non-finite state", t_last=t - h, state=ys[-1])
        t = t_next
        ys.append(y.copy())
    return np.array(ys)


def integrate(sys, state0, t_final, dt=1e-2, method="rk45", output_interval=0.1, rtol=1e-8, atol=1e-10):
    """Integrate the closed loop from ``state0`` over ``[0, t_final]``.

    ``rk4`` takes fixed steps of size ``dt`` (adjusted to land on output
    times). ``rk45`` is Dormand-Prince with adaptive steps, starting from
    ``dt``. Samples are returned every ``output_interval`` units of time.
    """
    if dt <= 0 or t_final <= 0 or output_interval <= 0:
        raise DomainError("dt, t_final and output_interval must be positive")
    y0 = sys._check(state0).copy()
    t_out = _output_grid(t_final, output_interval)

    def f(t, y):
        return sys.vector_field(y)

    if method == "rk4":
        states = _rk4(f, y0, t_out, dt)
    elif method == "rk45":
        last = [0.0]

        def f_tracked(t, y):
            out = f(t, y)
            last[0] = max(last[0], t) if np.all(np.isfinite(out)) else last[0]
            return out

        try:
            sol = solve_ivp(f_tracked, (0.0, t_final), y0, method="RK45", t_eval=t_out,
                            first_step=min(dt, t_final), rtol=rtol, atol=atol)
        except IntegrationError as exc:
            exc.t_last = last[0]
            raise
        if sol.status != 0:
            t_last = float(sol.t[-1]) if sol.t.size else 0.0
            raise IntegrationError(f"rk45 failed: {sol.message}", t_last=t_last)
        states = sol.y.T
    else:
        raise DomainError(f"unknown method {method!r}")
    if not np.all(np.isfinite(states[-1])):
        raise IntegrationError("non-finite final state", t_last=float(t_out[-2]))

    z = np.array([sys.score(s) for s in states])
    x = np.array([softmax(v) for v in z])
    p = np.array([sys.game.payoff(v) for v in x])
    meta = sys.describe()
    meta["integrator"] = {"method": method, "dt": dt, "t_final": t_final,
                          "output_interval": output_interval}
    if method == "rk45":
        meta["integrator"].update(rtol=rtol, atol=atol)
    return Trajectory(t_out, states, x, p, meta)
