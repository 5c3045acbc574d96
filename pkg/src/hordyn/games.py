"""Population games: matrix and black-box payoff maps, contractiveness, interior Nash."""

from dataclasses import dataclass, asdict

import numpy as np

from .errors import BoundaryNashError, DomainError, GameError, NoInteriorNashError
from .simplex import dirichlet_interior, tangent_basis

EXACT_TOL = 1e-10
SAMPLED_TOL = 1e-8
FD_STEP = 1e-6


class MatrixGame:
    """Linear game ``p = F x``."""

    def __init__(self, F, name=None):
        F = np.array(F, dtype=float)
        if F.ndim != 2 or F.shape[0] != F.shape[1] or F.shape[0] < 2:
            raise DomainError(f"payoff matrix must be square with n >= 2, got {F.shape}")
        if not np.all(np.isfinite(F)):
            raise DomainError("payoff matrix has non-finite entries")
        F.setflags(write=False)
        self.F = F
        self.n = F.shape[0]
        self.symmetric = bool(np.max(np.abs(F - F.T)) <= 1e-12)
        self.name = name

    def payoff(self, x):
        return self.F @ x

    def jacobian(self, x=None):
        return self.F

    def to_dict(self):
        if self.name is not None:
            return {"builtin": self.name}
        return {"matrix": self.F.tolist()}

    def __repr__(self):
        return f"MatrixGame({self.F.tolist()!r})"


class PopulationGame:
    """Black-box game ``p = F(x)`` with an optional Jacobian.

    Without a Jacobian, central differences with step 1e-6 are used.
    """

    def __init__(self, payoff, n, jacobian=None, name=None):
        if n < 2:
            raise DomainError("games need at least 2 strategies")
        self._payoff = payoff
        self._jacobian = jacobian
        self.n = int(n)
        self.name = name

    def payoff(self, x):
        try:
            p = np.asarray(self._payoff(x), dtype=float)
        except Exception as exc:  # noqa: BLE001 - user callback
            raise GameError(f"payoff evaluation failed at x={x}: {exc}") from exc
        if p.shape != (self.n,) or not np.all(np.isfinite(p)):
            raise GameError(f"payoff returned {p!r} at x={x}")
        return p

    def jacobian(self, x):
        if self._jacobian is not None:
            return np.asarray(self._jacobian(x), dtype=float)
        J = np.empty((self.n, self.n))
        for j in range(self.n):
            e = np.zeros(self.n)
            e[j] = FD_STEP
            J[:, j] = (self.payoff(x + e) - self.payoff(x - e)) / (2 * FD_STEP)
        return J


def rps_example():
    """Rock-paper-scissors."""
    return MatrixGame([[0, -1, 1], [1, 0, -1], [-1, 1, 0]], name="rps")


def congestion_example():
    """Three-route congestion network; payoff is minus the route cost."""
    return MatrixGame(-np.array([[3, 0, 1], [0, 2, 1], [1, 1, 3]], dtype=float), name="congestion")


def congestion_route_costs(x):
    """Route latencies on the network O->A->D, O->B->D, O->A->B->D.

    Edge latencies: O->A carries routes 1 and 3, A->D costs twice its flow,
    O->B and A->B equal their flow, B->D carries routes 2 and 3.
    """
    x1, x2, x3 = x
    oa, ad, ob, bd, ab = x1 + x3, 2 * x1, x2, x2 + x3, x3
    return np.array([oa + ad, ob + bd, oa + ab + bd])


BUILTINS = {"rps": rps_example, "congestion": congestion_example}


def game_from_config(cfg):
    """``{"matrix": [[...]]}`` or ``{"builtin": "rps" | "congestion"}``."""
    if not isinstance(cfg, dict) or len(cfg) != 1:
        raise DomainError("game config needs exactly one of 'matrix' or 'builtin'")
    (key, value), = cfg.items()
    if key == "builtin":
        if value not in BUILTINS:
            raise DomainError(f"unknown builtin game {value!r}; choose from {sorted(BUILTINS)}")
        return BUILTINS[value]()
    if key == "matrix":
        return MatrixGame(value)
    raise DomainError(f"unknown game field {key!r}")


@dataclass(frozen=True)
class ContractivenessReport:
    verdict: str
    max_tangent_eig: float
    min_tangent_eig: float
    sample_count: int
    certified: bool

    def to_dict(self):
        return asdict(self)


def tangent_restriction(M, basis=None):
    N = tangent_basis(M.shape[0]) if basis is None else basis
    return N.T @ M @ N


def _classify(eigs, tol):
    hi, lo = float(np.max(eigs)), float(np.min(eigs))
    if max(abs(hi), abs(lo)) <= tol:
        return "lossless"
    if hi < -tol:
        return "strictly_contractive"
    if hi <= tol:
        return "contractive"
    return "not_contractive"


def contractiveness(game, samples=200, seed=0):
    """Classify a game by the sign of ``z^T DF(x) z`` on the tangent space.

    Matrix games get an exact verdict from one eigensolve. Black-box games
    are probed at Dirichlet-uniform interior points; that verdict is
    evidence only (``certified=False``).
    """
    if samples < 1:
        raise DomainError("samples must be >= 1")
    N = tangent_basis(game.n)
    if isinstance(game, MatrixGame):
        S = 0.5 * (game.F + game.F.T)
        eigs = np.linalg.eigvalsh(N.T @ S @ N)
        return ContractivenessReport(
            _classify(eigs, EXACT_TOL), float(eigs.max()), float(eigs.min()), 1, True
        )
    rng = np.random.default_rng(seed)
    his, los = [], []
    for x in dirichlet_interior(game.n, samples, rng):
        J = game.jacobian(x)
        eigs = np.linalg.eigvalsh(N.T @ (0.5 * (J + J.T)) @ N)
        his.append(eigs.max())
        los.append(eigs.min())
    eigs = np.array([max(his), min(los)])
    return ContractivenessReport(
        _classify(eigs, SAMPLED_TOL), float(eigs[0]), float(eigs[1]), samples, False
    )


def interior_nash(game):
    """Unique interior Nash candidate of a matrix game.

    Solves ``F x = alpha 1``, ``1^T x = 1`` as one bordered linear system and
    returns ``(x, alpha)``.
    """
    n = game.n
    K = np.zeros((n + 1, n + 1))
    K[:n, :n] = game.F
    K[:n, n] = -1.0
    K[n, :n] = 1.0
    rhs = np.zeros(n + 1)
    rhs[n] = 1.0
    if np.linalg.matrix_rank(K) < n + 1:
        raise NoInteriorNashError("bordered Nash system is singular")
    sol = np.linalg.solve(K, rhs)
    x, alpha = sol[:n], float(sol[n])
    if np.any(x <= 0):
        raise BoundaryNashError(f"Nash candidate {x} is not interior")
    resid = np.linalg.norm(game.F @ x - alpha)
    if resid > EXACT_TOL:
        raise NoInteriorNashError(f"bordered system ill-conditioned (residual {resid:.3g})")
    return x, alpha


def nash_gap(game, x):
    """``max_i F_i(x) - x^T F(x)``; zero exactly at Nash equilibria."""
    p = game.payoff(np.asarray(x, dtype=float))
    return float(np.max(p) - x @ p)
