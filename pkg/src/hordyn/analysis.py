"""Stability certificates and diagnostics for the closed loops.

* :func:`linearize_higher_order`: spectrum of the closed loop linearized at an
  interior Nash equilibrium, in tangent coordinates.
* :func:`theorem3_certificate`: frequency-domain certificate for cascades
  ``g(s) I_n`` in symmetric strictly contractive matrix games.
* :func:`incremental_probe` and :func:`variational_sample_check`: empirical
  evidence of incremental stability.
* :func:`fixed_point_exrd`: rest point of exponential replicator dynamics.
"""

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import ConvergenceError, DomainError
from .games import EXACT_TOL, MatrixGame, contractiveness, interior_nash
from .lti import frequency_grid, lti_strictly_proper_check, passivity_report, realize
from .dynamics import integrate
from .simplex import choice_jacobian, softmax, tangent_basis

MARGINAL_TOL = 1e-10
MONOTONE_SLACK = 1e-9
NOISE_FLOOR = 1e-8
R2_GATE = 0.99


def sort_eigenvalues(eigs):
    """Sorted by (real, imag), descending."""
    eigs = np.asarray(eigs, dtype=complex)
    order = np.lexsort((-eigs.imag, -eigs.real))
    return eigs[order]


def eigen_pairs(eigs):
    return [[float(e.real), float(e.imag)] for e in sort_eigenvalues(eigs)]


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    raise TypeError(f"cannot serialize {type(obj)}")


class _Report:
    def to_dict(self):
        d = asdict(self)
        if "eigenvalues" in d:
            d["eigenvalues"] = eigen_pairs(self.eigenvalues)
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, default=_jsonable)


@dataclass(frozen=True)
class LinearizationReport(_Report):
    reduced_dims: int
    eigenvalues: np.ndarray
    max_real_part: float
    Q_tilde_min_eig: float
    F_tilde_max_eig: float
    equilibrium: np.ndarray
    alpha: float


def reduced_closed_loop_matrix(F_tilde, Q_tilde, ss=None, integrator=True):
    """State matrix of the reduced linear loop.

    Reduced state ``(dr, dxh)`` where ``dx = Q~ (dr + C~ dxh)`` and
    ``dp = F~ dx``; ``dr`` integrates ``dp`` when ``integrator`` is set and
    ``dxh`` follows ``A~ dxh + B~ dp`` when a realization ``ss`` is given.
    """
    k = F_tilde.shape[0]
    K = F_tilde @ Q_tilde
    I = np.eye(k)
    if ss is None:
        if not integrator:
            raise DomainError("need an integrator or an LTI block")
        return K
    At, Bt, Ct = np.kron(ss.A, I), np.kron(ss.B, I), np.kron(ss.C, I)
    if not integrator:
        return At + Bt @ K @ Ct
    top = np.hstack([K, K @ Ct])
    bottom = np.hstack([Bt @ K, At + Bt @ K @ Ct])
    return np.vstack([top, bottom])


def linearize_higher_order(game, h=None, basis=None):
    """Linearize higher-order replicator dynamics at the interior Nash equilibrium.

    ``h=None`` gives standard replicator dynamics. The result is invariant
    (up to similarity) to the choice of tangent ``basis``.
    """
    if not isinstance(game, MatrixGame):
        raise DomainError("linearization needs a matrix game")
    x_star, alpha = interior_nash(game)
    n = game.n
    N = tangent_basis(n) if basis is None else np.asarray(basis, dtype=float)
    Qt = N.T @ choice_jacobian(x_star) @ N
    Ft = N.T @ game.F @ N
    ss = None if h is None else realize(h)
    M = reduced_closed_loop_matrix(Ft, Qt, ss)
    eigs = sort_eigenvalues(np.linalg.eigvals(M))
    return LinearizationReport(
        reduced_dims=M.shape[0],
        eigenvalues=eigs,
        max_real_part=float(eigs.real.max()),
        Q_tilde_min_eig=float(np.linalg.eigvalsh(Qt).min()),
        F_tilde_max_eig=float(np.linalg.eigvalsh(0.5 * (Ft + Ft.T)).max()),
        equilibrium=x_star,
        alpha=alpha,
    )


@dataclass(frozen=True)
class Theorem3Certificate(_Report):
    game_symmetric: bool
    game_strictly_contractive: bool
    g_passive: bool
    g_strictly_passive: bool
    g_observable: bool
    min_herm_eig_over_omega: float
    verdict: str
    refused: bool
    reasons: list = field(default_factory=list)
    assumptions: list = field(default_factory=list)


def theorem3_certificate(game, g, omega_grid=None):
    """Global convergence certificate for the cascade of ``g(s) I_n`` and softmax.

    Hypotheses: ``F`` symmetric, negative definite on the tangent space, and
    ``g`` passive (asymptotic verdict) or strictly passive (exponential
    verdict). The Hermitian part of ``H(jw) = -g(jw) F~`` is checked on the
    grid. A game violating the hypotheses gets ``refused=True`` and verdict
    ``"none"``; that is an answer, not an error.
    """
    lti_strictly_proper_check(g)
    omega = frequency_grid() if omega_grid is None else np.asarray(omega_grid, dtype=float)
    N = tangent_basis(game.n)
    Ft = N.T @ game.F @ N
    symmetric = game.symmetric
    strict_game = contractiveness(game).verdict == "strictly_contractive"
    rep = passivity_report(g)
    observable = bool(realize(g).observable())

    with np.errstate(divide="ignore", invalid="ignore"):
        gj = g(1j * omega)
    finite = np.isfinite(gj)
    herm_min = np.inf
    for val in gj[finite]:
        H = -val * Ft
        herm_min = min(herm_min, float(np.linalg.eigvalsh(H + H.conj().T).min()))

    reasons = []
    if not symmetric:
        reasons.append("payoff matrix is not symmetric")
    if not strict_game:
        reasons.append("game is not strictly contractive (F~ not negative definite)")
    if not rep.passive:
        reasons.append("g(s) is not passive")
    assumptions = ["Nash stationarity of the learning rule is assumed, not checked"]
    verdict = "none"
    if not reasons:
        if rep.strictly_passive and herm_min > 0:
            verdict = "exponential"
        elif herm_min >= -EXACT_TOL:
            if observable:
                verdict = "asymptotic"
                assumptions.append(
                    "LaSalle condition: largest invariant set where the storage "
                    "derivative vanishes is the origin (follows from observability of (A, C))"
                )
            else:
                reasons.append("realization of g(s) is not observable")
        else:
            reasons.append("Hermitian part of H(jw) is indefinite on the grid")
    return Theorem3Certificate(
        game_symmetric=symmetric,
        game_strictly_contractive=strict_game,
        g_passive=rep.passive,
        g_strictly_passive=rep.strictly_passive,
        g_observable=observable,
        min_herm_eig_over_omega=herm_min,
        verdict=verdict,
        refused=bool(reasons),
        reasons=reasons,
        assumptions=assumptions,
    )


@dataclass(frozen=True)
class IncrementalReport(_Report):
    t: np.ndarray
    distances: np.ndarray
    monotone_after: float
    fitted_rate: float
    fit_r2: float
    initial_distance: float
    final_distance: float


def _monotone_onset(d, slack=MONOTONE_SLACK):
    """First index after which ``d`` never increases by more than ``slack``."""
    up = np.flatnonzero(np.diff(d) > slack)
    return 0 if up.size == 0 else int(up[-1] + 1)


def fit_log_rate(t, d, floor=NOISE_FLOOR):
    """Least-squares slope of ``log d`` over the last half of the usable samples.

    Usable samples precede the first drop below ``floor`` (where integration
    error takes over) and follow the monotone onset of that segment. Returns
    ``(rate, r2)``; ``rate`` is None when the fit fails the R^2 gate.
    """
    below = np.flatnonzero(d < floor)
    cut = int(below[0]) if below.size else len(d)
    onset = _monotone_onset(d[:cut]) if cut > 1 else 0
    idx = np.arange(onset, cut)
    if idx.size < 4:
        return None, None
    idx = idx[idx.size // 2:]
    tt, yy = t[idx], np.log(d[idx])
    A = np.vstack([tt, np.ones_like(tt)]).T
    coef, *_ = np.linalg.lstsq(A, yy, rcond=None)
    resid = yy - A @ coef
    ss_tot = np.sum((yy - yy.mean()) ** 2)
    r2 = 1.0 - np.sum(resid**2) / ss_tot if ss_tot > 0 else 0.0
    rate = float(coef[0]) if r2 >= R2_GATE else None
    return rate, float(r2)


def incremental_probe(sys, state0_a, state0_b, t_final, dt=1e-2, method="rk45",
                      output_interval=0.1, rtol=1e-10, atol=1e-12, floor=NOISE_FLOOR):
    """Integrate two trajectories on one grid and measure their strategy distance.

    ``monotone_after`` is computed on the whole series; the exponential fit
    only uses distances above ``floor``.
    """
    kw = dict(dt=dt, method=method, output_interval=output_interval, rtol=rtol, atol=atol)
    ta = integrate(sys, state0_a, t_final, **kw)
    tb = integrate(sys, state0_b, t_final, **kw)
    d = np.linalg.norm(ta.x - tb.x, axis=1)
    onset = _monotone_onset(d)
    rate, r2 = fit_log_rate(ta.t, d, floor)
    return IncrementalReport(
        t=ta.t,
        distances=d,
        monotone_after=float(ta.t[onset]),
        fitted_rate=rate,
        fit_r2=r2,
        initial_distance=float(d[0]),
        final_distance=float(d[-1]),
    )


@dataclass(frozen=True)
class VariationalReport(_Report):
    abscissas: np.ndarray
    max_abscissa: float
    evidence: str = "necessary only: frozen-time spectra, no common quadratic metric searched"


def variational_sample_check(game, g, sample_states, basis=None):
    """Spectral abscissa of the reduced frozen-time linearization at each state.

    The cascade loop linearized at ``x`` reads
    ``dxi' = (A~ + B~ F~ Q~(x) C~) dxi``. Negative abscissas everywhere are
    necessary for, not proof of, incremental stability.
    """
    ss = realize(g)
    N = tangent_basis(game.n) if basis is None else basis
    Ft = N.T @ game.F @ N
    out = []
    for x in sample_states:
        x = np.asarray(x, dtype=float)
        if np.any(x <= 0):
            raise DomainError(f"sample state must be interior: {x}")
        Qt = N.T @ choice_jacobian(x) @ N
        M = reduced_closed_loop_matrix(Ft, Qt, ss, integrator=False)
        out.append(float(np.linalg.eigvals(M).real.max()))
    out = np.array(out)
    return VariationalReport(abscissas=out, max_abscissa=float(out.max()))


@dataclass(frozen=True)
class ExrdFixedPoint(_Report):
    x: np.ndarray
    z: np.ndarray
    residual: float
    iterations: int


def fixed_point_exrd(game, damping=0.5, tol=1e-12, max_iter=100_000):
    """Solve ``z = F softmax(z)`` by damped iteration from ``z = 0``."""
    if not 0 < damping <= 1:
        raise DomainError("damping must lie in (0, 1]")
    z = np.zeros(game.n)
    history = []
    for k in range(max_iter):
        fz = game.payoff(softmax(z))
        res = float(np.linalg.norm(z - fz))
        history.append(res)
        if res <= tol:
            return ExrdFixedPoint(softmax(z), z, res, k)
        z = (1 - damping) * z + damping * fz
    raise ConvergenceError(f"no fixed point after {max_iter} iterations (residual {res:.3g})", history[-100:])
