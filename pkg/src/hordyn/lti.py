"""SISO transfer functions, canonical realizations and passivity certificates."""

from dataclasses import dataclass, asdict
from fractions import Fraction

import numpy as np

from . import realroots
from .errors import DomainError, UnsupportedError

STABILITY_TOL = 1e-10
PASSIVITY_TOL = 1e-10
DEFAULT_OMEGA_MIN = 1e-3
DEFAULT_OMEGA_MAX = 1e4
DEFAULT_SAMPLES = 2000


def _coeffs(c, name):
    c = np.atleast_1d(np.asarray(c, dtype=float))
    if c.ndim != 1 or not np.all(np.isfinite(c)):
        raise DomainError(f"{name} must be a finite coefficient vector")
    nz = np.flatnonzero(c)
    if nz.size == 0:
        return np.zeros(1)
    return c[nz[0]:].copy()


class TransferFunction:
    """Rational function ``num(s) / den(s)`` with real coefficients.

    Coefficients are in descending powers of ``s``. The denominator is made
    monic on construction.

    >>> h = TransferFunction([2, 3], [1, 3, 2])
    >>> h(0.0)
    (1.5+0j)
    """

    def __init__(self, num, den):
        num = _coeffs(num, "num")
        den = _coeffs(den, "den")
        if den[0] == 0:
            raise DomainError("denominator must be nonzero")
        self.num = num / den[0]
        self.den = den / den[0]
        self.num.setflags(write=False)
        self.den.setflags(write=False)

    @classmethod
    def parse(cls, text):
        """Parse ``"num=2,3 den=1,3,2"``."""
        fields = {}
        for token in text.split():
            key, sep, value = token.partition("=")
            if not sep or key not in ("num", "den") or key in fields:
                raise DomainError(f"bad transfer function token {token!r}")
            try:
                fields[key] = [float(v) for v in value.split(",")]
            except ValueError:
                raise DomainError(f"bad coefficient list {value!r}") from None
        if set(fields) != {"num", "den"}:
            raise DomainError("transfer function needs both num= and den=")
        return cls(fields["num"], fields["den"])

    def format(self):
        def fmt(c):
            return ",".join(repr(float(v)) for v in c)

        return f"num={fmt(self.num)} den={fmt(self.den)}"

    def __repr__(self):
        return f"TransferFunction({self.num.tolist()}, {self.den.tolist()})"

    def __eq__(self, other):
        if not isinstance(other, TransferFunction):
            return NotImplemented
        return np.array_equal(self.num, other.num) and np.array_equal(self.den, other.den)

    def __hash__(self):
        return hash((tuple(self.num), tuple(self.den)))

    @property
    def order(self):
        return len(self.den) - 1

    @property
    def relative_degree(self):
        if not np.any(self.num):
            return np.inf
        return len(self.den) - len(self.num)

    def is_proper(self):
        return self.relative_degree >= 0

    def is_strictly_proper(self):
        return self.relative_degree >= 1

    def __call__(self, s):
        s = np.asarray(s, dtype=complex)
        return np.polyval(self.num, s) / np.polyval(self.den, s)

    def __add__(self, other):
        """Parallel connection; no pole-zero cancellation is attempted."""
        if not isinstance(other, TransferFunction):
            return NotImplemented
        num = np.polyadd(np.polymul(self.num, other.den), np.polymul(other.num, self.den))
        return TransferFunction(num, np.polymul(self.den, other.den))

    def poles(self):
        return companion_eigenvalues(self.den)

    def to_dict(self):
        return {"num": self.num.tolist(), "den": self.den.tolist()}


def integrator():
    return TransferFunction([1.0], [1.0, 0.0])


def companion_eigenvalues(den):
    """Roots of a monic polynomial as eigenvalues of its companion matrix."""
    den = np.asarray(den, dtype=float)
    m = len(den) - 1
    if m == 0:
        return np.zeros(0, dtype=complex)
    A = np.zeros((m, m))
    A[:-1, 1:] = np.eye(m - 1)
    A[-1, :] = -den[:0:-1] / den[0]
    return np.linalg.eigvals(A).astype(complex)


def is_stable(tf):
    """True iff every pole has real part below ``-1e-10``."""
    p = tf.poles()
    return bool(np.all(p.real < -STABILITY_TOL))


@dataclass(frozen=True)
class StateSpaceRealization:
    """``(A, B, C)`` with ``D = 0``; ``B`` is m x 1 and ``C`` is 1 x m."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    @property
    def m(self):
        return self.A.shape[0]

    def frequency_response(self, s):
        s = complex(s)
        M = s * np.eye(self.m) - self.A
        return complex((self.C @ np.linalg.solve(M, self.B))[0, 0])

    def observable(self):
        blocks = [self.C]
        for _ in range(self.m - 1):
            blocks.append(blocks[-1] @ self.A)
        return bool(np.linalg.matrix_rank(np.vstack(blocks)) == self.m)

    def parallel(self, other):
        """Realization of the sum of both transfer functions (block diagonal)."""
        m1, m2 = self.m, other.m
        A = np.zeros((m1 + m2, m1 + m2))
        A[:m1, :m1] = self.A
        A[m1:, m1:] = other.A
        return StateSpaceRealization(
            A, np.vstack([self.B, other.B]), np.hstack([self.C, other.C])
        )

    def lift(self, n):
        return LiftedRealization(self, n)


def realize(tf):
    """Controllable canonical form of a strictly proper transfer function.

    For ``(b_{m-1} s^{m-1} + ... + b_0) / (s^m + a_{m-1} s^{m-1} + ... + a_0)``
    the last row of ``A`` holds ``-a_0 .. -a_{m-1}``, ``B = e_m`` and ``C``
    holds ``b_0 .. b_{m-1}``.
    """
    if not tf.is_strictly_proper():
        raise UnsupportedError(
            "only strictly proper transfer functions can be realized without "
            "feedthrough (a D term would create an algebraic loop)"
        )
    m = tf.order
    A = np.zeros((m, m))
    A[:-1, 1:] = np.eye(m - 1)
    A[-1, :] = -tf.den[:0:-1]
    B = np.zeros((m, 1))
    B[-1, 0] = 1.0
    C = np.zeros((1, m))
    num = tf.num[::-1]
    C[0, : len(num)] = num
    return StateSpaceRealization(A, B, C)


class LiftedRealization:
    """The block system ``(A kron I_n, B kron I_n, C kron I_n)``.

    The lifted state is stored channel-minor: entry ``i * n + k`` is internal
    state ``i`` of channel ``k``. Products are evaluated on the m x n reshape,
    never forming the mn x mn matrices.
    """

    def __init__(self, ss, n):
        if n < 2:
            raise DomainError("lifting needs n >= 2 channels")
        self.ss = ss
        self.n = int(n)
        self.m = ss.m

    @property
    def size(self):
        return self.m * self.n

    def state_derivative(self, xh, u):
        X = np.reshape(xh, (self.m, self.n))
        return (self.ss.A @ X + self.ss.B @ np.reshape(u, (1, self.n))).ravel()

    def output(self, xh):
        X = np.reshape(xh, (self.m, self.n))
        return (self.ss.C @ X).ravel()

    def dense(self):
        """Materialize the Kronecker matrices (only for checks on small systems)."""
        I = np.eye(self.n)
        return np.kron(self.ss.A, I), np.kron(self.ss.B, I), np.kron(self.ss.C, I)

    def frequency_response(self, s):
        """n x n response ``C_l (sI - A_l)^{-1} B_l`` via the block structure."""
        return self.ss.frequency_response(s) * np.eye(self.n)


def lti_strictly_proper_check(tf):
    if not tf.is_strictly_proper():
        raise UnsupportedError("transfer function must be strictly proper")


def lift(tf, n):
    return realize(tf).lift(n)


# -- passivity ----------------------------------------------------------------


def real_part_polynomial(tf):
    """Exact ascending coefficients of ``P(u)`` with ``Re h(jw) = P(w^2) / |den(jw)|^2``.

    ``P`` is the even part of ``num(s) den(-s)`` evaluated at ``s = jw``.
    """
    num = [Fraction(float(c)) for c in tf.num[::-1]]
    den = [Fraction(float(c)) for c in tf.den[::-1]]
    den_neg = [c if k % 2 == 0 else -c for k, c in enumerate(den)]
    q = realroots.multiply(num, den_neg)
    return realroots.trim(
        [q[k] if (k // 2) % 2 == 0 else -q[k] for k in range(0, len(q), 2)]
    )


def real_part_on_axis(tf, omega):
    """``Re h(jw)`` from the even polynomial; NaN where ``den(jw) = 0``."""
    omega = np.asarray(omega, dtype=float)
    P = np.array([float(c) for c in real_part_polynomial(tf)] or [0.0])
    denom = np.abs(np.polyval(tf.den, 1j * omega)) ** 2
    numer = np.polynomial.polynomial.polyval(omega**2, P)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(denom > 0, numer / denom, np.nan)


def _axis_poles_ok(tf):
    """Poles in the closed left half plane; imaginary-axis poles simple with
    positive real residue (the positive-real conditions besides the sign of Re)."""
    poles = tf.poles()
    if np.any(poles.real > STABILITY_TOL):
        return False
    axis = poles[np.abs(poles.real) <= STABILITY_TOL]
    dden = np.polyder(tf.den)
    for p in axis:
        if np.sum(np.abs(poles - p) < 1e-6) > 1:
            return False
        res = np.polyval(tf.num, p) / np.polyval(dden, p)
        if abs(res.imag) > 1e-8 * max(1.0, abs(res)) or res.real <= 0:
            return False
    return True


def frequency_grid(omega_max=DEFAULT_OMEGA_MAX, samples=DEFAULT_SAMPLES, omega_min=DEFAULT_OMEGA_MIN):
    return np.concatenate([[0.0], np.logspace(np.log10(omega_min), np.log10(omega_max), samples)])


@dataclass(frozen=True)
class PassivityReport:
    stable: bool
    passive: bool
    strictly_passive: bool
    min_real_part: float
    worst_frequency: float
    grid_passive: bool
    grid_strictly_passive: bool
    certificate_agrees: bool
    uniformly_strictly_passive: bool

    def to_dict(self):
        return asdict(self)


def passivity_report(tf, omega_max=DEFAULT_OMEGA_MAX, samples=DEFAULT_SAMPLES, omega_min=DEFAULT_OMEGA_MIN):
    """Passivity of a proper SISO transfer function.

    Strict passivity means asymptotic stability plus ``Re h(jw) > 0`` at every
    finite ``w``; the uniform version (``Re h >= delta > 0`` including
    ``w -> inf``) is reported separately. The verdicts come from the exact
    sign analysis of the even polynomial; the sampled grid gives
    ``min_real_part`` and must agree with it.
    """
    if not tf.is_proper():
        raise UnsupportedError("passivity is only defined here for proper transfer functions")
    if omega_max <= 0 or samples < 100:
        raise DomainError("need omega_max > 0 and samples >= 100")

    stable = is_stable(tf)
    poles_ok = _axis_poles_ok(tf)
    P = real_part_polynomial(tf)
    exact_passive = poles_ok and realroots.nonnegative_on_halfline(P)
    exact_strict = stable and realroots.positive_on_halfline(P)

    omega = frequency_grid(omega_max, samples, omega_min)
    re = real_part_on_axis(tf, omega)
    valid = np.isfinite(re)
    k = int(np.argmin(np.where(valid, re, np.inf)))
    min_re = float(re[k])
    grid_passive = poles_ok and min_re >= -PASSIVITY_TOL
    grid_strict = stable and min_re > 0.0

    d_inf = tf.num[0] if tf.relative_degree == 0 else 0.0
    return PassivityReport(
        stable=stable,
        passive=exact_passive,
        strictly_passive=exact_strict,
        min_real_part=min_re,
        worst_frequency=float(omega[k]),
        grid_passive=grid_passive,
        grid_strictly_passive=grid_strict,
        certificate_agrees=(grid_passive == exact_passive and grid_strict == exact_strict),
        uniformly_strictly_passive=bool(exact_strict and d_inf > PASSIVITY_TOL),
    )
