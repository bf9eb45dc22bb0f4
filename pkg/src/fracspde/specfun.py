"""Special functions underlying time-fractional diffusion kernels.

Provides the reciprocal Gamma function, the Wright function
``phi(a, delta; -z)`` for ``a in (-1, 0)``, the two-parameter
Mittag-Leffler function ``E_{a,b}(z)`` on the real line, and a discrete
Caputo derivative (L1 scheme for orders in (0,1), an L2-type scheme for
orders in (1,2)).

Evaluation strategy
-------------------
Both entire functions (Wright, Mittag-Leffler) are summed by their power
series with compensated summation while that is numerically safe.  The
series terms alternate and grow before they decay, so for large arguments
the partial sums cancel catastrophically; following the stopping rule used
throughout the package, the series result is discarded once the largest
term exceeds ``SERIES_ABANDON_RATIO`` times the partial sum.  Beyond that
point both functions are evaluated through their Hankel-integral
representations on a parabolic contour,

    phi(-nu, delta; -z) = (1/2 pi i) int e^(s - z s^nu) s^(-delta) ds,
    E_{a,b}(z)          = (1/2 pi i) int e^s s^(a-b) / (s^a - z) ds,

discretised by the trapezoid rule, which converges geometrically for
analytic integrands.  The series/contour switch for the Wright function
happens near ``z ~ (9.2 / c_nu)^(1-nu)`` with
``c_nu = (1-nu) nu^(nu/(1-nu))``, the constant in the stretched-exponential
decay of the function itself.

Accuracy note: the Mittag-Leffler contour degrades in a small
neighbourhood of ``a = 1`` (the branch poles approach the cut); ``a = 1``
itself is routed to exponential closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import gammaln, rgamma

from .errors import GridTooShort, NonConvergence

__all__ = [
    "SeriesControl",
    "FractionalOrder",
    "Regime",
    "as_order",
    "recip_gamma",
    "wright_phi",
    "mittag_leffler",
    "caputo_derivative",
    "SERIES_ABANDON_RATIO",
]

#: A series attempt is rejected when max|term| exceeds this multiple of the
#: sum.  The ratio caps the cancellation noise at ~eps * ratio, so 1e6 keeps
#: series results good to ~1e-10 before the contour takes over.
SERIES_ABANDON_RATIO = 1e6


@dataclass(frozen=True)
class SeriesControl:
    """Convergence control for series evaluations."""

    rel_tol: float = 1e-12
    max_terms: int = 500

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")


_DEFAULT_CTL = SeriesControl()


class Regime(Enum):
    """Time-order regime: subdiffusive needs one initial condition, superdiffusive two."""

    SUB = "sub"  # alpha in (1/2, 1)
    SUPER = "super"  # alpha in (1, 2)


@dataclass(frozen=True)
class FractionalOrder:
    """Validated fractional time order ``alpha`` in (1/2, 1) or (1, 2)."""

    alpha: float

    def __post_init__(self):
        a = float(self.alpha)
        if not (0.5 < a < 2.0) or a == 1.0:
            raise ValueError(
                f"alpha must lie in (1/2, 1) or (1, 2); got {self.alpha!r}"
            )

    @property
    def regime(self) -> Regime:
        return Regime.SUB if self.alpha < 1.0 else Regime.SUPER

    @property
    def m(self) -> int:
        """Number of initial conditions, ``ceil(alpha)``."""
        return 1 if self.alpha < 1.0 else 2

    @property
    def nu(self) -> float:
        """Spatial scaling exponent ``alpha / 2``."""
        return 0.5 * self.alpha


def as_order(alpha) -> FractionalOrder:
    """Coerce a float or FractionalOrder to a validated FractionalOrder."""
    if isinstance(alpha, FractionalOrder):
        return alpha
    return FractionalOrder(float(alpha))


# ---------------------------------------------------------------------------
# reciprocal Gamma
# ---------------------------------------------------------------------------

def recip_gamma(x):
    """1/Gamma(x), entire, exactly zero at the poles of Gamma.

    Accepts scalars or arrays; total function of any finite real input.
    """
    x = np.asarray(x, dtype=float)
    out = rgamma(x)
    # rgamma returns signed zeros at non-positive integers already; normalise -0.0
    out = np.where(out == 0.0, 0.0, out)
    if out.ndim == 0:
        return float(out)
    return out


def _log_recip_gamma_signed(w):
    """(sign, log|1/Gamma(w)|) for real w, vectorised.

    Uses the reflection formula for w <= 0 so that huge reciprocal-Gamma
    magnitudes stay representable in log space.  Poles get sign 0 and -inf.
    """
    w = np.atleast_1d(np.asarray(w, dtype=float))
    sign = np.ones_like(w)
    logv = np.empty_like(w)
    pos = w > 0
    logv[pos] = -gammaln(w[pos])
    neg = ~pos
    if np.any(neg):
        wn = w[neg]
        s = np.sin(np.pi * wn)
        with np.errstate(divide="ignore"):
            logv[neg] = gammaln(1.0 - wn) + np.log(np.abs(s)) - np.log(np.pi)
        sign[neg] = np.sign(s)
        logv[neg] = np.where(s == 0.0, -np.inf, logv[neg])
    return sign, logv


# ---------------------------------------------------------------------------
# parabolic-contour machinery (shared by Wright and Mittag-Leffler)
# ---------------------------------------------------------------------------

def _contour_trapezoid(integrand_real, mu, u_max, n_nodes):
    """Symmetric trapezoid of (mu/pi) * int f(u) du on [0, u_max].

    Returns (value, absolute_mass); the latter bounds the cancellation floor
    of the rule, ``~eps * absolute_mass``.
    """
    u = np.linspace(0.0, u_max, n_nodes)
    h = u[1] - u[0]
    g = integrand_real(u)
    scale = (mu / np.pi) * h * 2.0
    val = scale * (0.5 * g[0] + g[1:].sum())
    mass = scale * np.abs(g).sum()
    return val, mass


def _wright_contour_batch(nu: float, delta: float, z: np.ndarray,
                          rel_tol: float) -> np.ndarray:
    """Vectorised parabolic-contour evaluation over a 1-d array of large z.

    Rows that fail the two-level trapezoid agreement fall back to the
    scalar adaptive routine.
    """
    z = np.asarray(z, dtype=float)
    s_star = (z * nu) ** (1.0 / (1.0 - nu))
    mu = np.maximum(s_star, 0.5)
    e0 = mu - z * mu**nu
    out = np.zeros_like(z)
    live = e0 >= -745.0
    if not np.any(live):
        return out
    idx = np.flatnonzero(live)

    def integrand_rows(zc, muc, e0c, u):
        # s = mu (1+iu)^2; all transcendentals evaluated on real arrays
        log_r = np.log(muc)[:, None] + np.log1p(u**2)
        theta = 2.0 * np.arctan(u)
        s_re = muc[:, None] * (1.0 - u**2)
        s_im = 2.0 * muc[:, None] * u
        amp = np.exp(nu * log_r)
        snu_re = amp * np.cos(nu * theta)
        snu_im = amp * np.sin(nu * theta)
        w_re = s_re - zc[:, None] * snu_re - e0c[:, None] - delta * log_r
        w_im = s_im - zc[:, None] * snu_im - delta * theta
        return np.exp(w_re) * (np.cos(w_im) - u * np.sin(w_im))

    for chunk in np.array_split(idx, max(1, len(idx) * 820 // 4_000_000 + 1)):
        zc = z[chunk]
        muc = mu[chunk]
        e0c = e0[chunk]
        # expand u_max until a conservative bound on the exponent has decayed
        # by e^-50: Re(s - z s^nu) <= mu(1-u^2) + z mu^nu (1+u^2)^nu
        u_max = np.ones_like(zc)
        zmn = zc * muc**nu
        for _ in range(80):
            bound = muc * (1.0 - u_max**2) + zmn * (1.0 + u_max**2) ** nu - e0c
            grow = bound > -50.0
            if not np.any(grow):
                break
            u_max = np.where(grow, u_max * 1.2, u_max)
        scale = np.where(e0c > -700.0, np.exp(e0c), 0.0)
        vals = {}
        masses = {}
        for n_nodes in (201, 401):
            u = u_max[:, None] * np.linspace(0.0, 1.0, n_nodes)[None, :]
            h = u_max / (n_nodes - 1.0)
            g = integrand_rows(zc, muc, e0c, u)
            pref = (muc / np.pi) * h * 2.0 * scale
            vals[n_nodes] = pref * (0.5 * g[:, 0] + g[:, 1:].sum(axis=1))
            masses[n_nodes] = pref * np.abs(g).sum(axis=1)
        v1, v2 = vals[201], vals[401]
        good = np.abs(v2 - v1) <= np.maximum(
            10.0 * rel_tol * np.abs(v2), 200.0 * np.finfo(float).eps * masses[401]
        )
        res = v2.copy()
        for j in np.flatnonzero(~good):
            res[j] = _wright_contour(nu, delta, float(zc[j]), rel_tol)
        out[chunk] = res
    return out


def _wright_contour(nu: float, delta: float, z: float, rel_tol: float) -> float:
    """phi(-nu, delta; -z) by trapezoid on the parabola s = mu (1 + i u)^2.

    The contour is centred on the saddle s* = (z nu)^(1/(1-nu)) of
    s - z s^nu, so the integrand maximum matches the size of the result and
    the evaluation stays well conditioned for arbitrarily large z.
    """
    s_star = (z * nu) ** (1.0 / (1.0 - nu))
    mu = max(s_star, 0.5)
    exponent0 = mu - z * mu**nu
    if exponent0 < -745.0:  # result underflows double precision
        return 0.0

    def integrand(u):
        s = mu * (1.0 + 1j * u) ** 2
        val = np.exp(s - z * s**nu - exponent0) * s ** (-delta) * (1.0 + 1j * u)
        return val.real

    # truncate where the exponential factor is ~1e-22 of its peak
    u_max = 1.0
    while True:
        s = mu * (1.0 + 1j * u_max) ** 2
        if (s - z * s**nu).real - exponent0 < -50.0 or u_max > 1e3:
            break
        u_max *= 1.25
    scale = math.exp(exponent0) if exponent0 > -700 else 0.0

    prev = None
    for n_nodes in (201, 401, 801):
        val, mass = _contour_trapezoid(integrand, mu, u_max, n_nodes)
        val *= scale
        if prev is not None:
            floor = 200.0 * np.finfo(float).eps * mass * scale
            if abs(val - prev) <= max(10.0 * rel_tol * abs(val), floor):
                return val
        prev = val
    raise NonConvergence(
        f"Wright contour did not stabilise for nu={nu}, delta={delta}, z={z}"
    )


# ---------------------------------------------------------------------------
# Wright function
# ---------------------------------------------------------------------------

def _wright_series_batch(a: float, delta: float, z: np.ndarray, ctl: SeriesControl):
    """Vectorised series over a 1-d array of positive z.

    The term count starts from the saddle estimate n* = (z nu^nu)^(1/(1-nu))
    and doubles until the last two terms are below tolerance everywhere (two
    terms, because single terms vanish exactly at Gamma poles).  Returns
    (totals, converged, max_terms); columns whose largest term exceeds the
    abandon ratio must be re-evaluated on the contour.
    """
    nu = -a
    nz = len(z)
    out_total = np.empty(nz)
    out_conv = np.zeros(nz, dtype=bool)
    out_max = np.empty(nz)
    remaining = np.arange(nz)
    n_star = (np.max(z) * nu**nu) ** (1.0 / (1.0 - nu))
    n_terms = int(min(ctl.max_terms, max(48, math.ceil(3.0 * n_star + 48))))
    while len(remaining):
        logz = np.log(z[remaining])
        n = np.arange(n_terms, dtype=float)
        sign_g, log_g = _log_recip_gamma_signed(delta + a * n)
        log_t = n[:, None] * logz[None, :] - gammaln(n + 1.0)[:, None] + log_g[:, None]
        signs = (np.where(n % 2 == 0, 1.0, -1.0) * sign_g)[:, None]
        with np.errstate(over="ignore"):
            terms = signs * np.exp(log_t)
        totals = np.sum(terms, axis=0)
        max_term = np.max(np.abs(terms), axis=0)
        # near a real zero of the function, accuracy is capped by rounding of
        # the largest term: accept once the tail is below that noise floor
        floor = np.maximum(
            ctl.rel_tol * np.abs(totals), 4e-16 * max_term
        ) + 1e-300
        tail_ok = (np.abs(terms[-1]) <= floor) & (np.abs(terms[-2]) <= floor)
        converged = np.isfinite(totals) & tail_ok
        max_term = np.where(np.isfinite(max_term), max_term, np.inf)
        out_total[remaining] = totals
        out_conv[remaining] = converged
        out_max[remaining] = max_term
        if np.all(converged) or n_terms >= ctl.max_terms:
            break
        remaining = remaining[~converged]
        n_terms = int(min(ctl.max_terms, 2 * n_terms))
    return out_total, out_conv, out_max


def wright_phi(a: float, delta: float, z, ctl: SeriesControl | None = None):
    """Wright function ``sum_n (-z)^n / (n! Gamma(delta + a n))`` for z >= 0.

    Parameters
    ----------
    a : float
        Wright parameter in (-1, 0).
    delta : float
        Second parameter, any real.
    z : float or array_like
        Nonnegative argument; the function is evaluated at ``-z``.
    ctl : SeriesControl, optional
        Series tolerance and term cap.

    Returns
    -------
    float or ndarray

    Raises
    ------
    NonConvergence
        If neither the series nor the contour fallback reaches tolerance.
    """
    if not (-1.0 < a < 0.0):
        raise ValueError(f"Wright parameter a must lie in (-1, 0); got {a}")
    ctl = ctl or _DEFAULT_CTL
    z_arr = np.asarray(z, dtype=float)
    if np.any(z_arr < 0):
        raise ValueError("z must be nonnegative (the argument used is -z)")
    scalar = z_arr.ndim == 0

    nu = -a
    c_nu = (1.0 - nu) * nu ** (nu / (1.0 - nu))
    # a-priori switch: beyond this the series surely violates the abandon rule
    z_switch = (0.5 * math.log(SERIES_ABANDON_RATIO) / c_nu) ** (1.0 - nu)

    zs = np.atleast_1d(z_arr).ravel()
    out = np.empty_like(zs)
    zero = zs == 0.0
    out[zero] = recip_gamma(delta)
    todo_contour = ~zero & (zs > z_switch)
    in_series = ~zero & ~todo_contour
    if np.any(in_series):
        totals, converged, max_terms = _wright_series_batch(
            a, delta, zs[in_series], ctl
        )
        ok_ratio = max_terms <= SERIES_ABANDON_RATIO * np.maximum(
            np.abs(totals), 1e-300
        )
        accept = converged & ok_ratio
        if np.any(~converged & ok_ratio):
            bad = zs[in_series][~converged & ok_ratio][0]
            raise NonConvergence(
                f"Wright series hit max_terms={ctl.max_terms} below the "
                f"contour threshold (a={a}, delta={delta}, z={bad})"
            )
        idx = np.flatnonzero(in_series)
        out[idx[accept]] = totals[accept]
        todo_contour[idx[~accept]] = True
    if np.any(todo_contour):
        out[todo_contour] = _wright_contour_batch(
            nu, delta, zs[todo_contour], ctl.rel_tol
        )
    return float(out[0]) if scalar else out.reshape(z_arr.shape)


# ---------------------------------------------------------------------------
# Mittag-Leffler function
# ---------------------------------------------------------------------------

def _ml_series_1(a: float, b: float, z: float, ctl: SeriesControl):
    """Series for E_{a,b}(z); returns (value, converged, max_term)."""
    n = np.arange(ctl.max_terms)
    sign_g, log_g = _log_recip_gamma_signed(a * n + b)
    with np.errstate(divide="ignore"):
        log_abs_z = np.log(abs(z)) if z != 0 else -np.inf
        log_terms = n * log_abs_z + log_g
    signs = sign_g * (np.where(n % 2 == 0, 1.0, -1.0) if z < 0 else 1.0)
    with np.errstate(over="ignore"):
        terms = signs * np.exp(log_terms)
    if not np.all(np.isfinite(terms)):
        return np.nan, False, np.inf
    total = 0.0
    comp = 0.0
    max_term = 0.0
    small_run = 0
    converged = False
    for t in terms:
        y = t - comp
        s = total + y
        comp = (s - total) - y
        total = s
        at = abs(t)
        max_term = max(max_term, at)
        if at <= ctl.rel_tol * max(abs(total), 1e-300):
            small_run += 1
            if small_run >= 2:
                converged = True
                break
        else:
            small_run = 0
    return total, converged, max_term


def _ml_contour(a: float, b: float, z: float, rel_tol: float) -> float:
    """E_{a,b}(z) for z < 0 via the Hankel integral on a parabolic contour.

    For 1 < a < 2 the integrand has conjugate poles at |z|^(1/a) e^(+-i pi/a);
    the contour parameter mu is raised so the parabola encloses them, which
    folds their residues (the oscillatory part of the function) into the
    quadrature automatically.
    """
    x = -z
    mu = 1.0
    if a > 1.0:
        mu = max(1.0, x ** (1.0 / a) * math.sin(math.pi / a))
    if mu > 700.0:
        raise NonConvergence(
            f"Mittag-Leffler contour scale overflow (a={a}, b={b}, z={z})"
        )

    def integrand(u):
        s = mu * (1.0 + 1j * u) ** 2
        val = np.exp(s) * s ** (a - b) / (s**a - z) * (1.0 + 1j * u)
        return val.real

    u_max = math.sqrt(1.0 + 52.0 / mu) + 1.0
    prev = None
    for n_nodes in (401, 801, 1601):
        val, mass = _contour_trapezoid(integrand, mu, u_max, n_nodes)
        if prev is not None:
            floor = 200.0 * np.finfo(float).eps * mass
            if abs(val - prev) <= max(10.0 * rel_tol * abs(val), floor):
                return val
        prev = val
    raise NonConvergence(
        f"Mittag-Leffler contour did not stabilise for a={a}, b={b}, z={z}"
    )


def _ml_exp_closed_form(b_int: int, z: float) -> float:
    """E_{1,b}(z) for integer b >= 1 via exponential partial sums."""
    if b_int == 1:
        return math.exp(z)
    # E_{1,b}(z) = z^(1-b) (e^z - sum_{k=0}^{b-2} z^k / k!)
    partial = 0.0
    for k in range(b_int - 1):
        partial += z**k / math.factorial(k)
    if z == 0.0:
        return 1.0 / math.gamma(b_int)
    return z ** (1 - b_int) * (math.exp(z) - partial)


#: Below this argument the Mittag-Leffler series is used directly.
ML_SERIES_FLOOR = -4.0


def mittag_leffler(a: float, b: float, z, ctl: SeriesControl | None = None):
    """Two-parameter Mittag-Leffler function ``E_{a,b}(z)`` for real z.

    Series summation for small ``|z|`` and all ``z >= 0``; the Hankel-contour
    integral for large negative ``z``.  Supported domain: ``a`` in (0, 2]
    (with ``a = 1`` handled by exponential closed forms for integer ``b``),
    any real ``b``, real ``z``.

    Raises
    ------
    NonConvergence
        Outside the representable range, or for the unsupported corner
        ``a = 1``, non-integer ``b``, ``z`` very negative.
    """
    if not (0.0 < a <= 2.0):
        raise ValueError(f"Mittag-Leffler parameter a must lie in (0, 2]; got {a}")
    ctl = ctl or _DEFAULT_CTL
    z_arr = np.asarray(z, dtype=float)
    scalar = z_arr.ndim == 0
    zs = np.atleast_1d(z_arr).ravel()
    out = np.empty_like(zs)
    for i, zi in enumerate(zs):
        zi = float(zi)
        if zi == 0.0:
            out[i] = recip_gamma(b)
            continue
        if abs(a - 1.0) < 1e-12 and abs(b - round(b)) < 1e-12 and round(b) >= 1:
            out[i] = _ml_exp_closed_form(int(round(b)), zi)
            continue
        if zi >= ML_SERIES_FLOOR:
            total, converged, max_term = _ml_series_1(a, b, zi, ctl)
            if converged and max_term <= SERIES_ABANDON_RATIO * max(
                abs(total), 1e-300
            ):
                out[i] = total
                continue
            if zi > 0:
                raise NonConvergence(
                    f"Mittag-Leffler series failed for a={a}, b={b}, z={zi}; "
                    "large positive arguments are outside the supported range"
                )
        if abs(a - 1.0) < 1e-8:
            raise NonConvergence(
                "Mittag-Leffler with a ~ 1, non-integer b and large negative z "
                "is not supported (contour degenerates at the branch cut)"
            )
        out[i] = _ml_contour(a, b, zi, ctl.rel_tol)
    return float(out[0]) if scalar else out.reshape(z_arr.shape)


# ---------------------------------------------------------------------------
# discrete Caputo derivative
# ---------------------------------------------------------------------------

def _frac_integral_trapezoid(g: np.ndarray, beta: float, dt: float) -> np.ndarray:
    """Riemann-Liouville fractional integral I^beta g on a uniform grid.

    Product-trapezoid rule (piecewise-linear g, kernel integrated exactly);
    exact for g constant or linear.
    """
    n_pts = len(g)
    k = np.arange(n_pts, dtype=float)
    kp = k + 1.0
    km = np.abs(k - 1.0)
    w = kp ** (beta + 1.0) - 2.0 * k ** (beta + 1.0) + km ** (beta + 1.0)
    w[0] = 1.0  # weight of the newest sample
    # boundary weight for j = 0 at step n: (n-1)^(b+1) - n^(b+1) + (b+1) n^b
    n_idx = np.arange(n_pts, dtype=float)
    with np.errstate(invalid="ignore"):
        w0 = np.abs(n_idx - 1.0) ** (beta + 1.0) - n_idx ** (beta + 1.0) + (
            beta + 1.0
        ) * n_idx**beta
    out = np.convolve(g, w)[:n_pts]
    # convolution counted g[0] with weight w[n]; replace by the boundary weight
    out += g[0] * (w0 - w)
    out[0] = 0.0
    scale = dt**beta / math.exp(gammaln(beta + 2.0))
    return out * scale


def caputo_derivative(samples, alpha, dt: float) -> np.ndarray:
    """Discrete Caputo derivative of uniformly sampled values.

    Parameters
    ----------
    samples : array_like
        Function values at ``t_k = k dt``, ``k = 0..N``.
    alpha : float or FractionalOrder
        Order in (1/2, 1) (L1 scheme) or (1, 2) (L2-type scheme applied to
        the second difference).
    dt : float
        Positive grid step.

    Returns
    -------
    ndarray
        Derivative values on the same grid (index 0 is 0 by convention).
    """
    order = as_order(alpha)
    f = np.asarray(samples, dtype=float)
    if f.ndim != 1:
        raise ValueError("samples must be one-dimensional")
    if dt <= 0:
        raise ValueError("dt must be positive")
    m = order.m
    if len(f) < m + 1:
        raise GridTooShort(
            f"need at least {m + 1} samples for order {order.alpha}, got {len(f)}"
        )
    a = order.alpha
    if m == 1:
        # L1 scheme: weights b_k = (k+1)^(1-a) - k^(1-a) against first differences
        df = np.diff(f)
        k = np.arange(len(df), dtype=float)
        bk = (k + 1.0) ** (1.0 - a) - k ** (1.0 - a)
        out = np.empty_like(f)
        out[0] = 0.0
        out[1:] = np.convolve(df, bk)[: len(df)]
        return out * dt ** (-a) / math.gamma(2.0 - a)
    # m == 2: I^(2-a) applied to the discrete second derivative
    g = np.empty_like(f)
    g[1:-1] = f[2:] - 2.0 * f[1:-1] + f[:-2]
    if len(f) >= 4:
        g[0] = 2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]
        g[-1] = 2.0 * f[-1] - 5.0 * f[-2] + 4.0 * f[-3] - f[-4]
    else:
        g[0] = g[1]
        g[-1] = g[-2]
    g = g / dt**2
    return _frac_integral_trapezoid(g, 2.0 - a, dt)
