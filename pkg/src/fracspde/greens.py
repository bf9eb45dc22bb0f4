"""Fundamental kernels of the time-fractional diffusion operator with B = Laplacian.

The three kernels share one self-similar structure,

    K(t, x) = C_d * t^p * f(|x| t^(-nu); d-1, p+1),       nu = alpha/2,
    C_d = 2^(-d) pi^((1-d)/2),

with time powers ``p`` equal to ``nu(2-d) - 1`` for the forcing kernel Y,
``-nu d`` for the first propagator Z1 and ``1 - nu d`` for the second
propagator Z2 (Z1 is the order-(alpha-1) Riemann-Liouville differintegral
of Y, applied termwise to the radial Wright series; Z2 is the time
antiderivative of Z1).  The radial profile is

    f(z; mu, delta) = (2/Gamma(mu/2)) int_1^inf phi(-nu, delta; -z s)
                      (s^2 - 1)^(mu/2 - 1) ds          for mu > 0,
    f(z; 0, delta)  = phi(-nu, delta; -z).

Normalisations ``int Z1 = 1``, ``int Z2 = t`` and
``int Y = t^(alpha-1)/Gamma(alpha)`` pin the ``-1`` in Y's time power; the
d=1, alpha->1 limit reproduces the classical heat kernel exactly.

The envelope side implements the dominating functions
``C t^zeta |x|^kappa mu_d(|x| t^(-nu)) p(t, x)`` and a fit-then-refine
domination scan for them.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline
from scipy.special import gammaln, roots_legendre

from .errors import (
    EvaluationAtSingularity,
    FitFailure,
    QuadratureFailure,
)
from .specfun import FractionalOrder, as_order, recip_gamma, wright_phi

__all__ = [
    "EnvelopeParams",
    "EllipticOperatorSpec",
    "InitialData",
    "p_envelope",
    "stretch_decay_constant",
    "mu_d",
    "f_radial",
    "green_Y",
    "green_Z",
    "green_Y_radial",
    "green_Z_radial",
    "green_Z_timedomain",
    "kernel_cell_masses",
    "j0",
    "envelope_bound",
    "envelope_bound_product",
    "verify_envelope",
    "truncation_radius",
    "GridSpec",
    "DominationReport",
    "tabulate_kernel_csv",
]

_KERNELS = ("Y", "Z1", "Z2")


def _c_d(d: int) -> float:
    return 2.0 ** (-d) * math.pi ** ((1 - d) / 2.0)


def _kernel_power_delta(kind: str, order: FractionalOrder, d: int):
    nu = order.nu
    if kind == "Y":
        p = nu * (2 - d) - 1.0
    elif kind == "Z1":
        p = -nu * d
    elif kind == "Z2":
        p = 1.0 - nu * d
    else:
        raise ValueError(f"unknown kernel kind {kind!r}")
    return p, p + 1.0


def scaling_exponent(kind: str, alpha, d: int) -> float:
    """Time power ``p`` in the exact self-similarity K(t, t^nu y) = t^p K(1, y)."""
    return _kernel_power_delta(kind, as_order(alpha), d)[0]


# ---------------------------------------------------------------------------
# stretched-exponential envelope factor
# ---------------------------------------------------------------------------

def stretch_decay_constant(alpha) -> float:
    """Sharp constant c_nu = (1-nu) nu^(nu/(1-nu)) in the kernel tail decay.

    phi(-nu, delta; -z) decays like exp(-c_nu z^(1/(1-nu))) for large z, the
    same shape as the envelope factor p(t, x) with sigma = c_nu.
    """
    nu = as_order(alpha).nu
    return (1.0 - nu) * nu ** (nu / (1.0 - nu))


def p_envelope(t, x, alpha, sigma: float):
    """exp(-sigma (|x| t^(-alpha/2))^(2/(2-alpha))) for t > 0."""
    order = as_order(alpha)
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ValueError("p_envelope requires t > 0")
    x = np.asarray(x, dtype=float)
    r = np.abs(x) if x.ndim == 0 else np.linalg.norm(np.atleast_1d(x), axis=-1)
    q = 2.0 / (2.0 - order.alpha)
    val = np.exp(-sigma * (r * t ** (-order.nu)) ** q)
    return float(val) if np.ndim(val) == 0 else val


def mu_d(z, d: int, kind: str = "Z"):
    """Slowly-varying envelope factor: 1, 1+|log z| or a power of z.

    ``kind='Z'``: 1 for d=1, 1+|log z| for d=2, z^(2-d) for d>=3.
    ``kind='Y'``: 1 for d<=3, 1+|log z| for d=4, z^(4-d) for d>=5.
    """
    z = np.asarray(z, dtype=float)
    if kind == "Z":
        log_d, pow_d = 2, 2
    elif kind == "Y":
        log_d, pow_d = 4, 4
    else:
        raise ValueError("kind must be 'Z' or 'Y'")
    if d < log_d:
        out = np.ones_like(z)
    elif d == log_d:
        out = 1.0 + np.abs(np.log(z))
    else:
        out = z ** (pow_d - d)
    return float(out) if out.ndim == 0 else out


def truncation_radius(alpha, t: float, tail: float = 1e-12) -> float:
    """Radius beyond which the kernel tail factor drops below ``tail``."""
    c = stretch_decay_constant(alpha)
    order = as_order(alpha)
    z = (math.log(1.0 / tail) / c) ** ((2.0 - order.alpha) / 2.0)
    return z * t**order.nu


# ---------------------------------------------------------------------------
# radial profile f(z; mu, delta)
# ---------------------------------------------------------------------------

def _graded_panels(s_lo: float, s_hi: float, s_knee: float, n_levels: int = 14):
    """Panel edges geometrically graded from s_knee down toward s_lo."""
    edges = [s_hi]
    s = min(s_knee, s_hi)
    if s > s_lo:
        edges.append(s)
        for _ in range(n_levels):
            s *= 0.5
            if s <= s_lo * 1.0000001:
                break
            edges.append(s)
    edges.append(s_lo)
    return np.array(edges[::-1])


def _f_radial_nodes(z: float, order: FractionalOrder, nodes_per_panel: int):
    """Gauss-Legendre nodes/weights in s for the t = 1 + s^2 substitution."""
    nu = order.nu
    c = stretch_decay_constant(order)
    # truncate the tail where the Wright factor is ~exp(-22) below its value
    # at z; the relative truncation error (~2e-9 with polynomial weights) sits
    # well under the 1e-7 refinement check
    u_cut = ((c * z ** (1.0 / (1.0 - nu)) + 22.0) / c) ** (1.0 - nu)
    s_max = math.sqrt(max(u_cut / z - 1.0, 1e-12))
    edges = _graded_panels(0.0, s_max, min(1.0, s_max))
    extra = np.linspace(min(1.0, s_max), s_max, 7)[1:]
    edges = np.unique(np.concatenate([edges, extra]))
    gl_x, gl_w = roots_legendre(nodes_per_panel)
    a = edges[:-1]
    b = edges[1:]
    mid = 0.5 * (a + b)[:, None]
    half = 0.5 * (b - a)[:, None]
    s = (mid + half * gl_x[None, :]).ravel()
    w = (half * gl_w[None, :]).ravel()
    return s, w


def _f_radial_batch(zs: np.ndarray, mu: float, delta: float,
                    order: FractionalOrder, nodes_per_panel: int) -> np.ndarray:
    """f(z; mu, delta) for a 1-d array of positive z; one Wright call total."""
    nu = order.nu
    node_s, node_w, offsets, z_rep = [], [], [0], []
    for z in zs:
        s, w = _f_radial_nodes(float(z), order, nodes_per_panel)
        node_s.append(s)
        node_w.append(w)
        offsets.append(offsets[-1] + len(s))
        z_rep.append(np.full(len(s), float(z)))
    s = np.concatenate(node_s)
    w = np.concatenate(node_w)
    zz = np.concatenate(z_rep)
    phi = wright_phi(-nu, delta, zz * (1.0 + s**2))
    vals = w * phi * 2.0 * s ** (mu - 1.0) * (2.0 + s**2) ** (mu / 2.0 - 1.0)
    sums = np.add.reduceat(vals, offsets[:-1])
    return sums * 2.0 * recip_gamma(mu / 2.0)


def _f_radial_quad(z: float, mu: float, delta: float, order: FractionalOrder,
                   nodes_per_panel: int) -> float:
    return float(_f_radial_batch(np.array([z]), mu, delta, order, nodes_per_panel)[0])


def f_radial(z, mu: float, delta: float, alpha, nodes_per_panel: int = 12,
             check: bool = True):
    """Radial profile of the fundamental kernels.

    For ``mu = 0`` this is the Wright function itself; for ``mu > 0`` the
    integral over (1, inf) with the endpoint handled by ``t = 1 + s^2`` and
    the tail truncated where the Wright factor underflows.

    Raises
    ------
    QuadratureFailure
        When ``z = 0`` and ``mu >= 1`` (the tail integral diverges), or when
        the refinement check fails.
    """
    order = as_order(alpha)
    if mu < 0:
        raise ValueError("mu must be >= 0")
    z_arr = np.asarray(z, dtype=float)
    if np.any(z_arr < 0):
        raise ValueError("z must be >= 0")
    scalar = z_arr.ndim == 0
    if mu == 0.0:
        out = wright_phi(-order.nu, delta, z_arr)
        return out

    zs = np.atleast_1d(z_arr).ravel()
    out = np.empty_like(zs)
    zero = zs == 0.0
    if np.any(zero):
        if mu >= 1.0:
            raise QuadratureFailure(
                f"f_radial diverges at z=0 for mu={mu} >= 1 "
                "(tail of the radial integral is not integrable)"
            )
        # finite closed form: recip_gamma(delta) * Gamma((1-mu)/2) / sqrt(pi)
        out[zero] = (
            recip_gamma(delta)
            * math.exp(gammaln((1.0 - mu) / 2.0))
            / math.sqrt(math.pi)
        )
    pos = ~zero
    if np.any(pos):
        vals = _f_radial_batch(zs[pos], mu, delta, order, nodes_per_panel)
        if check:
            vals2 = _f_radial_batch(zs[pos], mu, delta, order, nodes_per_panel + 6)
            err = np.abs(vals - vals2)
            bad = err > 1e-7 * np.maximum(np.abs(vals2), 1e-280) + 1e-300
            if np.any(bad):
                zi = zs[pos][bad][0]
                raise QuadratureFailure(
                    f"f_radial refinement mismatch at z={zi}",
                    value=float(vals2[np.flatnonzero(pos)[0]] if scalar else np.nan),
                    error_estimate=float(err[bad][0]),
                )
            vals = vals2
        out[pos] = vals
    return float(out[0]) if scalar else out.reshape(z_arr.shape)


@lru_cache(maxsize=64)
def _profile_spline(kind: str, alpha_key: float, d: int):
    """log-z tabulated radial profile, cubic spline in xi = log z.

    Returns (spline, z_lo, z_hi); the profile is 0 beyond z_hi (underflow)
    and must not be queried below z_lo.
    """
    order = as_order(alpha_key)
    p, delta = _kernel_power_delta(kind, order, d)
    c = stretch_decay_constant(order)
    z_uf = (700.0 / c) ** (1.0 - order.nu)
    z_lo = 1e-7
    xi = np.linspace(math.log(z_lo), math.log(z_uf), 900)
    z = np.exp(xi)
    vals = f_radial(z, float(d - 1), delta, order, check=False)
    return CubicSpline(xi, vals), z_lo, z_uf


def _profile_eval(kind: str, order: FractionalOrder, d: int, z):
    """Vectorised radial profile via the cached spline (d >= 2) or Wright (d = 1)."""
    p, delta = _kernel_power_delta(kind, order, d)
    z = np.asarray(z, dtype=float)
    if d == 1:
        return wright_phi(-order.nu, delta, z)
    spline, z_lo, z_hi = _profile_spline(kind, order.alpha, d)
    zs = np.atleast_1d(z)
    out = np.zeros_like(zs)
    inside = (zs >= z_lo) & (zs <= z_hi)
    out[inside] = spline(np.log(zs[inside]))
    below = zs < z_lo
    if np.any(below):
        out[below] = f_radial(zs[below], float(d - 1), delta, order, check=False)
    return float(out[0]) if z.ndim == 0 else out.reshape(z.shape)


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------

def _radial_eval(kind: str, t, r, alpha, d: int, interpolated: bool):
    order = as_order(alpha)
    t = np.asarray(t, dtype=float)
    r = np.asarray(r, dtype=float)
    if np.any(t <= 0):
        raise ValueError("kernels require t > 0")
    if d >= 2 and np.any(r == 0):
        raise EvaluationAtSingularity(
            f"{kind}(t, 0) diverges for d={d} (radial integral not integrable)"
        )
    p, delta = _kernel_power_delta(kind, order, d)
    z = r * t ** (-order.nu)
    if interpolated:
        prof = _profile_eval(kind, order, d, z)
    else:
        prof = f_radial(z, float(d - 1), delta, order)
    out = _c_d(d) * t**p * prof
    return float(out) if np.ndim(out) == 0 else out


def green_Y_radial(t, r, alpha, d: int = 1, interpolated: bool = True):
    """Forcing kernel Y(t, x) as a function of t and the radius r = |x|."""
    return _radial_eval("Y", t, r, alpha, d, interpolated)


def green_Z_radial(k: int, t, r, alpha, d: int = 1, interpolated: bool = True):
    """Propagator kernels Z1 (k=1) and Z2 (k=2, alpha > 1) radially."""
    order = as_order(alpha)
    if k not in (1, 2):
        raise ValueError("k must be 1 or 2")
    if k == 2 and order.alpha <= 1:
        raise ValueError("Z2 exists only for alpha > 1")
    return _radial_eval(f"Z{k}", t, r, alpha, d, interpolated)


def _as_radius(x, d: int | None):
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        return abs(float(x)), (1 if d is None else d)
    v = np.atleast_1d(x)
    if d is not None and len(v) != d:
        raise ValueError(f"x has length {len(v)}, expected d={d}")
    return float(np.linalg.norm(v)), len(v)


def green_Y(t: float, x, alpha, d: int | None = None, operator=None) -> float:
    """Y(t, x) for B = Laplacian, or a diagonal-constant rescaling of it.

    ``x`` may be a scalar (d = 1) or a d-vector.  With ``operator`` set to an
    EllipticOperatorSpec of the form sum_i a_i d^2/dx_i^2 (constant diagonal),
    the kernel is the exact rescaling (prod a_i)^(-1/2) Y(t, x_i / sqrt(a_i)).
    """
    if operator is not None:
        diag = operator.constant_diagonal()
        v = np.atleast_1d(np.asarray(x, dtype=float))
        scaled = v / np.sqrt(diag)
        return float(
            green_Y(t, scaled, alpha, d=len(v)) / np.sqrt(np.prod(diag))
        )
    r, dd = _as_radius(x, d)
    return float(green_Y_radial(t, r, alpha, dd, interpolated=False))


def green_Z(k: int, t: float, x, alpha, d: int | None = None, operator=None) -> float:
    """Z_k(t, x) for B = Laplacian (see green_Y for the operator path)."""
    if operator is not None:
        diag = operator.constant_diagonal()
        v = np.atleast_1d(np.asarray(x, dtype=float))
        scaled = v / np.sqrt(diag)
        return float(
            green_Z(k, t, scaled, alpha, d=len(v)) / np.sqrt(np.prod(diag))
        )
    r, dd = _as_radius(x, d)
    return float(green_Z_radial(k, t, r, alpha, dd, interpolated=False))


# ---------------------------------------------------------------------------
# exact cell masses in d = 1
# ---------------------------------------------------------------------------

def _phi_antiderivative(delta_plus_nu: float, order: FractionalOrder, z):
    """int_0^Z phi(-nu, delta; -z) dz = 1/Gamma(delta+nu) - phi(-nu, delta+nu; -Z)."""
    return recip_gamma(delta_plus_nu) - wright_phi(-order.nu, delta_plus_nu, z)


def kernel_cell_masses(kind: str, t: float, edges, alpha) -> np.ndarray:
    """Exact integrals of a d = 1 kernel over the cells of ``edges``.

    Uses the closed antiderivative of the Wright series, so the values are
    exact up to special-function accuracy even across the (integrable)
    singularity at x = 0.
    """
    order = as_order(alpha)
    if kind not in _KERNELS:
        raise ValueError(f"unknown kernel kind {kind!r}")
    if t <= 0:
        raise ValueError("t must be positive")
    p, delta = _kernel_power_delta(kind, order, 1)
    edges = np.asarray(edges, dtype=float)
    scale = t ** (-order.nu)
    dpn = delta + order.nu

    def anti(x):
        # int_0^x K(t, w) dw (signed, odd symmetry around 0)
        z = np.abs(x) * scale
        core = _phi_antiderivative(dpn, order, z)
        return np.sign(x) * _c_d(1) * t ** (p + order.nu) * core

    vals = anti(edges)
    return np.diff(vals)


# ---------------------------------------------------------------------------
# initial data and the J0 term
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InitialData:
    """Initial value u0 and (for alpha > 1) initial derivative u1.

    The callables act on arrays of shape (..., d) and return shape (...).
    """

    u0: object
    u1: object = None
    description: str = "custom"

    @staticmethod
    def constant(value: float = 1.0, u1_value: float | None = None):
        u0 = lambda x: np.full(np.shape(x)[:-1] or (), float(value))
        u1 = None
        if u1_value is not None:
            u1 = lambda x: np.full(np.shape(x)[:-1] or (), float(u1_value))
        return InitialData(u0=u0, u1=u1, description=f"constant:{value}")

    @staticmethod
    def gaussian_bump(center=0.0, width: float = 1.0, amplitude: float = 1.0,
                      with_zero_u1: bool = False):
        c = np.atleast_1d(np.asarray(center, dtype=float))

        def u0(x):
            x = np.asarray(x, dtype=float)
            dist2 = np.sum((x - c) ** 2, axis=-1)
            return amplitude * np.exp(-dist2 / (2.0 * width**2))

        u1 = (lambda x: np.zeros(np.shape(x)[:-1] or ())) if with_zero_u1 else None
        return InitialData(u0=u0, u1=u1, description="gaussian_bump")

    @staticmethod
    def sinusoid(wavenumber: float = 1.0, amplitude: float = 1.0,
                 phase: float = 0.0, with_zero_u1: bool = False):
        def u0(x):
            x = np.asarray(x, dtype=float)
            return amplitude * np.sin(wavenumber * x[..., 0] + phase) if x.ndim else 0.0

        u1 = (lambda x: np.zeros(np.shape(x)[:-1] or ())) if with_zero_u1 else None
        return InitialData(u0=u0, u1=u1, description="sinusoid")


def j0(data: InitialData, t: float, x, alpha, d: int = 1,
       n_cells: int = 4096, tail: float = 1e-12) -> float:
    """Initial-data term: sum_k int u_k(y) Z_{k+1}(t, x - y) dy.

    d = 1 uses exact kernel cell masses against midpoint values of u_k;
    d >= 2 uses tensor Gauss-Legendre over the envelope-truncated box.
    """
    order = as_order(alpha)
    if order.m == 2 and data.u1 is None:
        raise ValueError("alpha > 1 requires initial derivative u1")
    if order.m == 1 and data.u1 is not None:
        raise ValueError("alpha < 1 admits no u1")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if len(x) != d:
        raise ValueError(f"x must have length d={d}")
    radius = truncation_radius(order, t, tail)
    total = 0.0
    kinds = ["Z1"] + (["Z2"] if order.m == 2 else [])
    funcs = [data.u0] + ([data.u1] if order.m == 2 else [])
    if d == 1:
        edges = np.linspace(x[0] - radius, x[0] + radius, n_cells + 1)
        mids = 0.5 * (edges[:-1] + edges[1:])
        for kind, u in zip(kinds, funcs):
            masses = kernel_cell_masses(kind, t, x[0] - edges, order)
            # edges decreasing in y; masses already signed accordingly
            total += float(np.sum(u(mids[:, None]) * (-masses)))
        return total
    # tensor Gauss-Legendre on the box
    n1 = max(8, int(round(n_cells ** (1.0 / d))))
    gl_x, gl_w = roots_legendre(n1)
    axes = [x[i] + radius * gl_x for i in range(d)]
    wts = [radius * gl_w for _ in range(d)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=-1)
    wmesh = np.meshgrid(*wts, indexing="ij")
    wall = np.prod(np.stack([m.ravel() for m in wmesh], axis=-1), axis=-1)
    rr = np.linalg.norm(pts - x[None, :], axis=-1)
    rr = np.maximum(rr, 1e-9 * radius)
    for kind, u in zip(kinds, funcs):
        kern = _radial_eval(kind, t, rr, order, d, interpolated=True)
        total += float(np.sum(wall * u(pts) * kern))
    return total


# ---------------------------------------------------------------------------
# envelopes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EnvelopeParams:
    """Exponents and constants of a dominating envelope C t^zeta |x|^kappa p(t, x).

    For the forcing kernel in d >= 2 the exponents follow
    ``zeta = alpha - (alpha/2) gamma + nu0 alpha - 2`` and
    ``kappa = -d + gamma - 2 nu0 + 2/alpha`` with ``nu0 = nu1 - 2 + 2/alpha``;
    in d = 1 they collapse to ``zeta = alpha/2 - 1``, ``kappa = 0``.  The
    propagator envelopes use ``zeta = -alpha d/2 (+1)``, ``kappa = 0`` and the
    slowly-varying factor ``mu_d``.  Any admissible (gamma, nu1) pair gives
    the same scaling identity ``zeta + (alpha/2) kappa = (alpha/2)(2-d) - 1``.
    """

    alpha: float
    d: int
    gamma: float
    nu1: float
    nu0: float
    zeta: float
    kappa: float
    sigma: float
    c_fit: float = 1.0
    mu_kind: str | None = None  # None, or 'Z'/'Y' to include the mu_d factor

    def __post_init__(self):
        order = as_order(self.alpha)
        lo = 2.0 - 2.0 / order.alpha
        if not (self.gamma > lo):
            raise ValueError(f"gamma must exceed 2 - 2/alpha = {lo}")
        if not (lo < self.nu1 < self.gamma):
            raise ValueError("nu1 must lie in (2 - 2/alpha, gamma)")
        if abs(self.nu0 - (self.nu1 - 2.0 + 2.0 / order.alpha)) > 1e-12:
            raise ValueError("nu0 must equal nu1 - 2 + 2/alpha")
        if self.kappa > 1e-12:
            raise ValueError("kappa must be <= 0")
        if self.sigma <= 0 or self.c_fit <= 0:
            raise ValueError("sigma and c_fit must be positive")

    @staticmethod
    def for_kernel(kind: str, alpha, d: int, gamma: float | None = None,
                   nu1: float | None = None, sigma: float | None = None,
                   c_fit: float = 1.0) -> "EnvelopeParams":
        order = as_order(alpha)
        a = order.alpha
        lo = 2.0 - 2.0 / a
        if gamma is None:
            gamma = 0.5 * (lo + 1.0) if a > 1 else 0.9
        if nu1 is None:
            nu1 = 0.5 * (max(lo, 0.0) + gamma)
        nu0 = nu1 - 2.0 + 2.0 / a
        if sigma is None:
            sigma = 0.9 * stretch_decay_constant(order)
        if kind == "Y":
            if d == 1:
                zeta, kappa = a / 2.0 - 1.0, 0.0
            else:
                zeta = a - (a / 2.0) * gamma + nu0 * a - 2.0
                kappa = -d + gamma - 2.0 * nu0 + 2.0 / a
            mu_kind = None
        elif kind in ("Z1", "Z2"):
            zeta = -a * d / 2.0 + (1.0 if kind == "Z2" else 0.0)
            kappa = 0.0
            mu_kind = "Z"
        else:
            raise ValueError(f"unknown kernel kind {kind!r}")
        return EnvelopeParams(
            alpha=a, d=d, gamma=gamma, nu1=nu1, nu0=nu0, zeta=zeta,
            kappa=kappa, sigma=sigma, c_fit=c_fit, mu_kind=mu_kind,
        )

    @property
    def combined_threshold_exponent(self) -> float:
        """-1/alpha - kappa - (2/alpha) zeta; equals d - 2 + 1/alpha for Y."""
        return -1.0 / self.alpha - self.kappa - (2.0 / self.alpha) * self.zeta


def envelope_bound(t, x, params: EnvelopeParams):
    """c_fit * t^zeta * |x|^kappa * mu_d(z) * p(t, x)."""
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    r = np.abs(x) if x.ndim <= 1 and params.d == 1 else np.linalg.norm(
        np.atleast_2d(x), axis=-1
    )
    if params.kappa < 0 and np.any(r == 0):
        raise ValueError("envelope with kappa < 0 requires x != 0")
    order = as_order(params.alpha)
    z = r * t ** (-order.nu)
    mu_fac = 1.0 if params.mu_kind is None else mu_d(z, params.d, params.mu_kind)
    val = (
        params.c_fit
        * t**params.zeta
        * np.where(params.kappa == 0.0, 1.0, r**params.kappa)
        * mu_fac
        * np.exp(-params.sigma * z ** (2.0 / (2.0 - order.alpha)))
    )
    return float(val) if np.ndim(val) == 0 else val


def envelope_bound_product(t, x_vec, params: EnvelopeParams):
    """Per-coordinate product form prod_i t^(zeta/d) |x_i|^(kappa/d) p(t, x_i)."""
    x_vec = np.atleast_1d(np.asarray(x_vec, dtype=float))
    d = params.d
    order = as_order(params.alpha)
    q = 2.0 / (2.0 - order.alpha)
    zi = np.abs(x_vec) * t ** (-order.nu)
    per = (
        t ** (params.zeta / d)
        * np.where(params.kappa == 0.0, 1.0, np.abs(x_vec) ** (params.kappa / d))
        * np.exp(-params.sigma * zi**q)
    )
    return params.c_fit * float(np.prod(per))


# ---------------------------------------------------------------------------
# elliptic operator spec (validation + diagonal-constant reduction only)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EllipticOperatorSpec:
    """Second-order operator sum a_ij d_i d_j + sum b_j d_j + c.

    Only validation and the constant-diagonal reduction are supported; the
    general variable-coefficient kernel construction is out of scope.
    """

    d: int
    a: object  # x -> (d, d) matrix
    b: object  # x -> (d,) vector
    c: object  # x -> scalar
    a0: float
    holder_gamma: float

    @staticmethod
    def laplacian(d: int) -> "EllipticOperatorSpec":
        eye = np.eye(d)
        return EllipticOperatorSpec(
            d=d,
            a=lambda x: eye,
            b=lambda x: np.zeros(d),
            c=lambda x: 0.0,
            a0=1.0,
            holder_gamma=1.0,
        )

    @staticmethod
    def diagonal(coeffs) -> "EllipticOperatorSpec":
        coeffs = np.atleast_1d(np.asarray(coeffs, dtype=float))
        if np.any(coeffs <= 0):
            raise ValueError("diagonal coefficients must be positive")
        d = len(coeffs)
        mat = np.diag(coeffs)
        return EllipticOperatorSpec(
            d=d,
            a=lambda x: mat,
            b=lambda x: np.zeros(d),
            c=lambda x: 0.0,
            a0=float(coeffs.min()),
            holder_gamma=1.0,
        )

    def validate(self, sample_points, xi_samples) -> list[str]:
        """Check symmetry, uniform ellipticity and boundedness on samples."""
        issues = []
        bound = 0.0
        for x in sample_points:
            mat = np.asarray(self.a(x), dtype=float)
            if mat.shape != (self.d, self.d):
                issues.append(f"a({x}) has shape {mat.shape}")
                continue
            if not np.allclose(mat, mat.T, atol=1e-12):
                issues.append(f"a({x}) is not symmetric")
            for xi in xi_samples:
                xi = np.asarray(xi, dtype=float)
                quad_form = float(xi @ mat @ xi)
                if quad_form < self.a0 * float(xi @ xi) - 1e-12:
                    issues.append(
                        f"ellipticity violated at x={x}: {quad_form:.6g} < "
                        f"{self.a0 * float(xi @ xi):.6g}"
                    )
            bound = max(
                bound,
                float(np.abs(mat).max()),
                float(np.abs(np.asarray(self.b(x))).max(initial=0.0)),
                abs(float(self.c(x))),
            )
        if not np.isfinite(bound):
            issues.append("coefficients unbounded on sampled grid")
        return issues

    def constant_diagonal(self) -> np.ndarray:
        """Diagonal coefficients if a is constant diagonal, b = 0, c = 0."""
        probes = [np.zeros(self.d), np.ones(self.d), np.full(self.d, -1.7)]
        mats = [np.asarray(self.a(x), dtype=float) for x in probes]
        ref = mats[0]
        for m in mats[1:]:
            if not np.allclose(m, ref, atol=1e-12):
                raise ValueError("operator is not constant-coefficient")
        if not np.allclose(ref, np.diag(np.diag(ref)), atol=1e-12):
            raise ValueError("operator is not diagonal")
        for x in probes:
            if np.any(np.abs(np.asarray(self.b(x))) > 1e-12) or abs(
                float(self.c(x))
            ) > 1e-12:
                raise ValueError(
                    "drift / zeroth-order terms admit no exact kernel reduction"
                )
        return np.diag(ref)


# ---------------------------------------------------------------------------
# time-domain differintegral cross-check for Z1 / Z2
# ---------------------------------------------------------------------------

def green_Z_timedomain(k: int, t: float, x: float, alpha, n: int = 2048,
                       rel_tol: float = 1e-5, max_refine: int = 4) -> float:
    """Z_k(t, x) in d = 1 by numerical Riemann-Liouville differintegral of Y.

    Product-trapezoid discretisation on a uniform grid of s -> Y(s, x),
    refined until two levels agree to ``rel_tol``.  Serves as the
    independent cross-check of the closed Wright forms.
    """
    from .specfun import _frac_integral_trapezoid  # shared product-trapezoid rule

    order = as_order(alpha)
    a = order.alpha
    if k == 2 and a <= 1:
        raise ValueError("Z2 exists only for alpha > 1")
    if x == 0.0:
        raise EvaluationAtSingularity("time-domain route needs x != 0")

    def level(n_pts: int) -> float:
        s = np.linspace(0.0, t, n_pts + 1)
        dt = s[1] - s[0]
        y = np.zeros_like(s)
        y[1:] = green_Y_radial(s[1:], abs(x), order, 1, interpolated=False)
        if a < 1:
            return float(_frac_integral_trapezoid(y, 1.0 - a, dt)[-1])
        z2 = _frac_integral_trapezoid(y, 2.0 - a, dt)
        if k == 2:
            return float(z2[-1])
        # Z1 = d/dt Z2, one-sided second-order difference at the endpoint
        return float((3.0 * z2[-1] - 4.0 * z2[-2] + z2[-3]) / (2.0 * dt))

    prev = level(n)
    for _ in range(max_refine):
        n *= 2
        cur = level(n)
        if abs(cur - prev) <= rel_tol * max(abs(cur), 1e-300):
            return cur
        prev = cur
    raise QuadratureFailure(
        f"time-domain Z{k} did not converge to rel_tol={rel_tol}", value=prev
    )


# ---------------------------------------------------------------------------
# domination scan
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    """Log-spaced (t, r) scan rectangle with t in [t_min, t_max], r = |x|."""

    t_min: float = 0.05
    t_max: float = 1.0
    nt: int = 24
    r_min: float = 0.05
    r_max: float = 4.0
    nr: int = 32

    def points(self):
        t = np.geomspace(self.t_min, self.t_max, self.nt)
        r = np.geomspace(self.r_min, self.r_max, self.nr)
        return t, r


@dataclass
class DominationReport:
    kernel: str
    alpha: float
    d: int
    c_fit: float
    sigma_fit: float
    train_sup: float
    validation_sup: float
    argmax: tuple
    passed: bool
    fit_history: list

    def to_dict(self) -> dict:
        return {
            "kernel": self.kernel,
            "alpha": self.alpha,
            "d": self.d,
            "c_fit": self.c_fit,
            "sigma_fit": self.sigma_fit,
            "train_sup": self.train_sup,
            "validation_sup": self.validation_sup,
            "argmax": list(self.argmax),
            "passed": bool(self.passed),
            "fit_history": self.fit_history,
        }


def _scan_values(kind: str, order: FractionalOrder, d: int, t: np.ndarray,
                 r: np.ndarray):
    tt, rr = np.meshgrid(t, r, indexing="ij")
    z = rr * tt ** (-order.nu)
    p, _ = _kernel_power_delta(kind, order, d)
    prof = _profile_eval(kind, order, d, z)
    return tt, rr, z, _c_d(d) * tt**p * prof


def _fit_c_sigma(kind, params, order, t, r):
    """Best (c, sigma) minimising the sup ratio on the given grid."""
    from scipy.optimize import minimize_scalar

    tt, rr, z, kern = _scan_values(kind, order, params.d, t, r)
    mask = np.abs(kern) > 1e-280
    if not np.any(mask):
        raise FitFailure("kernel underflows on the whole grid")
    q = 2.0 / (2.0 - order.alpha)
    mu_fac = (
        np.ones_like(z)
        if params.mu_kind is None
        else mu_d(z, params.d, params.mu_kind)
    )
    base = (
        np.log(np.abs(kern[mask]))
        - params.zeta * np.log(tt[mask])
        - params.kappa * np.log(rr[mask])
        - np.log(mu_fac[mask])
    )
    w = z[mask] ** q

    def sup_log(sig):
        return np.max(base + sig * w)

    res = minimize_scalar(sup_log, bounds=(1e-4, 20.0), method="bounded",
                          options={"xatol": 1e-6})
    sigma = float(res.x)
    c = math.exp(sup_log(sigma)) * 1.05  # 5% headroom over the training sup
    return c, sigma


def _sup_ratio(kind, params, order, t, r):
    tt, rr, z, kern = _scan_values(kind, order, params.d, t, r)
    env = (
        params.c_fit
        * tt**params.zeta
        * np.where(params.kappa == 0.0, 1.0, rr**params.kappa)
        * (1.0 if params.mu_kind is None else mu_d(z, params.d, params.mu_kind))
        * np.exp(-params.sigma * z ** (2.0 / (2.0 - order.alpha)))
    )
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(np.abs(kern) > 0, np.abs(kern) / env, 0.0)
    ratio = np.where(np.isfinite(ratio), ratio, 0.0)
    idx = np.unravel_index(np.argmax(ratio), ratio.shape)
    return float(ratio[idx]), (float(tt[idx]), float(rr[idx]))


def verify_envelope(kernel: str, params: EnvelopeParams, grid: GridSpec,
                    fit: bool = True, tol: float = 0.0,
                    refinements: int = 2) -> DominationReport:
    """Fit envelope constants on a grid, then check domination on a refined one.

    With ``fit=True`` the constants (c_fit, sigma) minimising the sup ratio
    are chosen on the training grid (re-fit under t_min-halving; FitFailure
    if the constant diverges, which flags a badly wrong time exponent).  The
    report PASSes when the sup ratio on the refined validation grid stays
    <= 1 + tol.
    """
    order = as_order(params.alpha)
    history = []
    g = grid
    c, sigma = params.c_fit, params.sigma
    if fit:
        prev_c = None
        for level in range(refinements + 1):
            t, r = g.points()
            c, sigma = _fit_c_sigma(kernel, params, order, t, r)
            history.append({"t_min": g.t_min, "c_fit": c, "sigma": sigma})
            if prev_c is not None and c > 3.0 * prev_c:
                raise FitFailure(
                    f"envelope constant diverges under refinement "
                    f"(c went {prev_c:.4g} -> {c:.4g}); time exponent is wrong"
                )
            prev_c = c
            if level < refinements:
                g = replace(g, t_min=g.t_min / 2.0, nt=g.nt + 8)
    fitted = replace(params, c_fit=c, sigma=sigma)
    t, r = g.points()
    train_sup, _ = _sup_ratio(kernel, fitted, order, t, r)
    gv = replace(g, t_min=g.t_min / 4.0, nt=2 * g.nt, nr=2 * g.nr)
    tv, rv = gv.points()
    val_sup, argmax = _sup_ratio(kernel, fitted, order, tv, rv)
    return DominationReport(
        kernel=kernel,
        alpha=order.alpha,
        d=params.d,
        c_fit=c,
        sigma_fit=sigma,
        train_sup=train_sup,
        validation_sup=val_sup,
        argmax=argmax,
        passed=bool(val_sup <= 1.0 + tol),
        fit_history=history,
    )


# ---------------------------------------------------------------------------
# tabulation export
# ---------------------------------------------------------------------------

def tabulate_kernel_csv(path, kind: str, alpha, d: int, t_values, r_values):
    """CSV with header (t, x1..xd, value); points taken along the x1 axis."""
    order = as_order(alpha)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["t"] + [f"x{i + 1}" for i in range(d)] + ["value"])
        for t in t_values:
            vals = _radial_eval(kind, float(t), np.asarray(r_values, float),
                                order, d, interpolated=(d > 1))
            for r, v in zip(r_values, np.atleast_1d(vals)):
                row = [f"{t:.17g}", f"{r:.17g}"] + ["0"] * (d - 1) + [f"{v:.17g}"]
                w.writerow(row)
