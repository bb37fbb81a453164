"""Plane waves, the Helgason Fourier transform and its inversion theory.

The forward transform is evaluated in horocyclic coordinates adapted to the
boundary target: writing points as w = b . psi(u + i e^t) with u = e^{t/2} v,
the hyperbolic area and the plane-wave weight combine to

    F f(b, r) = integral over (v, t) of f(w(v, t)) e^{-i r t} dv dt,

a plain 1-D Fourier integral in t with no oscillation in v.  This keeps the
oscillatory direction exactly resolved at every frequency; the geodesic
polar grid of :mod:`hypdisc.quadrature` remains the engine for
non-oscillatory disc integrals, and the two routes are cross-checked in the
test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import QuadratureNotConverged, StencilOutOfDisc, TailTooFat
from .fields import ScalarField
from .geometry import busemann_many
from .quadrature import (
    QuadratureSpec,
    boundary_grid,
    disc_grid,
    gauss_legendre,
    plancherel_weights,
)

__all__ = [
    "SpectralPoint",
    "plane_wave",
    "plancherel_density",
    "laplace_beltrami",
    "spherical_function",
    "helgason_fourier",
    "helgason_many",
    "helgason_inverse",
    "plancherel_norms",
    "HorocycleMesh",
    "horocycle_mesh",
]


@dataclass(frozen=True)
class SpectralPoint:
    """Frequency r; the spectral parameter is nu = i r."""

    r: complex

    def __post_init__(self):
        object.__setattr__(self, "r", complex(self.r))

    @property
    def nu(self) -> complex:
        return 1j * self.r

    @property
    def laplace_eigenvalue(self) -> complex:
        return -(0.25 + self.r * self.r)


def plane_wave(nu: SpectralPoint, b, z):
    """e_{nu,b}(z) = exp((1/2 + nu) <z, b>); b, z as complex or typed points."""
    bv = getattr(b, "value", b)
    zv = getattr(z, "z", z)
    return np.exp((0.5 + nu.nu) * busemann_many(zv, bv))


def plancherel_density(r):
    """dp(r)/dr = (1/2 pi) r tanh(pi r); nonnegative and even."""
    return plancherel_weights(r)


def laplace_beltrami(f, z, h: float = 1e-3):
    """Finite-difference Laplacian in the curvature -1 metric.

    Five-point stencil of the euclidean Laplacian scaled by (1-|z|^2)^2/4;
    O(h^2) consistent.  f may be a ScalarField or any callable on complex
    arrays.
    """
    zv = getattr(z, "z", z)
    if abs(zv) + 2 * h >= 1.0:
        raise StencilOutOfDisc(f"|z|={abs(zv):.6f} with step {h:g}")
    pts = np.array([zv, zv + h, zv - h, zv + 1j * h, zv - 1j * h])
    v = np.asarray(f(pts))
    lap_euc = (v[1] + v[2] + v[3] + v[4] - 4.0 * v[0]) / (h * h)
    return (1.0 - abs(zv) ** 2) ** 2 / 4.0 * lap_euc


def spherical_function(z, r: float = 0.0, n_b: int = 256):
    """phi_r(z) = int_B e^{(1/2 + i r) <z, b>} db by angular quadrature."""
    zv = np.atleast_1d(np.asarray(getattr(z, "z", z), dtype=complex))
    b, wb = boundary_grid(n_b)
    vals = np.exp((0.5 + 1j * r) * busemann_many(zv[:, None], b[None, :]))
    out = vals @ wb
    return out if np.ndim(getattr(z, "z", z)) else complex(out[0])


def _hyp2f1_series(a, b, c, w, kmax: int = 4000, rtol: float = 1e-15):
    """Gauss series sum_k (a)_k (b)_k / ((c)_k k!) w^k, broadcasting.

    a, b, c and w must broadcast; forward accumulation is stable because the
    term ratio tends to w with |w| < 1.
    """
    term = np.ones(np.broadcast(a, b, c, w).shape, dtype=complex)
    out = term.copy()
    for k in range(kmax):
        term = term * ((a + k) * (b + k)) / ((c + k) * (1.0 + k)) * w
        out += term
        if np.max(np.abs(term)) < rtol * max(np.max(np.abs(out)), 1e-30):
            break
    return out


def poisson_mode_profile(m_max: int, s_nodes: np.ndarray,
                         d_nodes: np.ndarray) -> np.ndarray:
    """Angular Fourier modes of the plane-wave factor, shape (m_max+1, nd, ns):

        c_m(d, s) = (1/2 pi) int_0^{2 pi} P(x_d, e^{i th})^{1/2 + i s}
                     e^{-i m th} d th
                  = (1-rho^2)^sigma rho^m ((sigma)_m / m!)
                     2F1(sigma, sigma+m; m+1; rho^2),

    sigma = 1/2 + is, rho = tanh(d/2).  For rho^2 close to 1 the 1-z
    connection formula keeps the series short, so the table is accurate at
    any distance; modes with negative m coincide with +m by symmetry.
    """
    from scipy.special import loggamma as lgam

    s = np.asarray(s_nodes, dtype=float)[None, :]       # (1, ns)
    d = np.asarray(d_nodes, dtype=float)[:, None]       # (nd, 1)
    if np.any(np.abs(s) < 1e-8):
        raise ValueError("s = 0 hits the connection-formula pole; shift the grid")
    sig = 0.5 + 1j * s
    rho = np.tanh(d / 2.0)
    z = rho ** 2
    omz = 1.0 / np.cosh(d / 2.0) ** 2                   # 1 - z, computed stably
    near_rows = (z[:, 0] < 0.55)
    far_rows = ~near_rows
    out = np.empty((m_max + 1, len(d_nodes), len(s_nodes)), dtype=complex)
    logrho = np.log(np.maximum(rho, 1e-300))
    for m in range(m_max + 1):
        pref = np.exp(sig * np.log(omz) + m * logrho
                      + lgam(sig + m) - lgam(sig) - lgam(m + 1.0))
        F = np.empty((len(d_nodes), len(s_nodes)), dtype=complex)
        a_, b_, c_ = sig, sig + m, m + 1.0
        if np.any(near_rows):
            F[near_rows] = _hyp2f1_series(a_, b_, c_, z[near_rows])
        if np.any(far_rows):
            # F(a,b;c;z) = A F(a,b;a+b-c+1;1-z)
            #            + B (1-z)^{c-a-b} F(c-a,c-b;c-a-b+1;1-z)
            A = np.exp(lgam(c_) + lgam(c_ - a_ - b_) - lgam(c_ - a_)
                       - lgam(c_ - b_))
            B = np.exp(lgam(c_) + lgam(a_ + b_ - c_) - lgam(a_) - lgam(b_))
            w = omz[far_rows]
            F[far_rows] = (A * _hyp2f1_series(a_, b_, a_ + b_ - c_ + 1.0, w)
                           + B * np.power(w + 0j, c_ - a_ - b_)
                           * _hyp2f1_series(c_ - a_, c_ - b_,
                                            c_ - a_ - b_ + 1.0, w))
        out[m] = pref * F
    zero = np.asarray(d_nodes) < 1e-12
    if np.any(zero):
        out[:, zero, :] = 0.0
        out[0, zero, :] = 1.0
    return out


def spherical_profile(rs: np.ndarray, ds: np.ndarray, n_gl: int = 200) -> np.ndarray:
    """phi_r(d) for real r on a distance grid, shape (nd, nr).

    Uses the Mehler-Dirichlet representation
        phi_r(d) = (sqrt 2 / pi) int_0^d cos(r t) / sqrt(cosh d - cosh t) dt
    with the square-root endpoint removed by t = d - v^2, which stays
    accurate at any distance (the angular integral would need e^d nodes).
    """
    rs = np.asarray(rs, dtype=float)
    ds = np.asarray(ds, dtype=float)
    out = np.empty((len(ds), len(rs)))
    x, w = gauss_legendre(0.0, 1.0, n_gl)
    for i, d in enumerate(ds):
        if d < 1e-12:
            out[i] = 1.0
            continue
        v = np.sqrt(d) * x
        wv = np.sqrt(d) * w
        t = d - v * v
        denom = np.sqrt(np.maximum(np.cosh(d) - np.cosh(t), 1e-300))
        with np.errstate(invalid="ignore", divide="ignore"):
            core = np.where(v > 0, v / denom,
                            1.0 / math.sqrt(max(math.sinh(d), 1e-300)))
        out[i] = (2.0 * math.sqrt(2.0) / math.pi) * \
            (np.cos(np.outer(rs, t)) * (core * wv)[None, :]).sum(axis=1)
    return out


# ---------------------------------------------------------------------------
# horocyclic mesh
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HorocycleMesh:
    """Quadrature mesh in horocyclic coordinates adapted to one boundary point.

    Node (v, t) is the disc point b . psi(e^{t/2} v + i e^t); the busemann
    function against b equals t exactly on the mesh, and weights integrate
    dv dt (which is e^{-t} du dt, the hyperbolic area divided by the Poisson
    density).
    """

    b: complex
    z: np.ndarray       # (nv, nt) complex nodes
    t: np.ndarray       # (nt,)
    wv: np.ndarray      # (nv,)
    wt: np.ndarray      # (nt,)


def horocycle_mesh(b: complex, t_window: tuple[float, float], v_halfwidth: float,
                   nv: int, nt: int, v_center: float = 0.0,
                   sinh_warp: bool = False) -> HorocycleMesh:
    t, wt = gauss_legendre(t_window[0], t_window[1], nt)
    if sinh_warp:
        # v = 2 sinh(x/2): at t = 0 the node at x sits at hyperbolic distance
        # exactly |x|, keeping the resolution uniform in distance
        xmax = 2.0 * math.asinh(v_halfwidth / 2.0)
        x, wx = gauss_legendre(-xmax, xmax, nv)
        v = v_center + 2.0 * np.sinh(x / 2.0)
        wv = wx * np.cosh(x / 2.0)
    else:
        v, wv = gauss_legendre(v_center - v_halfwidth, v_center + v_halfwidth, nv)
    u = np.exp(t[None, :] / 2.0) * v[:, None]
    w_conj = u - 1j * np.exp(t[None, :])          # conjugate upper half-plane point
    z = b * (w_conj + 1j) / (w_conj - 1j)
    return HorocycleMesh(b, z, t, wv, wt)


def transform_windows(decay, tol: float, q: QuadratureSpec,
                      growth: float = 0.5) -> tuple[float, float]:
    """Half-widths (T, V) such that the truncated tail is below tol.

    growth is the exponential rate of the plane-wave modulus, 1/2 + |Im r|.
    Raises TailTooFat if no admissible radius exists below the disc cutoff.
    """
    rad = min(decay.effective_radius(tol) + 1.0, q.disc_radius_max)
    while decay.tail_mass(rad, growth) > tol:
        rad += 1.0
        if rad > q.disc_radius_max:
            decay.require_tail(q.disc_radius_max, growth, tol, "helgason transform")
    T = rad
    V = math.sqrt(max(2.0 * (math.cosh(rad) - 1.0), 1e-6)) * 1.05
    return T, V


def helgason_many(f, bs: np.ndarray, rs: np.ndarray, q: QuadratureSpec,
                  decay=None) -> np.ndarray:
    """F f(b, r) on a product of boundary points and frequencies.

    f: vectorized callable on complex arrays (a ScalarField qualifies).
    Returns an (len(bs), len(rs)) complex array.
    """
    if decay is None:
        if not isinstance(f, ScalarField):
            raise TypeError("pass decay explicitly for bare callables")
        decay = f.decay
    rs = np.asarray(rs, dtype=complex)
    grow = 0.5 + (float(np.max(np.abs(rs.imag))) if np.any(rs.imag) else 0.0)
    T, V = transform_windows(decay, max(q.tol * 1e-2, 1e-12), q, growth=grow)
    out = np.empty((len(bs), len(rs)), dtype=complex)
    for i, b in enumerate(bs):
        mesh = horocycle_mesh(b, (-T, T), V, q.line_nodes, q.line_nodes,
                              sinh_warp=True)
        vals = np.asarray(f(mesh.z))
        prof = mesh.wv @ vals                      # integrate out v -> (nt,)
        ph = np.exp(-1j * np.outer(rs, mesh.t))    # (nr, nt)
        out[i] = ph @ (prof * mesh.wt)
    return out


def helgason_fourier(f, b, r, q: QuadratureSpec, decay=None) -> complex:
    """F f(b, r) = int e^{(1/2 - i r) <z, b>} f(z) Vol(dz).

    Estimates quadrature error by node halving and raises
    QuadratureNotConverged when it exceeds tol relative to the transform's
    mass scale.  Complex r is admitted only when the declared decay
    dominates the e^{|Im r| d} growth (checked via the tail bound).
    """
    bv = complex(getattr(b, "value", b))
    rv = complex(getattr(r, "r", r))
    if decay is None:
        if not isinstance(f, ScalarField):
            raise TypeError("pass decay explicitly for bare callables")
        decay = f.decay
    val = helgason_many(f, np.array([bv]), np.array([rv]), q, decay=decay)[0, 0]
    coarse = helgason_many(f, np.array([bv]), np.array([rv]), q.halved(),
                           decay=decay)[0, 0]
    est = abs(val - coarse)
    scale = max(abs(val), decay.amplitude)
    if est > max(q.tol * scale, 1e-13):
        raise QuadratureNotConverged(
            f"helgason_fourier estimate {est:.3e} exceeds tol {q.tol:.1e} (scale {scale:.1e})")
    return complex(val)


def _inverse_grids(q: QuadratureSpec, z: complex):
    """(b, r) quadrature for the inversion integral at basepoint z.

    The angular node count grows with the chirp rate r_max e^{d(z)} so the
    plane-wave oscillation stays resolved at off-origin probes.
    """
    d = 2.0 * math.atanh(min(abs(z), 1 - 1e-15))
    need = int(6 * q.r_halfwidth * math.exp(d) / (2 * math.pi)) + q.disc_angular_nodes
    n_b = min(max(q.disc_angular_nodes, need), 4096)
    b, wb = boundary_grid(n_b)
    r, wr = gauss_legendre(0.0, q.r_halfwidth, q.r_nodes)
    return b, wb, r, wr * plancherel_weights(r)


def helgason_inverse(Ff, z, q: QuadratureSpec) -> complex:
    """f(z) = int_{R+} int_B F f(b, r) e^{(1/2 + i r) <z, b>} dp(r) db.

    Ff must be vectorized: Ff(b_array, r_array) -> (nb, nr) values.
    """
    zv = complex(getattr(z, "z", z))
    b, wb, r, wr = _inverse_grids(q, zv)
    F = np.asarray(Ff(b, r))
    if F.shape != (len(b), len(r)):
        raise ValueError("Ff must return an (nb, nr) array")
    E = np.exp((0.5 + 1j * r[None, :]) * busemann_many(zv, b)[:, None])
    return complex(np.einsum("br,b,br,r->", F, wb, E, wr))


def plancherel_norms(f: ScalarField, q: QuadratureSpec,
                     n_b: int | None = None) -> tuple[float, float]:
    """(||f||^2_{L2(D, Vol)}, ||F f||^2_{L2(B x R+, db x dp)})."""
    g = disc_grid(q)
    left = float(np.sum(np.abs(f(g.z)) ** 2 * g.w))
    b, wb = boundary_grid(n_b or q.disc_angular_nodes)
    r, wr = gauss_legendre(0.0, q.r_halfwidth, q.r_nodes)
    F = helgason_many(f, b, r, q)
    right = float(np.sum((np.abs(F) ** 2 * (wr * plancherel_weights(r))[None, :])
                         * wb[:, None]))
    return left, right
