"""Hyperbolic pseudo-differential calculus: symbols, kernels, Wigner theory.

An operator never exists as a matrix here; it acts through its kernel

    K_a(z, w) = int_B int_{R+} a(z,b,r) e^{(1/2+ir)<z,b>} e^{(1/2-ir)<w,b>} dp(r) db

or through its defining action on plane waves.  Oscillatory disc integrals
against plane waves run on horocyclic meshes adapted to the wave's boundary
point, where the phase becomes an exact 1-D Fourier factor; kernel-side
integrals, which localize near the diagonal, run on Moebius-translated polar
templates whose hyperbolic weights are translation invariant.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import GridTooCoarse, TailTooFat
from .fields import DecayClass, KernelFunction, PlaneWaveSum, RDecay, ScalarField, Symbol
from .geometry import busemann_many, dist_many
from .quadrature import (
    QuadratureSpec,
    boundary_grid,
    disc_grid,
    gauss_legendre,
    plancherel_weights,
)
from .tables import WignerTable
from .transforms import helgason_many, horocycle_mesh, transform_windows

__all__ = [
    "KernelSymbol",
    "symbol_from_kernel",
    "kernel_from_symbol",
    "kernel_from_symbol_many",
    "op_apply",
    "op_apply_plane_wave",
    "wigner_transform",
    "wigner_many",
    "wigner_pairs",
    "build_wigner_table",
    "wigner_inverse",
    "wigner_isometry_value",
    "hs_norm",
    "hs_norm_kernel_route",
]


# ---------------------------------------------------------------------------
# symbol <-> kernel
# ---------------------------------------------------------------------------

class KernelSymbol(Symbol):
    """Symbol recovered from an operator kernel by the inversion formula

        a(z,b,r) = e^{-(1/2+ir)<z,b>} int K(z,w) e^{(1/2+ir)<w,b>} Vol(dw).

    The w-integral runs on a polar template around each z, carried there by
    the Moebius translation; hyperbolic area weights are translation
    invariant so a single template serves every basepoint.
    """

    def __init__(self, K: KernelFunction, q: QuadratureSpec):
        if K.off_diag_decay.kind == "exponential":
            raise TailTooFat(
                "symbol_from_kernel needs at least gaussian off-diagonal decay "
                "to guarantee the holomorphic frequency extension")
        self.K = K
        self.q = q
        rad = K.off_diag_decay.effective_radius(max(q.tol * 1e-2, 1e-12)) + 1.0
        s, ws = gauss_legendre(0.0, rad, max(q.disc_radial_nodes // 2, 24))
        na = max(q.disc_angular_nodes // 2, 48)
        phi = 2.0 * math.pi * np.arange(na) / na
        self._tpl = (np.tanh(s[:, None] / 2.0) * np.exp(1j * phi[None, :])).ravel()
        self._tplw = ((ws * np.sinh(s))[:, None]
                      * np.full((1, na), 2.0 * math.pi / na)).ravel()
        self._rad = rad
        strip = math.inf if K.off_diag_decay.kind in ("gaussian", "compact") else 0.0
        z_dec = K.base_decay or DecayClass("gaussian", 0.25, K.off_diag_decay.amplitude)
        super().__init__(self._fn, z_dec, RDecay("gaussian", self._r_width()),
                         analytic_strip=strip, weyl_symmetric=True, check=False)

    def _r_width(self) -> float:
        # transform of a kernel with off-diagonal scale ell decays in r on
        # the scale 1/ell; for exp(-beta d^2), ell ~ 1/sqrt(2 beta)
        if self.K.off_diag_decay.kind == "gaussian":
            return math.sqrt(2.0 * self.K.off_diag_decay.param)
        return 4.0 / max(self.K.off_diag_decay.param, 1e-3)

    def eval_points(self, z, b, r) -> np.ndarray:
        """Aligned flat arrays of points (z_i, b_i, r_i) -> values."""
        z = np.asarray(z, dtype=complex).ravel()
        b = np.asarray(b, dtype=complex).ravel()
        r = np.asarray(r, dtype=complex).ravel()
        out = np.empty(z.shape, dtype=complex)
        chunk = max(1, int(2e6 / max(len(self._tpl), 1)))
        for lo in range(0, len(z), chunk):
            sl = slice(lo, lo + chunk)
            zi, bi, ri = z[sl, None], b[sl, None], r[sl, None]
            w = (self._tpl[None, :] + zi) / (1.0 + np.conj(zi) * self._tpl[None, :])
            Bw = busemann_many(w, bi)
            Bz = busemann_many(z[sl], b[sl])
            kv = self.K(zi, w)
            out[sl] = (np.exp(-(0.5 + 1j * r[sl]) * Bz)
                       * np.sum(kv * np.exp((0.5 + 1j * ri) * Bw)
                                * self._tplw[None, :], axis=1))
        return out

    def _fn(self, z, b, r):
        zz, bb, rr = np.broadcast_arrays(np.asarray(z, dtype=complex),
                                         np.asarray(b, dtype=complex),
                                         np.asarray(r))
        return self.eval_points(zz, bb, rr).reshape(zz.shape)

    def eval_fixed_b(self, z, b, r) -> np.ndarray:
        z = np.asarray(z, dtype=complex).ravel()
        r = np.asarray(r)
        imax = float(np.max(np.abs(np.asarray(r, dtype=complex).imag), initial=0.0))
        self.K.off_diag_decay.require_tail(self._rad, 0.5 + imax,
                                           max(self.q.tol, 1e-10), "kernel symbol")
        out = np.empty((len(z), len(r)), dtype=complex)
        chunk = max(1, int(6e6 / (len(self._tpl) * max(len(r), 1))))
        Bz = busemann_many(z, b)
        for lo in range(0, len(z), chunk):
            sl = slice(lo, lo + chunk)
            zi = z[sl, None]
            w = (self._tpl[None, :] + zi) / (1.0 + np.conj(zi) * self._tpl[None, :])
            Bw = busemann_many(w, b)
            kv = self.K(zi, w) * self._tplw[None, :] * np.exp(0.5 * Bw)
            out[sl, :] = np.einsum("nk,nkm->nm", kv,
                                   np.exp(1j * np.multiply.outer(Bw, r)))
        out *= np.exp(-np.multiply.outer(Bz, 0.5 + 1j * np.asarray(r, dtype=complex)))
        return out


def symbol_from_kernel(K: KernelFunction, q: QuadratureSpec) -> KernelSymbol:
    """Recover the (Weyl-symmetric) symbol of the operator with kernel K."""
    sym = KernelSymbol(K, q)
    sym._check_weyl(tol=1e-6)
    return sym


def _symbol_r_window(a: Symbol, q: QuadratureSpec) -> float:
    return float(min(a.r_decay.effective_halfwidth(max(q.tol * 1e-2, 1e-12)),
                     q.r_halfwidth))


def _chirp_boundary_nodes(q: QuadratureSpec, r_max: float, d_max: float) -> int:
    """Angular nodes resolving plane-wave oscillation of rate r e^d."""
    return int(min(max(q.disc_angular_nodes, 4 * r_max * math.exp(d_max)), 4096))


def kernel_from_symbol_many(a: Symbol, z: complex, w, q: QuadratureSpec,
                            half: str = "plus") -> np.ndarray:
    """K_a(z, w_j) for one z and many w, by (b, r)-quadrature.

    half = "plus" integrates r over (0, hw]; "minus" uses the reflected
    range, which agrees for Weyl-symmetric symbols.
    """
    w = np.asarray(w, dtype=complex).ravel()
    z = complex(z)
    r_hw = _symbol_r_window(a, q)
    rho, wr = gauss_legendre(0.0, r_hw, max(q.r_nodes // 4, 24))
    r = -rho if half == "minus" else rho
    d = float(max(dist_many(z, 0j), np.max(dist_many(w, 0j))))
    b, wb = boundary_grid(_chirp_boundary_nodes(q, r_hw, d))
    vals = a(z, b[:, None], r[None, :])                     # (nb, nr)
    Bz = busemann_many(z, b)
    coef = vals * np.exp((0.5 + 1j * r[None, :]) * Bz[:, None]) \
        * (wb[:, None] * (wr * plancherel_weights(r))[None, :])
    out = np.empty(len(w), dtype=complex)
    step = max(1, int(4e6 / (len(b) * len(r))))
    for lo in range(0, len(w), step):
        Bw = busemann_many(w[lo:lo + step, None], b[None, :])   # (chunk, nb)
        E = np.exp(0.5 * Bw)[:, :, None] * np.exp(-1j * np.multiply.outer(Bw, r))
        out[lo:lo + step] = np.einsum("wbr,br->w", E, coef)
    return out


def product_kernel(a: Symbol, q: QuadratureSpec, d_max: float = 14.0,
                   n_d: int = 400) -> KernelFunction:
    """Closed kernel of a b-independent product symbol a = F(z) h(r):

        K_a(z, w) = F(z) kappa_h(d(z, w)),
        kappa_h(d) = int_{R+} h(r) phi_r(d) dp(r),

    with phi_r the spherical function.  The angular integral in Eq-KERNEL
    collapses by rotational symmetry; only 1-D quadratures remain.
    """
    from scipy.interpolate import CubicSpline

    from .transforms import spherical_profile

    if not hasattr(a, "z_part"):
        raise TypeError("product_kernel needs a symbol with separable structure")
    r_hw = _symbol_r_window(a, q)
    r, wr = gauss_legendre(0.0, r_hw, max(q.r_nodes // 2, 64))
    ds = np.linspace(0.0, d_max, n_d)
    phi = spherical_profile(r, ds)                       # (nd, nr)
    kappa = phi @ (np.asarray(a.h_part(r)) * wr * plancherel_weights(r))
    interp = CubicSpline(ds, kappa)

    def fn(z, w):
        d = dist_many(z, w)
        out = np.zeros(np.broadcast(z, w).shape, dtype=complex)
        ok = d < d_max
        vals = np.broadcast_to(np.asarray(a.z_part(z), dtype=complex),
                               np.broadcast(z, w).shape)
        out[ok] = vals[ok] * interp(d[ok])
        return out

    # kappa of a gaussian profile decays like exp(-sigma^2 d^2 / 2) e^{-d/2}
    sig = a.r_decay.param
    off = DecayClass("gaussian", max(sig * sig / 2.0, 0.2),
                     float(np.max(np.abs(kappa))) * 1.5)
    return KernelFunction(fn, off, base_decay=a.z_decay, check=False)


def symbol_kernel_values(a: Symbol, z: complex, w, q: QuadratureSpec) -> np.ndarray:
    """K_a(z, w_j), routed through the cheapest faithful representation."""
    w = np.asarray(w, dtype=complex).ravel()
    if isinstance(a, KernelSymbol):
        return np.asarray(a.K(np.full(w.shape, z), w), dtype=complex)
    if hasattr(a, "z_part"):
        key = "_kernel_cache"
        if not hasattr(a, key):
            setattr(a, key, product_kernel(a, q))
        return np.asarray(getattr(a, key)(np.full(w.shape, z), w), dtype=complex)
    return kernel_from_symbol_many(a, z, w, q)


def kernel_from_symbol(a: Symbol, z, w, q: QuadratureSpec) -> complex:
    """Scalar K_a(z, w); checks the reflected-range form when a is symmetric."""
    zv = complex(getattr(z, "z", z))
    wv = complex(getattr(w, "z", w))
    plus = complex(kernel_from_symbol_many(a, zv, np.array([wv]), q)[0])
    if a.weyl_symmetric:
        minus = complex(kernel_from_symbol_many(a, zv, np.array([wv]), q,
                                                half="minus")[0])
        scale = max(abs(plus), abs(minus), a.r_decay.amplitude * 1e-6)
        if abs(plus - minus) > 50 * q.tol * scale:
            raise GridTooCoarse(
                f"reflected-range kernel disagrees ({abs(plus - minus) / scale:.2e}); "
                "symbol symmetry or quadrature is off")
    return plus


# ---------------------------------------------------------------------------
# operator action
# ---------------------------------------------------------------------------

def op_apply(a: Symbol, u, z, q: QuadratureSpec, route: str = "definition") -> complex:
    """Op(a) u (z).

    route "definition": through the Helgason data of u,
        Op(a)u(z) = int int a(z,b,r) e^{(1/2+ir)<z,b>} F u(b,r) dp(r) db,
        with r over (0, hw].  A PlaneWaveSum u is applied exactly through
        the defining property.
    route "kernel": int K_a(z, w) u(w) Vol(dw).
    """
    zv = complex(getattr(z, "z", z))
    if isinstance(u, PlaneWaveSum):
        out = 0j
        for c, bv, rv in u.atoms:
            if rv <= 0:
                raise ValueError("plane-wave atoms need r > 0 for the R+ calculus")
            out += c * complex(a(zv, bv, rv)) * np.exp((0.5 + 1j * rv)
                                                       * busemann_many(zv, bv))
        return complex(out)
    if route == "kernel":
        rad = u.decay.effective_radius(max(q.tol * 1e-2, 1e-12)) + 1.0
        g = disc_grid(q, radius=min(rad, q.disc_radius_max))
        kv = symbol_kernel_values(a, zv, g.z, q)
        return complex(np.sum(kv * u(g.z) * g.w))
    if route != "definition":
        raise ValueError(f"unknown route {route!r}")
    r_hw = _symbol_r_window(a, q)
    r, wr = gauss_legendre(0.0, r_hw, max(q.r_nodes // 4, 24))
    d = float(dist_many(zv, 0j))
    b, wb = boundary_grid(_chirp_boundary_nodes(q, r_hw, d))
    F = helgason_many(u, b, r, q)
    vals = a(zv, b[:, None], r[None, :])
    E = np.exp((0.5 + 1j * r[None, :]) * busemann_many(zv, b)[:, None])
    return complex(np.einsum("br,br,br,b,r->", vals, E, F, wb,
                             wr * plancherel_weights(r)))


def op_apply_plane_wave(a: Symbol, r: float, b, z, q: QuadratureSpec) -> complex:
    """Op(a) e_{ir,b}(z) computed through the kernel,
    int K_a(z, w) e^{(1/2+ir)<w,b>} Vol(dw)."""
    zv = complex(getattr(z, "z", z))
    bv = complex(getattr(b, "value", b))
    # kernel reach: r-profile width sigma gives off-diagonal scale ~ gaussian
    sigma = a.r_decay.param if a.r_decay.kind == "gaussian" else 1.0
    off = DecayClass("gaussian", max(sigma * sigma / 2.0, 0.25))
    rad = off.effective_radius(max(q.tol * 1e-2, 1e-12)) + 1.5
    off.require_tail(rad, 0.5, max(q.tol, 1e-9), "op_apply_plane_wave")
    s, ws = gauss_legendre(0.0, rad, max(q.disc_radial_nodes // 2, 32))
    na = max(q.disc_angular_nodes, int(3 * abs(r) * rad))
    phi = 2.0 * math.pi * np.arange(na) / na
    tpl = (np.tanh(s[:, None] / 2.0) * np.exp(1j * phi[None, :])).ravel()
    tplw = ((ws * np.sinh(s))[:, None] * np.full((1, na), 2 * math.pi / na)).ravel()
    wmesh = (tpl + zv) / (1.0 + np.conj(zv) * tpl)
    kv = symbol_kernel_values(a, zv, wmesh, q)
    return complex(np.sum(kv * np.exp((0.5 + 1j * r) * busemann_many(wmesh, bv))
                          * tplw))


# ---------------------------------------------------------------------------
# Wigner transform
# ---------------------------------------------------------------------------

def _wigner_t_profile(a: Symbol, rs: np.ndarray, b: complex, bp: complex,
                      q: QuadratureSpec):
    """Integrate the b-side integrand over the horocyclic v-direction.

    Returns (t nodes, t weights, profile (nt, nr)); the remaining r'
    dependence is the plain Fourier factor e^{i r' t}.
    """
    im = float(np.max(np.abs(np.asarray(rs, dtype=complex).imag), initial=0.0))
    T, V = transform_windows(a.z_decay, max(q.tol * 1e-2, 1e-12), q,
                             growth=1.0 + im)
    valid = getattr(a, "valid_radius", None)
    if valid is not None and valid < T:
        # synthesized symbols alias beyond their boundary-grid reach
        T = valid
        V = math.sqrt(max(2.0 * (math.cosh(T) - 1.0), 1e-6)) * 1.05
    mesh = horocycle_mesh(bp, (-T, T), V, q.line_nodes, q.line_nodes, sinh_warp=True)
    zf = mesh.z.ravel()
    A = a.eval_fixed_b(zf, b, rs)
    E1 = np.exp(np.multiply.outer(busemann_many(zf, b), 0.5 + 1j * np.asarray(rs)))
    G = (A * E1).reshape(mesh.z.shape + (len(rs),))
    prof = np.einsum("v,vtm->tm", mesh.wv, G)
    return mesh.t, mesh.wt, prof


def wigner_many(a: Symbol, rs, b: complex, rps, bp: complex,
                q: QuadratureSpec) -> np.ndarray:
    """W a(i r, b, i r', b') on the product of the two frequency lists.

    Evaluated in horocyclic coordinates adapted to b', where the b' plane
    wave is the exact Fourier factor e^{i r' t}.
    """
    rs = np.asarray(rs, dtype=complex)
    rps = np.asarray(rps, dtype=complex)
    t, wt, prof = _wigner_t_profile(a, rs, b, bp, q)
    E2 = np.exp(1j * np.outer(rps, t))
    return (E2 @ (prof * wt[:, None])).T


def wigner_pairs(a: Symbol, rs, rps, b: complex, bp: complex,
                 q: QuadratureSpec) -> np.ndarray:
    """W a(i r_k, b, i r'_k, b') for aligned frequency lists."""
    rs = np.asarray(rs, dtype=complex)
    rps = np.asarray(rps, dtype=complex)
    t, wt, prof = _wigner_t_profile(a, rs, b, bp, q)
    E2 = np.exp(1j * np.outer(t, rps))
    return np.einsum("tk,tk,t->k", prof, E2, wt)


def wigner_transform(a: Symbol, r, b, rp, bp, q: QuadratureSpec) -> complex:
    """Scalar W a(ir, b, ir', b') = int a(z,b,r) e_{ir,b}(z) e_{ir',b'}(z) Vol(dz)."""
    bv = complex(getattr(b, "value", b))
    bpv = complex(getattr(bp, "value", bp))
    return complex(wigner_many(a, np.array([r]), bv, np.array([rp]), bpv, q)[0, 0])


def build_wigner_table(a: Symbol, r_axis, b_angles, rp_axis, bp_angles,
                       q: QuadratureSpec, r_weights=None, rp_weights=None) -> WignerTable:
    """Tabulate the Wigner transform on a tensor grid.

    rp_axis should carry quadrature weights when the table will be inverted
    or used for the isometry.
    """
    r_axis = np.asarray(r_axis, dtype=float)
    rp_axis = np.asarray(rp_axis, dtype=float)
    vals = np.empty((len(r_axis), len(b_angles), len(rp_axis), len(bp_angles)),
                    dtype=complex)
    for j, bang in enumerate(b_angles):
        for l, bpang in enumerate(bp_angles):
            vals[:, j, :, l] = wigner_many(a, r_axis, np.exp(1j * bang),
                                           rp_axis, np.exp(1j * bpang), q)
    return WignerTable(r=r_axis, b_angles=np.asarray(b_angles, dtype=float),
                       rp=rp_axis, bp_angles=np.asarray(bp_angles, dtype=float),
                       values=vals, r_weights=r_weights, rp_weights=rp_weights)


def wigner_inverse(W: WignerTable, z, b, r: float, q: QuadratureSpec) -> complex:
    """a(z,b,r) from the table:
    e^{-(1/2+ir)<z,b>} (1/2) int int e^{(1/2-ir')<z,b'>} W(ir,b,ir',b') db' dp(r')."""
    if W.rp_weights is None:
        raise GridTooCoarse("table was built without r' quadrature weights")
    zv = complex(getattr(z, "z", z))
    bv = complex(getattr(b, "value", b))
    bang = float(np.angle(bv) % (2 * math.pi))
    sl = W.slice_at(r, bang)                          # (nrp, nbp)
    # cubic-vs-linear discrepancy; 5 percent of the slice scale means the
    # r-axis cannot resolve the transform between its nodes
    if W.meta.get("last_interp_error", 0.0) > 0.05:
        raise GridTooCoarse(
            f"interpolation error {W.meta['last_interp_error']:.2e} at (r, b)")
    bp = np.exp(1j * W.bp_angles)
    E = np.exp(np.multiply.outer(0.5 - 1j * W.rp, busemann_many(zv, bp)))
    wt = (W.rp_weights * plancherel_weights(W.rp))[:, None] / len(W.bp_angles)
    val = 0.5 * np.sum(sl * E * wt)
    return complex(np.exp(-(0.5 + 1j * r) * busemann_many(zv, bv)) * val)


def wigner_isometry_value(W: WignerTable) -> float:
    """((1/2) || W a ||)^2 over db dp(r) db' dp(r') with both frequencies on R.

    Equals ||a||^2 in L^2_W(G x R, dg x dp); the half applies at the norm
    level (per-axis halving R -> R+), so the squared identity carries 1/4.
    """
    if W.r_weights is None or W.rp_weights is None:
        raise GridTooCoarse("isometry needs weights on both frequency axes")
    wr = W.r_weights * plancherel_weights(W.r)
    wrp = W.rp_weights * plancherel_weights(W.rp)
    s = np.einsum("ijkl,i,k->", np.abs(W.values) ** 2, wr, wrp)
    return float(0.25 * s / (len(W.b_angles) * len(W.bp_angles)))


# ---------------------------------------------------------------------------
# Hilbert-Schmidt norms
# ---------------------------------------------------------------------------

def hs_norm(a: Symbol, q: QuadratureSpec, n_b: int | None = None,
            r_grid=None) -> float:
    """|| Op(a) ||_{HS} by the symbol-side formula
    (int_{R+} int_B int_D |a|^2 P(z,b) Vol(dz) db dp(r))^{1/2}.

    r_grid = (nodes, weights) substitutes an explicit frequency quadrature;
    a symmetric grid is folded with the 1/2 of the full-line form.
    """
    rad = min(a.z_decay.effective_radius(max(q.tol * 1e-2, 1e-12)) + 1.0,
              q.disc_radius_max)
    g = disc_grid(q, radius=rad)
    if r_grid is None:
        r, wr = gauss_legendre(0.0, _symbol_r_window(a, q), max(q.r_nodes // 4, 24))
        fold = 1.0
    else:
        r, wr = map(np.asarray, r_grid)
        fold = 0.5 if r.min() < 0 else 1.0
    b, wb = boundary_grid(n_b or q.disc_angular_nodes)
    total = 0.0
    for bj, wj in zip(b, wb):
        A = a.eval_fixed_b(g.z, bj, r)
        P = np.exp(busemann_many(g.z, bj))
        total += wj * float(np.einsum("nm,n,n,m->", np.abs(A) ** 2, P, g.w,
                                      wr * plancherel_weights(r)).real)
    return math.sqrt(fold * total)


def hs_norm_kernel_route(K, q: QuadratureSpec, radius: float | None = None) -> float:
    """|| K ||_{L^2(D x D)} of a closed-form kernel, the operator-side norm
    that Prop-HSD-style unitary equivalence pairs with hs_norm."""
    if radius is None:
        rad = K.off_diag_decay.effective_radius(1e-8)
        if K.base_decay is not None:
            rad = min(2 * K.base_decay.effective_radius(1e-8) + 1, rad + 12.0)
        radius = min(rad + 2.0, q.disc_radius_max)
    g = disc_grid(q.with_(disc_radial_nodes=max(q.disc_radial_nodes // 2, 48),
                          disc_angular_nodes=max(q.disc_angular_nodes // 2, 64)),
                  radius=radius)
    total = 0.0
    step = max(1, int(4e6 / len(g.z)))
    for lo in range(0, len(g.z), step):
        kv = np.abs(K(g.z[lo:lo + step, None], g.z[None, :])) ** 2
        total += float((g.w[lo:lo + step] @ kv) @ g.w)
    return math.sqrt(total)
