"""Geodesic Radon-Fourier transform and the Patterson-Sullivan transform.

Every pairing against a PS eigendistribution reduces, through its Dirac
factors, to a single weighted Fourier integral along a parametrized geodesic;
distributions are never materialized.  Endpoint conventions: the pair
(b', b) parametrizes the geodesic from b' (backward) to b (forward), and the
first frequency slot of a PS value rides the forward endpoint.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import AnalyticStripExceeded, DegenerateGeodesic, GridTooCoarse
from .fields import GroupFunction, Symbol
from .geometry import (
    boundary_many,
    busemann_many,
    forward_many,
    geodesic_frame_matrix,
    geodesic_points_many,
)
from .quadrature import (
    QuadratureSpec,
    boundary_grid,
    disc_grid,
    gauss_legendre,
    line_grid,
    plancherel_weights,
)
from .tables import PsTable

__all__ = [
    "radon_fourier",
    "radon_points",
    "ps_transform",
    "ps_pairs",
    "build_ps_table",
    "ps_inverse",
    "ps_norm_identity",
    "ps_normalized",
]

COLLAR = 0.05   # angular exclusion around the boundary diagonal


def _check_endpoints(b_minus: complex, b_plus: complex, collar: float = 1e-9) -> None:
    sep = abs(math.remainder(np.angle(b_minus) - np.angle(b_plus), 2 * math.pi))
    if sep < collar:
        raise DegenerateGeodesic(f"endpoints {sep:.2e} rad apart")


def _geodesic_window(decay, origin_gap: float, q: QuadratureSpec) -> float:
    """Half-width in tau outside which the integrand is below tolerance.

    origin_gap is the distance from the origin to the geodesic's closest
    point; points at parameter tau sit at distance >= |tau| - origin_gap...
    actually >= max(|tau|, origin_gap), so the envelope argument uses |tau|.
    """
    rad = decay.effective_radius(max(q.tol * 1e-3, 1e-13)) + 1.0
    return min(max(rad + origin_gap, 2.0), q.line_halfwidth)


def radon_points(f, b_minus: complex, b_plus: complex, taus: np.ndarray) -> np.ndarray:
    """f evaluated along the geodesic orbit g(b', b) a_tau."""
    z = geodesic_points_many(b_minus, b_plus, taus)
    if isinstance(f, GroupFunction) or callable(f):
        return np.asarray(f(z, np.full(taus.shape, b_plus)))
    raise TypeError("f must be callable in (z, b)-coordinates")


def radon_fourier(f: GroupFunction, b_minus, b_plus, r, q: QuadratureSpec) -> complex:
    """R f(b', b, r) = int f(g(b', b) a_t) e^{-i r t} dt."""
    bm = complex(getattr(b_minus, "value", b_minus))
    bp = complex(getattr(b_plus, "value", b_plus))
    _check_endpoints(bm, bp)
    rv = complex(getattr(r, "r", r))
    gap = -math.log(abs(bp - bm) / 2.0)
    if abs(rv.imag) > 0 and f.decay.kind == "exponential" \
            and f.decay.param <= abs(rv.imag):
        from .errors import TailTooFat
        raise TailTooFat("decay along the geodesic cannot beat e^{|Im r| |t|}")
    T = _geodesic_window(f.decay, max(gap, 0.0), q)
    t, wt = line_grid(T, q.line_nodes)
    vals = radon_points(f, bm, bp, t)
    return complex(np.sum(vals * np.exp(-1j * rv * t) * wt))


def _slot(nu: complex, nup: complex) -> complex:
    """(nu - conj(nu'))/2i, the frequency slot pinned by the PS extension."""
    return (nu - np.conj(nup)) / 2j


def ps_transform(a: Symbol, nu, b, nup, bp, q: QuadratureSpec) -> complex:
    """PS a(nu, b, nu', b') through the Radon route:

        |b - b'|^{-(1 + nu - conj nu')} int a(g(b',b) a_tau, slot)
                                           e^{(nu + conj nu') tau} d tau.
    """
    bv = complex(getattr(b, "value", b))
    bpv = complex(getattr(bp, "value", bp))
    _check_endpoints(bv, bpv)
    nu = complex(nu)
    nup = complex(nup)
    s = _slot(nu, nup)
    if abs(s.imag) > a.analytic_strip:
        raise AnalyticStripExceeded(
            f"slot {s:g} outside the declared strip {a.analytic_strip:g}")
    gap = -math.log(abs(bv - bpv) / 2.0)
    T = _geodesic_window(a.z_decay, max(gap, 0.0), q)
    t, wt = line_grid(T, q.line_nodes)
    z = geodesic_points_many(bpv, bv, t)
    vals = a.eval_fixed_b(z, bv, np.array([s]))[:, 0]
    integral = np.sum(vals * np.exp((nu + np.conj(nup)) * t) * wt)
    return complex(abs(bv - bpv) ** (-(1.0 + nu - np.conj(nup))) * integral)


def ps_pairs(a: Symbol, rs, rps, b: complex, bp: complex,
             q: QuadratureSpec) -> np.ndarray:
    """PS a(i r_k, b, i r'_k, b') for aligned real frequency lists."""
    rs = np.asarray(rs, dtype=float)
    rps = np.asarray(rps, dtype=float)
    _check_endpoints(b, bp)
    gap = max(-math.log(abs(b - bp) / 2.0), 0.0)
    T = _geodesic_window(a.z_decay, gap, q)
    t, wt = line_grid(T, q.line_nodes)
    z = geodesic_points_many(bp, b, t)
    slots = (rs + rps) / 2.0
    A = a.eval_fixed_b(z, b, slots)                      # (nt, nk)
    ph = np.exp(1j * np.outer(t, rs - rps))
    integ = np.einsum("tk,tk,t->k", A, ph, wt)
    return np.abs(b - bp) ** (-(1.0 + 1j * (rs + rps))) * integ


def build_ps_table(a: Symbol, r_axis, b_angles, rp_axis, bp_angles,
                   q: QuadratureSpec, r_weights=None, rp_weights=None,
                   collar: float = COLLAR) -> PsTable:
    """Tabulate PS a(ir, b, ir', b'); pairs inside the collar are zeroed."""
    r_axis = np.asarray(r_axis, dtype=float)
    rp_axis = np.asarray(rp_axis, dtype=float)
    b_angles = np.asarray(b_angles, dtype=float)
    bp_angles = np.asarray(bp_angles, dtype=float)
    R, RP = np.meshgrid(r_axis, rp_axis, indexing="ij")
    vals = np.zeros((len(r_axis), len(b_angles), len(rp_axis), len(bp_angles)),
                    dtype=complex)
    for j, bang in enumerate(b_angles):
        for l, bpang in enumerate(bp_angles):
            if abs(math.remainder(bang - bpang, 2 * math.pi)) < collar:
                continue
            vals[:, j, :, l] = ps_pairs(a, R.ravel(), RP.ravel(),
                                        np.exp(1j * bang), np.exp(1j * bpang),
                                        q).reshape(len(r_axis), len(rp_axis))
    return PsTable(collar=collar, r=r_axis, b_angles=b_angles, rp=rp_axis,
                   bp_angles=bp_angles, values=vals, r_weights=r_weights,
                   rp_weights=rp_weights)


def ps_inverse(PS: PsTable, b_minus, b_plus, t: float, R: float,
               q: QuadratureSpec) -> complex:
    """a(b', b, t, R) = (1/pi) e^{2iRt} |b-b'|^{1+2iR}
                        int PS a(ir, b, i(2R-r), b') e^{-2irt} dr."""
    if PS.r_weights is None:
        raise GridTooCoarse("PS table was built without r quadrature weights")
    bv = complex(getattr(b_plus, "value", b_plus))
    bpv = complex(getattr(b_minus, "value", b_minus))
    bang = float(np.angle(bv) % (2 * math.pi))
    bpang = float(np.angle(bpv) % (2 * math.pi))
    j = int(np.argmin(np.abs(np.angle(np.exp(1j * (PS.b_angles - bang))))))
    l = int(np.argmin(np.abs(np.angle(np.exp(1j * (PS.bp_angles - bpang))))))
    if abs(math.remainder(PS.b_angles[j] - bang, 2 * math.pi)) > 1e-9 or \
       abs(math.remainder(PS.bp_angles[l] - bpang, 2 * math.pi)) > 1e-9:
        raise GridTooCoarse("requested endpoints are not table nodes")
    sl = PS.values[:, j, :, l]                       # (nr, nrp)
    targets = 2.0 * R - PS.r
    from scipy.interpolate import CubicSpline
    if np.any(targets < PS.rp[0]) or np.any(targets > PS.rp[-1]):
        raise GridTooCoarse("slice r' = 2R - r leaves the table's r' range")
    vals = np.diagonal(CubicSpline(PS.rp, sl, axis=1)(targets))
    integral = np.sum(vals * np.exp(-2j * PS.r * t) * PS.r_weights)
    return complex((1.0 / math.pi) * np.exp(2j * R * t)
                   * abs(bv - bpv) ** (1.0 + 2j * R) * integral)


def ps_norm_identity(a: Symbol, q: QuadratureSpec, n_b: int = 24,
                     r_halfwidth: float | None = None, n_r: int = 48,
                     collar: float = COLLAR) -> tuple[float, float]:
    """Both sides of the Haar-norm identity

        ||a||^2_{L2(G x R, dg x dp)} =
        (1/pi) int |PS a(ir,b,ir',b')|^2 db db' s tanh(pi s) dr dr',

    s = (r + r')/2.  Left side in (z, b)-coordinates with the Poisson
    density; right side on uniform frequency grids sharing values along the
    (r + r', r - r') diagonals.
    """
    hw = r_halfwidth or _sym_r_hw(a, q)
    # left: int |a|^2 P Vol db dp over the full frequency line
    rad = min(a.z_decay.effective_radius(max(q.tol * 1e-2, 1e-12)) + 1.0,
              q.disc_radius_max)
    g = disc_grid(q, radius=rad)
    r, wr = gauss_legendre(-hw, hw, max(q.r_nodes // 2, 2 * n_r))
    bb, wb = boundary_grid(n_b)
    left = 0.0
    for bj, wj in zip(bb, wb):
        A = a.eval_fixed_b(g.z, bj, r)
        P = np.exp(busemann_many(g.z, bj))
        left += wj * float(np.einsum("nm,n,n,m->", np.abs(A) ** 2, P, g.w,
                                     wr * plancherel_weights(r)).real)
    # right: uniform grids so (r+r')/2 and r-r' live on shared axes
    rg = np.linspace(-hw, hw, n_r)
    h = rg[1] - rg[0]
    ssum = np.linspace(-hw, hw, 2 * n_r - 1)          # values of (r_i + r_j)/2
    xdif = np.linspace(-2 * hw, 2 * hw, 2 * n_r - 1)  # values of r_i - r_j
    right = 0.0
    idx = np.add.outer(np.arange(n_r), np.arange(n_r))
    jdx = np.subtract.outer(np.arange(n_r), np.arange(n_r)) + (n_r - 1)
    weight_s = (ssum * np.tanh(math.pi * ssum))[idx]
    for j, bang in enumerate(bb):
        for l, bpang in enumerate(bb):
            if abs(math.remainder(np.angle(bang) - np.angle(bpang),
                                  2 * math.pi)) < collar:
                continue
            F = _ps_profile_matrix(a, ssum, xdif, bang, bpang, q)
            mod2 = np.abs(F[idx, jdx]) ** 2 / abs(bang - bpang) ** 2
            right += wb[j] * wb[l] * float(np.sum(mod2 * weight_s)) * h * h
    right /= math.pi
    return left, right


def _sym_r_hw(a: Symbol, q: QuadratureSpec) -> float:
    return float(min(a.r_decay.effective_halfwidth(max(q.tol * 1e-2, 1e-12)),
                     q.r_halfwidth))


def _ps_profile_matrix(a: Symbol, slots: np.ndarray, freqs: np.ndarray,
                       b: complex, bp: complex, q: QuadratureSpec) -> np.ndarray:
    """F[m, n] = int a(g(b',b) a_tau, slots[m]) e^{i freqs[n] tau} d tau."""
    gap = max(-math.log(abs(b - bp) / 2.0), 0.0)
    T = _geodesic_window(a.z_decay, gap, q)
    t, wt = line_grid(T, max(q.line_nodes // 2, 96))
    z = geodesic_points_many(bp, b, t)
    A = a.eval_fixed_b(z, b, slots)                  # (nt, nm)
    E = np.exp(1j * np.outer(freqs, t))              # (nn, nt)
    return (E @ (A * wt[:, None])).T                  # (nm, nn)


def ps_normalized(a: Symbol, nu, b, nup, bp, q: QuadratureSpec) -> complex:
    """pi mu0(1/2 + (nu - conj nu')/2) PS a(nu, b, nu', b').

    For nu = ir, nu' = ir' the mu0 argument is 1/2 + i (r + r')/2.
    """
    from .intertwiner import mu0
    s = _slot(complex(nu), complex(nup))
    scale = math.pi * mu0(0.5 + 1j * s).value
    return scale * ps_transform(a, nu, b, nup, bp, q)
