"""Test fields, group functions, symbols and kernels with declared decay.

Decay declarations stand in for the L^p-Schwartz membership the analysis
needs: a field carries an envelope class that is spot-checked at
construction and consulted by the transforms to bound truncated tails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .errors import TailTooFat
from .geometry import busemann_many, dist_many

__all__ = [
    "DecayClass",
    "RDecay",
    "ScalarField",
    "GroupFunction",
    "Symbol",
    "KernelFunction",
    "PlaneWaveSum",
    "gaussian_field",
    "bump_field",
    "exponential_field",
    "gaussian_group_function",
    "product_symbol",
    "gaussian_kernel",
]


@dataclass(frozen=True)
class DecayClass:
    """Envelope |f| <= amplitude * shape(d) with d the hyperbolic distance.

    kind: "compact" (param = support radius), "gaussian" (param = alpha in
    exp(-alpha d^2)) or "exponential" (param = p in exp(-p d)).
    """

    kind: str
    param: float
    amplitude: float = 1.0

    def __post_init__(self):
        if self.kind not in ("compact", "gaussian", "exponential"):
            raise ValueError(f"unknown decay kind {self.kind!r}")
        if self.param <= 0:
            raise ValueError("decay parameter must be positive")

    def envelope(self, d):
        d = np.asarray(d, dtype=float)
        if self.kind == "compact":
            return self.amplitude * (d <= self.param).astype(float)
        if self.kind == "gaussian":
            return self.amplitude * np.exp(-self.param * d * d)
        return self.amplitude * np.exp(-self.param * d)

    def effective_radius(self, tol: float) -> float:
        """Distance beyond which the envelope is below tol * amplitude."""
        if self.kind == "compact":
            return self.param
        if self.kind == "gaussian":
            return math.sqrt(max(math.log(1.0 / tol), 1.0) / self.param)
        return max(math.log(1.0 / tol), 1.0) / self.param

    def tail_mass(self, radius: float, growth: float) -> float:
        """Upper bound for int_{d > radius} envelope(d) e^{growth d} sinh(d) dd."""
        g = growth + 1.0  # sinh d <= e^d / 2, absorb the exponent
        if self.kind == "compact":
            return 0.0 if radius >= self.param else math.inf
        if self.kind == "gaussian":
            a = self.param
            arg = math.sqrt(a) * radius - g / (2.0 * math.sqrt(a))
            return float(0.25 * self.amplitude * math.sqrt(math.pi / a)
                         * math.exp(g * g / (4.0 * a)) * erfc(arg))
        if self.param <= g:
            return math.inf
        return 0.5 * self.amplitude * math.exp(-(self.param - g) * radius) / (self.param - g)

    def require_tail(self, radius: float, growth: float, tol: float, what: str) -> None:
        m = self.tail_mass(radius, growth)
        if not (m <= tol):
            raise TailTooFat(
                f"{what}: tail mass {m:.3e} beyond d={radius:g} with growth "
                f"e^{{{growth:g} d}} exceeds {tol:.1e}")


@dataclass(frozen=True)
class RDecay:
    """Decay of a symbol in the frequency slot.

    kind "gaussian" (param = width sigma of exp(-r^2 / 2 sigma^2)) or
    "superpolynomial" (param = k, envelope (1+|r|)^{-k}).
    """

    kind: str
    param: float
    amplitude: float = 1.0

    def __post_init__(self):
        if self.kind not in ("gaussian", "superpolynomial"):
            raise ValueError(f"unknown r-decay kind {self.kind!r}")

    def envelope(self, r):
        r = np.abs(np.asarray(r, dtype=float))
        if self.kind == "gaussian":
            return self.amplitude * np.exp(-r * r / (2.0 * self.param ** 2))
        return self.amplitude * (1.0 + r) ** (-self.param)

    def effective_halfwidth(self, tol: float) -> float:
        if self.kind == "gaussian":
            return self.param * math.sqrt(2.0 * max(math.log(1.0 / tol), 1.0))
        return tol ** (-1.0 / self.param)


def _spot_check(fn, decay: DecayClass, n_radii: int = 20, slack: float = 1.05) -> None:
    radii = np.linspace(0.05, decay.effective_radius(1e-10) + 1.0, n_radii)
    ang = np.exp(1j * np.linspace(0.0, 2 * math.pi, 8, endpoint=False))
    z = (np.tanh(radii[:, None] / 2.0) * ang[None, :]).ravel()
    d = 2.0 * np.arctanh(np.abs(z))
    vals = np.abs(np.asarray(fn(z)))
    env = decay.envelope(d)
    if np.any(vals > slack * env + 1e-13):
        k = int(np.argmax(vals - slack * env))
        raise ValueError(
            f"declared decay violated: |f|={vals[k]:.3e} vs envelope {env[k]:.3e} "
            f"at d={d[k]:.2f}")


class ScalarField:
    """Function on the disc with a declared decay envelope."""

    def __init__(self, fn, decay: DecayClass, check: bool = True):
        self.fn = fn
        self.decay = decay
        if check:
            _spot_check(fn, decay)

    def __call__(self, z):
        return self.fn(np.asarray(z, dtype=complex))


class GroupFunction:
    """Function on G given in (z, b)-coordinates, with basepoint decay."""

    def __init__(self, fn_zb, decay: DecayClass, check: bool = True):
        self.fn_zb = fn_zb
        self.decay = decay
        if check:
            _spot_check(lambda z: fn_zb(z, np.ones_like(z)), decay)

    def __call__(self, z, b):
        return self.fn_zb(np.asarray(z, dtype=complex), np.asarray(b, dtype=complex))

    def at(self, g) -> complex:
        """Evaluate at a GroupElement."""
        from .geometry import to_zb_coords
        zb = to_zb_coords(g)
        return complex(self(np.array([zb.z.z]), np.array([zb.b.value]))[0])


class Symbol:
    """Symbol a(z, b, r) with declared decay in z and r.

    fn must broadcast over numpy arrays in all three slots (b passed as a
    unit complex number).  ``weyl_symmetric`` declares the r -> -r kernel
    symmetry; construction spot-checks it when set.
    """

    def __init__(self, fn, z_decay: DecayClass, r_decay: RDecay,
                 analytic_strip: float = 0.0, weyl_symmetric: bool = False,
                 check: bool = True):
        self.fn = fn
        self.z_decay = z_decay
        self.r_decay = r_decay
        self.analytic_strip = analytic_strip
        self.weyl_symmetric = weyl_symmetric
        if check and weyl_symmetric:
            self._check_weyl()

    def __call__(self, z, b, r):
        return self.fn(np.asarray(z, dtype=complex), np.asarray(b, dtype=complex),
                       np.asarray(r))

    def eval_fixed_b(self, z: np.ndarray, b: complex, r: np.ndarray) -> np.ndarray:
        """Values a(z_i, b, r_j) as an (nz, nr) array; b fixed."""
        z = np.asarray(z, dtype=complex)
        r = np.asarray(r)
        return self.fn(z[:, None], b, r[None, :])

    def _check_weyl(self, n_b: int = 64, tol: float = 1e-6) -> None:
        # spot-check the r <-> -r symmetry at a few (z, w, r) probes
        ang = np.exp(2j * math.pi * np.arange(n_b) / n_b)
        probes = [(0.31 + 0.1j, -0.2 + 0.24j, 0.9), (0.05 - 0.4j, 0.3j, 1.7)]
        for z, w, r in probes:
            bz = busemann_many(z, ang)
            bw = busemann_many(w, ang)
            lhs = np.mean(self.fn(z, ang, r) * np.exp((0.5 + 1j * r) * bz)
                          * np.exp((0.5 - 1j * r) * bw))
            rhs = np.mean(self.fn(z, ang, -r) * np.exp((0.5 - 1j * r) * bz)
                          * np.exp((0.5 + 1j * r) * bw))
            scale = max(abs(lhs), abs(rhs), 1e-30)
            if abs(lhs - rhs) / scale > tol:
                raise ValueError(
                    f"weyl_symmetric declared but symmetry residual "
                    f"{abs(lhs - rhs) / scale:.2e} at probe (z={z}, w={w}, r={r})")


class KernelFunction:
    """Operator kernel K(z, w) with declared off-diagonal decay."""

    def __init__(self, fn, off_diag_decay: DecayClass,
                 base_decay: DecayClass | None = None, check: bool = True):
        self.fn = fn
        self.off_diag_decay = off_diag_decay
        self.base_decay = base_decay
        if check:
            self._spot_check()

    def __call__(self, z, w):
        return self.fn(np.asarray(z, dtype=complex), np.asarray(w, dtype=complex))

    def _spot_check(self, n: int = 16, slack: float = 1.05) -> None:
        rng = np.random.default_rng(12345)
        z = 0.7 * np.sqrt(rng.uniform(size=n)) * np.exp(2j * math.pi * rng.uniform(size=n))
        s = np.linspace(0.1, self.off_diag_decay.effective_radius(1e-10) + 1.0, 12)
        zeta = np.tanh(s[None, :] / 2.0) * np.exp(2j * math.pi * rng.uniform(size=(n, 12)))
        w = (z[:, None] + zeta) / (1.0 + np.conj(z[:, None]) * zeta)
        d = dist_many(z[:, None], w)
        vals = np.abs(self.fn(z[:, None], w))
        env = self.off_diag_decay.envelope(d)
        if np.any(vals > slack * env + 1e-13):
            raise ValueError("kernel violates its declared off-diagonal envelope")


class PlaneWaveSum:
    """Band-limited field: a finite combination of plane waves e_{ir_j, b_j}.

    Its Helgason data is the atom list itself, so Op(a) acts on it exactly
    through the defining property.
    """

    def __init__(self, atoms):
        # atoms: iterable of (coefficient, b complex on the circle, r real)
        self.atoms = [(complex(c), complex(b), float(r)) for c, b, r in atoms]

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=complex)
        for c, b, r in self.atoms:
            out += c * np.exp((0.5 + 1j * r) * busemann_many(z, b))
        return out


# ---------------------------------------------------------------------------
# factories
# ---------------------------------------------------------------------------

def _mobius_to(center: complex):
    """Translation sending the origin to center, as a complex map."""
    def move(z):
        return (z + center) / (1.0 + np.conj(center) * z)
    return move


def gaussian_field(alpha: float, center: complex = 0j, amplitude: float = 1.0,
                   modulation=None) -> ScalarField:
    """amplitude * exp(-alpha d(z, center)^2), optionally times a smooth
    bounded modulation(z) with values in [0, 1]-ish."""
    def fn(z):
        d = dist_many(z, center)
        out = amplitude * np.exp(-alpha * d * d)
        if modulation is not None:
            out = out * modulation(z)
        return out
    # envelope in d(z, o) via the triangle inequality
    d0 = abs(2.0 * np.arctanh(abs(center)))
    amp = amplitude * math.exp(alpha * d0 * d0)

    def env_fn(z):
        return fn(z)
    return ScalarField(env_fn, DecayClass("gaussian", alpha / 2 if d0 > 0 else alpha,
                                          amp if d0 > 0 else amplitude))


def bump_field(radius: float, amplitude: float = 1.0, center: complex = 0j) -> ScalarField:
    """Smooth compactly supported bump exp(1 - 1/(1 - (d/radius)^2))."""
    def fn(z):
        d = dist_many(z, center)
        x = d / radius
        out = np.zeros(d.shape, dtype=float)
        inside = x < 1.0
        xi = x[inside]
        out[inside] = amplitude * np.exp(1.0 - 1.0 / (1.0 - xi * xi))
        return out
    d0 = abs(2.0 * np.arctanh(abs(center)))
    return ScalarField(fn, DecayClass("compact", radius + d0, amplitude))


def exponential_field(p: float, amplitude: float = 1.0) -> ScalarField:
    """amplitude * exp(-p sqrt(1 + d^2)), a smooth exponential-class field."""
    def fn(z):
        d = dist_many(z, 0j)
        return amplitude * np.exp(-p * np.sqrt(1.0 + d * d))
    return ScalarField(fn, DecayClass("exponential", p, amplitude))


def gaussian_group_function(alpha: float, center: complex = 0j,
                            b_weight: float = 0.0, b_phase: float = 0.0,
                            amplitude: float = 1.0) -> GroupFunction:
    """Smooth localized function on G: gaussian bump in z times a first
    harmonic in the direction b."""
    if not -1.0 < b_weight < 1.0:
        raise ValueError("b_weight must keep the angular factor positive")

    def fn(z, b):
        d = dist_many(z, center)
        return (amplitude * np.exp(-alpha * d * d)
                * (1.0 + b_weight * np.real(b * np.exp(-1j * b_phase))))
    d0 = abs(2.0 * np.arctanh(abs(center)))
    amp = amplitude * (1.0 + abs(b_weight)) * math.exp(alpha * d0 * d0)
    return GroupFunction(fn, DecayClass("gaussian", alpha / 2 if d0 > 0 else alpha, amp))


def product_symbol(alpha: float, sigma_r: float, center: complex = 0j,
                   b_weight: float = 0.0, b_phase: float = 0.0,
                   r_center: float = 0.0, amplitude: float = 1.0) -> Symbol:
    """Separable test symbol  F(z) * (1 + w cos(theta_b - phase)) * h(r).

    With no angular part and r_center = 0 the symbol is independent of b
    with h even, which makes it Weyl-symmetric exactly: both sides of the
    symmetry condition reduce to the same spherical-function pairing.
    """
    def fn(z, b, r):
        d = dist_many(z, center)
        out = amplitude * np.exp(-alpha * d * d) * np.exp(
            -(np.asarray(r) - r_center) ** 2 / (2.0 * sigma_r ** 2))
        if b_weight != 0.0:
            out = out * (1.0 + b_weight * np.real(b * np.exp(-1j * b_phase)))
        return out + 0j
    weyl = (b_weight == 0.0 and r_center == 0.0)
    d0 = abs(2.0 * np.arctanh(abs(center)))
    amp = amplitude * (1.0 + abs(b_weight)) * math.exp(alpha * d0 * d0)
    zdec = DecayClass("gaussian", alpha / 2 if d0 > 0 else alpha, amp)
    sym = Symbol(fn, zdec, RDecay("gaussian", sigma_r, amplitude),
                 analytic_strip=math.inf, weyl_symmetric=weyl)
    if b_weight == 0.0:
        # expose the separable structure; kernels of b-independent symbols
        # factor through the inverse spherical transform of the r-profile
        sym.z_part = lambda z: amplitude * np.exp(
            -alpha * dist_many(np.asarray(z, dtype=complex), center) ** 2)
        sym.h_part = lambda r: np.exp(-(np.asarray(r) - r_center) ** 2
                                      / (2.0 * sigma_r ** 2))
    return sym


def gaussian_kernel(alpha: float, beta: float, amplitude: float = 1.0) -> KernelFunction:
    """K(z, w) = A exp(-alpha d(z,o)^2 - alpha d(w,o)^2 - beta d(z,w)^2)."""
    def fn(z, w):
        dz = dist_many(z, 0j)
        dw = dist_many(w, 0j)
        dzw = dist_many(z, w)
        return amplitude * np.exp(-alpha * (dz * dz + dw * dw) - beta * dzw * dzw) + 0j
    return KernelFunction(fn, DecayClass("gaussian", beta, amplitude),
                          base_decay=DecayClass("gaussian", alpha, amplitude))
