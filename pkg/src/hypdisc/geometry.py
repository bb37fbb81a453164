"""Exact arithmetic for PSL(2,R) acting on the unit disc.

Group elements are stored as unit-determinant real 2x2 matrices modulo sign.
The disc picture is reached through one fixed Cayley conjugation
``g -> T g T^{-1}`` with ``T = [[1, i], [1, -i]]``, which lands in SU(1,1)
with entries

    alpha = (a + d)/2 + i (c - b)/2,    beta = (a - d)/2 + i (b + c)/2.

Under this bridge ``a_t . 0 = tanh(t/2)`` on the positive real axis, the
rotation by angle ``theta`` moves the boundary point 1 to ``exp(2 i theta)``,
and the flow ``a_t`` fixes the boundary points +-1.

All module-level ``*_many`` helpers are vectorized over numpy arrays and are
what the quadrature engines call; the typed operations wrap them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeodesic, NumericalBlowup

__all__ = [
    "GroupElement",
    "DiscPoint",
    "BoundaryPoint",
    "GeodesicCoords",
    "ZbCoords",
    "mobius_act",
    "boundary_act",
    "busemann",
    "boundary_derivative",
    "geodesic_frame",
    "to_geodesic_coords",
    "from_geodesic_coords",
    "kan_decompose",
    "geodesic_flow_pt",
    "horocycle_flow_pt",
    "time_reversal",
    "dist",
]

DET_TOL = 1e-12
EPS_BB = 1e-9          # angular collar below which a geodesic is degenerate
BLOWUP_MARGIN = 1e-14


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

class GroupElement:
    """A point of PSL(2,R), i.e. a unit-determinant matrix modulo sign."""

    __slots__ = ("m",)

    def __init__(self, m) -> None:
        m = np.asarray(m, dtype=float)
        if m.shape != (2, 2):
            raise ValueError("GroupElement needs a 2x2 matrix")
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        if det <= 0:
            raise ValueError("matrix must have positive determinant")
        if abs(det - 1.0) > DET_TOL:
            m = m / math.sqrt(det)
        object.__setattr__(self, "m", m)

    def __setattr__(self, *a):  # immutable
        raise AttributeError("GroupElement is immutable")

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.m @ other.m)

    def inverse(self) -> "GroupElement":
        a, b, c, d = self.m.ravel()
        return GroupElement(np.array([[d, -b], [-c, a]]))

    def su11(self) -> tuple[complex, complex]:
        """Cayley-conjugated SU(1,1) entries (alpha, beta)."""
        a, b, c, d = self.m.ravel()
        return complex((a + d) / 2, (c - b) / 2), complex((a - d) / 2, (b + c) / 2)

    def approx_eq(self, other: "GroupElement", tol: float = 1e-9) -> bool:
        """Equality modulo global sign."""
        d1 = np.abs(self.m - other.m).max()
        d2 = np.abs(self.m + other.m).max()
        return min(d1, d2) <= tol

    def __repr__(self) -> str:
        return f"GroupElement({self.m.tolist()})"

    # generators -----------------------------------------------------------
    @staticmethod
    def identity() -> "GroupElement":
        return GroupElement(np.eye(2))

    @staticmethod
    def translation(t: float) -> "GroupElement":
        """a_t = diag(e^{t/2}, e^{-t/2}); right action is the geodesic flow."""
        return GroupElement(np.array([[math.exp(t / 2), 0.0], [0.0, math.exp(-t / 2)]]))

    @staticmethod
    def horocyclic(u: float) -> "GroupElement":
        """n_u, upper unipotent; right action is the horocycle flow."""
        return GroupElement(np.array([[1.0, u], [0.0, 1.0]]))

    @staticmethod
    def opposite_horocyclic(u: float) -> "GroupElement":
        """nbar_u, lower unipotent."""
        return GroupElement(np.array([[1.0, 0.0], [u, 1.0]]))

    @staticmethod
    def rotation(theta: float) -> "GroupElement":
        """k_theta; moves the boundary point 1 to exp(2 i theta)."""
        c, s = math.cos(theta), math.sin(theta)
        return GroupElement(np.array([[c, -s], [s, c]]))

    @staticmethod
    def weyl() -> "GroupElement":
        """w = [[0,-1],[1,0]]; right multiplication is time reversal."""
        return GroupElement(np.array([[0.0, -1.0], [1.0, 0.0]]))


@dataclass(frozen=True)
class DiscPoint:
    """Point of the open unit disc."""

    z: complex

    def __post_init__(self):
        if abs(self.z) >= 1.0:
            raise ValueError(f"|z| = {abs(self.z)} not inside the open disc")

    @staticmethod
    def origin() -> "DiscPoint":
        return DiscPoint(0j)


@dataclass(frozen=True)
class BoundaryPoint:
    """Point of the circle at infinity, stored as an angle in [0, 2*pi)."""

    angle: float

    def __post_init__(self):
        object.__setattr__(self, "angle", float(self.angle) % (2 * math.pi))

    @staticmethod
    def from_complex(b: complex, tol: float = 1e-12) -> "BoundaryPoint":
        if abs(abs(b) - 1.0) > tol:
            raise ValueError(f"|b| = {abs(b)} is not on the unit circle")
        return BoundaryPoint(math.atan2(b.imag, b.real))

    @property
    def value(self) -> complex:
        return complex(math.cos(self.angle), math.sin(self.angle))

    def separation(self, other: "BoundaryPoint") -> float:
        """Angular distance on the circle."""
        d = abs(self.angle - other.angle) % (2 * math.pi)
        return min(d, 2 * math.pi - d)


@dataclass(frozen=True)
class GeodesicCoords:
    """(b', b, tau): backward endpoint, forward endpoint, signed time."""

    b_minus: BoundaryPoint
    b_plus: BoundaryPoint
    tau: float

    def __post_init__(self):
        if self.b_minus.separation(self.b_plus) < EPS_BB:
            raise DegenerateGeodesic(
                f"endpoints separated by {self.b_minus.separation(self.b_plus):.3e} rad"
            )


@dataclass(frozen=True)
class ZbCoords:
    """(z, b): basepoint and forward endpoint of a unit tangent vector."""

    z: DiscPoint
    b: BoundaryPoint


# ---------------------------------------------------------------------------
# vectorized core
# ---------------------------------------------------------------------------

def su11_many(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(...,2,2) real matrices -> SU(1,1) entries (alpha, beta)."""
    a, b = m[..., 0, 0], m[..., 0, 1]
    c, d = m[..., 1, 0], m[..., 1, 1]
    return (a + d) / 2 + 1j * (c - b) / 2, (a - d) / 2 + 1j * (b + c) / 2


def mobius_many(m: np.ndarray, z) -> np.ndarray:
    """Apply group matrices to disc points, broadcasting."""
    al, be = su11_many(m)
    z = np.asarray(z, dtype=complex)
    return (al * z + be) / (np.conj(be) * z + np.conj(al))


def boundary_many(m: np.ndarray, b) -> np.ndarray:
    """Apply group matrices to unit complex numbers; result renormalized."""
    out = mobius_many(m, b)
    return out / np.abs(out)


def busemann_many(z, b) -> np.ndarray:
    """<z, b> = log((1 - |z|^2) / |b - z|^2), broadcasting over arrays."""
    z = np.asarray(z, dtype=complex)
    b = np.asarray(b, dtype=complex)
    return np.log1p(-np.abs(z) ** 2) - 2.0 * np.log(np.abs(b - z))


def basepoints_many(m: np.ndarray) -> np.ndarray:
    """g . o for a batch of matrices."""
    al, be = su11_many(m)
    return be / np.conj(al)


def forward_many(m: np.ndarray) -> np.ndarray:
    """g . 1, the forward endpoint, for a batch of matrices."""
    return boundary_many(m, 1.0 + 0j)


def backward_endpoint_many(z, b) -> np.ndarray:
    """Backward endpoint of the geodesic through z with forward endpoint b.

    Derived by rotating b to 1, passing to the upper half-plane where the
    geodesic is the vertical line through the point, and mapping back.
    """
    z = np.asarray(z, dtype=complex)
    b = np.asarray(b, dtype=complex)
    zeta = z * np.conj(b)
    x0 = 2.0 * zeta.imag / np.abs(1.0 - zeta) ** 2
    return b * (x0 + 1j) / (x0 - 1j)


def zb_to_geodesic_many(z, b) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(z, b) -> (b', b, tau) with tau = log(|b - b'| / 2) + <z, b>."""
    bp = backward_endpoint_many(z, b)
    b = np.asarray(b, dtype=complex)
    tau = np.log(np.abs(b - bp) / 2.0) + busemann_many(z, b)
    return bp, b, tau


def group_from_zb_many(z, b) -> np.ndarray:
    """Batched (z, b) -> SL(2,R) matrices with g.o = z and g.1 = b."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    b = np.broadcast_to(np.asarray(b, dtype=complex), z.shape)
    # translation T_z in SU(1,1), then a rotation fixing the origin
    s = 1.0 / np.sqrt(1.0 - np.abs(z) ** 2)
    rot = (b - z) / (1.0 - b * np.conj(z))   # e^{2 i phi}
    half = np.sqrt(rot)                       # e^{i phi}, branch irrelevant in PSL
    al = s * half
    be = s * z * np.conj(half)
    return su11_to_sl2_many(al, be)


def su11_to_sl2_many(al: np.ndarray, be: np.ndarray) -> np.ndarray:
    """Inverse of the Cayley bridge, batched."""
    a = al.real + be.real
    d = al.real - be.real
    bb = be.imag - al.imag
    c = al.imag + be.imag
    m = np.empty(al.shape + (2, 2))
    m[..., 0, 0] = a
    m[..., 0, 1] = bb
    m[..., 1, 0] = c
    m[..., 1, 1] = d
    return m


def dist_many(z1, z2) -> np.ndarray:
    """Hyperbolic distance in the curvature -1 metric, broadcasting."""
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    q = np.abs((z1 - z2) / (1.0 - np.conj(z1) * z2))
    return 2.0 * np.arctanh(q)


def geodesic_frame_matrix(b_minus: complex, b_plus: complex) -> np.ndarray:
    """SL(2,R) matrix of g(b', b), the frame of the geodesic from b' to b."""
    beta = math.atan2(b_plus.imag, b_plus.real)
    phi = (math.atan2(b_minus.imag, b_minus.real) - beta) % (2 * math.pi)
    half = min(phi, 2 * math.pi - phi)
    if half < EPS_BB:
        raise DegenerateGeodesic(f"endpoints separated by {half:.3e} rad")
    theta = phi / 2.0
    u = math.cos(theta) / math.sin(theta)
    c, s = math.cos(beta / 2), math.sin(beta / 2)
    k = np.array([[c, -s], [s, c]])
    n = np.array([[1.0, u], [0.0, 1.0]])
    lam = (1.0 + u * u) ** 0.25
    a = np.array([[lam, 0.0], [0.0, 1.0 / lam]])
    return k @ n @ a


def geodesic_points_many(b_minus: complex, b_plus: complex, tau) -> np.ndarray:
    """Basepoints g(b', b) a_tau . o along one geodesic, batched over tau."""
    gm = geodesic_frame_matrix(b_minus, b_plus)
    tau = np.asarray(tau, dtype=float)
    e = np.exp(tau / 2.0)
    mats = np.empty(tau.shape + (2, 2))
    mats[..., 0, 0] = gm[0, 0] * e
    mats[..., 0, 1] = gm[0, 1] / e
    mats[..., 1, 0] = gm[1, 0] * e
    mats[..., 1, 1] = gm[1, 1] / e
    return basepoints_many(mats)


# ---------------------------------------------------------------------------
# typed operations
# ---------------------------------------------------------------------------

def mobius_act(g: GroupElement, z: DiscPoint) -> DiscPoint:
    """Action of G on the disc."""
    out = complex(mobius_many(g.m, z.z))
    if abs(out) >= 1.0 - BLOWUP_MARGIN:
        raise NumericalBlowup(f"image modulus {abs(out)} at the circle; ill-conditioned g")
    return DiscPoint(out)


def boundary_act(g: GroupElement, b: BoundaryPoint) -> BoundaryPoint:
    """Action of G on the circle at infinity."""
    return BoundaryPoint.from_complex(complex(boundary_many(g.m, b.value)), tol=1e-9)


def busemann(z: DiscPoint, b: BoundaryPoint) -> float:
    """Signed distance from the origin to the horocycle through z and b."""
    return float(busemann_many(z.z, b.value))


def boundary_derivative(g: GroupElement, b: BoundaryPoint) -> float:
    """d(g.b)/db = exp(-<g.o, g.b>), the conformal boundary stretch."""
    go = mobius_many(g.m, 0j)
    gb = boundary_many(g.m, b.value)
    return float(np.exp(-busemann_many(go, gb)))


def geodesic_frame(b_minus: BoundaryPoint, b_plus: BoundaryPoint) -> GroupElement:
    """The unique g with g.1 = b_plus, g.(-1) = b_minus, g.o closest to o."""
    return GroupElement(geodesic_frame_matrix(b_minus.value, b_plus.value))


def to_geodesic_coords(g: GroupElement) -> GeodesicCoords:
    """Endpoints and signed time of the unit tangent vector g."""
    b_plus = boundary_act(g, BoundaryPoint(0.0))
    b_minus = boundary_act(g, BoundaryPoint(math.pi))
    z = mobius_many(g.m, 0j)
    tau = float(np.log(np.abs(b_plus.value - b_minus.value) / 2.0)
                + busemann_many(z, b_plus.value))
    return GeodesicCoords(b_minus, b_plus, tau)


def from_geodesic_coords(c: GeodesicCoords) -> GroupElement:
    return geodesic_frame(c.b_minus, c.b_plus) @ GroupElement.translation(c.tau)


def to_zb_coords(g: GroupElement) -> ZbCoords:
    z = complex(mobius_many(g.m, 0j))
    return ZbCoords(DiscPoint(z), boundary_act(g, BoundaryPoint(0.0)))


def kan_decompose(u: float) -> tuple[GroupElement, float, float]:
    """n_u = k_u a_{-log(1+u^2)} nbar_{u/(1+u^2)}; returns (k_u, a-param, nbar-param)."""
    s = math.sqrt(1.0 + u * u)
    k = GroupElement(np.array([[1.0 / s, u / s], [-u / s, 1.0 / s]]))
    return k, -math.log1p(u * u), u / (1.0 + u * u)


def geodesic_flow_pt(g: GroupElement, t: float) -> GroupElement:
    return g @ GroupElement.translation(t)


def horocycle_flow_pt(g: GroupElement, u: float) -> GroupElement:
    return g @ GroupElement.horocyclic(u)


def time_reversal(g: GroupElement) -> GroupElement:
    return g @ GroupElement.weyl()


def dist(z1: DiscPoint, z2: DiscPoint) -> float:
    return float(dist_many(z1.z, z2.z))
