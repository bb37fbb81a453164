"""Write-once tables of four-argument transforms on (r, b, r', b') grids.

Wigner and Patterson-Sullivan tables share one layout: frequencies on the
first and third axes, boundary angles (uniform) on the second and fourth.
Angular axes interpolate trigonometrically, frequency axes with cubic
splines.  Serialization is a CSV of (r, b_index, r', b'_index, re, im) rows
next to a JSON header carrying the grids and quadrature weights.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import GridTooCoarse

__all__ = ["GridTable", "WignerTable", "PsTable", "trig_interp_matrix"]


def trig_interp_matrix(angles_from: np.ndarray, angles_to: np.ndarray) -> np.ndarray:
    """Matrix evaluating the trigonometric interpolant of uniform samples.

    Rows index target angles; columns the (uniform) source angles.
    """
    n = len(angles_from)
    ks = np.fft.fftfreq(n, d=1.0 / n)               # integer frequencies
    # coefficients c = F v / n; value = sum_k c_k e^{i k theta}
    F = np.exp(-1j * np.outer(ks, angles_from)) / n
    E = np.exp(1j * np.outer(angles_to, ks))
    return (E @ F)


@dataclass
class GridTable:
    """Values of a transform on a tensor (r, b, r', b') grid."""

    kind: str
    r: np.ndarray
    b_angles: np.ndarray
    rp: np.ndarray
    bp_angles: np.ndarray
    values: np.ndarray                 # (nr, nb, nrp, nbp) complex
    rp_weights: np.ndarray | None = None   # quadrature weights on the r' axis
    r_weights: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for ax in (self.r, self.rp):
            if np.any(np.diff(ax) <= 0):
                raise ValueError("frequency axes must be strictly increasing")
        expect = (len(self.r), len(self.b_angles), len(self.rp), len(self.bp_angles))
        if self.values.shape != expect:
            raise ValueError(f"values shape {self.values.shape} != grid {expect}")

    # -- interpolation ------------------------------------------------------

    def slice_at(self, r: float, b_angle: float) -> np.ndarray:
        """Interpolated (nrp, nbp) slice at (r, b); cubic in r, trig in b."""
        if not (self.r[0] - 1e-12 <= r <= self.r[-1] + 1e-12):
            raise GridTooCoarse(f"r={r:g} outside table range [{self.r[0]:g}, {self.r[-1]:g}]")
        vb = trig_interp_matrix(self.b_angles, np.array([b_angle]))[0]  # (nb,)
        sliced = np.tensordot(self.values, vb, axes=([1], [0]))         # (nr, nrp, nbp)
        near = np.abs(self.r - r) < 1e-12
        if np.any(near):
            self.meta["last_interp_error"] = 0.0
            return sliced[int(np.argmax(near))]
        if len(self.r) < 4:
            raise GridTooCoarse("need at least 4 r-nodes for cubic interpolation")
        cub = CubicSpline(self.r, sliced, axis=0)(r)
        lin_k = int(np.clip(np.searchsorted(self.r, r) - 1, 0, len(self.r) - 2))
        t = (r - self.r[lin_k]) / (self.r[lin_k + 1] - self.r[lin_k])
        lin = (1 - t) * sliced[lin_k] + t * sliced[lin_k + 1]
        err = float(np.max(np.abs(cub - lin)))
        scale = float(np.max(np.abs(cub))) or 1.0
        self.meta["last_interp_error"] = err / scale
        return cub

    def interp_rp(self, sl: np.ndarray, rp_targets: np.ndarray,
                  tol: float | None = None) -> np.ndarray:
        """Interpolate a (nrp, nbp) slice along r' at given targets."""
        lo, hi = self.rp[0], self.rp[-1]
        if np.any(rp_targets < lo - 1e-12) or np.any(rp_targets > hi + 1e-12):
            raise GridTooCoarse("requested r' outside the table range")
        cub = CubicSpline(self.rp, sl, axis=0)(rp_targets)
        if tol is not None:
            idx = np.clip(np.searchsorted(self.rp, rp_targets) - 1, 0, len(self.rp) - 2)
            t = ((rp_targets - self.rp[idx])
                 / (self.rp[idx + 1] - self.rp[idx]))[:, None]
            lin = (1 - t) * sl[idx] + t * sl[idx + 1]
            scale = float(np.max(np.abs(sl))) or 1.0
            if float(np.max(np.abs(cub - lin))) / scale > tol:
                raise GridTooCoarse(
                    f"r' interpolation error above {tol:g}; refine the table grid")
        return cub

    # -- serialization ------------------------------------------------------

    def save(self, path) -> None:
        path = Path(path)
        header = {
            "kind": self.kind,
            "r": self.r.tolist(),
            "b_angles": self.b_angles.tolist(),
            "rp": self.rp.tolist(),
            "bp_angles": self.bp_angles.tolist(),
            "rp_weights": None if self.rp_weights is None else self.rp_weights.tolist(),
            "r_weights": None if self.r_weights is None else self.r_weights.tolist(),
        }
        path.with_suffix(path.suffix + ".json").write_text(json.dumps(header, indent=1))
        with path.open("w") as fh:
            fh.write("r,b_index,rp,bp_index,re,im\n")
            nr, nb, nrp, nbp = self.values.shape
            for i in range(nr):
                for j in range(nb):
                    for k in range(nrp):
                        for l in range(nbp):
                            v = self.values[i, j, k, l]
                            fh.write(f"{self.r[i]:.17g},{j},{self.rp[k]:.17g},{l},"
                                     f"{v.real:.17g},{v.imag:.17g}\n")

    @classmethod
    def load(cls, path) -> "GridTable":
        path = Path(path)
        header = json.loads(path.with_suffix(path.suffix + ".json").read_text())
        r = np.array(header["r"])
        b = np.array(header["b_angles"])
        rp = np.array(header["rp"])
        bp = np.array(header["bp_angles"])
        vals = np.zeros((len(r), len(b), len(rp), len(bp)), dtype=complex)
        data = np.loadtxt(path, delimiter=",", skiprows=1)
        ri = np.searchsorted(r, data[:, 0])
        ki = np.searchsorted(rp, data[:, 2])
        vals[ri, data[:, 1].astype(int), ki, data[:, 3].astype(int)] = \
            data[:, 4] + 1j * data[:, 5]
        return cls(
            kind=header["kind"], r=r, b_angles=b, rp=rp, bp_angles=bp, values=vals,
            rp_weights=None if header["rp_weights"] is None else np.array(header["rp_weights"]),
            r_weights=None if header["r_weights"] is None else np.array(header["r_weights"]),
        )


class WignerTable(GridTable):
    def __init__(self, **kw):
        super().__init__(kind="wigner", **kw)


class PsTable(GridTable):
    """Same layout as WignerTable; pairs inside the angular collar are excluded."""

    def __init__(self, collar: float = 0.05, **kw):
        super().__init__(kind="ps", **kw)
        self.meta["collar"] = collar
        db = np.abs(((self.b_angles[:, None] - self.bp_angles[None, :]) + math.pi)
                    % (2 * math.pi) - math.pi)
        mask = db < collar
        if np.any(mask):
            inside = self.values.transpose(1, 3, 0, 2)[mask]
            if np.any(np.abs(inside) > 0):
                raise ValueError("PS table carries values inside the diagonal collar")
