"""Residual rows shared by the verification suites and the CLI."""

from __future__ import annotations

from dataclasses import dataclass, field

REL_FLOOR = 1e-300


@dataclass
class ResidualReport:
    """One identity checked at one probe: both sides and their residuals."""

    identity_name: str
    probe_id: str
    lhs: complex
    rhs: complex
    abs_residual: float
    rel_residual: float
    quad_estimate: float = 0.0
    wall_time_ms: float = 0.0

    @classmethod
    def build(cls, identity_name: str, probe_id: str, lhs, rhs,
              quad_estimate: float = 0.0, wall_time_ms: float = 0.0,
              scale: float | None = None) -> "ResidualReport":
        lhs = complex(lhs)
        rhs = complex(rhs)
        absr = abs(lhs - rhs)
        den = max(abs(lhs), abs(rhs), REL_FLOOR) if scale is None \
            else max(scale, REL_FLOOR)
        return cls(identity_name, probe_id, lhs, rhs, absr, absr / den,
                   quad_estimate, wall_time_ms)

    def csv_row(self) -> str:
        return (f"{self.identity_name},{self.probe_id},"
                f"{self.lhs.real:.17g},{self.lhs.imag:.17g},"
                f"{self.rhs.real:.17g},{self.rhs.imag:.17g},"
                f"{self.abs_residual:.17g},{self.rel_residual:.17g},"
                f"{self.quad_estimate:.17g}")


CSV_HEADER = ("identity_name,probe_id,lhs_re,lhs_im,rhs_re,rhs_im,"
              "abs_residual,rel_residual,quad_estimate")


def write_csv(path, rows: list[ResidualReport]) -> None:
    with open(path, "w") as fh:
        fh.write(CSV_HEADER + "\n")
        for row in rows:
            fh.write(row.csv_row() + "\n")
