"""Closed-form planar stiffness model of the three mobility panels.

Each panel is an equivalent slender rectangular beam (height ``b``,
thickness ``t_i``, length ``L_i``) acting in parallel between the fixed
base and the end-effector attachment point.  Consistent unit set
throughout: N, mm, MPa; angles in degrees at every interface.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InputError, SingularMatrixError

__all__ = [
    "Material",
    "PA12",
    "Panel",
    "PanelSet",
    "ISOTROPIC_RATIOS",
    "isotropic_panelset",
    "section_properties",
    "beam_stiffness",
    "assemble_stiffness",
    "compliance",
    "anisotropy_index",
    "load_panelset",
    "save_panelset",
]


@dataclass(frozen=True)
class Material:
    """Linear-elastic material. Stresses in MPa, strains dimensionless.

    ``poisson_ratio`` is needed only by the space-frame solver (torsion);
    the planar model uses ``young_modulus`` alone.
    """

    young_modulus: float        # MPa
    yield_stress: float         # MPa
    elongation_at_break: float  # fraction
    poisson_ratio: float = 0.39

    def __post_init__(self):
        if self.young_modulus <= 0 or self.yield_stress <= 0:
            raise DomainError("young_modulus and yield_stress must be positive")
        if not -1.0 < self.poisson_ratio < 0.5:
            raise DomainError(f"poisson_ratio out of range: {self.poisson_ratio}")

    @property
    def shear_modulus(self) -> float:
        return self.young_modulus / (2.0 * (1.0 + self.poisson_ratio))


#: Laser-sintered polyamide-12 defaults (dry, room temperature).
PA12 = Material(young_modulus=1400.0, yield_stress=45.5, elongation_at_break=0.14)


def wrap_deg(angle: float) -> float:
    """Wrap an angle in degrees to [0, 360)."""
    return angle % 360.0


@dataclass(frozen=True)
class Panel:
    """One flexural wall: length and thickness in mm, orientation of the
    panel axis in degrees, measured in-plane from the x-axis, in [0, 360)."""

    length: float
    thickness: float
    orientation: float

    def __post_init__(self):
        if self.length <= 0:
            raise DomainError(f"panel length must be positive, got {self.length}")
        if self.thickness <= 0:
            raise DomainError(f"panel thickness must be positive, got {self.thickness}")
        object.__setattr__(self, "orientation", wrap_deg(self.orientation))


@dataclass(frozen=True)
class PanelSet:
    """Three mobility panels sharing one section height ``b`` and material."""

    panels: tuple[Panel, Panel, Panel]
    section_height: float  # b, mm
    material: Material

    def __post_init__(self):
        if len(self.panels) != 3:
            raise DomainError("a PanelSet holds exactly three panels")
        if self.section_height <= 0:
            raise DomainError("section_height must be positive")
        object.__setattr__(self, "panels", tuple(self.panels))

    @classmethod
    def from_free_angles(
        cls,
        lengths: tuple[float, float, float],
        thicknesses: tuple[float, float, float],
        theta1: float,
        theta2: float,
        section_height: float,
        material: Material = PA12,
    ) -> "PanelSet":
        """Build the set from the two free angles; the third panel axis is
        the wrapped sum ``theta1 + theta2``."""
        angles = (theta1, theta2, theta1 + theta2)
        panels = tuple(
            Panel(L, t, wrap_deg(a)) for L, t, a in zip(lengths, thicknesses, angles)
        )
        return cls(panels, section_height, material)

    @property
    def free_angles(self) -> tuple[float, float]:
        return self.panels[0].orientation, self.panels[1].orientation

    def has_derived_third_angle(self, tol: float = 1e-9) -> bool:
        """True when panel 3's axis equals the wrapped sum of the free angles."""
        t1, t2 = self.free_angles
        diff = (self.panels[2].orientation - wrap_deg(t1 + t2)) % 360.0
        return min(diff, 360.0 - diff) <= tol

    def scaled(self, factor: float) -> "PanelSet":
        """Uniformly scale all lengths and thicknesses by ``factor``."""
        if factor <= 0:
            raise DomainError("scale factor must be positive")
        panels = tuple(
            Panel(p.length * factor, p.thickness * factor, p.orientation)
            for p in self.panels
        )
        return PanelSet(panels, self.section_height, self.material)


#: Bundled isotropic mobility-panel solution.  The length/thickness ratios
#: reproduce the converged synthesis result (L2/L1 = 3.12, L3/L1 = 2.00,
#: t1/t2 = 1.03, t3/t2 = 2.01); the two free axis angles are the ones that
#: close the stiffness balance for those ratios under the axis convention
#: used here (panel axes measured absolutely from x, third axis = sum).
ISOTROPIC_RATIOS: dict[str, float] = {
    "L2_over_L1": 3.12,
    "L3_over_L1": 2.00,
    "t1_over_t2": 1.03,
    "t3_over_t2": 2.01,
    "theta1": 47.34,
    "theta2": 99.06,
}


def isotropic_panelset(
    L_ref: float,
    t_ref: float,
    section_height: float = 10.0,
    material: Material = PA12,
    ratios: dict[str, float] | None = None,
) -> PanelSet:
    """Instantiate the bundled isotropic solution at an absolute scale.

    ``L_ref`` is panel 1's length (the minimum length) and ``t_ref`` is
    panel 2's thickness (the minimum thickness); the remaining dimensions
    follow from the scale-invariant ratios.
    """
    r = dict(ISOTROPIC_RATIOS)
    if ratios:
        r.update(ratios)
    lengths = (L_ref, r["L2_over_L1"] * L_ref, r["L3_over_L1"] * L_ref)
    thicknesses = (r["t1_over_t2"] * t_ref, t_ref, r["t3_over_t2"] * t_ref)
    return PanelSet.from_free_angles(
        lengths, thicknesses, r["theta1"], r["theta2"], section_height, material
    )


def section_properties(panel: Panel, b: float) -> tuple[float, float]:
    """Rectangular-section area (mm^2) and weak-axis inertia (mm^4):
    A = b*t, I = b*t^3/12."""
    if b <= 0:
        raise DomainError(f"section height must be positive, got {b}")
    area = b * panel.thickness
    inertia = b * panel.thickness**3 / 12.0
    return area, inertia


def beam_stiffness(panel: Panel, b: float, material: Material) -> tuple[float, float]:
    """Axial (E*A/L) and fixed-guided bending (12*E*I/L^3) stiffness in N/mm."""
    area, inertia = section_properties(panel, b)
    E = material.young_modulus
    axial = E * area / panel.length
    bending = 12.0 * E * inertia / panel.length**3
    return axial, bending


def assemble_stiffness(panel_set: PanelSet) -> np.ndarray:
    """Assemble the in-plane 2x2 stiffness of the three panels in parallel.

    K_xx = sum(K_N cos^2 + K_V sin^2), K_yy with sin/cos swapped, and the
    shared coupling K_xy = K_yx = sum((K_N - K_V) cos sin).  Exactly
    symmetric by construction.
    """
    kxx = kyy = kxy = 0.0
    for panel in panel_set.panels:
        kn, kv = beam_stiffness(panel, panel_set.section_height, panel_set.material)
        c = math.cos(math.radians(panel.orientation))
        s = math.sin(math.radians(panel.orientation))
        kxx += kn * c * c + kv * s * s
        kyy += kn * s * s + kv * c * c
        kxy += (kn - kv) * c * s
    return np.array([[kxx, kxy], [kxy, kyy]])


def compliance(stiffness: np.ndarray) -> np.ndarray:
    """Invert a 2x2 stiffness matrix analytically.

    Raises SingularMatrixError when |det| falls below 1e-12 relative to
    the squared magnitude of the largest entry.
    """
    K = np.asarray(stiffness, dtype=float)
    if K.shape != (2, 2) or not np.all(np.isfinite(K)):
        raise DomainError("stiffness must be a finite 2x2 matrix")
    det = K[0, 0] * K[1, 1] - K[0, 1] * K[1, 0]
    scale = max(1.0, float(np.max(np.abs(K))) ** 2)
    if abs(det) <= 1e-12 * scale:
        raise SingularMatrixError(f"stiffness matrix is singular (det={det:g})")
    return np.array([[K[1, 1], -K[0, 1]], [-K[1, 0], K[0, 0]]]) / det


def anisotropy_index(S: np.ndarray) -> float:
    """Deviation of a 2x2 compliance matrix from a scaled identity.

    sqrt((S11-S22)^2 + S12^2 + S21^2) normalized by the mean of the
    absolute entries.  Zero exactly for S = s*I; invariant to positive
    scaling of S.  The absolute-value mean in the denominator keeps the
    index well-defined when off-diagonal terms are negative.
    """
    S = np.asarray(S, dtype=float)
    if S.shape != (2, 2) or not np.all(np.isfinite(S)):
        raise DomainError("compliance must be a finite 2x2 matrix")
    denom = np.mean(np.abs(S))
    if denom == 0.0:
        raise DomainError("anisotropy index undefined for an all-zero matrix")
    num = math.sqrt((S[0, 0] - S[1, 1]) ** 2 + S[0, 1] ** 2 + S[1, 0] ** 2)
    return num / denom


# --- flat key-value record I/O -------------------------------------------

_PANELSET_KEYS = ("L1", "L2", "L3", "t1", "t2", "t3", "theta1", "theta2", "b", "E")


def parse_keyvalue(text: str) -> dict[str, float]:
    """Parse ``key = value`` lines; '#' starts a comment. Raises InputError
    with the offending line number."""
    values: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        try:
            values[key.strip()] = float(val.strip())
        except ValueError:
            raise InputError(f"line {lineno}: not a number: {val.strip()!r}") from None
    return values


def load_panelset(path) -> PanelSet:
    """Read a PanelSet from a flat key-value record.

    Required keys: L1, L2, L3, t1, t2, t3 (mm), theta1, theta2 (deg),
    b (mm), E (MPa).  The third axis angle is always derived, never stored.
    Optional: yield_stress (MPa), elongation, poisson.
    """
    with open(path, encoding="utf-8") as fh:
        values = parse_keyvalue(fh.read())
    missing = [k for k in _PANELSET_KEYS if k not in values]
    if missing:
        raise InputError(f"{path}: missing keys: {', '.join(missing)}")
    material = Material(
        young_modulus=values["E"],
        yield_stress=values.get("yield_stress", PA12.yield_stress),
        elongation_at_break=values.get("elongation", PA12.elongation_at_break),
        poisson_ratio=values.get("poisson", PA12.poisson_ratio),
    )
    return PanelSet.from_free_angles(
        (values["L1"], values["L2"], values["L3"]),
        (values["t1"], values["t2"], values["t3"]),
        values["theta1"],
        values["theta2"],
        values["b"],
        material,
    )


def save_panelset(panel_set: PanelSet, path) -> None:
    """Write the flat key-value record (theta3 is derived on load)."""
    p = panel_set.panels
    m = panel_set.material
    lines = [
        f"L1 = {p[0].length:.10g}",
        f"L2 = {p[1].length:.10g}",
        f"L3 = {p[2].length:.10g}",
        f"t1 = {p[0].thickness:.10g}",
        f"t2 = {p[1].thickness:.10g}",
        f"t3 = {p[2].thickness:.10g}",
        f"theta1 = {p[0].orientation:.10g}",
        f"theta2 = {p[1].orientation:.10g}",
        f"b = {panel_set.section_height:.10g}",
        f"E = {m.young_modulus:.10g}",
        f"yield_stress = {m.yield_stress:.10g}",
        f"elongation = {m.elongation_at_break:.10g}",
        f"poisson = {m.poisson_ratio:.10g}",
    ]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
