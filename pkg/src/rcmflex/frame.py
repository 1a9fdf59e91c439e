"""Small dense 3D Euler-Bernoulli space-frame solver.

Desk-scale stand-in for a full solid-element analysis: prismatic two-node
beam elements with exact linear stiffness (axial, St-Venant torsion, two
bending planes), 6 DOF per node, dense symmetric solve.  Units: N, mm,
MPa; rotations in radians inside solution vectors.

Extreme-fiber normal stress is recovered as |N|/A + |My| c_y/Iy + |Mz| c_z/Iz
and the beam-level von Mises estimate combines it with the thin-wall
torsional shear tau = |T| t / J (conservative: both maxima are co-located).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InputError, MechanismError
from .planar import Material, PA12

__all__ = [
    "BeamElement",
    "FrameModel",
    "StaticSolution",
    "rect_section",
    "element_stiffness",
    "solve_static",
    "load_frame",
    "save_frame",
]

_DOF = 6
_AXIS_PARALLEL_TOL = np.cos(np.radians(1.0))  # hint within 1 deg of axis -> fallback


def rect_torsion_constant(b: float, t: float) -> float:
    """St-Venant torsion constant of a solid rectangle (long side b >= t)."""
    long_side, short = (b, t) if b >= t else (t, b)
    ratio = short / long_side
    return long_side * short**3 * (1.0 / 3.0 - 0.21 * ratio * (1.0 - ratio**4 / 12.0))


def rect_section(b: float, t: float) -> dict[str, float]:
    """Section properties of a b x t rectangle with local y along t and
    local z along b: area, inertia_y (strong), inertia_z (weak), torsion."""
    if b <= 0 or t <= 0:
        raise DomainError("section dimensions must be positive")
    return {
        "area": b * t,
        "inertia_y": t * b**3 / 12.0,
        "inertia_z": b * t**3 / 12.0,
        "torsion_constant": rect_torsion_constant(b, t),
        "section_height": b,
        "section_thickness": t,
    }


@dataclass(frozen=True)
class BeamElement:
    """Two-node prismatic beam. ``local_axis_hint`` fixes the local y axis
    (projected perpendicular to the element axis); local z completes the
    right-handed triad."""

    node_a: int
    node_b: int
    area: float
    inertia_y: float
    inertia_z: float
    torsion_constant: float
    section_height: float
    section_thickness: float
    material: Material
    local_axis_hint: tuple[float, float, float] = (0.0, 0.0, 1.0)

    def __post_init__(self):
        if self.node_a == self.node_b:
            raise DomainError("element endpoints must be distinct nodes")
        for name in ("area", "inertia_y", "inertia_z", "torsion_constant"):
            if getattr(self, name) <= 0:
                raise DomainError(f"element {name} must be positive")


@dataclass
class FrameModel:
    """Node/element graph with fixed-DOF masks and named probe nodes."""

    nodes: np.ndarray                 # (n, 3) positions, mm
    elements: list[BeamElement]
    constraints: dict[int, tuple[bool, ...]] = field(default_factory=dict)
    probes: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=float)
        if self.nodes.ndim != 2 or self.nodes.shape[1] != 3:
            raise DomainError("nodes must be an (n, 3) array")
        self.validate()

    def validate(self):
        n = len(self.nodes)
        for el in self.elements:
            if not (0 <= el.node_a < n and 0 <= el.node_b < n):
                raise DomainError(f"element references missing node: {el.node_a}, {el.node_b}")
            if element_length(self, el) <= 1e-12:
                raise DomainError(f"zero-length element {el.node_a}-{el.node_b}")
        n_fixed = sum(sum(mask) for mask in self.constraints.values())
        if n_fixed < 6:
            raise MechanismError(f"need at least 6 constrained DOFs, got {n_fixed}")
        for name, node in self.probes.items():
            if not 0 <= node < n:
                raise DomainError(f"probe {name!r} references missing node {node}")

    @property
    def ndof(self) -> int:
        return _DOF * len(self.nodes)

    def fix_node(self, node: int):
        self.constraints[node] = (True,) * _DOF

    def probe_node(self, name: str) -> int:
        try:
            return self.probes[name]
        except KeyError:
            raise DomainError(f"model has no probe named {name!r}") from None


@dataclass(frozen=True)
class StaticSolution:
    displacements: np.ndarray        # (n, 6): ux uy uz rx ry rz  (mm, rad)
    reactions: dict[tuple[int, int], float]   # (node, dof) -> N or N*mm
    peak_stress: float               # MPa, extreme-fiber normal stress
    peak_von_mises: float            # MPa
    residual: float                  # ||K u - f|| on free DOFs

    def translation(self, node: int) -> np.ndarray:
        return self.displacements[node, :3]

    def displacement_magnitude(self, node: int) -> float:
        return float(np.linalg.norm(self.displacements[node, :3]))


def element_length(model: FrameModel, el: BeamElement) -> float:
    return float(np.linalg.norm(model.nodes[el.node_b] - model.nodes[el.node_a]))


def _local_triad(model: FrameModel, el: BeamElement) -> tuple[np.ndarray, float]:
    """Rotation matrix (rows = local x, y, z in global coords) and length."""
    d = model.nodes[el.node_b] - model.nodes[el.node_a]
    length = float(np.linalg.norm(d))
    ex = d / length
    hint = np.asarray(el.local_axis_hint, dtype=float)
    hnorm = np.linalg.norm(hint)
    if hnorm == 0.0 or abs(float(np.dot(hint / hnorm, ex))) >= _AXIS_PARALLEL_TOL:
        hint = np.array([0.0, 0.0, 1.0])
        if abs(float(np.dot(hint, ex))) >= _AXIS_PARALLEL_TOL:
            hint = np.array([0.0, 1.0, 0.0])
    ey = hint - np.dot(hint, ex) * ex
    ey /= np.linalg.norm(ey)
    ez = np.cross(ex, ey)
    return np.vstack([ex, ey, ez]), length


def _local_stiffness(el: BeamElement, length: float) -> np.ndarray:
    E = el.material.young_modulus
    G = el.material.shear_modulus
    L = length
    k = np.zeros((12, 12))

    ax = E * el.area / L
    k[0, 0] = k[6, 6] = ax
    k[0, 6] = k[6, 0] = -ax

    tor = G * el.torsion_constant / L
    k[3, 3] = k[9, 9] = tor
    k[3, 9] = k[9, 3] = -tor

    # bending in local x-y plane (deflection uy, rotation rz), inertia_z
    _add_bending_block(k, E * el.inertia_z, L, (1, 5, 7, 11), sign=1.0)
    # bending in local x-z plane (deflection uz, rotation ry), inertia_y
    _add_bending_block(k, E * el.inertia_y, L, (2, 4, 8, 10), sign=-1.0)
    return k


def _add_bending_block(k, EI, L, dofs, sign):
    """4x4 Euler-Bernoulli bending block; sign flips the shear/moment
    coupling for the x-z plane."""
    v1, r1, v2, r2 = dofs
    a = 12.0 * EI / L**3
    b = sign * 6.0 * EI / L**2
    c4 = 4.0 * EI / L
    c2 = 2.0 * EI / L
    k[v1, v1] += a
    k[v2, v2] += a
    k[v1, v2] += -a
    k[v2, v1] += -a
    for v, s in ((v1, 1.0), (v2, -1.0)):
        k[v, r1] += s * b
        k[r1, v] += s * b
        k[v, r2] += s * b
        k[r2, v] += s * b
    k[r1, r1] += c4
    k[r2, r2] += c4
    k[r1, r2] += c2
    k[r2, r1] += c2


def element_stiffness(model: FrameModel, el: BeamElement) -> np.ndarray:
    """Global-frame 12x12 stiffness of one element."""
    R, length = _local_triad(model, el)
    k_local = _local_stiffness(el, length)
    T = np.zeros((12, 12))
    for i in range(4):
        T[3 * i : 3 * i + 3, 3 * i : 3 * i + 3] = R
    return T.T @ k_local @ T


def _element_dofs(el: BeamElement) -> np.ndarray:
    return np.concatenate(
        [np.arange(_DOF * el.node_a, _DOF * el.node_a + _DOF),
         np.arange(_DOF * el.node_b, _DOF * el.node_b + _DOF)]
    )


def assemble(model: FrameModel) -> np.ndarray:
    K = np.zeros((model.ndof, model.ndof))
    for el in model.elements:
        dofs = _element_dofs(el)
        K[np.ix_(dofs, dofs)] += element_stiffness(model, el)
    return K


def _fixed_dof_indices(model: FrameModel) -> np.ndarray:
    idx = []
    for node, mask in sorted(model.constraints.items()):
        for j, fixed in enumerate(mask):
            if fixed:
                idx.append(_DOF * node + j)
    return np.array(idx, dtype=int)


def solve_static(model: FrameModel, loads: list[tuple[int, np.ndarray]]) -> StaticSolution:
    """Linear static solve under nodal loads (6-vectors: Fx Fy Fz Mx My Mz).

    Raises MechanismError for singular stiffness and DomainError for loads
    on missing nodes; checks the free-DOF equilibrium residual against
    1e-8 * ||f||.
    """
    n = len(model.nodes)
    f = np.zeros(model.ndof)
    for node, vec in loads:
        if not 0 <= node < n:
            raise DomainError(f"load references missing node {node}")
        vec = np.asarray(vec, dtype=float)
        if vec.shape != (_DOF,):
            raise DomainError("each load must be a 6-vector")
        f[_DOF * node : _DOF * node + _DOF] += vec

    K = assemble(model)
    fixed = _fixed_dof_indices(model)
    free = np.setdiff1d(np.arange(model.ndof), fixed)

    u = np.zeros(model.ndof)
    fnorm = float(np.linalg.norm(f))
    residual = 0.0
    if free.size:
        Kff = K[np.ix_(free, free)]
        ff = f[free]
        try:
            uf = np.linalg.solve(Kff, ff)
            # iterative refinement: stiff shaft + slender panels make K
            # ill-conditioned enough that one LU pass leaves residual above
            # the 1e-8*||f|| contract
            for _ in range(3):
                res = ff - Kff @ uf
                residual = float(np.linalg.norm(res))
                if residual <= 1e-10 * max(fnorm, 1e-300):
                    break
                uf = uf + np.linalg.solve(Kff, res)
            residual = float(np.linalg.norm(ff - Kff @ uf))
        except np.linalg.LinAlgError:
            raise MechanismError("global stiffness is singular; model is a mechanism") from None
        u[free] = uf

    if not np.all(np.isfinite(u)):
        raise MechanismError("non-finite displacements; model is ill-conditioned")
    if fnorm > 0 and residual > 1e-8 * fnorm:
        raise MechanismError(f"equilibrium residual {residual:g} exceeds 1e-8*||f||")

    reaction_vec = K @ u - f
    reactions = {
        (int(d) // _DOF, int(d) % _DOF): float(reaction_vec[d]) for d in fixed
    }

    peak_sigma, peak_vm = _recover_stresses(model, u)
    return StaticSolution(
        displacements=u.reshape(n, _DOF),
        reactions=reactions,
        peak_stress=peak_sigma,
        peak_von_mises=peak_vm,
        residual=residual,
    )


def _recover_stresses(model: FrameModel, u: np.ndarray) -> tuple[float, float]:
    peak_sigma = 0.0
    peak_vm = 0.0
    for el in model.elements:
        R, length = _local_triad(model, el)
        T = np.zeros((12, 12))
        for i in range(4):
            T[3 * i : 3 * i + 3, 3 * i : 3 * i + 3] = R
        u_local = T @ u[_element_dofs(el)]
        f_local = _local_stiffness(el, length) @ u_local

        axial = abs(f_local[6]) / el.area
        torque = abs(f_local[3])
        cy = el.section_height / 2.0      # extreme fiber for My (local z dir)
        cz = el.section_thickness / 2.0   # extreme fiber for Mz (local y dir)
        tau = torque * el.section_thickness / el.torsion_constant
        for end in (0, 1):
            my = abs(f_local[4 + 6 * end])
            mz = abs(f_local[5 + 6 * end])
            sigma = axial + my * cy / el.inertia_y + mz * cz / el.inertia_z
            vm = np.sqrt(sigma**2 + 3.0 * tau**2)
            peak_sigma = max(peak_sigma, sigma)
            peak_vm = max(peak_vm, float(vm))
    return peak_sigma, peak_vm


# --- structured text I/O ---------------------------------------------------
#
# Sections introduced by a header line; columns space-separated:
#   [nodes]        id x y z
#   [elements]     a b area Iy Iz J height thickness E yield elong poisson hx hy hz
#   [constraints]  node mask        (mask: 6 chars of 0/1, ux uy uz rx ry rz)
#   [probes]       name node


def save_frame(model: FrameModel, path) -> None:
    lines = ["[nodes]"]
    for i, p in enumerate(model.nodes):
        lines.append(f"{i} {p[0]:.10g} {p[1]:.10g} {p[2]:.10g}")
    lines.append("[elements]")
    for el in model.elements:
        m = el.material
        h = el.local_axis_hint
        lines.append(
            " ".join(
                f"{v:.10g}" if isinstance(v, float) else str(v)
                for v in (
                    el.node_a, el.node_b, el.area, el.inertia_y, el.inertia_z,
                    el.torsion_constant, el.section_height, el.section_thickness,
                    m.young_modulus, m.yield_stress, m.elongation_at_break,
                    m.poisson_ratio, h[0], h[1], h[2],
                )
            )
        )
    lines.append("[constraints]")
    for node, mask in sorted(model.constraints.items()):
        lines.append(f"{node} {''.join('1' if b else '0' for b in mask)}")
    lines.append("[probes]")
    for name, node in sorted(model.probes.items()):
        lines.append(f"{name} {node}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_frame(path) -> FrameModel:
    nodes: list[list[float]] = []
    elements: list[BeamElement] = []
    constraints: dict[int, tuple[bool, ...]] = {}
    probes: dict[str, int] = {}
    section = None
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("["):
                section = line.strip("[]").lower()
                continue
            parts = line.split()
            try:
                if section == "nodes":
                    nodes.append([float(parts[1]), float(parts[2]), float(parts[3])])
                elif section == "elements":
                    vals = [float(v) for v in parts]
                    elements.append(
                        BeamElement(
                            node_a=int(vals[0]), node_b=int(vals[1]),
                            area=vals[2], inertia_y=vals[3], inertia_z=vals[4],
                            torsion_constant=vals[5], section_height=vals[6],
                            section_thickness=vals[7],
                            material=Material(vals[8], vals[9], vals[10], vals[11]),
                            local_axis_hint=(vals[12], vals[13], vals[14]),
                        )
                    )
                elif section == "constraints":
                    constraints[int(parts[0])] = tuple(c == "1" for c in parts[1])
                elif section == "probes":
                    probes[parts[0]] = int(parts[1])
                else:
                    raise InputError(f"{path}:{lineno}: data before a section header")
            except (IndexError, ValueError) as exc:
                raise InputError(f"{path}:{lineno}: {exc}") from None
    return FrameModel(np.array(nodes), elements, constraints, probes)
