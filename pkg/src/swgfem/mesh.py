"""Rectangular tensor-product meshes and edge degree-of-freedom enumeration.

A mesh is the Cartesian product of two strictly increasing breakpoint
arrays.  Element (i, j) spans ``[x_i, x_{i+1}] x [y_j, y_{j+1}]``.  The
unknowns of the scheme live at edge midpoints:

* vertical edges carry grid index (i, j) with i in 0..nx, j in 0..ny-1,
* horizontal edges carry grid index (i, j) with i in 0..nx-1, j in 0..ny.

Degrees of freedom are numbered deterministically: all vertical edges in
row-major order (j outer, i inner), then all horizontal edges likewise.
Meshes are immutable; geometry and dof maps are computed views.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    IndexOutOfRange,
    NonMonotoneBreaks,
    TooFewPoints,
    ZeroSubdivisions,
)

_UNIFORM_RTOL = 1e-12


@dataclass(frozen=True)
class TensorMesh:
    """Nonuniform rectangular partition of a rectangle.

    Attributes
    ----------
    x_breaks, y_breaks : ndarray
        Strictly increasing abscissas/ordinates, lengths nx+1 and ny+1.
    """

    x_breaks: np.ndarray
    y_breaks: np.ndarray

    def __post_init__(self):
        for name in ("x_breaks", "y_breaks"):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.ndim != 1 or arr.size < 2:
                raise TooFewPoints(f"{name} needs at least 2 points, got {arr.size}")
            if not np.all(np.diff(arr) > 0):
                raise NonMonotoneBreaks(f"{name} must be strictly increasing")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def nx(self) -> int:
        return self.x_breaks.size - 1

    @property
    def ny(self) -> int:
        return self.y_breaks.size - 1

    @property
    def n_elements(self) -> int:
        return self.nx * self.ny

    @property
    def dx(self) -> np.ndarray:
        return np.diff(self.x_breaks)

    @property
    def dy(self) -> np.ndarray:
        return np.diff(self.y_breaks)

    @property
    def h(self) -> float:
        """Global meshsize: max over elements of max(hx, hy)."""
        return float(max(self.dx.max(), self.dy.max()))

    @property
    def bounds(self) -> tuple:
        return (
            float(self.x_breaks[0]),
            float(self.x_breaks[-1]),
            float(self.y_breaks[0]),
            float(self.y_breaks[-1]),
        )

    @property
    def is_uniform(self) -> bool:
        """True when all elements are squares of identical size."""
        dx, dy = self.dx, self.dy
        hx, hy = dx[0], dy[0]
        tol = _UNIFORM_RTOL * max(hx, hy)
        return (
            np.all(np.abs(dx - hx) <= tol)
            and np.all(np.abs(dy - hy) <= tol)
            and abs(hx - hy) <= tol
        )


@dataclass(frozen=True)
class ElementGeom:
    """Geometry of one rectangular element.

    ``edges`` holds the four global edge-dof ids in the fixed ordering
    e1=left, e2=right, e3=bottom, e4=top; it is None for standalone
    geometries created outside a mesh.
    """

    hx: float
    hy: float
    center: tuple
    edges: tuple | None = None

    @property
    def area(self) -> float:
        return self.hx * self.hy

    @property
    def sigma(self) -> float:
        """Aspect ratio hx/hy."""
        return self.hx / self.hy

    @classmethod
    def standalone(cls, hx, hy, center=(0.0, 0.0)):
        return cls(float(hx), float(hy), (float(center[0]), float(center[1])))

    def edge_midpoints(self) -> np.ndarray:
        """Midpoints of (left, right, bottom, top) edges, shape (4, 2)."""
        cx, cy = self.center
        return np.array(
            [
                [cx - 0.5 * self.hx, cy],
                [cx + 0.5 * self.hx, cy],
                [cx, cy - 0.5 * self.hy],
                [cx, cy + 0.5 * self.hy],
            ]
        )

    def edge_lengths(self) -> np.ndarray:
        return np.array([self.hy, self.hy, self.hx, self.hx])

    def edge_normals(self) -> np.ndarray:
        return np.array([[-1.0, 0.0], [1.0, 0.0], [0.0, -1.0], [0.0, 1.0]])


@dataclass(frozen=True)
class EdgeDof:
    """One edge midpoint unknown."""

    orientation: str  # "vertical" | "horizontal"
    i: int
    j: int
    midpoint: tuple
    length: float
    is_boundary: bool

    def endpoints(self) -> tuple:
        x, y = self.midpoint
        if self.orientation == "vertical":
            return ((x, y - 0.5 * self.length), (x, y + 0.5 * self.length))
        return ((x - 0.5 * self.length, y), (x + 0.5 * self.length, y))

    def half_index_label(self) -> str:
        """Label in half-index notation, e.g. ``u[3, 1+1/2]``."""
        if self.orientation == "vertical":
            return f"u[{self.i}, {self.j}+1/2]"
        return f"u[{self.i}+1/2, {self.j}]"


class DofMap:
    """Bijection between edge dofs and contiguous indices [0, count).

    Vertical edges come first (id = j*(nx+1) + i), then horizontal edges
    (id = n_vertical + j*nx + i).  ``interior`` and ``boundary`` partition
    the index range; ``free_index`` maps a global id to its position in
    ``interior`` (or -1 for boundary dofs).
    """

    def __init__(self, mesh: TensorMesh):
        nx, ny = mesh.nx, mesh.ny
        xb, yb = mesh.x_breaks, mesh.y_breaks
        self.nx, self.ny = nx, ny
        self.n_vertical = (nx + 1) * ny
        self.n_horizontal = nx * (ny + 1)
        self.count = self.n_vertical + self.n_horizontal

        xm = 0.5 * (xb[:-1] + xb[1:])
        ym = 0.5 * (yb[:-1] + yb[1:])

        # vertical edges: x on a grid line, y at an element mid-height
        vi, vj = np.meshgrid(np.arange(nx + 1), np.arange(ny), indexing="ij")
        vid = vj * (nx + 1) + vi
        # horizontal edges: x at an element mid-width, y on a grid line
        hi, hj = np.meshgrid(np.arange(nx), np.arange(ny + 1), indexing="ij")
        hid = self.n_vertical + hj * nx + hi

        self.is_vertical = np.zeros(self.count, dtype=bool)
        self.grid_i = np.zeros(self.count, dtype=np.int64)
        self.grid_j = np.zeros(self.count, dtype=np.int64)
        self.midpoints = np.zeros((self.count, 2))
        self.lengths = np.zeros(self.count)
        self.is_boundary = np.zeros(self.count, dtype=bool)

        self.is_vertical[vid] = True
        self.grid_i[vid.ravel()] = vi.ravel()
        self.grid_j[vid.ravel()] = vj.ravel()
        self.midpoints[vid.ravel(), 0] = xb[vi.ravel()]
        self.midpoints[vid.ravel(), 1] = ym[vj.ravel()]
        self.lengths[vid.ravel()] = mesh.dy[vj.ravel()]
        self.is_boundary[vid.ravel()] = (vi.ravel() == 0) | (vi.ravel() == nx)

        self.grid_i[hid.ravel()] = hi.ravel()
        self.grid_j[hid.ravel()] = hj.ravel()
        self.midpoints[hid.ravel(), 0] = xm[hi.ravel()]
        self.midpoints[hid.ravel(), 1] = yb[hj.ravel()]
        self.lengths[hid.ravel()] = mesh.dx[hi.ravel()]
        self.is_boundary[hid.ravel()] = (hj.ravel() == 0) | (hj.ravel() == ny)

        self.interior = np.flatnonzero(~self.is_boundary)
        self.boundary = np.flatnonzero(self.is_boundary)
        self.free_index = np.full(self.count, -1, dtype=np.int64)
        self.free_index[self.interior] = np.arange(self.interior.size)

        for arr in (
            self.is_vertical,
            self.grid_i,
            self.grid_j,
            self.midpoints,
            self.lengths,
            self.is_boundary,
            self.interior,
            self.boundary,
            self.free_index,
        ):
            arr.setflags(write=False)

    def vertical_id(self, i, j) -> int:
        return j * (self.nx + 1) + i

    def horizontal_id(self, i, j) -> int:
        return self.n_vertical + j * self.nx + i

    def edge(self, k: int) -> EdgeDof:
        """Materialize edge dof ``k`` as an :class:`EdgeDof`."""
        if not 0 <= k < self.count:
            raise IndexOutOfRange(f"dof {k} outside [0, {self.count})")
        return EdgeDof(
            orientation="vertical" if self.is_vertical[k] else "horizontal",
            i=int(self.grid_i[k]),
            j=int(self.grid_j[k]),
            midpoint=(float(self.midpoints[k, 0]), float(self.midpoints[k, 1])),
            length=float(self.lengths[k]),
            is_boundary=bool(self.is_boundary[k]),
        )


def build_tensor_mesh(x_breaks, y_breaks) -> TensorMesh:
    """Build a mesh from two strictly increasing breakpoint arrays."""
    return TensorMesh(np.asarray(x_breaks, dtype=float), np.asarray(y_breaks, dtype=float))


def uniform_mesh(n: int) -> TensorMesh:
    """Uniform n x n partition of the unit square (breaks k/n)."""
    if n < 1:
        raise ZeroSubdivisions(f"need at least one subdivision, got n={n}")
    breaks = np.linspace(0.0, 1.0, n + 1)
    return TensorMesh(breaks, breaks.copy())


def element_geometry(mesh: TensorMesh, i: int, j: int) -> ElementGeom:
    """Geometry of element (i, j) with edge ids (left, right, bottom, top)."""
    if not (0 <= i < mesh.nx and 0 <= j < mesh.ny):
        raise IndexOutOfRange(
            f"element ({i}, {j}) outside ({mesh.nx}, {mesh.ny}) grid"
        )
    xb, yb = mesh.x_breaks, mesh.y_breaks
    hx = float(xb[i + 1] - xb[i])
    hy = float(yb[j + 1] - yb[j])
    center = (float(0.5 * (xb[i] + xb[i + 1])), float(0.5 * (yb[j] + yb[j + 1])))
    dm_nv = (mesh.nx + 1) * mesh.ny
    edges = (
        j * (mesh.nx + 1) + i,          # left
        j * (mesh.nx + 1) + i + 1,      # right
        dm_nv + j * mesh.nx + i,        # bottom
        dm_nv + (j + 1) * mesh.nx + i,  # top
    )
    return ElementGeom(hx=hx, hy=hy, center=center, edges=edges)


def enumerate_dofs(mesh: TensorMesh) -> DofMap:
    """Deterministic edge-dof enumeration for ``mesh``."""
    return DofMap(mesh)


def element_arrays(mesh: TensorMesh):
    """Vectorized element geometry: (hx, hy, cx, cy, conn) over all elements.

    Elements are flattened row-major (k = j*nx + i).  ``conn`` has shape
    (n_elements, 4) holding the global edge ids (left, right, bottom, top).
    """
    nx, ny = mesh.nx, mesh.ny
    xb, yb = mesh.x_breaks, mesh.y_breaks
    ii, jj = np.meshgrid(np.arange(nx), np.arange(ny), indexing="xy")
    ii, jj = ii.ravel(), jj.ravel()  # k = j*nx + i
    hx = mesh.dx[ii]
    hy = mesh.dy[jj]
    cx = 0.5 * (xb[ii] + xb[ii + 1])
    cy = 0.5 * (yb[jj] + yb[jj + 1])
    nv = (nx + 1) * ny
    conn = np.stack(
        [
            jj * (nx + 1) + ii,
            jj * (nx + 1) + ii + 1,
            nv + jj * nx + ii,
            nv + (jj + 1) * nx + ii,
        ],
        axis=1,
    )
    return hx, hy, cx, cy, conn
