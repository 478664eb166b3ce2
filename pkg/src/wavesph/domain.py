"""Particle storage, box geometry with periodic axes, and cell-list neighbor search."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, fields

import numpy as np
from numba import njit

from .kernel import SUPPORT


class Kind(enum.IntEnum):
    FLUID = 0
    DYNAMIC_BOUNDARY = 1
    WAVEMAKER = 2


class DomainError(ValueError):
    pass


@dataclass
class ParticleSystem:
    """Column-wise particle state. All arrays share the leading length n."""

    position: np.ndarray
    velocity: np.ndarray
    density: np.ndarray
    mass: np.ndarray
    pressure: np.ndarray
    kind: np.ndarray
    corrected: np.ndarray = field(default=None)
    support: np.ndarray = field(default=None)
    correction_matrix: np.ndarray = field(default=None)
    acceleration: np.ndarray = field(default=None)
    density_rate: np.ndarray = field(default=None)

    def __post_init__(self):
        n = len(self.mass)
        self.position = np.ascontiguousarray(self.position, dtype=np.float64).reshape(n, 3)
        self.velocity = np.ascontiguousarray(self.velocity, dtype=np.float64).reshape(n, 3)
        self.density = np.ascontiguousarray(self.density, dtype=np.float64)
        self.mass = np.ascontiguousarray(self.mass, dtype=np.float64)
        self.pressure = np.ascontiguousarray(self.pressure, dtype=np.float64)
        self.kind = np.ascontiguousarray(self.kind, dtype=np.int8)
        if self.corrected is None:
            self.corrected = np.zeros(n, dtype=np.bool_)
        if self.support is None:
            self.support = np.zeros(n)
        if self.correction_matrix is None:
            self.correction_matrix = np.zeros((n, 3, 3))
        if self.acceleration is None:
            self.acceleration = np.zeros((n, 3))
        if self.density_rate is None:
            self.density_rate = np.zeros(n)
        for f in fields(self):
            arr = getattr(self, f.name)
            if len(arr) != n:
                raise DomainError(f"array {f.name} has length {len(arr)}, expected {n}")
        self.check()

    @classmethod
    def empty(cls) -> "ParticleSystem":
        return cls(np.zeros((0, 3)), np.zeros((0, 3)), np.zeros(0), np.zeros(0),
                   np.zeros(0), np.zeros(0, dtype=np.int8))

    @classmethod
    def from_positions(cls, position, density: float, mass, kind=Kind.FLUID,
                       velocity=None) -> "ParticleSystem":
        position = np.asarray(position, dtype=float).reshape(-1, 3)
        n = len(position)
        return cls(
            position=position,
            velocity=np.zeros((n, 3)) if velocity is None else velocity,
            density=np.full(n, float(density)),
            mass=np.broadcast_to(np.asarray(mass, dtype=float), (n,)).copy(),
            pressure=np.zeros(n),
            kind=np.full(n, int(kind), dtype=np.int8),
        )

    def __len__(self) -> int:
        return len(self.mass)

    @property
    def n(self) -> int:
        return len(self.mass)

    @property
    def volume(self) -> np.ndarray:
        return self.mass / self.density

    @property
    def is_fluid(self) -> np.ndarray:
        return self.kind == Kind.FLUID

    def check(self) -> None:
        bad = np.flatnonzero(~(self.density > 0.0))
        if bad.size:
            raise DomainError(f"particle {bad[0]} has non-positive density {self.density[bad[0]]!r}")
        bad = np.flatnonzero(~(self.mass > 0.0))
        if bad.size:
            raise DomainError(f"particle {bad[0]} has non-positive mass {self.mass[bad[0]]!r}")

    def copy(self) -> "ParticleSystem":
        return ParticleSystem(**{f.name: getattr(self, f.name).copy() for f in fields(self)})

    @staticmethod
    def concatenate(parts: list["ParticleSystem"]) -> "ParticleSystem":
        parts = [p for p in parts if p is not None]
        if not parts:
            return ParticleSystem.empty()
        return ParticleSystem(**{
            f.name: np.concatenate([getattr(p, f.name) for p in parts])
            for f in fields(ParticleSystem)
        })


@dataclass(frozen=True)
class DomainBox:
    lower: tuple
    upper: tuple
    periodic: tuple = (False, False, False)

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        if lo.shape != (3,) or hi.shape != (3,) or len(self.periodic) != 3:
            raise DomainError("box corners and periodic flags must have three components")
        if np.any(hi <= lo):
            raise DomainError(f"box upper corner {hi} must exceed lower corner {lo}")
        object.__setattr__(self, "lower", tuple(float(v) for v in lo))
        object.__setattr__(self, "upper", tuple(float(v) for v in hi))
        object.__setattr__(self, "periodic", tuple(bool(p) for p in self.periodic))

    @property
    def lengths(self) -> np.ndarray:
        return np.subtract(self.upper, self.lower)

    @property
    def periods(self) -> np.ndarray:
        """Box length along periodic axes, 0 elsewhere."""
        return np.where(self.periodic, self.lengths, 0.0)

    def check_smoothing_length(self, h: float) -> None:
        for axis in range(3):
            if self.periodic[axis] and self.lengths[axis] < 2.0 * SUPPORT * h:
                raise DomainError(
                    f"periodic extent {self.lengths[axis]:.6g} along axis {axis} is below 4h = {4 * h:.6g};"
                    " particles would interact with their own images"
                )

    def wrap(self, position: np.ndarray) -> None:
        """Map positions back into the box along periodic axes, in place."""
        for axis in range(3):
            if self.periodic[axis]:
                lo, length = self.lower[axis], self.lengths[axis]
                position[:, axis] = lo + np.mod(position[:, axis] - lo, length)
                # np.mod can return exactly `length` for tiny negative inputs
                position[position[:, axis] >= lo + length, axis] = lo


def minimum_image(xa, xb, box: DomainBox) -> np.ndarray:
    """xa - xb, wrapped along periodic axes to the shortest representative."""
    d = np.asarray(xa, dtype=float) - np.asarray(xb, dtype=float)
    period = box.periods
    safe = np.where(period > 0.0, period, 1.0)
    return np.where(period > 0.0, d - period * np.round(d / safe), d)


@dataclass
class CellGrid:
    """Cell list. Particle indices are stored cell by cell, ascending within each cell."""

    cell_size: np.ndarray
    counts: np.ndarray
    cell_start: np.ndarray
    particles: np.ndarray
    cell_of: np.ndarray
    lower: np.ndarray

    @property
    def n_cells(self) -> int:
        return int(np.prod(self.counts))

    def cell_members(self, c: int) -> np.ndarray:
        return self.particles[self.cell_start[c]:self.cell_start[c + 1]]

    def neighbor_cells(self, c: int, box: DomainBox) -> np.ndarray:
        """Distinct cells in the one-ring around cell c, ascending."""
        idx = np.unravel_index(c, tuple(self.counts))
        per_axis = []
        for axis in range(3):
            n = int(self.counts[axis])
            cand = np.arange(idx[axis] - 1, idx[axis] + 2)
            if box.periodic[axis]:
                cand = np.mod(cand, n)
            else:
                cand = cand[(cand >= 0) & (cand < n)]
            per_axis.append(np.unique(cand))
        mesh = np.meshgrid(*per_axis, indexing="ij")
        return np.unique(np.ravel_multi_index([m.ravel() for m in mesh], tuple(self.counts)))


def _grid_shape(box: DomainBox, cell_size: float) -> np.ndarray:
    return np.maximum(1, np.floor(box.lengths / cell_size).astype(np.int64))


def rebuild_grid(ps: ParticleSystem, box: DomainBox, h: float, cell_size: float | None = None,
                 tolerance: float | None = None) -> CellGrid:
    """
    Bin particles into cells of edge >= 2h. Positions are first wrapped along
    periodic axes; a particle further than `tolerance` (default 2h) outside the
    box along a non-periodic axis is an error.
    """
    cell_size = SUPPORT * h if cell_size is None else cell_size
    if cell_size < SUPPORT * h:
        raise DomainError("cell size must be at least the kernel support 2h")
    tolerance = SUPPORT * h if tolerance is None else tolerance
    box.wrap(ps.position)
    lo = np.asarray(box.lower)
    hi = np.asarray(box.upper)
    for axis in range(3):
        if box.periodic[axis]:
            continue
        x = ps.position[:, axis]
        out = np.flatnonzero((x < lo[axis] - tolerance) | (x > hi[axis] + tolerance))
        if out.size:
            i = int(out[0])
            raise DomainError(f"particle {i} at {ps.position[i]} lies outside the box along axis {axis}")
    counts = _grid_shape(box, cell_size)
    sizes = box.lengths / counts
    idx = np.floor((ps.position - lo) / sizes).astype(np.int64)
    idx = np.clip(idx, 0, counts - 1)
    cell_of = np.ravel_multi_index(idx.T, tuple(counts)) if len(ps) else np.zeros(0, dtype=np.int64)
    order = np.argsort(cell_of, kind="stable")
    cell_start = np.zeros(int(np.prod(counts)) + 1, dtype=np.int64)
    np.cumsum(np.bincount(cell_of, minlength=int(np.prod(counts))), out=cell_start[1:])
    return CellGrid(sizes, counts, cell_start, order.astype(np.int64), cell_of.astype(np.int64), lo)


def neighbors_of(i: int, grid: CellGrid, ps: ParticleSystem, box: DomainBox, h: float,
                 include_self: bool = True) -> np.ndarray:
    """Indices j with |minimum_image(x_i, x_j)| <= 2h, in deterministic cell order."""
    cand = np.concatenate([grid.cell_members(c) for c in grid.neighbor_cells(grid.cell_of[i], box)])
    d = minimum_image(ps.position[i], ps.position[cand], box)
    keep = np.einsum("ij,ij->i", d, d) <= (SUPPORT * h) ** 2
    if not include_self:
        keep &= cand != i
    return cand[keep]


def for_each_neighbor(i: int, grid: CellGrid, ps: ParticleSystem, box: DomainBox, h: float,
                      visit, include_self: bool = True) -> None:
    for j in neighbors_of(i, grid, ps, box, h, include_self):
        visit(int(j))


# ----------------------------------------------------------------------------
# compiled half-pair list used by the solver sweeps


@njit(cache=True)
def _axis_cells(c, n, periodic, out):
    m = 0
    for d in range(-1, 2):
        cc = c + d
        if periodic:
            cc = cc % n
        elif cc < 0 or cc >= n:
            continue
        dup = False
        for k in range(m):
            if out[k] == cc:
                dup = True
        if not dup:
            out[m] = cc
            m += 1
    return m


@njit(cache=True)
def build_pair_list(pos, lower, lengths, periodic, radius):
    """
    CSR list of pairs (i, j), j > i, with minimum-image distance < radius.

    Returns (offsets, neighbors, image): row i holds neighbors[offsets[i]:offsets[i+1]].
    image[s] encodes the periodic shift added to x_i - x_j as
    9 (sx + 1) + 3 (sy + 1) + (sz + 1), with shift = s * box length; see
    image_shifts.
    """
    n = pos.shape[0]
    counts = np.empty(3, dtype=np.int64)
    size = np.empty(3)
    period = np.zeros(3)
    for a in range(3):
        counts[a] = max(1, int(np.floor(lengths[a] / radius)))
        size[a] = lengths[a] / counts[a]
        if periodic[a]:
            period[a] = lengths[a]
    ncell = counts[0] * counts[1] * counts[2]
    cidx = np.empty((n, 3), dtype=np.int64)
    cell = np.empty(n, dtype=np.int64)
    for i in range(n):
        for a in range(3):
            c = int(np.floor((pos[i, a] - lower[a]) / size[a]))
            cidx[i, a] = min(max(c, 0), counts[a] - 1)
        cell[i] = (cidx[i, 0] * counts[1] + cidx[i, 1]) * counts[2] + cidx[i, 2]
    start = np.zeros(ncell + 1, dtype=np.int64)
    for i in range(n):
        start[cell[i] + 1] += 1
    for c in range(ncell):
        start[c + 1] += start[c]
    fill = start[:-1].copy()
    members = np.empty(n, dtype=np.int64)
    for i in range(n):
        members[fill[cell[i]]] = i
        fill[cell[i]] += 1

    r2max = radius * radius
    ax = np.empty(3, dtype=np.int64)
    ay = np.empty(3, dtype=np.int64)
    az = np.empty(3, dtype=np.int64)
    sh = np.empty(3, dtype=np.int64)
    offsets = np.zeros(n + 1, dtype=np.int64)
    cap = max(16, n * 40)
    nbrs = np.empty(cap, dtype=np.int64)
    image = np.empty(cap, dtype=np.int8)
    m = 0
    for i in range(n):
        mx = _axis_cells(cidx[i, 0], counts[0], periodic[0], ax)
        my = _axis_cells(cidx[i, 1], counts[1], periodic[1], ay)
        mz = _axis_cells(cidx[i, 2], counts[2], periodic[2], az)
        for a in range(mx):
            for b in range(my):
                for c in range(mz):
                    cc = (ax[a] * counts[1] + ay[b]) * counts[2] + az[c]
                    for s in range(start[cc], start[cc + 1]):
                        j = members[s]
                        if j <= i:
                            continue
                        r2 = 0.0
                        for d in range(3):
                            dx = pos[i, d] - pos[j, d]
                            sh[d] = 0
                            if period[d] > 0.0:
                                k = -np.floor(dx / period[d] + 0.5)
                                sh[d] = int(k)
                                dx += period[d] * k
                            r2 += dx * dx
                        if r2 < r2max:
                            if m == cap:
                                cap *= 2
                                grown = np.empty(cap, dtype=np.int64)
                                grown[:m] = nbrs[:m]
                                nbrs = grown
                                grown8 = np.empty(cap, dtype=np.int8)
                                grown8[:m] = image[:m]
                                image = grown8
                            nbrs[m] = j
                            image[m] = 9 * (sh[0] + 1) + 3 * (sh[1] + 1) + sh[2] + 1
                            m += 1
        offsets[i + 1] = m
    return offsets, nbrs[:m].copy(), image[:m].copy()


def image_shifts(box: "DomainBox") -> np.ndarray:
    """Table of the 27 periodic shift vectors indexed by pair image codes."""
    s = np.array([(a, b, c) for a in (-1, 0, 1) for b in (-1, 0, 1) for c in (-1, 0, 1)], dtype=float)
    return s * box.periods


@dataclass
class PairList:
    """
    Half neighbor list with a skin, valid until some particle moves more than
    skin/2. Positions must not be re-wrapped while the list is in use: pair
    displacements rely on the periodic image recorded at build time.
    """

    offsets: np.ndarray
    neighbors: np.ndarray
    image: np.ndarray
    shifts: np.ndarray
    radius: float
    skin: float
    reference: np.ndarray

    @classmethod
    def build(cls, ps: ParticleSystem, box: DomainBox, h: float, skin: float) -> "PairList":
        box.wrap(ps.position)
        radius = SUPPORT * h + skin
        for axis in range(3):
            if box.periodic[axis] and box.lengths[axis] < 2.0 * radius:
                raise DomainError(
                    f"periodic extent along axis {axis} must be at least twice the search radius {radius:.6g}"
                )
        offsets, nbrs, image = build_pair_list(
            ps.position, np.asarray(box.lower), box.lengths,
            np.asarray(box.periodic, dtype=np.bool_), radius,
        )
        return cls(offsets, nbrs, image, image_shifts(box), radius, skin, ps.position.copy())

    @property
    def n_pairs(self) -> int:
        return len(self.neighbors)

    def max_displacement(self, position: np.ndarray) -> float:
        if len(position) == 0:
            return 0.0
        d = position - self.reference
        return float(np.sqrt(np.max(np.einsum("ij,ij->i", d, d))))

    def stale(self, position: np.ndarray) -> bool:
        return self.max_displacement(position) > 0.5 * self.skin

    def pairs(self) -> tuple[np.ndarray, np.ndarray]:
        """Flattened (i, j) arrays of all candidate pairs."""
        i = np.repeat(np.arange(len(self.offsets) - 1), np.diff(self.offsets))
        return i, self.neighbors
