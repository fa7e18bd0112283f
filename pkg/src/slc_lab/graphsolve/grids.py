"""Base grids for Fermi graphs u over the totally geodesic H^n.

Every grid supplies, per node, the chart point X of H^n (embedded in
R^{n+2} with last coordinate 0) and its exact coordinate derivatives
X_a, X_ab, together with sparse finite-difference matrices D_a, D_ab acting
on node functions. The same matrices are reused for the height jets, the
linearized operator, and the Jacobian sparsity pattern.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.sparse as sp

from ..errors import ConfigurationError


class Grid:
    """Common interface. Subclasses fill the arrays in ``__init__``."""

    mode: str = ""
    n: int
    h: float
    X: np.ndarray  # (N, n+2)
    Xa: np.ndarray  # (N, n, n+2)
    Xab: np.ndarray  # (N, n, n, n+2)
    D1: list
    D2: list  # D2[a][b]
    boundary: np.ndarray  # bool (N,)

    @property
    def size(self) -> int:
        return self.X.shape[0]

    @property
    def interior(self) -> np.ndarray:
        return ~self.boundary

    @property
    def ambient_dim(self) -> int:
        return self.n + 2

    def pattern(self) -> sp.csr_matrix:
        """Boolean stencil pattern: nonzero where node j enters the curvature at node i."""
        m = sp.identity(self.size, format="csr")
        for a in range(self.n):
            m = m + abs(self.D1[a])
            for b in range(self.n):
                m = m + abs(self.D2[a][b])
        m = m.tocsr()
        m.data[:] = 1.0
        return m

    def spacing_ratio(self) -> np.ndarray:
        """Smallest local node spacing divided by h, per node (1 where uniform)."""
        return np.ones(self.size)

    def spec(self) -> dict:
        raise NotImplementedError

    def coords(self) -> np.ndarray:
        raise NotImplementedError

    def coord_names(self) -> tuple:
        raise NotImplementedError


class FuchsianGrid(Grid):
    """A single node standing for a constant height over the whole base."""

    mode = "FuchsianConstant"

    def __init__(self, n: int):
        if not 2 <= n <= 8:
            raise ConfigurationError(f"dimension {n} outside [2, 8]")
        self.n = n
        self.h = 0.0
        m = n + 2
        self.X = np.zeros((1, m))
        self.X[0, 0] = 1.0
        self.Xa = np.zeros((1, n, m))
        self.Xab = np.zeros((1, n, n, m))
        for a in range(n):
            self.Xa[0, a, a + 1] = 1.0
            self.Xab[0, a, a, 0] = 1.0
        zero = sp.csr_matrix((1, 1))
        self.D1 = [zero] * n
        self.D2 = [[zero] * n for _ in range(n)]
        self.boundary = np.zeros(1, dtype=bool)

    def spec(self) -> dict:
        return {"mode": self.mode, "n": self.n}

    def coords(self) -> np.ndarray:
        return np.zeros((1, 0))

    def coord_names(self) -> tuple:
        return ()


def _from_entries(N: int, entries: dict) -> sp.csr_matrix:
    if not entries:
        return sp.csr_matrix((N, N))
    (rows, cols), vals = zip(*entries.keys()), list(entries.values())
    return sp.csr_matrix((vals, (rows, cols)), shape=(N, N))


class RadialGrid(Grid):
    """Rotationally symmetric profile u(rho) over a geodesic ball of H^n.

    Nodes sit at rho_i = (i + 1/2) h for i = 0..rings; the last node is the
    Dirichlet boundary. The centre is handled by the even reflection
    u(-rho) = u(rho). The chart at each node is polar in rho and gnomonic on
    the sphere of directions, centred on e_1, so angular height derivatives
    vanish identically.
    """

    mode = "RotSymProfile"

    def __init__(self, n: int, h: float, rings: int):
        if not 2 <= n <= 8:
            raise ConfigurationError(f"dimension {n} outside [2, 8]")
        if rings < 2 or not h > 0:
            raise ConfigurationError("need rings >= 2 and h > 0")
        self.n, self.h, self.rings = n, float(h), int(rings)
        N = rings + 1
        m = n + 2
        rho = (np.arange(N) + 0.5) * h
        self.rho = rho
        ch, sh = np.cosh(rho), np.sinh(rho)
        self.X = np.zeros((N, m))
        self.X[:, 0], self.X[:, 1] = ch, sh
        self.Xa = np.zeros((N, n, m))
        self.Xab = np.zeros((N, n, n, m))
        self.Xa[:, 0, 0], self.Xa[:, 0, 1] = sh, ch
        self.Xab[:, 0, 0] = self.X
        for a in range(1, n):
            self.Xa[:, a, a + 1] = sh
            self.Xab[:, 0, a, a + 1] = ch
            self.Xab[:, a, 0, a + 1] = ch
            self.Xab[:, a, a, 1] = -sh

        d1, d2 = {}, {}
        for i in range(N - 1):
            left = i - 1 if i > 0 else 0  # reflection ghost
            for j, w1, w2 in ((left, -1.0, 1.0), (i, 0.0, -2.0), (i + 1, 1.0, 1.0)):
                d1[(i, j)] = d1.get((i, j), 0.0) + w1 / (2 * h)
                d2[(i, j)] = d2.get((i, j), 0.0) + w2 / (h * h)
        Dr = _from_entries(N, d1)
        Drr = _from_entries(N, d2)
        zero = sp.csr_matrix((N, N))
        self.D1 = [Dr] + [zero] * (n - 1)
        self.D2 = [[zero] * n for _ in range(n)]
        self.D2[0][0] = Drr
        self.boundary = np.zeros(N, dtype=bool)
        self.boundary[-1] = True

    @property
    def radius(self) -> float:
        return self.rho[-1]

    def spec(self) -> dict:
        return {"mode": self.mode, "n": self.n, "h": self.h, "rings": self.rings}

    def coords(self) -> np.ndarray:
        return self.rho[:, None]

    def coord_names(self) -> tuple:
        return ("rho",)


class PolarGrid(Grid):
    """Polar grid over a geodesic disk of H^2 (surfaces in H^3).

    Nodes (i, j) at rho_i = (i + 1/2) h, phi_j = 2 pi j / angles, flattened
    as i * angles + j. Ring ``rings`` is the Dirichlet boundary. Across the
    centre u(-rho, phi) = u(rho, phi + pi); ``angles`` must be even.

    Differences default to fourth order (second order on the last interior
    ring). Near the centre the metric factors 1/sinh(rho) are of size 1/h,
    so second-order stencils there leave an O(h) error in the curvature.
    """

    mode = "Disk2D"

    def __init__(self, h: float, rings: int, angles: int, order: int = 4):
        if order not in (2, 4):
            raise ConfigurationError("stencil order must be 2 or 4")
        if angles < 8 or angles % 2:
            raise ConfigurationError("angles must be an even number >= 8")
        if rings < 2 or not h > 0:
            raise ConfigurationError("need rings >= 2 and h > 0")
        self.n, self.h, self.rings, self.angles = 2, float(h), int(rings), int(angles)
        self.order = order
        M = angles
        N = (rings + 1) * M
        rho = (np.arange(rings + 1) + 0.5) * h
        phi = 2 * math.pi * np.arange(M) / M
        R, F = np.meshgrid(rho, phi, indexing="ij")
        R, F = R.ravel(), F.ravel()
        self.rho, self.phi = R, F
        ch, sh, c, s = np.cosh(R), np.sinh(R), np.cos(F), np.sin(F)
        z = np.zeros_like(R)
        self.X = np.stack([ch, sh * c, sh * s, z], axis=-1)
        Xr = np.stack([sh, ch * c, ch * s, z], axis=-1)
        Xp = np.stack([z, -sh * s, sh * c, z], axis=-1)
        Xrp = np.stack([z, -ch * s, ch * c, z], axis=-1)
        Xpp = np.stack([z, -sh * c, -sh * s, z], axis=-1)
        self.Xa = np.stack([Xr, Xp], axis=1)
        self.Xab = np.stack([np.stack([self.X, Xrp], axis=1), np.stack([Xrp, Xpp], axis=1)], axis=1)

        dp = 2 * math.pi / M

        def idx(i, j):
            if i < 0:  # through the centre
                i, j = -i - 1, j + M // 2
            return i * M + (j % M)

        entries = {"r": {}, "rr": {}, "p": {}, "pp": {}, "rp": {}}

        def add(key, row, col, v):
            d = entries[key]
            d[(row, col)] = d.get((row, col), 0.0) + v

        second1 = {1: 0.5, -1: -0.5}
        second2 = {1: 1.0, 0: -2.0, -1: 1.0}
        fourth1 = {2: -1 / 12, 1: 8 / 12, -1: -8 / 12, -2: 1 / 12}
        fourth2 = {2: -1 / 12, 1: 16 / 12, 0: -30 / 12, -1: 16 / 12, -2: -1 / 12}
        w1, w2 = (fourth1, fourth2) if order == 4 else (second1, second2)

        for i in range(rings):
            # the last interior ring has only one outer neighbour
            r1, r2 = (w1, w2) if i + 2 <= rings else (second1, second2)
            for j in range(M):
                k = idx(i, j)
                for off, w in r1.items():
                    add("r", k, idx(i + off, j), w / h)
                    for offp, wp in w1.items():
                        add("rp", k, idx(i + off, j + offp), w * wp / (h * dp))
                for off, w in r2.items():
                    add("rr", k, idx(i + off, j), w / h**2)
                for off, w in w1.items():
                    add("p", k, idx(i, j + off), w / dp)
                for off, w in w2.items():
                    add("pp", k, idx(i, j + off), w / dp**2)

        mats = {key: _from_entries(N, d) for key, d in entries.items()}
        self.D1 = [mats["r"], mats["p"]]
        self.D2 = [[mats["rr"], mats["rp"]], [mats["rp"], mats["pp"]]]
        self.boundary = np.zeros(N, dtype=bool)
        self.boundary[rings * M :] = True

    @property
    def radius(self) -> float:
        return (self.rings + 0.5) * self.h

    def spacing_ratio(self) -> np.ndarray:
        arc = np.sinh(self.rho) * 2 * math.pi / self.angles
        return np.minimum(1.0, arc / self.h)

    def ring(self, i: int) -> slice:
        return slice(i * self.angles, (i + 1) * self.angles)

    def spec(self) -> dict:
        return {
            "mode": self.mode,
            "n": 2,
            "h": self.h,
            "rings": self.rings,
            "angles": self.angles,
            "order": self.order,
        }

    def coords(self) -> np.ndarray:
        return np.stack([self.rho, self.phi], axis=-1)

    def coord_names(self) -> tuple:
        return ("rho", "phi")


def grid_from_spec(spec: dict) -> Grid:
    mode = spec.get("mode")
    if mode == FuchsianGrid.mode:
        return FuchsianGrid(int(spec["n"]))
    if mode == RadialGrid.mode:
        return RadialGrid(int(spec["n"]), float(spec["h"]), int(spec["rings"]))
    if mode == PolarGrid.mode:
        return PolarGrid(
            float(spec["h"]), int(spec["rings"]), int(spec["angles"]), int(spec.get("order", 4))
        )
    raise ConfigurationError(f"unknown grid mode {mode!r}")
