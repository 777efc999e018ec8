"""Mass distributions and the constants that pin down the shape sphere.

Everything downstream (potential, dynamics, analysis) consumes a
``MassDistribution``: normalized masses together with the binary collision
points b_i on the equator, the arc angles beta_i between them, the potential
weights k_i, and the fixed rotation that aligns the raw Hopf image with that
convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["MassDistribution", "normalize_masses"]


@dataclass(frozen=True)
class MassDistribution:
    """Normalized masses m1+m2+m3 = 1 plus derived shape-sphere data.

    Attributes
    ----------
    m : tuple of 3 floats
        Normalized masses.
    mhat_i : tuple of 3 floats
        Pair products, mhat_i = m_j * m_k for {i,j,k} = {1,2,3}.
    mhat : float
        Sum of the pair products.
    mbar : float
        Product m1*m2*m3.
    k : tuple of 3 floats
        Potential weights k_i = 2 * mhat_i**1.5 / sqrt(1 - m_i).
    beta : tuple of 3 floats
        Equatorial angles; beta_i is the arc between the two collision
        points other than b_i, cos(beta_i) = (mhat_i - m_i)/(mhat_i + m_i).
    b : ndarray, shape (3, 3)
        Collision points on the equator, b_1 = (1,0,0),
        b_2 = (cos b3, sin b3, 0), b_3 = (cos b2, -sin b2, 0); row i is b_i.
        b_i is the shape where the pair (j, k) complementary to body i sits
        at one point, i.e. r_jk = 0.
    align : ndarray, shape (3, 3)
        Orthogonal matrix applied to the raw Hopf image so that b-points and
        poles land on the convention above, with the eastward cyclic order
        b1 -> b2 -> b3.
    """

    m: tuple[float, float, float]
    mhat_i: tuple[float, float, float]
    mhat: float
    mbar: float
    k: tuple[float, float, float]
    beta: tuple[float, float, float]
    b: np.ndarray
    align: np.ndarray

    def __post_init__(self):
        self.b.setflags(write=False)
        self.align.setflags(write=False)

    @property
    def m_arr(self) -> np.ndarray:
        return np.asarray(self.m)

    def lagrange_dots(self) -> np.ndarray:
        """Dot products p0 . b_i of the equilateral (Lagrange) point with b_i."""
        m = self.m
        out = np.empty(3)
        for i in range(3):
            j, k = (i + 1) % 3, (i + 2) % 3
            out[i] = 1.0 - 2.0 * m[j] * m[k] / ((1.0 - m[i]) * self.mhat)
        return out

    def lagrange_point(self) -> np.ndarray:
        """North Lagrange point p0: the positively oriented equilateral shape."""
        d = self.lagrange_dots()
        # b1, b2 span the equator plane; solve for (x, y), then z > 0.
        x = d[0]
        y = (d[1] - self.b[1, 0] * x) / self.b[1, 1]
        z2 = 1.0 - x * x - y * y
        if z2 <= 0.0:
            raise ValueError("degenerate mass distribution")
        return np.array([x, y, math.sqrt(z2)])


def _raw_hopf(masses, positions):
    """Raw Hopf image (unnormalized 3-vector) of a planar configuration.

    Uses mass-weighted Jacobi vectors of the (1,2) pair; the image length
    equals the moment of inertia about the center of mass.
    """
    m1, m2, m3 = masses
    a = np.asarray(positions, dtype=float)
    com = (m1 * a[0] + m2 * a[1] + m3 * a[2])
    a = a - com
    z1 = complex(*(a[1] - a[0])) * math.sqrt(m1 * m2 / (m1 + m2))
    z2 = complex(*(a[2] - (m1 * a[0] + m2 * a[1]) / (m1 + m2))) * math.sqrt(
        m3 * (m1 + m2))
    cross = z1.conjugate() * z2
    return np.array([2.0 * cross.real, 2.0 * cross.imag,
                     abs(z1) ** 2 - abs(z2) ** 2])


def _unit(v):
    return v / np.linalg.norm(v)


def normalize_masses(m1: float, m2: float, m3: float) -> MassDistribution:
    """Build the MassDistribution for (possibly unnormalized) masses.

    Raises ValueError unless all masses are positive.
    """
    if not (m1 > 0.0 and m2 > 0.0 and m3 > 0.0):
        raise ValueError("masses must be positive")
    s = m1 + m2 + m3
    m = (m1 / s, m2 / s, m3 / s)

    mhat_i = tuple(m[(i + 1) % 3] * m[(i + 2) % 3] for i in range(3))
    mhat = sum(mhat_i)
    mbar = m[0] * m[1] * m[2]
    k = tuple(2.0 * mhat_i[i] ** 1.5 / math.sqrt(1.0 - m[i]) for i in range(3))
    beta = tuple(math.acos((mhat_i[i] - m[i]) / (mhat_i[i] + m[i]))
                 for i in range(3))

    b = np.array([
        [1.0, 0.0, 0.0],
        [math.cos(beta[2]), math.sin(beta[2]), 0.0],
        [math.cos(beta[1]), -math.sin(beta[1]), 0.0],
    ])

    # Alignment of the raw Hopf image.  Collinear shapes fill the raw
    # w2 = 0 circle (w2 is proportional to the signed triangle area), so the
    # raw w2 axis must become the vertical: positively oriented shapes to
    # the north.  The a2 = a3 collision shape goes to b1 = (1,0,0), and a
    # mirror in the target y fixes the eastward cyclic order b1 -> b2 -> b3
    # if needed (it does not move the poles or b1).
    cfg_b1 = [(-(m[1] + m[2]), 0.0), (m[0], 0.0), (m[0], 0.0)]
    cfg_b2 = [(m[1], 0.0), (-(m[0] + m[2]), 0.0), (m[1], 0.0)]

    u = _unit(_raw_hopf(m, cfg_b1))
    n = np.array([0.0, 1.0, 0.0])
    align = np.vstack([u, np.cross(n, u), n])
    v = align @ _unit(_raw_hopf(m, cfg_b2))
    if v[1] < 0.0:
        align = np.diag([1.0, -1.0, 1.0]) @ align

    md = MassDistribution(m=m, mhat_i=mhat_i, mhat=mhat, mbar=mbar, k=k,
                          beta=beta, b=b, align=align)

    # The alignment must reproduce all three collision points exactly.
    v2 = align @ _unit(_raw_hopf(m, cfg_b2))
    cfg_b3 = [(m[2], 0.0), (m[2], 0.0), (-(m[0] + m[1]), 0.0)]
    v3 = align @ _unit(_raw_hopf(m, cfg_b3))
    if (np.linalg.norm(v2 - b[1]) > 1e-10 or np.linalg.norm(v3 - b[2]) > 1e-10):
        raise AssertionError("projection alignment failed to match b-points")
    return md
