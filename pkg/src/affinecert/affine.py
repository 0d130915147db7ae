"""Affine transformations of R^n as (linear part, translation) pairs.

Covers composition, inversion, powers, the homogeneous (n+1)-dimensional
embedding, fixed points, and the invariant-axis construction for elements
whose linear part fixes a direction: the translation splits into a drift
along the fixed space and a part absorbed by a base-point shift, which
yields the invariant line closest to the origin.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (DimMismatch, NonSemisimpleNeutral, NoUnitEigenvalue,
                     SingularMatrix, UnitEigenvalue)
from .linalg import (Subspace, as_matrix, as_vector, is_numerically_singular,
                     kernel, spectral_split)

AXIS_COMPLEMENT_TOL = 1e-7
FIXED_EIG_TOL = 1e-8


@dataclass
class AffineMap:
    """The map x -> linear @ x + translation with invertible linear part."""

    linear: np.ndarray
    translation: np.ndarray
    name: str = ""

    def __post_init__(self):
        self.linear = as_matrix(self.linear)
        self.translation = as_vector(self.translation, self.linear.shape[0])
        if is_numerically_singular(self.linear):
            raise SingularMatrix("affine maps need invertible linear parts")

    @property
    def dim(self):
        return self.linear.shape[0]

    def __call__(self, point):
        point = as_vector(point, self.dim)
        return self.linear @ point + self.translation

    def inverse(self):
        inv = np.linalg.inv(self.linear)
        name = _invert_name(self.name)
        return AffineMap(inv, -inv @ self.translation, name=name)

    def power(self, n):
        """n-th power (n may be negative), via the homogeneous embedding."""
        if n == 0:
            return identity(self.dim)
        base = self if n > 0 else self.inverse()
        h = np.linalg.matrix_power(homogeneous_embed(base), abs(n))
        return AffineMap(h[:-1, :-1], h[:-1, -1])

    def __repr__(self):
        label = f" '{self.name}'" if self.name else ""
        return f"AffineMap(dim={self.dim}{label})"


def identity(dim):
    return AffineMap(np.eye(dim), np.zeros(dim), name="1")


def _invert_name(name):
    if not name:
        return ""
    if name.endswith("^-1"):
        return name[:-3]
    return name + "^-1"


def compose(a, b):
    """The composite map a o b (apply b first)."""
    if a.dim != b.dim:
        raise DimMismatch(f"cannot compose maps of dimensions {a.dim} and {b.dim}")
    return AffineMap(a.linear @ b.linear, a.linear @ b.translation + a.translation)


def compose_all(maps, dim=None):
    out = None
    for m in maps:
        out = m if out is None else compose(out, m)
    if out is None:
        if dim is None:
            raise ValueError("empty composition needs an explicit dimension")
        return identity(dim)
    return out


def conjugate(t, g):
    """t g t^-1."""
    return compose(compose(t, g), t.inverse())


def homogeneous_embed(a):
    """Block matrix [[linear, translation], [0, 1]] of size dim+1.

    This is a group monomorphism: the embedding of a composite equals the
    product of the embeddings.
    """
    n = a.dim
    h = np.zeros((n + 1, n + 1))
    h[:n, :n] = a.linear
    h[:n, n] = a.translation
    h[n, n] = 1.0
    return h


def maps_close(a, b, tol=1e-10):
    scale = max(1.0, np.linalg.norm(a.linear), np.linalg.norm(a.translation))
    return (np.linalg.norm(a.linear - b.linear) <= tol * scale
            and np.linalg.norm(a.translation - b.translation) <= tol * scale)


def fixed_point(g, tol=FIXED_EIG_TOL):
    """The unique fixed point of g, defined when 1 is not an eigenvalue."""
    eigs = np.linalg.eigvals(g.linear)
    if np.min(np.abs(eigs - 1.0)) <= tol:
        raise UnitEigenvalue("linear part has 1 as an eigenvalue; no unique fixed point")
    return np.linalg.solve(np.eye(g.dim) - g.linear, g.translation)


@dataclass
class AffineAxis:
    """Invariant line of an affine map together with its stable/unstable slabs.

    base_point is the point of the line closest to the origin, direction the
    translation vector along the line. e_plus/e_minus are the affine
    subspaces spanned by the line and the non-contracting/non-expanding
    spaces; c_g is their intersection.
    """

    base_point: np.ndarray
    direction: np.ndarray
    e_plus: tuple = None    # (point, Subspace)
    e_minus: tuple = None
    c_g: tuple = None


def invariant_axis(g, split=None, tol=AXIS_COMPLEMENT_TOL):
    """Invariant line of g: direction t_g and the base point nearest 0.

    Writes the translation as t_g + v1 with t_g in ker(l(g)-I) and v1 in
    im(l(g)-I); the base point is the minimum-norm solution of
    (l(g)-I) p = -v1.  Requires the kernel and image to complement each
    other (semisimple neutral part), and a nontrivial kernel.
    """
    n = g.dim
    m = g.linear - np.eye(n)
    fix = kernel(g.linear - np.eye(n))
    if fix.is_trivial():
        p = fixed_point(g)
        raise NoUnitEigenvalue(
            "linear part has no eigenvalue 1; the map has a fixed point instead",
            fixed_point=p)
    image = Subspace.from_spanning(m) if np.linalg.norm(m) > 0 else Subspace.trivial(n)
    if fix.dim + image.dim != n:
        raise NonSemisimpleNeutral(
            f"ker and im of l(g)-I have dimensions {fix.dim}+{image.dim} != {n}")
    stacked = np.hstack([fix.basis, image.basis])
    smin = np.linalg.svd(stacked, compute_uv=False)[-1]
    if smin < tol:
        raise NonSemisimpleNeutral(
            f"ker and im of l(g)-I fail to complement (sigma_min = {smin:.3e})")

    coeffs = np.linalg.solve(stacked, g.translation)
    t_g = fix.basis @ coeffs[:fix.dim]
    v1 = image.basis @ coeffs[fix.dim:]
    base, *_ = np.linalg.lstsq(m, -v1, rcond=None)

    axis = AffineAxis(base_point=base, direction=t_g)
    if split is not None:
        e_plus_dir = Subspace.from_spanning(
            np.hstack([split.d_plus.basis, t_g.reshape(-1, 1)]))
        e_minus_dir = Subspace.from_spanning(
            np.hstack([split.d_minus.basis, t_g.reshape(-1, 1)]))
        c_dir = Subspace.from_spanning(
            np.hstack([split.a_zero.basis, t_g.reshape(-1, 1)]))
        axis.e_plus = (base, e_plus_dir)
        axis.e_minus = (base, e_minus_dir)
        axis.c_g = (base, c_dir)
    return axis
