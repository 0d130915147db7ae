"""Signed displacement invariants of affine isometries.

For a quadratic form of signature (k+1, k), each maximal isotropic subspace
inherits an orientation from the reference orientation on the negative-
definite side, and its B-orthocomplement one from the positive side.  These
two transports pin down a canonical neutral vector for every suitable
isometry, and the displacement of any point paired against that vector is a
conjugation-invariant sign.  A 6-dimensional product variant reads the sign
off the 3-dimensional factor carrying the (2,1) form.

All orientation decisions reduce to signs of determinants of coordinate
matrices in the fixed reference bases.
"""

from dataclasses import dataclass

import numpy as np

from .affine import invariant_axis
from .errors import (DegenerateProjection, DimMismatch, EqualSubspaces,
                     NeutralDimWrong, NotIsometry, NotIsotropic,
                     NotMaximalIsotropic, NotProductCompatible, NotRRegular)
from .linalg import Subspace, as_matrix, as_vector, kernel, spectral_split
from .projmetric import proj_dist

ISOTROPY_TOL = 1e-9
ISOMETRY_TOL = 1e-8
ORIENT_DET_TOL = 1e-10


class QuadraticForm:
    """A nondegenerate form of signature (p, q) with a reference basis.

    The basis columns v_1..v_p, w_1..w_q diagonalize the form to
    x_1^2+..+x_p^2 - y_1^2-..-y_q^2; the spans of the two halves carry the
    reference orientations used by every sign computation.
    """

    def __init__(self, p, q, basis=None):
        if p < q:
            raise ValueError("signature convention requires p >= q")
        self.p = int(p)
        self.q = int(q)
        n = self.p + self.q
        self.dim = n
        self.basis = np.eye(n) if basis is None else as_matrix(basis)
        if self.basis.shape[0] != n:
            raise DimMismatch(f"basis must be {n}x{n}")
        self._basis_inv = np.linalg.inv(self.basis)
        signs = np.concatenate([np.ones(self.p), -np.ones(self.q)])
        self.gram = self._basis_inv.T @ np.diag(signs) @ self._basis_inv
        self.x_space = Subspace.from_spanning(self.basis[:, :self.p])
        self.y_space = Subspace.from_spanning(self.basis[:, self.p:])

    def bform(self, u, v):
        u = as_vector(u, self.dim)
        v = as_vector(v, self.dim)
        return float(u @ self.gram @ v)

    def qform(self, v):
        return self.bform(v, v)

    def coords(self, v):
        """Coefficients of v in the reference basis (x's first, then y's)."""
        return self._basis_inv @ as_vector(v, self.dim)

    def x_coords(self, v):
        return self.coords(v)[:self.p]

    def y_coords(self, v):
        return self.coords(v)[self.p:]

    def w_vector(self, j=0):
        """The reference basis vector w_{j+1} of the negative side."""
        return self.basis[:, self.p + j].copy()

    def in_cone(self, v):
        """Whether v lies in the open cone of B-negative vectors."""
        return self.qform(v) < 0.0

    def is_isometry(self, m, tol=ISOMETRY_TOL):
        m = as_matrix(m)
        defect = np.linalg.norm(m.T @ self.gram @ m - self.gram)
        return defect <= tol * np.linalg.norm(self.gram) * max(1.0, np.linalg.norm(m) ** 2)

    def isotropy_defect(self, subspace):
        """Largest |B| value over pairs of basis vectors of the subspace."""
        b = subspace.basis
        return float(np.max(np.abs(b.T @ self.gram @ b))) if subspace.dim else 0.0

    def b_orthocomplement(self, subspace):
        """The subspace of vectors B-orthogonal to the given one."""
        if subspace.dim == 0:
            return Subspace.full(self.dim)
        return kernel(_pad_square(subspace.basis.T @ self.gram, self.dim))


def _pad_square(rows, n):
    out = np.zeros((n, n))
    out[:rows.shape[0], :] = rows
    return out


def oriented_isotropic_basis(form, w):
    """Positively oriented basis of a maximal isotropic subspace.

    Orientation is transported from the reference orientation of the
    negative-definite side: the coordinate determinant of the projected
    basis must be positive.
    """
    if w.dim != form.q:
        raise NotMaximalIsotropic(f"expected dimension {form.q}, got {w.dim}")
    if form.isotropy_defect(w) > ISOTROPY_TOL:
        raise NotIsotropic("form does not vanish on the subspace")
    basis = w.basis.copy()
    ycoords = np.column_stack([form.y_coords(b) for b in basis.T])
    det = np.linalg.det(ycoords)
    if abs(det) < ORIENT_DET_TOL:
        raise DegenerateProjection("projection to the negative side is singular")
    if det < 0:
        basis[:, 0] = -basis[:, 0]
    return basis


def oriented_neutral_vector(form, a_plus, neutral=None, split=None):
    """The canonical neutral vector attached to a maximal isotropic subspace.

    Returns the unique-up-to-positive-scale vector v0 in the neutral
    complement such that a positively oriented basis of the isotropic
    subspace extended by v0 is positively oriented in its B-orthocomplement
    (orientation transported from the positive-definite side).  Normalized
    to B(v0, v0) = 1; needs signature (k+1, k).
    """
    if form.p != form.q + 1:
        raise DimMismatch("neutral orientation needs signature (k+1, k)")
    if isinstance(a_plus, np.ndarray):
        a_plus = Subspace.from_spanning(a_plus)
    if neutral is None:
        if split is None:
            raise ValueError("pass the neutral direction or a spectral split")
        if split.a_zero.dim != 1:
            raise NeutralDimWrong(f"neutral space has dimension {split.a_zero.dim}")
        neutral = split.a_zero.basis[:, 0]
    z = as_vector(neutral, form.dim)
    z = z / np.linalg.norm(z)
    defect = max(abs(form.bform(z, b)) for b in a_plus.basis.T)
    if defect > 1e-6:
        raise NotMaximalIsotropic("neutral direction is not B-orthogonal to the subspace")
    bz = form.qform(z)
    if bz <= 0.0:
        raise NotMaximalIsotropic("neutral direction is not B-positive")

    oriented = oriented_isotropic_basis(form, a_plus)
    xcoords = np.column_stack(
        [form.x_coords(b) for b in oriented.T] + [form.x_coords(z)])
    det = np.linalg.det(xcoords)
    if abs(det) < ORIENT_DET_TOL:
        raise DegenerateProjection("projection to the positive side is singular")
    v0 = z if det > 0 else -z
    return v0 / np.sqrt(bz)


def orientation_parity(form, w1, w2):
    """Compare the two orientations transported onto the common complement.

    For transversal maximal isotropic subspaces the B-orthocomplements
    intersect in a line; each transport orients it, and the parity is the
    product of the two determinant signs (+1 same, -1 opposite).
    """
    inter = _intersect(form.b_orthocomplement(w1), form.b_orthocomplement(w2))
    if inter.dim != 1:
        raise EqualSubspaces("complements do not intersect in a line")
    z = inter.basis[:, 0]
    v1 = oriented_neutral_vector(form, w1, neutral=z)
    v2 = oriented_neutral_vector(form, w2, neutral=z)
    return 1 if float(np.dot(v1, v2)) > 0 else -1


def _intersect(u, v):
    """Intersection of two subspaces via the kernel of stacked projections."""
    n = u.ambient_dim
    pu = np.eye(n) - u.basis @ u.basis.T
    pv = np.eye(n) - v.basis @ v.basis.T
    return kernel(pu + pv)


@dataclass
class SignResult:
    """A computed sign: the value, the neutral vector it was measured
    against, and the invariant axis of the element."""

    alpha: float
    neutral_vector: np.ndarray
    axis: object


def margulis_alpha(g, form):
    """Signed displacement of an isometry along its canonical neutral vector.

    The linear part must preserve the form, have a one-dimensional neutral
    space (signature (k+1, k)), and its expanding space must be maximal
    isotropic.  The sign is the B-pairing of the displacement of any point
    (the origin is used) against the oriented neutral vector.
    """
    if form.p != form.q + 1:
        raise DimMismatch("sign needs signature (k+1, k)")
    m = g.linear
    if not form.is_isometry(m):
        raise NotIsometry("linear part does not preserve the form")
    split = spectral_split(m)
    if split.a_zero.dim != 1 or split.a_plus.dim != form.q:
        raise NotRRegular(
            f"element splits as {split.dims()}, expected ({form.q}, {form.q}, 1)")
    if form.isotropy_defect(split.a_plus) > ISOTROPY_TOL * max(1.0, np.linalg.norm(m)):
        raise NotMaximalIsotropic("expanding space is not isotropic")
    v_plus = oriented_neutral_vector(form, split.a_plus, split=split)
    alpha = form.bform(g.translation, v_plus)
    axis = invariant_axis(g, split=split)
    return SignResult(alpha=alpha, neutral_vector=v_plus, axis=axis)


@dataclass
class ProductSplit:
    """Orthogonal 3+3 splitting of R^6, the first factor carrying a (2,1)
    form in its own coordinates."""

    v1: Subspace
    v2: Subspace
    form_on_v1: QuadraticForm

    def __post_init__(self):
        if self.v1.dim != 3 or self.v2.dim != 3 or self.v1.ambient_dim != 6:
            raise DimMismatch("product split needs 3+3 factors in dimension 6")
        if np.max(np.abs(self.v1.basis.T @ self.v2.basis)) > 1e-10:
            raise ValueError("product factors must be orthogonal")

    @classmethod
    def standard(cls):
        e = np.eye(6)
        return cls(Subspace(e[:, :3]), Subspace(e[:, 3:]), QuadraticForm(2, 1))

    @property
    def adapted_basis(self):
        return np.hstack([self.v1.basis, self.v2.basis])


def product_blocks(m, psplit, tol=1e-8):
    """The two 3x3 factor actions of a 6x6 matrix respecting the splitting.

    At least one factor must be invariant (one off-diagonal block zero);
    the action on the first factor is then either a restriction or the
    induced quotient action, and similarly for the second.
    """
    m = as_matrix(m)
    c = psplit.adapted_basis
    mh = c.T @ m @ c
    scale = max(1.0, np.linalg.norm(mh))
    upper = np.linalg.norm(mh[:3, 3:])
    lower = np.linalg.norm(mh[3:, :3])
    if min(upper, lower) > tol * scale:
        raise NotProductCompatible(
            "neither factor is invariant; the element does not respect the "
            "declared product splitting")
    return mh[:3, :3], mh[3:, 3:]


def extended_alpha(g, psplit):
    """Sign of a regular element in the 6-dimensional product setting.

    The neutral direction projects isomorphically to the (2,1) factor,
    where the orientation machinery produces the reference neutral vector;
    the sign is the coefficient of the axis translation against its lift.
    """
    if g.dim != 6:
        raise DimMismatch("extended sign lives in dimension 6")
    m = g.linear
    split6 = spectral_split(m)
    if split6.a_zero.dim != 1:
        raise NeutralDimWrong(
            f"neutral space has dimension {split6.a_zero.dim}, expected 1")
    theta1, _ = product_blocks(m, psplit)
    form1 = psplit.form_on_v1
    if not form1.is_isometry(theta1):
        raise NotProductCompatible("first factor action does not preserve the (2,1) form")
    split1 = spectral_split(theta1)
    if split1.dims() != (1, 1, 1):
        raise NotRRegular(f"(2,1) factor splits as {split1.dims()}, expected (1, 1, 1)")
    v_hat = oriented_neutral_vector(form1, split1.a_plus, split=split1)

    # lift: the unique vector of the 6-dim neutral line projecting onto the
    # factor neutral vector
    z = split6.a_zero.basis[:, 0]
    z_coords = psplit.v1.basis.T @ z
    denom = float(np.dot(z_coords, z_coords))
    if denom < 1e-12:
        raise NotProductCompatible("neutral line projects trivially to the (2,1) factor")
    c = float(np.dot(z_coords, v_hat)) / denom
    v_g = c * z
    resid = np.linalg.norm(psplit.v1.basis.T @ v_g - v_hat)
    if resid > 1e-6 * max(1.0, np.linalg.norm(v_hat)):
        raise NotProductCompatible("neutral line does not project onto the factor neutral")

    axis = invariant_axis(g, split=split6)
    t_g = axis.direction
    denom = float(np.dot(v_g, v_g))
    alpha = float(np.dot(t_g, v_g)) / denom
    if np.linalg.norm(t_g - alpha * v_g) > 1e-6 * max(1.0, np.linalg.norm(t_g)):
        raise NotProductCompatible("axis translation is not parallel to the neutral vector")
    return SignResult(alpha=alpha, neutral_vector=v_g, axis=axis)


def phi_side(form, u, w):
    """Which side of the reference isotropic line a second one falls on.

    In signature (2,1): scale the spanning vector v of u to project onto
    the reference negative basis vector, take the companion positive vector
    v0 completing the reference orientation, and express the line
    B-orthogonal to both u and w as w0 = v0 + alpha_w * v.  The side is the
    sign of alpha_w; consistently, pairing w0 against the reference
    negative vector gives -alpha_w.
    """
    if (form.p, form.q) != (2, 1):
        raise DimMismatch("side classification is specific to signature (2,1)")
    u_vec = u.basis[:, 0] if isinstance(u, Subspace) else as_vector(u, 3)
    w_vec = w.basis[:, 0] if isinstance(w, Subspace) else as_vector(w, 3)
    for vec in (u_vec, w_vec):
        if abs(form.qform(vec)) > ISOTROPY_TOL * np.dot(vec, vec):
            raise NotIsotropic("both lines must be isotropic")
    if proj_dist(u_vec, w_vec) < 1e-10:
        raise EqualSubspaces("the two isotropic lines coincide")

    y = form.y_coords(u_vec)[0]
    if abs(y) < 1e-12 * np.linalg.norm(u_vec):
        raise DegenerateProjection("isotropic line projects trivially to the negative side")
    v = u_vec / y
    a, b = form.x_coords(v)
    # companion: B-orthogonal to u inside the positive side, unit, oriented
    v0 = -b * form.basis[:, 0] + a * form.basis[:, 1]

    beta = form.bform(v, w_vec)
    if abs(beta) < 1e-12 * np.linalg.norm(w_vec):
        raise EqualSubspaces("isotropic lines with vanishing pairing coincide")
    alpha_w = -form.bform(v0, w_vec) / beta
    w0 = v0 + alpha_w * v
    check = form.bform(w0, form.w_vector(0))
    if abs(check + alpha_w) > 1e-8 * max(1.0, abs(alpha_w)):
        raise DegenerateProjection("side classification failed its consistency check")
    return {"side": 1 if alpha_w > 0 else -1, "alpha_w": float(alpha_w), "w0": w0}
