"""Metrics on projective space and between projectivized subspaces.

The point metric is the sine of the angle between lines; distances between
subspaces are computed exactly through principal angles: the minimal
distance is the sine of the smallest principal angle, the symmetric
(Hausdorff-type) distance the sine of the largest.
"""

import numpy as np

from .errors import EmptySubspace, ZeroVector
from .linalg import Subspace, as_vector

POINT_TOL = 1e-12


def proj_dist(v, w):
    """Distance between the lines spanned by v and w.

    Equals ||v ^ w|| / (||v|| ||w||), the sine of the angle between the
    lines, evaluated through the half-angle identity
    sin t = ||u - u'|| * ||u + u'|| / 2 on unit representatives, which is
    stable for both tiny and near-right angles.
    """
    v = as_vector(v)
    w = as_vector(w, v.shape[0])
    nv = np.linalg.norm(v)
    nw = np.linalg.norm(w)
    if nv < POINT_TOL or nw < POINT_TOL:
        raise ZeroVector("projective points need nonzero representatives")
    u = v / nv
    x = w / nw
    if np.dot(u, x) < 0.0:
        x = -x
    d = 0.5 * np.linalg.norm(u - x) * np.linalg.norm(u + x)
    return min(d, 1.0)


def principal_angles(w1, w2):
    """Principal angles between two nontrivial subspaces, ascending.

    The cosines of the angles are the singular values of the cross-Gram
    matrix of orthonormal bases; the count is the smaller dimension.  Small
    angles are recovered from the singular values of the residual
    projection instead of the cosines, so exactly intersecting subspaces
    report angle 0 at machine precision.
    """
    _require_subspaces(w1, w2)
    qa, qb = w1.basis, w2.basis
    gram = qa.T @ qb
    cosines = np.clip(np.linalg.svd(gram, compute_uv=False), 0.0, 1.0)
    if qa.shape[1] >= qb.shape[1]:
        resid = qb - qa @ gram
    else:
        resid = qa - qb @ gram.T
    sines = np.clip(np.linalg.svd(resid, compute_uv=False), 0.0, 1.0)
    m = min(qa.shape[1], qb.shape[1])
    angles = np.empty(m)
    for k in range(m):
        if cosines[k] ** 2 >= 0.5:
            angles[k] = np.arcsin(sines[m - 1 - k])
        else:
            angles[k] = np.arccos(cosines[k])
    return np.sort(angles)


def subspace_dist(w1, w2):
    """Minimal projective distance between two subspaces.

    The infimum of proj_dist over the two projectivized sets, i.e. the sine
    of the smallest principal angle.
    """
    angles = principal_angles(w1, w2)
    return float(np.sin(angles[0]))


def subspace_hausdorff(w1, w2):
    """Symmetric Hausdorff distance between projectivized subspaces.

    For equal dimensions this is the sine of the largest principal angle.
    For unequal dimensions the larger subspace always contains a direction
    orthogonal to the smaller one, so the distance is exactly 1.
    """
    _require_subspaces(w1, w2)
    if w1.dim != w2.dim:
        return 1.0
    angles = principal_angles(w1, w2)
    return float(np.sin(angles[-1]))


def line_dist(v, subspace):
    """Projective distance from the line spanned by v to a subspace."""
    if subspace.is_trivial():
        raise EmptySubspace("distance to the trivial subspace is undefined")
    return subspace_dist(Subspace.from_spanning(as_vector(v)), subspace)


def subspaces_equal(w1, w2, tol=1e-8):
    """Whether two subspaces coincide within a Hausdorff tolerance."""
    if w1.dim != w2.dim:
        return False
    if w1.dim == 0:
        return w1.ambient_dim == w2.ambient_dim
    return subspace_hausdorff(w1, w2) <= tol


def _require_subspaces(w1, w2):
    if not isinstance(w1, Subspace) or not isinstance(w2, Subspace):
        raise TypeError("expected Subspace operands")
    if w1.ambient_dim != w2.ambient_dim:
        raise EmptySubspace("subspaces live in different ambient dimensions")
    if w1.is_trivial() or w2.is_trivial():
        raise EmptySubspace("projective distances need nontrivial subspaces")
