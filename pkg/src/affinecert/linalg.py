"""Dense real linear algebra at small fixed dimension.

Provides characteristic polynomials, eigenvalue moduli, rank-revealing
kernels, and the modulus-threshold splitting of R^n into expanding,
contracting and neutral invariant subspaces of an invertible matrix.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import AmbiguousModulus, DimMismatch, EmptySubspace, SingularMatrix

MAX_DIM = 8

# rank decisions: singular values below KERNEL_TOL * sigma_max count as zero
KERNEL_TOL = 1e-8
DET_TOL = 1e-12
UNIT_BAND = 1e-9
# the eigensolver cannot place moduli more finely than ~eps * ||m||; the
# classification band is widened to that resolution for large-norm matrices
BAND_EPS_FACTOR = 256.0
ORTHO_TOL = 1e-10


def as_matrix(m):
    """Coerce to a float64 square matrix and validate finiteness."""
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimMismatch(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


def as_vector(v, dim=None):
    """Coerce to a float64 vector, optionally of a required dimension."""
    a = np.asarray(v, dtype=float).reshape(-1)
    if dim is not None and a.shape[0] != dim:
        raise DimMismatch(f"expected a vector of dimension {dim}, got {a.shape[0]}")
    if not np.all(np.isfinite(a)):
        raise ValueError("vector entries must be finite")
    return a


class Subspace:
    """A linear subspace of R^n stored as an orthonormal column basis.

    The basis is an (n, k) array with orthonormal columns; k = 0 encodes
    the trivial subspace.
    """

    def __init__(self, basis, ambient_dim=None):
        basis = np.asarray(basis, dtype=float)
        if basis.ndim == 1:
            basis = basis.reshape(-1, 1)
        if basis.size == 0:
            if ambient_dim is None:
                raise EmptySubspace("trivial subspace needs an explicit ambient dimension")
            basis = np.zeros((ambient_dim, 0))
        self.basis = basis
        self.ambient_dim = basis.shape[0]
        self.dim = basis.shape[1]
        if self.dim > 0:
            gram = basis.T @ basis
            if np.max(np.abs(gram - np.eye(self.dim))) > 1e-8:
                raise ValueError("basis columns must be orthonormal; use Subspace.from_spanning")

    @classmethod
    def from_spanning(cls, vectors, ambient_dim=None, tol=KERNEL_TOL):
        """Build a subspace from (possibly dependent) spanning vectors.

        Vectors are given as columns; near-dependent directions are dropped
        by a relative singular value cut.
        """
        a = np.asarray(vectors, dtype=float)
        if a.ndim == 1:
            a = a.reshape(-1, 1)
        if a.shape[1] == 0 or np.linalg.norm(a) == 0.0:
            return cls.trivial(ambient_dim if ambient_dim is not None else a.shape[0])
        u, s, _ = np.linalg.svd(a, full_matrices=False)
        rank = int(np.sum(s > tol * s[0]))
        return cls(u[:, :rank])

    @classmethod
    def trivial(cls, ambient_dim):
        return cls(np.zeros((ambient_dim, 0)), ambient_dim=ambient_dim)

    @classmethod
    def full(cls, ambient_dim):
        return cls(np.eye(ambient_dim))

    def is_trivial(self):
        return self.dim == 0

    def project(self, v):
        """Orthogonal projection of v onto the subspace."""
        if self.dim == 0:
            return np.zeros(self.ambient_dim)
        return self.basis @ (self.basis.T @ v)

    def residual(self, v):
        """Component of v orthogonal to the subspace."""
        return np.asarray(v, dtype=float) - self.project(v)

    def contains(self, v, tol=1e-8):
        v = as_vector(v, self.ambient_dim)
        scale = np.linalg.norm(v)
        if scale == 0.0:
            return True
        return np.linalg.norm(self.residual(v)) <= tol * scale

    def orthogonal_complement(self):
        if self.dim == self.ambient_dim:
            return Subspace.trivial(self.ambient_dim)
        full = np.linalg.svd(self.basis, full_matrices=True)[0] if self.dim > 0 else np.eye(self.ambient_dim)
        return Subspace(full[:, self.dim:])

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"


@dataclass
class SpectralSplit:
    """Invariant splitting of R^n by eigenvalue modulus against a threshold.

    a_plus carries moduli above the threshold, a_minus below, a_zero the
    threshold band itself.  d_plus and d_minus are the derived sums
    a_plus + a_zero and a_minus + a_zero.
    """

    a_plus: Subspace
    a_minus: Subspace
    a_zero: Subspace
    alpha_threshold: float = 1.0
    d_plus: Subspace = field(init=False)
    d_minus: Subspace = field(init=False)

    def __post_init__(self):
        n = self.a_plus.ambient_dim
        self.d_plus = _direct_sum(self.a_plus, self.a_zero, n)
        self.d_minus = _direct_sum(self.a_minus, self.a_zero, n)

    @property
    def ambient_dim(self):
        return self.a_plus.ambient_dim

    def dims(self):
        return (self.a_plus.dim, self.a_minus.dim, self.a_zero.dim)


def _direct_sum(u, v, ambient_dim):
    cols = np.hstack([u.basis, v.basis])
    if cols.shape[1] == 0:
        return Subspace.trivial(ambient_dim)
    return Subspace.from_spanning(cols)


def char_poly(m):
    """Monic coefficients of det(lambda*I - m), highest degree first."""
    m = as_matrix(m)
    return np.real_if_close(np.poly(m)).astype(float)


def eval_poly(coeffs, m):
    """Evaluate a monic polynomial at a matrix by Horner's scheme."""
    m = as_matrix(m)
    out = np.eye(m.shape[0]) * coeffs[0]
    for c in coeffs[1:]:
        out = out @ m + c * np.eye(m.shape[0])
    return out


def kernel(m, tol=KERNEL_TOL):
    """Orthonormal basis of the numerical null space of m.

    The kernel dimension is the number of singular values below
    tol times the largest singular value.
    """
    m = as_matrix(m)
    n = m.shape[0]
    u, s, vt = np.linalg.svd(m)
    if s[0] == 0.0:
        return Subspace.full(n)
    null_mask = s < tol * s[0]
    k = int(np.sum(null_mask))
    if k == 0:
        return Subspace.trivial(n)
    return Subspace(vt[n - k:, :].T)


def robust_absdet(m):
    """|det m| as the product of singular values, accumulated in log space.

    LU-based determinants underflow to 0 for well-structured group elements
    with very large dynamic range; the singular-value product stays usable.
    """
    s = np.linalg.svd(m, compute_uv=False)
    if s[-1] == 0.0:
        return 0.0
    return float(np.exp(np.sum(np.log(s))))


# above this operator norm the smallest singular value of a group element
# drops below the eps * sigma_max noise floor, so a determinant threshold
# can no longer distinguish long products of invertibles from singular input
DET_RESOLVABLE_NORM = 1e8


def is_numerically_singular(m, tol=DET_TOL):
    s = np.linalg.svd(m, compute_uv=False)
    if s[-1] == 0.0:
        return True
    if s[0] > DET_RESOLVABLE_NORM:
        return False
    return float(np.exp(np.sum(np.log(s)))) < tol


def _check_invertible(m):
    if is_numerically_singular(m):
        raise SingularMatrix("matrix is numerically singular")


def eigen_moduli(m, cluster_tol=1e-8):
    """Moduli of the complex eigenvalues with algebraic multiplicities.

    Returns a list of (modulus, multiplicity) pairs sorted by decreasing
    modulus; multiplicities sum to the dimension.  Moduli within a relative
    cluster_tol of each other are merged.
    """
    m = as_matrix(m)
    _check_invertible(m)
    moduli = np.sort(np.abs(np.linalg.eigvals(m)))[::-1]
    out = []
    for x in moduli:
        if out and abs(out[-1][0] - x) <= cluster_tol * max(1.0, abs(out[-1][0])):
            out[-1][1] += 1
        else:
            out.append([float(x), 1])
    return [(mod, mult) for mod, mult in out]


def _real_poly_from_roots(roots):
    """Real coefficients of the monic polynomial with the given root group.

    The root group is closed under conjugation (real-matrix spectra are),
    so the imaginary parts of the coefficients are numerical noise.
    """
    if len(roots) == 0:
        return np.array([1.0])
    return np.real(np.poly(np.asarray(roots)))


# a verified kernel keeps singular values at least this factor above the
# discarded ones
SPLIT_GAP_FACTOR = 100.0


def _kernel_of_expected_dim(mat, k, gap_factor=SPLIT_GAP_FACTOR):
    """Kernel of known dimension k, verified by a singular-value gap.

    The dimension comes from the root-group count; the singular spectrum
    must confirm it with a clear gap, otherwise None is returned.
    """
    n = mat.shape[0]
    if k >= n:
        return Subspace.full(n)
    _, s, vt = np.linalg.svd(mat)
    kept = s[n - k - 1]
    discarded = s[n - k] if k > 0 else 0.0
    if k > 0 and discarded * gap_factor > kept:
        return None
    return Subspace(vt[n - k:, :].T) if k > 0 else Subspace.trivial(n)


def spectral_split(m, alpha=1.0, unit_band=UNIT_BAND, kernel_tol=KERNEL_TOL):
    """Split R^n into invariant subspaces by eigenvalue modulus vs alpha.

    Eigenvalues with modulus above alpha*(1+unit_band) feed a_plus, below
    alpha*(1-unit_band) feed a_minus, and the band itself is neutral.  Each
    part is the numerical kernel of the real polynomial assembled from the
    selected (conjugation-closed) root group, evaluated at m.

    Raises AmbiguousModulus when the three kernel dimensions fail to add up
    to the ambient dimension, i.e. the band does not separate the spectrum.
    """
    m = as_matrix(m)
    _check_invertible(m)
    if alpha <= 0.0:
        raise ValueError("threshold alpha must be positive")
    n = m.shape[0]
    eigs = np.linalg.eigvals(m)
    moduli = np.abs(eigs)
    eps = np.finfo(float).eps
    band = max(unit_band, BAND_EPS_FACTOR * eps * np.linalg.norm(m, 2) / alpha)
    hi = alpha * (1.0 + band)
    lo = alpha * (1.0 - band)
    plus_roots = eigs[moduli > hi]
    minus_roots = eigs[moduli < lo]
    zero_roots = eigs[(moduli >= lo) & (moduli <= hi)]

    parts = []
    for roots in (plus_roots, minus_roots, zero_roots):
        if len(roots) == 0:
            parts.append(Subspace.trivial(n))
            continue
        if len(roots) == n:
            parts.append(Subspace.full(n))
            continue
        poly = _real_poly_from_roots(roots)
        part = _kernel_of_expected_dim(eval_poly(poly, m), len(roots))
        if part is None:
            raise AmbiguousModulus(
                "no singular-value gap confirms a {}-dimensional kernel for the "
                "root group of size {} at threshold alpha={}; the spectrum cannot "
                "be split at this band".format(len(roots), len(roots), alpha))
        parts.append(part)
    a_plus, a_minus, a_zero = parts
    return SpectralSplit(a_plus, a_minus, a_zero, alpha_threshold=alpha)
