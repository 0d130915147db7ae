"""Hyperbolicity, regularity and transversality of affine elements.

An element is hyperbolic when the operator norms of its restriction to the
contracting space and of the inverse's restriction to the expanding space
are both below 1; the separation of the expanding/contracting spaces from
the opposite slabs quantifies how robustly hyperbolic or transversal a
configuration is, and the product estimates measure how those quantities
behave under composition.
"""

from dataclasses import dataclass

import numpy as np

from .affine import AffineMap, compose
from .errors import (DimMismatch, NotContracting, NotHyperbolic,
                     NotTransversal, PowerOverflow)
from .linalg import Subspace, kernel, spectral_split
from .projmetric import subspace_dist, subspace_hausdorff, subspaces_equal

POWER_CAP = 10 ** 6
TRANSVERSAL_TOL = 1e-9


@dataclass
class AmbientGroup:
    """Declared ambient group data: the minimal neutral and fixed dimensions
    over its semisimple elements, which regularity is measured against."""

    kind: str
    expected_neutral_dim: int
    expected_fixed_dim: int

    @classmethod
    def so_pq(cls, p, q):
        # q independent boosts leave p-q compact directions; an odd excess
        # pins one fixed vector
        if p < q:
            p, q = q, p
        return cls(f"SO({p},{q})", p - q, (p - q) % 2)

    @classmethod
    def sl(cls, n, neutral_dim=0, fixed_dim=0):
        return cls(f"SL({n})", neutral_dim, fixed_dim)

    @classmethod
    def product_so21_sl3(cls):
        return cls("SO(2,1)xSL3(R)", 1, 1)

    @classmethod
    def generic(cls, neutral_dim, fixed_dim):
        return cls("Generic", neutral_dim, fixed_dim)


@dataclass
class HyperbolicProfile:
    """Contraction data of one element: s = max of the two restriction
    norms, the projective separation of its splitting, and flags."""

    s: float
    norm_plus: float
    norm_minus: float
    eps_hyperbolic: float
    split: object
    hyperbolic: bool
    degenerate: bool = False


def _restriction(m, subspace):
    """The action of m on an invariant subspace, in its orthonormal basis.

    Projecting back onto the subspace removes the out-of-subspace noise the
    raw product picks up when ||m|| is huge.
    """
    return subspace.basis.T @ (m @ subspace.basis)


def profile(g, amb=None, alpha=1.0):
    """Contraction profile of an affine (or plain linear) element.

    norm_minus is the operator norm of the linear part restricted to the
    contracting space, norm_plus the same for the inverse on the expanding
    space, s their maximum.  eps_hyperbolic is the smaller of the two
    separations d(A+, D-) and d(A-, D+).  When either expanding or
    contracting space is trivial the profile is flagged degenerate with
    s stored as 0.
    """
    m = g.linear if isinstance(g, AffineMap) else np.asarray(g, dtype=float)
    split = spectral_split(m, alpha=alpha)
    if split.a_plus.is_trivial() or split.a_minus.is_trivial():
        return HyperbolicProfile(0.0, 0.0, 0.0, 0.0, split,
                                 hyperbolic=False, degenerate=True)
    # the restriction to the expanding space is inverted inside the
    # subspace; a global inverse would be useless at large dynamic range
    norm_minus = float(np.linalg.norm(_restriction(m, split.a_minus), 2))
    r_plus = _restriction(m, split.a_plus)
    norm_plus = float(1.0 / np.linalg.svd(r_plus, compute_uv=False)[-1])
    s = max(norm_plus, norm_minus)
    eps = min(subspace_dist(split.a_plus, split.d_minus),
              subspace_dist(split.a_minus, split.d_plus))
    hyperbolic = s < 1.0
    if amb is not None:
        hyperbolic = hyperbolic and is_regular(g, amb)["r_regular"]
    return HyperbolicProfile(s, norm_plus, norm_minus, eps, split, hyperbolic)


def is_regular(g, amb):
    """Regularity flags of g against the declared ambient minima."""
    m = g.linear if isinstance(g, AffineMap) else np.asarray(g, dtype=float)
    split = spectral_split(m)
    fix = kernel(m - np.eye(m.shape[0]))
    return {
        "regular": fix.dim == amb.expected_fixed_dim,
        "r_regular": split.a_zero.dim == amb.expected_neutral_dim,
    }


def power_to_hyperbolic(g, amb, s_target, power_cap=POWER_CAP):
    """Smallest N with s(g^N) < s_target, by repeated profiling.

    Raises NotContracting when no power can work: the element is not
    R-regular in the declared ambient, or its expanding/contracting spaces
    are trivial.
    """
    if not 0.0 < s_target < 1.0:
        raise ValueError("s_target must lie in (0, 1)")
    prof = profile(g, amb)
    if prof.degenerate or not is_regular(g, amb)["r_regular"]:
        raise NotContracting("no power of this element becomes hyperbolic")
    n = 1
    current = g
    while True:
        prof = profile(current)
        if not prof.degenerate and prof.s < s_target:
            return n
        n += 1
        if n > power_cap:
            raise PowerOverflow(f"needed more than {power_cap} powers")
        current = compose(current, g)
        if not np.all(np.isfinite(current.linear)) or \
                np.max(np.abs(current.linear)) > 1e300:
            raise PowerOverflow("matrix powers overflowed before reaching the target")


def _cross_distances(split_g, split_h):
    return (
        subspace_dist(split_g.a_plus, split_h.d_minus),
        subspace_dist(split_g.a_minus, split_h.d_plus),
        subspace_dist(split_h.a_plus, split_g.d_minus),
        subspace_dist(split_h.a_minus, split_g.d_plus),
    )


def transversality_of_splits(sg, sh):
    """Transversality measured directly on two spectral splits."""
    if subspaces_equal(sg.a_plus, sh.a_plus) or subspaces_equal(sg.a_minus, sh.a_minus):
        return 0.0
    eps = float(min(_cross_distances(sg, sh)))
    # machine-noise separations mean an exact intersection
    return eps if eps > 1e-12 else 0.0


def transversality(g, h, profiles=None):
    """Largest eps for which the pair (g, h) is eps-transversal.

    Returns the exact minimum of the four cross distances between the
    expanding/contracting spaces of one element and the opposite slabs of
    the other; 0 means not transversal.  A pair sharing its expanding or
    contracting space (e.g. an element with one of its own powers) is not
    transversal and yields 0 directly.
    """
    if profiles is None:
        profiles = (profile(g), profile(h))
    pg, ph = profiles
    if not (pg.hyperbolic and ph.hyperbolic):
        raise NotHyperbolic("transversality is defined for hyperbolic pairs")
    return transversality_of_splits(pg.split, ph.split)


def product_estimates(g, h, eps):
    """Measured composition quantities for an eps-transversal pair.

    Returns gh_eps (the eps-hyperbolicity of the product), the drifts of the
    product's expanding space from g's and contracting space from h's,
    scaled by s(g) and s(h), and the ratio s(gh) / (s(g) s(h)).  These are
    the quantities the composition estimates bound by constants; the
    operation measures, the tests assert stability.
    """
    pg, ph = profile(g), profile(h)
    if not (pg.hyperbolic and ph.hyperbolic):
        raise NotHyperbolic("product estimates need hyperbolic inputs")
    if pg.eps_hyperbolic < eps or ph.eps_hyperbolic < eps:
        raise NotHyperbolic(f"inputs are not {eps}-hyperbolic")
    if transversality(g, h, profiles=(pg, ph)) < eps:
        raise NotTransversal(f"inputs are not {eps}-transversal")
    gh = compose(g, h) if isinstance(g, AffineMap) else \
        AffineMap(np.asarray(g) @ np.asarray(h), np.zeros(np.asarray(g).shape[0]))
    pgh = profile(gh)
    return {
        "gh_eps": pgh.eps_hyperbolic if not pgh.degenerate else 0.0,
        "drift_plus": subspace_hausdorff(pgh.split.a_plus, pg.split.a_plus) / pg.s,
        "drift_minus": subspace_hausdorff(pgh.split.a_minus, ph.split.a_minus) / ph.s,
        "s_ratio": pgh.s / (pg.s * ph.s),
        "s_product": pgh.s,
    }


def transversal_pair_test(g, t, w, tol=1e-8):
    """Whether l(t) w and the non-contracting slab of g span the space.

    w must sit inside the expanding space of g and have complementary
    dimension to the slab.
    """
    if not isinstance(w, Subspace):
        w = Subspace.from_spanning(w)
    split = spectral_split(g.linear if isinstance(g, AffineMap) else g)
    for col in w.basis.T:
        if not split.a_plus.contains(col):
            raise ValueError("w must be contained in the expanding space of g")
    if w.dim + split.d_plus.dim != split.ambient_dim:
        raise DimMismatch(
            f"dim w + dim D+ = {w.dim} + {split.d_plus.dim} != {split.ambient_dim}")
    tl = t.linear if isinstance(t, AffineMap) else np.asarray(t, dtype=float)
    moved = Subspace.from_spanning(tl @ w.basis)
    stacked = np.hstack([moved.basis, split.d_plus.basis])
    smin = np.linalg.svd(stacked, compute_uv=False)[-1]
    return bool(smin > tol)
