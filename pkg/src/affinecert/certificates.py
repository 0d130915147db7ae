"""Group-level searches and machine-checkable certificates.

Certificates carry the words, the realized matrices, and a kind-specific
witness payload; each kind can be re-verified from the matrices alone by
check_certificate, without access to the group that produced it.
"""

import numpy as np
from dataclasses import dataclass, field

from .affine import AffineMap, compose, identity, invariant_axis, maps_close
from .dynamics import (AmbientGroup, power_to_hyperbolic, profile,
                       transversality, transversality_of_splits)
from .errors import (AffineCertError, BudgetExhausted, NotTransversal,
                     NoVerifiedN, PowerOverflow)
from .linalg import Subspace, kernel, spectral_split
from .projmetric import proj_dist, subspace_dist
from .signs import (ProductSplit, QuadraticForm, extended_alpha,
                    margulis_alpha, oriented_neutral_vector, product_blocks)
from .words import Word, enumerate_words, parse_word, realize

MAX_POWER_BOOST = 64
TRANSVERSAL_FLOOR = 1e-9


@dataclass
class GroupSpec:
    """A finitely generated affine group: named generators plus the ambient
    data (and optionally a preserved form or a 3+3 product splitting)."""

    dim: int
    generators: list
    ambient: AmbientGroup
    form: QuadraticForm = None
    product_split: ProductSplit = None

    def __post_init__(self):
        names = set()
        for g in self.generators:
            if g.dim != self.dim:
                raise ValueError("generator dimension mismatch")
            if not g.name:
                raise ValueError("generators must be named")
            if g.name in names:
                raise ValueError(f"duplicate generator name '{g.name}'")
            names.add(g.name)
        if self.form is not None:
            for g in self.generators:
                if not self.form.is_isometry(g.linear, tol=1e-7):
                    raise ValueError(
                        f"generator '{g.name}' does not preserve the declared form")

    @property
    def names(self):
        return [g.name for g in self.generators]

    def words(self, max_len):
        return enumerate_words(self.generators, max_len, dim=self.dim)

    def element(self, word):
        if isinstance(word, str):
            word = parse_word(word, self.names)
        m = realize(word, self.generators, dim=self.dim)
        m.name = word.to_str(self.names)
        return word, m


@dataclass
class Certificate:
    """A re-checkable record: kind, words, realized maps, witness payload."""

    kind: str
    words: list
    maps: list
    witness: dict = field(default_factory=dict)


def _map_payload(m):
    return {"name": m.name, "linear": m.linear.tolist(),
            "translation": m.translation.tolist()}


def _payload_map(d):
    return AffineMap(np.array(d["linear"]), np.array(d["translation"]),
                     name=d.get("name", ""))


# ---------------------------------------------------------------------------
# screens and searches


def eigenvalue_one_screen(spec, max_len, tol=1e-6):
    """Certificates for enumerated elements with no eigenvalue near 1.

    Such an element has a fixed point, which is incompatible with a
    torsion-free properly discontinuous action containing it.  Every
    violating word up to the length bound is reported, smallest first.
    """
    out = []
    for word, m in spec.words(max_len):
        if word.length == 0:
            continue
        eigs = np.linalg.eigvals(m.linear)
        gaps = np.abs(eigs - 1.0)
        if np.min(gaps) <= tol:
            continue
        p = np.linalg.solve(np.eye(spec.dim) - m.linear, m.translation)
        residual = float(np.linalg.norm(m(p) - p))
        m.name = word.to_str(spec.names)
        out.append(Certificate(
            kind="FixedPointViolation",
            words=[word.to_str(spec.names)],
            maps=[_map_payload(m)],
            witness={
                "eigenvalue_gaps": sorted(float(x) for x in gaps),
                "fixed_point": p.tolist(),
                "residual": residual,
                "tol": tol,
            }))
    return out


def _sign_candidate(spec, sign_of, word, m, power_cap):
    try:
        prof = profile(m)
    except AffineCertError:
        return None
    if prof.degenerate:
        return None
    if not prof.hyperbolic:
        try:
            n = power_to_hyperbolic(m, spec.ambient, 0.98, power_cap=power_cap)
        except (AffineCertError, PowerOverflow):
            return None
        word = word.power(n)
        m = spec.element(word)[1]
        prof = profile(m)
        if not prof.hyperbolic:
            return None
    try:
        alpha = sign_of(m)
    except AffineCertError:
        return None
    return {"word": word, "map": m, "profile": prof, "alpha": alpha}


def _hyperbolic_candidates(spec, max_len, power_cap=MAX_POWER_BOOST, jobs=1):
    """Realized words that are hyperbolic with a computable sign.

    Elements that are regular but not yet hyperbolic are replaced by the
    smallest power that is, capped; the power multiplies the word.  With
    jobs > 1 the per-word work is spread over a thread pool; the list order
    (and hence every downstream result) is the enumeration order either way.
    """
    sign_of = _sign_function(spec)
    items = [(word, m) for word, m in spec.words(max_len) if word.length > 0]
    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(
                lambda it: _sign_candidate(spec, sign_of, it[0], it[1], power_cap),
                items))
    else:
        results = [_sign_candidate(spec, sign_of, w, m, power_cap)
                   for w, m in items]
    return [r for r in results if r is not None]


def _sign_function(spec):
    if spec.form is not None:
        return lambda m: margulis_alpha(m, spec.form).alpha
    if spec.product_split is not None:
        return lambda m: extended_alpha(m, spec.product_split).alpha
    raise ValueError("sign search needs a declared form or product splitting")


def opposite_sign_search(spec, max_len, power_cap=MAX_POWER_BOOST,
                         trans_floor=TRANSVERSAL_FLOOR, jobs=1):
    """Search the word ball for a transversal pair with opposite signs.

    Candidates are scanned in length-lexicographic order and the first
    admissible pair (ordered by the later word, then the earlier) is
    returned, so the result is deterministic and minimal; parallel runs
    merge into the same order.  Returns None when no pair exists within
    the budget.
    """
    cands = _hyperbolic_candidates(spec, max_len, power_cap=power_cap, jobs=jobs)
    pair = _first_opposite_pair(spec, cands, trans_floor)
    if pair is None:
        return None
    ci, cj = pair
    eps = transversality_of_splits(ci["profile"].split, cj["profile"].split)
    payload = {
        "alphas": [float(ci["alpha"]), float(cj["alpha"])],
        "transversality": float(eps),
    }
    payload.update(_sign_context(spec))
    return Certificate(
        kind="OppositeSignPair",
        words=[ci["word"].to_str(spec.names), cj["word"].to_str(spec.names)],
        maps=[_map_payload(ci["map"]), _map_payload(cj["map"])],
        witness=payload)


def _first_opposite_pair(spec, cands, trans_floor):
    """First (by later word, then earlier) opposite-sign transversal pair.

    In the 3-dimensional case the four cross separations reduce to inner
    products of lines against slab normals, so the whole pair table is one
    vectorized pass; the generic path scans pairs directly.
    """
    if not cands:
        return None
    if spec.dim == 3 and spec.form is not None:
        u_plus = np.array([c["profile"].split.a_plus.basis[:, 0] for c in cands])
        u_minus = np.array([c["profile"].split.a_minus.basis[:, 0] for c in cands])
        n_plus = np.array(
            [c["profile"].split.d_plus.orthogonal_complement().basis[:, 0]
             for c in cands])
        n_minus = np.array(
            [c["profile"].split.d_minus.orthogonal_complement().basis[:, 0]
             for c in cands])
        alphas = np.array([c["alpha"] for c in cands])
        # distance from a line to a plane is |cos| of the angle to the normal
        eps_mat = np.minimum.reduce([
            np.abs(u_plus @ n_minus.T),      # A+(g_i) vs D-(g_j)
            np.abs(u_minus @ n_plus.T),      # A-(g_i) vs D+(g_j)
            np.abs(u_plus @ n_minus.T).T,    # A+(g_j) vs D-(g_i)
            np.abs(u_minus @ n_plus.T).T,    # A-(g_j) vs D+(g_i)
        ])
        shared = (np.abs(u_plus @ u_plus.T) > 1.0 - 1e-12) | \
                 (np.abs(u_minus @ u_minus.T) > 1.0 - 1e-12)
        admissible = (eps_mat > trans_floor) & ~shared & \
                     (np.outer(alphas, alphas) < 0)
        for j in range(len(cands)):
            hits = np.flatnonzero(admissible[:j, j])
            if hits.size:
                return cands[int(hits[0])], cands[j]
        return None
    for j in range(len(cands)):
        cj = cands[j]
        for i in range(j):
            ci = cands[i]
            if ci["alpha"] * cj["alpha"] >= 0:
                continue
            eps = transversality_of_splits(ci["profile"].split, cj["profile"].split)
            if eps > trans_floor:
                return ci, cj
    return None


def _sign_context(spec):
    """Serialized form/product data a sign certificate can be re-checked with."""
    if spec.form is not None:
        return {"form": {"p": spec.form.p, "q": spec.form.q,
                         "basis": spec.form.basis.tolist()}}
    return {"product_split": {
        "v1": spec.product_split.v1.basis.tolist(),
        "v2": spec.product_split.v2.basis.tolist(),
        "form_p": spec.product_split.form_on_v1.p,
        "form_q": spec.product_split.form_on_v1.q,
        "form_basis": spec.product_split.form_on_v1.basis.tolist(),
    }}


def _sign_context_function(witness):
    if "form" in witness:
        f = witness["form"]
        form = QuadraticForm(f["p"], f["q"], basis=np.array(f["basis"]))
        return lambda m: margulis_alpha(m, form).alpha
    ps = witness["product_split"]
    psplit = ProductSplit(Subspace(np.array(ps["v1"])), Subspace(np.array(ps["v2"])),
                          QuadraticForm(ps["form_p"], ps["form_q"],
                                        basis=np.array(ps["form_basis"])))
    return lambda m: extended_alpha(m, psplit).alpha


# ---------------------------------------------------------------------------
# the ball-intersection witness


def _oblique_fixed_component(m, z):
    """Component of z in ker(m - I) along im(m - I)."""
    n = m.shape[0]
    fix = kernel(m - np.eye(n))
    if fix.is_trivial():
        return np.zeros(n)
    image = Subspace.from_spanning(m - np.eye(n))
    stacked = np.hstack([fix.basis, image.basis])
    coeffs, *_ = np.linalg.lstsq(stacked, z, rcond=None)
    return fix.basis @ coeffs[:fix.dim]


def _shared_axis(axis_g, axis_h):
    tg, th = axis_g.direction, axis_h.direction
    if proj_dist(tg, th) > 1e-9:
        return False
    scale = max(1.0, np.linalg.norm(axis_g.base_point), np.linalg.norm(axis_h.base_point))
    offset = axis_h.base_point - axis_g.base_point
    u = tg / np.linalg.norm(tg)
    off_axis = offset - np.dot(offset, u) * u
    return np.linalg.norm(off_axis) <= 1e-8 * scale


def nonproper_witness(g, h, sign_data=None, n_max=200, radius=1.0, names=None):
    """Ball-intersection witness for a transversal pair.

    Constructs the connecting line between the non-contracting slab of g
    and the non-expanding slab of h, a march vector compatible with both
    axis translations, and the two limit points; every exponent n for which
    g^-n x_n and h^n x_n land in the radius-balls around the limit points
    is recorded with its witness point y_n.  The certificate re-checks by
    plain matrix arithmetic: || h^n g^n y_n - p2 || < radius.

    A pair sharing its invariant axis cannot carry the construction and is
    reported as its own certificate kind.
    """
    if maps_close(g, h):
        raise NotTransversal("identical elements are never transversal")
    pg, ph = profile(g), profile(h)
    axis_g = invariant_axis(g, split=pg.split)
    axis_h = invariant_axis(h, split=ph.split)
    words = [g.name or "g", h.name or "h"]
    if _shared_axis(axis_g, axis_h):
        return Certificate(
            kind="AxesIntersect",
            words=words,
            maps=[_map_payload(g), _map_payload(h)],
            witness={
                "base_point": axis_g.base_point.tolist(),
                "direction": axis_g.direction.tolist(),
            })
    eps = transversality(g, h, profiles=(pg, ph))
    if eps <= 0.0:
        raise NotTransversal("the pair is not transversal")
    if sign_data is not None:
        alphas = sign_data.get("alphas")
        if alphas is not None and alphas[0] * alphas[1] >= 0:
            raise ValueError("signed witness mode needs opposite signs")

    tg, th = axis_g.direction, axis_h.direction
    n_dim = g.dim
    plus_g = pg.split.a_plus.basis
    minus_h = ph.split.a_minus.basis
    # march vector: v = t_g + (expanding of g) a = -t_h + (contracting of h) b
    system = np.hstack([plus_g, -minus_h])
    coeffs, *_ = np.linalg.lstsq(system, -(tg + th), rcond=None)
    v = tg + plus_g @ coeffs[:plus_g.shape[1]]

    # base point on the connecting line: (base_g + D+(g)) meet (base_h + D-(h))
    dg = pg.split.d_plus.basis
    dh = ph.split.d_minus.basis
    coeffs, *_ = np.linalg.lstsq(np.hstack([dg, -dh]),
                                 axis_h.base_point - axis_g.base_point, rcond=None)
    p = axis_g.base_point + dg @ coeffs[:dg.shape[1]]

    p1 = axis_g.base_point + _oblique_fixed_component(g.linear, p - axis_g.base_point)
    p2 = axis_h.base_point + _oblique_fixed_component(h.linear, p - axis_h.base_point)

    g_inv = g.inverse()
    back = identity(n_dim)
    forward = identity(n_dim)
    verified = []
    for n in range(1, n_max + 1):
        back = compose(back, g_inv)
        forward = compose(forward, h)
        if np.max(np.abs(forward.linear)) > 1e280 or np.max(np.abs(back.linear)) > 1e280:
            break
        x_n = p + n * v
        y_n = back(x_n)
        d1 = float(np.linalg.norm(y_n - p1))
        d2 = float(np.linalg.norm(forward(x_n) - p2))
        if d1 < radius and d2 < radius:
            # only emit exponents the independent checker arithmetic
            # (binary powers applied to the stored point) confirms; the
            # accumulated-composition estimate is slightly different
            d_check = float(np.linalg.norm(h.power(n)(g.power(n)(y_n)) - p2))
            if d_check < radius:
                verified.append({"n": n, "y": y_n.tolist(), "dist_start": d1,
                                 "dist_image": d_check})
    if not verified:
        raise NoVerifiedN(f"no exponent up to {n_max} passed the ball check")
    return Certificate(
        kind="BallIntersectionWitness",
        words=words,
        maps=[_map_payload(g), _map_payload(h)],
        witness={
            "radius": radius,
            "march_point": p.tolist(),
            "march_vector": v.tolist(),
            "p1": p1.tolist(),
            "p2": p2.tolist(),
            "transversality": float(eps),
            "sign_data": sign_data,
            "verified": verified,
        })


# ---------------------------------------------------------------------------
# evidence scans


def _ellipsoid_ball_distance(linear, offset, radius, tol=1e-12):
    """Distance from the affine ball image {offset + linear z : |z| <= r}
    to the origin-centered r-ball, exactly via the trust-region problem."""
    u, s, vt = np.linalg.svd(linear)
    beta = u.T @ offset
    with np.errstate(divide="ignore", over="ignore"):
        z_free = beta / s
    if np.all(np.isfinite(z_free)) and np.linalg.norm(z_free) <= radius:
        return 0.0

    def z_norm(mu):
        return float(np.linalg.norm(s * beta / (s * s + mu)))

    lo, hi = 0.0, max(1.0, float(np.max(s) * np.linalg.norm(offset) / radius))
    while z_norm(hi) > radius:
        hi *= 2.0
        if hi > 1e300:
            break
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if z_norm(mid) > radius:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * max(1.0, hi):
            break
    mu = 0.5 * (lo + hi)
    z = -vt.T @ (s * beta / (s * s + mu))
    value = float(np.linalg.norm(offset + linear @ z))
    return max(0.0, value - radius)


def proper_scan(spec, center, radius, max_len, dist_tol=1e-9):
    """Evidence scan: which words return the ball K to itself.

    A coarse displacement bound filters words first; survivors get the
    exact ellipsoid-to-ball distance.  The return set and its growth by
    word length are evidence only: an empty scan never proves properness.
    """
    center = np.asarray(center, dtype=float)
    returns = []
    counts = {}
    total = 0
    for word, m in spec.words(max_len):
        total += 1
        offset = m(center) - center
        opnorm = float(np.linalg.norm(m.linear, 2))
        coarse = float(np.linalg.norm(offset)) - radius * (1.0 + opnorm)
        if coarse > 0.0:
            continue
        dist = _ellipsoid_ball_distance(m.linear, offset, radius)
        if dist <= dist_tol:
            m.name = word.to_str(spec.names)
            returns.append({"word": m.name, "length": word.length,
                            "map": _map_payload(m), "distance": float(dist)})
            counts[word.length] = counts.get(word.length, 0) + 1
    return Certificate(
        kind="EvidenceScan",
        words=[r["word"] for r in returns],
        maps=[r["map"] for r in returns],
        witness={
            "center": center.tolist(),
            "radius": radius,
            "max_len": max_len,
            "words_scanned": total,
            "returns": returns,
            "returns_by_length": {str(k): v for k, v in sorted(counts.items())},
        })


@dataclass
class DirectionSample:
    """Asymptotic displacement directions realized on a compact ball."""

    center: np.ndarray
    radius: float
    directions: list


def direction_set_estimate(spec, center, radius, max_len, samples=8, seed=0,
                           angle_tol=1e-2):
    """Estimate the displacement-direction set of the word ball on K.

    For each enumerated word and sampled point x in K with displacement
    above 10 radii, the unit displacement direction is recorded; directions
    within the angular tolerance of an already recorded one are merged.
    """
    center = np.asarray(center, dtype=float)
    rng = np.random.default_rng(seed)
    points = [center]
    for _ in range(samples - 1):
        u = rng.standard_normal(spec.dim)
        points.append(center + radius * u / np.linalg.norm(u))
    directions = []
    for word, m in spec.words(max_len):
        if word.length == 0:
            continue
        for x in points:
            d = m(x) - x
            norm = np.linalg.norm(d)
            if norm <= 10.0 * radius:
                continue
            u = d / norm
            if any(np.arccos(np.clip(np.dot(u, e["direction"]), -1.0, 1.0)) <= angle_tol
                   for e in directions):
                continue
            directions.append({"direction": u, "word": word.to_str(spec.names),
                               "displacement": float(norm)})
    return DirectionSample(center=center, radius=radius, directions=directions)


# ---------------------------------------------------------------------------
# four-element configurations and the product gadget


def _so21_part(spec, m):
    """The 3x3 block an element acts by on the (2,1) factor."""
    if spec.product_split is not None:
        return product_blocks(m.linear, spec.product_split)[0]
    if spec.form is not None and spec.dim == 3:
        return m.linear
    raise ValueError("needs a 3-dimensional form or a product splitting")


def _so21_form(spec):
    if spec.product_split is not None:
        return spec.product_split.form_on_v1
    return spec.form


def four_transversal_config(spec, max_len, cone_margin=1e-6,
                            trans_floor=1e-3):
    """Four pairwise transversal hyperbolic elements whose attracting-plane
    sums intersect inside the negative cone.

    Greedily accumulates mutually transversal hyperbolic elements of the
    (2,1) factor, then tries the three pairings of four elements; an
    ordering is returned when the intersection line of the two plane sums
    is strictly B-negative.  None on budget exhaustion.
    """
    form = _so21_form(spec)
    picked = []
    for word, m in spec.words(max_len):
        if word.length == 0:
            continue
        try:
            block = _so21_part(spec, m)
            prof = profile(block)
        except AffineCertError:
            continue
        if not prof.hyperbolic or prof.split.dims() != (1, 1, 1):
            continue
        if not form.is_isometry(block):
            continue
        if all(transversality_of_splits(prof.split, q["profile"].split) > trans_floor
               for q in picked):
            m.name = word.to_str(spec.names)
            picked.append({"word": word, "map": m, "block": block, "profile": prof})
        if len(picked) == 4:
            break
    if len(picked) < 4:
        return None

    lines = [q["profile"].split.a_plus for q in picked]
    for pairing in (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))):
        (i, j), (k, l) = pairing
        plane1 = Subspace.from_spanning(np.hstack([lines[i].basis, lines[j].basis]))
        plane2 = Subspace.from_spanning(np.hstack([lines[k].basis, lines[l].basis]))
        if plane1.dim != 2 or plane2.dim != 2:
            continue
        inter = _subspace_intersection(plane1, plane2)
        if inter.dim != 1:
            continue
        vec = inter.basis[:, 0]
        if form.qform(vec) < -cone_margin * float(np.dot(vec, vec)):
            return {
                "elements": picked,
                "ordering": pairing,
                "cone_vector": vec,
                "cone_value": form.qform(vec),
            }
    return None


def _subspace_intersection(u, v):
    n = u.ambient_dim
    pu = np.eye(n) - u.basis @ u.basis.T
    pv = np.eye(n) - v.basis @ v.basis.T
    return kernel(pu + pv)


def _theta2_invariant_subspaces(block, tol=1e-7):
    """Eigenlines and eigenplanes of a 3x3 matrix with distinct real moduli."""
    eigvals, eigvecs = np.linalg.eig(block)
    if np.max(np.abs(eigvals.imag)) > tol * np.max(np.abs(eigvals)):
        return None
    order = np.argsort(-np.abs(eigvals.real))
    vecs = [np.real(eigvecs[:, i]) for i in order]
    mods = np.abs(eigvals.real[order])
    if mods[0] - mods[1] < tol * mods[0] or mods[1] - mods[2] < tol * mods[0]:
        return None
    lines = [Subspace.from_spanning(v) for v in vecs]
    planes = [Subspace.from_spanning(np.column_stack([vecs[i], vecs[j]]))
              for i, j in ((0, 1), (0, 2), (1, 2))]
    return lines, planes


def _shares_invariant_structure(inv1, inv2, tol=1e-4):
    lines1, planes1 = inv1
    lines2, planes2 = inv2
    for l1 in lines1:
        for l2 in lines2:
            if subspace_dist(l1, l2) < tol:
                return True
        for p2 in planes2:
            if subspace_dist(l1, p2) < tol:
                return True
    for l2 in lines2:
        for p1 in planes1:
            if subspace_dist(l2, p1) < tol:
                return True
    return False


def sign_gadget_build(spec, targets, delta, word_len=4, n_budget=24,
                      power_budget=24, mesh=400):
    """The preparation gadget for opposite-sign hunting in the product case.

    For each target element, a seed transversal to it on the (2,1) factor
    and sharing no invariant structure with it on the second factor is
    conjugated by powers of the target; three conjugates with trivially
    intersecting contracting planes on the second factor are boosted by a
    common auxiliary element until the six-condition check passes: closeness
    of the (2,1) contracting lines to the target plane, uniform
    hyperbolicity, uniform contraction below 1, contracting dimension 2 for
    the first set and 1 for the second, trivial triple intersection, and
    spanning triples of contracting lines.  The direction-separation
    constants are estimated over a mesh and divided by the standard safety
    factor of 100.
    """
    if spec.product_split is None:
        raise ValueError("the sign gadget needs the 6-dimensional product case")
    out = {"s_sets": [], "t_sets": []}
    eps_values = []
    s_values = []
    for target in targets:
        s_set = _gadget_set(spec, target, delta, want_dim=2, word_len=word_len,
                            n_budget=n_budget, power_budget=power_budget)
        t_set = _gadget_set(spec, target, delta, want_dim=1, word_len=word_len,
                            n_budget=n_budget, power_budget=power_budget)
        out["s_sets"].append(s_set)
        out["t_sets"].append(t_set)
        for entry in s_set + t_set:
            eps_values.append(entry["eps"])
            s_values.append(entry["s"])
    out["eps"] = min(eps_values)
    out["q"] = max(s_values)
    if out["q"] >= 1.0:
        raise BudgetExhausted("gadget elements failed to contract below 1")
    out["d_constants"] = _direction_constants(spec, out, mesh=mesh)
    return out


def _gadget_set(spec, target, delta, want_dim, word_len, n_budget, power_budget):
    psplit = spec.product_split
    t_map = target["map"]
    t_block1 = _so21_part(spec, t_map)
    t_split1 = spectral_split(t_block1)
    target_line = t_split1.a_plus
    t_inv2 = _theta2_invariant_subspaces(product_blocks(t_map.linear, psplit)[1])

    seed = _find_gadget_seed(spec, t_split1, t_inv2, want_dim, word_len)
    if seed is None:
        raise BudgetExhausted("no admissible seed element in the word ball")

    # conjugation by target powers drags the (2,1) contracting line onto the
    # target line; only delta/2-close conjugates are eligible for the triple
    conjugates = _conjugate_family(spec, t_map, target["word"], seed, n_budget)
    close = []
    for word, m in conjugates:
        try:
            b1, _ = product_blocks(m.linear, psplit)
            split1 = spectral_split(b1)
        except AffineCertError:
            continue
        if split1.a_minus.dim != 1:
            continue
        if subspace_dist(split1.a_minus, target_line) <= delta / 2:
            close.append((word, m))
    triples = _candidate_triples(spec, close, want_dim)
    if not triples:
        raise BudgetExhausted("no conjugate triple with independent contracting spaces")

    for triple in triples:
        aux = _find_auxiliary(spec, triple, word_len)
        if aux is None:
            continue
        entries = _power_until_conditions(spec, triple, aux, target_line, delta,
                                          want_dim, power_budget)
        if entries is not None:
            return entries
    raise BudgetExhausted("no power met the six gadget conditions")


def _power_until_conditions(spec, triple, aux, target_line, delta, want_dim,
                            power_budget):
    # each triple member matures at its own power; collect the first few
    # admissible powers per member and take the first combination whose
    # contracting spaces jointly pass
    per_member = []
    for word, m in triple:
        passing = []
        for n in range(1, power_budget + 1):
            pword = aux[0].power(n) * word.power(n)
            pm = compose(aux[1].power(n), m.power(n))
            pm.name = pword.to_str(spec.names)
            entry = _gadget_entry(spec, pword, pm, target_line, delta, want_dim)
            if entry is not None:
                passing.append(entry)
                if len(passing) == 3:
                    break
        if not passing:
            return None
        per_member.append(passing)
    for a in per_member[0]:
        for b in per_member[1]:
            for c in per_member[2]:
                if _triple_conditions(spec, [a, b, c], want_dim):
                    return [a, b, c]
    return None


def _find_gadget_seed(spec, t_split1, t_inv2, want_dim, word_len):
    """Admissible seed whose (2,1) contracting line starts closest to the
    target line: the closer the start, the fewer conjugations (and the less
    skew) the family needs."""
    best = None
    best_dist = np.inf
    for word, m in spec.words(word_len):
        if word.length == 0:
            continue
        try:
            b1, b2 = product_blocks(m.linear, spec.product_split)
            p1 = profile(b1)
            p2 = profile(b2)
        except AffineCertError:
            continue
        if not (p1.hyperbolic and p2.hyperbolic):
            continue
        if p2.split.a_minus.dim != want_dim:
            continue
        if transversality_of_splits(p1.split, t_split1) <= 1e-3:
            continue
        inv2 = _theta2_invariant_subspaces(b2)
        if inv2 is None or t_inv2 is None:
            continue
        if _shares_invariant_structure(inv2, t_inv2):
            continue
        dist = subspace_dist(p1.split.a_minus, t_split1.a_plus)
        if dist < best_dist:
            best, best_dist = (word, m), dist
    return best


def _conjugate_family(spec, t_map, t_word, seed, n_budget):
    seed_word, seed_map = seed
    out = []
    conj = identity(spec.dim)
    conj_inv = identity(spec.dim)
    t_inv = t_map.inverse()
    conj_word = Word(())
    for n in range(1, n_budget + 1):
        conj = compose(conj, t_map)
        conj_inv = compose(t_inv, conj_inv)
        conj_word = conj_word * t_word
        word = conj_word * seed_word * conj_word.inverse()
        m = compose(compose(conj, seed_map), conj_inv)
        out.append((word, m))
    return out


def _candidate_triples(spec, conjugates, want_dim, limit=6):
    """Conjugate triples with independent second-factor contracting spaces,
    smallest indices (least skew) first."""
    spaces = []
    for word, m in conjugates:
        try:
            _, b2 = product_blocks(m.linear, spec.product_split)
            split2 = spectral_split(b2)
        except AffineCertError:
            spaces.append(None)
            continue
        spaces.append(split2.a_minus if split2.a_minus.dim == want_dim else None)
    idx = [i for i, s in enumerate(spaces) if s is not None]
    out = []
    for a in range(len(idx)):
        for b in range(a + 1, len(idx)):
            for c in range(b + 1, len(idx)):
                chosen = [spaces[idx[a]], spaces[idx[b]], spaces[idx[c]]]
                if want_dim == 2 and not _planes_meet_trivially(chosen):
                    continue
                if want_dim == 1 and not _lines_span(chosen):
                    continue
                out.append([conjugates[idx[a]], conjugates[idx[b]], conjugates[idx[c]]])
                if len(out) >= limit:
                    return out
    return out


def _planes_meet_trivially(planes, tol=1e-6):
    normals = np.column_stack([p.orthogonal_complement().basis[:, 0] for p in planes])
    return np.linalg.svd(normals, compute_uv=False)[-1] > tol


def _lines_span(lines, tol=1e-6):
    stacked = np.column_stack([l.basis[:, 0] for l in lines])
    return np.linalg.svd(stacked, compute_uv=False)[-1] > tol


def _find_auxiliary(spec, triple, word_len, sep_tol=1e-3):
    """A hyperbolic word whose expanding/contracting spaces stay away from
    those of each conjugate (the conjugates themselves need not be
    hyperbolic; products restore that)."""
    splits = []
    for _, t in triple:
        try:
            splits.append(spectral_split(t.linear))
        except AffineCertError:
            return None
    for word, m in spec.words(word_len):
        if word.length == 0:
            continue
        try:
            prof = profile(m)
        except AffineCertError:
            continue
        if not prof.hyperbolic:
            continue
        sp = prof.split
        ok = True
        for st in splits:
            if st.a_minus.is_trivial() or st.a_plus.is_trivial():
                ok = False
                break
            if subspace_dist(sp.a_plus, st.a_minus) <= sep_tol or \
                    subspace_dist(sp.a_minus, st.a_plus) <= sep_tol:
                ok = False
                break
        if ok:
            return (word, m)
    return None


def _gadget_entry(spec, word, m, target_line, delta, want_dim):
    try:
        b1, b2 = product_blocks(m.linear, spec.product_split)
        p1 = profile(b1)
        p2 = profile(b2)
        p6 = profile(m)
    except AffineCertError:
        return None
    if not (p1.hyperbolic and p2.hyperbolic and not p6.degenerate):
        return None
    if p2.split.a_minus.dim != want_dim:
        return None
    if subspace_dist(p1.split.a_minus, target_line) >= delta:
        return None
    eps = min(p1.eps_hyperbolic, p2.eps_hyperbolic)
    s = max(p1.s, p2.s)
    if s >= 1.0:
        return None
    return {"word": word.to_str(spec.names), "map": m, "eps": float(eps),
            "s": float(s), "theta1_minus": p1.split.a_minus,
            "theta2_minus": p2.split.a_minus}


def _triple_conditions(spec, entries, want_dim):
    spaces = [e["theta2_minus"] for e in entries]
    if want_dim == 2:
        return _planes_meet_trivially(spaces)
    return _lines_span(spaces)


def _direction_constants(spec, gadget, mesh):
    """Mesh estimates of the summed separation infima, divided by 100."""
    v1 = spec.product_split.v1
    v2 = spec.product_split.v2
    s_entries = [e for group in gadget["s_sets"] for e in group]
    t_entries = [e for group in gadget["t_sets"] for e in group]
    d1_s = _min_over_lines(v1, [e["theta1_minus"] for e in s_entries], mesh)
    d1_t = _min_over_lines(v1, [e["theta1_minus"] for e in t_entries], mesh)
    d2_s = _min_over_lines(v2, [e["theta2_minus"] for e in s_entries], mesh)
    d2_t = _min_over_planes(v2, [e["theta2_minus"] for e in t_entries], mesh)
    return {"d1_s": d1_s / 100.0, "d1_t": d1_t / 100.0,
            "d2_s": d2_s / 100.0, "d2_t": d2_t / 100.0}


def _fibonacci_sphere(count):
    idx = np.arange(count, dtype=float) + 0.5
    phi = np.arccos(1.0 - 2.0 * idx / count)
    theta = np.pi * (1.0 + 5 ** 0.5) * idx
    return np.column_stack([np.cos(theta) * np.sin(phi),
                            np.sin(theta) * np.sin(phi), np.cos(phi)])


def _min_over_lines(factor, spaces, mesh):
    return _mesh_infimum(factor, spaces, mesh, as_plane=False)


def _min_over_planes(factor, spaces, mesh):
    return _mesh_infimum(factor, spaces, mesh, as_plane=True)


def _mesh_infimum(factor, spaces, mesh, as_plane, refine=3):
    """Infimum over the factor's lines (or planes, via their normals) of the
    summed distances to the given subspaces, by mesh plus local refinement."""

    def total(direction3):
        if as_plane:
            basis = _plane_from_normal(direction3)
            candidate = Subspace.from_spanning(factor.basis @ basis)
        else:
            candidate = Subspace.from_spanning(factor.basis @ direction3.reshape(3, 1))
        lifted = [Subspace.from_spanning(factor.basis @ s.basis) for s in spaces]
        return sum(subspace_dist(candidate, s) for s in lifted)

    grid = _fibonacci_sphere(mesh)
    values = np.array([total(d) for d in grid])
    best = grid[int(np.argmin(values))]
    best_val = float(np.min(values))
    step = 2.0 / np.sqrt(mesh)
    rng = np.random.default_rng(0)
    for _ in range(refine):
        for _ in range(64):
            cand = best + step * rng.standard_normal(3)
            cand /= np.linalg.norm(cand)
            val = total(cand)
            if val < best_val:
                best, best_val = cand, val
        step /= 4.0
    return best_val


def _plane_from_normal(normal):
    normal = normal / np.linalg.norm(normal)
    full = np.linalg.svd(normal.reshape(3, 1), full_matrices=True)[0]
    return full[:, 1:]


# ---------------------------------------------------------------------------
# built-in examples


def _boost21(param):
    c, s = np.cosh(param), np.sinh(param)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [s, 0.0, c]])


def _rot21(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


class DegenerateAngle(AffineCertError):
    """The rotation angle makes the two generators share their axes."""


def margulis3d_example(boost_param, angle, translation_scale):
    """The classical two-generator positive example in dimension 3.

    Both generators translate along their own invariant axes by the same
    positive amount measured against the oriented neutral vector, so no
    opposite-sign pair exists; at reasonable parameters the action is
    properly discontinuous and scans find an empty return set.
    """
    if boost_param <= 0:
        raise ValueError("boost parameter must be positive")
    if translation_scale <= 0:
        raise ValueError("translation scale must be positive")
    if min(abs(np.sin(angle)), 1.0) < 1e-9:
        raise DegenerateAngle("angle must differ from 0 and pi")
    form = QuadraticForm(2, 1)
    lin_a = _boost21(boost_param)
    lin_b = _rot21(angle) @ lin_a @ _rot21(-angle)
    split_a = spectral_split(lin_a)
    split_b = spectral_split(lin_b)
    v_a = oriented_neutral_vector(form, split_a.a_plus, split=split_a)
    v_b = oriented_neutral_vector(form, split_b.a_plus, split=split_b)
    a = AffineMap(lin_a, translation_scale * v_a, name="a")
    b = AffineMap(lin_b, translation_scale * v_b, name="b")
    return GroupSpec(dim=3, generators=[a, b],
                     ambient=AmbientGroup.so_pq(2, 1), form=form)


def opposite_sign_example(boost_param=None, translation_scale=1.0):
    """Two transversal hyperbolic isometries with opposite signs.

    The second generator is the conjugate by a quarter rotation of the
    first one's inverse-signed sibling, so the signs are +t and -t while
    the axes cross transversally.
    """
    if boost_param is None:
        boost_param = np.log(2.0)
    lin_a = _boost21(boost_param)
    rot = _rot21(np.pi / 2)
    a = AffineMap(lin_a, [0.0, translation_scale, 0.0], name="a")
    b = AffineMap(rot @ lin_a @ rot.T, rot @ [0.0, -translation_scale, 0.0], name="b")
    return GroupSpec(dim=3, generators=[a, b],
                     ambient=AmbientGroup.so_pq(2, 1), form=QuadraticForm(2, 1))


# ---------------------------------------------------------------------------
# independent re-checking


def check_certificate(cert, tol=1e-8):
    """Re-verify a certificate from its matrices alone.

    Returns (ok, messages).  Each kind has its own independent check:
    fixed points are re-applied, signs recomputed from scratch, ball
    intersections re-run by plain matrix powers, scan returns re-measured,
    and shared axes re-tested for invariance.
    """
    if isinstance(cert, dict):
        cert = Certificate(kind=cert["kind"], words=cert.get("words", []),
                           maps=cert.get("maps", []),
                           witness=cert.get("witness", {}))
    maps = [_payload_map(d) for d in cert.maps]
    messages = []

    if cert.kind == "FixedPointViolation":
        m = maps[0]
        p = np.array(cert.witness["fixed_point"])
        residual = np.linalg.norm(m(p) - p)
        ok = residual < tol
        messages.append(f"fixed point residual {residual:.3e}")
        gap = np.min(np.abs(np.linalg.eigvals(m.linear) - 1.0))
        ok = ok and gap > cert.witness["tol"]
        messages.append(f"eigenvalue gap {gap:.3e}")
        return ok, messages

    if cert.kind == "OppositeSignPair":
        sign_of = _sign_context_function(cert.witness)
        alphas = [sign_of(m) for m in maps]
        stated = cert.witness["alphas"]
        ok = all(abs(a - s) <= 1e-7 * max(1.0, abs(s))
                 for a, s in zip(alphas, stated))
        messages.append(f"recomputed alphas {alphas[0]:.6g}, {alphas[1]:.6g}")
        ok = ok and alphas[0] * alphas[1] < 0
        eps = transversality(maps[0], maps[1])
        messages.append(f"recomputed transversality {eps:.6g}")
        ok = ok and eps > 0
        return ok, messages

    if cert.kind == "BallIntersectionWitness":
        g, h = maps
        radius = cert.witness["radius"]
        p2 = np.array(cert.witness["p2"])
        ok = len(cert.witness["verified"]) > 0
        worst = 0.0
        for entry in cert.witness["verified"]:
            n = entry["n"]
            y = np.array(entry["y"])
            image = h.power(n)(g.power(n)(y))
            dist = float(np.linalg.norm(image - p2))
            worst = max(worst, dist)
            if dist >= radius:
                ok = False
                messages.append(f"n={n}: image misses the ball ({dist:.3e})")
        messages.append(
            f"{len(cert.witness['verified'])} exponents re-checked, worst distance {worst:.6g}")
        return ok, messages

    if cert.kind == "EvidenceScan":
        center = np.array(cert.witness["center"])
        radius = cert.witness["radius"]
        ok = True
        for entry in cert.witness["returns"]:
            m = _payload_map(entry["map"])
            dist = _ellipsoid_ball_distance(m.linear, m(center) - center, radius)
            if dist > 1e-6:
                ok = False
                messages.append(f"word '{entry['word']}' does not return ({dist:.3e})")
        messages.append(f"{len(cert.witness['returns'])} returns re-measured")
        return ok, messages

    if cert.kind == "AxesIntersect":
        base = np.array(cert.witness["base_point"])
        direction = np.array(cert.witness["direction"])
        ok = True
        for m in maps:
            for t in (0.0, 1.0):
                image = m(base + t * direction)
                offset = image - base
                u = direction / np.linalg.norm(direction)
                off_axis = np.linalg.norm(offset - np.dot(offset, u) * u)
                if off_axis > tol * max(1.0, np.linalg.norm(image)):
                    ok = False
                    messages.append(f"map does not preserve the axis ({off_axis:.3e})")
        messages.append("shared axis invariance re-checked")
        return ok, messages

    return False, [f"unknown certificate kind '{cert.kind}'"]
