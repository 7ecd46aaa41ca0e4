"""Dirac structures on patches: frames of generalized sections, the Courant
bracket, pullback, gauge transform, and the leafwise 2-form."""

from __future__ import annotations

from fractions import Fraction

from .calculus import DifferentialForm, Patch, SmoothMap, VectorField, _same_patch
from .errors import (
    DiracheckError,
    NotClosed,
    NotInOrbitDirection,
    NotSmoothSubbundle,
    PatchMismatch,
    PoleAtPoint,
    PoleAtSample,
    PrerequisiteFailed,
)
from .lindirac import LinearDiracSpace, backward_image
from .linalg import (
    column_space_basis,
    columns_to_matrix,
    evaluate_matrix,
    kernel_basis,
    mat_rank,
    mat_shape,
    solve,
    span_equal,
)
from .report import CheckNode
from .scalar import ScalarExpr


class GeneralizedSection:
    """Element v + eta of the generalized tangent bundle."""

    __slots__ = ("patch", "vec", "cov")

    def __init__(self, patch: Patch, vec: VectorField, cov: DifferentialForm):
        _same_patch(patch, vec.patch)
        _same_patch(patch, cov.patch)
        if cov.degree != 1:
            raise DiracheckError("covector part must be a 1-form")
        self.patch = patch
        self.vec = vec
        self.cov = cov

    def pair(self, other: "GeneralizedSection") -> ScalarExpr:
        """<v + eta, w + zeta> = eta(w) + zeta(v)."""
        return self.cov.apply_1form(other.vec) + other.cov.apply_1form(self.vec)

    def __str__(self):
        return f"({self.vec}) + ({self.cov})"


class DiracStructure:
    """Frame of n generalized sections spanning L on an n-dimensional patch."""

    __slots__ = ("patch", "frame")

    def __init__(self, patch: Patch, frame):
        frame = tuple(frame)
        if len(frame) != patch.dim:
            raise DiracheckError(
                f"Dirac structure on {patch.name}: frame must have {patch.dim} sections")
        for s in frame:
            _same_patch(patch, s.patch)
        self.patch = patch
        self.frame = frame

    # -- canonical constructions ----------------------------------------------

    @classmethod
    def tangent(cls, patch: Patch) -> "DiracStructure":
        frame = []
        for i in range(patch.dim):
            comps = [ScalarExpr.one() if j == i else ScalarExpr.zero()
                     for j in range(patch.dim)]
            frame.append(GeneralizedSection(patch, VectorField(patch, comps),
                                            DifferentialForm.zero(patch, 1)))
        return cls(patch, frame)

    @classmethod
    def cotangent(cls, patch: Patch) -> "DiracStructure":
        frame = []
        for i in range(patch.dim):
            frame.append(GeneralizedSection(patch, VectorField.zero(patch),
                                            DifferentialForm.d_coord(patch, patch.coords[i])))
        return cls(patch, frame)

    @classmethod
    def from_two_form(cls, patch: Patch, omega: DifferentialForm) -> "DiracStructure":
        """Graph of a closed 2-form: sections (e_i, iota_{e_i} omega)."""
        if omega.degree != 2:
            raise DiracheckError("graph construction needs a 2-form")
        frame = []
        for i in range(patch.dim):
            comps = [ScalarExpr.one() if j == i else ScalarExpr.zero()
                     for j in range(patch.dim)]
            v = VectorField(patch, comps)
            frame.append(GeneralizedSection(patch, v, omega.interior(v)))
        return cls(patch, frame)

    @classmethod
    def from_bivector(cls, patch: Patch, P) -> "DiracStructure":
        """Graph of a bivector with matrix P[i][j] = pi(dx_i, dx_j)."""
        n = patch.dim
        frame = []
        for j in range(n):
            vec = VectorField(patch, [P[i][j] for i in range(n)])
            cov = DifferentialForm.d_coord(patch, patch.coords[j])
            frame.append(GeneralizedSection(patch, vec, cov))
        return cls(patch, frame)

    # -- matrices ----------------------------------------------------------------

    def matrix(self):
        """2n x n ScalarExpr matrix; column j is frame section j."""
        n = self.patch.dim
        rows = []
        for i in range(n):
            rows.append([s.vec.components[i] for s in self.frame])
        zero = ScalarExpr.zero()
        for i in range(n):
            rows.append([s.cov.coeffs.get((i,), zero) for s in self.frame])
        return rows

    def anchor_matrix(self):
        """n x n matrix of the vector parts (the anchor image)."""
        n = self.patch.dim
        return [[s.vec.components[i] for s in self.frame] for i in range(n)]

    def matrix_at(self, sample):
        return evaluate_matrix(self.matrix(), sample)


def courant_bracket(a: GeneralizedSection, b: GeneralizedSection) -> GeneralizedSection:
    """[V + eta, W + zeta] = [V,W] + L_V(zeta) - iota_W(d eta)."""
    _same_patch(a.patch, b.patch)
    vec = a.vec.bracket(b.vec)
    cov = b.cov.lie_derivative(a.vec).sub(a.cov.exterior_derivative().interior(b.vec))
    return GeneralizedSection(a.patch, vec, cov)


def _isotropy_entries(d: DiracStructure):
    """Yield ((i, j), residual) for every frame pair."""
    n = len(d.frame)
    for i in range(n):
        for j in range(i, n):
            yield (i, j), d.frame[i].pair(d.frame[j])


def check_dirac(d: DiracStructure, node_id: str = "check-dirac") -> CheckNode:
    """Isotropy (symbolic), rank (generic + samples), involutivity (symbolic)."""
    root = CheckNode(node_id, f"Dirac structure on {d.patch.name}")
    iso_bad = [(ij, r) for ij, r in _isotropy_entries(d) if not r.is_zero()]
    if iso_bad:
        (i, j), r = iso_bad[0]
        root.leaf("isotropy", "frame is isotropic", False,
                  residual=r, notes=f"pair ({i},{j}) of {len(iso_bad)} failures")
    else:
        root.leaf("isotropy", "frame is isotropic", True)

    rank_node = root.add(CheckNode("rank", "frame has full rank"))
    mat = d.matrix()
    n = d.patch.dim
    generic_ok = mat_rank(mat) == n
    rank_node.leaf("generic", "rank n at the generic point", generic_ok)
    sample_ok = True
    for k, s in enumerate(d.patch.samples):
        try:
            r = mat_rank(evaluate_matrix(mat, s))
        except PoleAtPoint:
            rank_node.leaf(f"sample-{k}", "rank n at sample", False,
                           witness=s, notes="pole at sample")
            sample_ok = False
            continue
        ok = r == n
        sample_ok = sample_ok and ok
        rank_node.leaf(f"sample-{k}", "rank n at sample", ok, witness=s if not ok else None)

    if iso_bad or not generic_ok or not sample_ok:
        root.skip("involutivity", "Courant involutivity", notes="prerequisite failed")
        return root
    root.add(check_involutive(d))
    return root


def check_involutive(d: DiracStructure, precheck: bool = False) -> CheckNode:
    """<[e_i, e_j], e_k> vanishes symbolically for all i<j and k.

    Valid test because L is maximal isotropic: the bracket lies in the span
    of the frame iff it pairs to zero against the frame.
    """
    if precheck:
        if any(not r.is_zero() for _, r in _isotropy_entries(d)):
            raise PrerequisiteFailed("isotropy fails")
        if mat_rank(d.matrix()) != d.patch.dim:
            raise PrerequisiteFailed("rank fails")
    node = CheckNode("involutivity", "Courant involutivity")
    n = len(d.frame)
    failures = []
    for i in range(n):
        for j in range(i + 1, n):
            br = courant_bracket(d.frame[i], d.frame[j])
            for k in range(n):
                resid = br.pair(d.frame[k])
                if not resid.is_zero():
                    failures.append(((i, j, k), resid))
    if failures:
        for (i, j, k), resid in failures:
            node.leaf(f"triple-{i}-{j}-{k}", f"<[e{i},e{j}],e{k}> = 0", False, residual=resid)
    else:
        node.leaf("all-triples", "all bracket pairings vanish", True)
    return node


def pullback_dirac(f: SmoothMap, L: DiracStructure):
    """Backward image f*L computed at the generic point.

    Returns (DiracStructure on f.source, CheckNode).  Raises
    NotSmoothSubbundle when the produced frame drops rank at a source sample
    and PoleAtSample when a produced coefficient has a pole there.
    """
    if f.target.coords != L.patch.coords:
        raise PatchMismatch("Dirac structure does not live on the map's target")
    src, tgt = f.source, f.target
    assignment = dict(zip(tgt.coords, f.components))
    lmat = [[e.substitute(assignment) for e in row] for row in L.matrix()]
    A = f.jacobian()
    lin = backward_image(LinearDiracSpace(tgt.dim, lmat), A)
    node = CheckNode("pullback", f"pullback of {L.patch.name} Dirac along {f.source.name}->{f.target.name}")
    trans = node.add(CheckNode("transversality", "map transverse to the orbits (at samples)"))
    for k, s in enumerate(src.samples):
        img = f.image_of(s)
        a_at = evaluate_matrix(A, s)
        vec_at = evaluate_matrix([[e.substitute(assignment) for e in row]
                                  for row in L.anchor_matrix()], s)
        joined = [a_at[i] + vec_at[i] for i in range(tgt.dim)]
        trans.leaf(f"sample-{k}", "rank[df | anchor] = dim target", mat_rank(joined) == tgt.dim,
                   witness=s if mat_rank(joined) != tgt.dim else None)
    frame = []
    basis = lin.basis
    n = src.dim
    for j in range(n):
        vec = VectorField(src, [basis[i][j] for i in range(n)])
        cov = DifferentialForm(src, 1, {(i,): basis[n + i][j] for i in range(n)})
        frame.append(GeneralizedSection(src, vec, cov))
    out = DiracStructure(src, frame)
    rank_node = node.add(CheckNode("rank", "pulled-back frame keeps rank n"))
    for k, s in enumerate(src.samples):
        try:
            r = mat_rank(evaluate_matrix(basis, s))
        except PoleAtPoint:
            raise PoleAtSample(f"pulled-back frame has a pole at sample {s}")
        if r != n:
            raise NotSmoothSubbundle(
                f"pulled-back frame has rank {r} < {n} at sample {s}")
        rank_node.leaf(f"sample-{k}", "rank n at sample", True)
    return out, node


def gauge_transform(L: DiracStructure, beta: DifferentialForm) -> DiracStructure:
    """L + beta: each section v + eta becomes v + (eta + iota_v beta)."""
    _same_patch(L.patch, beta.patch)
    if beta.degree != 2:
        raise DiracheckError("gauge transform needs a 2-form")
    if not beta.exterior_derivative().is_zero():
        raise NotClosed("gauge 2-form is not closed")
    frame = [GeneralizedSection(L.patch, s.vec, s.cov.add(beta.interior(s.vec)))
             for s in L.frame]
    return DiracStructure(L.patch, frame)


def dirac_equal_generic(L1: DiracStructure, L2: DiracStructure) -> bool:
    _same_patch(L1.patch, L2.patch)
    return span_equal(L1.matrix(), L2.matrix())


def dirac_equality_report(node: CheckNode, L1: DiracStructure, L2: DiracStructure,
                          title: str = "Dirac structures agree"):
    """Append generic + per-sample subspace-equality leaves under node."""
    eq = node.add(CheckNode("equality", title))
    eq.leaf("generic", "subspace equality at the generic point",
            dirac_equal_generic(L1, L2))
    m1, m2 = L1.matrix(), L2.matrix()
    for k, s in enumerate(L1.patch.samples):
        try:
            ok = span_equal(evaluate_matrix(m1, s), evaluate_matrix(m2, s))
        except PoleAtPoint:
            eq.leaf(f"sample-{k}", "subspace equality at sample", False,
                    witness=s, notes="pole at sample")
            continue
        eq.leaf(f"sample-{k}", "subspace equality at sample", ok,
                witness=s if not ok else None)
    return eq


def leaf_two_form_at_point(L: DiracStructure, x, v, w) -> Fraction:
    """omega^O(v, w) = eta(w) for any eta with v + eta in L_x.

    v, w are rational tangent vectors at the sample point x; both must lie in
    the anchor image of L_x.
    """
    n = L.patch.dim
    basis = L.matrix_at(x)
    vec_block = basis[:n]
    cov_block = basis[n:]
    v = [Fraction(c) for c in v]
    w = [Fraction(c) for c in w]
    cv = solve(vec_block, v)
    if cv is None:
        raise NotInOrbitDirection("v is not tangent to the orbit directions at x")
    cw = solve(vec_block, w)
    if cw is None:
        raise NotInOrbitDirection("w is not tangent to the orbit directions at x")
    def eta_of(coeffs):
        return [sum((cov_block[i][j] * coeffs[j] for j in range(n)), Fraction(0))
                for i in range(n)]
    eta = eta_of(cv)
    value = sum((eta[i] * w[i] for i in range(n)), Fraction(0))
    # well-definedness: eta is unique up to ker(vec_block), which pairs to zero
    # with w by isotropy; confirm against one alternative solution if any.
    for kvec in kernel_basis(vec_block):
        eta2 = eta_of([a + b for a, b in zip(cv, kvec)])
        value2 = sum((eta2[i] * w[i] for i in range(n)), Fraction(0))
        if value2 != value:
            raise DiracheckError("leafwise 2-form is not well defined at x")
        break
    return value


def contains_section_generic(L: DiracStructure, sec: GeneralizedSection) -> bool:
    """Membership of a generalized section in L at the generic point."""
    mat = L.matrix()
    n = L.patch.dim
    target = [sec.vec.components[i] for i in range(n)] + \
             [sec.cov.coeffs.get((i,), ScalarExpr.zero()) for i in range(n)]
    aug = [row + [target[i]] for i, row in enumerate(mat)]
    return mat_rank(aug) == mat_rank(mat)
