"""Lie algebroids in coordinates, IM 2-forms, D-Lie algebroids, pullback
algebroids, and the computable weak-equivalence conditions."""

from __future__ import annotations

from fractions import Fraction

from .calculus import DifferentialForm, Patch, SmoothMap, VectorField
from .category import DManMorphism, check_morphism
from .dirac import DiracStructure, GeneralizedSection, courant_bracket
from .errors import (
    DiracheckError,
    FrameDoesNotSpan,
    NoSolution,
    NonUnique,
    NotTransverse,
    PrerequisiteFailed,
)
from .groupoid import DLieGroupoid, _forms_equal_leaf
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
from .report import ATTESTED, UNATTESTED, CheckNode
from .scalar import ScalarExpr


class AlgebroidPresentation:
    """Anchor and structure functions of a rank-r algebroid over a patch.

    structure maps (i, j) -> tuple of r coefficients of [e_i, e_j]; missing
    pairs default to zero, reversed pairs to the negated entry.
    """

    def __init__(self, base: Patch, rank: int, anchors, structure: dict | None = None,
                 name: str = "algebroid"):
        anchors = tuple(anchors)
        if len(anchors) != rank:
            raise DiracheckError("need one anchor vector field per frame element")
        for v in anchors:
            if v.patch.coords != base.coords:
                raise DiracheckError("anchor fields must live on the base")
        self.base = base
        self.rank = rank
        self.anchors = anchors
        self.structure = {k: tuple(v) for k, v in (structure or {}).items()}
        self.name = name
        for (i, j), cs in self.structure.items():
            if not (0 <= i < rank and 0 <= j < rank):
                raise DiracheckError("structure-function index out of range")
            if len(cs) != rank:
                raise DiracheckError("structure functions need one entry per frame element")

    def bracket_coeffs(self, i: int, j: int):
        """Coefficients of [e_i, e_j] in the frame."""
        if (i, j) in self.structure:
            return list(self.structure[(i, j)])
        if (j, i) in self.structure:
            return [-c for c in self.structure[(j, i)]]
        return [ScalarExpr.zero()] * self.rank

    def anchor_matrix(self):
        """dim x rank matrix whose column i is the anchor of e_i."""
        return [[self.anchors[i].components[c] for i in range(self.rank)]
                for c in range(self.base.dim)]


def check_algebroid(a: AlgebroidPresentation, node_id: str = "check-algebroid") -> CheckNode:
    """Antisymmetry, anchor-bracket compatibility, Jacobi identity."""
    root = CheckNode(node_id, f"Lie algebroid axioms for {a.name}")
    anti_ok = True
    for (i, j), cs in a.structure.items():
        if i == j:
            if any(not c.is_zero() for c in cs):
                root.leaf("antisymmetry", "c_ii = 0", False, notes=f"pair ({i},{i})")
                anti_ok = False
                break
        elif (j, i) in a.structure:
            if any(not (x + y).is_zero()
                   for x, y in zip(a.structure[(i, j)], a.structure[(j, i)])):
                root.leaf("antisymmetry", "c_ij = -c_ji", False, notes=f"pair ({i},{j})")
                anti_ok = False
                break
    if anti_ok:
        root.leaf("antisymmetry", "structure functions are antisymmetric", True)

    anchor_node = root.add(CheckNode("anchor", "anchor respects the bracket"))
    for i in range(a.rank):
        for j in range(i + 1, a.rank):
            lie = a.anchors[i].bracket(a.anchors[j])
            cs = a.bracket_coeffs(i, j)
            combo = VectorField.zero(a.base)
            for k in range(a.rank):
                combo = combo.add(a.anchors[k].scale(cs[k]))
            diff = [x - y for x, y in zip(combo.components, lie.components)]
            bad = next((d for d in diff if not d.is_zero()), None)
            anchor_node.leaf(f"pair-{i}-{j}", f"rho[e{i},e{j}] = [rho e{i}, rho e{j}]",
                             bad is None, residual=bad)

    jac_node = root.add(CheckNode("jacobi", "Jacobi identity on frame triples"))
    for i in range(a.rank):
        for j in range(i + 1, a.rank):
            for k in range(j + 1, a.rank):
                bad = None
                for m in range(a.rank):
                    total = ScalarExpr.zero()
                    for (p, q, r) in ((i, j, k), (j, k, i), (k, i, j)):
                        cqr = a.bracket_coeffs(q, r)
                        total = total + a.anchors[p].apply_to(cqr[m])
                        cpm = [a.bracket_coeffs(p, l)[m] for l in range(a.rank)]
                        for l in range(a.rank):
                            total = total + cqr[l] * cpm[l]
                    if not total.is_zero():
                        bad = total
                        break
                jac_node.leaf(f"triple-{i}-{j}-{k}", "jacobiator vanishes", bad is None,
                              residual=bad)
    if a.rank < 2:
        anchor_node.leaf("trivial", "fewer than two frame elements", True)
    if a.rank < 3:
        jac_node.leaf("trivial", "fewer than three frame elements", True)
    return root


class IMForm:
    """The bundle map into the cotangent: one 1-form per frame element."""

    def __init__(self, forms):
        forms = tuple(forms)
        for f in forms:
            if f.degree != 1:
                raise DiracheckError("IM data must consist of 1-forms")
        self.forms = forms


class DLieAlgebroid:
    def __init__(self, algebroid: AlgebroidPresentation, base_dirac: DiracStructure,
                 im_form: IMForm):
        if len(im_form.forms) != algebroid.rank:
            raise DiracheckError("IM form needs one entry per frame element")
        if base_dirac.patch.coords != algebroid.base.coords:
            raise DiracheckError("base Dirac structure must live on the algebroid base")
        self.algebroid = algebroid
        self.base_dirac = base_dirac
        self.im_form = im_form

    def section(self, i: int) -> GeneralizedSection:
        """rho(e_i) + rho*(e_i) as a generalized section."""
        return GeneralizedSection(self.algebroid.base, self.algebroid.anchors[i],
                                  self.im_form.forms[i])


def check_im_form(d: DLieAlgebroid, node_id: str = "check-im-form") -> CheckNode:
    """Bracket compatibility of the IM form on all frame pairs:
    rho*([V,W]) = L_{rho V}(rho* W) - iota_{rho W}(d rho* V)."""
    root = CheckNode(node_id, "IM 2-form bracket compatibility")
    a = d.algebroid
    for i in range(a.rank):
        for j in range(a.rank):
            if i == j:
                continue
            cs = a.bracket_coeffs(i, j)
            lhs = DifferentialForm.zero(a.base, 1)
            for k in range(a.rank):
                lhs = lhs.add(d.im_form.forms[k].scale(cs[k]))
            rhs = d.im_form.forms[j].lie_derivative(a.anchors[i]).sub(
                d.im_form.forms[i].exterior_derivative().interior(a.anchors[j]))
            resid = lhs.sub(rhs)
            root.leaf(f"pair-{i}-{j}", f"compatibility on (e{i},e{j})", resid.is_zero(),
                      residual=None if resid.is_zero() else resid)
    if a.rank < 2:
        root.leaf("trivial", "fewer than two frame elements", True)
    return root


def check_dlie_algebroid(d: DLieAlgebroid, node_id: str = "check-dlie-algebroid") -> CheckNode:
    """Membership of rho + rho* in L_M and bracket compatibility of the
    induced map into the Dirac structure."""
    root = CheckNode(node_id, "D-Lie algebroid structure")
    a = d.algebroid
    L = d.base_dirac
    lmat = L.matrix()
    n = a.base.dim
    member = root.add(CheckNode("membership", "rho(e_i) + rho*(e_i) lies in L_M"))
    for i in range(a.rank):
        sec = d.section(i)
        target = list(sec.vec.components) + \
            [sec.cov.coeffs.get((c,), ScalarExpr.zero()) for c in range(n)]
        aug = [row + [target[r]] for r, row in enumerate(lmat)]
        ok = mat_rank(aug) == mat_rank(lmat)
        member.leaf(f"generic-{i}", f"e{i} image in L_M at the generic point", ok)
        for k, s in enumerate(a.base.samples):
            ok_s = mat_rank(evaluate_matrix(aug, s)) == mat_rank(evaluate_matrix(lmat, s))
            member.leaf(f"sample-{i}-{k}", f"e{i} image in L_M at sample", ok_s,
                        witness=s if not ok_s else None)
    bracket = root.add(CheckNode("bracket", "induced map respects brackets"))
    for i in range(a.rank):
        for j in range(i + 1, a.rank):
            br = courant_bracket(d.section(i), d.section(j))
            cs = a.bracket_coeffs(i, j)
            vec = VectorField.zero(a.base)
            cov = DifferentialForm.zero(a.base, 1)
            for k in range(a.rank):
                vec = vec.add(a.anchors[k].scale(cs[k]))
                cov = cov.add(d.im_form.forms[k].scale(cs[k]))
            vbad = next((x - y for x, y in zip(vec.components, br.vec.components)
                         if not (x - y).is_zero()), None)
            cresid = cov.sub(br.cov)
            ok = vbad is None and cresid.is_zero()
            bracket.leaf(f"pair-{i}-{j}", f"bracket image of (e{i},e{j})", ok,
                         residual=vbad if vbad is not None
                         else (None if cresid.is_zero() else cresid))
    if a.rank < 2:
        bracket.leaf("trivial", "fewer than two frame elements", True)
    return root


def derive_im_form_from_groupoid(g: DLieGroupoid, vertical,
                                 algebroid: AlgebroidPresentation):
    """Solve t* eta = iota_v Omega along units for each declared vertical
    frame field; returns (IMForm, CheckNode).

    The algebroid presentation supplies the expected anchor; the derived
    anchor dt(v) along units is checked against it.
    """
    root = CheckNode("derive-im-form", "IM form derived from the groupoid")
    p = g.presentation
    G, M = p.arrows, p.objects
    vertical = tuple(vertical)
    if len(vertical) != algebroid.rank:
        raise DiracheckError("need one vertical field per algebroid frame element")
    unit_assign = dict(zip(G.coords, p.u.components))
    omega = g.omega
    tjac = p.t.jacobian()          # dimM x dimG on G
    sjac = p.s.jacobian()
    t_at_units = [[e.substitute(unit_assign) for e in row] for row in tjac]
    s_at_units = [[e.substitute(unit_assign) for e in row] for row in sjac]

    vert = root.add(CheckNode("vertical", "declared fields are vertical along units"))
    vcols = []
    for idx, v in enumerate(vertical):
        v_at_units = [c.substitute(unit_assign) for c in v.components]
        vcols.append(v_at_units)
        ds_v = [sum((s_at_units[r][c] * v_at_units[c] for c in range(G.dim)),
                    ScalarExpr.zero()) for r in range(M.dim)]
        bad = next((x for x in ds_v if not x.is_zero()), None)
        vert.leaf(f"in-ker-ds-{idx}", f"ds(v{idx}) = 0 along units", bad is None,
                  residual=bad)
    vmat = columns_to_matrix(vcols, G.dim)
    vert.leaf("independent", "vertical frame is independent along units",
              mat_rank(vmat) == algebroid.rank)

    forms = []
    solve_node = root.add(CheckNode("solve", "t* eta = iota_v Omega along units"))
    anchor_node = root.add(CheckNode("anchor", "derived anchor matches the algebroid"))
    for idx, v in enumerate(vertical):
        one_form = omega.interior(v)
        rhs = [one_form.coeffs.get((c,), ScalarExpr.zero()).substitute(unit_assign)
               for c in range(G.dim)]
        # rows: G coordinates; unknowns: eta components on M
        T = [[t_at_units[j][c] for j in range(M.dim)] for c in range(G.dim)]
        rT = mat_rank(T)
        aug = [T[c] + [rhs[c]] for c in range(G.dim)]
        if mat_rank(aug) != rT:
            raise NoSolution(f"no covector eta solves t* eta = iota_v Omega for v{idx}")
        if rT != M.dim:
            raise NonUnique(f"t* does not determine eta uniquely for v{idx}")
        sol = solve(T, rhs)
        eta = DifferentialForm(M, 1, {(j,): sol[j] for j in range(M.dim)})
        forms.append(eta)
        solve_node.leaf(f"v{idx}", f"eta solved for v{idx}", True, notes=f"eta = {eta}")
        dt_v = [sum((t_at_units[r][c] * vcols[idx][c] for c in range(G.dim)),
                    ScalarExpr.zero()) for r in range(M.dim)]
        declared = algebroid.anchors[idx].components
        bad = next(((x - y) for x, y in zip(dt_v, declared) if not (x - y).is_zero()), None)
        anchor_node.leaf(f"v{idx}", f"dt(v{idx}) along units equals the declared anchor",
                         bad is None, residual=bad)
    return IMForm(forms), root


class AlgebroidMorphism:
    """Frame matrix F[j][i] (target index j, source index i) over the source
    base, covering a DMan morphism."""

    def __init__(self, matrix, base: DManMorphism):
        self.matrix = [list(row) for row in matrix]
        self.base = base


def check_algebroid_morphism(mor: AlgebroidMorphism, src, dst,
                             node_id: str = "check-algebroid-morphism") -> CheckNode:
    """Lie-algebroid morphism identities; the IM-compatibility identity is
    checked when both sides carry IM data."""
    src_alg = src.algebroid if isinstance(src, DLieAlgebroid) else src
    dst_alg = dst.algebroid if isinstance(dst, DLieAlgebroid) else dst
    root = CheckNode(node_id, "algebroid morphism")
    F = mor.matrix
    if len(F) != dst_alg.rank or any(len(r) != src_alg.rank for r in F):
        root.leaf("shape", "matrix has shape rank_target x rank_source", False)
        return root
    f = mor.base.map
    fjac = f.jacobian()
    assign = dict(zip(dst_alg.base.coords, f.components))

    anchor_node = root.add(CheckNode("anchor", "df o rho = rho' o F"))
    rho_b_at_f = [[dst_alg.anchors[j].components[c].substitute(assign)
                   for j in range(dst_alg.rank)] for c in range(dst_alg.base.dim)]
    for i in range(src_alg.rank):
        bad = None
        for c in range(dst_alg.base.dim):
            lhs = ScalarExpr.zero()
            for a_ in range(src_alg.base.dim):
                lhs = lhs + fjac[c][a_] * src_alg.anchors[i].components[a_]
            rhs = ScalarExpr.zero()
            for j in range(dst_alg.rank):
                rhs = rhs + F[j][i] * rho_b_at_f[c][j]
            if not (lhs - rhs).is_zero():
                bad = lhs - rhs
                break
        anchor_node.leaf(f"e{i}", f"anchor compatibility on e{i}", bad is None, residual=bad)

    br_node = root.add(CheckNode("bracket", "bracket compatibility with pullback sections"))
    for i in range(src_alg.rank):
        for j in range(i + 1, src_alg.rank):
            cs = src_alg.bracket_coeffs(i, j)
            bad = None
            for l in range(dst_alg.rank):
                lhs = ScalarExpr.zero()
                for k in range(src_alg.rank):
                    lhs = lhs + cs[k] * F[l][k]
                rhs = src_alg.anchors[i].apply_to(F[l][j]) - \
                    src_alg.anchors[j].apply_to(F[l][i])
                for k in range(dst_alg.rank):
                    for m_ in range(dst_alg.rank):
                        c_b = dst_alg.bracket_coeffs(k, m_)[l].substitute(assign)
                        rhs = rhs + F[k][i] * F[m_][j] * c_b
                if not (lhs - rhs).is_zero():
                    bad = lhs - rhs
                    break
            br_node.leaf(f"pair-{i}-{j}", f"bracket image of (e{i},e{j})", bad is None,
                         residual=bad)
    if src_alg.rank < 2:
        br_node.leaf("trivial", "fewer than two frame elements", True)

    root.add(check_morphism(mor.base, "base"))

    if isinstance(src, DLieAlgebroid) and isinstance(dst, DLieAlgebroid):
        im_node = root.add(CheckNode("im", "f* o rho'* o F = rho* + beta_flat"))
        beta = mor.base.gauge
        pulled = [dst.im_form.forms[j].pullback(f) for j in range(dst_alg.rank)]
        for i in range(src_alg.rank):
            lhs = DifferentialForm.zero(src_alg.base, 1)
            for j in range(dst_alg.rank):
                lhs = lhs.add(pulled[j].scale(F[j][i]))
            rhs = src.im_form.forms[i].add(beta.interior(src_alg.anchors[i]))
            resid = lhs.sub(rhs)
            im_node.leaf(f"e{i}", f"IM compatibility on e{i}", resid.is_zero(),
                         residual=None if resid.is_zero() else resid)
    return root


def pullback_algebroid(f: SmoothMap, B: AlgebroidPresentation, frame):
    """Pullback algebroid along f with a user-supplied spanning frame.

    frame entries are (coeffs, w): r_B functions on the source plus a source
    vector field with rho(sum coeffs e) = df(w).  Returns
    (AlgebroidPresentation, CheckNode)."""
    X = f.source
    if f.target.coords != B.base.coords:
        raise DiracheckError("map must land on the algebroid base")
    root = CheckNode("pullback-algebroid", f"pullback of {B.name} along {X.name}->{B.base.name}")
    assign = dict(zip(B.base.coords, f.components))
    fjac = f.jacobian()
    rho_at_f = [[B.anchors[j].components[c].substitute(assign) for j in range(B.rank)]
                for c in range(B.base.dim)]

    # transversality at samples
    trans = root.add(CheckNode("transversality", "f is transverse to the orbits"))
    all_trans = True
    for k, smp in enumerate(X.samples):
        dfx = evaluate_matrix(fjac, smp)
        rhox = evaluate_matrix(rho_at_f, smp)
        joined = [dfx[c] + rhox[c] for c in range(B.base.dim)]
        ok = mat_rank(joined) == B.base.dim
        all_trans = all_trans and ok
        trans.leaf(f"sample-{k}", "rank[df | rho] = dim base", ok,
                   witness=smp if not ok else None)
    if not all_trans:
        root.aggregate()
        raise NotTransverse("map is not transverse to the orbit distribution")

    expected = B.rank + X.dim - B.base.dim
    frame = [(list(cs), w) for cs, w in frame]
    member = root.add(CheckNode("membership", "frame satisfies rho(b) = df(w)"))
    cols = []
    for idx, (cs, w) in enumerate(frame):
        if len(cs) != B.rank:
            raise DiracheckError("frame coefficients must have one entry per B frame element")
        bad = None
        for c in range(B.base.dim):
            lhs = ScalarExpr.zero()
            for j in range(B.rank):
                lhs = lhs + cs[j] * rho_at_f[c][j]
            rhs = ScalarExpr.zero()
            for a_ in range(X.dim):
                rhs = rhs + fjac[c][a_] * w.components[a_]
            if not (lhs - rhs).is_zero():
                bad = lhs - rhs
                break
        member.leaf(f"el-{idx}", f"frame element {idx} lies in the fibered product",
                    bad is None, residual=bad)
        cols.append(cs + list(w.components))
    if len(frame) != expected:
        root.aggregate()
        raise FrameDoesNotSpan(f"need {expected} frame elements, got {len(frame)}")
    fmat = columns_to_matrix(cols, B.rank + X.dim)
    rank_ok = mat_rank(fmat) == expected
    # kernel comparison: the fibered product is the kernel of [rho o f | -df]
    sysm = [rho_at_f[c] + [-fjac[c][a_] for a_ in range(X.dim)]
            for c in range(B.base.dim)]
    ker = kernel_basis(sysm)
    span_ok = rank_ok and len(ker) == expected and \
        span_equal(fmat, columns_to_matrix(ker, B.rank + X.dim))
    root.leaf("spans", "frame spans the fibered product at the generic point", span_ok)
    if not span_ok:
        root.aggregate()
        raise FrameDoesNotSpan("frame does not span the fibered product")

    # induced bracket, expressed back in the frame
    structure = {}
    for i in range(expected):
        for j in range(i + 1, expected):
            ci, wi = frame[i]
            cj, wj = frame[j]
            ww = wi.bracket(wj)
            bb = []
            for l in range(B.rank):
                val = wi.apply_to(cj[l]) - wj.apply_to(ci[l])
                for k in range(B.rank):
                    for m_ in range(B.rank):
                        val = val + ci[k] * cj[m_] * B.bracket_coeffs(k, m_)[l].substitute(assign)
                bb.append(val)
            target = bb + list(ww.components)
            coeffs = solve(fmat, target)
            if coeffs is None:
                root.aggregate()
                raise FrameDoesNotSpan("bracket leaves the span of the frame")
            structure[(i, j)] = tuple(coeffs)

    anchors = [VectorField(X, frame[i][1].components) for i in range(expected)]
    out = AlgebroidPresentation(X, expected, anchors, structure,
                                name=f"{f.source.name}^!{B.name}")
    root.add(check_algebroid(out, "axioms"))
    return out, root


def check_weak_equivalence(mor: AlgebroidMorphism, src, dst, attestations: dict,
                           node_id: str = "check-weak-equivalence") -> CheckNode:
    """Computable conditions (b) transversality and (c) isotropy isomorphism,
    plus attestation entries for the orbit-space, monodromy and
    fundamental-group conditions."""
    src_alg = src.algebroid if isinstance(src, DLieAlgebroid) else src
    dst_alg = dst.algebroid if isinstance(dst, DLieAlgebroid) else dst
    root = CheckNode(node_id, "weak equivalence (computable conditions)")

    prereq = root.add(CheckNode("prerequisite", "underlying Lie-algebroid morphism"))
    morcheck = check_algebroid_morphism(mor, src_alg, dst_alg, "core")
    for child in morcheck.children:
        if child.id in ("anchor", "bracket"):
            prereq.add(child)

    f = mor.base.map
    fjac = f.jacobian()
    assign = dict(zip(dst_alg.base.coords, f.components))
    rho_b = [[dst_alg.anchors[j].components[c].substitute(assign)
              for j in range(dst_alg.rank)] for c in range(dst_alg.base.dim)]

    b_node = root.add(CheckNode("condition-b", "transversality at every sample"))
    for k, smp in enumerate(src_alg.base.samples):
        dfx = evaluate_matrix(fjac, smp)
        rhox = evaluate_matrix(rho_b, smp)
        joined = [dfx[c] + rhox[c] for c in range(dst_alg.base.dim)]
        ok = mat_rank(joined) == dst_alg.base.dim
        b_node.leaf(f"sample-{k}", "rank[df | rho'] = dim target base", ok,
                    witness=smp if not ok else None)

    c_node = root.add(CheckNode("condition-c", "isotropy algebras map isomorphically"))
    src_anchor = src_alg.anchor_matrix()
    for k, smp in enumerate(src_alg.base.samples):
        y = f.image_of(smp)
        ker_a = kernel_basis(evaluate_matrix(src_anchor, smp))
        ker_b = kernel_basis(evaluate_matrix(rho_b, smp))
        Fx = evaluate_matrix(mor.matrix, smp)
        dim_a, dim_b = len(ker_a), len(ker_b)
        if dim_a != dim_b:
            c_node.leaf(f"sample-{k}", "isotropy dimensions agree", False,
                        witness=smp, notes=f"kernel dimensions {dim_a} vs {dim_b}")
            continue
        images = []
        into = True
        rho_b_at_y = [[dst_alg.anchors[j].components[c].evaluate(y)
                       for j in range(dst_alg.rank)] for c in range(dst_alg.base.dim)]
        for a_vec in ker_a:
            img = [sum((Fx[j][i] * a_vec[i] for i in range(src_alg.rank)), Fraction(0))
                   for j in range(dst_alg.rank)]
            images.append(img)
            for c in range(dst_alg.base.dim):
                if sum((rho_b_at_y[c][j] * img[j] for j in range(dst_alg.rank)),
                       Fraction(0)) != 0:
                    into = False
        inj = (not images) or mat_rank(columns_to_matrix(images, dst_alg.rank)) == dim_a
        bracket_ok = True
        for ai in range(dim_a):
            for aj in range(ai + 1, dim_a):
                a_, b_ = ker_a[ai], ker_a[aj]
                br_a = [sum((a_[i] * b_[j] * src_alg.bracket_coeffs(i, j)[m].evaluate(smp)
                             for i in range(src_alg.rank) for j in range(src_alg.rank)),
                            Fraction(0)) for m in range(src_alg.rank)]
                lhs = [sum((Fx[l][m] * br_a[m] for m in range(src_alg.rank)), Fraction(0))
                       for l in range(dst_alg.rank)]
                fa, fb = images[ai], images[aj]
                rhs = [sum((fa[i] * fb[j] * dst_alg.bracket_coeffs(i, j)[l].evaluate(y)
                            for i in range(dst_alg.rank) for j in range(dst_alg.rank)),
                           Fraction(0)) for l in range(dst_alg.rank)]
                if lhs != rhs:
                    bracket_ok = False
        ok = into and inj and bracket_ok
        notes = None
        if not into:
            notes = "image leaves the isotropy algebra"
        elif not inj:
            notes = "isotropy map is not injective"
        elif not bracket_ok:
            notes = "fiber bracket is not intertwined"
        c_node.leaf(f"sample-{k}", "isotropy isomorphism at sample", ok,
                    witness=smp if not ok else None, notes=notes)

    for key, label in (("orbit-spaces", "condition-a: orbit-space homeomorphism"),
                       ("monodromy", "condition-d: monodromy-group isomorphism"),
                       ("fundamental-groups", "condition-e: fundamental-group isomorphism")):
        text = attestations.get(key) if attestations else None
        node = CheckNode(key, label, ATTESTED if text else UNATTESTED,
                         notes=text if text else "no attestation supplied")
        root.add(node)
    return root
