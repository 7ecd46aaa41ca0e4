"""Principal bundles and bibundles for D-Lie groupoids: action axioms,
multiplicativity, principality via division maps, pullback bundles, descent,
the bundle of a morphism, tensor products, and nondegeneracy."""

from __future__ import annotations

from .calculus import DifferentialForm, Patch, SmoothMap
from .category import DManMorphism
from .errors import DiracheckError, NotBasic, OverlapMismatch, PrerequisiteFailed
from .groupoid import Assembler, DLieGroupoid, DLieMorphism, _forms_equal_leaf, _maps_equal_leaf
from .linalg import evaluate_matrix, mat_rank
from .report import ATTESTED, CheckNode
from .scalar import ScalarExpr


class ActionChart:
    """Chart for a fibered action: two projections, the action map, and an
    assembler for building maps into the chart."""

    def __init__(self, chart: Patch, pr_left: SmoothMap, pr_right: SmoothMap,
                 act: SmoothMap, assembler: Assembler):
        self.chart = chart
        self.pr_left = pr_left
        self.pr_right = pr_right
        self.act = act
        self.assembler = assembler

    def pair(self, f: SmoothMap, g: SmoothMap) -> SmoothMap:
        return self.assembler.assemble([f, g], [self.pr_left, self.pr_right])


class TripleChart:
    """Chart with three projections (for associativity/commutation axioms)."""

    def __init__(self, chart: Patch, pr1: SmoothMap, pr2: SmoothMap, pr3: SmoothMap):
        self.chart = chart
        self.pr1 = pr1
        self.pr2 = pr2
        self.pr3 = pr3


class PairsChart:
    """Chart for the fibered square P x_N P with an assembler."""

    def __init__(self, chart: Patch, pr1: SmoothMap, pr2: SmoothMap, assembler: Assembler):
        self.chart = chart
        self.pr1 = pr1
        self.pr2 = pr2
        self.assembler = assembler

    def pair(self, f: SmoothMap, g: SmoothMap) -> SmoothMap:
        return self.assembler.assemble([f, g], [self.pr1, self.pr2])


class PrincipalBundle:
    """Left principal bundle data for a D-Lie groupoid."""

    def __init__(self, groupoid: DLieGroupoid, total: Patch, base: Patch,
                 sp: SmoothMap, tp: SmoothMap, sigma: DifferentialForm,
                 tau: DifferentialForm, action: ActionChart,
                 assoc: TripleChart | None = None, pairs: PairsChart | None = None,
                 division: SmoothMap | None = None, name: str = "bundle"):
        self.groupoid = groupoid
        self.total = total
        self.base = base
        self.sp = sp
        self.tp = tp
        self.sigma = sigma
        self.tau = tau
        self.action = action
        self.assoc = assoc
        self.pairs = pairs
        self.division = division
        self.name = name

    @property
    def omega(self) -> DifferentialForm:
        return self.tau.sub(self.sigma)


def _left_action_checks(root: CheckNode, b: PrincipalBundle):
    g = b.groupoid
    p = g.presentation
    A = b.action
    idP = SmoothMap.identity(b.total)

    charts = root.add(CheckNode("action-chart", "action chart is fibered over the objects"))
    _maps_equal_leaf(charts, "compat", "s o pr_G = t^P o pr_P",
                     A.pr_left.then(p.s), A.pr_right.then(b.tp))

    ax = root.add(CheckNode("action-axioms", "left action axioms"))
    _maps_equal_leaf(ax, "moment", "t^P(g.p) = t(g)", A.act.then(b.tp), A.pr_left.then(p.t))
    _maps_equal_leaf(ax, "invariance", "s^P(g.p) = s^P(p)",
                     A.act.then(b.sp), A.pr_right.then(b.sp))
    try:
        unit_pair = A.pair(b.tp.then(p.u), idP)
        _maps_equal_leaf(ax, "unit", "u(t^P(p)).p = p", unit_pair.then(A.act), idP)
    except DiracheckError as exc:
        ax.leaf("unit", "u(t^P(p)).p = p", False, notes=str(exc))
    if b.assoc is not None:
        try:
            c = b.assoc
            inner = A.pair(c.pr2, c.pr3).then(A.act)
            lhs = A.pair(c.pr1, inner).then(A.act)
            g12 = p.pair(c.pr1, c.pr2).then(p.g2.m)
            rhs = A.pair(g12, c.pr3).then(A.act)
            _maps_equal_leaf(ax, "associativity", "g1.(g2.p) = (g1 g2).p", lhs, rhs)
        except DiracheckError as exc:
            ax.leaf("associativity", "g1.(g2.p) = (g1 g2).p", False, notes=str(exc))
    else:
        ax.skip("associativity", "g1.(g2.p) = (g1 g2).p", notes="no triple chart supplied")

    forms = root.add(CheckNode("forms", "gauge data"))
    forms.leaf("sigma-closed", "sigma^P is closed", b.sigma.exterior_derivative().is_zero())
    forms.leaf("tau-closed", "tau^P is closed", b.tau.exterior_derivative().is_zero())
    _forms_equal_leaf(forms, "left-multiplicative",
                      "m_L* Omega^P = pr_G* Omega + pr_P* Omega^P",
                      b.omega.pullback(A.act),
                      g.omega.pullback(A.pr_left).add(b.omega.pullback(A.pr_right)))

    sub = root.add(CheckNode("submersion", "s^P is a submersion at samples"))
    jac = b.sp.jacobian()
    for k, smp in enumerate(b.total.samples):
        r = mat_rank(evaluate_matrix(jac, smp))
        sub.leaf(f"sample-{k}", "d s^P has full rank", r == b.base.dim,
                 witness=smp if r != b.base.dim else None)


def _principality_checks(root: CheckNode, b: PrincipalBundle):
    g = b.groupoid
    p = g.presentation
    A = b.action
    node = root.add(CheckNode("principality", "division-map principality"))
    if b.division is None or b.pairs is None:
        node.children.append(CheckNode(
            "attested", "principality", ATTESTED,
            notes="not verified constructively (no division map supplied)"))
        return
    d = b.division
    P2 = b.pairs
    _maps_equal_leaf(node, "pairs-chart", "s^P o pr1 = s^P o pr2",
                     P2.pr1.then(b.sp), P2.pr2.then(b.sp))
    _maps_equal_leaf(node, "moment-2", "s o d = t^P o pr2", d.then(p.s), P2.pr2.then(b.tp))
    _maps_equal_leaf(node, "moment-1", "t o d = t^P o pr1", d.then(p.t), P2.pr1.then(b.tp))
    try:
        orbit_pair = P2.pair(A.act, A.pr_right)
        _maps_equal_leaf(node, "left-inverse", "d(g.p, p) = g",
                         orbit_pair.then(d), A.pr_left)
        act_pair = A.pair(d, P2.pr2)
        _maps_equal_leaf(node, "right-inverse", "d(p, q).q = p",
                         act_pair.then(A.act), P2.pr1)
    except DiracheckError as exc:
        node.leaf("inverses", "division identities", False, notes=str(exc))


def check_principal_bundle(b: PrincipalBundle,
                           node_id: str = "check-bundle") -> CheckNode:
    root = CheckNode(node_id, f"principal bundle {b.name}")
    _left_action_checks(root, b)
    _principality_checks(root, b)
    return root


def unique_gauge(F: SmoothMap, b1: PrincipalBundle, b2: PrincipalBundle,
                 base_gauge: DifferentialForm) -> DifferentialForm:
    """The only possible gauge part of a bundle morphism:
    sigma^P1 - (s^P1)* beta - F* sigma^P2."""
    return b1.sigma.sub(base_gauge.pullback(b1.sp)).sub(b2.sigma.pullback(F))


def check_bundle_morphism(F: SmoothMap, gauge: DifferentialForm,
                          b1: PrincipalBundle, b2: PrincipalBundle,
                          base: DManMorphism,
                          node_id: str = "check-bundle-morphism") -> CheckNode:
    """Equivariance, source/target compatibility, and the gauge equations of
    a principal-bundle morphism covering the base morphism."""
    root = CheckNode(node_id, f"bundle morphism {b1.name} -> {b2.name}")
    _maps_equal_leaf(root, "source-compat", "s^P2 o F = f o s^P1",
                     F.then(b2.sp), b1.sp.then(base.map))
    _maps_equal_leaf(root, "target-compat", "t^P2 o F = t^P1",
                     F.then(b2.tp), b1.tp)
    try:
        FxF = b2.action.pair(b1.action.pr_left, b1.action.pr_right.then(F))
        _maps_equal_leaf(root, "equivariance", "F(g.p) = g.F(p)",
                         b1.action.act.then(F), FxF.then(b2.action.act))
    except DiracheckError as exc:
        root.leaf("equivariance", "F(g.p) = g.F(p)", False, notes=str(exc))
    beta = base.gauge
    _forms_equal_leaf(root, "gauge-source", "F* sigma2 + gauge = s^P1* beta + sigma1",
                      b2.sigma.pullback(F).add(gauge),
                      beta.pullback(b1.sp).add(b1.sigma))
    _forms_equal_leaf(root, "gauge-target", "F* tau2 + gauge = tau1",
                      b2.tau.pullback(F).add(gauge), b1.tau)
    _forms_equal_leaf(root, "characteristic", "F* Omega2 = Omega1 - s^P1* beta",
                      b2.omega.pullback(F), b1.omega.sub(beta.pullback(b1.sp)))
    formula = unique_gauge(F, b1, b2, beta)
    _forms_equal_leaf(root, "unique-gauge",
                      "gauge equals sigma1 - s^P1* beta - F* sigma2", gauge, formula)
    return root


def pullback_bundle(b: PrincipalBundle, f: DManMorphism, skeleton: PrincipalBundle,
                    pr_total: SmoothMap):
    """Pullback bundle along f on a user-supplied chart skeleton.

    The skeleton carries the charts and smooth maps of P x_{N2} N1; its
    forms are replaced by sigma = 0 and tau = pr_total* Omega^P + s^Q* beta.
    Returns (PrincipalBundle, CheckNode)."""
    if not b.sigma.is_zero():
        raise PrerequisiteFailed("pullback requires a target-aligned bundle; align first")
    root = CheckNode("pullback-bundle", f"pullback of {b.name} along the base morphism")
    _maps_equal_leaf(root, "fiber-chart", "s^P o pr_total = f o s^Q",
                     pr_total.then(b.sp), skeleton.sp.then(f.map))
    _maps_equal_leaf(root, "moment", "t^Q = t^P o pr_total",
                     skeleton.tp, pr_total.then(b.tp))
    beta = f.gauge
    omega_q = b.omega.pullback(pr_total).add(beta.pullback(skeleton.sp))
    Q = PrincipalBundle(b.groupoid, skeleton.total, skeleton.base, skeleton.sp,
                        skeleton.tp, DifferentialForm.zero(skeleton.total, 2),
                        omega_q, skeleton.action, skeleton.assoc, skeleton.pairs,
                        skeleton.division, name=f"{b.name}-pullback")
    root.add(check_principal_bundle(Q, "bundle"))
    proj_gauge = unique_gauge(pr_total, Q, b, beta)
    root.add(check_bundle_morphism(pr_total, proj_gauge, Q, b, f, "projection"))
    return Q, root


class GlueChart:
    """One chart of a descent datum: restriction patch sharing the global
    coordinates, with its local bundle and comparison map."""

    def __init__(self, name: str, bundle: PrincipalBundle, restrict: Patch,
                 phi: SmoothMap):
        self.name = name
        self.bundle = bundle
        self.restrict = restrict
        self.phi = phi


def glue_characteristic_form(global_total: Patch, charts, overlaps, triples=(),
                             morphisms=None):
    """Glue local characteristic forms along a cover (descent).

    charts: list of GlueChart whose restriction patches share the global
    coordinates.  overlaps: (a, b, patch) witnessing nonempty double
    intersections.  triples: (a, b, c, phi_ab, phi_bc, phi_ac) cocycle data,
    with each map written on the total coordinates of its source bundle.
    Returns (glued 2-form or None, CheckNode)."""
    root = CheckNode("glue", "descent of the characteristic form")
    by_name = {c.name: c for c in charts}
    shapes = root.add(CheckNode("charts", "restriction charts share global coordinates"))
    locals_ = {}
    for c in charts:
        ok = c.restrict.coords == global_total.coords
        shapes.leaf(f"{c.name}", "chart coordinates match", ok)
        if not ok:
            continue
        if not c.bundle.sigma.is_zero():
            shapes.leaf(f"{c.name}-aligned", "local bundle is target aligned", False)
            continue
        locals_[c.name] = c.bundle.omega.pullback(c.phi)
    over = root.add(CheckNode("overlaps", "local forms agree on overlaps"))
    compatible = True
    for (a, bname, patch) in overlaps:
        fa, fb = locals_.get(a), locals_.get(bname)
        if fa is None or fb is None:
            over.leaf(f"{a}-{bname}", "charts available", False)
            compatible = False
            continue
        fa_g = DifferentialForm(global_total, 2, fa.coeffs)
        fb_g = DifferentialForm(global_total, 2, fb.coeffs)
        resid = fa_g.sub(fb_g)
        ok = resid.is_zero()
        compatible = compatible and ok
        over.leaf(f"{a}-{bname}", f"phi_{a}* Omega = phi_{bname}* Omega on {patch.name}",
                  ok, residual=None if ok else resid)
    cyc = root.add(CheckNode("cocycle", "cocycle condition on triple overlaps"))
    if triples:
        for (a, bname, cname, phi_ab, phi_bc, phi_ac) in triples:
            try:
                comp = phi_bc.then(phi_ab)
            except DiracheckError as exc:
                cyc.leaf(f"{a}-{bname}-{cname}", "phi_ab o phi_bc = phi_ac", False,
                         notes=str(exc))
                continue
            _maps_equal_leaf(cyc, f"{a}-{bname}-{cname}", "phi_ab o phi_bc = phi_ac",
                             comp, phi_ac)
    else:
        cyc.skip("none", "no triple overlaps supplied")
    if morphisms:
        mg = root.add(CheckNode("glued-morphisms", "local morphisms agree (uniqueness)"))
        first = morphisms[0][1]
        for name, fmap in morphisms[1:]:
            _maps_equal_leaf(mg, f"{morphisms[0][0]}-{name}", "components agree",
                             first, fmap)
    if not compatible or not locals_:
        root.aggregate()
        return None, root
    glued_local = next(iter(locals_.values()))
    glued = DifferentialForm(global_total, 2, glued_local.coeffs)
    pole_node = root.add(CheckNode("global", "glued form is regular at global samples"))
    for k, smp in enumerate(global_total.samples):
        try:
            glued.eval_matrix(smp)
            pole_node.leaf(f"sample-{k}", "no pole", True)
        except DiracheckError:
            pole_node.leaf(f"sample-{k}", "no pole", False, witness=smp)
    root.notes = f"glued form: {glued}"
    return glued, root


class Bibundle:
    """Left G-bundle and right H-bundle structure on one total patch."""

    def __init__(self, left: PrincipalBundle, right_groupoid: DLieGroupoid,
                 right_action: ActionChart, right_assoc: TripleChart | None = None,
                 commuting: TripleChart | None = None, name: str = "bibundle"):
        self.left = left
        self.right_groupoid = right_groupoid
        self.right_action = right_action
        self.right_assoc = right_assoc
        self.commuting = commuting
        self.name = name

    @property
    def total(self):
        return self.left.total

    @property
    def omega(self):
        return self.left.omega


def check_bibundle(b: Bibundle, node_id: str = "check-bibundle") -> CheckNode:
    root = CheckNode(node_id, f"bibundle {b.name}")
    root.add(check_principal_bundle(b.left, "left"))
    h = b.right_groupoid
    ph = h.presentation
    R = b.right_action
    idP = SmoothMap.identity(b.total)
    right = root.add(CheckNode("right", "right action axioms"))
    _maps_equal_leaf(right, "chart", "s^P o pr_P = t o pr_H",
                     R.pr_left.then(b.left.sp), R.pr_right.then(ph.t))
    _maps_equal_leaf(right, "moment", "s^P(p.h) = s(h)",
                     R.act.then(b.left.sp), R.pr_right.then(ph.s))
    _maps_equal_leaf(right, "invariance", "t^P(p.h) = t^P(p)",
                     R.act.then(b.left.tp), R.pr_left.then(b.left.tp))
    try:
        unit_pair = R.pair(idP, b.left.sp.then(ph.u))
        _maps_equal_leaf(right, "unit", "p.u(s^P(p)) = p", unit_pair.then(R.act), idP)
    except DiracheckError as exc:
        right.leaf("unit", "p.u(s^P(p)) = p", False, notes=str(exc))
    if b.right_assoc is not None:
        try:
            c = b.right_assoc
            lhs = R.pair(R.pair(c.pr1, c.pr2).then(R.act), c.pr3).then(R.act)
            h12 = ph.pair(c.pr2, c.pr3).then(ph.g2.m)
            rhs = R.pair(c.pr1, h12).then(R.act)
            _maps_equal_leaf(right, "associativity", "(p.h1).h2 = p.(h1 h2)", lhs, rhs)
        except DiracheckError as exc:
            right.leaf("associativity", "(p.h1).h2 = p.(h1 h2)", False, notes=str(exc))
    else:
        right.skip("associativity", "(p.h1).h2 = p.(h1 h2)", notes="no triple chart supplied")
    _forms_equal_leaf(right, "right-multiplicative",
                      "m_R* Omega^P = pr_P* Omega^P + pr_H* Omega^H",
                      b.omega.pullback(R.act),
                      b.omega.pullback(R.pr_left).add(h.omega.pullback(R.pr_right)))
    if b.commuting is not None:
        try:
            c = b.commuting
            A = b.left.action
            gp = A.pair(c.pr1, c.pr2).then(A.act)
            lhs = R.pair(gp, c.pr3).then(R.act)
            qh = R.pair(c.pr2, c.pr3).then(R.act)
            rhs = A.pair(c.pr1, qh).then(A.act)
            _maps_equal_leaf(root, "commuting", "(g.p).h = g.(p.h)", lhs, rhs)
        except DiracheckError as exc:
            root.leaf("commuting", "(g.p).h = g.(p.h)", False, notes=str(exc))
    else:
        root.skip("commuting", "(g.p).h = g.(p.h)", notes="no triple chart supplied")
    return root


def bundle_from_morphism(mor: DLieMorphism, src: DLieGroupoid, dst: DLieGroupoid,
                         skeleton: Bibundle, pr_arrow: SmoothMap, pr_base: SmoothMap):
    """The bibundle of a morphism F: H -> G on a user-supplied chart.

    pr_arrow and pr_base are the chart projections of the total to the G
    arrows and the H base.  Characteristic form: pr_arrow* Omega^G +
    pr_base* beta.  Returns (Bibundle, CheckNode)."""
    root = CheckNode("bundle-from-morphism", "bibundle of a groupoid morphism")
    G, H = dst, src
    pg, ph = G.presentation, H.presentation
    f = mor.base.map
    _maps_equal_leaf(root, "chart", "s o pr_G = f o pr_base",
                     pr_arrow.then(pg.s), pr_base.then(f))
    sk = skeleton.left
    _maps_equal_leaf(root, "sp", "s^P = pr_base", sk.sp, pr_base)
    _maps_equal_leaf(root, "tp", "t^P = t o pr_G", sk.tp, pr_arrow.then(pg.t))
    # canonical actions: m_L(g', (g, x)) = (g' g, x); m_R((g, x), h) = (g F(h), s(h))
    A, R = sk.action, skeleton.right_action
    try:
        lhs = A.act.then(pr_arrow)
        rhs = pg.pair(A.pr_left, A.pr_right.then(pr_arrow)).then(pg.g2.m)
        _maps_equal_leaf(root, "left-formula-arrow", "pr_G(g'.(g,x)) = g' g", lhs, rhs)
        _maps_equal_leaf(root, "left-formula-base", "pr_base(g'.(g,x)) = x",
                         A.act.then(pr_base), A.pr_right.then(pr_base))
        rhs_r = pg.pair(R.pr_left.then(pr_arrow),
                        R.pr_right.then(mor.arrow_map)).then(pg.g2.m)
        _maps_equal_leaf(root, "right-formula-arrow", "pr_G((g,x).h) = g F(h)",
                         R.act.then(pr_arrow), rhs_r)
        _maps_equal_leaf(root, "right-formula-base", "pr_base((g,x).h) = s(h)",
                         R.act.then(pr_base), R.pr_right.then(ph.s))
    except DiracheckError as exc:
        root.leaf("action-formulas", "canonical action formulas", False, notes=str(exc))
    omega_p = G.omega.pullback(pr_arrow).add(mor.base.gauge.pullback(pr_base))
    division = sk.division
    pairs = sk.pairs
    if pairs is not None and division is None:
        # division derived from the groupoid: d(p, q) = g_p . i(g_q)
        try:
            division = pg.pair(pairs.pr1.then(pr_arrow),
                               pairs.pr2.then(pr_arrow).then(pg.i)).then(pg.g2.m)
            root.leaf("division", "division derived from the groupoid inverse", True)
        except DiracheckError as exc:
            division = None
            root.leaf("division", "division derived from the groupoid inverse", False,
                      notes=str(exc))
    left = PrincipalBundle(G, sk.total, sk.base, sk.sp, sk.tp,
                           DifferentialForm.zero(sk.total, 2), omega_p,
                           sk.action, sk.assoc, pairs, division,
                           name=f"P_{skeleton.name}")
    out = Bibundle(left, H, skeleton.right_action, skeleton.right_assoc,
                   skeleton.commuting, name=f"P_{skeleton.name}")
    root.add(check_bibundle(out, "bibundle"))
    root.notes = f"characteristic form: {omega_p}"
    return out, root


def tensor_characteristic_form(P: Bibundle, Q: Bibundle, chart: Patch,
                               pr_p: SmoothMap, pr_q: SmoothMap,
                               diag: ActionChart, vertical, quotient=None):
    """Basic-ness of pr_p* Omega^P + pr_q* Omega^Q on P x_{M2} Q and, when a
    quotient chart with a section is supplied, the descended form.

    quotient: (patch, qmap, section).  Returns (form or None, CheckNode)."""
    root = CheckNode("tensor", "tensor-product characteristic form")
    middle = Q.left.groupoid
    pm = middle.presentation
    _maps_equal_leaf(root, "chart", "s^P o pr_P = t^Q o pr_Q",
                     pr_p.then(P.left.sp), pr_q.then(Q.left.tp))
    omega_t = P.omega.pullback(pr_p).add(Q.omega.pullback(pr_q))
    diag_node = root.add(CheckNode("diagonal-action", "declared action is the diagonal one"))
    try:
        lhs_p = diag.act.then(pr_p)
        rhs_p = P.right_action.pair(diag.pr_right.then(pr_p),
                                    diag.pr_left.then(pm.i)).then(P.right_action.act)
        _maps_equal_leaf(diag_node, "p-component", "pr_P(g.(p,q)) = p . g^{-1}", lhs_p, rhs_p)
        lhs_q = diag.act.then(pr_q)
        rhs_q = Q.left.action.pair(diag.pr_left, diag.pr_right.then(pr_q)).then(Q.left.action.act)
        _maps_equal_leaf(diag_node, "q-component", "pr_Q(g.(p,q)) = g . q", lhs_q, rhs_q)
    except DiracheckError as exc:
        diag_node.leaf("formulas", "diagonal action formulas", False, notes=str(exc))
    _forms_equal_leaf(root, "invariance", "act* form = pr_W* form",
                      omega_t.pullback(diag.act), omega_t.pullback(diag.pr_right))
    horiz = root.add(CheckNode("horizontal", "vertical directions are annihilated at samples"))
    basic = True
    for idx, v in enumerate(vertical):
        contraction = omega_t.interior(v)
        for k, smp in enumerate(chart.samples):
            vals = [c.evaluate(smp) for c in contraction.coeffs.values()]
            ok = all(x == 0 for x in vals)
            basic = basic and ok
            horiz.leaf(f"v{idx}-sample-{k}", f"iota_v{idx} form = 0 at sample", ok,
                       witness=smp if not ok else None)
    if quotient is None:
        root.skip("descent", "descended form", notes="no quotient chart supplied")
        return None, root
    qpatch, qmap, section = quotient
    desc = root.add(CheckNode("descent", "form descends along the quotient"))
    _maps_equal_leaf(desc, "section", "q o section = Id", section.then(qmap),
                     SmoothMap.identity(qpatch))
    descended = omega_t.pullback(section)
    resid = omega_t.sub(descended.pullback(qmap))
    ok = resid.is_zero()
    desc.leaf("q-star", "q* omega = pr_P* Omega^P + pr_Q* Omega^Q", ok,
              residual=None if ok else resid)
    if not ok:
        root.aggregate()
        return None, root
    desc.notes = f"descended form: {descended}"
    return descended, root


def check_nondegenerate(b: Bibundle, node_id: str = "check-nondegenerate") -> CheckNode:
    """Symplectic-side prerequisites plus full rank of Omega^P at every
    sample of the total patch."""
    root = CheckNode(node_id, "nondegeneracy of the bibundle characteristic form")
    pre = root.add(CheckNode("prerequisite", "both sides are symplectic groupoids"))
    for label, g in (("left", b.left.groupoid), ("right", b.right_groupoid)):
        aligned = g.gauge_pair.sigma.is_zero()
        pre.leaf(f"{label}-aligned", f"{label} groupoid is target aligned", aligned)
        omat = g.omega.matrix()
        for k, smp in enumerate(g.presentation.arrows.samples):
            r = mat_rank(evaluate_matrix(omat, smp))
            pre.leaf(f"{label}-sample-{k}", f"{label} Omega nondegenerate at sample",
                     r == g.presentation.arrows.dim,
                     witness=smp if r != g.presentation.arrows.dim else None)
    pre.leaf("bundle-aligned", "bibundle is target aligned", b.left.sigma.is_zero())
    if not all(c.aggregate() != "fail" for c in pre.children):
        root.skip("rank", "Omega^P has full rank at samples", notes="prerequisite failed")
        return root
    root.leaf("closed", "d Omega^P = 0", b.omega.exterior_derivative().is_zero())
    rank_node = root.add(CheckNode("rank", "Omega^P has full rank at samples"))
    omat = b.omega.matrix()
    for k, smp in enumerate(b.total.samples):
        r = mat_rank(evaluate_matrix(omat, smp))
        rank_node.leaf(f"sample-{k}", "full rank", r == b.total.dim,
                       witness=smp if r != b.total.dim else None)
    return root
