"""Groupoid presentations in coordinates and their D-Lie verification.

Composable-pair and triple charts are user-supplied product charts; maps
into them are assembled through user-supplied assembly maps and re-verified
symbolically, so nothing depends on trusting the assembler.
"""

from __future__ import annotations

from .calculus import DifferentialForm, Patch, SmoothMap
from .category import DManMorphism, check_morphism
from .dirac import (
    DiracStructure,
    dirac_equality_report,
    gauge_transform,
    pullback_dirac,
)
from .errors import DiracheckError, EndpointMismatch, NotClosed, PrerequisiteFailed
from .linalg import evaluate_matrix, mat_rank
from .report import CheckNode
from .scalar import ScalarExpr


class Assembler:
    """Free product chart with plain-variable legs plus an assembly map."""

    def __init__(self, product: Patch, legs, asm: SmoothMap):
        legs = tuple(legs)
        if asm.source.coords != product.coords:
            raise DiracheckError("assembly map must start on the product chart")
        seen = []
        self.slots = []
        for leg in legs:
            if leg.source.coords != product.coords:
                raise DiracheckError("every leg must start on the product chart")
            names = leg.is_coordinate_projection()
            if names is None:
                raise DiracheckError("legs must be plain coordinate projections")
            seen.extend(names)
            self.slots.append(names)
        if sorted(seen) != sorted(product.coords) or len(seen) != len(product.coords):
            raise DiracheckError("legs must partition the product coordinates")
        self.product = product
        self.legs = legs
        self.asm = asm

    def assemble(self, maps, projections) -> SmoothMap:
        """Map into the fiber chart with projections[i] o result = maps[i].

        The stated projection identities are re-verified symbolically; a
        failure means the supplied data is not actually composable.
        """
        if len(maps) != len(self.legs):
            raise DiracheckError("wrong number of factors")
        src = maps[0].source
        for f in maps:
            if f.source.coords != src.coords:
                raise EndpointMismatch("factors must share a source")
        comps = [None] * self.product.dim
        for names, f in zip(self.slots, maps):
            for k, var in enumerate(names):
                comps[self.product.index_of(var)] = f.components[k]
        h = SmoothMap(src, self.product, comps)
        out = h.then(self.asm)
        for proj, f in zip(projections, maps):
            if not out.then(proj).equals(f):
                raise DiracheckError(
                    "assembled map does not project back onto a factor; "
                    "the factors are not composable on this chart")
        return out


class FiberChart2:
    """Chart for composable pairs with projections and the multiplication."""

    def __init__(self, chart: Patch, pr1: SmoothMap, pr2: SmoothMap,
                 m: SmoothMap, assembler: Assembler):
        self.chart = chart
        self.pr1 = pr1
        self.pr2 = pr2
        self.m = m
        self.assembler = assembler


class FiberChart3:
    def __init__(self, chart: Patch, pr1, pr2, pr3, assembler: Assembler):
        self.chart = chart
        self.pr1 = pr1
        self.pr2 = pr2
        self.pr3 = pr3
        self.assembler = assembler


def _maps_equal_leaf(node, id, title, f: SmoothMap, g: SmoothMap):
    if f.target.coords != g.target.coords or f.source.coords != g.source.coords:
        node.leaf(id, title, False, notes="maps have different endpoints")
        return False
    for k, (a, b) in enumerate(zip(f.components, g.components)):
        if a != b:
            node.leaf(id, title, False, residual=a - b,
                      notes=f"component {k} differs")
            return False
    node.leaf(id, title, True)
    return True


def _forms_equal_leaf(node, id, title, a: DifferentialForm, b: DifferentialForm):
    resid = a.sub(b)
    node.leaf(id, title, resid.is_zero(), residual=None if resid.is_zero() else resid)
    return resid.is_zero()


class GroupoidPresentation:
    """Arrow and object patches, the five structure maps, and pair/triple charts."""

    def __init__(self, arrows: Patch, objects: Patch, s: SmoothMap, t: SmoothMap,
                 u: SmoothMap, i: SmoothMap, g2: FiberChart2, g3: FiberChart3,
                 name: str = "groupoid"):
        self.name = name
        self.arrows = arrows
        self.objects = objects
        self.s = s
        self.t = t
        self.u = u
        self.i = i
        self.g2 = g2
        self.g3 = g3

    def pair(self, f: SmoothMap, g: SmoothMap) -> SmoothMap:
        """Map (f, g) into the composable chart; requires s o f = t o g."""
        sf = f.then(self.s)
        tg = g.then(self.t)
        if not sf.equals(tg):
            raise EndpointMismatch("factors are not composable: s o f != t o g")
        return self.g2.assembler.assemble([f, g], [self.g2.pr1, self.g2.pr2])

    def compose_maps(self, f: SmoothMap, g: SmoothMap) -> SmoothMap:
        """Pointwise product m(f, g) of two composable G-valued maps."""
        return self.pair(f, g).then(self.g2.m)


def verify_presentation(p: GroupoidPresentation,
                        node_id: str = "check-groupoid") -> CheckNode:
    """Smooth groupoid axioms (table rows G1-G9 plus the target-side
    identities) as component-wise scalar identities; submersion ranks at
    arrow samples."""
    root = CheckNode(node_id, f"groupoid presentation {p.name}")
    G, M = p.arrows, p.objects
    idG = SmoothMap.identity(G)
    idM = SmoothMap.identity(M)
    g2, g3 = p.g2, p.g3

    charts = root.add(CheckNode("charts", "fiber charts are composable-pair charts"))
    _maps_equal_leaf(charts, "g2", "s o pr1 = t o pr2 on the pair chart",
                     g2.pr1.then(p.s), g2.pr2.then(p.t))
    _maps_equal_leaf(charts, "g3-12", "s o pr1 = t o pr2 on the triple chart",
                     g3.pr1.then(p.s), g3.pr2.then(p.t))
    _maps_equal_leaf(charts, "g3-23", "s o pr2 = t o pr3 on the triple chart",
                     g3.pr2.then(p.s), g3.pr3.then(p.t))

    ax = root.add(CheckNode("axioms", "groupoid axioms"))
    _maps_equal_leaf(ax, "G1", "s o u = Id", p.u.then(p.s), idM)
    _maps_equal_leaf(ax, "unit-target", "t o u = Id", p.u.then(p.t), idM)
    _maps_equal_leaf(ax, "G2", "s o m = s o pr2", g2.m.then(p.s), g2.pr2.then(p.s))
    _maps_equal_leaf(ax, "target-mult", "t o m = t o pr1",
                     g2.m.then(p.t), g2.pr1.then(p.t))
    _maps_equal_leaf(ax, "G3", "s o i = t", p.i.then(p.s), p.t)
    _maps_equal_leaf(ax, "target-inv", "t o i = s", p.i.then(p.t), p.s)
    _maps_equal_leaf(ax, "G4", "i o u = u", p.u.then(p.i), p.u)
    try:
        ut_id = p.pair(p.t.then(p.u), idG)
        _maps_equal_leaf(ax, "G5", "m o ((u o t) x Id) = Id", ut_id.then(g2.m), idG)
        id_us = p.pair(idG, p.s.then(p.u))
        _maps_equal_leaf(ax, "G6", "m o (Id x (u o s)) = Id", id_us.then(g2.m), idG)
        i_id = p.pair(p.i, idG)
        _maps_equal_leaf(ax, "G7", "m o (i x Id) = u o s",
                         i_id.then(g2.m), p.s.then(p.u))
        id_i = p.pair(idG, p.i)
        _maps_equal_leaf(ax, "G8", "m o (Id x i) = u o t",
                         id_i.then(g2.m), p.t.then(p.u))
        m12 = p.pair(g3.pr1, g3.pr2).then(g2.m)
        m23 = p.pair(g3.pr2, g3.pr3).then(g2.m)
        left = p.pair(m12, g3.pr3).then(g2.m)
        right = p.pair(g3.pr1, m23).then(g2.m)
        _maps_equal_leaf(ax, "G9", "associativity", left, right)
    except DiracheckError as exc:
        ax.leaf("pairing", "composable-pair assembly", False, notes=str(exc))

    sub = root.add(CheckNode("submersions", "s and t are submersions at samples"))
    for name, mp in (("s", p.s), ("t", p.t)):
        jac = mp.jacobian()
        for k, smp in enumerate(G.samples):
            r = mat_rank(evaluate_matrix(jac, smp))
            sub.leaf(f"{name}-sample-{k}", f"d{name} has full rank", r == M.dim,
                     witness=smp if r != M.dim else None)
    return root


class GaugePair:
    """Closed 2-forms tau and sigma on the arrow patch."""

    def __init__(self, tau: DifferentialForm, sigma: DifferentialForm):
        for nm, f in (("tau", tau), ("sigma", sigma)):
            if f.degree != 2:
                raise DiracheckError(f"{nm} must be a 2-form")
            if not f.exterior_derivative().is_zero():
                raise NotClosed(f"{nm} is not closed")
        self.tau = tau
        self.sigma = sigma

    @property
    def omega(self) -> DifferentialForm:
        """Characteristic form, fixed globally as tau - sigma."""
        return self.tau.sub(self.sigma)


class DLieGroupoid:
    def __init__(self, presentation: GroupoidPresentation, base_dirac: DiracStructure,
                 gauge_pair: GaugePair):
        if base_dirac.patch.coords != presentation.objects.coords:
            raise EndpointMismatch("base Dirac structure must live on the object patch")
        if gauge_pair.tau.patch.coords != presentation.arrows.coords:
            raise EndpointMismatch("gauge pair must live on the arrow patch")
        self.presentation = presentation
        self.base_dirac = base_dirac
        self.gauge_pair = gauge_pair

    @property
    def omega(self) -> DifferentialForm:
        return self.gauge_pair.omega

    def arrow_dirac(self) -> DiracStructure:
        """L_G = s* L_M - sigma (cross-checked against t* L_M - tau in reports)."""
        pulled, _ = pullback_dirac(self.presentation.s, self.base_dirac)
        return gauge_transform(pulled, self.gauge_pair.sigma.neg())

    def source_morphism(self) -> DManMorphism:
        return DManMorphism(self.presentation.s, self.gauge_pair.sigma,
                            self.arrow_dirac(), self.base_dirac)

    def target_morphism(self) -> DManMorphism:
        return DManMorphism(self.presentation.t, self.gauge_pair.tau,
                            self.arrow_dirac(), self.base_dirac)


def check_dlie_conditions(g: DLieGroupoid, node_id: str = "check-dlie") -> CheckNode:
    """Conditions (i) and (ii) on the gauge pair plus arrow-structure agreement."""
    root = CheckNode(node_id, "D-Lie groupoid conditions")
    p = g.presentation
    gp = g.gauge_pair
    root.leaf("tau-closed", "tau is closed", gp.tau.exterior_derivative().is_zero())
    root.leaf("sigma-closed", "sigma is closed", gp.sigma.exterior_derivative().is_zero())
    try:
        t_pull, t_node = pullback_dirac(p.t, g.base_dirac)
        s_pull, s_node = pullback_dirac(p.s, g.base_dirac)
    except DiracheckError as exc:
        root.leaf("pullbacks", "s and t pull the base structure back", False, notes=str(exc))
        return root
    cond1 = root.add(CheckNode("condition-i", "t* L_M = s* L_M + (tau - sigma)"))
    cond1.add(t_node)
    shifted = gauge_transform(s_pull, gp.omega)
    dirac_equality_report(cond1, t_pull, shifted, "pullbacks agree after the gauge shift")
    arrow1 = gauge_transform(s_pull, gp.sigma.neg())
    arrow2 = gauge_transform(t_pull, gp.tau.neg())
    dirac_equality_report(root, arrow1, arrow2,
                          "arrow structure: s* L_M - sigma = t* L_M - tau")
    omega = gp.omega
    resid = omega.pullback(p.g2.m).sub(omega.pullback(p.g2.pr1)).sub(omega.pullback(p.g2.pr2))
    root.leaf("condition-ii", "tau - sigma is multiplicative", resid.is_zero(),
              residual=None if resid.is_zero() else resid)
    return root


class DerivedGaugeParts:
    """Gauge parts of u, m, i, defined by the table rows G1-G3."""

    def __init__(self, upsilon: DifferentialForm, mu: DifferentialForm,
                 iota: DifferentialForm):
        self.upsilon = upsilon
        self.mu = mu
        self.iota = iota


def derive_gauge_parts(g: DLieGroupoid) -> DerivedGaugeParts:
    p = g.presentation
    sigma, tau = g.gauge_pair.sigma, g.gauge_pair.tau
    upsilon = sigma.pullback(p.u).neg()
    mu = sigma.pullback(p.g2.pr1).add(sigma.pullback(p.g2.pr2)).sub(sigma.pullback(p.g2.m))
    iota = tau.sub(sigma.pullback(p.i))
    return DerivedGaugeParts(upsilon, mu, iota)


def verify_gauge_axioms(g: DLieGroupoid, node_id: str = "check-gauge-axioms") -> CheckNode:
    """All nine gauge-part identities of the groupoid-axiom table."""
    root = CheckNode(node_id, "gauge equations of the groupoid axioms")
    p = g.presentation
    d = derive_gauge_parts(g)
    sigma, tau = g.gauge_pair.sigma, g.gauge_pair.tau
    g2, g3 = p.g2, p.g3
    idG = SmoothMap.identity(p.arrows)
    zero_m = DifferentialForm.zero(p.objects, 2)

    _forms_equal_leaf(root, "G1", "u* sigma + upsilon = 0",
                      sigma.pullback(p.u).add(d.upsilon), zero_m)
    _forms_equal_leaf(root, "G2", "m* sigma + mu = pr1* sigma + pr2* sigma",
                      sigma.pullback(g2.m).add(d.mu),
                      sigma.pullback(g2.pr1).add(sigma.pullback(g2.pr2)))
    _forms_equal_leaf(root, "G3", "i* sigma + iota = tau",
                      sigma.pullback(p.i).add(d.iota), tau)
    _forms_equal_leaf(root, "G4", "u* iota + upsilon = upsilon",
                      d.iota.pullback(p.u).add(d.upsilon), d.upsilon)
    try:
        ut_id = p.pair(p.t.then(p.u), idG)
        _forms_equal_leaf(root, "G5", "((u o t) x Id)* mu = (u o t)* sigma",
                          d.mu.pullback(ut_id), sigma.pullback(p.t.then(p.u)))
        id_us = p.pair(idG, p.s.then(p.u))
        _forms_equal_leaf(root, "G6", "(Id x (u o s))* mu = (u o s)* tau",
                          d.mu.pullback(id_us), tau.pullback(p.s.then(p.u)))
        i_id = p.pair(p.i, idG)
        _forms_equal_leaf(root, "G7", "(i x Id)* mu - i* sigma = s* upsilon + sigma",
                          d.mu.pullback(i_id).sub(sigma.pullback(p.i)),
                          d.upsilon.pullback(p.s).add(sigma))
        id_i = p.pair(idG, p.i)
        _forms_equal_leaf(root, "G8", "(Id x i)* mu - i* tau = t* upsilon + tau",
                          d.mu.pullback(id_i).sub(tau.pullback(p.i)),
                          d.upsilon.pullback(p.t).add(tau))
        a12 = p.pair(g3.pr1, g3.pr2)
        a23 = p.pair(g3.pr2, g3.pr3)
        m12 = a12.then(g2.m)
        m23 = a23.then(g2.m)
        left_outer = p.pair(m12, g3.pr3)
        right_outer = p.pair(g3.pr1, m23)
        lhs = d.mu.pullback(a12).add(d.mu.pullback(left_outer))
        rhs = d.mu.pullback(a23).add(d.mu.pullback(right_outer))
        _forms_equal_leaf(root, "G9", "associativity gauge equation", lhs, rhs)
    except DiracheckError as exc:
        root.leaf("pairing", "composable-pair assembly", False, notes=str(exc))
    return root


class DLieMorphism:
    """Arrow-level map with gauge alpha over a base DMan morphism."""

    def __init__(self, arrow_map: SmoothMap, alpha: DifferentialForm, base: DManMorphism):
        if alpha.patch.coords != arrow_map.source.coords:
            raise EndpointMismatch("alpha must live on the source arrows")
        self.arrow_map = arrow_map
        self.alpha = alpha
        self.base = base


def check_dlie_morphism(mor: DLieMorphism, src: DLieGroupoid, dst: DLieGroupoid,
                        node_id: str = "check-dlie-morphism") -> CheckNode:
    """Groupoid homomorphism, base morphism law, and the characteristic-form
    compatibility equations."""
    root = CheckNode(node_id, "D-Lie groupoid morphism")
    F = mor.arrow_map
    f = mor.base.map
    ps, pd = src.presentation, dst.presentation
    _maps_equal_leaf(root, "source-compat", "s o F = f o s", F.then(pd.s), ps.s.then(f))
    _maps_equal_leaf(root, "target-compat", "t o F = f o t", F.then(pd.t), ps.t.then(f))
    try:
        FxF = pd.pair(ps.g2.pr1.then(F), ps.g2.pr2.then(F))
        _maps_equal_leaf(root, "mult-compat", "F o m = m o (F x F)",
                         ps.g2.m.then(F), FxF.then(pd.g2.m))
    except DiracheckError as exc:
        root.leaf("mult-compat", "F o m = m o (F x F)", False, notes=str(exc))
    root.add(check_morphism(mor.base, "base"))
    om_s, om_d = src.omega, dst.omega
    tau_s, sig_s = src.gauge_pair.tau, src.gauge_pair.sigma
    tau_d, sig_d = dst.gauge_pair.tau, dst.gauge_pair.sigma
    beta = mor.base.gauge
    _forms_equal_leaf(root, "characteristic",
                      "F* Omega' = t* beta - s* beta + Omega",
                      om_d.pullback(F),
                      beta.pullback(ps.t).sub(beta.pullback(ps.s)).add(om_s))
    _forms_equal_leaf(root, "alpha-source", "F* sigma' + alpha = s* beta + sigma",
                      sig_d.pullback(F).add(mor.alpha),
                      beta.pullback(ps.s).add(sig_s))
    _forms_equal_leaf(root, "alpha-target", "F* tau' + alpha = t* beta + tau",
                      tau_d.pullback(F).add(mor.alpha),
                      beta.pullback(ps.t).add(tau_s))
    return root


def target_align(g: DLieGroupoid):
    """Aligned groupoid with gauge pair (tau - sigma, 0) and the isomorphism
    (Id, sigma) onto it.  Returns (aligned, morphism, CheckNode)."""
    root = CheckNode("target-align", "target alignment")
    p = g.presentation
    sigma = g.gauge_pair.sigma
    aligned = DLieGroupoid(p, g.base_dirac,
                           GaugePair(g.omega, DifferentialForm.zero(p.arrows, 2)))
    d = derive_gauge_parts(g)
    _forms_equal_leaf(root, "mult-compat",
                      "m* sigma + mu = pr1* sigma + pr2* sigma",
                      sigma.pullback(p.g2.m).add(d.mu),
                      sigma.pullback(p.g2.pr1).add(sigma.pullback(p.g2.pr2)))
    base = DManMorphism.identity(g.base_dirac)
    mor = DLieMorphism(SmoothMap.identity(p.arrows), sigma, base)
    root.add(check_dlie_morphism(mor, g, aligned, "morphism"))
    again, _, _ = _align_once(aligned)
    root.leaf("idempotent", "aligning an aligned groupoid changes nothing",
              again.gauge_pair.tau == aligned.gauge_pair.tau
              and again.gauge_pair.sigma == aligned.gauge_pair.sigma)
    return aligned, mor, root


def _align_once(g: DLieGroupoid):
    p = g.presentation
    aligned = DLieGroupoid(p, g.base_dirac,
                           GaugePair(g.omega, DifferentialForm.zero(p.arrows, 2)))
    base = DManMorphism.identity(g.base_dirac)
    mor = DLieMorphism(SmoothMap.identity(p.arrows), g.gauge_pair.sigma, base)
    return aligned, mor, None
