"""The category of Dirac manifolds: morphisms, diagrams, fiber products and
their universal arrows."""

from __future__ import annotations

from .calculus import DifferentialForm, Patch, SmoothMap
from .dirac import (
    DiracStructure,
    dirac_equal_generic,
    dirac_equality_report,
    gauge_transform,
    pullback_dirac,
)
from .errors import (
    DiracheckError,
    EndpointMismatch,
    GaugeEquationFails,
    NotSmoothSubbundle,
    OuterSquareFails,
    PoleAtSample,
    SquareDoesNotCommute,
)
from .report import CheckNode
from .scalar import ScalarExpr


class DManMorphism:
    """Pair (f, beta): source and target Dirac structures plus a closed gauge 2-form."""

    __slots__ = ("map", "gauge", "source_dirac", "target_dirac")

    def __init__(self, map: SmoothMap, gauge: DifferentialForm,
                 source_dirac: DiracStructure, target_dirac: DiracStructure):
        if map.source.coords != source_dirac.patch.coords:
            raise EndpointMismatch("source Dirac structure lives on the wrong patch")
        if map.target.coords != target_dirac.patch.coords:
            raise EndpointMismatch("target Dirac structure lives on the wrong patch")
        if gauge.patch.coords != map.source.coords:
            raise EndpointMismatch("gauge form must live on the source")
        if gauge.degree != 2:
            raise DiracheckError("gauge part must be a 2-form")
        self.map = map
        self.gauge = gauge
        self.source_dirac = source_dirac
        self.target_dirac = target_dirac

    @classmethod
    def identity(cls, d: DiracStructure) -> "DManMorphism":
        return cls(SmoothMap.identity(d.patch), DifferentialForm.zero(d.patch, 2), d, d)

    def __repr__(self):
        return f"DManMorphism({self.map.source.name}->{self.map.target.name})"


def check_morphism(m: DManMorphism, node_id: str = "check-morphism") -> CheckNode:
    """Closedness of the gauge, transversality at samples, and the law
    f* L_target = L_source + beta (generic point and samples)."""
    root = CheckNode(node_id,
                     f"DMan morphism {m.map.source.name} -> {m.map.target.name}")
    root.leaf("gauge-closed", "gauge 2-form is closed",
              m.gauge.exterior_derivative().is_zero(),
              residual=None if m.gauge.exterior_derivative().is_zero()
              else m.gauge.exterior_derivative())
    try:
        pulled, pnode = pullback_dirac(m.map, m.target_dirac)
    except (NotSmoothSubbundle, PoleAtSample) as exc:
        root.leaf("pullback", "pullback is a smooth subbundle", False, notes=str(exc))
        return root
    root.add(pnode)
    try:
        shifted = gauge_transform(m.source_dirac, m.gauge)
    except DiracheckError as exc:
        root.leaf("gauge-shift", "gauge transform applies", False, notes=str(exc))
        return root
    dirac_equality_report(root, pulled, shifted,
                          "f* L_target equals L_source + beta")
    return root


def compose(outer: DManMorphism, inner: DManMorphism) -> DManMorphism:
    """(f, beta) o (g, alpha) = (f o g, g* beta + alpha)."""
    if inner.map.target.coords != outer.map.source.coords \
            or not dirac_equal_generic(inner.target_dirac, outer.source_dirac):
        raise EndpointMismatch("morphisms are not composable")
    smap = inner.map.then(outer.map)
    gauge = outer.gauge.pullback(inner.map).add(inner.gauge)
    return DManMorphism(smap, gauge, inner.source_dirac, outer.target_dirac)


class Diagram:
    """Triangles (f1, f2, f3) with f3 the stated composite f2 o f1."""

    __slots__ = ("triangles",)

    def __init__(self, triangles):
        self.triangles = tuple(tuple(t) for t in triangles)
        for t in self.triangles:
            if len(t) != 3:
                raise DiracheckError("a triangle needs exactly three edges")


def check_diagram(d: Diagram, node_id: str = "check-diagram") -> CheckNode:
    """Smooth commutativity plus the gauge equation of every triangle."""
    root = CheckNode(node_id, "diagram gauge equations")
    for idx, (f1, f2, f3) in enumerate(d.triangles):
        tri = root.add(CheckNode(f"triangle-{idx}", "triangle commutes"))
        if f1.map.target.coords != f2.map.source.coords \
                or f1.map.source.coords != f3.map.source.coords \
                or f2.map.target.coords != f3.map.target.coords:
            tri.leaf("shape", "edges are composable", False)
            continue
        comp = f1.map.then(f2.map)
        smooth_ok = comp.equals(f3.map)
        tri.leaf("smooth", "smooth maps commute", smooth_ok)
        resid = f1.gauge.add(f2.gauge.pullback(f1.map)).sub(f3.gauge)
        tri.leaf("gauge", "beta1 + f1* beta2 = beta3", resid.is_zero(),
                 residual=None if resid.is_zero() else resid)
    return root


def fiber_product(f: DManMorphism, g: DManMorphism, chart: Patch,
                  pr1: SmoothMap, pr2: SmoothMap):
    """Fiber product over a user-supplied chart.

    L on the chart is (f o pr1)* L_X - pr1* beta - pr2* alpha; the two
    projections get gauge parts pr2* alpha and pr1* beta.  Returns
    (DiracStructure, pr1 morphism, pr2 morphism, CheckNode).
    """
    if f.map.target.coords != g.map.target.coords:
        raise EndpointMismatch("f and g must share a target")
    if pr1.source.coords != chart.coords or pr2.source.coords != chart.coords:
        raise EndpointMismatch("projections must start on the chart")
    if pr1.target.coords != f.map.source.coords or pr2.target.coords != g.map.source.coords:
        raise EndpointMismatch("projections must land on the factors")
    root = CheckNode("fiber-product", f"fiber product on chart {chart.name}")
    diag1 = pr1.then(f.map)
    diag2 = pr2.then(g.map)
    if not diag1.equals(diag2):
        root.leaf("square-commutes", "f o pr1 = g o pr2", False)
        root.aggregate()
        raise SquareDoesNotCommute("f o pr1 != g o pr2 on the chart")
    root.leaf("square-commutes", "f o pr1 = g o pr2", True)
    beta_w = f.gauge.pullback(pr1)
    alpha_w = g.gauge.pullback(pr2)
    pulled, pnode = pullback_dirac(diag1, f.target_dirac)
    root.add(pnode)
    L_w = gauge_transform(pulled, beta_w.add(alpha_w).neg())
    m1 = DManMorphism(pr1, alpha_w, L_w, f.source_dirac)
    m2 = DManMorphism(pr2, beta_w, L_w, g.source_dirac)
    root.add(check_morphism(m1, "pr1"))
    root.add(check_morphism(m2, "pr2"))
    diag = compose(f, m1)
    root.add(check_diagram(Diagram([(m2, g, diag)]), "square"))
    return L_w, m1, m2, root


def universal_arrow(square, h1: DManMorphism, h2: DManMorphism, k: SmoothMap):
    """Complete the universal diagram with the gauge part of the supplied k.

    square is the (L_w, pr1, pr2) triple produced by fiber_product, with the
    f and g morphisms; kappa is solved from the triangle gauge equations and
    both defining forms are cross-checked under the outer gauge equation.
    """
    L_w, m1, m2, f, g = square
    root = CheckNode("universal-arrow", "universal property of the fiber product")
    if not h1.map.then(f.map).equals(h2.map.then(g.map)):
        root.leaf("outer-square", "f o h1 = g o h2", False)
        root.aggregate()
        raise OuterSquareFails("outer square does not commute")
    root.leaf("outer-square", "f o h1 = g o h2", True)
    eta1, eta2 = h1.gauge, h2.gauge
    lhs = f.gauge.pullback(h1.map).add(eta1)
    rhs = g.gauge.pullback(h2.map).add(eta2)
    resid5 = lhs.sub(rhs)
    if not resid5.is_zero():
        root.leaf("outer-gauge", "h1* beta + eta1 = h2* alpha + eta2", False,
                  residual=resid5)
        root.aggregate()
        raise GaugeEquationFails("outer gauge equation fails")
    root.leaf("outer-gauge", "h1* beta + eta1 = h2* alpha + eta2", True)
    root.leaf("k-smooth", "pr1 o k = h1 and pr2 o k = h2",
              k.then(m1.map).equals(h1.map) and k.then(m2.map).equals(h2.map))
    kappa = eta2.sub(m2.gauge.pullback(k))
    alt = eta1.sub(m1.gauge.pullback(k))
    root.leaf("kappa-consistent", "both defining forms of kappa agree",
              kappa.sub(alt).is_zero(),
              residual=None if kappa.sub(alt).is_zero() else kappa.sub(alt))
    km = DManMorphism(k, kappa, h1.source_dirac, L_w)
    root.add(check_diagram(Diagram([(km, m1, h1), (km, m2, h2)]), "triangles"))
    # One published display of the second defining form uses the gauge of f
    # where the gauge of g is needed; it only even typechecks when both
    # factors share a patch.  Flag whether the literal form agrees here.
    if f.gauge.patch.coords == g.map.source.coords:
        literal = eta1.sub(f.gauge.pullback(m2.map).pullback(k))
        if not literal.sub(kappa).is_zero():
            root.notes = "literal second defining form disagrees; kappa taken from the triangle gauge equations"
    else:
        root.notes = "literal second defining form is ill-typed on this data; kappa taken from the triangle gauge equations"
    return km, root
