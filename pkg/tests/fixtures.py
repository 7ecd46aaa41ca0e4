"""Shared desk-scale fixtures: groupoids, Dirac structures, bundles."""

from fractions import Fraction as F

from diracheck.calculus import DifferentialForm, Patch, SmoothMap, VectorField
from diracheck.dirac import DiracStructure
from diracheck.groupoid import (
    Assembler,
    DLieGroupoid,
    FiberChart2,
    FiberChart3,
    GaugePair,
    GroupoidPresentation,
)
from diracheck.scalar import ScalarExpr
from diracheck.bundles import (ActionChart, Bibundle, PairsChart, PrincipalBundle, TripleChart)

SE = ScalarExpr
ZERO = SE.zero()
ONE = SE.one()


def sv(name):
    return SE.var(name)


def pt(names, vals):
    return {n: F(v) for n, v in zip(names, vals)}


def make_patch(name, coords, sample_rows, constraints=()):
    return Patch(name, coords, [pt(coords, row) for row in sample_rows], constraints)


def projection(src, dst, names):
    return SmoothMap(src, dst, [sv(n) for n in names])


def canonical_two_form(patch, pairs):
    """Sum of c * dA^dB for (A, B, c) triples."""
    out = DifferentialForm.zero(patch, 2)
    for a, b, c in pairs:
        da = DifferentialForm.d_coord(patch, a)
        db = DifferentialForm.d_coord(patch, b)
        out = out.add(da.wedge(db).scale(SE.from_rational(c)))
    return out


# ---------------------------------------------------------------------------
# cotangent groupoid of R^n with the zero Poisson structure
# ---------------------------------------------------------------------------

def cotangent_groupoid(n=2):
    xs = [f"x{i}" for i in range(1, n + 1)]
    ps = [f"p{i}" for i in range(1, n + 1)]
    rs = [f"r{i}" for i in range(1, n + 1)]
    ws = [f"w{i}" for i in range(1, n + 1)]

    def vals(k, spread=1):
        # deterministic small integers, k-th row
        return [(k * 3 + j * 2 + spread) % 5 - 2 for j in range(n)]

    M = make_patch("M", xs, [vals(k) for k in range(3)])
    G = make_patch("G", xs + ps,
                   [vals(k) + vals(k + 1, 2) for k in range(5)] + [[0] * n + [0] * n])
    G2 = make_patch("G2", xs + ps + rs,
                    [vals(k) + vals(k + 1, 2) + vals(k + 2, 3) for k in range(3)])
    G3 = make_patch("G3", xs + ps + rs + ws,
                    [vals(k) + vals(k + 1, 2) + vals(k + 2, 3) + vals(k + 3, 4)
                     for k in range(2)])

    s = projection(G, M, xs)
    t = projection(G, M, xs)
    u = SmoothMap(M, G, [sv(x) for x in xs] + [ZERO] * n)
    i = SmoothMap(G, G, [sv(x) for x in xs] + [-sv(p) for p in ps])

    pr1 = projection(G2, G, xs + ps)
    pr2 = projection(G2, G, xs + rs)
    m = SmoothMap(G2, G, [sv(x) for x in xs] + [sv(p) + sv(r) for p, r in zip(ps, rs)])

    gga = [f"a{i}" for i in range(1, 2 * n + 1)]
    ggb = [f"b{i}" for i in range(1, 2 * n + 1)]
    GG = make_patch("GG", gga + ggb,
                    [vals(k) + vals(k + 1) + vals(k) + vals(k + 2) for k in range(2)])
    legA = projection(GG, G, gga)
    legB = projection(GG, G, ggb)
    asm2 = SmoothMap(GG, G2, [sv(v) for v in gga] + [sv(v) for v in ggb[n:]])
    g2 = FiberChart2(G2, pr1, pr2, m, Assembler(GG, [legA, legB], asm2))

    ggc = [f"c{i}" for i in range(1, 2 * n + 1)]
    GGG = make_patch("GGG", gga + ggb + ggc,
                     [vals(k) + vals(k + 1) + vals(k) + vals(k + 2) + vals(k) + vals(k + 3)
                      for k in range(2)])
    leg3 = [projection(GGG, G, block) for block in (gga, ggb, ggc)]
    asm3 = SmoothMap(GGG, G3,
                     [sv(v) for v in gga] + [sv(v) for v in ggb[n:]] + [sv(v) for v in ggc[n:]])
    g3 = FiberChart3(G3, projection(G3, G, xs + ps), projection(G3, G, xs + rs),
                     projection(G3, G, xs + ws), Assembler(GGG, leg3, asm3))

    pres = GroupoidPresentation(G, M, s, t, u, i, g2, g3, name="cotangent")
    tau = canonical_two_form(G, [(p, x, 1) for p, x in zip(ps, xs)])
    sigma = DifferentialForm.zero(G, 2)
    base = DiracStructure.cotangent(M)
    return DLieGroupoid(pres, base, GaugePair(tau, sigma))


# ---------------------------------------------------------------------------
# pair groupoid of symplectic R^2
# ---------------------------------------------------------------------------

def pair_groupoid():
    M = make_patch("M", ["x", "y"], [[0, 0], [1, 2], [-1, 1]])
    gc = ["p1", "p2", "q1", "q2"]
    G = make_patch("G", gc, [[0, 0, 0, 0], [1, 2, 0, 1], [2, -1, 1, 1],
                             [0, 1, -1, 2], [1, 1, 1, 1]])
    G2 = make_patch("G2", gc + ["r1", "r2"],
                    [[0, 0, 0, 0, 0, 0], [1, 2, 0, 1, -1, 1], [2, 0, 1, 1, 0, 2]])
    G3 = make_patch("G3", gc + ["r1", "r2", "w1", "w2"],
                    [[0] * 8, [1, 2, 0, 1, -1, 1, 2, 0]])

    s = projection(G, M, ["q1", "q2"])
    t = projection(G, M, ["p1", "p2"])
    u = SmoothMap(M, G, [sv("x"), sv("y"), sv("x"), sv("y")])
    i = projection(G, G, ["q1", "q2", "p1", "p2"])

    pr1 = projection(G2, G, gc)
    pr2 = projection(G2, G, ["q1", "q2", "r1", "r2"])
    m = projection(G2, G, ["p1", "p2", "r1", "r2"])

    gga = [f"a{i}" for i in range(1, 5)]
    ggb = [f"b{i}" for i in range(1, 5)]
    GG = make_patch("GG", gga + ggb, [[0] * 8, [1, 2, 0, 1, 0, 1, -1, 1]])
    legA = projection(GG, G, gga)
    legB = projection(GG, G, ggb)
    asm2 = SmoothMap(GG, G2, [sv(v) for v in gga] + [sv("b3"), sv("b4")])
    g2 = FiberChart2(G2, pr1, pr2, m, Assembler(GG, [legA, legB], asm2))

    ggc = [f"c{i}" for i in range(1, 5)]
    GGG = make_patch("GGG", gga + ggb + ggc,
                     [[0] * 12, [1, 2, 0, 1, 0, 1, -1, 1, -1, 1, 2, 2]])
    leg3 = [projection(GGG, G, block) for block in (gga, ggb, ggc)]
    asm3 = SmoothMap(GGG, G3, [sv(v) for v in gga] + [sv("b3"), sv("b4"),
                                                      sv("c3"), sv("c4")])
    g3 = FiberChart3(G3, projection(G3, G, gc), projection(G3, G, ["q1", "q2", "r1", "r2"]),
                     projection(G3, G, ["r1", "r2", "w1", "w2"]),
                     Assembler(GGG, leg3, asm3))

    pres = GroupoidPresentation(G, M, s, t, u, i, g2, g3, name="pair")
    tau = canonical_two_form(G, [("p1", "p2", 1)])   # t* omega
    sigma = canonical_two_form(G, [("q1", "q2", 1)])  # s* omega
    omega = canonical_two_form(M, [("x", "y", 1)])
    base = DiracStructure.from_two_form(M, omega)
    return DLieGroupoid(pres, base, GaugePair(tau, sigma))


# ---------------------------------------------------------------------------
# Dirac structures on R^3
# ---------------------------------------------------------------------------

def r3_patch():
    return make_patch("so3", ["x", "y", "z"],
                      [[0, 0, 1], [1, 2, 3], [0, 0, 0], [-1, 1, 2], [2, 0, -1]])

def so3_dirac(patch=None):
    patch = patch or r3_patch()
    x, y, z = (sv(v) for v in ("x", "y", "z"))
    P = [[ZERO, z, -y], [-z, ZERO, x], [y, -x, ZERO]]
    return DiracStructure.from_bivector(patch, P)


def nonjacobi_dirac(patch=None):
    patch = patch or r3_patch()
    x, y = sv("x"), sv("y")
    P = [[ZERO, x, -y], [-x, ZERO, x], [y, -x, ZERO]]
    return DiracStructure.from_bivector(patch, P)


def symplectic_r2():
    M = make_patch("M", ["x", "y"], [[0, 0], [1, 2], [-1, 1]])
    omega = canonical_two_form(M, [("x", "y", 1)])
    return M, omega, DiracStructure.from_two_form(M, omega)


# ---------------------------------------------------------------------------
# bundles
# ---------------------------------------------------------------------------

def _action_from_g2(g):
    p = g.presentation
    return ActionChart(p.g2.chart, p.g2.pr1, p.g2.pr2, p.g2.m, p.g2.assembler)


def cotangent_self_bibundle(n=1):
    """The cotangent groupoid acting on itself on both sides."""
    g = cotangent_groupoid(n)
    p = g.presentation
    xs = [f"x{i}" for i in range(1, n + 1)]
    ps = [f"p{i}" for i in range(1, n + 1)]
    vs = [f"v{i}" for i in range(1, n + 1)]
    PP = make_patch("PP", xs + ps + vs,
                    [[k % 3 - 1 for _ in xs] + [(k + j) % 3 for j, _ in enumerate(ps)]
                     + [(k + 2 * j) % 3 - 1 for j, _ in enumerate(vs)] for k in range(3)])
    pr1 = projection(PP, p.arrows, xs + ps)
    pr2 = projection(PP, p.arrows, xs + vs)
    GG = p.g2.assembler.product
    gga = [f"a{i}" for i in range(1, 2 * n + 1)]
    ggb = [f"b{i}" for i in range(1, 2 * n + 1)]
    asm_pp = SmoothMap(GG, PP, [sv(v) for v in gga] + [sv(v) for v in ggb[n:]])
    pairs = PairsChart(PP, pr1, pr2, Assembler(
        GG, [projection(GG, p.arrows, gga), projection(GG, p.arrows, ggb)], asm_pp))
    division = SmoothMap(PP, p.arrows,
                         [sv(x) for x in xs] + [sv(a) - sv(b) for a, b in zip(ps, vs)])
    assoc = TripleChart(p.g3.chart, p.g3.pr1, p.g3.pr2, p.g3.pr3)
    left = PrincipalBundle(g, p.arrows, p.objects, p.s, p.t,
                           DifferentialForm.zero(p.arrows, 2), g.omega,
                           _action_from_g2(g), assoc, pairs, division,
                           name="cotangent-self")
    return Bibundle(left, g, _action_from_g2(g), assoc, assoc, name="cotangent-self")


def pair_self_bibundle():
    """The aligned pair groupoid of symplectic R^2 as a self-bibundle."""
    g0 = pair_groupoid()
    g = DLieGroupoid(g0.presentation, g0.base_dirac,
                     GaugePair(g0.omega, DifferentialForm.zero(g0.presentation.arrows, 2)))
    p = g.presentation
    gc = ["p1", "p2", "q1", "q2"]
    PP = make_patch("PP", gc + ["w1", "w2"],
                    [[0, 0, 0, 0, 0, 0], [1, 2, 0, 1, 2, 2], [2, 0, 1, 1, 0, 1]])
    pr1 = projection(PP, p.arrows, gc)
    pr2 = projection(PP, p.arrows, ["w1", "w2", "q1", "q2"])
    GG = p.g2.assembler.product
    gga = [f"a{i}" for i in range(1, 5)]
    ggb = [f"b{i}" for i in range(1, 5)]
    asm_pp = SmoothMap(GG, PP, [sv(v) for v in gga] + [sv("b1"), sv("b2")])
    pairs = PairsChart(PP, pr1, pr2, Assembler(
        GG, [projection(GG, p.arrows, gga), projection(GG, p.arrows, ggb)], asm_pp))
    division = projection(PP, p.arrows, ["p1", "p2", "w1", "w2"])
    assoc = TripleChart(p.g3.chart, p.g3.pr1, p.g3.pr2, p.g3.pr3)
    left = PrincipalBundle(g, p.arrows, p.objects, p.s, p.t,
                           DifferentialForm.zero(p.arrows, 2), g.omega,
                           _action_from_g2(g), assoc, pairs, division,
                           name="pair-self")
    return Bibundle(left, g, _action_from_g2(g), assoc, assoc, name="pair-self")


def cotangent_pullback_data():
    """Pullback of the trivial cotangent bundle (n=1) along R^2 -> R."""
    bib = cotangent_self_bibundle(1)
    b = bib.left
    g = b.groupoid
    p = g.presentation
    N1 = make_patch("N1", ["n1", "n2"], [[0, 0], [1, 2], [-1, 1]])
    f = SmoothMap(N1, p.objects, [sv("n1")])
    # source Dirac = pullback presentation of the zero Poisson structure
    from diracheck.dirac import GeneralizedSection
    src = DiracStructure(N1, [
        GeneralizedSection(N1, VectorField(N1, [ZERO, ZERO]),
                           DifferentialForm.d_coord(N1, "n1")),
        GeneralizedSection(N1, VectorField(N1, [ZERO, ONE]),
                           DifferentialForm.zero(N1, 1)),
    ])
    from diracheck.category import DManMorphism
    fmor = DManMorphism(f, DifferentialForm.zero(N1, 2), src, g.base_dirac)

    Q = make_patch("Q", ["x1", "p1", "n2"], [[0, 0, 0], [1, 2, 1], [-1, 1, 2]])
    pr_total = projection(Q, p.arrows, ["x1", "p1"])
    spq = projection(Q, N1, ["x1", "n2"])
    tpq = projection(Q, p.objects, ["x1"])
    AQ = make_patch("AQ", ["x1", "z1", "p1", "n2"],
                    [[0, 0, 0, 0], [1, 1, 2, 1], [-1, 2, 1, 2]])
    prg = projection(AQ, p.arrows, ["x1", "z1"])
    prq = projection(AQ, Q, ["x1", "p1", "n2"])
    act = SmoothMap(AQ, Q, [sv("x1"), sv("z1") + sv("p1"), sv("n2")])
    GQ = make_patch("GQ", ["a1", "a2", "b1", "b2", "b3"],
                    [[0, 0, 0, 0, 0], [1, 1, 1, 2, 1]])
    asm_aq = SmoothMap(GQ, AQ, [sv("a1"), sv("a2"), sv("b2"), sv("b3")])
    action = ActionChart(AQ, prg, prq, act, Assembler(
        GQ, [projection(GQ, p.arrows, ["a1", "a2"]),
             projection(GQ, Q, ["b1", "b2", "b3"])], asm_aq))
    A2Q = make_patch("A2Q", ["x1", "z1", "z2", "p1", "n2"],
                     [[0, 0, 0, 0, 0], [1, 1, 2, 2, 1]])
    assoc = TripleChart(A2Q, projection(A2Q, p.arrows, ["x1", "z1"]),
                        projection(A2Q, p.arrows, ["x1", "z2"]),
                        projection(A2Q, Q, ["x1", "p1", "n2"]))
    QQ = make_patch("QQ", ["x1", "p1", "v1", "n2"],
                    [[0, 0, 0, 0], [1, 2, 1, 1], [-1, 1, 0, 2]])
    qq1 = projection(QQ, Q, ["x1", "p1", "n2"])
    qq2 = projection(QQ, Q, ["x1", "v1", "n2"])
    QxQ = make_patch("QxQ", ["a1", "a2", "a3", "b1", "b2", "b3"],
                     [[0, 0, 0, 0, 0, 0], [1, 2, 1, 1, 0, 1]])
    asm_qq = SmoothMap(QxQ, QQ, [sv("a1"), sv("a2"), sv("b2"), sv("a3")])
    pairs = PairsChart(QQ, qq1, qq2, Assembler(
        QxQ, [projection(QxQ, Q, ["a1", "a2", "a3"]),
              projection(QxQ, Q, ["b1", "b2", "b3"])], asm_qq))
    division = SmoothMap(QQ, p.arrows, [sv("x1"), sv("p1") - sv("v1")])
    skeleton = PrincipalBundle(g, Q, N1, spq, tpq,
                               DifferentialForm.zero(Q, 2),
                               DifferentialForm.zero(Q, 2),
                               action, assoc, pairs, division, name="Q-skeleton")
    return b, fmor, skeleton, pr_total


def tensor_with_unit_data(n=1):
    """P x_M unit-bibundle chart data for the cotangent self-bibundle."""
    bib = cotangent_self_bibundle(n)
    g = bib.left.groupoid
    p = g.presentation
    assert n == 1
    W = p.g2.chart                  # pairs (p, q) with s(p) = t(q): chart (x1, p1, r1)
    pr_p = p.g2.pr1
    pr_q = p.g2.pr2
    AW = make_patch("AW", ["x1", "z1", "p1", "r1"],
                    [[0, 0, 0, 0], [1, 1, 2, -1], [2, -1, 1, 1]])
    prg = projection(AW, p.arrows, ["x1", "z1"])
    prw = projection(AW, W, ["x1", "p1", "r1"])
    act = SmoothMap(AW, W, [sv("x1"), sv("p1") - sv("z1"), sv("z1") + sv("r1")])
    GW = make_patch("GW", ["a1", "a2", "b1", "b2", "b3"],
                    [[0, 0, 0, 0, 0], [1, 1, 1, 2, -1]])
    asm_aw = SmoothMap(GW, AW, [sv("a1"), sv("a2"), sv("b2"), sv("b3")])
    diag = ActionChart(AW, prg, prw, act, Assembler(
        GW, [projection(GW, p.arrows, ["a1", "a2"]),
             projection(GW, W, ["b1", "b2", "b3"])], asm_aw))
    vertical = [VectorField(W, [ZERO, -ONE, ONE])]
    V = make_patch("V", ["x1", "p1"], [[0, 0], [1, 2], [-1, 1]])
    qmap = SmoothMap(W, V, [sv("x1"), sv("p1") + sv("r1")])
    section = SmoothMap(V, W, [sv("x1"), sv("p1"), ZERO])
    return bib, W, pr_p, pr_q, diag, vertical, (V, qmap, section)
