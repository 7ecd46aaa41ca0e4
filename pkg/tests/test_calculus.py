import random
from fractions import Fraction as F

import pytest

from diracheck.calculus import DifferentialForm, Patch, SmoothMap, VectorField
from diracheck.errors import DegreeZero, PatchMismatch, WrongDegree
from diracheck.scalar import ScalarExpr

from fixtures import make_patch, sv, ZERO, ONE

R2 = make_patch("M", ["x", "y"], [[0, 0], [1, 2], [-1, 3]])
R3 = make_patch("P", ["x", "y", "z"], [[0, 0, 0], [1, 2, 3]])
X, Y = sv("x"), sv("y")
DX = DifferentialForm.d_coord(R2, "x")
DY = DifferentialForm.d_coord(R2, "y")
EX = VectorField(R2, [ONE, ZERO])
EY = VectorField(R2, [ZERO, ONE])


def d3(c):
    return DifferentialForm.d_coord(R3, c)


def test_wedge_area_form():
    w = DX.wedge(DY)
    assert w.coeffs == {(0, 1): ONE}


def test_wedge_alternation():
    assert DX.wedge(DX).is_zero()


def test_wedge_scalar_coefficient():
    w = d3("y").scale(sv("x")).wedge(d3("z"))
    assert w.coeffs == {(1, 2): sv("x")}


def test_wedge_graded_commutativity():
    a = DX.scale(X)
    b = DY.scale(Y + 1)
    assert a.wedge(b).add(b.wedge(a)).is_zero()


def test_exterior_derivative_basic():
    assert DY.scale(X).exterior_derivative() == DX.wedge(DY)
    assert DX.wedge(DY).exterior_derivative().is_zero()
    f = DifferentialForm.function(R2, X * X)
    assert f.exterior_derivative() == DX.scale(2 * X)


def test_d_squared_zero_random():
    rng = random.Random(3)
    coords = R3.coords
    for _ in range(20):
        coeffs = {}
        for i in range(3):
            c = ScalarExpr.from_rational(rng.randint(-3, 3)) * sv(coords[rng.randint(0, 2)])
            coeffs[(i,)] = c
        a = DifferentialForm(R3, 1, coeffs)
        assert a.exterior_derivative().exterior_derivative().is_zero()


def test_pullback_rank_deficiency():
    R1 = make_patch("N", ["u"], [[0], [1]])
    inc = SmoothMap(R1, R2, [sv("u"), ZERO])
    assert DX.wedge(DY).pullback(inc).is_zero()


def test_pullback_identity():
    idm = SmoothMap.identity(R2)
    a = DX.wedge(DY).scale(X)
    assert a.pullback(idm) == a


def test_pullback_linear_change():
    P = make_patch("Q", ["u", "v"], [[0, 0], [1, 1]])
    f = SmoothMap(P, R2, [sv("u") + sv("v"), sv("u") - sv("v")])
    pulled = DX.wedge(DY).pullback(f)
    du = DifferentialForm.d_coord(P, "u")
    dv = DifferentialForm.d_coord(P, "v")
    assert pulled == du.wedge(dv).scale(ScalarExpr.from_rational(-2))


def test_pullback_functorial():
    P = make_patch("Q", ["u", "v", "w"], [[0, 0, 0], [1, 2, 1]])
    f = SmoothMap(P, R2, [sv("u") * sv("v"), sv("w") + 1])
    g = SmoothMap(R2, R3, [X, X * Y, Y])
    a = d3("x").wedge(d3("y")).scale(sv("z"))
    via_compose = a.pullback(f.then(g))
    via_steps = a.pullback(g).pullback(f)
    assert via_compose == via_steps


def test_pullback_commutes_with_d_and_wedge():
    P = make_patch("Q", ["u", "v"], [[0, 0], [2, 1]])
    f = SmoothMap(P, R2, [sv("u") * sv("u"), sv("u") + sv("v")])
    a = DX.scale(Y)
    b = DY.scale(X * X)
    assert a.pullback(f).exterior_derivative() == a.exterior_derivative().pullback(f)
    assert a.wedge(b).pullback(f) == a.pullback(f).wedge(b.pullback(f))


def test_interior_product_examples():
    assert DX.wedge(DY).interior(EX) == DY
    assert DX.wedge(DY).interior(EY) == DX.neg()
    assert DY.interior(VectorField(R2, [X, ZERO])).is_zero()


def test_interior_product_degree_zero_rejected():
    with pytest.raises(DegreeZero):
        DifferentialForm.function(R2, X).interior(EX)


def test_interior_squared_zero():
    v = VectorField(R3, [sv("x"), sv("y") + 1, sv("z") * sv("x")])
    a = d3("x").wedge(d3("y")).wedge(d3("z")).scale(sv("y"))
    assert a.interior(v).interior(v).is_zero()


def test_interior_antiderivation():
    v = VectorField(R3, [sv("z"), ONE, sv("x")])
    a = d3("x").scale(sv("y"))
    b = d3("y").wedge(d3("z")).scale(sv("x"))
    lhs = a.wedge(b).interior(v)
    rhs = a.interior(v).wedge(b).add(a.wedge(b.interior(v)).neg())
    assert lhs == rhs


def test_lie_derivative_examples():
    assert DY.scale(X).lie_derivative(EX) == DY
    assert DY.lie_derivative(EX).is_zero()
    assert DX.lie_derivative(VectorField(R2, [X, ZERO])) == DX


def test_lie_derivative_commutes_with_d():
    v = VectorField(R2, [X * Y, Y + 1])
    a = DX.scale(X + Y)
    assert a.exterior_derivative().lie_derivative(v) == \
        a.lie_derivative(v).exterior_derivative()


def test_flat_examples():
    assert DX.wedge(DY).flat(EX) == DY
    assert DifferentialForm.zero(R2, 2).flat(EY).is_zero()
    xi = make_patch("T", ["q", "xi"], [[0, 0], [1, 1]])
    two = DifferentialForm.d_coord(xi, "xi").wedge(DifferentialForm.d_coord(xi, "q"))
    dxi = VectorField(xi, [ZERO, ONE])
    assert two.flat(dxi) == DifferentialForm.d_coord(xi, "q")
    with pytest.raises(WrongDegree):
        DX.flat(EX)


def test_patch_mismatch_errors():
    other = make_patch("O", ["u", "v"], [[0, 0]])
    du = DifferentialForm.d_coord(other, "u")
    with pytest.raises(PatchMismatch):
        DX.wedge(du)
    with pytest.raises(PatchMismatch):
        DX.interior(VectorField(other, [ZERO, ZERO]))


def test_patch_validation():
    with pytest.raises(Exception):
        Patch("bad", ["x", "x"], [{"x": F(0)}])
    with pytest.raises(Exception):
        Patch("bad", ["x"], [{"x": F(0)}, {"x": F(0)}])
    with pytest.raises(Exception):
        Patch("bad", ["x"], [{"x": F(0)}], [sv("x")])


def test_smooth_map_validation():
    chart = make_patch("C", ["x"], [[1], [2]], [sv("x")])
    with pytest.raises(Exception):
        SmoothMap(R2, chart, [X - X])  # image hits the removed locus
    ok = SmoothMap(make_patch("D", ["u"], [[1], [3]]), chart, [sv("u")])
    assert ok.image_of({"u": F(1)}) == {"x": F(1)}
