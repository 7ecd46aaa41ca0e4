"""Coordinate patches, polynomial maps, vector fields and differential forms.

Patches model open subsets of affine space cut out by nonvanishing
constraints; every construction is verified chart-by-chart, so there are no
atlases or transition functions here.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import (
    DegreeZero,
    DiracheckError,
    PatchMismatch,
    PoleAtPoint,
    PoleAtSample,
    WrongDegree,
)
from .scalar import Poly, ScalarExpr


class Patch:
    """A named chart: ordered coordinates, sample points, nonvanishing constraints."""

    __slots__ = ("name", "coords", "samples", "constraints")

    def __init__(self, name: str, coords: Sequence[str], samples: Sequence[Mapping[str, Fraction]],
                 constraints: Sequence[ScalarExpr] = ()):
        coords = tuple(coords)
        if len(set(coords)) != len(coords):
            raise DiracheckError(f"patch {name}: duplicate coordinate name")
        if not samples:
            raise DiracheckError(f"patch {name}: needs at least one sample point")
        pts = []
        for s in samples:
            s = {k: Fraction(v) for k, v in s.items()}
            if set(s) != set(coords):
                raise DiracheckError(f"patch {name}: sample keys do not match coordinates")
            pts.append(s)
        seen = set()
        for s in pts:
            key = tuple(s[c] for c in coords)
            if key in seen:
                raise DiracheckError(f"patch {name}: sample points must be pairwise distinct")
            seen.add(key)
        for c in constraints:
            for s in pts:
                try:
                    val = c.evaluate(s)
                except PoleAtPoint:
                    raise DiracheckError(f"patch {name}: constraint has a pole at a sample")
                if val == 0:
                    raise DiracheckError(f"patch {name}: sample violates constraint {c}")
        self.name = name
        self.coords = coords
        self.samples = tuple(pts)
        self.constraints = tuple(constraints)

    @property
    def dim(self) -> int:
        return len(self.coords)

    def index_of(self, coord: str) -> int:
        return self.coords.index(coord)

    def check_expr(self, e: ScalarExpr, what: str = "expression"):
        extra = e.variables() - set(self.coords)
        if extra:
            raise PatchMismatch(f"{what} uses variables {sorted(extra)} not on patch {self.name}")

    def __repr__(self):
        return f"Patch({self.name}, dim={self.dim})"


class SmoothMap:
    """Polynomial-or-rational map between patches, one component per target coordinate."""

    __slots__ = ("source", "target", "components")

    def __init__(self, source: Patch, target: Patch, components: Sequence[ScalarExpr],
                 check_samples: bool = True):
        components = tuple(components)
        if len(components) != target.dim:
            raise DiracheckError(
                f"map {source.name}->{target.name}: expected {target.dim} components")
        for c in components:
            source.check_expr(c, "map component")
        if check_samples:
            for s in source.samples:
                try:
                    img = {t: c.evaluate(s) for t, c in zip(target.coords, components)}
                except PoleAtPoint:
                    raise PoleAtSample(
                        f"map {source.name}->{target.name}: component pole at sample {s}")
                for con in target.constraints:
                    if con.evaluate(img) == 0:
                        raise DiracheckError(
                            f"map {source.name}->{target.name}: sample image violates "
                            f"target constraint {con}")
        self.source = source
        self.target = target
        self.components = components

    @classmethod
    def identity(cls, patch: Patch) -> "SmoothMap":
        return cls(patch, patch, [ScalarExpr.var(c) for c in patch.coords])

    def then(self, g: "SmoothMap") -> "SmoothMap":
        """self followed by g (i.e. g o self)."""
        if g.source is not self.target and g.source.coords != self.target.coords:
            raise PatchMismatch(
                f"cannot compose {self.source.name}->{self.target.name} with "
                f"{g.source.name}->{g.target.name}")
        assignment = dict(zip(self.target.coords, self.components))
        comps = [c.substitute(assignment) for c in g.components]
        return SmoothMap(self.source, g.target, comps)

    def image_of(self, sample: Mapping[str, Fraction]) -> dict:
        return {t: c.evaluate(sample) for t, c in zip(self.target.coords, self.components)}

    def jacobian(self):
        """target.dim x source.dim matrix of partials, entries on the source."""
        return [[c.diff(u) for u in self.source.coords] for c in self.components]

    def equals(self, other: "SmoothMap") -> bool:
        return (self.source.coords == other.source.coords
                and self.target.coords == other.target.coords
                and all(a == b for a, b in zip(self.components, other.components)))

    def is_coordinate_projection(self):
        """If each component is a plain variable, return their names; else None."""
        names = []
        for c in self.components:
            if not c.is_polynomial() or len(c.num.terms) != 1:
                return None
            (mono, coeff), = c.num.terms.items()
            if coeff != 1 or len(mono) != 1 or mono[0][1] != 1:
                return None
            names.append(mono[0][0])
        return tuple(names)

    def __repr__(self):
        return f"SmoothMap({self.source.name}->{self.target.name})"


class VectorField:
    __slots__ = ("patch", "components")

    def __init__(self, patch: Patch, components: Sequence[ScalarExpr]):
        components = tuple(components)
        if len(components) != patch.dim:
            raise DiracheckError(f"vector field on {patch.name}: wrong component count")
        for c in components:
            patch.check_expr(c, "vector field component")
        self.patch = patch
        self.components = components

    @classmethod
    def zero(cls, patch: Patch) -> "VectorField":
        return cls(patch, [ScalarExpr.zero()] * patch.dim)

    def add(self, other: "VectorField") -> "VectorField":
        _same_patch(self.patch, other.patch)
        return VectorField(self.patch, [a + b for a, b in zip(self.components, other.components)])

    def scale(self, f: ScalarExpr) -> "VectorField":
        return VectorField(self.patch, [f * c for c in self.components])

    def apply_to(self, f: ScalarExpr) -> ScalarExpr:
        """Directional derivative v(f)."""
        out = ScalarExpr.zero()
        for c, x in zip(self.components, self.patch.coords):
            out = out + c * f.diff(x)
        return out

    def bracket(self, other: "VectorField") -> "VectorField":
        """Lie bracket [self, other]."""
        _same_patch(self.patch, other.patch)
        comps = []
        for j in range(self.patch.dim):
            comps.append(self.apply_to(other.components[j]) - other.apply_to(self.components[j]))
        return VectorField(self.patch, comps)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def eval_at(self, sample) -> list:
        return [c.evaluate(sample) for c in self.components]

    def __eq__(self, other):
        return (isinstance(other, VectorField) and self.patch.coords == other.patch.coords
                and self.components == other.components)

    def __str__(self):
        parts = [f"({c}) d/d{x}" for c, x in zip(self.components, self.patch.coords)
                 if not c.is_zero()]
        return " + ".join(parts) if parts else "0"


def _same_patch(a: Patch, b: Patch):
    if a is not b and a.coords != b.coords:
        raise PatchMismatch(f"patches {a.name} and {b.name} differ")


def _merge_sign(i_tuple, j_tuple):
    """Sign of the shuffle merging two disjoint increasing index tuples, or 0."""
    merged = list(i_tuple) + list(j_tuple)
    if len(set(merged)) != len(merged):
        return 0, ()
    inversions = 0
    for a in i_tuple:
        for b in j_tuple:
            if a > b:
                inversions += 1
    return (-1) ** inversions, tuple(sorted(merged))


class DifferentialForm:
    """Degree-k form; coefficients keyed by strictly increasing coordinate index tuples."""

    __slots__ = ("patch", "degree", "coeffs")

    def __init__(self, patch: Patch, degree: int, coeffs: Mapping[tuple, ScalarExpr] | None = None):
        # degree > patch.dim is allowed but forces the zero form
        if degree < 0:
            raise WrongDegree(f"negative degree on {patch.name}")
        clean: dict = {}
        for idx, c in (coeffs or {}).items():
            idx = tuple(idx)
            if len(idx) != degree:
                raise DiracheckError("coefficient index arity does not match degree")
            if any(i < 0 or i >= patch.dim for i in idx):
                raise DiracheckError("coefficient index out of range")
            if list(idx) != sorted(set(idx)):
                raise DiracheckError("coefficient indices must be strictly increasing")
            patch.check_expr(c, "form coefficient")
            if not c.is_zero():
                clean[idx] = c
        self.patch = patch
        self.degree = degree
        self.coeffs = clean

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, patch: Patch, degree: int) -> "DifferentialForm":
        return cls(patch, degree, {})

    @classmethod
    def function(cls, patch: Patch, f: ScalarExpr) -> "DifferentialForm":
        return cls(patch, 0, {(): f})

    @classmethod
    def d_coord(cls, patch: Patch, coord: str) -> "DifferentialForm":
        return cls(patch, 1, {(patch.index_of(coord),): ScalarExpr.one()})

    @classmethod
    def from_matrix(cls, patch: Patch, mat) -> "DifferentialForm":
        """Two-form with coefficient mat[i][j] on dx_i^dx_j (mat skew)."""
        coeffs = {}
        for i in range(patch.dim):
            for j in range(i + 1, patch.dim):
                coeffs[(i, j)] = mat[i][j]
        return cls(patch, 2, coeffs)

    # -- ring structure -------------------------------------------------------

    def add(self, other: "DifferentialForm") -> "DifferentialForm":
        _same_patch(self.patch, other.patch)
        if self.degree != other.degree:
            raise WrongDegree("cannot add forms of different degree")
        out = dict(self.coeffs)
        for idx, c in other.coeffs.items():
            s = out.get(idx, ScalarExpr.zero()) + c
            if s.is_zero():
                out.pop(idx, None)
            else:
                out[idx] = s
        return DifferentialForm(self.patch, self.degree, out)

    def neg(self) -> "DifferentialForm":
        return DifferentialForm(self.patch, self.degree,
                                {i: -c for i, c in self.coeffs.items()})

    def sub(self, other: "DifferentialForm") -> "DifferentialForm":
        return self.add(other.neg())

    def scale(self, f: ScalarExpr) -> "DifferentialForm":
        return DifferentialForm(self.patch, self.degree,
                                {i: f * c for i, c in self.coeffs.items()})

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        return (isinstance(other, DifferentialForm)
                and self.patch.coords == other.patch.coords
                and self.degree == other.degree and self.coeffs == other.coeffs)

    # -- exterior calculus -----------------------------------------------------

    def wedge(self, other: "DifferentialForm") -> "DifferentialForm":
        _same_patch(self.patch, other.patch)
        deg = self.degree + other.degree
        out: dict = {}
        for i1, c1 in self.coeffs.items():
            for i2, c2 in other.coeffs.items():
                sign, merged = _merge_sign(i1, i2)
                if sign == 0:
                    continue
                c = c1 * c2 if sign > 0 else -(c1 * c2)
                s = out.get(merged, ScalarExpr.zero()) + c
                if s.is_zero():
                    out.pop(merged, None)
                else:
                    out[merged] = s
        return DifferentialForm(self.patch, deg, out)

    def exterior_derivative(self) -> "DifferentialForm":
        if self.degree >= self.patch.dim:
            return DifferentialForm.zero(self.patch, self.degree + 1)
        out: dict = {}
        for idx, c in self.coeffs.items():
            for j, x in enumerate(self.patch.coords):
                dc = c.diff(x)
                if dc.is_zero():
                    continue
                sign, merged = _merge_sign((j,), idx)
                if sign == 0:
                    continue
                term = dc if sign > 0 else -dc
                s = out.get(merged, ScalarExpr.zero()) + term
                if s.is_zero():
                    out.pop(merged, None)
                else:
                    out[merged] = s
        return DifferentialForm(self.patch, self.degree + 1, out)

    def pullback(self, f: SmoothMap) -> "DifferentialForm":
        """Pullback along f; self lives on f.target, result on f.source."""
        if f.target.coords != self.patch.coords:
            raise PatchMismatch("form does not live on the map's target")
        src = f.source
        assignment = dict(zip(self.patch.coords, f.components))
        if self.degree == 0:
            c = self.coeffs.get((), ScalarExpr.zero())
            return DifferentialForm.function(src, c.substitute(assignment))
        # df_i as 1-forms on the source
        dfs = []
        for comp in f.components:
            coeffs = {}
            for j, u in enumerate(src.coords):
                d = comp.diff(u)
                if not d.is_zero():
                    coeffs[(j,)] = d
            dfs.append(DifferentialForm(src, 1, coeffs))
        out = DifferentialForm.zero(src, self.degree)
        for idx, c in self.coeffs.items():
            piece = DifferentialForm.function(src, c.substitute(assignment))
            for i in idx:
                piece = piece.wedge(dfs[i])
            out = out.add(piece)
        return out

    def interior(self, v: VectorField) -> "DifferentialForm":
        _same_patch(self.patch, v.patch)
        if self.degree == 0:
            raise DegreeZero("interior product needs degree >= 1")
        out: dict = {}
        for idx, c in self.coeffs.items():
            for pos, i in enumerate(idx):
                vc = v.components[i]
                if vc.is_zero():
                    continue
                rest = idx[:pos] + idx[pos + 1:]
                term = c * vc if pos % 2 == 0 else -(c * vc)
                s = out.get(rest, ScalarExpr.zero()) + term
                if s.is_zero():
                    out.pop(rest, None)
                else:
                    out[rest] = s
        return DifferentialForm(self.patch, self.degree - 1, out)

    def lie_derivative(self, v: VectorField) -> "DifferentialForm":
        """Cartan formula: L_v = d o iota_v + iota_v o d."""
        _same_patch(self.patch, v.patch)
        da = self.exterior_derivative().interior(v)
        if self.degree == 0:
            return da
        return self.interior(v).exterior_derivative().add(da)

    def flat(self, v: VectorField) -> "DifferentialForm":
        """beta_flat(v) := iota_v beta for a 2-form beta."""
        if self.degree != 2:
            raise WrongDegree("flat map requires a 2-form")
        return self.interior(v)

    def apply_1form(self, v: VectorField) -> ScalarExpr:
        if self.degree != 1:
            raise WrongDegree("can only evaluate a 1-form on a vector field")
        _same_patch(self.patch, v.patch)
        out = ScalarExpr.zero()
        for (i,), c in self.coeffs.items():
            out = out + c * v.components[i]
        return out

    def matrix(self):
        """Skew matrix M[i][j] = coefficient of the 2-form on (d x_i, d x_j)."""
        if self.degree != 2:
            raise WrongDegree("matrix form requires degree 2")
        n = self.patch.dim
        zero = ScalarExpr.zero()
        mat = [[zero for _ in range(n)] for _ in range(n)]
        for (i, j), c in self.coeffs.items():
            mat[i][j] = c
            mat[j][i] = -c
        return mat

    def eval_matrix(self, sample):
        """Rational skew matrix of a 2-form at a sample point."""
        mat = self.matrix()
        return [[e.evaluate(sample) for e in row] for row in mat]

    def __str__(self):
        if not self.coeffs:
            return "0"
        names = self.patch.coords
        parts = []
        for idx in sorted(self.coeffs):
            c = self.coeffs[idx]
            basis = "^".join(f"d{names[i]}" for i in idx)
            cs = str(c)
            if cs == "1" and basis:
                parts.append(basis)
            elif basis:
                wrap = cs if (" " not in cs and "/" not in cs[1:]) else f"({cs})"
                parts.append(f"{wrap} {basis}")
            else:
                parts.append(cs)
        return " + ".join(parts)

    def __repr__(self):
        return f"DifferentialForm({self.patch.name}, deg={self.degree}, {self})"


def wedge(a: DifferentialForm, b: DifferentialForm) -> DifferentialForm:
    return a.wedge(b)


def exterior_derivative(a: DifferentialForm) -> DifferentialForm:
    return a.exterior_derivative()


def pullback_form(f: SmoothMap, a: DifferentialForm) -> DifferentialForm:
    return a.pullback(f)


def interior_product(v: VectorField, a: DifferentialForm) -> DifferentialForm:
    return a.interior(v)


def lie_derivative(v: VectorField, a: DifferentialForm) -> DifferentialForm:
    return a.lie_derivative(v)


def flat(a: DifferentialForm, v: VectorField) -> DifferentialForm:
    return a.flat(v)
