"""Exact scalar arithmetic: multivariate polynomials over Q and their quotients.

Monomial order is graded lexicographic over alphabetically sorted variable
names, so canonical forms are reproducible across runs.  Coefficients are
`fractions.Fraction` throughout; there are no floats anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from .errors import DiracheckError, PoleAtPoint, ZeroDenominator

Rational = Fraction

# A monomial is a tuple of (variable, exponent) pairs, sorted by variable
# name, every exponent > 0.  The empty tuple is the constant monomial.
Monomial = tuple


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    exps: dict[str, int] = dict(a)
    for v, e in b:
        exps[v] = exps.get(v, 0) + e
    return tuple(sorted(exps.items()))


def _mono_deg(m: Monomial) -> int:
    return sum(e for _, e in m)


def _mono_cmp(a: Monomial, b: Monomial) -> int:
    """grlex comparison: 1 if a > b, -1 if a < b, 0 if equal."""
    if a == b:
        return 0
    da, db = _mono_deg(a), _mono_deg(b)
    if da != db:
        return 1 if da > db else -1
    ea, eb = dict(a), dict(b)
    for v in sorted(set(ea) | set(eb)):
        xa, xb = ea.get(v, 0), eb.get(v, 0)
        if xa != xb:
            return 1 if xa > xb else -1
    return 0


def _mono_sort_key(m: Monomial):
    """Key such that sorting ascending puts grlex-largest last."""
    return _MonoKey(m)


class _MonoKey:
    __slots__ = ("m",)

    def __init__(self, m):
        self.m = m

    def __lt__(self, other):
        return _mono_cmp(self.m, other.m) < 0

    def __eq__(self, other):
        return self.m == other.m


class Poly:
    """Multivariate polynomial with Fraction coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None, prune: bool = True):
        if terms is None:
            self.terms = {}
        elif prune:
            self.terms = {m: Fraction(c) for m, c in terms.items() if c != 0}
        else:
            self.terms = dict(terms)

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls) -> "Poly":
        return cls()

    @classmethod
    def const(cls, c) -> "Poly":
        c = Fraction(c)
        return cls({(): c}) if c else cls()

    @classmethod
    def var(cls, name: str) -> "Poly":
        return cls({((name, 1),): Fraction(1)})

    # -- basic queries -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(m == () for m in self.terms)

    def constant_value(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        if not self.is_constant():
            raise DiracheckError("polynomial is not constant")
        return self.terms[()]

    def variables(self) -> set:
        out = set()
        for m in self.terms:
            for v, _ in m:
                out.add(v)
        return out

    def total_degree(self) -> int:
        if not self.terms:
            return 0
        return max(_mono_deg(m) for m in self.terms)

    def leading_monomial(self) -> Monomial:
        if not self.terms:
            raise DiracheckError("zero polynomial has no leading monomial")
        best = None
        for m in self.terms:
            if best is None or _mono_cmp(m, best) > 0:
                best = m
        return best

    def leading_coeff(self) -> Fraction:
        return self.terms[self.leading_monomial()]

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "Poly") -> "Poly":
        res = dict(self.terms)
        for m, c in other.terms.items():
            s = res.get(m, Fraction(0)) + c
            if s:
                res[m] = s
            else:
                res.pop(m, None)
        return Poly(res, prune=False)

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()}, prune=False)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        if not self.terms or not other.terms:
            return Poly()
        res: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                s = res.get(m, Fraction(0)) + c1 * c2
                if s:
                    res[m] = s
                else:
                    res.pop(m, None)
        return Poly(res, prune=False)

    def scale(self, c) -> "Poly":
        c = Fraction(c)
        if not c:
            return Poly()
        return Poly({m: cc * c for m, cc in self.terms.items()}, prune=False)

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise DiracheckError("negative power of a polynomial")
        out = Poly.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- calculus ----------------------------------------------------------

    def diff(self, var: str) -> "Poly":
        res: dict = {}
        for m, c in self.terms.items():
            exps = dict(m)
            e = exps.get(var, 0)
            if not e:
                continue
            if e == 1:
                del exps[var]
            else:
                exps[var] = e - 1
            m2 = tuple(sorted(exps.items()))
            s = res.get(m2, Fraction(0)) + c * e
            if s:
                res[m2] = s
            else:
                res.pop(m2, None)
        return Poly(res, prune=False)

    def eval(self, point: Mapping[str, Fraction]) -> Fraction:
        total = Fraction(0)
        for m, c in self.terms.items():
            val = c
            for v, e in m:
                if v not in point:
                    raise DiracheckError(f"no value for variable {v!r}")
                val *= Fraction(point[v]) ** e
            total += val
        return total

    # -- division / gcd ----------------------------------------------------

    def div_exact(self, d: "Poly") -> "Poly":
        """Exact division; raises if d does not divide self."""
        if d.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if d.is_constant():
            return self.scale(1 / d.constant_value())
        rem = Poly(self.terms, prune=False)
        quo: dict = {}
        dlm = d.leading_monomial()
        dlc = d.terms[dlm]
        dexp = dict(dlm)
        while rem.terms:
            rlm = rem.leading_monomial()
            rexp = dict(rlm)
            qexp = {}
            for v, e in dexp.items():
                e2 = rexp.get(v, 0) - e
                if e2 < 0:
                    raise DiracheckError("not exactly divisible")
                if e2:
                    qexp[v] = e2
            for v, e in rexp.items():
                if v not in dexp and e:
                    qexp[v] = e
            qm = tuple(sorted(qexp.items()))
            qc = rem.terms[rlm] / dlc
            quo[qm] = qc
            rem = rem - d * Poly({qm: qc}, prune=False)
        return Poly(quo, prune=False)

    def _deg_in(self, v: str) -> int:
        d = 0
        for m in self.terms:
            for var, e in m:
                if var == v and e > d:
                    d = e
        return d

    def _as_univariate(self, v: str) -> dict:
        """Coefficients of powers of v, each a Poly in the other variables."""
        out: dict[int, dict] = {}
        for m, c in self.terms.items():
            exps = dict(m)
            e = exps.pop(v, 0)
            rest = tuple(sorted(exps.items()))
            out.setdefault(e, {})[rest] = c
        return {e: Poly(t, prune=False) for e, t in out.items()}


def _from_univariate(coeffs: dict, v: str) -> Poly:
    res: dict = {}
    for e, p in coeffs.items():
        vm = ((v, e),) if e else ()
        for m, c in p.terms.items():
            mm = _mono_mul(m, vm)
            s = res.get(mm, Fraction(0)) + c
            if s:
                res[mm] = s
            else:
                res.pop(mm, None)
    return Poly(res, prune=False)


def _content_in(p: Poly, v: str) -> Poly:
    cs = list(p._as_univariate(v).values())
    g = cs[0]
    for c in cs[1:]:
        g = poly_gcd(g, c)
        if g.is_constant():
            break
    return g


def _prem(a: Poly, b: Poly, v: str) -> Poly:
    """Pseudo-remainder of a by b viewed univariately in v."""
    da, db = a._deg_in(v), b._deg_in(v)
    if da < db:
        return a
    bu = b._as_univariate(v)
    blc = bu[db]
    r = a
    d = da - db + 1
    while not r.is_zero() and r._deg_in(v) >= db:
        dr = r._deg_in(v)
        ru = r._as_univariate(v)
        rlc = ru[dr]
        shift = Poly({((v, dr - db),): Fraction(1)}) if dr > db else Poly.const(1)
        r = r * blc - b * rlc * shift
        d -= 1
    for _ in range(d):
        r = r * blc
    return r


def _monomial_content(p: Poly) -> Monomial:
    """Largest monomial dividing every term."""
    exps = None
    for m in p.terms:
        cur = dict(m)
        if exps is None:
            exps = cur
        else:
            exps = {v: min(e, cur.get(v, 0)) for v, e in exps.items() if cur.get(v, 0)}
        if not exps:
            return ()
    return tuple(sorted(exps.items()))


def _mono_gcd(a: Monomial, b: Monomial) -> Monomial:
    ea, eb = dict(a), dict(b)
    out = {v: min(e, eb[v]) for v, e in ea.items() if v in eb}
    return tuple(sorted((v, e) for v, e in out.items() if e))


def _divide_monomial(p: Poly, m: Monomial) -> Poly:
    if not m:
        return p
    exps = dict(m)
    out = {}
    for mono, c in p.terms.items():
        cur = dict(mono)
        for v, e in exps.items():
            cur[v] = cur.get(v, 0) - e
            if not cur[v]:
                del cur[v]
        out[tuple(sorted(cur.items()))] = c
    return Poly(out, prune=False)


def _subresultant_gcd(a: Poly, b: Poly, v: str) -> Poly:
    """gcd of the v-primitive parts of a and b (subresultant PRS)."""
    if a._deg_in(v) < b._deg_in(v):
        a, b = b, a
    g = Poly.const(1)
    h = Poly.const(1)
    while True:
        d = a._deg_in(v) - b._deg_in(v)
        r = _prem(a, b, v)
        if r.is_zero():
            return b.div_exact(_content_in(b, v))
        if r._deg_in(v) == 0:
            return Poly.const(1)
        a, b = b, r.div_exact(g * h ** d)
        g = a._as_univariate(v)[a._deg_in(v)]
        if d == 1:
            h = g
        elif d > 1:
            h = (g ** d).div_exact(h ** (d - 1))


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """gcd in Q[x1..xn]; result normalized to a positive leading coefficient."""
    if a.is_zero():
        return b
    if b.is_zero():
        return a
    if a.is_constant() or b.is_constant():
        return Poly.const(1)
    if a == b or a == -b:
        out = a
        return out.scale(-1) if out.leading_coeff() < 0 else out
    ma, mb = _monomial_content(a), _monomial_content(b)
    mc = _mono_gcd(ma, mb)
    a = _divide_monomial(a, ma)
    b = _divide_monomial(b, mb)
    mono_part = Poly({mc: Fraction(1)}) if mc else Poly.const(1)
    if a.is_constant() or b.is_constant():
        return mono_part
    avs, bvs = a.variables(), b.variables()
    common = avs & bvs
    if not common:
        return mono_part
    v = min(sorted(common), key=lambda w: min(a._deg_in(w), b._deg_in(w)))
    ca, cb = _content_in(a, v), _content_in(b, v)
    c = poly_gcd(ca, cb)
    pa = a.div_exact(ca) if not ca.is_constant() else a
    pb = b.div_exact(cb) if not cb.is_constant() else b
    out = mono_part * c * _subresultant_gcd(pa, pb, v)
    if out.leading_coeff() < 0:
        out = out.scale(-1)
    return out


class ScalarExpr:
    """Canonical quotient of two polynomials.

    Invariants: denominator nonzero, gcd(num, den) constant, denominator's
    grlex leading coefficient is 1, and the zero expression is 0/1.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None, reduce: bool = True):
        if den is None:
            den = Poly.const(1)
        if den.is_zero():
            raise ZeroDenominator("denominator is the zero polynomial")
        if reduce:
            num, den = _reduce(num, den)
        self.num = num
        self.den = den

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_rational(cls, c) -> "ScalarExpr":
        return cls(Poly.const(Fraction(c)))

    @classmethod
    def var(cls, name: str) -> "ScalarExpr":
        return cls(Poly.var(name))

    @classmethod
    def zero(cls) -> "ScalarExpr":
        return cls(Poly.zero())

    @classmethod
    def one(cls) -> "ScalarExpr":
        return cls(Poly.const(1))

    # -- queries -----------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num == self.den

    def is_polynomial(self) -> bool:
        return self.den == Poly.const(1)

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> Fraction:
        return self.num.constant_value() / self.den.constant_value()

    def variables(self) -> set:
        return self.num.variables() | self.den.variables()

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        n1, d1, n2, d2 = self.num, self.den, other.num, other.den
        # Henrici's scheme: with both inputs reduced, the only possible
        # common factor of the sum sits inside gcd(d1, d2).
        g = poly_gcd(d1, d2)
        if g.is_constant():
            return ScalarExpr(n1 * d2 + n2 * d1, d1 * d2, reduce=False)._monic()
        d1r = d1.div_exact(g)
        d2r = d2.div_exact(g)
        t = n1 * d2r + n2 * d1r
        if t.is_zero():
            return ScalarExpr.zero()
        g2 = poly_gcd(t, g)
        if not g2.is_constant():
            t = t.div_exact(g2)
            g = g.div_exact(g2)
        return ScalarExpr(t, d1r * d2r * g, reduce=False)._monic()

    __radd__ = __add__

    def __neg__(self):
        return ScalarExpr(-self.num, self.den, reduce=False)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        n1, d1, n2, d2 = self.num, self.den, other.num, other.den
        if n1.is_zero() or n2.is_zero():
            return ScalarExpr.zero()
        g1 = poly_gcd(n1, d2)
        if not g1.is_constant():
            n1 = n1.div_exact(g1)
            d2 = d2.div_exact(g1)
        g2 = poly_gcd(n2, d1)
        if not g2.is_constant():
            n2 = n2.div_exact(g2)
            d1 = d1.div_exact(g2)
        return ScalarExpr(n1 * n2, d1 * d2, reduce=False)._monic()

    __rmul__ = __mul__

    def _monic(self):
        lc = self.den.leading_coeff()
        if lc == 1:
            return self
        return ScalarExpr(self.num.scale(1 / lc), self.den.scale(1 / lc), reduce=False)

    def __truediv__(self, other):
        other = _coerce(other)
        if other.num.is_zero():
            raise ZeroDenominator("division by the zero expression")
        flipped = ScalarExpr(other.den, other.num, reduce=False)._monic()
        return self * flipped

    def __rtruediv__(self, other):
        return _coerce(other) / self

    def __pow__(self, n: int):
        if n >= 0:
            return ScalarExpr(self.num ** n, self.den ** n)
        if self.num.is_zero():
            raise ZeroDenominator("negative power of zero")
        return ScalarExpr(self.den ** (-n), self.num ** (-n))

    def __eq__(self, other) -> bool:
        if not isinstance(other, (ScalarExpr, int, Fraction)):
            return NotImplemented
        other = _coerce(other)
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    # -- spec operations ----------------------------------------------------

    def normalize(self) -> "ScalarExpr":
        """Already canonical; returns self (kept as the spec's named op)."""
        return self

    def diff(self, var: str) -> "ScalarExpr":
        n, d = self.num, self.den
        return ScalarExpr(n.diff(var) * d - n * d.diff(var), d * d)

    def substitute(self, assignment: Mapping[str, "ScalarExpr"]) -> "ScalarExpr":
        num = _poly_subs(self.num, assignment)
        den = _poly_subs(self.den, assignment)
        if den.is_zero():
            raise ZeroDenominator("substitution produced an identically zero denominator")
        return num / den

    def evaluate(self, point: Mapping[str, Fraction]) -> Fraction:
        d = self.den.eval(point)
        if d == 0:
            raise PoleAtPoint(f"denominator vanishes at {dict(point)!r}")
        return self.num.eval(point) / d

    # -- rendering ----------------------------------------------------------

    def __str__(self) -> str:
        if self.is_polynomial():
            return _poly_str(self.num)
        return f"({_poly_str(self.num)})/({_poly_str(self.den)})"

    def __repr__(self) -> str:
        return f"ScalarExpr({self})"


def _coerce(x) -> ScalarExpr:
    if isinstance(x, ScalarExpr):
        return x
    if isinstance(x, (int, Fraction)):
        return ScalarExpr.from_rational(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to ScalarExpr")


def _reduce(num: Poly, den: Poly) -> tuple:
    if num.is_zero():
        return Poly.zero(), Poly.const(1)
    g = poly_gcd(num, den)
    if not g.is_constant():
        num = num.div_exact(g)
        den = den.div_exact(g)
    lc = den.leading_coeff()
    if lc != 1:
        num = num.scale(1 / lc)
        den = den.scale(1 / lc)
    return num, den


def _poly_subs(p: Poly, assignment: Mapping[str, ScalarExpr]) -> ScalarExpr:
    total = ScalarExpr.zero()
    for m, c in p.terms.items():
        term = ScalarExpr.from_rational(c)
        for v, e in m:
            img = assignment.get(v)
            if img is None:
                img = ScalarExpr.var(v)
            term = term * img ** e
        total = total + term
    return total


def _sorted_monomials(p: Poly):
    return sorted(p.terms, key=_mono_sort_key, reverse=True)


def _poly_str(p: Poly) -> str:
    if p.is_zero():
        return "0"
    parts = []
    for m in _sorted_monomials(p):
        c = p.terms[m]
        mono = "*".join(f"{v}^{e}" if e > 1 else v for v, e in m)
        if not mono:
            body = str(abs(c))
        elif abs(c) == 1:
            body = mono
        else:
            body = f"{abs(c)}*{mono}"
        sign = "-" if c < 0 else "+"
        parts.append((sign, body))
    first_sign, first_body = parts[0]
    out = ("-" if first_sign == "-" else "") + first_body
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


# RationalPoint: a plain mapping from variable names to Fractions.
RationalPoint = dict


def normalize(e: ScalarExpr) -> ScalarExpr:
    return e.normalize()


def differentiate(e: ScalarExpr, var: str) -> ScalarExpr:
    return e.diff(var)


def substitute(e: ScalarExpr, assignment: Mapping[str, ScalarExpr]) -> ScalarExpr:
    return e.substitute(assignment)


def evaluate(e: ScalarExpr, point: Mapping[str, Fraction]) -> Fraction:
    return e.evaluate(point)
