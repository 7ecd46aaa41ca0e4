"""Scene-file front end: s-expression grammar, validation, canonical printer.

parse_scene performs the whole static discipline: grammar, duplicate names,
reference resolution (forward references are forbidden), and well-formedness
of every embedded expression.  Mathematical failures (a sample violating a
constraint, a non-closed gauge form, a failing identity) are the runner's
business and become report entries, never parse errors.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import DuplicateName, SceneSyntaxError, UnknownReference

DECL_KINDS = ("patch", "map", "form", "vectorfield", "dirac", "morphism",
              "groupoid", "gaugepair", "bundle", "bibundle", "algebroid",
              "imform", "division", "attestation", "check")

CHECK_VERBS = ("check-dirac", "check-morphism", "check-diagram", "fiber-product",
               "universal-arrow", "check-groupoid", "check-dlie",
               "derive-gauge-parts", "check-gauge-axioms", "target-align",
               "check-dlie-morphism", "check-bundle", "pullback-bundle",
               "check-bundle-morphism", "glue", "bundle-from-morphism", "tensor",
               "check-nondegenerate", "check-algebroid", "check-im-form",
               "check-dlie-algebroid", "derive-im-form", "check-algebroid-morphism",
               "pullback-algebroid", "check-weak-equivalence")


class Sym:
    __slots__ = ("name", "line", "col")

    def __init__(self, name, line=0, col=0):
        self.name = name
        self.line = line
        self.col = col

    def __repr__(self):
        return self.name


class Kw:
    __slots__ = ("name", "line", "col")

    def __init__(self, name, line=0, col=0):
        self.name = name
        self.line = line
        self.col = col

    def __repr__(self):
        return ":" + self.name


class Str:
    __slots__ = ("value", "line", "col")

    def __init__(self, value, line=0, col=0):
        self.value = value
        self.line = line
        self.col = col


class Num:
    __slots__ = ("value", "line", "col")

    def __init__(self, value, line=0, col=0):
        self.value = Fraction(value)
        self.line = line
        self.col = col


class SList:
    __slots__ = ("items", "line", "col")

    def __init__(self, items, line=0, col=0):
        self.items = list(items)
        self.line = line
        self.col = col

    def __iter__(self):
        return iter(self.items)

    def __len__(self):
        return len(self.items)

    def __getitem__(self, i):
        return self.items[i]


_SYMBOL_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_SYMBOL_BODY = _SYMBOL_START | set("0123456789-!?*^+/<>=.")


def tokenize(text: str):
    tokens = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == ";":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if c in "()":
            tokens.append((c, None, start_line, start_col))
            i += 1
            col += 1
            continue
        if c == '"':
            i += 1
            col += 1
            out = []
            while i < n and text[i] != '"':
                if text[i] == "\\" and i + 1 < n:
                    nxt = text[i + 1]
                    out.append({"n": "\n", "t": "\t", '"': '"', "\\": "\\"}.get(nxt, nxt))
                    i += 2
                    col += 2
                elif text[i] == "\n":
                    raise SceneSyntaxError("unterminated string", start_line, start_col)
                else:
                    out.append(text[i])
                    i += 1
                    col += 1
            if i >= n:
                raise SceneSyntaxError("unterminated string", start_line, start_col)
            i += 1
            col += 1
            tokens.append(("str", "".join(out), start_line, start_col))
            continue
        if c == ":":
            j = i + 1
            while j < n and text[j] in _SYMBOL_BODY:
                j += 1
            if j == i + 1:
                raise SceneSyntaxError("empty keyword", start_line, start_col)
            tokens.append(("kw", text[i + 1:j], start_line, start_col))
            col += j - i
            i = j
            continue
        if c.isdigit() or (c in "+-" and i + 1 < n and text[i + 1].isdigit()):
            j = i + 1
            while j < n and (text[j].isdigit() or text[j] in "./"):
                j += 1
            word = text[i:j]
            try:
                if "/" in word:
                    num, den = word.split("/")
                    value = Fraction(int(num), int(den))
                elif "." in word:
                    whole, frac = word.split(".")
                    sign = -1 if whole.startswith("-") else 1
                    whole_i = int(whole) if whole not in ("", "-", "+") else 0
                    value = Fraction(whole_i) + sign * Fraction(int(frac or 0), 10 ** len(frac))
                else:
                    value = Fraction(int(word))
            except (ValueError, ZeroDivisionError):
                raise SceneSyntaxError(f"bad number literal {word!r}", start_line, start_col)
            tokens.append(("num", value, start_line, start_col))
            col += j - i
            i = j
            continue
        if c in _SYMBOL_START or c in "+-*/^<>=":
            j = i + 1
            while j < n and text[j] in _SYMBOL_BODY:
                j += 1
            tokens.append(("sym", text[i:j], start_line, start_col))
            col += j - i
            i = j
            continue
        raise SceneSyntaxError(f"unexpected character {c!r}", start_line, start_col)
    return tokens


def read_all(text: str):
    tokens = tokenize(text)
    pos = 0

    def read():
        nonlocal pos
        if pos >= len(tokens):
            raise SceneSyntaxError("unexpected end of input, expected an expression",
                                   0, 0)
        kind, value, line, col = tokens[pos]
        pos += 1
        if kind == "(":
            items = []
            while True:
                if pos >= len(tokens):
                    raise SceneSyntaxError("missing ')'", line, col)
                if tokens[pos][0] == ")":
                    pos += 1
                    return SList(items, line, col)
                items.append(read())
        if kind == ")":
            raise SceneSyntaxError("unexpected ')'", line, col)
        if kind == "sym":
            return Sym(value, line, col)
        if kind == "kw":
            return Kw(value, line, col)
        if kind == "num":
            return Num(value, line, col)
        if kind == "str":
            return Str(value, line, col)
        raise SceneSyntaxError(f"unexpected token {kind}", line, col)

    out = []
    while pos < len(tokens):
        out.append(read())
    return out


# -- structural helpers -------------------------------------------------------


def is_sym(node, name=None):
    return isinstance(node, Sym) and (name is None or node.name == name)


def plist(nodes, line, col):
    """Alternating keyword/value pairs to a dict (order preserved)."""
    out = {}
    i = 0
    nodes = list(nodes)
    while i < len(nodes):
        k = nodes[i]
        if not isinstance(k, Kw):
            raise SceneSyntaxError("expected a :keyword", getattr(k, "line", line),
                                   getattr(k, "col", col))
        if i + 1 >= len(nodes):
            raise SceneSyntaxError(f"keyword :{k.name} is missing a value", k.line, k.col)
        if k.name in out:
            raise DuplicateName(f"keyword :{k.name} given twice", k.line, k.col)
        out[k.name] = nodes[i + 1]
        i += 2
    return out


def want_sym(node, what):
    if not isinstance(node, Sym):
        raise SceneSyntaxError(f"expected {what}", getattr(node, "line", 0),
                               getattr(node, "col", 0))
    return node.name


def want_list(node, what):
    if not isinstance(node, SList):
        raise SceneSyntaxError(f"expected a list: {what}", getattr(node, "line", 0),
                               getattr(node, "col", 0))
    return node


class Decl:
    __slots__ = ("kind", "name", "args", "node")

    def __init__(self, kind, name, args, node):
        self.kind = kind
        self.name = name
        self.args = args
        self.node = node


class SceneFile:
    """Ordered declarations with per-kind symbol tables."""

    def __init__(self, decls):
        self.decls = decls
        self.tables = {k: {} for k in DECL_KINDS}
        for d in decls:
            self.tables[d.kind][d.name] = d

    def lookup(self, kind, name):
        return self.tables[kind].get(name)


# -- expression validation ----------------------------------------------------


def _diff_symbols(coords):
    return {f"d{c}": c for c in coords}


def validate_expr(node, coords, allow_forms=False):
    """Grammar/scope check of a prefix expression; no evaluation."""
    if isinstance(node, Num):
        return
    if isinstance(node, Sym):
        if node.name in coords:
            return
        if allow_forms and node.name in _diff_symbols(coords):
            return
        raise UnknownReference(f"unknown symbol {node.name!r} in expression",
                               node.line, node.col)
    if isinstance(node, SList):
        if not node.items:
            raise SceneSyntaxError("empty expression", node.line, node.col)
        head = node.items[0]
        op = want_sym(head, "an operator (+ - * / ^)")
        if op not in ("+", "-", "*", "/", "^"):
            raise SceneSyntaxError(f"unknown operator {op!r}", head.line, head.col)
        argc = len(node.items) - 1
        if op in ("+", "*") and argc < 1:
            raise SceneSyntaxError(f"operator {op} needs arguments", node.line, node.col)
        if op == "-" and argc < 1:
            raise SceneSyntaxError("operator - needs arguments", node.line, node.col)
        if op in ("/", "^") and argc != 2:
            raise SceneSyntaxError(f"operator {op} needs exactly two arguments",
                                   node.line, node.col)
        for sub in node.items[1:]:
            validate_expr(sub, coords, allow_forms)
        return
    raise SceneSyntaxError("bad expression", getattr(node, "line", 0),
                           getattr(node, "col", 0))


# -- declaration validation ---------------------------------------------------


def _ref(tables, kind, node):
    name = want_sym(node, f"a {kind} name")
    if name not in tables[kind]:
        raise UnknownReference(f"unknown {kind} {name!r}", node.line, node.col)
    return name


def _form_ref(tables, node):
    """A declared form name or the literal 0."""
    if isinstance(node, Num) and node.value == 0:
        return
    _ref(tables, "form", node)


def _patch_coords(tables, patch_name):
    decl = tables["patch"][patch_name]
    return [want_sym(c, "a coordinate") for c in decl.args["coords"]]


def _validate_chart2(tables, node, extra=()):
    args = plist(want_list(node, "chart spec"), node.line, node.col)
    needed = ["chart", "pr1", "pr2", "product", "leg1", "leg2", "assemble"] + list(extra)
    for key in needed:
        if key not in args:
            raise SceneSyntaxError(f"chart spec is missing :{key}", node.line, node.col)
    _ref(tables, "patch", args["chart"])
    _ref(tables, "patch", args["product"])
    for key in needed:
        if key not in ("chart", "product"):
            _ref(tables, "map", args[key])
    return args


def _validate_chart3(tables, node):
    args = plist(want_list(node, "chart spec"), node.line, node.col)
    for key in ("chart", "pr1", "pr2", "pr3"):
        if key not in args:
            raise SceneSyntaxError(f"chart spec is missing :{key}", node.line, node.col)
    _ref(tables, "patch", args["chart"])
    for key in ("pr1", "pr2", "pr3"):
        _ref(tables, "map", args[key])
    return args


def _validate_action(tables, node):
    args = plist(want_list(node, "action spec"), node.line, node.col)
    for key in ("chart", "pr1", "pr2", "act", "product", "leg1", "leg2", "assemble"):
        if key not in args:
            raise SceneSyntaxError(f"action spec is missing :{key}", node.line, node.col)
    _ref(tables, "patch", args["chart"])
    _ref(tables, "patch", args["product"])
    for key in ("pr1", "pr2", "act", "leg1", "leg2", "assemble"):
        _ref(tables, "map", args[key])
    return args


def _require(args, node, *keys):
    for key in keys:
        if key not in args:
            raise SceneSyntaxError(f"missing :{key}", node.line, node.col)


def validate_decl(decl: Decl, tables):
    args, node = decl.args, decl.node
    kind = decl.kind
    if kind == "patch":
        _require(args, node, "coords", "samples")
        coords = []
        for c in want_list(args["coords"], ":coords"):
            name = want_sym(c, "a coordinate name")
            if name in coords:
                raise DuplicateName(f"duplicate coordinate {name!r}", c.line, c.col)
            coords.append(name)
        samples = want_list(args["samples"], ":samples")
        for s in samples:
            row = want_list(s, "a sample point")
            if len(row) != len(coords):
                raise SceneSyntaxError("sample arity does not match coordinates",
                                       row.line, row.col)
            for v in row:
                if not isinstance(v, Num):
                    raise SceneSyntaxError("sample entries must be rational numbers",
                                           getattr(v, "line", 0), getattr(v, "col", 0))
        if "constraints" in args:
            for e in want_list(args["constraints"], ":constraints"):
                validate_expr(e, coords)
    elif kind == "map":
        _require(args, node, "from", "to", "components")
        src = _ref(tables, "patch", args["from"])
        _ref(tables, "patch", args["to"])
        coords = _patch_coords(tables, src)
        for e in want_list(args["components"], ":components"):
            validate_expr(e, coords)
    elif kind == "form":
        _require(args, node, "on", "expr")
        patch = _ref(tables, "patch", args["on"])
        validate_expr(args["expr"], _patch_coords(tables, patch), allow_forms=True)
        if "degree" in args and not isinstance(args["degree"], Num):
            raise SceneSyntaxError(":degree must be a number",
                                   node.line, node.col)
    elif kind == "vectorfield":
        _require(args, node, "on", "components")
        patch = _ref(tables, "patch", args["on"])
        coords = _patch_coords(tables, patch)
        for e in want_list(args["components"], ":components"):
            validate_expr(e, coords)
    elif kind == "dirac":
        _require(args, node, "on", "frame")
        patch = _ref(tables, "patch", args["on"])
        coords = _patch_coords(tables, patch)
        for sec in want_list(args["frame"], ":frame"):
            pair = want_list(sec, "a frame section (vector covector)")
            if len(pair) != 2:
                raise SceneSyntaxError("a frame section is (vector-components covector-components)",
                                       pair.line, pair.col)
            for half in pair:
                for e in want_list(half, "component list"):
                    validate_expr(e, coords)
    elif kind == "morphism":
        _require(args, node, "from", "to", "map", "gauge")
        _ref(tables, "dirac", args["from"])
        _ref(tables, "dirac", args["to"])
        _ref(tables, "map", args["map"])
        _form_ref(tables, args["gauge"])
    elif kind == "groupoid":
        _require(args, node, "arrows", "objects", "s", "t", "u", "i", "g2", "g3")
        for key in ("arrows", "objects"):
            _ref(tables, "patch", args[key])
        for key in ("s", "t", "u", "i"):
            _ref(tables, "map", args[key])
        _validate_chart2(tables, args["g2"], extra=["m"])
        g3args = plist(want_list(args["g3"], ":g3"), node.line, node.col)
        for key in ("chart", "pr1", "pr2", "pr3", "product", "leg1", "leg2",
                    "leg3", "assemble"):
            if key not in g3args:
                raise SceneSyntaxError(f":g3 spec is missing :{key}", node.line, node.col)
        _ref(tables, "patch", g3args["chart"])
        _ref(tables, "patch", g3args["product"])
        for key in ("pr1", "pr2", "pr3", "leg1", "leg2", "leg3", "assemble"):
            _ref(tables, "map", g3args[key])
    elif kind == "gaugepair":
        _require(args, node, "groupoid", "dirac", "tau", "sigma")
        _ref(tables, "groupoid", args["groupoid"])
        _ref(tables, "dirac", args["dirac"])
        _form_ref(tables, args["tau"])
        _form_ref(tables, args["sigma"])
    elif kind == "bundle":
        _require(args, node, "dlie", "total", "base", "sp", "tp", "sigma", "tau", "action")
        _ref(tables, "gaugepair", args["dlie"])
        _ref(tables, "patch", args["total"])
        _ref(tables, "patch", args["base"])
        _ref(tables, "map", args["sp"])
        _ref(tables, "map", args["tp"])
        _form_ref(tables, args["sigma"])
        _form_ref(tables, args["tau"])
        _validate_action(tables, args["action"])
        if "assoc" in args:
            _validate_chart3(tables, args["assoc"])
        if "pairs" in args:
            _validate_chart2(tables, args["pairs"])
    elif kind == "division":
        _require(args, node, "bundle", "map")
        _ref(tables, "bundle", args["bundle"])
        _ref(tables, "map", args["map"])
    elif kind == "bibundle":
        _require(args, node, "left", "right", "right-action")
        _ref(tables, "bundle", args["left"])
        _ref(tables, "gaugepair", args["right"])
        _validate_action(tables, args["right-action"])
        if "right-assoc" in args:
            _validate_chart3(tables, args["right-assoc"])
        if "commuting" in args:
            _validate_chart3(tables, args["commuting"])
    elif kind == "algebroid":
        _require(args, node, "base", "rank", "anchors")
        patch = _ref(tables, "patch", args["base"])
        if not isinstance(args["rank"], Num):
            raise SceneSyntaxError(":rank must be a number", node.line, node.col)
        rank = args["rank"].value
        anchors = want_list(args["anchors"], ":anchors")
        if len(anchors) != rank:
            raise SceneSyntaxError(":anchors must list one vector field per frame element",
                                   anchors.line, anchors.col)
        for a in anchors:
            _ref(tables, "vectorfield", a)
        coords = _patch_coords(tables, patch)
        if "brackets" in args:
            for entry in want_list(args["brackets"], ":brackets"):
                row = want_list(entry, "a bracket entry (i j (coeffs))")
                if len(row) != 3 or not isinstance(row[0], Num) or not isinstance(row[1], Num):
                    raise SceneSyntaxError("bracket entries are (i j (coefficients))",
                                           row.line, row.col)
                if not (1 <= row[0].value <= rank and 1 <= row[1].value <= rank):
                    raise SceneSyntaxError("bracket index out of range (1-based)",
                                           row.line, row.col)
                coeffs = want_list(row[2], "bracket coefficients")
                if len(coeffs) != rank:
                    raise SceneSyntaxError("need one bracket coefficient per frame element",
                                           coeffs.line, coeffs.col)
                for e in coeffs:
                    validate_expr(e, coords)
    elif kind == "imform":
        _require(args, node, "algebroid", "dirac", "forms")
        _ref(tables, "algebroid", args["algebroid"])
        _ref(tables, "dirac", args["dirac"])
        for f in want_list(args["forms"], ":forms"):
            _form_ref(tables, f)
    elif kind == "attestation":
        for key, value in args.items():
            if key not in ("orbit-spaces", "monodromy", "fundamental-groups"):
                raise SceneSyntaxError(f"unknown attestation field :{key}",
                                       node.line, node.col)
            if not isinstance(value, Str):
                raise SceneSyntaxError("attestation entries must be strings",
                                       node.line, node.col)
    elif kind == "check":
        _validate_check(decl, tables)
    else:
        raise SceneSyntaxError(f"unknown declaration kind {kind!r}", node.line, node.col)


def _validate_check(decl: Decl, tables):
    node = decl.node
    verb = decl.args["__verb__"]
    args = decl.args
    if verb not in CHECK_VERBS:
        raise SceneSyntaxError(f"unknown check verb {verb!r}", node.line, node.col)

    def need(*keys):
        _require(args, node, *keys)

    def ref(kind, key):
        _ref(tables, kind, args[key])

    if verb == "check-dirac":
        need("dirac"); ref("dirac", "dirac")
    elif verb == "check-morphism":
        need("morphism"); ref("morphism", "morphism")
    elif verb == "check-diagram":
        need("triangles")
        for tri in want_list(args["triangles"], ":triangles"):
            row = want_list(tri, "a triangle (f1 f2 f3)")
            if len(row) != 3:
                raise SceneSyntaxError("a triangle lists three morphisms", row.line, row.col)
            for m in row:
                _ref(tables, "morphism", m)
    elif verb in ("fiber-product", "universal-arrow"):
        need("f", "g", "chart", "pr1", "pr2")
        ref("morphism", "f"); ref("morphism", "g")
        ref("patch", "chart"); ref("map", "pr1"); ref("map", "pr2")
        if verb == "universal-arrow":
            need("h1", "h2", "k")
            ref("morphism", "h1"); ref("morphism", "h2"); ref("map", "k")
    elif verb == "check-groupoid":
        need("groupoid"); ref("groupoid", "groupoid")
    elif verb in ("check-dlie", "derive-gauge-parts", "check-gauge-axioms", "target-align"):
        need("dlie"); ref("gaugepair", "dlie")
    elif verb == "check-dlie-morphism":
        need("from", "to", "arrow", "alpha", "base")
        ref("gaugepair", "from"); ref("gaugepair", "to")
        ref("map", "arrow"); _form_ref(tables, args["alpha"]); ref("morphism", "base")
    elif verb == "check-bundle":
        need("bundle"); ref("bundle", "bundle")
    elif verb == "pullback-bundle":
        need("bundle", "morphism", "skeleton", "pr-total")
        ref("bundle", "bundle"); ref("morphism", "morphism")
        ref("bundle", "skeleton"); ref("map", "pr-total")
    elif verb == "check-bundle-morphism":
        need("from", "to", "map", "gauge", "base")
        ref("bundle", "from"); ref("bundle", "to"); ref("map", "map")
        _form_ref(tables, args["gauge"]); ref("morphism", "base")
    elif verb == "glue":
        need("global", "charts", "overlaps")
        ref("patch", "global")
        names = set()
        for entry in want_list(args["charts"], ":charts"):
            row = want_list(entry, "a chart entry")
            if len(row) < 1:
                raise SceneSyntaxError("chart entries start with a name", row.line, row.col)
            name = want_sym(row[0], "a chart name")
            if name in names:
                raise DuplicateName(f"duplicate glue chart {name!r}", row.line, row.col)
            names.add(name)
            sub = plist(row[1:], row.line, row.col)
            _require(sub, row, "bundle", "restrict", "phi")
            _ref(tables, "bundle", sub["bundle"])
            _ref(tables, "patch", sub["restrict"])
            _ref(tables, "map", sub["phi"])
        for entry in want_list(args["overlaps"], ":overlaps"):
            row = want_list(entry, "an overlap (a b patch)")
            if len(row) != 3:
                raise SceneSyntaxError("overlaps are (a b patch)", row.line, row.col)
            for nm in row[:2]:
                if want_sym(nm, "a chart name") not in names:
                    raise UnknownReference(f"unknown glue chart {nm.name!r}", nm.line, nm.col)
            _ref(tables, "patch", row[2])
        if "triples" in args:
            for entry in want_list(args["triples"], ":triples"):
                row = want_list(entry, "a cocycle triple (a b c phi_ab phi_bc phi_ac)")
                if len(row) != 6:
                    raise SceneSyntaxError("cocycle triples are (a b c phi_ab phi_bc phi_ac)",
                                           row.line, row.col)
                for nm in row[:3]:
                    if want_sym(nm, "a chart name") not in names:
                        raise UnknownReference(f"unknown glue chart {nm.name!r}",
                                               nm.line, nm.col)
                for m in row[3:]:
                    _ref(tables, "map", m)
        if "morphisms" in args:
            for entry in want_list(args["morphisms"], "glued morphisms"):
                row = want_list(entry, "(name map)")
                if len(row) != 2:
                    raise SceneSyntaxError("glued morphisms are (name map)", row.line, row.col)
                _ref(tables, "map", row[1])
    elif verb == "bundle-from-morphism":
        need("from", "to", "arrow", "alpha", "base", "skeleton", "pr-arrow", "pr-base")
        ref("gaugepair", "from"); ref("gaugepair", "to"); ref("map", "arrow")
        _form_ref(tables, args["alpha"]); ref("morphism", "base")
        ref("bibundle", "skeleton"); ref("map", "pr-arrow"); ref("map", "pr-base")
    elif verb == "tensor":
        need("p", "q", "chart", "pr1", "pr2", "action", "vertical")
        ref("bibundle", "p"); ref("bibundle", "q"); ref("patch", "chart")
        ref("map", "pr1"); ref("map", "pr2")
        _validate_action(tables, args["action"])
        for v in want_list(args["vertical"], ":vertical"):
            _ref(tables, "vectorfield", v)
        if "quotient" in args:
            sub = plist(want_list(args["quotient"], ":quotient"), node.line, node.col)
            _require(sub, node, "chart", "map", "section")
            _ref(tables, "patch", sub["chart"])
            _ref(tables, "map", sub["map"])
            _ref(tables, "map", sub["section"])
    elif verb == "check-nondegenerate":
        need("bibundle"); ref("bibundle", "bibundle")
    elif verb == "check-algebroid":
        need("algebroid"); ref("algebroid", "algebroid")
    elif verb in ("check-im-form", "check-dlie-algebroid"):
        need("imform"); ref("imform", "imform")
    elif verb == "derive-im-form":
        need("dlie", "vertical", "algebroid")
        ref("gaugepair", "dlie"); ref("algebroid", "algebroid")
        for v in want_list(args["vertical"], ":vertical"):
            _ref(tables, "vectorfield", v)
    elif verb in ("check-algebroid-morphism", "check-weak-equivalence"):
        need("from", "to", "matrix", "base")
        for key in ("from", "to"):
            name = want_sym(args[key], "an algebroid or imform name")
            if name not in tables["imform"] and name not in tables["algebroid"]:
                raise UnknownReference(f"unknown algebroid/imform {name!r}",
                                       args[key].line, args[key].col)
        for row in want_list(args["matrix"], ":matrix"):
            want_list(row, "a matrix row")
        ref("morphism", "base")
        if "attest" in args:
            ref("attestation", "attest")
    elif verb == "pullback-algebroid":
        need("map", "algebroid", "frame")
        ref("map", "map"); ref("algebroid", "algebroid")
        for entry in want_list(args["frame"], ":frame"):
            row = want_list(entry, "a frame entry ((coeffs) vectorfield)")
            if len(row) != 2:
                raise SceneSyntaxError("frame entries are ((coefficients) vectorfield)",
                                       row.line, row.col)
            want_list(row[0], "coefficients")
            _ref(tables, "vectorfield", row[1])


def parse_scene(text: str) -> SceneFile:
    """Full static validation; returns the ordered declaration list."""
    forms = read_all(text)
    decls = []
    tables = {k: {} for k in DECL_KINDS}
    for node in forms:
        lst = want_list(node, "a declaration")
        if not lst.items:
            raise SceneSyntaxError("empty declaration", lst.line, lst.col)
        kind = want_sym(lst[0], "a declaration kind")
        if kind not in DECL_KINDS:
            raise SceneSyntaxError(f"unknown declaration kind {kind!r}",
                                   lst[0].line, lst[0].col)
        if len(lst) < 2:
            raise SceneSyntaxError(f"{kind} declaration needs a name", lst.line, lst.col)
        name = want_sym(lst[1], f"a {kind} name")
        if kind == "check":
            if len(lst) < 3:
                raise SceneSyntaxError("check needs an id and a verb", lst.line, lst.col)
            verb = want_sym(lst[2], "a check verb")
            args = plist(lst.items[3:], lst.line, lst.col)
            args["__verb__"] = verb
        else:
            args = plist(lst.items[2:], lst.line, lst.col)
        if name in tables[kind]:
            raise DuplicateName(f"duplicate {kind} name {name!r}", lst[1].line, lst[1].col)
        decl = Decl(kind, name, args, lst)
        validate_decl(decl, tables)
        tables[kind][name] = decl
        decls.append(decl)
    return SceneFile(decls)


# -- canonical printer --------------------------------------------------------


def _render(node) -> str:
    if isinstance(node, SList):
        return "(" + " ".join(_render(x) for x in node.items) + ")"
    if isinstance(node, Sym):
        return node.name
    if isinstance(node, Kw):
        return ":" + node.name
    if isinstance(node, Num):
        v = node.value
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(node, Str):
        body = node.value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{body}"'
    raise TypeError(f"cannot render {type(node).__name__}")


def print_scene(scene: SceneFile) -> str:
    return "\n".join(_render(d.node) for d in scene.decls) + "\n"


def sexpr_equal(a, b) -> bool:
    if isinstance(a, SList) and isinstance(b, SList):
        return len(a) == len(b) and all(sexpr_equal(x, y) for x, y in zip(a.items, b.items))
    if isinstance(a, Sym) and isinstance(b, Sym):
        return a.name == b.name
    if isinstance(a, Kw) and isinstance(b, Kw):
        return a.name == b.name
    if isinstance(a, Num) and isinstance(b, Num):
        return a.value == b.value
    if isinstance(a, Str) and isinstance(b, Str):
        return a.value == b.value
    return False


def scenes_equal(a: SceneFile, b: SceneFile) -> bool:
    return len(a.decls) == len(b.decls) and all(
        sexpr_equal(x.node, y.node) for x, y in zip(a.decls, b.decls))
