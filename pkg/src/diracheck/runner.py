"""Scene elaboration and check dispatch.

Declarations are built in order into engine objects; construction failures
and check failures become report entries.  Identical scenes produce
byte-identical reports."""

from __future__ import annotations

from fractions import Fraction

from . import algebroid as alg
from . import bundles as bnd
from .calculus import DifferentialForm, Patch, SmoothMap, VectorField
from .category import (
    DManMorphism,
    Diagram,
    check_diagram,
    check_morphism,
    fiber_product,
    universal_arrow,
)
from .dirac import DiracStructure, GeneralizedSection, check_dirac
from .errors import DiracheckError
from .groupoid import (
    Assembler,
    DLieGroupoid,
    DLieMorphism,
    FiberChart2,
    FiberChart3,
    GaugePair,
    GroupoidPresentation,
    check_dlie_conditions,
    check_dlie_morphism,
    derive_gauge_parts,
    target_align,
    verify_gauge_axioms,
    verify_presentation,
)
from .report import FAIL, CheckNode
from .scalar import ScalarExpr
from .scene import Num, SceneFile, SList, Str, Sym


class _Failed:
    def __init__(self, message):
        self.message = message


# -- expression evaluation ----------------------------------------------------


def eval_expr(node, patch: Patch):
    """Prefix expression to a ScalarExpr or DifferentialForm on the patch."""
    if isinstance(node, Num):
        return ScalarExpr.from_rational(node.value)
    if isinstance(node, Sym):
        if node.name in patch.coords:
            return ScalarExpr.var(node.name)
        if node.name.startswith("d") and node.name[1:] in patch.coords:
            return DifferentialForm.d_coord(patch, node.name[1:])
        raise DiracheckError(f"unknown symbol {node.name!r}")
    op = node[0].name
    args = [eval_expr(x, patch) for x in node.items[1:]]
    scalars = [a for a in args if isinstance(a, ScalarExpr)]
    forms = [a for a in args if isinstance(a, DifferentialForm)]
    if op == "+":
        if forms and scalars:
            raise DiracheckError("cannot add scalars and forms")
        if forms:
            out = forms[0]
            for f in forms[1:]:
                out = out.add(f)
            return out
        out = scalars[0]
        for s in scalars[1:]:
            out = out + s
        return out
    if op == "-":
        if len(args) == 1:
            a = args[0]
            return a.neg() if isinstance(a, DifferentialForm) else -a
        first = args[0]
        if isinstance(first, DifferentialForm) or forms:
            if scalars:
                raise DiracheckError("cannot subtract scalars and forms")
            out = first
            for f in args[1:]:
                out = out.sub(f)
            return out
        out = first
        for s in args[1:]:
            out = out - s
        return out
    if op == "*":
        if len(forms) > 1:
            raise DiracheckError("use ^ for the wedge of two forms")
        prod = ScalarExpr.one()
        for s in scalars:
            prod = prod * s
        if forms:
            return forms[0].scale(prod)
        return prod
    if op == "/":
        a, b = args
        if isinstance(b, DifferentialForm):
            raise DiracheckError("cannot divide by a form")
        if isinstance(a, DifferentialForm):
            return a.scale(ScalarExpr.one() / b)
        return a / b
    if op == "^":
        a, b = args
        if isinstance(a, DifferentialForm) or isinstance(b, DifferentialForm):
            fa = a if isinstance(a, DifferentialForm) else DifferentialForm.function(patch, a)
            fb = b if isinstance(b, DifferentialForm) else DifferentialForm.function(patch, b)
            return fa.wedge(fb)
        if not (b.is_constant() and b.constant_value().denominator == 1):
            raise DiracheckError("power needs an integer exponent")
        return a ** int(b.constant_value())
    raise DiracheckError(f"unknown operator {op!r}")


def eval_scalar(node, patch: Patch) -> ScalarExpr:
    out = eval_expr(node, patch)
    if not isinstance(out, ScalarExpr):
        raise DiracheckError("expected a scalar expression, got a form")
    return out


# -- environment --------------------------------------------------------------


class Env:
    def __init__(self):
        self.objects = {k: {} for k in ("patch", "map", "form", "vectorfield",
                                        "dirac", "morphism", "groupoid", "gaugepair",
                                        "bundle", "bibundle", "algebroid", "imform",
                                        "division", "attestation")}

    def put(self, kind, name, obj):
        self.objects[kind][name] = obj

    def get(self, kind, node):
        obj = self.objects[kind][node.name]
        if isinstance(obj, _Failed):
            raise DiracheckError(f"{kind} {node.name!r} failed to build: {obj.message}")
        return obj

    def form_ref(self, node, patch: Patch, degree: int = 2) -> DifferentialForm:
        """A declared form or the literal 0 (zero form on the given patch)."""
        if isinstance(node, Num):
            return DifferentialForm.zero(patch, degree)
        form = self.get("form", node)
        if form.patch.coords != patch.coords:
            raise DiracheckError(f"form {node.name!r} lives on the wrong patch")
        if form.degree != degree:
            raise DiracheckError(f"form {node.name!r} has degree {form.degree}, need {degree}")
        return form


# -- declaration builders -----------------------------------------------------


def build_patch(decl, env):
    coords = [c.name for c in decl.args["coords"]]
    samples = [{c.name: row[i].value for i, c in enumerate(decl.args["coords"])}
               for row in decl.args["samples"]]
    tmp = Patch(decl.name + "-pre", coords, samples)
    constraints = [eval_scalar(e, tmp) for e in decl.args.get("constraints", SList([]))]
    return Patch(decl.name, coords, samples, constraints)


def build_map(decl, env):
    src = env.get("patch", decl.args["from"])
    dst = env.get("patch", decl.args["to"])
    comps = [eval_scalar(e, src) for e in decl.args["components"]]
    return SmoothMap(src, dst, comps)


def build_form(decl, env):
    patch = env.get("patch", decl.args["on"])
    degree = int(decl.args["degree"].value) if "degree" in decl.args else 2
    node = decl.args["expr"]
    if isinstance(node, Num) and node.value == 0:
        return DifferentialForm.zero(patch, degree)
    out = eval_expr(node, patch)
    if isinstance(out, ScalarExpr):
        return DifferentialForm.function(patch, out)
    return out


def build_vectorfield(decl, env):
    patch = env.get("patch", decl.args["on"])
    return VectorField(patch, [eval_scalar(e, patch) for e in decl.args["components"]])


def build_dirac(decl, env):
    patch = env.get("patch", decl.args["on"])
    frame = []
    for sec in decl.args["frame"]:
        vec = VectorField(patch, [eval_scalar(e, patch) for e in sec[0]])
        covs = [eval_scalar(e, patch) for e in sec[1]]
        cov = DifferentialForm(patch, 1,
                               {(i,): c for i, c in enumerate(covs) if not c.is_zero()})
        frame.append(GeneralizedSection(patch, vec, cov))
    return DiracStructure(patch, frame)


def build_morphism(decl, env):
    src = env.get("dirac", decl.args["from"])
    dst = env.get("dirac", decl.args["to"])
    smap = env.get("map", decl.args["map"])
    gauge = env.form_ref(decl.args["gauge"], smap.source)
    return DManMorphism(smap, gauge, src, dst)


def _plist(node):
    out = {}
    items = list(node.items)
    for i in range(0, len(items), 2):
        out[items[i].name] = items[i + 1]
    return out


def _build_assembler(env, args, nlegs):
    product = env.get("patch", args["product"])
    legs = [env.get("map", args[f"leg{i}"]) for i in range(1, nlegs + 1)]
    asm = env.get("map", args["assemble"])
    return Assembler(product, legs, asm)


def build_groupoid(decl, env):
    args = decl.args
    arrows = env.get("patch", args["arrows"])
    objects = env.get("patch", args["objects"])
    s, t, u, i = (env.get("map", args[k]) for k in ("s", "t", "u", "i"))
    g2a = _plist(args["g2"])
    g2 = FiberChart2(env.get("patch", g2a["chart"]), env.get("map", g2a["pr1"]),
                     env.get("map", g2a["pr2"]), env.get("map", g2a["m"]),
                     _build_assembler(env, g2a, 2))
    g3a = _plist(args["g3"])
    g3 = FiberChart3(env.get("patch", g3a["chart"]), env.get("map", g3a["pr1"]),
                     env.get("map", g3a["pr2"]), env.get("map", g3a["pr3"]),
                     _build_assembler(env, g3a, 3))
    return GroupoidPresentation(arrows, objects, s, t, u, i, g2, g3, name=decl.name)


def build_gaugepair(decl, env):
    pres = env.get("groupoid", decl.args["groupoid"])
    base = env.get("dirac", decl.args["dirac"])
    tau = env.form_ref(decl.args["tau"], pres.arrows)
    sigma = env.form_ref(decl.args["sigma"], pres.arrows)
    return DLieGroupoid(pres, base, GaugePair(tau, sigma))


def _build_action(env, node):
    args = _plist(node)
    return bnd.ActionChart(env.get("patch", args["chart"]), env.get("map", args["pr1"]),
                           env.get("map", args["pr2"]), env.get("map", args["act"]),
                           _build_assembler(env, args, 2))


def _build_triple(env, node):
    args = _plist(node)
    return bnd.TripleChart(env.get("patch", args["chart"]), env.get("map", args["pr1"]),
                           env.get("map", args["pr2"]), env.get("map", args["pr3"]))


def _build_pairs(env, node):
    args = _plist(node)
    return bnd.PairsChart(env.get("patch", args["chart"]), env.get("map", args["pr1"]),
                          env.get("map", args["pr2"]), _build_assembler(env, args, 2))


def build_bundle(decl, env):
    args = decl.args
    g = env.get("gaugepair", args["dlie"])
    total = env.get("patch", args["total"])
    base = env.get("patch", args["base"])
    sp = env.get("map", args["sp"])
    tp = env.get("map", args["tp"])
    sigma = env.form_ref(args["sigma"], total)
    tau = env.form_ref(args["tau"], total)
    action = _build_action(env, args["action"])
    assoc = _build_triple(env, args["assoc"]) if "assoc" in args else None
    pairs = _build_pairs(env, args["pairs"]) if "pairs" in args else None
    return bnd.PrincipalBundle(g, total, base, sp, tp, sigma, tau, action,
                               assoc, pairs, None, name=decl.name)


def build_division(decl, env):
    bundle = env.get("bundle", decl.args["bundle"])
    if bundle.pairs is None:
        raise DiracheckError("division map needs a bundle with a :pairs chart")
    bundle.division = env.get("map", decl.args["map"])
    return bundle.division


def build_bibundle(decl, env):
    args = decl.args
    left = env.get("bundle", args["left"])
    right = env.get("gaugepair", args["right"])
    raction = _build_action(env, args["right-action"])
    rassoc = _build_triple(env, args["right-assoc"]) if "right-assoc" in args else None
    comm = _build_triple(env, args["commuting"]) if "commuting" in args else None
    return bnd.Bibundle(left, right, raction, rassoc, comm, name=decl.name)


def build_algebroid(decl, env):
    base = env.get("patch", decl.args["base"])
    rank = int(decl.args["rank"].value)
    anchors = [env.get("vectorfield", a) for a in decl.args["anchors"]]
    structure = {}
    for entry in decl.args.get("brackets", SList([])):
        i = int(entry[0].value) - 1
        j = int(entry[1].value) - 1
        structure[(i, j)] = tuple(eval_scalar(e, base) for e in entry[2])
    return alg.AlgebroidPresentation(base, rank, anchors, structure, name=decl.name)


def build_imform(decl, env):
    a = env.get("algebroid", decl.args["algebroid"])
    d = env.get("dirac", decl.args["dirac"])
    forms = [env.form_ref(f, a.base, degree=1) for f in decl.args["forms"]]
    return alg.DLieAlgebroid(a, d, alg.IMForm(forms))


def build_attestation(decl, env):
    return {k: v.value for k, v in decl.args.items() if isinstance(v, Str)}


_BUILDERS = {
    "patch": build_patch, "map": build_map, "form": build_form,
    "vectorfield": build_vectorfield, "dirac": build_dirac,
    "morphism": build_morphism, "groupoid": build_groupoid,
    "gaugepair": build_gaugepair, "bundle": build_bundle,
    "division": build_division, "bibundle": build_bibundle,
    "algebroid": build_algebroid, "imform": build_imform,
    "attestation": build_attestation,
}


# -- check dispatch ----------------------------------------------------------


def _alg_or_im(env, node):
    if node.name in env.objects["imform"]:
        return env.get("imform", node)
    return env.get("algebroid", node)


def run_check(decl, env) -> CheckNode:
    verb = decl.args["__verb__"]
    args = decl.args
    name = decl.name

    if verb == "check-dirac":
        return check_dirac(env.get("dirac", args["dirac"]), name)
    if verb == "check-morphism":
        return check_morphism(env.get("morphism", args["morphism"]), name)
    if verb == "check-diagram":
        tris = [tuple(env.get("morphism", m) for m in tri) for tri in args["triangles"]]
        return check_diagram(Diagram(tris), name)
    if verb == "fiber-product":
        f = env.get("morphism", args["f"])
        g = env.get("morphism", args["g"])
        chart = env.get("patch", args["chart"])
        pr1 = env.get("map", args["pr1"])
        pr2 = env.get("map", args["pr2"])
        _, _, _, node = fiber_product(f, g, chart, pr1, pr2)
        node.id = name
        return node
    if verb == "universal-arrow":
        f = env.get("morphism", args["f"])
        g = env.get("morphism", args["g"])
        chart = env.get("patch", args["chart"])
        pr1 = env.get("map", args["pr1"])
        pr2 = env.get("map", args["pr2"])
        L_w, m1, m2, fpnode = fiber_product(f, g, chart, pr1, pr2)
        h1 = env.get("morphism", args["h1"])
        h2 = env.get("morphism", args["h2"])
        k = env.get("map", args["k"])
        _, uanode = universal_arrow((L_w, m1, m2, f, g), h1, h2, k)
        node = CheckNode(name, "universal arrow over the fiber product")
        node.add(fpnode)
        node.add(uanode)
        return node
    if verb == "check-groupoid":
        return verify_presentation(env.get("groupoid", args["groupoid"]), name)
    if verb == "check-dlie":
        return check_dlie_conditions(env.get("gaugepair", args["dlie"]), name)
    if verb == "derive-gauge-parts":
        g = env.get("gaugepair", args["dlie"])
        cond = check_dlie_conditions(g)
        node = CheckNode(name, "derived gauge parts of the structure maps")
        if cond.aggregate() == FAIL:
            node.leaf("prerequisite", "D-Lie conditions hold", False,
                      notes="check-dlie fails on this gauge pair")
            return node
        d = derive_gauge_parts(g)
        node.leaf("upsilon", "unit gauge part", True, notes=f"upsilon = {d.upsilon}")
        node.leaf("mu", "multiplication gauge part", True, notes=f"mu = {d.mu}")
        node.leaf("iota", "inverse gauge part", True, notes=f"iota = {d.iota}")
        return node
    if verb == "check-gauge-axioms":
        return verify_gauge_axioms(env.get("gaugepair", args["dlie"]), name)
    if verb == "target-align":
        _, _, node = target_align(env.get("gaugepair", args["dlie"]))
        node.id = name
        return node
    if verb == "check-dlie-morphism":
        src = env.get("gaugepair", args["from"])
        dst = env.get("gaugepair", args["to"])
        arrow = env.get("map", args["arrow"])
        alpha = env.form_ref(args["alpha"], arrow.source)
        base = env.get("morphism", args["base"])
        return check_dlie_morphism(DLieMorphism(arrow, alpha, base), src, dst, name)
    if verb == "check-bundle":
        return bnd.check_principal_bundle(env.get("bundle", args["bundle"]), name)
    if verb == "pullback-bundle":
        b = env.get("bundle", args["bundle"])
        f = env.get("morphism", args["morphism"])
        skeleton = env.get("bundle", args["skeleton"])
        pr_total = env.get("map", args["pr-total"])
        _, node = bnd.pullback_bundle(b, f, skeleton, pr_total)
        node.id = name
        return node
    if verb == "check-bundle-morphism":
        b1 = env.get("bundle", args["from"])
        b2 = env.get("bundle", args["to"])
        F = env.get("map", args["map"])
        gauge = env.form_ref(args["gauge"], b1.total)
        base = env.get("morphism", args["base"])
        return bnd.check_bundle_morphism(F, gauge, b1, b2, base, name)
    if verb == "glue":
        global_total = env.get("patch", args["global"])
        charts = []
        for entry in args["charts"]:
            sub = _plist(SList(entry.items[1:]))
            charts.append(bnd.GlueChart(entry[0].name, env.get("bundle", sub["bundle"]),
                                        env.get("patch", sub["restrict"]),
                                        env.get("map", sub["phi"])))
        overlaps = [(o[0].name, o[1].name, env.get("patch", o[2]))
                    for o in args["overlaps"]]
        triples = [(t[0].name, t[1].name, t[2].name, env.get("map", t[3]),
                    env.get("map", t[4]), env.get("map", t[5]))
                   for t in args.get("triples", SList([]))]
        morphs = [(m[0].name, env.get("map", m[1]))
                  for m in args.get("morphisms", SList([]))] or None
        _, node = bnd.glue_characteristic_form(global_total, charts, overlaps,
                                               triples, morphs)
        node.id = name
        return node
    if verb == "bundle-from-morphism":
        src = env.get("gaugepair", args["from"])
        dst = env.get("gaugepair", args["to"])
        arrow = env.get("map", args["arrow"])
        alpha = env.form_ref(args["alpha"], arrow.source)
        base = env.get("morphism", args["base"])
        skeleton = env.get("bibundle", args["skeleton"])
        pr_arrow = env.get("map", args["pr-arrow"])
        pr_base = env.get("map", args["pr-base"])
        mor = DLieMorphism(arrow, alpha, base)
        node = CheckNode(name, "bibundle of a groupoid morphism")
        node.add(check_dlie_morphism(mor, src, dst, "morphism"))
        _, sub = bnd.bundle_from_morphism(mor, src, dst, skeleton, pr_arrow, pr_base)
        node.add(sub)
        node.notes = sub.notes
        return node
    if verb == "tensor":
        p = env.get("bibundle", args["p"])
        q = env.get("bibundle", args["q"])
        chart = env.get("patch", args["chart"])
        pr1 = env.get("map", args["pr1"])
        pr2 = env.get("map", args["pr2"])
        action = _build_action(env, args["action"])
        vertical = [env.get("vectorfield", v) for v in args["vertical"]]
        quotient = None
        if "quotient" in args:
            sub = _plist(args["quotient"])
            quotient = (env.get("patch", sub["chart"]), env.get("map", sub["map"]),
                        env.get("map", sub["section"]))
        _, node = bnd.tensor_characteristic_form(p, q, chart, pr1, pr2, action,
                                                 vertical, quotient)
        node.id = name
        return node
    if verb == "check-nondegenerate":
        return bnd.check_nondegenerate(env.get("bibundle", args["bibundle"]), name)
    if verb == "check-algebroid":
        return alg.check_algebroid(env.get("algebroid", args["algebroid"]), name)
    if verb == "check-im-form":
        return alg.check_im_form(env.get("imform", args["imform"]), name)
    if verb == "check-dlie-algebroid":
        return alg.check_dlie_algebroid(env.get("imform", args["imform"]), name)
    if verb == "derive-im-form":
        g = env.get("gaugepair", args["dlie"])
        vertical = [env.get("vectorfield", v) for v in args["vertical"]]
        a = env.get("algebroid", args["algebroid"])
        node = CheckNode(name, "derived IM form and the assembled D-Lie algebroid")
        imf, sub = alg.derive_im_form_from_groupoid(g, vertical, a)
        node.add(sub)
        assembled = alg.DLieAlgebroid(a, g.base_dirac, imf)
        node.add(alg.check_dlie_algebroid(assembled, "assembled-dlie"))
        node.add(alg.check_im_form(assembled, "assembled-im"))
        return node
    if verb == "check-algebroid-morphism":
        src = _alg_or_im(env, args["from"])
        dst = _alg_or_im(env, args["to"])
        base = env.get("morphism", args["base"])
        src_base = base.map.source
        matrix = [[eval_scalar(e, src_base) for e in row] for row in args["matrix"]]
        return alg.check_algebroid_morphism(alg.AlgebroidMorphism(matrix, base),
                                            src, dst, name)
    if verb == "pullback-algebroid":
        f = env.get("map", args["map"])
        B = env.get("algebroid", args["algebroid"])
        frame = []
        for entry in args["frame"]:
            coeffs = [eval_scalar(e, f.source) for e in entry[0]]
            frame.append((coeffs, env.get("vectorfield", entry[1])))
        _, node = alg.pullback_algebroid(f, B, frame)
        node.id = name
        return node
    if verb == "check-weak-equivalence":
        src = _alg_or_im(env, args["from"])
        dst = _alg_or_im(env, args["to"])
        base = env.get("morphism", args["base"])
        matrix = [[eval_scalar(e, base.map.source) for e in row] for row in args["matrix"]]
        attest = env.get("attestation", args["attest"]) if "attest" in args else {}
        return alg.check_weak_equivalence(alg.AlgebroidMorphism(matrix, base),
                                          src, dst, attest, name)
    raise DiracheckError(f"unhandled check verb {verb!r}")


def run_checks(scene: SceneFile, filter_prefix: str | None = None) -> CheckNode:
    root = CheckNode("root", "scene")
    env = Env()
    for decl in scene.decls:
        if decl.kind == "check":
            if filter_prefix is not None and not decl.name.startswith(filter_prefix):
                continue
            try:
                node = run_check(decl, env)
            except KeyError as exc:
                node = CheckNode(decl.name, f"check {decl.args['__verb__']}", FAIL,
                                 notes=f"unresolved reference: {exc}")
            except DiracheckError as exc:
                node = CheckNode(decl.name, f"check {decl.args['__verb__']}", FAIL,
                                 notes=str(exc))
            root.add(node)
        else:
            try:
                obj = _BUILDERS[decl.kind](decl, env)
                env.put(decl.kind, decl.name, obj)
            except DiracheckError as exc:
                env.put(decl.kind, decl.name, _Failed(str(exc)))
                root.add(CheckNode(f"decl-{decl.name}",
                                   f"declaration {decl.kind} {decl.name}", FAIL,
                                   notes=str(exc)))
    root.aggregate()
    return root
