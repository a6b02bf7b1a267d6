"""Localization, colimits, homotopy colimits, and tensor products.

Localization adjoins the explicit four-generator cluster per inverted
morphism.  The homotopy colimit of a span adjoins localized comparison
generators t_X and homotopy generators t_f whose differential carries a
twisted-derivation correction term; construction aborts unless the result
passes the d^2 = 0 audit, which pins the sign convention.
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import Generator, NcPoly, compose, render_poly
from .dgcat import (
    DgFunctor,
    SemifreeDgCat,
    compose_functors,
    new_semifree,
    push_poly,
    validate_functor,
)
from .rewrite import RelationalDgCat, new_relational

QUAD_SUFFIXES = ("'", "_hat", "_check", "_bar")


@dataclass(frozen=True)
class LocalizationRecord:
    inverted: str
    prime: str
    hat: str
    check: str
    bar: str

    def names(self):
        return (self.prime, self.hat, self.check, self.bar)


@dataclass(frozen=True)
class PushoutSpan:
    a: object
    c: object
    b: object
    alpha: DgFunctor  # c -> a
    beta: DgFunctor   # c -> b

    def __post_init__(self):
        if self.alpha.source is not self.c or self.alpha.target is not self.a:
            raise ValueError("alpha must map c -> a")
        if self.beta.source is not self.c or self.beta.target is not self.b:
            raise ValueError("beta must map c -> b")


# ---------------------------------------------------------------------------
# dg localization
# ---------------------------------------------------------------------------

def localize(cat: SemifreeDgCat, names) -> SemifreeDgCat:
    """Invert closed degree-0 generators; adds g', g_hat, g_check, g_bar each."""
    names = list(names)
    ring = cat.ring
    gens = list(cat.generators)
    table = dict(cat.differentials)
    taken = {g.name for g in gens}
    rank = cat.next_rank()
    records = []
    for name in names:
        g = cat.gen(name)
        if g.degree != 0:
            raise ValueError(f"{name} has degree {g.degree}, cannot invert")
        if not cat.differentials[name].is_zero():
            raise ValueError(f"{name} is not closed, cannot invert")
        a_obj, b_obj = g.source, g.target
        quad = [_fresh(name + suffix, taken) for suffix in QUAD_SUFFIXES]
        prime = Generator(quad[0], b_obj, a_obj, 0, rank)
        hat = Generator(quad[1], a_obj, a_obj, -1, rank + 1)
        check = Generator(quad[2], b_obj, b_obj, -1, rank + 2)
        bar = Generator(quad[3], a_obj, b_obj, -2, rank + 3)
        rank += 4
        g_poly = NcPoly.gen(ring, g)
        prime_poly = NcPoly.gen(ring, prime)
        gens.extend([prime, hat, check, bar])
        table[prime.name] = NcPoly.zero(ring, b_obj, a_obj)
        table[hat.name] = NcPoly.identity(ring, a_obj) - compose(prime_poly, g_poly)
        table[check.name] = NcPoly.identity(ring, b_obj) - compose(g_poly, prime_poly)
        table[bar.name] = (compose(g_poly, NcPoly.gen(ring, hat))
                           - compose(NcPoly.gen(ring, check), g_poly))
        records.append(LocalizationRecord(name, *quad))
    entry = {
        "op": "localize",
        "inverted": names,
        "clusters": [[r.inverted, *r.names()] for r in records],
    }
    return new_semifree(ring, cat.objects, gens, table,
                        cat.provenance + (entry,))


def localization_records(cat) -> list:
    """Localization clusters recorded in provenance, in construction order."""
    out = []
    for entry in cat.provenance:
        if isinstance(entry, dict) and entry.get("op") in ("localize", "hocolim"):
            for cluster in entry.get("clusters", []):
                out.append(LocalizationRecord(*cluster))
    return out


def name_as_generator(cat: SemifreeDgCat, expr: NcPoly, name: str) -> SemifreeDgCat:
    """Adjoin a closed degree-0 generator u with a homotopy k, dk = u - expr.

    This keeps every localization a generator localization: to invert a
    composite expression, name it first and then localize the name.
    """
    if expr.degree() not in (0, None):
        raise ValueError("only degree-0 expressions can be named for inversion")
    if not cat.d(expr).is_zero():
        raise ValueError("expression is not closed")
    taken = {g.name for g in cat.generators}
    if name in taken or name + "_htpy" in taken:
        raise ValueError(f"name {name!r} already used")
    rank = cat.next_rank()
    u = Generator(name, expr.source, expr.target, 0, rank)
    k = Generator(name + "_htpy", expr.source, expr.target, -1, rank + 1)
    ring = cat.ring
    table = dict(cat.differentials)
    table[u.name] = NcPoly.zero(ring, expr.source, expr.target)
    table[k.name] = NcPoly.gen(ring, u) - expr
    entry = {"op": "name_generator", "name": name, "expr": render_poly(expr)}
    return new_semifree(ring, cat.objects, list(cat.generators) + [u, k],
                        table, cat.provenance + (entry,))


# ---------------------------------------------------------------------------
# colimit of a span whose beta leg is a semifree extension
# ---------------------------------------------------------------------------

def is_semifree_extension(f: DgFunctor) -> bool:
    """Inclusion of objects/generators whose complement is freely adjoined."""
    seen_objects = set()
    for obj in f.source.objects:
        img = f.object_map.get(obj)
        if img is None or img in seen_objects:
            return False
        seen_objects.add(img)
    seen = set()
    for g in f.source.generators:
        img = f.generator_map.get(g.name)
        if img is None or len(img.terms) != 1:
            return False
        ((word, coeff),) = img.terms.items()
        if isinstance(word, str) or len(word) != 1 or coeff != f.target.ring.one():
            return False
        letter = word[0]
        if letter.name in seen:
            return False
        seen.add(letter.name)
    return True


def _fresh(name: str, taken: set) -> str:
    while name in taken:
        name += "~"
    taken.add(name)
    return name


def colimit(span: PushoutSpan) -> SemifreeDgCat:
    """Pushout: the base extended by beta's new objects and generators, with
    every occurrence of the image of c rewritten through alpha."""
    a, c, b = span.a, span.c, span.b
    if not is_semifree_extension(span.beta):
        raise ValueError("beta leg is not a semifree extension")
    validate_functor(span.alpha)
    validate_functor(span.beta)
    ring = a.ring

    beta_objects = {span.beta.object_map[x]: x for x in c.objects}
    beta_gens = {}
    for g in c.generators:
        ((word, _),) = span.beta.generator_map[g.name].terms.items()
        beta_gens[word[0].name] = g.name

    object_map = {}
    taken_objects = set(a.objects)
    for obj in b.objects:
        if obj in beta_objects:
            object_map[obj] = span.alpha.object_map[beta_objects[obj]]
        else:
            object_map[obj] = _fresh(obj, taken_objects)
    objects = list(a.objects) + [object_map[o] for o in b.objects
                                 if o not in beta_objects]

    gens = list(a.generators)
    taken_names = {g.name for g in gens}
    rank = a.next_rank()
    new_gens = []
    gen_images = {}
    for g in b.generators:
        if g.name in beta_gens:
            gen_images[g.name] = span.alpha.generator_map[beta_gens[g.name]]
        else:
            fresh = _fresh(g.name, taken_names)
            ng = Generator(fresh, object_map[g.source], object_map[g.target],
                           g.degree, rank)
            rank += 1
            new_gens.append((g, ng))
            gen_images[g.name] = NcPoly.gen(ring, ng)
    table = dict(a.differentials)
    for g, ng in new_gens:
        table[ng.name] = push_poly(b.differentials[g.name], object_map,
                                   gen_images, ring)
        gens.append(ng)
    entry = {"op": "colimit",
             "identified": sorted((beta_objects[o], object_map[o])
                                  for o in beta_objects)}
    return new_semifree(ring, objects, gens, table, a.provenance + (entry,))


# ---------------------------------------------------------------------------
# homotopy colimit
# ---------------------------------------------------------------------------

def strip_localization(cat):
    """Drop localization clusters (inversion data only) from a category."""
    cluster_names = set()
    for rec in localization_records(cat):
        cluster_names.update(rec.names())
    if not cluster_names:
        return cat, set()
    gens = tuple(g for g in cat.generators if g.name not in cluster_names)
    table = {}
    for g in gens:
        dg = cat.differentials[g.name]
        for word in dg.terms:
            if isinstance(word, str):
                continue
            for letter in word:
                if letter.name in cluster_names:
                    raise ValueError(
                        f"cannot strip localization: d({g.name}) uses "
                        f"{letter.name}")
        table[g.name] = dg
    provenance = tuple(e for e in cat.provenance
                       if not (isinstance(e, dict) and e.get("op") == "localize"))
    core = SemifreeDgCat(cat.ring, cat.objects, gens, table, provenance)
    return core, cluster_names


def _restrict_leg(leg: DgFunctor, core) -> DgFunctor:
    return DgFunctor(core, leg.target, dict(leg.object_map),
                     {g.name: leg.generator_map[g.name] for g in core.generators},
                     dict(leg.object_shifts))


def hocolim(span: PushoutSpan):
    """Homotopy colimit of a span of semifree dg categories.

    Strictifies to the plain colimit whenever a leg is a semifree extension;
    otherwise runs the t-generator construction with t_X localized on the
    spot.
    """
    cat, _ = _hocolim_full(span)
    return cat


def _hocolim_full(span: PushoutSpan):
    a, c, b = span.a, span.c, span.b
    alpha, beta = span.alpha, span.beta
    core, dropped = strip_localization(c)
    if dropped:
        alpha = _restrict_leg(alpha, core)
        beta = _restrict_leg(beta, core)
        c = core
    if is_semifree_extension(beta):
        return colimit(PushoutSpan(a, c, b, alpha, beta)), None
    if is_semifree_extension(alpha):
        return colimit(PushoutSpan(b, c, a, beta, alpha)), None
    validate_functor(alpha)
    validate_functor(beta)
    ring = a.ring

    taken_objects = set(a.objects)
    object_map_a = {o: o for o in a.objects}
    object_map_b = {o: _fresh(o, taken_objects) for o in b.objects}
    objects = list(a.objects) + [object_map_b[o] for o in b.objects]

    taken = {g.name for g in a.generators}
    gens = list(a.generators)
    rank = a.next_rank()
    b_images = {}
    b_renamed = {}
    for g in b.generators:
        ng = Generator(_fresh(g.name, taken), object_map_b[g.source],
                       object_map_b[g.target], g.degree, rank)
        rank += 1
        gens.append(ng)
        b_images[g.name] = NcPoly.gen(ring, ng)
        b_renamed[g.name] = ng
    table = dict(a.differentials)
    for g in b.generators:
        table[b_renamed[g.name].name] = push_poly(
            b.differentials[g.name], object_map_b, b_images, ring)

    def push_alpha(p):
        return push_poly(p, alpha.object_map, alpha.generator_map, ring)

    def push_beta(p):
        raw = push_poly(p, beta.object_map, beta.generator_map, ring)
        return push_poly(raw, object_map_b, b_images, ring)

    # comparison generators t_X, localized on the spot
    t_obj = {}
    for x in c.objects:
        name = _fresh(f"t_{x}", taken)
        src = alpha.object_map[x]
        tgt = object_map_b[beta.object_map[x]]
        t = Generator(name, src, tgt, 0, rank)
        rank += 1
        gens.append(t)
        table[name] = NcPoly.zero(ring, src, tgt)
        t_obj[x] = t
    clusters = []
    for x in c.objects:
        t = t_obj[x]
        quad = [_fresh(t.name + suffix, taken) for suffix in QUAD_SUFFIXES]
        prime = Generator(quad[0], t.target, t.source, 0, rank)
        hat = Generator(quad[1], t.source, t.source, -1, rank + 1)
        check = Generator(quad[2], t.target, t.target, -1, rank + 2)
        bar = Generator(quad[3], t.source, t.target, -2, rank + 3)
        rank += 4
        t_poly = NcPoly.gen(ring, t)
        prime_poly = NcPoly.gen(ring, prime)
        gens.extend([prime, hat, check, bar])
        table[prime.name] = NcPoly.zero(ring, t.target, t.source)
        table[hat.name] = NcPoly.identity(ring, t.source) - compose(prime_poly, t_poly)
        table[check.name] = NcPoly.identity(ring, t.target) - compose(t_poly, prime_poly)
        table[bar.name] = (compose(t_poly, NcPoly.gen(ring, hat))
                           - compose(NcPoly.gen(ring, check), t_poly))
        clusters.append([t.name, *quad])

    # homotopy generators t_f
    t_gen = {}
    for g in c.generators:
        name = _fresh(f"t_{g.name}", taken)
        src = alpha.object_map[g.source]
        tgt = object_map_b[beta.object_map[g.target]]
        t_gen[g.name] = Generator(name, src, tgt, g.degree - 1, rank)
        rank += 1

    def twisted(p: NcPoly) -> NcPoly:
        """T(p): (beta, alpha)-twisted derivation with T(g) = t_g, T(1) = 0.

        On a word g_k...g_1 this is sum_j (-1)^{e_j} beta(g_k...g_{j+1})
        o t_{g_j} o alpha(g_{j-1}...g_1), e_j the degree of the right
        alpha-block.  The convention is pinned by the global d^2 = 0 audit.
        """
        src = alpha.object_map[p.source]
        tgt = object_map_b[beta.object_map[p.target]]
        out = NcPoly.zero(ring, src, tgt)
        for word, coeff in p.terms.items():
            if isinstance(word, str):
                continue
            right_degree = 0
            for j in range(len(word) - 1, -1, -1):
                piece = NcPoly.gen(ring, t_gen[word[j].name])
                if j < len(word) - 1:
                    right = word[j + 1:]
                    piece = compose(piece, push_alpha(
                        NcPoly(ring, right[-1].source, right[0].target,
                               {right: ring.one()})))
                if j > 0:
                    left = word[:j]
                    piece = compose(push_beta(
                        NcPoly(ring, left[-1].source, left[0].target,
                               {left: ring.one()})), piece)
                sign = -1 if right_degree % 2 else 1
                out = out + piece.scale(ring.mul(ring.normalize(sign), coeff))
                right_degree += word[j].degree
        return out

    for g in c.generators:
        tf = t_gen[g.name]
        gens.append(tf)
        g_poly = NcPoly.gen(ring, c.gen(g.name))
        main = (compose(push_beta(g_poly), NcPoly.gen(ring, t_obj[g.source]))
                - compose(NcPoly.gen(ring, t_obj[g.target]), push_alpha(g_poly)))
        if g.degree % 2:
            main = -main
        table[tf.name] = main + twisted(c.differentials[g.name])

    entry = {
        "op": "hocolim",
        "t_objects": {x: t_obj[x].name for x in c.objects},
        "t_gens": {g.name: t_gen[g.name].name for g in c.generators},
        "clusters": clusters,
        "identified": sorted((t_obj[x].source, t_obj[x].target)
                             for x in c.objects),
    }
    cat = new_semifree(ring, objects, gens, table, a.provenance + (entry,))
    ports = {
        "t_obj": t_obj,
        "t_gen": t_gen,
        "twisted": twisted,
        "object_map_a": object_map_a,
        "object_map_b": object_map_b,
        "b_renamed": b_renamed,
        "b_images": b_images,
        "core_c": c,
    }
    return cat, ports


@dataclass(frozen=True)
class SpanLadder:
    top: PushoutSpan
    bottom: PushoutSpan
    f_a: DgFunctor
    f_c: DgFunctor
    f_b: DgFunctor


def _functors_agree(f: DgFunctor, g: DgFunctor) -> bool:
    if f.source.objects != g.source.objects:
        return False
    for obj in f.source.objects:
        if f.object_map[obj] != g.object_map[obj]:
            return False
    for gen in f.source.generators:
        lhs = f.target.normalize(f.generator_map[gen.name])
        rhs = g.target.normalize(g.generator_map[gen.name])
        if (lhs.key_view() != rhs.key_view() or lhs.source != rhs.source
                or lhs.target != rhs.target):
            return False
    return True


def hocolim_functor(ladder: SpanLadder):
    """Induced functor between homotopy colimits of a commuting ladder.

    Restriction to the outer categories is the given vertical pair; t_X goes
    to t_{F(X)} and t_f to the twisted derivation applied to F(f).
    """
    top, bottom = ladder.top, ladder.bottom
    if not _functors_agree(compose_functors(ladder.f_a, top.alpha),
                           compose_functors(bottom.alpha, ladder.f_c)):
        raise ValueError("ladder does not commute on the alpha legs")
    if not _functors_agree(compose_functors(ladder.f_b, top.beta),
                           compose_functors(bottom.beta, ladder.f_c)):
        raise ValueError("ladder does not commute on the beta legs")
    h1, ports1 = _hocolim_full(top)
    h2, ports2 = _hocolim_full(bottom)
    if ports1 is None or ports2 is None:
        raise ValueError("hocolim_functor needs both spans in general position "
                         "(no semifree-extension leg)")
    ring = h2.ring

    object_map = {}
    for obj in top.a.objects:
        object_map[ports1["object_map_a"][obj]] = \
            ports2["object_map_a"][ladder.f_a.object_map[obj]]
    for obj in top.b.objects:
        object_map[ports1["object_map_b"][obj]] = \
            ports2["object_map_b"][ladder.f_b.object_map[obj]]

    gen_map = {}
    for g in top.a.generators:
        gen_map[g.name] = ladder.f_a.generator_map[g.name]
    for g in top.b.generators:
        renamed = ports1["b_renamed"][g.name]
        gen_map[renamed.name] = push_poly(ladder.f_b.generator_map[g.name],
                                          ports2["object_map_b"],
                                          ports2["b_images"], ring)
    records2 = {r.inverted: r for r in localization_records(h2)}
    records1 = {r.inverted: r for r in localization_records(h1)}
    for x in ports1["core_c"].objects:
        t1 = ports1["t_obj"][x]
        t2 = ports2["t_obj"][ladder.f_c.object_map[x]]
        gen_map[t1.name] = NcPoly.gen(ring, t2)
        rec1, rec2 = records1[t1.name], records2[t2.name]
        for n1, n2 in zip(rec1.names(), rec2.names()):
            gen_map[n1] = NcPoly.gen(ring, h2.gen(n2))
    for g in ports1["core_c"].generators:
        t1 = ports1["t_gen"][g.name]
        gen_map[t1.name] = ports2["twisted"](ladder.f_c.generator_map[g.name])

    functor = DgFunctor(h1, h2, object_map, gen_map)
    validate_functor(functor)
    return functor


def product_inverse(cat, names, obj: str | None = None):
    """Two-sided homotopy inverse of a product of localized generators.

    For the written-order product P = g_k o ... o g_1 (names listed left to
    right) with every g_i localized, returns (inv, hat, check) with
    d(hat) = 1 - inv o P and d(check) = 1 - P o inv, assembled from the
    localization clusters.
    """
    ring = cat.ring
    names = list(names)
    if not names:
        if obj is None:
            raise ValueError("empty product needs an object")
        ident = NcPoly.identity(ring, obj)
        return ident, NcPoly.zero(ring, obj, obj), NcPoly.zero(ring, obj, obj)
    records = {r.inverted: r for r in localization_records(cat)}
    # fold from the right end of the written product
    g = cat.gen(names[-1])
    rec = records[g.name]
    inv = NcPoly.gen(ring, cat.gen(rec.prime))
    hat = NcPoly.gen(ring, cat.gen(rec.hat))
    check = NcPoly.gen(ring, cat.gen(rec.check))
    prod = NcPoly.gen(ring, g)
    for name in reversed(names[:-1]):
        g = cat.gen(name)
        rec = records[g.name]
        g_poly = NcPoly.gen(ring, g)
        g_prime = NcPoly.gen(ring, cat.gen(rec.prime))
        g_hat = NcPoly.gen(ring, cat.gen(rec.hat))
        g_check = NcPoly.gen(ring, cat.gen(rec.check))
        # P' = g o P: inv' = inv o g', hat' = hat + inv g_hat P,
        # check' = g_check + g check g'
        hat = hat + compose(compose(inv, g_hat), prod)
        check = g_check + compose(compose(g_poly, check), g_prime)
        inv = compose(inv, g_prime)
        prod = compose(g_poly, prod)
    return inv, hat, check


# ---------------------------------------------------------------------------
# tensor product
# ---------------------------------------------------------------------------

def pair_object(a_obj: str, b_obj: str) -> str:
    return f"({a_obj},{b_obj})"


def tensor(cat_a, cat_b) -> RelationalDgCat:
    """A x B with interchange relations as rewrite rules.

    Generators are f(x)1_b and 1_a(x)g; a word with a B-letter directly left
    of an A-letter rewrites by the Koszul interchange, so normal forms have
    all A-letters written leftmost.
    """
    if cat_a.ring != cat_b.ring:
        raise ValueError("mixed coefficient rings")
    ring = cat_a.ring
    objects = [pair_object(x, y) for x in cat_a.objects for y in cat_b.objects]

    rank = 0
    a_letters = {}  # (a_gen name, b obj) -> Generator
    for f in cat_a.generators:
        for y in cat_b.objects:
            g = Generator(f"{f.name}⊗1_{y}", pair_object(f.source, y),
                          pair_object(f.target, y), f.degree, rank)
            rank += 1
            a_letters[(f.name, y)] = g
    b_letters = {}  # (a obj, b_gen name) -> Generator
    for ggen in cat_b.generators:
        for x in cat_a.objects:
            g = Generator(f"1_{x}⊗{ggen.name}", pair_object(x, ggen.source),
                          pair_object(x, ggen.target), ggen.degree, rank)
            rank += 1
            b_letters[(x, ggen.name)] = g

    gens = [a_letters[(f.name, y)] for f in cat_a.generators
            for y in cat_b.objects]
    gens += [b_letters[(x, g.name)] for g in cat_b.generators
             for x in cat_a.objects]

    table = {}
    for f in cat_a.generators:
        for y in cat_b.objects:
            images = {h.name: NcPoly.gen(ring, a_letters[(h.name, y)])
                      for h in cat_a.generators}
            omap = {x: pair_object(x, y) for x in cat_a.objects}
            table[a_letters[(f.name, y)].name] = push_poly(
                cat_a.differentials[f.name], omap, images, ring)
    for gg in cat_b.generators:
        for x in cat_a.objects:
            images = {h.name: NcPoly.gen(ring, b_letters[(x, h.name)])
                      for h in cat_b.generators}
            omap = {y: pair_object(x, y) for y in cat_b.objects}
            table[b_letters[(x, gg.name)].name] = push_poly(
                cat_b.differentials[gg.name], omap, images, ring)

    rules = []
    for f in cat_a.generators:
        for gg in cat_b.generators:
            left = b_letters[(f.target, gg.name)]
            right = a_letters[(f.name, gg.source)]
            lhs = (left, right)
            sign = -1 if (f.degree % 2) and (gg.degree % 2) else 1
            rhs = compose(NcPoly.gen(ring, a_letters[(f.name, gg.target)]),
                          NcPoly.gen(ring, b_letters[(f.source, gg.name)]))
            rules.append((lhs, rhs.scale(sign)))

    entry = {"op": "tensor", "factors": [len(cat_a.objects), len(cat_b.objects)]}
    return new_relational(ring, objects, gens, table, rules,
                          provenance=(entry,))
