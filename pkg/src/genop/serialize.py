"""JSON documents: a schema version in every file, deterministic output."""
from __future__ import annotations

import hashlib
import json
from typing import Any, Mapping

from .completion import FCMor
from .fincat import CategoryError, FinCategory, Functor, SetFunctor
from .fmulti import FMulticategory, colour_change, constant_multicat, coproduct, nonsym, sigma_star
from .report import jsonable

SCHEMA_VERSION = 1


class FormatError(CategoryError):
    pass


def dumps(doc: Any) -> str:
    return json.dumps(jsonable(doc), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def wrap(kind: str, payload: Mapping) -> dict:
    doc = {"schema": SCHEMA_VERSION, "kind": kind}
    doc.update(payload)
    return doc


def loads(text: str, kinds: tuple[str, ...] | None = None) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"not valid JSON: {e}") from e
    return check_doc(doc, kinds)


def check_doc(doc: Any, kinds: tuple[str, ...] | None = None) -> dict:
    if not isinstance(doc, dict):
        raise FormatError("a document must be a JSON object")
    if "schema" not in doc:
        raise FormatError("missing schema version")
    if doc["schema"] != SCHEMA_VERSION:
        raise FormatError(f"unsupported schema version {doc['schema']!r} (this build reads {SCHEMA_VERSION})")
    if kinds is not None and doc.get("kind") not in kinds:
        raise FormatError(f"expected a document of kind {' or '.join(kinds)}, got {doc.get('kind')!r}")
    return doc


# -- categories and functors

def category_from_json(doc: Mapping, name: str = "") -> FinCategory:
    return FinCategory.from_json(doc, name=name or str(doc.get("name", "")))


def functor_from_json(dom: FinCategory, cod: FinCategory, doc: Mapping) -> Functor:
    try:
        return Functor(dom, cod, {str(k): str(v) for k, v in doc["ob"].items()},
                       {str(k): str(v) for k, v in doc["mor"].items()})
    except (KeyError, AttributeError) as e:
        raise FormatError(f"malformed functor document: {e}") from e


def functor_to_json(f: Functor) -> dict:
    return {"ob": dict(sorted(f.ob.items())), "mor": dict(sorted(f.mor.items()))}


def presheaf_from_json(c: FinCategory, doc: Mapping) -> SetFunctor:
    """A set functor on c from {"values": {x: [...]}, "action": {m: {e: e'}}}; a
    missing action is the identity."""
    try:
        sets = {x: tuple(str(e) for e in doc.get("values", {}).get(x, ())) for x in c.objects}
        action = doc.get("action", {})
        maps = {}
        for m in c.morphisms:
            if m in action:
                maps[m] = {str(k): str(v) for k, v in action[m].items()}
            else:
                maps[m] = {e: e for e in sets[c.src[m]]}
    except AttributeError as e:
        raise FormatError(f"malformed set functor document: {e}") from e
    return SetFunctor(c, sets, maps)


# -- F-multicategories

BUILDERS = ("sigma-star", "nonsym", "constant", "coproduct", "colour-change", "sigma-ot")


def multicat_to_json(m: FMulticategory) -> dict:
    """Full tables: both categories, source/target/unit, composition on objects and
    morphisms of the bounded composability category."""
    p = m.composable
    comp_ob = [[f, list(gs), m.comp.ob[o]] for o, (f, gs) in sorted(p.meta["ob"].items())]
    comp_mor = []
    for mid, (u, vs, o, o2) in sorted(p.meta["mor"].items()):
        comp_mor.append([u, list(vs), list(p.meta["ob"][o2][1]), m.comp.mor[mid]])
    excused = []
    if m.lift_exceeds_bound is not None:
        for v in m.m0.morphisms:
            for f in m.m1.objects:
                if m.t(f) == m.m0.tgt[v] and m.lift_exceeds_bound(v, f):
                    excused.append([v, f])
    return {
        "name": m.name,
        "bound": m.bound,
        "m0": m.m0.to_json(),
        "m1": m.m1.to_json(),
        "source": {f: list(xs) for f, xs in sorted(m.src_ob.items())},
        "source_mor": {u: fm.to_json() for u, fm in sorted(m.src_mor.items())},
        "target": functor_to_json(m.target),
        "unit": functor_to_json(m.unit),
        "comp": comp_ob,
        "comp_mor": comp_mor,
        "lifts_beyond_bound": excused,
    }


def multicat_from_tables(doc: Mapping) -> FMulticategory:
    try:
        m0 = category_from_json(doc["m0"])
        m1 = category_from_json(doc["m1"])
        src_ob = {str(f): tuple(str(x) for x in xs) for f, xs in doc["source"].items()}
        src_mor = {str(u): FCMor.from_json(v) for u, v in doc["source_mor"].items()}
        target = functor_from_json(m1, m0, doc["target"])
        unit = functor_from_json(m0, m1, doc["unit"])
        cob = {(str(f), tuple(str(g) for g in gs)): str(r) for f, gs, r in doc["comp"]}
        cmor = {(str(u), tuple(str(v) for v in vs), tuple(str(g) for g in gs2)): str(r)
                for u, vs, gs2, r in doc["comp_mor"]}
        bound = int(doc["bound"])
        excused = {(str(v), str(f)) for v, f in doc.get("lifts_beyond_bound", [])}
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f"malformed multicategory document: {e}") from e

    def comp_ob(f, gs):
        try:
            return cob[f, tuple(gs)]
        except KeyError:
            raise FormatError(f"composition table has no entry for {f} with {list(gs)}") from None

    def comp_mor(u, vs, gs, gs2):
        try:
            return cmor[u, tuple(vs), tuple(gs2)]
        except KeyError:
            raise FormatError(f"composition table has no entry for {u} with {list(vs)}") from None

    m = FMulticategory(m0, m1, src_ob, src_mor, target, unit, comp_ob, comp_mor, bound,
                       name=str(doc.get("name", "")))
    if excused:
        m.lift_exceeds_bound = lambda v, f: (v, f) in excused
    return m


def build_multicat(name: str, arity: int = 3, doc: Mapping | None = None) -> FMulticategory:
    """Named constructors; doc carries their inputs (a category, operands, a functor)."""
    doc = doc or {}
    if name == "sigma-star":
        return sigma_star(arity)
    if name == "nonsym":
        return nonsym(arity)
    if name == "constant":
        if "category" not in doc:
            raise FormatError("the constant builder needs a category")
        return constant_multicat(category_from_json(doc["category"]), arity)
    if name == "coproduct":
        if "left" not in doc or "right" not in doc:
            raise FormatError("the coproduct builder needs left and right")
        return coproduct(multicat_from_json(doc["left"], arity), multicat_from_json(doc["right"], arity))
    if name == "colour-change":
        if not all(k in doc for k in ("multicat", "category", "functor")):
            raise FormatError("the colour-change builder needs multicat, category and functor")
        m = multicat_from_json(doc["multicat"], arity)
        a = category_from_json(doc["category"])
        return colour_change(m, functor_from_json(a, m.m0, doc["functor"]))
    if name == "sigma-ot":
        from .orbital import OrbitalPair, sigma_OT, transfer_systems
        if "pair" in doc:
            return sigma_OT(OrbitalPair.from_json(doc["pair"]), arity)
        if "group" in doc:
            systems, _ = transfer_systems(group_from_json(doc["group"]))
            i = int(doc.get("transfer", 0))
            if not 0 <= i < len(systems):
                raise FormatError(f"transfer system index {i} out of range 0..{len(systems) - 1}")
            return sigma_OT(systems[i].pair, arity)
        raise FormatError("the sigma-ot builder needs an orbital pair or a group")
    raise FormatError(f"unknown builder {name!r}; known: {', '.join(BUILDERS)}")


def multicat_from_json(doc: Any, arity: int | None = None) -> FMulticategory:
    """A multicategory reference: a builder name, {"builder": name, ...} or full tables."""
    if isinstance(doc, str):
        return build_multicat(doc, 3 if arity is None else arity)
    if not isinstance(doc, Mapping):
        raise FormatError("a multicategory reference is a builder name or an object")
    if "builder" in doc:
        n = arity if arity is not None else int(doc.get("arity", 3))
        return build_multicat(str(doc["builder"]), n, doc)
    return multicat_from_tables(doc)


def group_from_json(doc: Any):
    """'cyclic:n', 'trivial', {"cyclic": n} or {"elements": [...], "table": [[...]]}."""
    from .orbital import FiniteGroup, parse_group
    if isinstance(doc, str):
        return parse_group(doc)
    try:
        return FiniteGroup.from_json(doc)
    except (KeyError, TypeError, IndexError, ValueError) as e:
        raise FormatError(f"malformed group document: {e}") from e


# -- coloured operads

def named_category(doc: Any) -> FinCategory:
    from .fincat import arrow, terminal, walking_iso
    named = {"terminal": terminal, "walking-iso": walking_iso, "arrow": arrow}
    if isinstance(doc, str):
        if doc not in named:
            raise FormatError(f"unknown category {doc!r}; known: {', '.join(named)}")
        return named[doc]()
    return category_from_json(doc)


def _presheaf(m: FMulticategory, doc: Mapping):
    from .operads.basechange import presheaf
    if not isinstance(doc, Mapping):
        raise FormatError("a presheaf is an object with values and action")
    values = {str(x): [str(e) for e in v] for x, v in doc.get("values", {}).items()}
    action = {str(v): {str(a): str(b) for a, b in mp.items()} for v, mp in doc.get("action", {}).items()}
    return presheaf(m, values, action)


def coloured_from_doc(m: FMulticategory, doc: Mapping, name: str = ""):
    """{"colours": presheaf, "operad": "unit" | "terminal" | "chaotic" | operad tables}."""
    from .operads.basechange import ColourChange
    from .operads.coloured import ColouredOperad, coloured_terminal, coloured_unary, coloured_unit
    from .operads.structures import operad_from_json
    if "colours" not in doc:
        raise FormatError("a coloured operad needs colours")
    a = _presheaf(m, doc["colours"])
    op = doc.get("operad", "terminal")
    if isinstance(op, str):
        named = {"unit": coloured_unit, "terminal": coloured_terminal, "chaotic": coloured_unary}
        if op not in named:
            raise FormatError(f"unknown coloured operad {op!r}; known: {', '.join(named)}")
        return named[op](m, a, name or op)
    cc = ColourChange(m, a)
    try:
        return ColouredOperad(cc, operad_from_json(cc.ma, op), name or "operad")
    except (KeyError, TypeError) as e:
        raise FormatError(f"malformed operad document: {e}") from e


def attachment_from_doc(doc: Mapping, arity: int | None = None):
    """Colours and operad as for a coloured operad, plus "new" (presheaf of new
    colours), "k" and "h" (categories or names), "u" (functor, default: the object of
    k to the first object of h), "base" {X: {x: colour}} and "w" {X: {x: {k: op}}},
    by default the unit when k has only its identity."""
    from .operads.coloured import Attachment
    m = multicat_from_json(doc.get("multicat", "nonsym"), arity)
    co = coloured_from_doc(m, doc)
    new = _presheaf(m, doc.get("new", {}))
    k = named_category(doc.get("k", "terminal"))
    if "h" not in doc:
        raise FormatError("an attachment needs h")
    h = named_category(doc["h"])
    if "u" in doc:
        u = functor_from_json(k, h, doc["u"])
    else:
        if len(k.objects) != 1 or len(k.morphisms) != 1:
            raise FormatError("u can only be omitted when k is terminal")
        y = h.objects[0]
        u = Functor(k, h, {k.objects[0]: y}, {k.morphisms[0]: h.ident[y]})
    try:
        base = {(str(x), str(e)): str(c) for x, mp in doc.get("base", {}).items() for e, c in mp.items()}
        if "w" in doc:
            w = {(str(x), str(e)): {str(a): str(b) for a, b in ks.items()}
                 for x, mp in doc["w"].items() for e, ks in mp.items()}
        else:
            if len(k.morphisms) != 1:
                raise FormatError("w can only be omitted when k is terminal")
            w = {key: {k.morphisms[0]: co.unit(key[0], c)} for key, c in base.items()}
    except AttributeError as e:
        raise FormatError(f"malformed attachment: {e}") from e
    for x in m.m0.objects:
        for e in new.sets[x]:
            if (x, e) not in base:
                raise FormatError(f"no base colour for new colour {e} at {x}")
    return Attachment(co, new, u, base, w)


def morphisms_from_doc(doc: Mapping, arity: int | None = None) -> list:
    """{"source", "target", optional "colour_map" and "phi"}; without phi every
    morphism is enumerated."""
    from .operads.coloured import ColouredMorphism, coloured_morphisms
    m = multicat_from_json(doc.get("multicat", "nonsym"), arity)
    if "source" not in doc or "target" not in doc:
        raise FormatError("a morphism document needs source and target")
    src = coloured_from_doc(m, doc["source"], "source")
    tgt = coloured_from_doc(m, doc["target"], "target")
    if "phi" not in doc:
        return coloured_morphisms(src, tgt)
    f = {str(x): {str(a): str(b) for a, b in mp.items()} for x, mp in doc.get("colour_map", {}).items()}
    phi = {str(s): {str(a): str(b) for a, b in mp.items()} for s, mp in doc["phi"].items()}
    return [ColouredMorphism(src, tgt, f, phi)]
