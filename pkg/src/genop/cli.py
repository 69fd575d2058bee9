"""Command-line front end.

Exit codes: 0 all checks pass, 1 a check failed (the witness is printed),
2 input or format error, 3 a resource cap was exceeded.
"""
from __future__ import annotations

import random
import sys
import time
from typing import Any

import click

from .completion import ArityBoundExceeded
from .fincat import CapExceeded, CategoryError
from .report import Report, jsonable
from .serialize import (FormatError, category_from_json, digest, dumps, functor_from_json,
                        group_from_json, loads, multicat_from_json, multicat_to_json, wrap)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3


class RunReport:
    """Checks and data of one command.  The JSON form has no timings so that equal
    inputs give byte-identical output."""

    def __init__(self, command: str, params: dict):
        self.command = command
        self.params = {k: v for k, v in sorted(params.items()) if v is not None and v is not False}
        self.inputs: dict[str, str] = {}
        self.checks: list[dict] = []
        self.timings: list[float] = []
        self.data: dict[str, Any] = {}
        self.bound: int | None = None

    @property
    def ok(self) -> bool:
        return all(c["pass"] for c in self.checks)

    def check(self, name: str, witness: Any = None, detail: str = "", seconds: float = 0.0):
        self.checks.append({"name": name, "pass": witness is None, "witness": jsonable(witness), "detail": detail})
        self.timings.append(seconds)

    def add_report(self, rep: Report, seconds: float = 0.0):
        if rep.arity_bound is not None:
            self.bound = rep.arity_bound
        for r in rep.results:
            self.check(f"{rep.subject}: {r.name}", r.witness if not r.ok else None, r.detail, seconds / max(1, len(rep.results)))

    def timed(self, fn, *args, **kw) -> Report:
        t = time.perf_counter()
        rep = fn(*args, **kw)
        self.add_report(rep, time.perf_counter() - t)
        return rep

    def to_json(self) -> dict:
        return wrap("run-report", {
            "command": self.command,
            "params": self.params,
            "inputs": dict(sorted(self.inputs.items())),
            "arity_bound": self.bound,
            "checks": self.checks,
            "data": self.data,
            "ok": self.ok,
        })

    def to_text(self) -> str:
        lines = [f"{self.command}  (arity bound {self.bound if self.bound is not None else 'n/a'})"]
        for name, dg in sorted(self.inputs.items()):
            lines.append(f"  input {name}: sha256 {dg}")
        for c, t in zip(self.checks, self.timings):
            mark = "pass" if c["pass"] else "FAIL"
            extra = f"  ({c['detail']})" if c["detail"] else ""
            lines.append(f"  {mark}  {c['name']}{extra}  [{t:.3f}s]")
            if not c["pass"]:
                lines.append(f"        witness: {c['witness']}")
        for k, v in sorted(self.data.items()):
            lines.append(f"  {k}: {jsonable(v)}")
        lines.append("ok" if self.ok else "FAILED")
        return "\n".join(lines)


def _read_input(report: RunReport, path: str | None, required: bool = True) -> dict | None:
    if path is None or path == "-":
        if path is None and sys.stdin.isatty():
            if required:
                raise FormatError("no input: pass --file or pipe a document on standard input")
            return None
        text = sys.stdin.read()
        if not text.strip():
            if required:
                raise FormatError("empty input")
            return None
        name = "stdin"
    else:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise FormatError(f"cannot read {path}: {e.strerror}") from e
        name = path
    report.inputs[name] = digest(text)
    return loads(text)


def _finish(report: RunReport, as_json: bool) -> None:
    click.echo(dumps(report.to_json()) if as_json else report.to_text(), nl=not as_json)
    sys.exit(EXIT_OK if report.ok else EXIT_FAIL)


def _guard(fn):
    """Map library errors to exit codes."""
    import functools

    @functools.wraps(fn)
    def run(*args, **kw):
        try:
            return fn(*args, **kw)
        except (CapExceeded, ArityBoundExceeded) as e:
            click.echo(f"error: resource cap exceeded: {e}", err=True)
            sys.exit(EXIT_CAP)
        except (FormatError, CategoryError, KeyError, ValueError, TypeError) as e:
            click.echo(f"error: bad input: {e}", err=True)
            sys.exit(EXIT_INPUT)
    return run


def common(fn):
    fn = click.option("--seed", type=int, default=None, help="Seed for randomly generated inputs.")(fn)
    fn = click.option("--max-stage", "max_stage", type=int, default=6, show_default=True,
                      help="Stage limit for iterative constructions.")(fn)
    fn = click.option("--json", "as_json", is_flag=True, help="Emit one JSON document.")(fn)
    fn = click.option("--arity", type=int, default=None, help="Arity bound (default 3, or the file's).")(fn)
    fn = click.option("--file", "path", type=str, default=None, help="Input document ('-' for stdin).")(fn)
    return _guard(fn)


def _start(ctx: click.Context) -> RunReport:
    return RunReport(ctx.command_path.split(" ", 1)[-1], dict(ctx.params))


@click.group()
@click.version_option(package_name="genop")
def main():
    """Exact checks and constructions for finite categories and operads."""


# -- fincat

@main.group()
def fincat():
    """Finite categories."""


@fincat.command("check")
@common
@click.pass_context
def fincat_check(ctx, path, arity, as_json, max_stage, seed):
    """Check a category document, or a functor document {dom, cod, functor}."""
    rep = _start(ctx)
    doc = _read_input(rep, path)
    kind = doc.get("kind")
    if kind == "functor":
        dom, cod = category_from_json(doc["dom"]), category_from_json(doc["cod"])
        try:
            f = functor_from_json(dom, cod, doc["functor"])
            rep.check("functor laws")
            rep.data["objects"] = len(f.ob)
        except FormatError:
            raise
        except CategoryError as e:
            rep.check("functor laws", str(e))
    else:
        try:
            c = category_from_json(doc)
            rep.check("category laws")
            rep.data["objects"] = len(c.objects)
            rep.data["morphisms"] = len(c.morphisms)
        except FormatError:
            raise
        except CategoryError as e:
            rep.check("category laws", str(e))
    _finish(rep, as_json)


# -- fmulti

@main.group()
def fmulti():
    """F-multicategories."""


def _load_multicat(rep: RunReport, path, arity):
    doc = _read_input(rep, path)
    m = multicat_from_json(doc.get("multicat", doc), arity)
    rep.bound = m.bound
    rep.data["multicategory"] = m.name
    rep.data["sizes"] = {"objects": len(m.m0.objects), "multimorphisms": len(m.m1.objects),
                         "morphisms": len(m.m1.morphisms)}
    return m


@fmulti.command("check")
@common
@click.pass_context
def fmulti_check(ctx, path, arity, as_json, max_stage, seed):
    """Axioms of an F-multicategory document (full tables or a builder reference)."""
    from .fmulti import check_fmulticategory
    rep = _start(ctx)
    m = _load_multicat(rep, path, arity)
    rep.timed(check_fmulticategory, m)
    _finish(rep, as_json)


@fmulti.command("fibrancy")
@common
@click.pass_context
def fmulti_fibrancy(ctx, path, arity, as_json, max_stage, seed):
    """Target right fibrancy: t a right fibration and composition an isofibration."""
    from .fmulti import target_right_fibrant_report
    rep = _start(ctx)
    m = _load_multicat(rep, path, arity)
    rep.timed(target_right_fibrant_report, m)
    _finish(rep, as_json)


@fmulti.command("build")
@click.argument("builder", type=click.Choice(["sigma-star", "nonsym", "constant", "coproduct",
                                              "colour-change", "sigma-ot"]))
@common
@click.pass_context
def fmulti_build(ctx, builder, path, arity, as_json, max_stage, seed):
    """Write the full tables of a built F-multicategory to standard output.

    constant, coproduct, colour-change and sigma-ot read their inputs from --file.
    """
    from .serialize import build_multicat
    rep = _start(ctx)
    needs = builder in ("constant", "coproduct", "colour-change", "sigma-ot")
    doc = _read_input(rep, path) if needs or path is not None else {}
    m = build_multicat(builder, 3 if arity is None else arity, doc)
    click.echo(dumps(wrap("fmulticategory", multicat_to_json(m))), nl=False)


# -- orbital

@main.group()
def orbital():
    """Orbit categories, transfer systems and pullback-square multicategories."""


def _group(rep: RunReport, group, path):
    if group is not None:
        rep.data["group"] = group
        return group_from_json(group)
    doc = _read_input(rep, path)
    return group_from_json(doc.get("group", doc))


group_option = click.option("--group", type=str, default=None, help="cyclic:n, trivial, or use --file.")


@orbital.command("orbit-cat")
@group_option
@common
@click.pass_context
def orbital_orbit_cat(ctx, group, path, arity, as_json, max_stage, seed):
    """The orbit category: all subgroups, equivariant maps between orbits."""
    from .orbital import orbit_category
    rep = _start(ctx)
    g = _group(rep, group, path)
    o = orbit_category(g)
    rep.check("orbit category laws")
    rep.data["order"] = g.order
    rep.data["objects"] = list(o.objects)
    rep.data["morphisms"] = len(o.morphisms)
    rep.data["category"] = o.to_json()
    _finish(rep, as_json)


@orbital.command("transfer-systems")
@group_option
@common
@click.pass_context
def orbital_transfer_systems(ctx, group, path, arity, as_json, max_stage, seed):
    """All transfer systems, with the inclusion poset as Hasse edges."""
    from .orbital import poset_extremes, transfer_systems
    rep = _start(ctx)
    g = _group(rep, group, path)
    t = time.perf_counter()
    systems, hasse = transfer_systems(g)
    dt = time.perf_counter() - t
    mins, maxs = poset_extremes([frozenset(ts.pair.t_morphisms) for ts in systems])
    rep.check("unique bottom", None if len(mins) == 1 else mins, seconds=dt)
    rep.check("unique top", None if len(maxs) == 1 else maxs)
    rep.data["count"] = len(systems)
    rep.data["transfer_systems"] = [ts.to_json() for ts in systems]
    rep.data["hasse"] = [list(e) for e in hasse]
    _finish(rep, as_json)


@orbital.command("sigma-ot")
@group_option
@click.option("--transfer", type=int, default=0, show_default=True, help="Index of the transfer system.")
@common
@click.pass_context
def orbital_sigma_ot(ctx, group, transfer, path, arity, as_json, max_stage, seed):
    """Build the pullback-square multicategory of a transfer system and check it."""
    from .fmulti import check_fmulticategory, target_right_fibrant_report
    from .orbital import sigma_OT, transfer_systems
    rep = _start(ctx)
    g = _group(rep, group, path)
    systems, _ = transfer_systems(g)
    if not 0 <= transfer < len(systems):
        raise FormatError(f"transfer system index {transfer} out of range 0..{len(systems) - 1}")
    m = sigma_OT(systems[transfer].pair, 2 if arity is None else arity)
    rep.data["sizes"] = {"multimorphisms": len(m.m1.objects), "morphisms": len(m.m1.morphisms)}
    rep.timed(check_fmulticategory, m)
    rep.timed(target_right_fibrant_report, m)
    _finish(rep, as_json)


@orbital.command("check-pair")
@common
@click.pass_context
def orbital_check_pair(ctx, path, arity, as_json, max_stage, seed):
    """Check an orbital pair document {category, t}."""
    from .orbital import OrbitalPair, check_orbital_pair
    rep = _start(ctx)
    doc = _read_input(rep, path)
    rep.timed(check_orbital_pair, OrbitalPair.from_json(doc.get("pair", doc)), 3 if arity is None else arity)
    _finish(rep, as_json)


# -- collections

@main.group()
def collections():
    """Collections and the composition product."""


def _random_collection(m, rnd: random.Random, max_size: int = 2, below_bound: bool = False):
    """Random sets on a discrete multicategory; below_bound leaves the top arity empty."""
    from .operads.collections import collection
    return collection(m, {f: [f"{f}.{i}" for i in range(rnd.randint(0, max_size))] for f in m.m1.objects
                          if not (below_bound and m.arity(f) == m.bound)})


def _collection_pair(rep: RunReport, path, arity, seed):
    """From --file {multicat, left, right}, or a random pair over nonsym when --seed is given."""
    from .fmulti import nonsym
    from .operads.collections import collection_from_json
    if path is None and seed is not None:
        m = nonsym(3 if arity is None else arity)
        rnd = random.Random(seed)
        s, t = _random_collection(m, rnd, below_bound=True), _random_collection(m, rnd)
        rep.data["seed"] = seed
    else:
        doc = _read_input(rep, path)
        m = multicat_from_json(doc.get("multicat", "nonsym"), arity)
        s = collection_from_json(m, doc["left"])
        t = collection_from_json(m, doc["right"])
    rep.bound = m.bound
    rep.data["left"] = s.sizes()
    rep.data["right"] = t.sizes()
    return m, s, t


@collections.command("compose")
@common
@click.pass_context
def collections_compose(ctx, path, arity, as_json, max_stage, seed):
    """The composition product of two collections, checked against its defining colimit."""
    from .operads.collections import compose_collections, composite_is_exact
    rep = _start(ctx)
    m, s, t = _collection_pair(rep, path, arity, seed)
    exact = composite_is_exact(s, t)
    rep.check("finite composite within the bound", None if exact else "support reaches the arity bound",
              detail="" if exact else "rerun with a larger --arity")
    if exact:
        st = compose_collections(s, t)
        st.validate()
        rep.check("composite is a presheaf")
        rep.data["composite"] = st.sizes()
    _finish(rep, as_json)


@collections.command("hom")
@common
@click.pass_context
def collections_hom(ctx, path, arity, as_json, max_stage, seed):
    """The internal hom hom(left, right) for the composition product."""
    from .operads.collections import internal_hom
    rep = _start(ctx)
    m, t, u = _collection_pair(rep, path, arity, seed)
    h = internal_hom(t, u)
    h.validate()
    rep.check("internal hom is a presheaf")
    rep.data["hom"] = h.sizes()
    _finish(rep, as_json)


@collections.command("unit")
@common
@click.pass_context
def collections_unit(ctx, path, arity, as_json, max_stage, seed):
    """The unit collection of a multicategory (default nonsym)."""
    from .operads.collections import unit_collection
    rep = _start(ctx)
    doc = _read_input(rep, path, required=False) if path is not None else None
    m = multicat_from_json((doc or {}).get("multicat", "nonsym"), arity)
    rep.bound = m.bound
    rep.check("unit collection built")
    rep.data["unit"] = unit_collection(m).sizes()
    _finish(rep, as_json)


# -- operads

@main.group()
def operad():
    """Operads, their monoid form and free operads."""


def _operad_doc(rep: RunReport, path, arity):
    from .operads.structures import operad_from_json
    doc = _read_input(rep, path)
    m = multicat_from_json(doc.get("multicat", "nonsym"), arity)
    rep.bound = m.bound
    return m, doc, (operad_from_json(m, doc) if "units" in doc else None)


@operad.command("check")
@common
@click.pass_context
def operad_check(ctx, path, arity, as_json, max_stage, seed):
    """Units, naturality, associativity and unit laws of an operad document."""
    from .operads.structures import check_operad
    rep = _start(ctx)
    m, doc, o = _operad_doc(rep, path, arity)
    if o is None:
        raise FormatError("an operad document needs units and comp")
    rep.timed(check_operad, o)
    rep.data["sizes"] = o.coll.sizes()
    _finish(rep, as_json)


@operad.command("free")
@common
@click.pass_context
def operad_free(ctx, path, arity, as_json, max_stage, seed):
    """The free operad on a collection through its stages J + X o S_n."""
    from .operads.collections import collection_from_json
    from .operads.structures import check_operad, free_operad
    rep = _start(ctx)
    doc = _read_input(rep, path)
    m = multicat_from_json(doc.get("multicat", "nonsym"), arity)
    rep.bound = m.bound
    x = collection_from_json(m, doc)
    t = time.perf_counter()
    res = free_operad(x, max_stage)
    dt = time.perf_counter() - t
    rep.data["stages"] = res.sizes()
    rep.data["stabilized"] = res.stabilized
    if res.stabilized:
        rep.check("stages stabilize", seconds=dt)
        rep.data["stable_stage"] = res.stable_stage
        rep.data["arity_sizes"] = res.operad.coll.sizes()
        rep.timed(check_operad, res.operad)
    else:
        rep.check("stages stabilize", f"no stable stage up to {max_stage}", seconds=dt)
    _finish(rep, as_json)


@operad.command("monoid-roundtrip")
@common
@click.pass_context
def operad_monoid_roundtrip(ctx, path, arity, as_json, max_stage, seed):
    """Operad to monoid and back is the identity.  A collection document instead
    compares the counts of operad and monoid structures on it."""
    from .operads.collections import collection_from_json
    from .operads.structures import (all_monoid_structures, all_operad_structures, check_monoid,
                                     monoid_as_operad, operad_as_monoid)
    rep = _start(ctx)
    m, doc, o = _operad_doc(rep, path, arity)
    if o is not None:
        mon = operad_as_monoid(o)
        rep.timed(check_monoid, mon)
        rep.check("round trip is the identity", None if monoid_as_operad(mon) == o else "structures differ")
    else:
        coll = collection_from_json(m, doc)
        ops = all_operad_structures(coll)
        mons = all_monoid_structures(coll)
        rep.data["operad_structures"] = len(ops)
        rep.data["monoid_structures"] = len(mons)
        rep.check("equal counts", None if len(ops) == len(mons) else (len(ops), len(mons)))
        back = {repr(sorted(monoid_as_operad(operad_as_monoid(x)).comp.items(), key=repr)) for x in ops}
        rep.check("round trip is the identity on every structure",
                  None if back == {repr(sorted(x.comp.items(), key=repr)) for x in ops} else "structures differ")
    _finish(rep, as_json)


# -- coloured operads

@main.group()
def coloured():
    """Coloured operads: pushouts attaching colours, equivalence predicates."""


@coloured.command("pushout")
@common
@click.pass_context
def coloured_pushout(ctx, path, arity, as_json, max_stage, seed):
    """Attach new colours along u : K -> H and check the result."""
    from .operads.coloured import (coloured_terminal, coloured_unary, coloured_unit, explicit_pushout,
                                   is_essentially_surjective, is_fully_faithful, pushout_well_defined,
                                   universal_property_report)
    from .operads.basechange import presheaf
    from .serialize import attachment_from_doc
    rep = _start(ctx)
    doc = _read_input(rep, path)
    att = attachment_from_doc(doc, arity)
    rep.bound = att.co.m.bound
    rep.timed(att.check)
    res = explicit_pushout(att, check=False)
    rep.timed(res.operad.check)
    rep.timed(pushout_well_defined, res)
    rep.timed(res.inclusion.check)
    ff = is_fully_faithful(res.inclusion)
    rep.check("map into the pushout is fully faithful", None if ff else "an operation map is not bijective")
    m = att.co.m
    two = presheaf(m, {x: ["p", "q"] for x in m.m0.objects})
    targets = [res.operad, coloured_terminal(m, att.co.colours), coloured_unary(m, two), coloured_unit(m, two)]
    rep.timed(universal_property_report, res, targets)
    rep.data["colours"] = res.sizes()
    rep.data["essentially_surjective"] = is_essentially_surjective(res.inclusion)
    rep.data["operations"] = {s: n for s, n in sorted(res.operad.operad.coll.sizes().items()) if n}
    _finish(rep, as_json)


def _predicates(mor) -> dict:
    from .operads.coloured import (is_equivalence, is_essentially_surjective, is_fully_faithful,
                                   is_local_fibration_setlevel)
    return {"fully_faithful": is_fully_faithful(mor), "essentially_surjective": is_essentially_surjective(mor),
            "equivalence": is_equivalence(mor), "local_fibration": is_local_fibration_setlevel(mor)}


@coloured.command("predicates")
@common
@click.pass_context
def coloured_predicates(ctx, path, arity, as_json, max_stage, seed):
    """Check a morphism (or every morphism) between coloured operads and report its predicates."""
    from .serialize import morphisms_from_doc
    rep = _start(ctx)
    doc = _read_input(rep, path)
    mors = morphisms_from_doc(doc, arity)
    if mors:
        rep.bound = mors[0].src.m.bound
    for i, mor in enumerate(mors):
        r = mor.check()
        r.subject = f"morphism {i}"
        rep.add_report(r)
    rep.data["morphisms"] = [_predicates(mor) for mor in mors]
    _finish(rep, as_json)


@coloured.command("reduce")
@common
@click.pass_context
def coloured_reduce(ctx, path, arity, as_json, max_stage, seed):
    """Compare each predicate with its test through finite colour sequences."""
    from .operads.coloured import (finite_colour_reduction, is_fully_faithful,
                                   is_local_fibration_setlevel)
    from .serialize import morphisms_from_doc
    rep = _start(ctx)
    doc = _read_input(rep, path)
    mors = morphisms_from_doc(doc, arity)
    out = []
    for i, mor in enumerate(mors):
        rep.bound = mor.src.m.bound
        row = {}
        for kind in ("bijective", "surjective"):
            direct = is_fully_faithful(mor) if kind == "bijective" else is_local_fibration_setlevel(mor)
            reduced = finite_colour_reduction(mor, kind)
            rep.check(f"morphism {i}: {kind} agrees with its finite-colour test",
                      None if direct == reduced else {"direct": direct, "reduced": reduced})
            row[kind] = direct
        out.append(row)
    rep.data["morphisms"] = out
    _finish(rep, as_json)


if __name__ == "__main__":
    main()
