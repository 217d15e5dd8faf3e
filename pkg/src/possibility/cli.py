"""Command-line interface: document I/O, subcommands and DOT export.

Output is line-oriented ``key: value`` text ending in a ``verdict:`` line.
Exit codes: 0 verdict true, 1 verdict false, 2 input error, 3 budget exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Sequence

from . import bao as bao_mod
from . import correspondence as corr_mod
from . import enumeration, morphism, transform
from .formula import ParseError, parse, to_text
from .forcing import BudgetExceeded, Model, UnboundSymbol, forces, kripke_valid, valid_on_frame
from .frame import (CLASS_FLAGS, FULL, FinitePoset, FrameError, PossibilityFrame, PosetError,
                    classify, members, relation_from_pairs, relation_pairs, to_mask,
                    validate_frame)

EXIT_TRUE, EXIT_FALSE, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


class DocumentError(ValueError):
    """Malformed document; ``where`` is a path such as ``rels.i[2]``."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


# ----------------------------------------------------------- frame documents

def frame_to_document(frame: PossibilityFrame) -> dict:
    doc: dict[str, Any] = {
        "states": frame.n,
        "leq": [list(p) for p in frame.poset.pairs(strict=True)],
        "rels": {i: [list(p) for p in relation_pairs(s)] for i, s in frame.rels.items()},
        "props": FULL if frame.is_full_marker else [list(members(X)) for X in frame.props],
    }
    if frame.extended:
        doc["extended"] = True
    return doc


def _int(v, where):
    if isinstance(v, bool) or not isinstance(v, int):
        raise DocumentError(where, f"expected an integer, got {v!r}")
    return v


def _pairs(v, where, n):
    if not isinstance(v, list):
        raise DocumentError(where, "expected a list of [x, y] pairs")
    out = []
    for k, pr in enumerate(v):
        if not (isinstance(pr, list) and len(pr) == 2):
            raise DocumentError(f"{where}[{k}]", "expected a pair [x, y]")
        x, y = (_int(c, f"{where}[{k}]") for c in pr)
        if not (0 <= x < n and 0 <= y < n):
            raise DocumentError(f"{where}[{k}]", f"state out of range 0..{n - 1}")
        out.append((x, y))
    return out


def _state_list(v, where, n) -> int:
    if not isinstance(v, list):
        raise DocumentError(where, "expected a list of states")
    xs = [_int(c, f"{where}[{k}]") for k, c in enumerate(v)]
    for k, x in enumerate(xs):
        if not 0 <= x < n:
            raise DocumentError(f"{where}[{k}]", f"state out of range 0..{n - 1}")
    return to_mask(xs)


def document_to_frame(doc: Any, *, check: bool = True) -> PossibilityFrame:
    if not isinstance(doc, dict):
        raise DocumentError("$", "frame document must be an object")
    for key in ("states", "leq", "rels", "props"):
        if key not in doc:
            raise DocumentError("$", f"missing field {key!r}")
    extra = set(doc) - {"states", "leq", "rels", "props", "extended"}
    if extra:
        raise DocumentError("$", f"unknown fields {sorted(extra)}")
    n = _int(doc["states"], "states")
    if n < 1:
        raise DocumentError("states", "need at least one state")
    try:
        poset = FinitePoset(n, _pairs(doc["leq"], "leq", n))
    except PosetError as e:
        raise DocumentError("leq", str(e)) from None
    if not isinstance(doc["rels"], dict):
        raise DocumentError("rels", "expected a map from index to pairs")
    rels = {}
    for i, prs in doc["rels"].items():
        rels[i] = relation_from_pairs(n, _pairs(prs, f"rels.{i}", n))
    props = doc["props"]
    if props == FULL:
        fam = FULL
    elif isinstance(props, list):
        fam = [_state_list(X, f"props[{k}]", n) for k, X in enumerate(props)]
    else:
        raise DocumentError("props", 'expected a list of state lists or "full"')
    extended = doc.get("extended", False)
    if not isinstance(extended, bool):
        raise DocumentError("extended", "expected true or false")
    try:
        frame = PossibilityFrame(poset, rels, fam, extended=extended)
    except FrameError as e:
        raise DocumentError("$", str(e)) from None
    if check:
        rep = validate_frame(frame)
        if not rep.verdict:
            raise DocumentError("$", f"not a possibility frame: {rep.condition} "
                                     f"at {list(rep.witness or ())}")
    return frame


# ------------------------------------------------------------- BAO documents

def bao_to_document(b: bao_mod.FiniteBAO) -> dict:
    powerset = b.elements == tuple(range(b.top + 1))
    index = {x: k for k, x in enumerate(b.elements)}
    return {
        "atoms": b.atoms,
        "elements": "powerset" if powerset else [list(members(x)) for x in b.elements],
        "ops": {i: [index[b.box(i, x)] for x in b.elements] for i in b.indices},
    }


def document_to_bao(doc: Any) -> bao_mod.FiniteBAO:
    if not isinstance(doc, dict):
        raise DocumentError("$", "BAO document must be an object")
    for key in ("atoms", "elements", "ops"):
        if key not in doc:
            raise DocumentError("$", f"missing field {key!r}")
    m = _int(doc["atoms"], "atoms")
    if m < 0:
        raise DocumentError("atoms", "must be non-negative")
    if doc["elements"] == "powerset":
        elements = list(range(1 << m))
    elif isinstance(doc["elements"], list):
        elements = [_state_list(e, f"elements[{k}]", m) if m else 0
                    for k, e in enumerate(doc["elements"])]
        if len(set(elements)) != len(elements):
            raise DocumentError("elements", "elements listed twice")
    else:
        raise DocumentError("elements", 'expected atom lists or "powerset"')
    if not isinstance(doc["ops"], dict):
        raise DocumentError("ops", "expected a map from index to element tables")
    ops = {}
    for i, table in doc["ops"].items():
        if not isinstance(table, list) or len(table) != len(elements):
            raise DocumentError(f"ops.{i}", f"expected a table of {len(elements)} element indices")
        row = {}
        for k, v in enumerate(table):
            v = _int(v, f"ops.{i}[{k}]")
            if not 0 <= v < len(elements):
                raise DocumentError(f"ops.{i}[{k}]", "element index out of range")
            row[elements[k]] = elements[v]
        ops[i] = row
    b = bao_mod.FiniteBAO(m, elements, ops)
    rep = bao_mod.validate_bao(b)
    if not rep.verdict:
        raise DocumentError("$", f"not a BAO: {rep.condition} at {list(rep.witness or ())}")
    return b


def load_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as e:
        raise DocumentError(path, e.strerror or str(e)) from None
    except json.JSONDecodeError as e:
        raise DocumentError(f"{path}:{e.lineno}:{e.colno}", e.msg) from None


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


# -------------------------------------------------------------------- DOT

def export_dot(frame: PossibilityFrame, name: str = "frame") -> str:
    """Solid edge s -> t when t is covered by s (t ⊑ s); dashed edge s -> t when sRt."""
    lines = [f"digraph {name} {{", "  node [shape=circle];"]
    for x in range(frame.n):
        lines.append(f"  s{x} [label=\"{x}\"];")
    for x, y in sorted(frame.poset.covers()):
        lines.append(f"  s{y} -> s{x};")
    for i, succ in frame.rels.items():
        for x, y in relation_pairs(succ):
            lines.append(f"  s{x} -> s{y} [style=dashed, label=\"{i}\"];")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------------ output

class Out:
    def __init__(self, stream):
        self.stream = stream

    def kv(self, key: str, value) -> None:
        if isinstance(value, bool):
            value = "true" if value else "false"
        self.stream.write(f"{key}: {value}\n")

    def verdict(self, ok: bool) -> int:
        self.kv("verdict", ok)
        return EXIT_TRUE if ok else EXIT_FALSE


def _report(out: Out, rep) -> int:
    out.kv("condition", rep.condition)
    if rep.witness is not None:
        out.kv("witness", list(rep.witness))
    if rep.detail:
        out.kv("detail", rep.detail)
    for k, v in sorted(rep.data.items()):
        out.kv(k, json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else v)
    return out.verdict(rep.verdict)


def _map_text(mapping: Sequence[int]) -> str:
    return ",".join(str(v) for v in mapping)


def _parse_map(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip() != "")
    except ValueError:
        raise DocumentError("--map", "expected comma-separated state numbers") from None


# -------------------------------------------------------------- subcommands

def cmd_validate(a, out):
    frame = document_to_frame(load_json(a.frame), check=False)
    out.kv("states", frame.n)
    return _report(out, validate_frame(frame))


def cmd_classify(a, out):
    frame = document_to_frame(load_json(a.frame))
    flags = classify(frame)
    for k in CLASS_FLAGS:
        out.kv(k, flags[k])
    return out.verdict(True)


def cmd_force(a, out):
    frame = document_to_frame(load_json(a.frame))
    val = load_json(a.val)
    if not isinstance(val, dict):
        raise DocumentError(a.val, "valuation must map variable names to state lists")
    valuation = {k: _state_list(v, f"{a.val}.{k}", frame.n) for k, v in val.items()}
    if not 0 <= a.at < frame.n:
        raise DocumentError("--at", f"state out of range 0..{frame.n - 1}")
    try:
        model = Model(frame, valuation)
    except FrameError as e:
        raise DocumentError(a.val, str(e)) from None
    f = parse(a.formula)
    out.kv("formula", to_text(f))
    out.kv("state", a.at)
    return out.verdict(forces(model, a.at, f))


def cmd_valid(a, out):
    frame = document_to_frame(load_json(a.frame))
    f = parse(a.formula)
    out.kv("formula", to_text(f))
    rep = valid_on_frame(frame, f, budget=a.budget)
    return _report(out, rep)


TRANSFORMS = ("possibilize", "separative-quotient", "tighten", "box-tighten", "functionalize",
              "atom-structure", "extend-bot", "restrict-bot", "subframe")


def cmd_transform(a, out):
    frame = document_to_frame(load_json(a.frame))
    hmap = None
    name = a.name
    if name == "possibilize":
        result = transform.powerset_possibilization(frame)
    elif name == "separative-quotient":
        result, hmap = transform.separative_quotient(frame)
    elif name == "tighten":
        result, hmap = transform.tighten(frame)
    elif name == "box-tighten":
        result = transform.box_tighten(frame)
    elif name == "functionalize":
        result = transform.functionalize(frame)
    elif name == "atom-structure":
        result, atoms = transform.atom_structure(frame)
        out.kv("atoms", _map_text(atoms))
    elif name == "extend-bot":
        result = transform.extend_bot(frame)
    elif name == "restrict-bot":
        result = transform.restrict_bot(frame)
    else:
        if a.states is None:
            raise DocumentError("--states", "subframe needs --states")
        keep = _parse_map(a.states)
        if any(not 0 <= x < frame.n for x in keep):
            raise DocumentError("--states", "state out of range")
        result, kind, _ = transform.subframe(frame, keep)
        out.kv("kind", kind)
    if hmap is not None:
        out.kv("map", _map_text(hmap))
    _emit_frame(a, out, result)
    return out.verdict(True)


def _emit_frame(a, out, frame):
    doc = frame_to_document(frame)
    if getattr(a, "out", None):
        with open(a.out, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, sort_keys=True, indent=1)
            fh.write("\n")
        out.kv("written", a.out)
    out.kv("document", dumps(doc))


DUALS = ("under", "principal-frame", "full-frame", "filter-frame", "gff",
         "zeta-a", "zeta-f", "eta-a", "eta-f")


def cmd_dual(a, out):
    doc = load_json(a.input)
    name = a.name
    if name in ("under", "zeta-f", "eta-f"):
        frame = document_to_frame(doc)
        if name == "under":
            b = bao_mod.underlying_bao(frame)
            bdoc = bao_to_document(b)
            if a.out:
                with open(a.out, "w", encoding="utf-8") as fh:
                    json.dump(bdoc, fh, sort_keys=True, indent=1)
                    fh.write("\n")
            out.kv("document", dumps(bdoc))
            return out.verdict(True)
        spec = bao_mod.zeta_F(frame) if name == "zeta-f" else bao_mod.eta_F(frame)
        out.kv("map", _map_text(spec.mapping))
        iso = morphism.check_morphism(morphism.MorphismSpec(
            spec.source, spec.target, spec.mapping, "p", {"isomorphism"}))
        out.kv("target", dumps(frame_to_document(spec.target)))
        out.kv("isomorphism", iso.verdict)
        return out.verdict(iso.verdict)
    b = document_to_bao(doc)
    builders = {"principal-frame": bao_mod.principal_frame, "full-frame": bao_mod.full_frame,
                "filter-frame": bao_mod.filter_frame, "gff": bao_mod.general_filter_frame}
    if name in builders:
        try:
            frame = builders[name](b)
        except bao_mod.BAOError as e:
            raise DocumentError(a.input, str(e)) from None
        _emit_frame(a, out, frame)
        return out.verdict(True)
    h = bao_mod.zeta_A(b) if name == "zeta-a" else bao_mod.eta_A(b)
    index = {x: k for k, x in enumerate(h.target.elements)}
    out.kv("map", _map_text(index[h(x)] for x in b.elements))
    iso = bao_mod.is_bao_isomorphism(h)
    out.kv("isomorphism", iso)
    return out.verdict(iso)


def cmd_morphism(a, out):
    F = document_to_frame(load_json(a.source))
    G = document_to_frame(load_json(a.target))
    flags = [f for f in (a.flags or "").split(",") if f]
    bad = [f for f in flags if f not in morphism.FLAGS]
    if bad:
        raise DocumentError("--flags", f"unknown flags {bad}")
    if a.grade not in morphism.GRADES:
        raise DocumentError("--grade", f"unknown grade {a.grade!r}")
    if a.action == "check":
        if a.map is None:
            raise DocumentError("--map", "check needs --map")
        try:
            spec = morphism.MorphismSpec(F, G, _parse_map(a.map), a.grade, flags)
        except ValueError as e:
            raise DocumentError("--map", str(e)) from None
        return _report(out, morphism.check_morphism(spec))
    spec = morphism.find_morphism(F, G, a.grade, flags, node_limit=a.budget)
    if spec is None:
        out.kv("map", "none")
        return out.verdict(False)
    out.kv("map", _map_text(spec.mapping))
    return out.verdict(True)


def cmd_enumerate(a, out):
    idx = [i for i in a.indices.split(",") if i]
    if a.what == "posets":
        items = ({"states": p.n, "leq": [list(q) for q in p.pairs(strict=True)]}
                 for p in enumeration.enumerate_posets(a.size))
    elif a.what == "frames":
        items = (frame_to_document(f) for f in enumeration.enumerate_full_frames(a.size, idx))
    else:
        items = (bao_to_document(b) for b in enumeration.enumerate_baos(a.size, idx))
    count = 0
    for doc in items:
        count += 1
        if a.list:
            out.kv("item", dumps(doc))
    out.kv("count", count)
    return out.verdict(True)


def _schema(text: str):
    if text in corr_mod.FAMILIAR:
        return corr_mod.FAMILIAR[text]
    return corr_mod.Correspondent(text, corr_mod.parse_schema(text))


def cmd_correspond(a, out):
    corr = _schema(a.schema)
    frame = document_to_frame(load_json(a.frame))
    kind = "kripke" if a.kripke else "possibility"
    ax = corr.axiom()
    out.kv("axiom", to_text(ax))
    cond = corr.condition(frame, kind)
    out.kv("condition", cond.verdict)
    if cond.witness is not None:
        out.kv("condition_witness", list(cond.witness))
    if kind == "kripke":
        valid = kripke_valid(frame, ax, budget=a.budget).verdict
    else:
        valid = valid_on_frame(frame, ax, budget=a.budget).verdict
    out.kv("valid", valid)
    return out.verdict(cond.verdict == valid)


def standard_full_frames(max_size: int, indices=("i",)):
    from .frame import violation
    for n in range(1, max_size + 1):
        for f in enumeration.enumerate_full_frames(n, indices):
            if all(violation(f.poset, f.rels[i], "R-down") is None for i in f.indices):
                yield f


def cmd_sweep(a, out):
    corr = _schema(a.schema)
    idx = sorted(set(corr.schema.indices) | set(corr.under)) or ["i"]
    if a.kripke:
        frames = (f for n in range(1, a.max_size + 1)
                  for f in enumeration.enumerate_kripke_frames(n, idx))
        kind = "kripke"
    else:
        frames = standard_full_frames(a.max_size, idx)
        kind = "possibility"
    out.kv("axiom", to_text(corr.axiom()))
    rep = corr_mod.verify_correspondence(corr, frames, kind, budget=a.budget)
    out.kv("frames_checked", rep.checked)
    out.kv("divergences", len(rep.divergences))
    for d in rep.divergences:
        out.kv("divergent_frame", d["frame"])
    if rep.verdict:
        out.kv("result", f"no divergence, {rep.checked} frames checked")
    return out.verdict(rep.verdict)


def cmd_export_dot(a, out):
    frame = document_to_frame(load_json(a.frame))
    out.stream.write(export_dot(frame))
    return EXIT_TRUE


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="possibility",
                                 description="Finite possibility frames: checks and constructions.")
    ap.add_argument("--budget", type=int, default=10 ** 7,
                    help="work limit for validity sweeps and searches")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate")
    p.add_argument("frame")
    p.set_defaults(run=cmd_validate)
    p = sub.add_parser("classify")
    p.add_argument("frame")
    p.set_defaults(run=cmd_classify)
    p = sub.add_parser("force")
    p.add_argument("frame")
    p.add_argument("formula")
    p.add_argument("--val", required=True)
    p.add_argument("--at", type=int, required=True)
    p.set_defaults(run=cmd_force)
    p = sub.add_parser("valid")
    p.add_argument("frame")
    p.add_argument("formula")
    p.set_defaults(run=cmd_valid)
    p = sub.add_parser("transform")
    p.add_argument("name", choices=TRANSFORMS)
    p.add_argument("frame")
    p.add_argument("--states", help="comma-separated states for subframe")
    p.add_argument("--out")
    p.set_defaults(run=cmd_transform)
    p = sub.add_parser("dual")
    p.add_argument("name", choices=DUALS)
    p.add_argument("input")
    p.add_argument("--out")
    p.set_defaults(run=cmd_dual)
    p = sub.add_parser("morphism")
    p.add_argument("action", choices=("check", "find"))
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--map")
    p.add_argument("--grade", default="possibility")
    p.add_argument("--flags", default="")
    p.set_defaults(run=cmd_morphism)
    p = sub.add_parser("enumerate")
    p.add_argument("what", choices=("posets", "frames", "baos"))
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--indices", default="i")
    p.add_argument("--list", action="store_true", help="print every item")
    p.set_defaults(run=cmd_enumerate)
    p = sub.add_parser("correspond")
    p.add_argument("schema")
    p.add_argument("frame")
    p.add_argument("--kripke", action="store_true")
    p.set_defaults(run=cmd_correspond)
    p = sub.add_parser("sweep")
    p.add_argument("schema")
    p.add_argument("--max-size", type=int, required=True)
    p.add_argument("--kripke", action="store_true")
    p.set_defaults(run=cmd_sweep)
    p = sub.add_parser("export-dot")
    p.add_argument("frame")
    p.set_defaults(run=cmd_export_dot)
    return ap


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    ap = build_parser()
    try:
        a = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_TRUE
    out = Out(stdout)
    try:
        return a.run(a, out)
    except DocumentError as e:
        stderr.write(f"error: {e}\n")
    except ParseError as e:
        stderr.write(f"error: formula: {e}\n")
    except corr_mod.SchemaError as e:
        stderr.write(f"error: schema: {e}\n")
    except (FrameError, bao_mod.BAOError, UnboundSymbol, morphism.FrameMismatch) as e:
        stderr.write(f"error: {e}\n")
    except enumeration.CapExceeded as e:
        stderr.write(f"error: {e}\n")
    except (BudgetExceeded, morphism.SearchBudgetExceeded) as e:
        stderr.write(f"budget: {e}\n")
        return EXIT_BUDGET
    return EXIT_INPUT


def main() -> None:
    sys.exit(run())
