"""Command-line interface: build models, hunt global sections, daseinise,
evaluate measures, enumerate automorphism groups, and report on the logic.

Every command prints a deterministic JSON report (sorted keys, exact
fractions, no timestamps) so outputs are byte-for-byte reproducible.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .autos import (check_restriction_isomorphism, poset_automorphisms,
                    spectral_automorphisms_over, PosetAutomorphism)
from .bsub import enumerate_bsub, enumerate_bsub_star, _make_node
from .dasein import (SelfAdjointOp, daseinise_projection,
                     inner_daseinise_operator, outer_daseinise_operator,
                     outer_global_section, separating_context)
from .logic import downset_algebra, poset_height, satisfies_phi
from .measures import (State, measure_from_state,
                       projection_measure_from_presheaf_measure,
                       section_to_measure, measure_to_section, z2_states)
from .models import (MODEL_NAMES, model_to_json, resolve_model)
from .posets import BudgetExceededError
from .presheaves import global_sections, spectral_presheaf
from .oml import OmlError


def emit(payload: dict) -> None:
    sys.stdout.write(json.dumps(payload, sort_keys=True, indent=1) + "\n")


def _parse_element_ref(oml, ref: str) -> int:
    """Element references: 'b<i>:<k,l,...>' is the sub-join of atoms k,l,...
    of block i; a bare integer is an element index."""
    if ref.startswith("b"):
        head, _, tail = ref.partition(":")
        block = int(head[1:])
        subset = [int(x) for x in tail.split(",") if x != ""]
        return oml.block_element(block, subset)
    return int(ref)


def _parse_context(oml, spec: str):
    atoms = [_parse_element_ref(oml, part) for part in spec.split(";")]
    if len(atoms) == 1:
        p = atoms[0]
        atoms = sorted({p, oml.ortho[p]})
    else:
        for i, x in enumerate(atoms):
            for y in atoms[i + 1:]:
                if not oml.orthogonal(x, y):
                    raise OmlError(f"context parts {oml.label(x)}, {oml.label(y)} "
                                   "are not orthogonal")
        join = atoms[0]
        for x in atoms[1:]:
            join = oml.poset.lub(join, x)
            if join is None:
                raise OmlError("context parts have no join")
        if join != oml.one:
            raise OmlError("context parts do not resolve the identity")
    return _make_node(oml, tuple(sorted(atoms)))


def _load_operator(oml, path: str) -> SelfAdjointOp:
    payload = json.loads(open(path, "r", encoding="utf-8").read())
    terms = []
    for t in payload["terms"]:
        proj = t["projection"]
        if isinstance(proj, dict):
            e = oml.block_element(proj["block"], proj["atoms"])
        else:
            e = _parse_element_ref(oml, str(proj))
        terms.append((Fraction(t["coeff"]), e))
    return SelfAdjointOp(oml, terms)


def _load_state(oml, path: str) -> State:
    payload = json.loads(open(path, "r", encoding="utf-8").read())
    weights = []
    for w in payload["weights"]:
        ray = [tuple(x) if isinstance(x, list) else x for x in w["ray"]]
        weights.append((Fraction(w["w"]), ray))
    return State(oml, weights)


def _operator_json(op: SelfAdjointOp) -> list[dict]:
    return [{"coeff": str(c), "projection": op.oml.label(p)} for c, p in op.terms]


def _section_json(S, sec) -> dict:
    return {S.node_label(i): S.oml.label(sec[i]) for i in range(len(S.nodes))}


def cmd_build(args) -> int:
    bundle = resolve_model(args.model, args.on_incomplete)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            json.dump(model_to_json(bundle.oml), fh, sort_keys=True, indent=1)
            fh.write("\n")
    emit({"manifest": bundle.manifest,
          "written": args.output or None})
    return 0


def cmd_sections(args) -> int:
    bundle = resolve_model(args.model, args.on_incomplete)
    sigma = spectral_presheaf(bundle.star)
    mode = "count" if args.count else "exists"
    res = global_sections(sigma, mode=mode, max_height=args.max_height)
    payload = {"model": bundle.name, "verdict": res.verdict}
    if args.max_height is not None:
        payload["max-height"] = args.max_height
    if args.count:
        payload["count"] = res.count
    if res.section is not None and args.max_height is None:
        payload["section"] = _section_json(bundle.star, res.section)
    emit(payload)
    return 0 if res.verdict == "sections-exist" else 2


def cmd_ks_check(args) -> int:
    bundle = resolve_model(args.model, args.on_incomplete)
    sigma = spectral_presheaf(bundle.star)
    res = global_sections(sigma, mode="exists")
    payload = {"model": bundle.name, "verdict": res.verdict,
               "blocks": len(bundle.oml.blocks),
               "atoms": len(bundle.oml.atoms())}
    if res.verdict == "no-global-section":
        payload["certificate"] = {"type": "refutation-trace",
                                  "failed-branches": len(res.trace),
                                  "trace": res.trace[:50]}
    else:
        payload["section"] = _section_json(bundle.star, res.section)
    emit(payload)
    return 0


def cmd_daseinise(args) -> int:
    bundle = resolve_model(args.model, args.on_incomplete)
    oml = bundle.oml
    p = _parse_element_ref(oml, args.element)
    node = _parse_context(oml, args.context)
    result = daseinise_projection(oml, p, node, args.direction)
    emit({"model": bundle.name,
          "element": oml.label(p),
          "context": [oml.label(a) for a in node.atoms],
          "direction": args.direction,
          "result": oml.label(result)})
    return 0


def cmd_op_dasein(args) -> int:
    bundle = resolve_model(args.model, args.on_incomplete)
    op = _load_operator(bundle.oml, args.operator)
    payload = {"model": bundle.name, "operator": _operator_json(op)}
    if args.section:
        sec = outer_global_section(op, bundle.star)
        payload["outer-section"] = {
            bundle.star.node_label(i): _operator_json(sec[i])
            for i in range(len(bundle.star.nodes))}
    else:
        if args.context is None:
            raise OmlError("op-dasein needs --context or --section")
        node = _parse_context(bundle.oml, args.context)
        fn = outer_daseinise_operator if args.direction == "outer" \
            else inner_daseinise_operator
        payload["context"] = [bundle.oml.label(a) for a in node.atoms]
        payload["direction"] = args.direction
        payload["result"] = _operator_json(fn(op, node))
    emit(payload)
    return 0


def cmd_separate(args) -> int:
    bundle = resolve_model(args.model, args.on_incomplete)
    a = _load_operator(bundle.oml, args.op1)
    b = _load_operator(bundle.oml, args.op2)
    node = separating_context(a, b)
    emit({"model": bundle.name,
          "context": [bundle.oml.label(x) for x in node.atoms],
          "outer-1": _operator_json(outer_daseinise_operator(a, node)),
          "outer-2": _operator_json(outer_daseinise_operator(b, node)),
          "differ": True})
    return 0


def cmd_measure(args) -> int:
    bundle = resolve_model(args.model, args.on_incomplete)
    state = _load_state(bundle.oml, args.state)
    mu = measure_from_state(state, bundle.star)
    pm = projection_measure_from_presheaf_measure(mu)
    emit({"model": bundle.name,
          "normalized": True,
          "values": {bundle.oml.label(i): str(v)
                     for i, v in enumerate(pm.values)}})
    return 0


def cmd_roundtrip(args) -> int:
    bundle = resolve_model(args.model, args.on_incomplete)
    S = bundle.star
    sigma = spectral_presheaf(S)
    res = global_sections(sigma, mode="enumerate")
    ok = True
    measures = []
    for sec in res.sections:
        m = section_to_measure(sec, S)
        measures.append(m)
        if measure_to_section(m, S).choice != sec.choice:
            ok = False
    if len(set(measures)) != len(measures):
        ok = False
    emit({"model": bundle.name,
          "sections": len(res.sections),
          "section-measure-section-identity": ok})
    return 0


def cmd_z2_state(args) -> int:
    bundle = resolve_model(args.model, args.on_incomplete)
    states = z2_states(bundle.oml)
    atoms = states[0].atoms if states else ()
    payload = {"model": bundle.name,
               "count": len(states),
               "nonconstant": sum(1 for s in states if s.nonconstant)}
    limit = args.limit if args.limit is not None else 16
    payload["states"] = [
        {bundle.oml.label(a): v for a, v in zip(s.atoms, s.assignment)}
        for s in states[:limit]]
    emit(payload)
    return 0


def cmd_aut(args) -> int:
    bundle = resolve_model(args.model, args.on_incomplete)
    payload = {"model": bundle.name}
    if args.check_restriction:
        payload["restriction"] = check_restriction_isomorphism(bundle.oml)
    elif args.star:
        g = poset_automorphisms(bundle.star.poset)
        payload["star-order"] = len(g)
        payload["generators"] = [list(a.perm) for a in g[:8]]
    else:
        full = enumerate_bsub(bundle.oml)
        g = poset_automorphisms(full.poset)
        payload["full-order"] = len(g)
        payload["generators"] = [list(a.perm) for a in g[:8]]
    if args.spectral:
        sigma = spectral_presheaf(bundle.star)
        ident = PosetAutomorphism(tuple(range(len(bundle.star.nodes))))
        payload["spectral-over-identity"] = len(
            spectral_automorphisms_over(ident, sigma))
    emit(payload)
    return 0


def cmd_logic(args) -> int:
    bundle = resolve_model(args.model, args.on_incomplete)
    S = bundle.star
    payload = {"model": bundle.name, "height": poset_height(S.poset)}
    try:
        H = downset_algebra(S.poset)
        payload["downsets"] = len(H)
        for k in (0, 1, 2):
            payload[f"phi{k}"] = satisfies_phi(H, k)
    except BudgetExceededError as e:
        payload["downsets"] = f"budget exceeded ({e.count})"
    emit(payload)
    return 0


def cmd_hasse(args) -> int:
    bundle = resolve_model(args.model, args.on_incomplete)
    S = enumerate_bsub(bundle.oml) if args.full else bundle.star
    with open(args.dot, "w", encoding="utf-8") as fh:
        fh.write(S.to_dot())
    emit({"model": bundle.name, "nodes": len(S.nodes), "written": args.dot})
    return 0


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="omspect",
        description=__doc__.splitlines()[0],
        epilog="models: " + ", ".join(MODEL_NAMES) + ", or a ray/Greechie/model file")
    ap.add_argument("--seed", type=int, default=None,
                    help="accepted for scripting stability; all algorithms are deterministic")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, **kw):
        p = sub.add_parser(name, **kw)
        p.add_argument("model", help="model name or file path")
        p.add_argument("--on-incomplete", choices=["error", "complete", "skip"],
                       default=None, help="how to treat short maximal contexts")
        p.set_defaults(fn=fn)
        return p

    p = add("build", cmd_build, help="build a model and report its manifest")
    p.add_argument("-o", "--output", default=None, help="write model JSON here")

    p = add("sections", cmd_sections, help="search for global sections")
    p.add_argument("--max-height", type=int, default=None)
    p.add_argument("--count", action="store_true")

    add("ks-check", cmd_ks_check, help="report whether the spectral presheaf has a section")

    p = add("daseinise", cmd_daseinise, help="approximate a projection in a context")
    p.add_argument("--element", required=True)
    p.add_argument("--context", required=True,
                   help="generating elements, ';'-separated (one element means {0,p,p',1})")
    p.add_argument("--direction", choices=["outer", "inner"], default="outer")

    p = add("op-dasein", cmd_op_dasein, help="daseinise a pre-diagonalized operator")
    p.add_argument("--operator", required=True, help="operator JSON file")
    p.add_argument("--context", default=None)
    p.add_argument("--direction", choices=["outer", "inner"], default="outer")
    p.add_argument("--section", action="store_true",
                   help="emit the whole outer section over the star poset")

    p = add("separate", cmd_separate, help="find a context separating two operators")
    p.add_argument("--op1", required=True)
    p.add_argument("--op2", required=True)

    p = add("measure", cmd_measure, help="evaluate the measure induced by a state")
    p.add_argument("--state", required=True, help="state JSON file")

    add("roundtrip", cmd_roundtrip, help="verify the section/measure round trip")

    p = add("z2-state", cmd_z2_state, help="enumerate Z2-valued states")
    p.add_argument("--limit", type=int, default=None)

    p = add("aut", cmd_aut, help="automorphism groups")
    p.add_argument("--star", action="store_true")
    p.add_argument("--check-restriction", action="store_true")
    p.add_argument("--spectral", action="store_true")

    add("logic", cmd_logic, help="height and height-formula table")

    p = add("hasse", cmd_hasse, help="emit a DOT Hasse diagram")
    p.add_argument("--dot", required=True)
    p.add_argument("--full", action="store_true")
    return ap


def main(argv=None) -> int:
    ap = make_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except (OmlError, BudgetExceededError, ValueError, KeyError, OSError) as e:
        emit({"error": str(e)})
        return 1


if __name__ == "__main__":
    sys.exit(main())
