"""Bundled and generated models, manifests, and model JSON persistence."""
from __future__ import annotations

import json
from fractions import Fraction
from functools import cached_property
from importlib import resources

from .bsub import BSubPoset, enumerate_bsub_star
from .oml import Block, FiniteOML, OmlError, ProjOp, build_oml_from_greechie, \
    build_oml_from_rays, validate_oml
from .posets import FinitePoset
from .rays import parse_ray_file
from .scalars import QuadScalar

BUILTIN_GREECHIE = {
    "cube8": [["a", "b", "c"]],
    "dim2": [["a", "b"]],
    "twoblock": [["a", "b", "c"], ["c", "d", "e"]],
    "block4": [["a", "b", "c", "d"]],
}

BUILTIN_RAYS = {
    "basis3": (3, 0, [(1, 0, 0), (0, 1, 0), (0, 0, 1)], "error"),
}

DATA_MODELS = {
    "cab18": ("cab18.rays", "skip"),
    "peres33": ("peres33.rays", "complete"),
}

MODEL_NAMES = sorted(set(BUILTIN_GREECHIE) | set(BUILTIN_RAYS) | set(DATA_MODELS))


class ModelBundle:
    def __init__(self, name: str, oml: FiniteOML, manifest: dict):
        self.name = name
        self.oml = oml
        self.manifest = manifest

    @cached_property
    def star(self) -> BSubPoset:
        return enumerate_bsub_star(self.oml)


def manifest_of(oml: FiniteOML, name: str = "", on_incomplete: str | None = None) -> dict:
    star = enumerate_bsub_star(oml)
    heights = [n.height for n in star.nodes]
    man = {
        "name": name,
        "mode": oml.mode,
        "elements": oml.n,
        "atoms": len(oml.atoms()),
        "blocks": len(oml.blocks),
        "star-nodes": {
            "height-0": heights.count(0),
            "height-1": heights.count(1),
            "height-2": heights.count(2),
        },
    }
    if oml.mode == "matrix":
        man["dim"] = oml.dim
        man["ring"] = oml.ring
        man["rays"] = len(oml.rays)
        if on_incomplete:
            man["on-incomplete"] = on_incomplete
    return man


def _data_text(fname: str) -> str:
    return resources.files("omspect.data").joinpath(fname).read_text()


def load_model(name: str, on_incomplete: str | None = None) -> ModelBundle:
    if name in BUILTIN_GREECHIE:
        oml = build_oml_from_greechie(BUILTIN_GREECHIE[name])
        return ModelBundle(name, oml, manifest_of(oml, name))
    if name in BUILTIN_RAYS:
        d, m, vecs, mode = BUILTIN_RAYS[name]
        oml = build_oml_from_rays(vecs, d, m, on_incomplete=mode)
        return ModelBundle(name, oml, manifest_of(oml, name, mode))
    if name in DATA_MODELS:
        fname, mode = DATA_MODELS[name]
        mode = on_incomplete or mode
        d, m, rays = parse_ray_file(_data_text(fname))
        oml = build_oml_from_rays(rays, d, m, on_incomplete=mode)
        man = manifest_of(oml, name, mode)
        frozen = json.loads(_data_text(f"{name}.manifest.json"))
        if frozen != man:
            raise OmlError(f"manifest mismatch for {name}: expected {frozen}, got {man}")
        return ModelBundle(name, oml, man)
    raise KeyError(f"unknown model {name!r}; known: {', '.join(MODEL_NAMES)}")


def load_model_from_path(path: str, on_incomplete: str = "error") -> ModelBundle:
    text = open(path, "r", encoding="utf-8").read()
    name = path.rsplit("/", 1)[-1]
    stripped = text.lstrip()
    if stripped.startswith("{"):
        payload = json.loads(text)
        if "blocks" in payload and "elements" not in payload:
            oml = build_oml_from_greechie(payload["blocks"])
        else:
            oml = model_from_json(payload)
        return ModelBundle(name, oml, manifest_of(oml, name))
    d, m, rays = parse_ray_file(text)
    oml = build_oml_from_rays(rays, d, m, on_incomplete=on_incomplete)
    return ModelBundle(name, oml, manifest_of(oml, name, on_incomplete))


def resolve_model(spec: str, on_incomplete: str | None = None) -> ModelBundle:
    if spec in MODEL_NAMES:
        return load_model(spec, on_incomplete)
    return load_model_from_path(spec, on_incomplete or "error")


# ---------------------------------------------------------------------------
# model JSON persistence
# ---------------------------------------------------------------------------

def _entry_str(x: QuadScalar) -> str:
    if x.b == 0:
        return str(x.a)
    return f"{x.a}+{x.b}*r"


def _entry_parse(s: str, m: int) -> QuadScalar:
    if "*r" in s:
        a, rest = s.split("+", 1)
        b = rest[:-2]
        return QuadScalar(Fraction(a), Fraction(b), m)
    return QuadScalar(Fraction(s))


def model_to_json(oml: FiniteOML) -> dict:
    out = {
        "mode": oml.mode,
        "labels": oml.labels,
        "order": [format(mask, "x") for mask in oml.poset.down],
        "ortho": list(oml.ortho),
        "zero": oml.zero,
        "one": oml.one,
        "blocks": [list(b.atoms) for b in oml.blocks],
        "elements": oml.n,
    }
    if oml.mode == "matrix":
        out["dim"] = oml.dim
        out["ring"] = oml.ring
        out["matrices"] = [
            [[_entry_str(x) for x in row] for row in p.matrix] for p in oml.proj]
    else:
        out["atoms-below"] = [sorted(s) for s in oml.atoms_below]
    return out


def model_from_json(payload: dict) -> FiniteOML:
    n = payload["elements"]
    poset = FinitePoset(n, [int(h, 16) for h in payload["order"]])
    blocks = [Block(tuple(b)) for b in payload["blocks"]]
    if payload["mode"] == "matrix":
        m = payload["ring"]
        from .linalg import trace
        proj = [tuple(tuple(_entry_parse(x, m) for x in row) for row in rows)
                for rows in payload["matrices"]]
        projops = [ProjOp(mat, trace(mat).as_int()) for mat in proj]
        oml = FiniteOML("matrix", poset, payload["ortho"], payload["zero"],
                        payload["one"], blocks, payload["labels"], proj=projops,
                        dim=payload["dim"], ring=m, rays=[])
    else:
        oml = FiniteOML("greechie", poset, payload["ortho"], payload["zero"],
                        payload["one"], blocks, payload["labels"],
                        atoms_below=[frozenset(s) for s in payload["atoms-below"]])
    report = validate_oml(oml)
    if not report.ok:
        raise OmlError("loaded model fails validation: " + "; ".join(report.violations))
    return oml
