"""JSON form of generated instances (schema ``vcdlab-instance/1``).

Rationals are written as "p/q" strings (integers as plain digit strings),
vertex labels as nested lists, subcomplexes as 0/1 mask strings over the
parent's sorted simplex lists.
"""

from __future__ import annotations

import json
from typing import Any

from .applications import Triple
from .arrangements import GridInstance, HyperplaneFamily, PencilInstance
from .cohomology import Complex, Subcomplex
from .exactq import q, qstr

SCHEMA = "vcdlab-instance/1"


def _label_out(v):
    if isinstance(v, tuple):
        return [_label_out(x) for x in v]
    return v


def _label_in(v):
    if isinstance(v, list):
        return tuple(_label_in(x) for x in v)
    return v


def complex_to_json(k: Complex) -> dict:
    return {
        "vertices": [_label_out(v) for v in k.vertices],
        "edges": [[a, b] for a, b in k.edges],
        "triangles": [list(t) for t in k.triangles],
    }


def complex_from_json(d: dict) -> Complex:
    verts = [_label_in(v) for v in d["vertices"]]
    return Complex(
        verts,
        [(verts[a], verts[b]) for a, b in d["edges"]],
        [tuple(verts[i] for i in t) for t in d["triangles"]],
    )


def _mask(bits) -> str:
    return "".join("1" if b else "0" for b in bits)


def subcomplex_to_json(s: Subcomplex) -> dict:
    return {"vertices": _mask(s.vertex_mask), "edges": _mask(s.edge_mask), "triangles": _mask(s.triangle_mask)}


def subcomplex_from_json(k: Complex, d: dict) -> Subcomplex:
    def bits(s, n):
        if len(s) != n:
            raise ValueError("mask length does not match the parent complex")
        return tuple(c == "1" for c in s)

    return Subcomplex(k, bits(d["vertices"], k.count(0)), bits(d["edges"], k.count(1)), bits(d["triangles"], k.count(2)))


def _vec(v):
    return [qstr(x) for x in v]


def instance_to_json(inst) -> dict:
    if isinstance(inst, GridInstance):
        from .arrangements import grid_sweep_tests

        subs = {lab: subcomplex_to_json(sub) for lab, sub in grid_sweep_tests(inst)}
        return {
            "schema": SCHEMA,
            "kind": "grid",
            "params": {"n": inst.n},
            "sweep_normal": _vec(inst.sweep_normal),
            "critical_values": _vec(inst.critical_values),
            "complex": complex_to_json(inst.complex),
            "subcomplexes": subs,
        }
    if isinstance(inst, PencilInstance):
        return {
            "schema": SCHEMA,
            "kind": "pencil",
            "params": {"n": inst.n},
            "l_lines": [_vec(v) for v in inst.l_lines],
            "m_lines": [_vec(v) for v in inst.m_lines],
            "pair_parameters": {k: _vec(v) for k, v in inst.pair_points.items()},
            "test_points": list(inst.test_points),
            "complex": complex_to_json(inst.incidence_graph),
            "subcomplexes": {t: subcomplex_to_json(inst.sub_sellocal[t]) for t in inst.test_points},
        }
    if isinstance(inst, HyperplaneFamily):
        return {
            "schema": SCHEMA,
            "kind": "hyperplanes",
            "params": {"m": inst.m, "count": len(inst)},
            "hyperplanes": [_vec(v) for v in inst.hyperplanes],
        }
    if isinstance(inst, Triple):
        return {
            "schema": SCHEMA,
            "kind": "triple",
            "params": dict(inst.meta),
            "complex": complex_to_json(inst.ambient),
            "z_family": [subcomplex_to_json(z) for z in inst.z_family],
            "x_family": [
                {"label": lab, "intersections": [subcomplex_to_json(s) for s in row]}
                for lab, row in zip(inst.x_labels, inst.x_family)
            ],
        }
    raise TypeError(f"cannot serialize {type(inst).__name__}")


def load_instance(d: dict) -> Any:
    if d.get("schema") != SCHEMA:
        raise ValueError(f"unsupported schema {d.get('schema')!r}")
    kind = d["kind"]
    if kind == "hyperplanes":
        return HyperplaneFamily(d["params"]["m"], tuple(tuple(q(x) for x in v) for v in d["hyperplanes"]))
    k = complex_from_json(d["complex"])
    if kind == "grid":
        from .arrangements import gen_grid

        g = gen_grid(d["params"]["n"])
        if g.complex != k:
            raise ValueError("grid complex does not match its parameters")
        return g
    if kind == "pencil":
        subs = {t: subcomplex_from_json(k, s) for t, s in d["subcomplexes"].items()}
        return PencilInstance(
            d["params"]["n"],
            tuple(tuple(q(x) for x in v) for v in d["l_lines"]),
            tuple(tuple(q(x) for x in v) for v in d["m_lines"]),
            k,
            list(d["test_points"]),
            subs,
            {t: tuple(q(x) for x in v) for t, v in d["pair_parameters"].items()},
        )
    if kind == "triple":
        return Triple(
            k,
            [subcomplex_from_json(k, z) for z in d["z_family"]],
            [[subcomplex_from_json(k, s) for s in x["intersections"]] for x in d["x_family"]],
            [x["label"] for x in d["x_family"]],
            dict(d.get("params", {})),
        )
    raise ValueError(f"unknown instance kind {kind!r}")


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
