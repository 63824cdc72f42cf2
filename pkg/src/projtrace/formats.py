"""Loading and saving rings, ideals, matrices, telescopes and chain specs.

Telescopes are written with an optional ``builder`` record naming the
construction that produced them.  Loading a telescope with a builder reruns
the construction, checks it reproduces the stored prefix, and so recovers
the tail rule needed to extend past that prefix.
"""

from __future__ import annotations

import json
import os

from .config import DEFAULT
from .errors import InputError
from .ideals import SIDES, IdealHandle, close
from .monoid import INF, format_vector
from .ring import RingMatrix, RingTable, make_ring_from_tables, parse_preset, preset_ring
from .telescope import ChainData, Telescope, TailRule, cyclic_rule, lift_build, whitehead_build
from .tree import ChainSpec, build_basic_tree, build_sequence_tree, chain_spec, find_strict_chain


# ------------------------------------------------------------------ rings

def ring_from_json(obj, limits=DEFAULT) -> RingTable:
    kind = obj.get("kind", "tables")
    if kind == "tables":
        try:
            return make_ring_from_tables(obj["add"], obj["mul"], obj.get("zero", 0), obj.get("one", 1),
                                         obj.get("name", "ring"))
        except KeyError as exc:
            raise InputError(f"ring spec is missing {exc}") from exc
    if kind == "preset":
        if "preset" not in obj:
            raise InputError("preset ring spec needs a 'preset' field")
        args = [obj[k] for k in ("n", "q") if k in obj]
        if obj["preset"] == "modular" and "n" in obj:
            args = [obj["n"]]
        return preset_ring(obj["preset"], *args, limits=limits)
    raise InputError(f"unknown ring spec kind {kind!r}")


def load_ring(ref: str, limits=DEFAULT) -> RingTable:
    """A preset name, a JSON literal or a path to a ring spec file."""
    ref = ref.strip()
    if ref.startswith("{"):
        return ring_from_json(_loads(ref), limits)
    if os.path.exists(ref):
        with open(ref, encoding="utf-8") as fh:
            return ring_from_json(_loads(fh.read()), limits)
    return parse_preset(ref, limits)


def ring_reference(ring: RingTable):
    """Name when it resolves back to the same ring, else the full tables."""
    try:
        if parse_preset(ring.name) == ring:
            return ring.name
    except Exception:
        pass
    return ring.to_json()


def resolve_ring(ref, limits=DEFAULT) -> RingTable:
    if isinstance(ref, dict):
        return ring_from_json(ref, limits)
    return load_ring(str(ref), limits)


def _loads(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc.msg} at line {exc.lineno}") from exc


def load_json(ref: str):
    """JSON literal, file path, or ``-`` for stdin."""
    import sys
    if ref == "-":
        return _loads(sys.stdin.read())
    if ref.strip().startswith(("{", "[")):
        return _loads(ref)
    if not os.path.exists(ref):
        raise InputError(f"no such file {ref!r}")
    with open(ref, encoding="utf-8") as fh:
        return _loads(fh.read())


# ----------------------------------------------------------------- ideals

def parse_int_list(text) -> list:
    if isinstance(text, (list, tuple)):
        return [int(x) for x in text]
    text = str(text).strip()
    if not text:
        return []
    try:
        return [int(x) for x in text.replace(" ", "").strip("[]").split(",") if x]
    except ValueError as exc:
        raise InputError(f"expected comma-separated integers, got {text!r}") from exc


def ideal_from_json(ring, obj, default_side="two_sided") -> IdealHandle:
    if isinstance(obj, (list, tuple)):
        obj = {"gens": list(obj)}
    if not isinstance(obj, dict) or "gens" not in obj:
        raise InputError("an ideal literal looks like {\"side\": \"left\", \"gens\": [1, 2]}")
    side = obj.get("side", default_side)
    if side not in SIDES:
        raise InputError(f"unknown side {side!r}")
    return close(ring, parse_int_list(obj["gens"]), side)


def parse_ideal(ring, text, default_side="two_sided") -> IdealHandle:
    """``{"side": ..., "gens": [...]}`` or a bare ``1,2`` generator list."""
    text = str(text).strip()
    if text.startswith(("{", "[")):
        return ideal_from_json(ring, _loads(text), default_side)
    return close(ring, parse_int_list(text), default_side)


def ideal_literal(I: IdealHandle):
    return {"side": I.side, "gens": list(I.generators)}


# --------------------------------------------------------------- matrices

def matrix_from_rows(ring, rows) -> RingMatrix:
    rows = [list(r) for r in rows]
    if not rows:
        raise InputError("empty matrix")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise InputError("ragged matrix")
    for r in rows:
        for x in r:
            if not (isinstance(x, int) and 0 <= x < ring.size):
                raise InputError(f"{x!r} is not an element of {ring.name}")
    return RingMatrix(ring, len(rows), width, tuple(x for r in rows for x in r))


# ------------------------------------------------------------- telescopes

def telescope_to_json(T: Telescope, builder=None):
    out = T.to_json()
    out["ring"] = ring_reference(T.ring)
    if T.m1 and not T.X:
        out["m1"] = T.m1
    if builder is not None:
        out["builder"] = builder
    return out


def _rebuild(ring, builder, depth, limits):
    kind = builder.get("kind")
    if kind == "whitehead":
        gens = parse_int_list(builder["gens"])
        I = close(ring, gens, "two_sided") if "ideal" not in builder else ideal_from_json(ring, builder["ideal"])
        return whitehead_build(ring, I, gens, depth)
    if kind == "lift":
        I = ideal_from_json(ring, builder["ideal"])
        chain = chain_data_from_json(ring, builder["chain"])
        Xbar = [matrix_from_rows(ring, m) for m in builder["X"]]
        Ybar = [matrix_from_rows(ring, m) for m in builder["Y"]]
        return lift_build(ring, I, chain, Xbar, Ybar, depth)
    if kind == "tree":
        cs = chain_spec_from_json(builder["chain"], limits, ring=ring)
        seq = builder.get("sequence")
        if seq:
            return build_sequence_tree(cs, seq, depth)[1]
        return build_basic_tree(cs, depth)[1]
    raise InputError(f"unknown telescope builder {kind!r}")


def telescope_from_json(obj, limits=DEFAULT) -> Telescope:
    if "result" in obj and isinstance(obj["result"], dict) and "telescope" in obj["result"]:
        obj = obj["result"]["telescope"]          # a piped report
    if "ring" not in obj:
        raise InputError("telescope file needs a ring")
    ring = resolve_ring(obj["ring"], limits)
    Xs = [matrix_from_rows(ring, m) for m in obj.get("X", [])]
    Ys = [None if m is None else matrix_from_rows(ring, m) for m in obj.get("Y", [])]
    builder = obj.get("builder")
    if builder:
        T = _rebuild(ring, builder, len(Xs), limits)
        if T.X != tuple(Xs) or any(a is not None and a != b for a, b in zip(Ys, T.Y)):
            raise InputError("stored matrices do not match the recorded builder")
        return T
    rule = None
    rj = obj.get("rule") or {}
    period = (obj.get("sizes") or {}).get("period", rj.get("period"))
    if rj.get("kind") == "cyclic" or (period and not rj):
        rule = cyclic_rule(int(period), int(rj.get("tail_start", 1)))
    elif rj:
        rule = TailRule(rj.get("kind", "unknown"), int(rj.get("period", 1)), int(rj.get("tail_start", 1)),
                        bool(rj.get("periodic", False)), {}, None)
    return Telescope(ring, tuple(Xs), tuple(Ys), rule, obj.get("name", "telescope"), int(obj.get("m1", 0)))


# ------------------------------------------------------------ chain data

def chain_data_from_json(ring, obj) -> ChainData:
    ideals = tuple(ideal_from_json(ring, lit, "left") for lit in obj["ideals"])
    gens = tuple(tuple(parse_int_list(g)) for g in obj["gens"])
    if len(ideals) != len(gens):
        raise InputError("chain data needs one generator list per ideal")
    return ChainData(ideals, gens)


def chain_spec_to_json(cs: ChainSpec):
    out = cs.to_json()
    out["ring"] = ring_reference(cs.ring)
    return out


def chain_spec_from_json(obj, limits=DEFAULT, ring=None) -> ChainSpec:
    ring = ring or resolve_ring(obj["ring"], limits)
    if obj.get("auto"):
        return find_strict_chain(ring, int(obj.get("length", 3)), limits)
    ideals = [ideal_from_json(ring, lit) for lit in obj["ideals"]]
    lifts = {}
    for key, e in (obj.get("lifts") or {}).items():
        try:
            i, j = (int(p) for p in key.split(","))
        except ValueError as exc:
            raise InputError(f"lift key {key!r} must look like '0,1'") from exc
        lifts[(i, j)] = int(e)
    gens = obj.get("gens")
    gens = None if gens is None else [parse_int_list(g) for g in gens]
    return chain_spec(ring, ideals, lifts, gens)


def load_chain_spec(ref, ring_ref=None, limits=DEFAULT) -> ChainSpec:
    """``auto`` (with ``ring_ref``) finds a strict 3-term chain; otherwise a
    ChainSpec file, literal or ``-``."""
    if ref == "auto":
        if not ring_ref:
            raise InputError("--chain auto needs --ring")
        return find_strict_chain(load_ring(ring_ref, limits), 3, limits)
    return chain_spec_from_json(load_json(ref), limits)


# -------------------------------------------------------------- output

def jsonable(x):
    """Convert results to plain JSON values (``INF`` becomes ``"inf"``)."""
    if x is INF:
        return "inf"
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (frozenset, set)):
        return [jsonable(v) for v in sorted(x)]
    if hasattr(x, "to_json"):
        return jsonable(x.to_json())
    return x


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2, ensure_ascii=False)


def vectors(vs) -> list:
    return [format_vector(v) for v in vs]
