"""``projtrace`` command line: every command prints one JSON report.

Exit status: 0 for a decision (negative answers included), 1 for corpus
golden mismatches, 2 for bad input, 3 when a search or window cap stops the
computation before a decision.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
import time
from contextlib import redirect_stdout
from dataclasses import replace

from . import fairsize, formats, ideals, monoid, ring as ringmod, telescope, trace, tree
from .config import DEFAULT
from .errors import (GoldenMismatch, InputError, ProjTraceError, SearchCap, SizeCap, Undetermined,
                     WindowTooSmall)

DEFAULT_DEPTH = 6
UNDECIDED = (Undetermined, SearchCap, SizeCap, WindowTooSmall)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _limits(args):
    cap = getattr(args, "cap", None)
    if cap is None:
        return DEFAULT
    return replace(DEFAULT, ring_size=cap, oracle_size=cap, search=max(DEFAULT.search, cap))


def _ring(args):
    return formats.load_ring(args.ring, _limits(args))


def _telescope(args):
    return formats.telescope_from_json(formats.load_json(args.telescope), _limits(args))


def _report(command, inputs, result, certificates=()):
    return {"command": command, "inputs": inputs, "result": result, "certificates": list(certificates)}


# ------------------------------------------------------------------ ring

def cmd_ring(args):
    R = _ring(args)
    inputs = {"ring": formats.ring_reference(R)}
    if args.action == "show":
        res = {"name": R.name, "size": R.size, "zero": R.zero, "one": R.one,
               "characteristic": R.characteristic, "commutative": R.is_commutative,
               "units": ringmod.units(R)}
        if args.tables:
            res["add"] = [list(r) for r in R.add]
            res["mul"] = [list(r) for r in R.mul]
        return _report("ring show", inputs, res)
    if args.action == "verify":
        ringmod.verify_axioms(R)
        return _report("ring verify", inputs, {"valid": True})
    if args.action == "export":
        return _report("ring export", inputs, {"spec": R.to_json()})
    if args.action == "quotient":
        I = formats.parse_ideal(R, args.ideal)
        if I.side != "two_sided":
            raise InputError("quotients need a two-sided ideal")
        q = ringmod.quotient_ring(R, I.elements)
        return _report("ring quotient", dict(inputs, ideal=formats.ideal_literal(I)),
                       {"spec": q.ring.to_json(), "proj": list(q.proj), "reps": list(q.reps)})
    raise InputError(f"unknown ring action {args.action!r}")


# ----------------------------------------------------------------- ideal

_FILTERS = ("idempotent", "trace", "semisimple-quotient", "maximal", "left-pure", "right-pure")


def cmd_ideal(args):
    R = _ring(args)
    lim = _limits(args)
    inputs = {"ring": formats.ring_reference(R)}
    if args.action == "list":
        side = args.side
        items = ideals.enumerate_ideals(R, side, lim)
        for f in args.filter or ():
            if f == "idempotent":
                items = [I for I in items if ideals.is_idempotent(I)]
            elif f == "trace":
                items = [I for I in items if trace.is_trace_ideal(R, I, lim).is_trace]
            elif f == "semisimple-quotient":
                items = [I for I in items if ideals.is_semisimple_quotient(R, I)]
            elif f == "maximal":
                maxi = {I.elements for I in ideals.maximal_two_sided_ideals(R, lim)}
                items = [I for I in items if I.elements in maxi]
            elif f == "left-pure":
                items = [I for I in items if ideals.is_left_pure(I)]
            elif f == "right-pure":
                items = [I for I in items if ideals.is_right_pure(I)]
        inputs.update(side=side, filter=list(args.filter or ()))
        return _report("ideal list", inputs, {"count": len(items), "ideals": [I.to_json() for I in items]})
    if args.action == "close":
        I = ideals.close(R, formats.parse_int_list(args.gens), args.side)
        return _report("ideal close", dict(inputs, gens=list(I.generators), side=args.side),
                       {"ideal": I.to_json(), "minimal_generators": list(ideals.minimal_generators(R, I.elements, I.side)),
                        "idempotent": ideals.is_idempotent(I)})
    if args.action == "op":
        A = formats.parse_ideal(R, args.a)
        B = formats.parse_ideal(R, args.b)
        C = ideals.ideal_op(args.op, A, B)
        return _report("ideal op", dict(inputs, op=args.op, a=formats.ideal_literal(A), b=formats.ideal_literal(B)),
                       {"ideal": C.to_json()})
    if args.action == "radical":
        J = ideals.jacobson_radical(R)
        return _report("ideal radical", inputs, {"ideal": J.to_json()})
    if args.action == "pure":
        I = formats.parse_ideal(R, args.ideal)
        return _report("ideal pure", dict(inputs, ideal=formats.ideal_literal(I)),
                       {"left_pure": ideals.is_left_pure(I), "right_pure": ideals.is_right_pure(I)})
    raise InputError(f"unknown ideal action {args.action!r}")


# ----------------------------------------------------------------- trace

def cmd_trace(args):
    R = _ring(args)
    lim = _limits(args)
    inputs = {"ring": formats.ring_reference(R)}
    if args.action == "decide":
        I = formats.parse_ideal(R, args.ideal)
        d = trace.is_trace_ideal(R, I, lim)
        return _report("trace decide", dict(inputs, ideal=formats.ideal_literal(I)), {"decision": d.to_json()},
                       [d.to_json()])
    if args.action == "chain-verify":
        lits = formats.load_json(args.chain)
        if isinstance(lits, dict):
            lits = lits.get("ideals", [])
        Js = [formats.ideal_from_json(R, lit, "left") for lit in lits]
        c = trace.verify_chain(R, Js)
        return _report("trace chain-verify", dict(inputs, chain=[formats.ideal_literal(J) for J in Js]),
                       {"decision": "VALID" if c.valid else "INVALID", "certificate": c.to_json()})
    if args.action == "pure-chain":
        I = formats.parse_ideal(R, args.ideal)
        pc = trace.pure_chain(R, I, args.length, lim)
        return _report("trace pure-chain", dict(inputs, ideal=formats.ideal_literal(I), length=args.length),
                       {"chain": pc.to_json()})
    if args.action == "determinant":
        J1 = formats.parse_ideal(R, args.j1)
        J2 = formats.parse_ideal(R, args.j2)
        u = trace.determinant_unit(R, J1, J2)
        return _report("trace determinant", dict(inputs, j1=formats.ideal_literal(J1), j2=formats.ideal_literal(J2)),
                       {"unit": u})
    raise InputError(f"unknown trace action {args.action!r}")


# ------------------------------------------------------------- telescope

def _depth(args):
    return args.depth if args.depth is not None else DEFAULT_DEPTH


def cmd_telescope(args):
    lim = _limits(args)
    depth = _depth(args)
    if args.action == "build-whitehead":
        R = _ring(args)
        gens = formats.parse_int_list(args.gens)
        I = formats.parse_ideal(R, args.ideal) if args.ideal else ideals.close(R, gens, "two_sided")
        T = telescope.whitehead_build(R, I, gens, depth)
        builder = {"kind": "whitehead", "gens": gens, "ideal": formats.ideal_literal(I)}
        return _report("telescope build-whitehead",
                       {"ring": formats.ring_reference(R), "gens": gens, "ideal": formats.ideal_literal(I), "depth": depth},
                       {"sizes": list(T.sizes), "telescope": formats.telescope_to_json(T, builder)})
    if args.action == "build-lift":
        R = _ring(args)
        if args.spec:
            spec = formats.load_json(args.spec)
        else:
            spec = _default_lift_spec(R, formats.parse_ideal(R, args.ideal), lim)
        builder = dict(spec, kind="lift")
        T = formats._rebuild(R, builder, depth, lim)
        I = formats.ideal_from_json(R, spec["ideal"])
        ok = telescope.check_lift_reduction(T, I, [formats.matrix_from_rows(R, m) for m in spec["X"]], depth)
        return _report("telescope build-lift", {"ring": formats.ring_reference(R), "spec": spec, "depth": depth},
                       {"sizes": list(T.sizes), "reduction_matches": ok,
                        "telescope": formats.telescope_to_json(T, builder)})
    T = _telescope(args)
    if args.depth is not None:
        T = T.at_depth(depth)
    depth = T.depth
    inputs = {"telescope": T.name, "ring": formats.ring_reference(T.ring), "depth": depth}
    if args.action == "verify":
        rep = telescope.verify_certificates(T, depth)
        return _report("telescope verify", inputs, {"valid": rep.valid, "sizes": list(T.sizes)}, [rep.to_json()])
    if args.action == "trace":
        tr = telescope.telescope_trace(T, depth)
        return _report("telescope trace", inputs, {"trace": tr.to_json()})
    if args.action == "tensor":
        I = formats.parse_ideal(T.ring, args.ideal)
        tq = telescope.tensor_quotient(T, I, depth, lim)
        return _report("telescope tensor", dict(inputs, ideal=formats.ideal_literal(I)),
                       {"decision": tq.decision, "tensor": tq.to_json()})
    if args.action == "hom-chain":
        ks = range(1, args.k + 1) if args.all else [args.k]
        chains = [telescope.hom_row_chain(T, k, depth, lim).to_json() for k in ks]
        return _report("telescope hom-chain", dict(inputs, k=args.k, all=args.all), {"chains": chains})
    if args.action == "strict-ml":
        res = telescope.strict_ml_check(T, depth, lim)
        return _report("telescope strict-ml", inputs,
                       {"ok": True, "g": [{"k": k, "matrix": g.to_rows()} for k, g in enumerate(res, start=2)]})
    if args.action == "prefix":
        p = telescope.idempotent_prefix(T, args.window)
        c = trace.chain_from_idempotent_prefix(p.matrix, p.bounds)
        return _report("telescope prefix", dict(inputs, window=args.window),
                       {"prefix": p.to_json(), "chain": c.to_json(), "closure": c.union().to_json()})
    if args.action == "dim-vector":
        v = monoid.dim_vector_of_telescope(T.ring, T, depth, lim)
        return _report("telescope dim-vector", inputs, {"dim_vector": list(v), "literal": monoid.format_vector(v)})
    raise InputError(f"unknown telescope action {args.action!r}")


def _default_lift_spec(R, I, lim):
    """Free rank one over ``R/I`` lifted along the constant chain ``J`` of the
    trace witness for ``I``."""
    d = trace.is_trace_ideal(R, I, lim)
    if not d.is_trace:
        raise InputError("the ideal is not a trace ideal; pass --spec with explicit chain data")
    J = d.witness
    a = list(ideals.minimal_generators(R, J.elements, "left"))
    return {"ideal": formats.ideal_literal(I),
            "chain": {"ideals": [{"side": "left", "gens": a}], "gens": [a]},
            "X": [[[R.one]]], "Y": [[[R.one]]]}


# ------------------------------------------------------------------ tree

def _chain(args):
    return formats.load_chain_spec(args.chain, getattr(args, "ring", None), _limits(args))


def _sequence(args):
    return None if not args.sequence else formats.parse_int_list(args.sequence)


def cmd_tree(args):
    lim = _limits(args)
    depth = _depth(args)
    if args.action == "fairsize" and args.telescope:
        T = _telescope(args)
        window = args.window
        rep = fairsize.fair_size_analyze(T, window, lim, strict=False)
        return _report("tree fairsize", {"telescope": T.name, "ring": formats.ring_reference(T.ring), "window": window},
                       {"fairsize": rep.to_json()})
    cs = _chain(args)
    seq = _sequence(args)
    inputs = {"chain": formats.chain_spec_to_json(cs), "sequence": seq, "depth": depth}
    if args.action == "validate":
        rep = tree.validate_chain_spec(cs)
        return _report("tree validate", inputs, {"report": rep.to_json()})
    rep = tree.validate_chain_spec(cs)
    if not rep.valid:
        raise InputError("chain spec is invalid", failures=rep.to_json()["failures"])
    if args.action == "build":
        tr, T = tree.build_basic_tree(cs, depth) if seq is None else tree.build_sequence_tree(cs, seq, depth)
        cert = telescope.verify_certificates(T, depth)
        builder = {"kind": "tree", "chain": formats.chain_spec_to_json(cs), "sequence": seq}
        return _report("tree build", inputs,
                       {"levels": list(tr.counts), "valid": cert.valid,
                        "trace": telescope.telescope_trace(T, depth).to_json(),
                        "telescope": formats.telescope_to_json(T, builder)}, [cert.to_json()])
    if args.action == "multiplicities":
        variant = "basic" if seq is None else tuple(seq)
        alpha = tree.multiplicity_vector(cs, variant, args.k)
        res = {"alpha": list(alpha)}
        if seq is None:
            res["closed_form"] = list(tree.basic_closed_form([cs.m(j) for j in range(1, args.k + 1)], args.k))
        if args.verify:
            mr = tree.verify_multiplicities(cs, variant, args.k, args.depth, limits=lim)
            res["verification"] = mr.to_json()
        return _report("tree multiplicities", dict(inputs, k=args.k), res)
    if args.action == "fairsize":
        _, T = tree.build_basic_tree(cs, depth) if seq is None else tree.build_sequence_tree(cs, seq, depth)
        rep = fairsize.fair_size_analyze(T, args.window, lim, strict=False)
        return _report("tree fairsize", dict(inputs, window=args.window), {"fairsize": rep.to_json()})
    raise InputError(f"unknown tree action {args.action!r}")


# ---------------------------------------------------------------- monoid

def cmd_monoid(args):
    lim = _limits(args)
    cs = monoid.parse_system(args.rows, args.mods, args.k)
    inputs = {"system": cs.to_json()}
    if args.action == "gens":
        g = monoid.vstar_generators(cs, lim)
        return _report("monoid gens", inputs, {"generators": formats.vectors(g), "count": len(g)})
    if args.action == "hilbert":
        g = monoid.finite_hilbert_basis(cs, lim)
        return _report("monoid hilbert", inputs, {"generators": formats.vectors(g), "count": len(g)})
    if args.action == "support":
        X = formats.parse_int_list(args.support)
        g = monoid.support_generators(cs, X, lim)
        return _report("monoid support", dict(inputs, support=sorted(X)), {"generators": formats.vectors(g)})
    if args.action == "semiperfect":
        sp = monoid.is_semi_semiperfect(cs)
        return _report("monoid semiperfect", inputs, sp.to_json())
    x = monoid.parse_vector(args.x)
    inputs["x"] = monoid.format_vector(x)
    if args.action == "member":
        return _report("monoid member", inputs, {"member": monoid.member(cs, x)})
    if args.action == "express":
        parts = monoid.express(cs, x, limits=lim)
        return _report("monoid express", inputs, {"summands": formats.vectors(parts),
                                                  "sum": monoid.format_vector(monoid._sum(parts, cs.k))})
    raise InputError(f"unknown monoid action {args.action!r}")


# ---------------------------------------------------------------- corpus

def _strip_timing(report):
    return {k: v for k, v in report.items() if k != "timing_ms"}


def run_argv(argv, stdin_text=None):
    """Run one command in-process; returns (exit code, parsed JSON report)."""
    out = io.StringIO()
    old_stdin = sys.stdin
    try:
        if stdin_text is not None:
            sys.stdin = io.StringIO(stdin_text)
        with redirect_stdout(out):
            code = main(list(argv))
    finally:
        sys.stdin = old_stdin
    return code, json.loads(out.getvalue())


def corpus_run(manifest_path, update=False):
    with open(manifest_path, encoding="utf-8") as fh:
        manifest = json.load(fh)
    base = os.path.dirname(os.path.abspath(manifest_path))
    results = []
    all_ok = True
    for sc in manifest.get("scenarios", []):
        steps = sc.get("pipe") or [sc["argv"]]
        stdin_text, code, rep = None, 0, None
        for argv in steps:
            code, rep = run_argv(argv, stdin_text)
            stdin_text = json.dumps(rep)
            if code != 0:
                break
        got = _strip_timing(rep)
        gpath = os.path.join(base, sc["golden"])
        expected_code = sc.get("exit", 0)
        if update:
            os.makedirs(os.path.dirname(gpath), exist_ok=True)
            with open(gpath, "w", encoding="utf-8") as fh:
                fh.write(formats.dumps(got) + "\n")
        try:
            with open(gpath, encoding="utf-8") as fh:
                want = json.load(fh)
        except FileNotFoundError:
            want = None
        ok = want == got and code == expected_code
        entry = {"name": sc["name"], "ok": ok, "exit": code}
        if not ok:
            all_ok = False
            entry["diff"] = _diff(want, got)
        results.append(entry)
    return all_ok, results


def _diff(want, got, path="$"):
    if want is None:
        return [f"{path}: golden missing"]
    if type(want) is not type(got):
        return [f"{path}: type {type(want).__name__} != {type(got).__name__}"]
    if isinstance(want, dict):
        out = []
        for k in sorted(set(want) | set(got)):
            if k not in want or k not in got:
                out.append(f"{path}.{k}: only in {'golden' if k in want else 'output'}")
            else:
                out.extend(_diff(want[k], got[k], f"{path}.{k}"))
        return out[:20]
    if isinstance(want, list):
        if len(want) != len(got):
            return [f"{path}: length {len(want)} != {len(got)}"]
        out = []
        for i, (a, b) in enumerate(zip(want, got)):
            out.extend(_diff(a, b, f"{path}[{i}]"))
        return out[:20]
    return [] if want == got else [f"{path}: {want!r} != {got!r}"]


def cmd_corpus(args):
    ok, results = corpus_run(args.manifest, update=args.update)
    rep = _report("corpus run", {"manifest": os.path.basename(args.manifest)},
                  {"ok": ok, "scenarios": results, "count": len(results)})
    if not ok:
        bad = [r["name"] for r in results if not r["ok"]]
        err = GoldenMismatch(f"{len(bad)} scenario(s) differ from their goldens", scenarios=bad)
        rep["result"]["error"] = err.to_json()
    return rep


# ---------------------------------------------------------------- parser

def build_parser():
    p = _Parser(prog="projtrace", description="Trace ideals and projective modules over finite rings.")
    p.add_argument("--cap", type=int, default=None, help="override ring and census size caps")
    sub = p.add_subparsers(dest="group", required=True, parser_class=_Parser)

    def common(sp, ring=True):
        sp.add_argument("--cap", type=int, default=argparse.SUPPRESS)
        if ring:
            sp.add_argument("--ring", required=True, help="preset name, JSON literal or spec file")

    r = sub.add_parser("ring")
    r.add_argument("action", choices=["show", "verify", "export", "quotient"])
    common(r)
    r.add_argument("--tables", action="store_true")
    r.add_argument("--ideal")

    i = sub.add_parser("ideal")
    i.add_argument("action", choices=["list", "close", "op", "radical", "pure"])
    common(i)
    i.add_argument("--side", default="two_sided", choices=list(ideals.SIDES))
    i.add_argument("--filter", action="append", choices=_FILTERS)
    i.add_argument("--gens", default="")
    i.add_argument("--op", choices=["sum", "product", "intersection"])
    i.add_argument("--a")
    i.add_argument("--b")
    i.add_argument("--ideal")

    t = sub.add_parser("trace")
    t.add_argument("action", choices=["decide", "chain-verify", "pure-chain", "determinant"])
    common(t)
    t.add_argument("--ideal")
    t.add_argument("--chain")
    t.add_argument("--length", type=int, default=4)
    t.add_argument("--j1")
    t.add_argument("--j2")

    s = sub.add_parser("telescope")
    s.add_argument("action", choices=["build-whitehead", "build-lift", "verify", "trace", "tensor", "hom-chain",
                                      "strict-ml", "prefix", "dim-vector"])
    common(s, ring=False)
    s.add_argument("--ring")
    s.add_argument("--telescope", default="-", help="telescope file, report file or - for stdin")
    s.add_argument("--gens")
    s.add_argument("--ideal")
    s.add_argument("--spec")
    s.add_argument("--depth", type=int, default=None)
    s.add_argument("--k", type=int, default=1)
    s.add_argument("--all", action="store_true")
    s.add_argument("--window", type=int, default=3)

    tr = sub.add_parser("tree")
    tr.add_argument("action", choices=["validate", "build", "multiplicities", "fairsize"])
    common(tr, ring=False)
    tr.add_argument("--ring")
    tr.add_argument("--chain", default="auto", help="ChainSpec file/literal, - or auto")
    tr.add_argument("--telescope")
    tr.add_argument("--sequence")
    tr.add_argument("--depth", type=int, default=None)
    tr.add_argument("--k", type=int, default=0)
    tr.add_argument("--verify", action="store_true")
    tr.add_argument("--window", type=int, default=4)

    m = sub.add_parser("monoid")
    m.add_argument("action", choices=["gens", "hilbert", "support", "member", "express", "semiperfect"])
    common(m, ring=False)
    m.add_argument("--rows", default="")
    m.add_argument("--mods", default="")
    m.add_argument("--k", type=int, default=None)
    m.add_argument("--x")
    m.add_argument("--support")

    c = sub.add_parser("corpus")
    c.add_argument("action", choices=["run"])
    c.add_argument("manifest")
    c.add_argument("--update", action="store_true", help="rewrite goldens from current output")
    return p


_COMMANDS = {"ring": cmd_ring, "ideal": cmd_ideal, "trace": cmd_trace, "telescope": cmd_telescope,
             "tree": cmd_tree, "monoid": cmd_monoid, "corpus": cmd_corpus}


def _emit(obj, stream):
    stream.write(formats.dumps(obj) + "\n")


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    out = sys.stdout
    start = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        _emit({"error": "usage", "detail": str(exc)}, out)
        return 2
    except SystemExit as exc:          # --help
        return int(exc.code or 0)
    try:
        rep = _COMMANDS[args.group](args)
    except UNDECIDED as exc:
        _emit(exc.to_json(), out)
        return 3
    except ProjTraceError as exc:
        _emit(exc.to_json(), out)
        return 2
    except (KeyError, ValueError, TypeError) as exc:
        _emit({"error": "input_error", "detail": f"{type(exc).__name__}: {exc}"}, out)
        return 2
    rep["timing_ms"] = round((time.perf_counter() - start) * 1000, 3)
    _emit(rep, out)
    if args.group == "corpus" and not rep["result"]["ok"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
