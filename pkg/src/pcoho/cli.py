"""Command-line interface.

Exit codes: 0 = verdict true / valid, 1 = verdict false / invalid (the
report carries residuals), 2 = structural or usage error.  Reports are
deterministic: identical inputs produce byte-identical JSON output.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import fileio
from .algebra import check_map, validate_poisson, validate_representation
from .cochain import resolve_max_degree
from .cohomology import cohomology
from .deformations import (
    FormalDeformation,
    formal_deformation_check,
    linear_deformation_check,
    nijenhuis_check,
    operator_cohomology,
    rigidity_probe,
)
from .errors import PcohoError, StructureError
from .extensions import (
    build_split_extension,
    build_twisted_extension,
    canonical_section,
    compat_pair_aut,
    compat_pair_der,
    extract_cocycle,
    inducible_aut,
    inducible_der,
    validate_extension,
    wells_aut,
    wells_der,
)
from .matrix import Matrix
from .prototwilled import (
    check_operator,
    induced_algebra,
    induced_rep,
    is_deformation_map,
    semiclassical,
    twist_by,
)


def _parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="pcoho", description=__doc__)
    top.add_argument("--format", choices=("text", "json"), default="text")
    top.add_argument("--lenient", action="store_true",
                     help="warn on unknown document fields instead of rejecting")
    sub = top.add_subparsers(dest="command", required=True)

    chk = sub.add_parser("check", help="validate documents against their axioms")
    chk_sub = chk.add_subparsers(dest="what", required=True)
    c = chk_sub.add_parser("algebra")
    c.add_argument("files", nargs="+")
    c = chk_sub.add_parser("rep")
    c.add_argument("files", nargs="+")
    c = chk_sub.add_parser("map")
    c.add_argument("files", nargs="+")
    c = chk_sub.add_parser("prototwilled")
    c.add_argument("files", nargs="+")

    c = sub.add_parser("cohomology", help="cohomology of an algebra with coefficients")
    c.add_argument("--algebra", required=True)
    c.add_argument("--rep", required=True)
    c.add_argument("--max-degree", type=int, required=True)

    ext = sub.add_parser("extension", help="build or analyze abelian extensions")
    ext_sub = ext.add_subparsers(dest="action", required=True)
    c = ext_sub.add_parser("build-split")
    c.add_argument("--algebra", required=True)
    c.add_argument("--rep", required=True)
    c.add_argument("--output")
    c = ext_sub.add_parser("build-twisted")
    c.add_argument("--algebra", required=True)
    c.add_argument("--rep", required=True)
    c.add_argument("--cocycle", required=True)
    c.add_argument("--output")
    c = ext_sub.add_parser("extract")
    c.add_argument("--extension", required=True)
    c.add_argument("--section", help="map document with a matrix named 'section'")
    c.add_argument("--output")

    for name in ("wells", "inducible"):
        w = sub.add_parser(name)
        w_sub = w.add_subparsers(dest="flavor", required=True)
        for flavor in ("aut", "der"):
            c = w_sub.add_parser(flavor)
            c.add_argument("--extension", required=True)
            c.add_argument("--pair", required=True)
            if name == "inducible":
                c.add_argument("--emit-lift")

    d = sub.add_parser("defmap", help="deformation maps in a decomposed algebra")
    d_sub = d.add_subparsers(dest="action", required=True)
    for action in ("check", "induced", "twist", "cohomology"):
        c = d_sub.add_parser(action)
        c.add_argument("--prototwilled", required=True)
        c.add_argument("--map", required=True)
        if action == "cohomology":
            c.add_argument("--max-degree", type=int, required=True)
        if action in ("induced", "twist"):
            c.add_argument("--output")

    c = sub.add_parser("operator", help="named operator identities")
    op_sub = c.add_subparsers(dest="action", required=True)
    c = op_sub.add_parser("check")
    c.add_argument("--spec", required=True)
    c.add_argument("--map", required=True)

    dfm = sub.add_parser("deform", help="deformation theory of a deformation map")
    dfm_sub = dfm.add_subparsers(dest="action", required=True)
    c = dfm_sub.add_parser("linear")
    c.add_argument("--prototwilled", required=True)
    c.add_argument("--map", required=True)
    c.add_argument("--direction", required=True)
    c = dfm_sub.add_parser("formal")
    c.add_argument("--prototwilled", required=True)
    c.add_argument("--deformation", required=True)
    c = dfm_sub.add_parser("nijenhuis")
    c.add_argument("--prototwilled", required=True)
    c.add_argument("--map", required=True)
    c.add_argument("--element", required=True)
    c = dfm_sub.add_parser("rigidity")
    c.add_argument("--prototwilled", required=True)
    c.add_argument("--deformation", required=True)
    c.add_argument("--max-steps", type=int)

    c = sub.add_parser("semiclassical", help="commutator bracket of a first-order term")
    c.add_argument("--commutative", required=True)
    c.add_argument("--order1", required=True)
    c.add_argument("--output")
    return top


def run(argv):
    """Execute one command; returns (exit_code, report_dict, output_format)."""
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        code = e.code if isinstance(e.code, int) else 2
        return code, {"error": "usage"}, "text"
    warnings = [] if args.lenient else None
    strict = not args.lenient
    try:
        code, details = _dispatch(args, strict, warnings)
    except StructureError as e:
        return 2, {"error": str(e)}, args.format
    except PcohoError as e:
        report = getattr(e, "report", None)
        out = {"error": str(e)}
        if report is not None:
            out["report"] = report.to_dict()
        return 2, out, args.format
    except FileNotFoundError as e:
        return 2, {"error": f"cannot read {e.filename}"}, args.format
    if warnings:
        details["warnings"] = warnings
    details["verdict"] = code == 0
    return code, details, args.format


def _load(path, strict, warnings):
    return fileio.load(path, strict=strict, warnings=warnings)


def _check_degree_cap(requested: int):
    """The cap comes from PCOHO_MAX_DEGREE (default 3) and is itself validated."""
    from .errors import CapacityError
    cap = resolve_max_degree(None)
    if requested > cap:
        raise CapacityError(f"max degree {requested} exceeds the configured cap {cap}")


def _single_matrix(doc, preferred_names):
    mats = fileio.map_matrices(doc)
    for name in preferred_names:
        if name in mats:
            return mats[name]
    if len(mats) == 1:
        return next(iter(mats.values()))
    raise StructureError(f"map document must carry one of {preferred_names}")


def _rep_with_algebra(doc, algebra, strict, warnings):
    alg, rep = fileio.representation_of(doc, algebra=algebra, strict=strict, warnings=warnings)
    if alg is None:
        raise StructureError("representation document carries no algebra and none was given")
    return alg, rep


def _dispatch(args, strict, warnings):
    cmd = args.command
    if cmd == "check":
        return _cmd_check(args, strict, warnings)
    if cmd == "cohomology":
        alg = fileio.algebra_of(_load(args.algebra, strict, warnings), strict, warnings)
        alg2, rep = _rep_with_algebra(_load(args.rep, strict, warnings), alg, strict, warnings)
        _check_degree_cap(args.max_degree)
        report = cohomology(alg2, rep, args.max_degree)
        return 0, {"command": "cohomology", "cohomology": report.to_dict()}
    if cmd == "extension":
        return _cmd_extension(args, strict, warnings)
    if cmd == "wells":
        return _cmd_wells(args, strict, warnings)
    if cmd == "inducible":
        return _cmd_inducible(args, strict, warnings)
    if cmd == "defmap":
        return _cmd_defmap(args, strict, warnings)
    if cmd == "operator":
        spec = fileio.operator_spec_of(_load(args.spec, strict, warnings), strict, warnings)
        r = _single_matrix(_load(args.map, strict, warnings), ("map", "r"))
        direct, via = check_operator(spec, r)
        details = {
            "command": "operator check",
            "operator": spec.kind,
            "direct": direct.to_dict(),
            "viaGraph": via.to_dict(),
            "agree": direct.ok == via.ok,
        }
        return (0 if direct.ok and via.ok else 1), details
    if cmd == "deform":
        return _cmd_deform(args, strict, warnings)
    if cmd == "semiclassical":
        ptc = fileio.prototwilled_of(_load(args.commutative, strict, warnings), strict, warnings)
        odot1 = fileio.map_tensors(_load(args.order1, strict, warnings)).get("order1")
        if odot1 is None:
            raise StructureError("order1 document must carry a tensor named 'order1'")
        result = semiclassical(ptc, odot1)
        details = {
            "command": "semiclassical",
            "hochschild": result.hochschild.to_dict(),
            "poisson": result.poisson.to_dict(),
        }
        if result.ok:
            doc = fileio.prototwilled_document(result.pt)
            if args.output:
                fileio.save(doc, args.output)
                details["output"] = args.output
            else:
                details["prototwilled"] = doc.to_json()
        return (0 if result.ok else 1), details
    raise StructureError(f"unknown command {cmd!r}")


def _cmd_check(args, strict, warnings):
    results = []
    all_ok = True
    for path in args.files:
        doc = _load(path, strict, warnings)
        if args.what == "algebra":
            alg = fileio.algebra_of(doc, strict, warnings)
            rep = validate_poisson(alg)
        elif args.what == "rep":
            alg, vrep = _rep_with_algebra(doc, None, strict, warnings)
            rep = alg.validation().merged(validate_representation(alg, vrep))
        elif args.what == "map":
            rep = _check_map_doc(doc, strict, warnings)
        else:
            try:
                pt = fileio.prototwilled_of(doc, strict, warnings)
                rep = pt.validation()
                results.append({"file": path, "ok": rep.ok,
                                "classification": pt.classification,
                                "report": rep.to_dict()})
                all_ok = all_ok and rep.ok
                continue
            except PcohoError as e:
                inner = getattr(e, "report", None)
                if inner is None:
                    raise
                rep = inner
        results.append({"file": path, "ok": rep.ok, "report": rep.to_dict()})
        all_ok = all_ok and rep.ok
    return (0 if all_ok else 1), {"command": f"check {args.what}", "results": results}


def _check_map_doc(doc, strict, warnings):
    payload = doc.payload
    kind = payload.get("mapKind")
    if kind is None:
        raise StructureError("map document needs a mapKind for checking")
    f = _single_matrix(doc, ("map",))
    if "source" not in payload:
        raise StructureError("map document needs an embedded source")
    source = fileio._algebra_from_payload(payload["source"], strict, warnings)
    if kind == "poisson-derivation":
        if "target" not in payload:
            raise StructureError("derivation check needs an embedded target representation")
        target = fileio._rep_from_fields(payload["target"], "map target")
        return check_map(kind, source, target, f)
    if kind == "poisson-auto":
        return check_map(kind, source, source, f)
    if "target" not in payload:
        raise StructureError("homomorphism check needs an embedded target algebra")
    target = fileio._algebra_from_payload(payload["target"], strict, warnings)
    return check_map(kind, source, target, f)


def _cmd_extension(args, strict, warnings):
    if args.action == "build-split":
        alg = fileio.algebra_of(_load(args.algebra, strict, warnings), strict, warnings)
        alg, rep = _rep_with_algebra(_load(args.rep, strict, warnings), alg, strict, warnings)
        ext, section = build_split_extension(alg, rep)
        return _emit_extension(ext, args, "extension build-split")
    if args.action == "build-twisted":
        alg = fileio.algebra_of(_load(args.algebra, strict, warnings), strict, warnings)
        alg, rep = _rep_with_algebra(_load(args.rep, strict, warnings), alg, strict, warnings)
        h, H = fileio.cochain_pair_of(_load(args.cocycle, strict, warnings))
        ext, section = build_twisted_extension(alg, rep, h, H)
        return _emit_extension(ext, args, "extension build-twisted")
    # extract
    ext = fileio.extension_of(_load(args.extension, strict, warnings), strict, warnings)
    rep = validate_extension(ext)
    if not rep.ok:
        return 1, {"command": "extension extract", "extension": rep.to_dict()}
    if args.section:
        s = _single_matrix(_load(args.section, strict, warnings), ("section", "map"))
    else:
        s = canonical_section(ext)
    h, H = extract_cocycle(ext, s)
    doc = fileio.cochain_pair_document(h, H)
    details = {"command": "extension extract"}
    if args.output:
        fileio.save(doc, args.output)
        details["output"] = args.output
    else:
        details["cocycle"] = doc.to_json()
    return 0, details


def _emit_extension(ext, args, command):
    doc = fileio.extension_document(ext)
    details = {"command": command}
    if args.output:
        fileio.save(doc, args.output)
        details["output"] = args.output
    else:
        details["extension"] = doc.to_json()
    return 0, details


def _load_pair(path, flavor, strict, warnings):
    mats = fileio.map_matrices(fileio.load(path, strict=strict, warnings=warnings))
    names = ("beta", "alpha") if flavor == "aut" else ("dV", "dP")
    missing = [n for n in names if n not in mats]
    if missing:
        raise StructureError(f"pair document must carry matrices {names}")
    return mats[names[0]], mats[names[1]]


def _cmd_wells(args, strict, warnings):
    ext = fileio.extension_of(_load(args.extension, strict, warnings), strict, warnings)
    first, second = _load_pair(args.pair, args.flavor, strict, warnings)
    if args.flavor == "aut":
        comp = compat_pair_aut(ext, first, second, report=True)
        if not comp.ok:
            return 1, {"command": "wells aut", "reason": "pair not in C_{mu,rho}",
                       "compatibility": comp.to_dict()}
        w = wells_aut(ext, first, second)
        tag = "wells aut"
    else:
        comp = compat_pair_der(ext, first, second, report=True)
        if not comp.ok:
            return 1, {"command": "wells der", "reason": "pair not in D_{mu,rho}",
                       "compatibility": comp.to_dict()}
        w = wells_der(ext, first, second)
        tag = "wells der"
    from .algebra import format_scalar
    from .fileio import _tensor_out
    details = {
        "command": tag,
        "classCoords": [format_scalar(c) for c in w.coords],
        "classIsZero": w.is_zero,
        "representativePair": {"h": _tensor_out(w.pair[0]), "H": _tensor_out(w.pair[1])},
    }
    return (0 if w.is_zero else 1), details


def _cmd_inducible(args, strict, warnings):
    ext = fileio.extension_of(_load(args.extension, strict, warnings), strict, warnings)
    first, second = _load_pair(args.pair, args.flavor, strict, warnings)
    if args.flavor == "aut":
        ok, lift = inducible_aut(ext, first, second)
        tag = "inducible aut"
    else:
        ok, lift = inducible_der(ext, first, second)
        tag = "inducible der"
    details = {"command": tag, "inducible": ok}
    if ok and lift is not None:
        doc = fileio.map_document(matrices={"lift": lift})
        if args.emit_lift:
            fileio.save(doc, args.emit_lift)
            details["output"] = args.emit_lift
        else:
            details["lift"] = doc.to_json()
    return (0 if ok else 1), details


def _cmd_defmap(args, strict, warnings):
    pt = fileio.prototwilled_of(_load(args.prototwilled, strict, warnings), strict, warnings)
    r = _single_matrix(_load(args.map, strict, warnings), ("map", "r"))
    if args.action == "check":
        rep = is_deformation_map(pt, r)
        return (0 if rep.ok else 1), {"command": "defmap check", "result": rep.to_dict()}
    if args.action == "induced":
        alg = induced_algebra(pt, r)
        rep = induced_rep(pt, r)
        doc = fileio.representation_document(rep, algebra=alg)
        details = {"command": "defmap induced"}
        if args.output:
            fileio.save(doc, args.output)
            details["output"] = args.output
        else:
            details["induced"] = doc.to_json()
        return 0, details
    if args.action == "twist":
        tw = twist_by(pt, r)
        doc = fileio.prototwilled_document(tw)
        details = {"command": "defmap twist", "classification": tw.classification}
        if args.output:
            fileio.save(doc, args.output)
            details["output"] = args.output
        else:
            details["twist"] = doc.to_json()
        return 0, details
    # cohomology
    _check_degree_cap(args.max_degree)
    report = operator_cohomology(pt, r, args.max_degree)
    return 0, {"command": "defmap cohomology", "cohomology": report.to_dict()}


def _cmd_deform(args, strict, warnings):
    pt = fileio.prototwilled_of(_load(args.prototwilled, strict, warnings), strict, warnings)
    if args.action == "linear":
        r = _single_matrix(_load(args.map, strict, warnings), ("map", "r"))
        r1 = _single_matrix(_load(args.direction, strict, warnings), ("direction", "r1", "map"))
        rep = linear_deformation_check(pt, r, r1)
        return (0 if rep.ok else 1), {"command": "deform linear", "result": rep.to_dict()}
    if args.action == "formal":
        terms = fileio.deformation_terms(_load(args.deformation, strict, warnings))
        rep = formal_deformation_check(pt, FormalDeformation(terms))
        return (0 if rep.ok else 1), {"command": "deform formal", "result": rep.to_dict()}
    if args.action == "nijenhuis":
        r = _single_matrix(_load(args.map, strict, warnings), ("map", "r"))
        elem = _single_matrix(_load(args.element, strict, warnings), ("element", "x0"))
        if elem.cols != 1:
            raise StructureError("element must be a column vector")
        rep = nijenhuis_check(pt, r, elem.column_vector(0), report=True)
        return (0 if rep.ok else 1), {"command": "deform nijenhuis", "result": rep.to_dict()}
    # rigidity
    terms = fileio.deformation_terms(_load(args.deformation, strict, warnings))
    rt = FormalDeformation(terms)
    probe = rigidity_probe(pt, rt.base, rt, max_steps=args.max_steps)
    return (0 if probe["trivialized"] else 1), {"command": "deform rigidity", "probe": probe}


def render_text(code, details) -> str:
    lines = [f"verdict: {'ok' if code == 0 else 'fail' if code == 1 else 'error'}"]
    for key in sorted(details):
        if key in ("verdict",):
            continue
        val = details[key]
        if isinstance(val, (str, int, bool)):
            lines.append(f"{key}: {val}")
        else:
            lines.append(f"{key}: {json.dumps(val, sort_keys=True)}")
    return "\n".join(lines) + "\n"


def render_json(code, details) -> str:
    payload = dict(details)
    payload["exit"] = code
    return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    code, details, fmt = run(argv)
    if fmt == "json":
        sys.stdout.write(render_json(code, details))
    else:
        sys.stdout.write(render_text(code, details))
    return code


if __name__ == "__main__":
    sys.exit(main())
