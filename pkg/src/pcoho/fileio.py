"""Canonical JSON documents for every object the tool exchanges.

All rationals travel as strings "p/q" (or "p" when the denominator is 1),
lowest terms, positive denominator.  Serialization is canonical (sorted
keys, fixed separators), so normalized documents round-trip byte for byte
and identical inputs yield identical files.
"""

from __future__ import annotations

import json
from typing import Optional

from .algebra import (
    PoissonAlgebra,
    Representation,
    format_scalar,
    parse_scalar,
)
from .errors import StructureError
from .extensions import AbelianExtension
from .matrix import Matrix
from .prototwilled import ActionData, OperatorSpec, ProtoTwilled

SCHEMA_VERSION = "1"

KINDS = ("algebra", "representation", "map", "extension", "prototwilled",
         "operator-spec", "deformation", "cochain-pair")


class Document:
    def __init__(self, kind: str, payload: dict):
        if kind not in KINDS:
            raise StructureError(f"unknown document kind {kind!r}")
        self.kind = kind
        self.payload = payload

    def to_json(self) -> dict:
        return {"schemaVersion": SCHEMA_VERSION, "kind": self.kind, "payload": self.payload}


def serialize(doc: Document) -> bytes:
    return (json.dumps(doc.to_json(), sort_keys=True, separators=(",", ":")) + "\n").encode("utf-8")


def parse(data, strict: bool = True, warnings: Optional[list] = None) -> Document:
    """Parse bytes/str/dict into a Document; unknown fields reject (strict)
    or accumulate into ``warnings`` (lenient)."""
    if isinstance(data, (bytes, bytearray)):
        try:
            raw = json.loads(data.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            raise StructureError(f"malformed document: {e}") from e
    elif isinstance(data, str):
        try:
            raw = json.loads(data)
        except json.JSONDecodeError as e:
            raise StructureError(f"malformed document: {e}") from e
    elif isinstance(data, dict):
        raw = data
    else:
        raise StructureError("document must be bytes, str, or dict")
    if not isinstance(raw, dict):
        raise StructureError("document root must be an object")
    _check_fields(raw, {"schemaVersion", "kind", "payload"}, "document", strict, warnings)
    if raw.get("schemaVersion") != SCHEMA_VERSION:
        raise StructureError(f"unsupported schema version {raw.get('schemaVersion')!r}")
    kind = raw.get("kind")
    payload = raw.get("payload")
    if not isinstance(payload, dict):
        raise StructureError("payload must be an object")
    doc = Document(kind, payload)
    # normalize (and thereby validate) the payload by rebuilding it
    normalized = _normalize(doc, strict, warnings)
    return Document(kind, normalized)


def load(path, strict: bool = True, warnings: Optional[list] = None) -> Document:
    with open(path, "rb") as fh:
        return parse(fh.read(), strict=strict, warnings=warnings)


def save(doc: Document, path):
    with open(path, "wb") as fh:
        fh.write(serialize(doc))


def _check_fields(obj: dict, allowed: set, where: str, strict: bool, warnings):
    unknown = set(obj) - allowed
    if unknown:
        msg = f"unknown fields in {where}: {sorted(unknown)}"
        if strict:
            raise StructureError(msg)
        if warnings is not None:
            warnings.append(msg)


def _normalize(doc: Document, strict: bool, warnings) -> dict:
    kind, p = doc.kind, doc.payload
    if kind == "algebra":
        return algebra_payload(algebra_of(doc, strict, warnings))
    if kind == "representation":
        alg, rep = representation_of(doc, strict=strict, warnings=warnings)
        return representation_payload(rep, algebra=alg)
    if kind == "map":
        _check_fields(p, {"matrices", "tensors", "mapKind", "source", "target"},
                      "map payload", strict, warnings)
        out = {}
        if "matrices" in p:
            out["matrices"] = {name: matrix_payload(_read_matrix(m, f"matrix {name}"))
                               for name, m in sorted(p["matrices"].items())}
        if "tensors" in p:
            out["tensors"] = {name: _tensor_out(_read_tensor(t, f"tensor {name}"))
                              for name, t in sorted(p["tensors"].items())}
        if "mapKind" in p:
            out["mapKind"] = str(p["mapKind"])
        for side in ("source", "target"):
            if side in p:
                out[side] = p[side]
        if not out.get("matrices") and not out.get("tensors"):
            raise StructureError("map document carries no matrices or tensors")
        return out
    if kind == "extension":
        ext = extension_of(doc, strict, warnings)
        return extension_payload(ext)
    if kind == "prototwilled":
        pt = prototwilled_of(doc, strict, warnings)
        return prototwilled_payload(pt)
    if kind == "operator-spec":
        spec = operator_spec_of(doc, strict, warnings)
        return operator_spec_payload(spec)
    if kind == "deformation":
        _check_fields(p, {"order", "terms"}, "deformation payload", strict, warnings)
        terms = [_read_matrix(t, f"term {i}") for i, t in enumerate(p.get("terms", []))]
        if not terms:
            raise StructureError("deformation needs at least one term")
        if p.get("order") != len(terms) - 1:
            raise StructureError("deformation order does not match the term count")
        return {"order": len(terms) - 1, "terms": [matrix_payload(t) for t in terms]}
    if kind == "cochain-pair":
        _check_fields(p, {"h", "H"}, "cochain-pair payload", strict, warnings)
        h = _read_tensor(p.get("h"), "h")
        H = _read_tensor(p.get("H"), "H")
        return {"h": _tensor_out(h), "H": _tensor_out(H)}
    raise StructureError(f"unhandled kind {kind!r}")


# -- scalar / matrix / tensor helpers ------------------------------------------


def _read_matrix(obj, where: str) -> Matrix:
    if not isinstance(obj, dict):
        raise StructureError(f"{where}: matrix must be an object")
    missing = {"rows", "cols", "entries"} - set(obj)
    if missing:
        raise StructureError(f"{where}: missing fields {sorted(missing)}")
    extra = set(obj) - {"rows", "cols", "entries"}
    if extra:
        raise StructureError(f"{where}: unknown fields {sorted(extra)}")
    entries = obj["entries"]
    if len(entries) != obj["rows"] or any(len(r) != obj["cols"] for r in entries):
        raise StructureError(f"{where}: entry grid does not match rows x cols")
    return Matrix([[parse_scalar(x) for x in row] for row in entries])


def matrix_payload(m: Matrix) -> dict:
    return {
        "rows": m.rows,
        "cols": m.cols,
        "entries": [[format_scalar(x) for x in row] for row in m.data],
    }


def _read_tensor(obj, where: str):
    if not isinstance(obj, list):
        raise StructureError(f"{where}: tensor must be a nested array")
    return tuple(
        tuple(tuple(parse_scalar(x) for x in row) for row in plane) for plane in obj
    )


def _tensor_out(t):
    return [[[format_scalar(x) for x in row] for row in plane] for plane in t]


# -- algebra ---------------------------------------------------------------------


def algebra_payload(p: PoissonAlgebra) -> dict:
    out = {
        "dim": p.dim,
        "mult": _tensor_out(p.mult),
        "bracket": _tensor_out(p.bracket),
    }
    if p.labels is not None:
        out["labels"] = list(p.labels)
    return out


def _algebra_from_payload(p: dict, strict: bool, warnings) -> PoissonAlgebra:
    _check_fields(p, {"dim", "mult", "bracket", "labels"}, "algebra payload", strict, warnings)
    if "dim" not in p or "mult" not in p or "bracket" not in p:
        raise StructureError("algebra payload needs dim, mult, bracket")
    return PoissonAlgebra(p["dim"], _read_tensor(p["mult"], "mult"),
                          _read_tensor(p["bracket"], "bracket"), labels=p.get("labels"))


def algebra_of(doc: Document, strict: bool = True, warnings=None) -> PoissonAlgebra:
    if doc.kind != "algebra":
        raise StructureError(f"expected an algebra document, got {doc.kind}")
    return _algebra_from_payload(doc.payload, strict, warnings)


def algebra_document(p: PoissonAlgebra) -> Document:
    return Document("algebra", algebra_payload(p))


# -- representation ----------------------------------------------------------------


def _rep_from_fields(p: dict, where: str) -> Representation:
    if "dim" not in p or "mu" not in p or "rho" not in p:
        raise StructureError(f"{where} needs dim, mu, rho")
    mu = [_read_matrix(m, f"{where} mu[{i}]") for i, m in enumerate(p["mu"])]
    rho = [_read_matrix(m, f"{where} rho[{i}]") for i, m in enumerate(p["rho"])]
    return Representation(p["dim"], mu, rho)


def representation_payload(rep: Representation, algebra: Optional[PoissonAlgebra] = None) -> dict:
    out = {
        "dim": rep.dim,
        "mu": [matrix_payload(m) for m in rep.mu],
        "rho": [matrix_payload(m) for m in rep.rho],
    }
    if algebra is not None:
        out["algebra"] = algebra_payload(algebra)
    return out


def representation_of(doc: Document, algebra: Optional[PoissonAlgebra] = None,
                      strict: bool = True, warnings=None):
    """Returns (algebra_or_None, representation); embedded algebra preferred."""
    if doc.kind != "representation":
        raise StructureError(f"expected a representation document, got {doc.kind}")
    p = doc.payload
    _check_fields(p, {"dim", "mu", "rho", "algebra"}, "representation payload", strict, warnings)
    embedded = None
    if "algebra" in p:
        embedded = _algebra_from_payload(p["algebra"], strict, warnings)
    if algebra is not None and embedded is not None and algebra != embedded:
        raise StructureError("representation's embedded algebra differs from the given one")
    return embedded if embedded is not None else algebra, _rep_from_fields(p, "representation")


def representation_document(rep: Representation, algebra: Optional[PoissonAlgebra] = None) -> Document:
    return Document("representation", representation_payload(rep, algebra=algebra))


# -- extension ---------------------------------------------------------------------


def extension_payload(ext: AbelianExtension) -> dict:
    return {
        "total": algebra_payload(ext.total),
        "embed": matrix_payload(ext.embed),
        "project": matrix_payload(ext.project),
        "base": algebra_payload(ext.base),
        "fiber": representation_payload(ext.fiber),
    }


def extension_of(doc: Document, strict: bool = True, warnings=None) -> AbelianExtension:
    if doc.kind != "extension":
        raise StructureError(f"expected an extension document, got {doc.kind}")
    p = doc.payload
    _check_fields(p, {"total", "embed", "project", "base", "fiber"},
                  "extension payload", strict, warnings)
    for field in ("total", "embed", "project", "base", "fiber"):
        if field not in p:
            raise StructureError(f"extension payload needs {field}")
    total = _algebra_from_payload(p["total"], strict, warnings)
    base = _algebra_from_payload(p["base"], strict, warnings)
    fiber_fields = dict(p["fiber"])
    _check_fields(fiber_fields, {"dim", "mu", "rho"}, "extension fiber", strict, warnings)
    fiber = _rep_from_fields(fiber_fields, "extension fiber")
    return AbelianExtension(total, _read_matrix(p["embed"], "embed"),
                            _read_matrix(p["project"], "project"), base, fiber)


def extension_document(ext: AbelianExtension) -> Document:
    return Document("extension", extension_payload(ext))


# -- prototwilled ---------------------------------------------------------------------


_PT_TENSORS = ("dot1", "br1", "dot2", "br2", "h", "bigH", "theta", "bigTheta")
_PT_ACTIONS = ("mu", "rho", "nu", "psi")


def prototwilled_payload(pt: ProtoTwilled) -> dict:
    out = {"dim1": pt.n1, "dim2": pt.n2}
    out["dot1"] = _tensor_out(pt.dot1)
    out["br1"] = _tensor_out(pt.br1)
    out["dot2"] = _tensor_out(pt.dot2)
    out["br2"] = _tensor_out(pt.br2)
    out["h"] = _tensor_out(pt.h)
    out["bigH"] = _tensor_out(pt.bigh)
    out["theta"] = _tensor_out(pt.theta)
    out["bigTheta"] = _tensor_out(pt.bigtheta)
    out["mu"] = [matrix_payload(m) for m in pt.mu]
    out["rho"] = [matrix_payload(m) for m in pt.rho]
    out["nu"] = [matrix_payload(m) for m in pt.nu]
    out["psi"] = [matrix_payload(m) for m in pt.psi]
    return out


def prototwilled_of(doc: Document, strict: bool = True, warnings=None) -> ProtoTwilled:
    if doc.kind != "prototwilled":
        raise StructureError(f"expected a prototwilled document, got {doc.kind}")
    p = doc.payload
    allowed = {"dim1", "dim2", *_PT_TENSORS, *_PT_ACTIONS}
    _check_fields(p, allowed, "prototwilled payload", strict, warnings)
    if "dim1" not in p or "dim2" not in p:
        raise StructureError("prototwilled payload needs dim1 and dim2")
    kwargs = {}
    for name in _PT_TENSORS:
        if name in p:
            key = {"bigH": "bigh", "bigTheta": "bigtheta"}.get(name, name)
            kwargs[key] = _read_tensor(p[name], name)
    for name in _PT_ACTIONS:
        if name in p:
            kwargs[name] = [_read_matrix(m, f"{name}[{i}]") for i, m in enumerate(p[name])]
    from .prototwilled import assemble
    return assemble(p["dim1"], p["dim2"], **kwargs)


def prototwilled_document(pt: ProtoTwilled) -> Document:
    return Document("prototwilled", prototwilled_payload(pt))


# -- operator specs ---------------------------------------------------------------------


def operator_spec_payload(spec: OperatorSpec) -> dict:
    out = {"operator": spec.kind}
    if spec.kind == "poisson-hom":
        out["source"] = algebra_payload(spec.source)
        out["target"] = algebra_payload(spec.target)
    elif spec.kind in ("poisson-derivation", "rb-weight0", "twisted-rb"):
        out["algebra"] = algebra_payload(spec.algebra)
        out["rep"] = representation_payload(spec.rep)
        if spec.kind == "twisted-rb":
            h, H = spec.cocycle
            out["cocycle"] = {"h": _tensor_out(h), "H": _tensor_out(H)}
    elif spec.kind in ("rb-weight1", "crossed-hom"):
        act = spec.action
        out["acting"] = algebra_payload(act.acting)
        out["acted"] = algebra_payload(act.acted)
        out["mu"] = [matrix_payload(m) for m in act.mu]
        out["rho"] = [matrix_payload(m) for m in act.rho]
    else:
        out["algebra"] = algebra_payload(spec.algebra)
    return out


def operator_spec_of(doc: Document, strict: bool = True, warnings=None) -> OperatorSpec:
    if doc.kind != "operator-spec":
        raise StructureError(f"expected an operator-spec document, got {doc.kind}")
    p = doc.payload
    kind = p.get("operator")
    if kind == "poisson-hom":
        _check_fields(p, {"operator", "source", "target"}, "operator-spec", strict, warnings)
        return OperatorSpec(kind,
                            source=_algebra_from_payload(p["source"], strict, warnings),
                            target=_algebra_from_payload(p["target"], strict, warnings))
    if kind in ("poisson-derivation", "rb-weight0", "twisted-rb"):
        allowed = {"operator", "algebra", "rep"}
        if kind == "twisted-rb":
            allowed.add("cocycle")
        _check_fields(p, allowed, "operator-spec", strict, warnings)
        alg = _algebra_from_payload(p["algebra"], strict, warnings)
        rep = _rep_from_fields(p["rep"], "operator rep")
        if kind == "twisted-rb":
            coc = p.get("cocycle")
            if not isinstance(coc, dict):
                raise StructureError("twisted-rb needs a cocycle object")
            pair = (_read_tensor(coc.get("h"), "cocycle h"), _read_tensor(coc.get("H"), "cocycle H"))
            return OperatorSpec(kind, algebra=alg, rep=rep, cocycle=pair)
        return OperatorSpec(kind, algebra=alg, rep=rep)
    if kind in ("rb-weight1", "crossed-hom"):
        _check_fields(p, {"operator", "acting", "acted", "mu", "rho"}, "operator-spec",
                      strict, warnings)
        acting = _algebra_from_payload(p["acting"], strict, warnings)
        acted = _algebra_from_payload(p["acted"], strict, warnings)
        mu = [_read_matrix(m, f"mu[{i}]") for i, m in enumerate(p["mu"])]
        rho = [_read_matrix(m, f"rho[{i}]") for i, m in enumerate(p["rho"])]
        return OperatorSpec(kind, action=ActionData(acting, acted, mu, rho))
    if kind in ("reynolds", "modified-rb"):
        _check_fields(p, {"operator", "algebra"}, "operator-spec", strict, warnings)
        return OperatorSpec(kind, algebra=_algebra_from_payload(p["algebra"], strict, warnings))
    raise StructureError(f"unknown operator kind {kind!r}")


def operator_spec_document(spec: OperatorSpec) -> Document:
    return Document("operator-spec", operator_spec_payload(spec))


# -- misc document builders ---------------------------------------------------------


def map_document(matrices: Optional[dict] = None, tensors: Optional[dict] = None,
                 map_kind: Optional[str] = None) -> Document:
    payload = {}
    if matrices:
        payload["matrices"] = {name: matrix_payload(m) for name, m in sorted(matrices.items())}
    if tensors:
        payload["tensors"] = {name: _tensor_out(t) for name, t in sorted(tensors.items())}
    if map_kind is not None:
        payload["mapKind"] = map_kind
    return Document("map", payload)


def map_matrices(doc: Document) -> dict:
    if doc.kind != "map":
        raise StructureError(f"expected a map document, got {doc.kind}")
    out = {}
    for name, m in doc.payload.get("matrices", {}).items():
        out[name] = _read_matrix(m, f"matrix {name}")
    return out


def map_tensors(doc: Document) -> dict:
    if doc.kind != "map":
        raise StructureError(f"expected a map document, got {doc.kind}")
    return {name: _read_tensor(t, f"tensor {name}")
            for name, t in doc.payload.get("tensors", {}).items()}


def cochain_pair_document(h, H) -> Document:
    return Document("cochain-pair", {"h": _tensor_out(h), "H": _tensor_out(H)})


def cochain_pair_of(doc: Document):
    if doc.kind != "cochain-pair":
        raise StructureError(f"expected a cochain-pair document, got {doc.kind}")
    return (_read_tensor(doc.payload["h"], "h"), _read_tensor(doc.payload["H"], "H"))


def deformation_document(terms) -> Document:
    return Document("deformation", {
        "order": len(terms) - 1,
        "terms": [matrix_payload(t) for t in terms],
    })


def deformation_terms(doc: Document):
    if doc.kind != "deformation":
        raise StructureError(f"expected a deformation document, got {doc.kind}")
    return [_read_matrix(t, f"term {i}") for i, t in enumerate(doc.payload["terms"])]
