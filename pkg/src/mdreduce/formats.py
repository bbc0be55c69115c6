"""JSON instance documents: canonical encoding, schema and semantic validation.

Every document is ``{"schema_version": 1, "kind": ..., "payload": ...}``.
Rationals are ``{"num", "den"}`` pairs in lowest terms and item sets are
sorted index arrays, so equal objects always serialize to identical bytes.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Any

import jsonschema

from ._config import check_cap, enum_cap
from .errors import DocumentError, EnumerationCapExceeded, MDReduceError
from .games import GameTranscript
from .itemsets import from_mask, members, to_mask
from .matroids import ExplicitIndependent, Matroid, Partition, Truncated, Uniform, verify_axioms
from .reduction import IT, CompatibilityWitness, ReductionReport, SADPInstance, build_IT, build_VT
from .solvers import Menu, MenuEntry
from .transforms import DisjointUnion, ItemTruncated, Restriction, Scaled, ValueTruncated
from .valuations import (
    OXS,
    Additive,
    CDemand,
    ExplicitTable,
    MatroidBased,
    PointPerturbed,
    SatPerturbed,
    TypeDistribution,
    Valuation,
)

SCHEMA_VERSION = 1
KINDS = ("valuation", "odp-instance", "distribution", "sadp-instance", "menu", "witness", "transcript", "reduction", "result")


@dataclass(frozen=True)
class ODPInstance:
    v: Valuation
    w: Valuation


@dataclass(frozen=True)
class ReductionBundle:
    instance: SADPInstance
    witness: CompatibilityWitness | None
    report: ReductionReport


@dataclass(frozen=True)
class Document:
    kind: str
    payload: Any


# -- encoding ---------------------------------------------------------------------


def _frac(x) -> dict:
    x = Fraction(x)
    return {"num": x.numerator, "den": x.denominator}


def _set(s) -> list[int]:
    return list(members(s))


def encode_matroid(mat: Matroid) -> dict:
    if isinstance(mat, ExplicitIndependent):
        fam = sorted((_set(s) for s in mat.independent), key=lambda t: (len(t), t))
        return {"type": "explicit", "ground_size": mat.ground_size, "independent": fam}
    if isinstance(mat, Uniform):
        return {"type": "uniform", "ground_size": mat.ground_size, "rank": mat.rank_cap}
    if isinstance(mat, Partition):
        return {"type": "partition", "ground_size": mat.ground_size, "blocks": [_set(b) for b in mat.blocks], "caps": list(mat.caps)}
    if isinstance(mat, Truncated):
        return {"type": "truncated", "y": mat.y, "inner": encode_matroid(mat.inner)}
    raise TypeError(f"cannot serialize matroid of type {type(mat).__name__}")


def encode_valuation(v: Valuation) -> dict:
    if isinstance(v, ExplicitTable):
        rows = sorted(((_set(s), x) for s, x in v.table.items()), key=lambda r: (len(r[0]), r[0]))
        return {"class": "explicit", "ground_size": v.ground_size, "table": [{"set": s, "value": x} for s, x in rows]}
    if isinstance(v, Additive):
        return {"class": "additive", "weights": list(v.weights)}
    if isinstance(v, CDemand):
        return {"class": "c-demand", "c": v.c, "weights": list(v.weights)}
    if isinstance(v, OXS):
        return {"class": "oxs", "weights": [list(r) for r in v.weights], "right_size": v.right_size}
    if isinstance(v, MatroidBased):
        return {"class": "matroid-based", "matroid": encode_matroid(v.matroid), "weights": list(v.weights)}
    if isinstance(v, SatPerturbed):
        return {"class": "sat-perturbed", "base": encode_valuation(v.base), "cnf": [list(c) for c in v.cnf], "num_vars": v.num_vars}
    if isinstance(v, PointPerturbed):
        return {"class": "point-perturbed", "base": encode_valuation(v.base), "at": _set(v.at)}
    if isinstance(v, Scaled):
        return {"class": "scaled", "factor": v.factor, "inner": encode_valuation(v.inner)}
    if isinstance(v, DisjointUnion):
        return {"class": "disjoint-union", "parts": [encode_valuation(p) for p in v.parts]}
    if isinstance(v, ItemTruncated):
        return {"class": "item-truncated", "y": v.y, "inner": encode_valuation(v.inner)}
    if isinstance(v, ValueTruncated):
        return {"class": "value-truncated", "x": v.x, "inner": encode_valuation(v.inner)}
    if isinstance(v, Restriction):
        return {"class": "restriction", "items": list(v.items), "inner": encode_valuation(v.inner)}
    raise TypeError(f"cannot serialize valuation of type {type(v).__name__}")


def _encode_sadp(inst: SADPInstance) -> dict:
    return {
        "k": inst.k,
        "construction": inst.construction,
        "parameter": inst.parameter,
        "v": encode_valuation(inst.source_v),
        "w": encode_valuation(inst.source_w),
    }


def _encode_witness(wt: CompatibilityWitness) -> dict:
    return {"allocations": [_set(x) for x in wt.allocations], "multipliers": list(wt.multipliers), "C": wt.C, "C1": wt.C1}


def _encode_report(r: ReductionReport) -> dict:
    return {"balancedness": _frac(r.balancedness), "C": r.C, "gaps": list(r.gaps), "full_values": list(r.full_values)}


def _encode_free(x):
    """Generic encoder for result payloads."""
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, Fraction):
        return _frac(x)
    if isinstance(x, frozenset):
        return _set(x)
    if isinstance(x, dict):
        return {str(k): _encode_free(val) for k, val in x.items()}
    if isinstance(x, (list, tuple)):
        return [_encode_free(val) for val in x]
    if isinstance(x, float):
        return x
    raise TypeError(f"cannot serialize {type(x).__name__} in a result")


def encode_payload(kind: str, obj) -> Any:
    if kind == "valuation":
        return encode_valuation(obj)
    if kind == "odp-instance":
        return {"v": encode_valuation(obj.v), "w": encode_valuation(obj.w)}
    if kind == "distribution":
        return {"types": [{"valuation": encode_valuation(v), "prob": _frac(p)} for v, p in obj]}
    if kind == "sadp-instance":
        return _encode_sadp(obj)
    if kind == "menu":
        return {
            "entries": [
                {"lottery": [{"set": _set(s), "prob": _frac(p)} for s, p in e.lottery], "price": _frac(e.price)}
                for e in obj.entries
            ]
        }
    if kind == "witness":
        return _encode_witness(obj)
    if kind == "transcript":
        t: GameTranscript = obj
        return {
            "game": t.game,
            "algorithm": t.algorithm,
            "m": t.m,
            "x": t.x,
            "budget": t.budget,
            "trials": t.trials,
            "successes": t.successes,
            "query_counts": list(t.query_counts),
            "hidden_indices": list(t.hidden_indices),
            "seed": t.seed,
            "bound": None if t.bound is None else _frac(t.bound),
            "voided": list(t.voided),
        }
    if kind == "reduction":
        return {
            "instance": _encode_sadp(obj.instance),
            "witness": None if obj.witness is None else _encode_witness(obj.witness),
            "report": _encode_report(obj.report),
        }
    if kind == "result":
        return _encode_free(obj)
    raise ValueError(f"unknown document kind {kind!r}")


def save_document(doc: Document) -> bytes:
    """Canonical bytes: sorted keys, compact separators, trailing newline."""
    body = {"schema_version": SCHEMA_VERSION, "kind": doc.kind, "payload": encode_payload(doc.kind, doc.payload)}
    return (json.dumps(body, sort_keys=True, separators=(",", ":"), ensure_ascii=True) + "\n").encode("utf-8")


# -- decoding ---------------------------------------------------------------------


@lru_cache(maxsize=1)
def schema() -> dict:
    text = resources.files("mdreduce").joinpath("schemas/documents.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def _pointer(parts) -> str:
    return "/" + "/".join(str(p) for p in parts) if parts else "/"


def _unfrac(d: dict) -> Fraction:
    return Fraction(d["num"], d["den"])


def _fail(path: str, message: str):
    raise DocumentError(path, message, "semantic")


def decode_matroid(d: dict, path: str, cap: int | None = None) -> Matroid:
    t = d["type"]
    try:
        if t == "explicit":
            mat = ExplicitIndependent(d["ground_size"], d["independent"])
            if mat.ground_size <= enum_cap(cap):
                rep = verify_axioms(mat, cap)
                if not rep:
                    wit = [list(members(s)) for s in rep.witness]
                    _fail(path, f"matroid axiom {rep.axiom} fails at {wit}")
            return mat
        if t == "uniform":
            return Uniform(d["ground_size"], d["rank"])
        if t == "partition":
            return Partition(d["ground_size"], d["blocks"], d["caps"])
        return Truncated(d["y"], decode_matroid(d["inner"], path + "/inner", cap))
    except DocumentError:
        raise
    except (MDReduceError, ValueError, TypeError) as exc:
        _fail(path, str(exc))


def _check_explicit(v: ExplicitTable, path: str, cap: int | None) -> None:
    if v.table[frozenset()] != 0:
        _fail(path, "not normalized: v(empty set) is not 0")
    if v.ground_size > enum_cap(cap):
        return
    for mask in range(1, 1 << v.ground_size):
        s = from_mask(mask)
        for i in s:
            if v.table[s - {i}] > v.table[s]:
                _fail(path, f"not monotone: v({list(members(s - {i}))}) > v({list(members(s))})")


def decode_valuation(d: dict, path: str = "/payload", cap: int | None = None) -> Valuation:
    c = d["class"]
    try:
        if c == "explicit":
            m = d["ground_size"]
            table = {}
            for i, row in enumerate(d["table"]):
                s = frozenset(row["set"])
                if s in table:
                    _fail(f"{path}/table/{i}", f"duplicate entry for {sorted(s)}")
                if any(x >= m for x in s):
                    _fail(f"{path}/table/{i}", f"item outside ground of size {m}")
                table[s] = row["value"]
            v = ExplicitTable(m, table)
            _check_explicit(v, path, cap)
            return v
        if c == "additive":
            return Additive(d["weights"])
        if c == "c-demand":
            return CDemand(d["c"], d["weights"])
        if c == "oxs":
            return OXS(d["weights"], d["right_size"])
        if c == "matroid-based":
            return MatroidBased(decode_matroid(d["matroid"], path + "/matroid", cap), d["weights"])
        if c == "sat-perturbed":
            return SatPerturbed(decode_valuation(d["base"], path + "/base", cap), d["cnf"], d["num_vars"])
        if c == "point-perturbed":
            return PointPerturbed(decode_valuation(d["base"], path + "/base", cap), d["at"])
        if c == "scaled":
            return Scaled(d["factor"], decode_valuation(d["inner"], path + "/inner", cap))
        if c == "disjoint-union":
            return DisjointUnion([decode_valuation(p, f"{path}/parts/{i}", cap) for i, p in enumerate(d["parts"])])
        if c == "item-truncated":
            return ItemTruncated(d["y"], decode_valuation(d["inner"], path + "/inner", cap))
        if c == "value-truncated":
            return ValueTruncated(d["x"], decode_valuation(d["inner"], path + "/inner", cap))
        return Restriction(d["items"], decode_valuation(d["inner"], path + "/inner", cap))
    except DocumentError:
        raise
    except (MDReduceError, ValueError, TypeError, KeyError) as exc:
        _fail(path, str(exc))


def _decode_sadp(d: dict, path: str, cap) -> SADPInstance:
    v = decode_valuation(d["v"], path + "/v", cap)
    w = decode_valuation(d["w"], path + "/w", cap)
    if v.ground_size != w.ground_size:
        _fail(path, f"v has {v.ground_size} items but w has {w.ground_size}")
    inst = (build_IT if d["construction"] == IT else build_VT)(v, w, d["k"])
    if inst.parameter != d["parameter"]:
        _fail(path + "/parameter", f"truncation parameter {d['parameter']} does not match {inst.parameter}")
    return inst


def _decode_witness(d: dict) -> CompatibilityWitness:
    return CompatibilityWitness(tuple(frozenset(x) for x in d["allocations"]), tuple(d["multipliers"]), d["C"], d["C1"])


def _decode_free(x):
    if isinstance(x, dict):
        if set(x) == {"num", "den"}:
            return Fraction(x["num"], x["den"])
        return {k: _decode_free(val) for k, val in x.items()}
    if isinstance(x, list):
        return [_decode_free(val) for val in x]
    return x


def decode_payload(kind: str, p, cap: int | None = None):
    root = "/payload"
    if kind == "valuation":
        return decode_valuation(p, root, cap)
    if kind == "odp-instance":
        v = decode_valuation(p["v"], root + "/v", cap)
        w = decode_valuation(p["w"], root + "/w", cap)
        if v.ground_size != w.ground_size:
            _fail(root, f"v has {v.ground_size} items but w has {w.ground_size}")
        return ODPInstance(v, w)
    if kind == "distribution":
        types = p["types"]
        probs = [_unfrac(t["prob"]) for t in types]
        for i, q in enumerate(probs):
            if q <= 0:
                _fail(f"{root}/types/{i}/prob", f"probability {q} is not positive")
        total = sum(probs)
        if total != 1:
            _fail(root + "/types", f"probabilities sum to {total}")
        vals = [decode_valuation(t["valuation"], f"{root}/types/{i}/valuation", cap) for i, t in enumerate(types)]
        try:
            return TypeDistribution(zip(vals, probs))
        except (MDReduceError, ValueError) as exc:
            _fail(root + "/types", str(exc))
    if kind == "sadp-instance":
        return _decode_sadp(p, root, cap)
    if kind == "menu":
        entries = []
        for i, e in enumerate(p["entries"]):
            lot = [(row["set"], _unfrac(row["prob"])) for row in e["lottery"]]
            if any(q < 0 for _, q in lot):
                _fail(f"{root}/entries/{i}/lottery", "negative lottery probability")
            total = sum((q for _, q in lot), Fraction(0))
            if total != 1:
                _fail(f"{root}/entries/{i}/lottery", f"lottery probabilities sum to {total}")
            price = _unfrac(e["price"])
            if price < 0:
                _fail(f"{root}/entries/{i}/price", "negative price")
            entries.append(MenuEntry(lot, price))
        return Menu(entries)
    if kind == "witness":
        return _decode_witness(p)
    if kind == "transcript":
        if p["successes"] > p["trials"]:
            _fail(root + "/successes", "more successes than trials")
        if len(p["query_counts"]) != p["trials"]:
            _fail(root + "/query_counts", "one query count per trial expected")
        if any(q > p["budget"] for q in p["query_counts"]):
            _fail(root + "/query_counts", "a query count exceeds the budget")
        bound = None if p["bound"] is None else _unfrac(p["bound"])
        return GameTranscript(
            p["game"], p["algorithm"], p["m"], p["x"], p["budget"], p["trials"], p["successes"],
            tuple(p["query_counts"]), tuple(p["hidden_indices"]), p["seed"], bound, tuple(p["voided"]),
        )
    if kind == "reduction":
        inst = _decode_sadp(p["instance"], root + "/instance", cap)
        wt = None if p["witness"] is None else _decode_witness(p["witness"])
        r = p["report"]
        rep = ReductionReport(_unfrac(r["balancedness"]), r["C"], tuple(r["gaps"]), tuple(r["full_values"]))
        return ReductionBundle(inst, wt, rep)
    return _decode_free(p)


def _specific(err):
    """Descend into the oneOf branch whose class/type tag matched, for a precise path."""
    while err.context:
        branches: dict = {}
        for sub in err.context:
            branches.setdefault(sub.relative_schema_path[0], []).append(sub)
        matched = [
            subs for subs in branches.values()
            if not any(e.validator == "const" and list(e.relative_path) in (["class"], ["type"]) for e in subs)
        ]
        if len(matched) != 1:
            break
        err = max(matched[0], key=lambda e: len(e.absolute_path))
    return err


def load_document(data: bytes | str, cap: int | None = None) -> Document:
    """Parse, schema-validate and semantically validate a document."""
    try:
        raw = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise DocumentError("/", str(exc), "parse") from None
    validator = jsonschema.Draft202012Validator(schema())
    errors = sorted(validator.iter_errors(raw), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errors:
        err = _specific(max(errors, key=lambda e: len(e.absolute_path)))
        raise DocumentError(_pointer(err.absolute_path), err.message, "schema")
    try:
        payload = decode_payload(raw["kind"], raw["payload"], cap)
    except EnumerationCapExceeded as exc:
        raise DocumentError("/payload", str(exc)) from None
    return Document(raw["kind"], payload)


def read_document(path: str, cap: int | None = None) -> Document:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise DocumentError("/", f"cannot read {path}: {exc.strerror}", "parse") from None
    return load_document(data, cap)


def write_document(path: str, doc: Document) -> None:
    """Write atomically: temp file in the target directory, then rename."""
    data = save_document(doc)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
