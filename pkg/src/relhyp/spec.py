"""Group and subgroup spec files (JSON) and their validation."""

from __future__ import annotations

import json
import warnings
from pathlib import Path

from .algebra import Factor, FreeProductGroup, GeneratorSymbol, Group
from .errors import SpecError
from .presented import PresentedGroup


def _factor(raw, backend):
    fid = raw["id"]
    kind = raw.get("kind", "Z")
    kw = dict(
        peripheral=raw.get("peripheral", True),
        names=dict(raw.get("names", {})),
    )
    if backend == "presented" and raw.get("embedding") is not None:
        emb = raw["embedding"]
        kw["embedding"] = emb if isinstance(emb, str) else ".".join(emb)
    if kind == "Z":
        return Factor.integers(fid, **kw)
    if kind == "cyclic":
        return Factor.cyclic(fid, int(raw["order"]), **kw)
    if kind == "table":
        return Factor.from_table(fid, raw["table"], **kw)
    raise SpecError(f"factor {fid}: unknown kind {kind!r}")


def validate_spec(raw):
    """Build a group from a parsed spec dictionary.

    >>> g = validate_spec({"factors": [{"id": "A", "kind": "cyclic", "order": 2},
    ...                                {"id": "B", "kind": "cyclic", "order": 3}]})
    >>> sorted(g.factors), g.omega
    (['A', 'B'], [])
    """
    if not isinstance(raw, dict):
        raise SpecError("group spec must be a JSON object")
    backend = raw.get("backend", "free_product")
    gens = []
    for g in raw.get("generators", []):
        if isinstance(g, str):
            gens.append(GeneratorSymbol(g, g.upper() if g.upper() != g else g.lower()))
        elif isinstance(g, dict):
            gens.append(GeneratorSymbol(g["name"], g.get("inverse", g["name"])))
        else:
            gens.append(GeneratorSymbol(g[0], g[1]))
    factors = [_factor(f, backend) for f in raw.get("factors", [])]
    if backend == "free_product":
        if raw.get("relators"):
            raise SpecError("free-product backend takes no relators")
        values = {k: (v if isinstance(v, str) else ".".join(v)) for k, v in raw.get("embeddings", {}).items()}
        group = FreeProductGroup(factors, gens, values)
        group.omega = []
        return group
    if backend == "presented":
        for f in raw.get("factors", []):
            if "kind" not in f:
                raise SpecError(f"factor {f.get('id')}: presented factors need an explicit kind")
        parser = Group(factors, gens)
        rels = [parser.parse_word(r if isinstance(r, str) else ".".join(r)) for r in raw.get("relators", [])]
        group = PresentedGroup(factors, gens, rels, auto_close=True)
        if group.closure_added:
            warnings.warn("relators were closed under inversion and cyclic shifts", stacklevel=2)
        return group
    raise SpecError(f"unknown backend {backend!r}")


def load_group(source):
    """Load a group from a path, a JSON string or a dictionary."""
    if isinstance(source, dict):
        return validate_spec(source)
    text = Path(source).read_text(encoding="utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecError(f"{source}: line {e.lineno} column {e.colno}: {e.msg}") from None
    return validate_spec(raw)


def load_subgroup(group, source):
    """Return ``(generators, Y)`` as group elements."""
    if isinstance(source, (dict, list)):
        raw = source
    else:
        text = Path(source).read_text(encoding="utf-8")
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as e:
            raise SpecError(f"{source}: line {e.lineno} column {e.colno}: {e.msg}") from None
    if isinstance(raw, list):
        raw = {"generators": raw}
    gens = [group.parse_element(w) for w in raw.get("generators", [])]
    ys = raw.get("Y")
    Y = None if ys is None else [group.parse_element(w) for w in ys]
    return gens, Y
