"""Dataset manifest: JSON description of database objects and queries.

Layout (field names are normative for the CLI):

  {
    "name": "toy",
    "objects": [
      {"object_id": "obj1", "category": "mug", "views": ["a.png", "b.png"]}
    ],
    "queries": [
      {"query_id": "q1", "category": "mug", "views": ["c.png"],
       "background": "clean"}
    ]
  }

Relative view paths resolve against the manifest file's directory.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ManifestError

BACKGROUNDS = ("clean", "cluttered")


@dataclass(frozen=True)
class ManifestObject:
    object_id: str
    category: str
    views: tuple[str, ...]


@dataclass(frozen=True)
class ManifestQuery:
    query_id: str
    category: str
    views: tuple[str, ...]
    background: str = "clean"


@dataclass
class Manifest:
    name: str
    objects: list[ManifestObject] = field(default_factory=list)
    queries: list[ManifestQuery] = field(default_factory=list)


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ManifestError(msg)


def _views(raw, owner: str, base: Path | None) -> tuple[str, ...]:
    _require(isinstance(raw, list) and len(raw) >= 1, f"{owner}: needs >= 1 view path")
    out = []
    for p in raw:
        _require(isinstance(p, str) and p, f"{owner}: view paths must be non-empty strings")
        path = Path(p)
        if base is not None and not path.is_absolute():
            path = base / path
        out.append(str(path))
    return tuple(out)


def parse_manifest(doc: dict, base: Path | None = None) -> Manifest:
    _require(isinstance(doc, dict), "manifest root must be an object")
    name = doc.get("name", "")
    _require(isinstance(name, str), "manifest 'name' must be a string")
    objects: list[ManifestObject] = []
    seen_obj: set[str] = set()
    for raw in doc.get("objects", []):
        _require(isinstance(raw, dict), "object entries must be objects")
        oid = raw.get("object_id")
        _require(isinstance(oid, str) and oid, "object entries need a non-empty object_id")
        _require(oid not in seen_obj, f"duplicate object_id {oid!r}")
        seen_obj.add(oid)
        category = raw.get("category", "")
        _require(isinstance(category, str), f"object {oid}: category must be a string")
        objects.append(
            ManifestObject(
                object_id=oid,
                category=category,
                views=_views(raw.get("views"), f"object {oid}", base),
            )
        )
    queries: list[ManifestQuery] = []
    seen_q: set[str] = set()
    for raw in doc.get("queries", []):
        _require(isinstance(raw, dict), "query entries must be objects")
        qid = raw.get("query_id")
        _require(isinstance(qid, str) and qid, "query entries need a non-empty query_id")
        _require(qid not in seen_q, f"duplicate query_id {qid!r}")
        seen_q.add(qid)
        category = raw.get("category", "")
        _require(isinstance(category, str), f"query {qid}: category must be a string")
        background = raw.get("background", "clean")
        _require(
            background in BACKGROUNDS,
            f"query {qid}: background must be one of {BACKGROUNDS}, got {background!r}",
        )
        queries.append(
            ManifestQuery(
                query_id=qid,
                category=category,
                views=_views(raw.get("views"), f"query {qid}", base),
                background=background,
            )
        )
    return Manifest(name=name, objects=objects, queries=queries)


def load_manifest(path: str | Path, check_files: bool = True) -> Manifest:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{path}: not valid JSON: {exc}") from exc
    m = parse_manifest(doc, base=path.parent)
    if check_files:
        for entry in [*m.objects, *m.queries]:
            for p in entry.views:
                if not Path(p).is_file():
                    raise FileNotFoundError(p)
    return m


def save_manifest(path: str | Path, m: Manifest) -> None:
    doc = {
        "name": m.name,
        "objects": [
            {"object_id": o.object_id, "category": o.category, "views": list(o.views)}
            for o in m.objects
        ],
        "queries": [
            {
                "query_id": q.query_id,
                "category": q.category,
                "views": list(q.views),
                "background": q.background,
            }
            for q in m.queries
        ],
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")
