"""JSON documents holding a colligation.

Layout (format version 1)::

    {
      "format_version": 1,
      "kind": "polydisc",              # or "ball"
      "a": [re, im],
      "B": [[[re, im], ...]],          # 1 x N
      "C": [[[re, im]], ...],          # N x 1   (n*d x 1 for a ball)
      "D": [[[re, im], ...], ...],     # N x N   (n*d x d for a ball)
      "partition": [d_1, ..., d_n],    # [d] for a ball
      "variables": n,                  # ball only
      "split": [[m_1, n_1], ...],      # optional; [[d1, d2]] for a ball
      "metadata": {"key": "value"}
    }

Floats are written with Python's shortest round-trip ``repr`` so that
parse -> serialize -> parse is bit-exact.
"""

import json
import math

import numpy as np

from .ball import BallColligation
from .colligation import Colligation, SpacePartition
from .errors import ColliqError, ParseError, SchemaError

__all__ = ["FORMAT_VERSION", "parse_document", "serialize_document",
           "load_document", "save_document", "document_metadata"]

FORMAT_VERSION = 1


def _pair(z):
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _matrix(arr):
    return [[_pair(x) for x in row] for row in np.asarray(arr)]


def serialize_document(obj, metadata=None):
    """Render a :class:`Colligation` or :class:`BallColligation` as JSON text."""
    doc = {"format_version": FORMAT_VERSION}
    if isinstance(obj, Colligation):
        doc["kind"] = "polydisc"
    elif isinstance(obj, BallColligation):
        doc["kind"] = "ball"
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
    doc["a"] = _pair(obj.a)
    doc["B"] = _matrix(obj.B)
    doc["C"] = _matrix(obj.C)
    doc["D"] = _matrix(obj.D)
    if isinstance(obj, Colligation):
        doc["partition"] = list(obj.partition.dims)
        split = obj.partition.split
        doc["split"] = None if split is None else [list(p) for p in split]
    else:
        doc["partition"] = [obj.d]
        doc["variables"] = obj.n
        doc["split"] = None if obj.split is None else [list(obj.split)]
    doc["metadata"] = {str(k): str(v) for k, v in (metadata or {}).items()}
    return json.dumps(doc, indent=1) + "\n"


def _complex(value, path):
    if (not isinstance(value, list) or len(value) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool)
                       for x in value)):
        raise SchemaError("expected a [re, im] pair of numbers", path)
    if not all(math.isfinite(x) for x in value):
        raise SchemaError("non-finite number", path)
    return complex(value[0], value[1])


def _read_matrix(doc, name, rows, cols):
    value = doc.get(name)
    if not isinstance(value, list):
        raise SchemaError("missing or not a list", name)
    if len(value) != rows:
        raise SchemaError(f"expected {rows} rows, found {len(value)}", name)
    out = np.zeros((rows, cols), dtype=np.complex128)
    for i, row in enumerate(value):
        if not isinstance(row, list):
            raise SchemaError("row is not a list", f"{name}[{i}]")
        if len(row) != cols:
            raise SchemaError(f"expected {cols} entries, found {len(row)}",
                              f"{name}[{i}]")
        for j, entry in enumerate(row):
            out[i, j] = _complex(entry, f"{name}[{i}][{j}]")
    return out


def _read_int_list(doc, name, optional=False):
    value = doc.get(name)
    if value is None and optional:
        return None
    if not isinstance(value, list) or not all(
            isinstance(x, int) and not isinstance(x, bool) and x >= 0 for x in value):
        raise SchemaError("expected a list of non-negative integers", name)
    return value


def _read_split(doc):
    value = doc.get("split")
    if value is None:
        return None
    if not isinstance(value, list):
        raise SchemaError("expected a list of [m, n] pairs", "split")
    pairs = []
    for k, pair in enumerate(value):
        if (not isinstance(pair, list) or len(pair) != 2 or not all(
                isinstance(x, int) and not isinstance(x, bool) and x >= 0 for x in pair)):
            raise SchemaError("expected a pair of non-negative integers", f"split[{k}]")
        pairs.append(tuple(pair))
    return tuple(pairs)


def parse_document(text):
    """Parse JSON text (``str`` or UTF-8 ``bytes``) into a colligation.

    Raises
    ------
    ParseError
        If the text is not valid UTF-8 JSON; carries line and column.
    SchemaError
        If the document has missing fields or inconsistent shapes; the
        message starts with the path of the offending field.
    """
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"document is not UTF-8: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from exc
    if not isinstance(doc, dict):
        raise SchemaError("top level must be an object")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise SchemaError(f"unsupported version {version!r}", "format_version")
    kind = doc.get("kind")
    if kind not in ("polydisc", "ball"):
        raise SchemaError("expected 'polydisc' or 'ball'", "kind")
    meta = doc.get("metadata", {})
    if not isinstance(meta, dict) or not all(
            isinstance(k, str) and isinstance(v, str) for k, v in meta.items()):
        raise SchemaError("expected a map of strings", "metadata")
    a = _complex(doc.get("a"), "a")
    dims = _read_int_list(doc, "partition")
    split = _read_split(doc)
    try:
        if kind == "polydisc":
            if not dims:
                raise SchemaError("needs at least one block", "partition")
            partition = SpacePartition(tuple(dims), split)
            N = partition.total
            B = _read_matrix(doc, "B", 1, N)
            C = _read_matrix(doc, "C", N, 1)
            D = _read_matrix(doc, "D", N, N)
            return Colligation(a, B, C, D, partition)
        if len(dims) != 1:
            raise SchemaError("a ball document has a single block [d]", "partition")
        d = dims[0]
        n = doc.get("variables")
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise SchemaError("expected a positive integer", "variables")
        if split is not None and len(split) != 1:
            raise SchemaError("a ball split is a single [d1, d2] pair", "split")
        B = _read_matrix(doc, "B", 1, d)
        C = _read_matrix(doc, "C", n * d, 1)
        D = _read_matrix(doc, "D", n * d, d)
        return BallColligation(a, B, C, D, n, None if split is None else split[0])
    except SchemaError:
        raise
    except (ColliqError, ValueError) as exc:
        raise SchemaError(str(exc), "split" if split is not None else "partition") from exc


def document_metadata(text):
    """The metadata map of a document, without validating the rest."""
    try:
        doc = json.loads(text)
    except (json.JSONDecodeError, TypeError):
        return {}
    return doc.get("metadata", {}) if isinstance(doc, dict) else {}


def load_document(path):
    with open(path, "rb") as fh:
        return parse_document(fh.read())


def save_document(path, obj, metadata=None):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_document(obj, metadata))
