"""JSON algebra documents and deterministic report serialization."""

import json
import math
from importlib import resources

import jsonschema
import numpy as np

from . import algebra as ac
from . import hermitian as hm
from . import jalgebra as ja
from .errors import InvalidInput

SCHEMA_VERSION = "1.0"


def load_schema():
    text = resources.files("kahlerlab").joinpath("data/algebra_document.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def _plain(obj):
    if isinstance(obj, np.ndarray):
        return [_plain(x) for x in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, tuple):
        return [_plain(x) for x in obj]
    return obj


def dumps(obj, indent=2):
    """Deterministic JSON: insertion-ordered keys, floats with 17 significant digits, non-finite as null."""

    def enc(x, level):
        x = _plain(x)
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if x is None:
            return "null"
        if isinstance(x, bool):
            return "true" if x else "false"
        if isinstance(x, int):
            return str(x)
        if isinstance(x, float):
            if not math.isfinite(x):
                return "null"
            if x == 0.0:
                return "0.0"
            s = format(x, ".17g")
            if all(ch not in s for ch in ".en"):
                s += ".0"
            return s
        if isinstance(x, str):
            return json.dumps(x, ensure_ascii=False)
        if isinstance(x, dict):
            if not x:
                return "{}"
            items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {enc(v, level + 1)}" for k, v in x.items()]
            return "{\n" + ",\n".join(items) + "\n" + end + "}"
        if isinstance(x, list):
            if not x:
                return "[]"
            if all(not isinstance(v, (list, dict)) for v in x):
                return "[" + ", ".join(enc(v, level + 1) for v in x) + "]"
            return "[\n" + ",\n".join(pad + enc(v, level + 1) for v in x) + "\n" + end + "]"
        raise TypeError(f"cannot serialize {type(x).__name__}")

    return enc(obj, 0) + "\n"


def parse_document(text):
    """Parse and schema-check a document. Raises InvalidInput with a diagnostic."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    try:
        jsonschema.validate(doc, load_schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise InvalidInput(f"schema violation at {where}: {exc.message}") from None
    return doc


def brackets_from_triples(dim, triples):
    """Dense structure constants from sparse triples.

    A triple ``(i, j, k, c)`` sets ``c[i, j, k] = c`` and, unless the
    mirrored triple is also given, ``c[j, i, k] = -c``. Mirrored triples that
    disagree are kept as given, so the antisymmetry check reports them.
    """
    c = np.zeros((dim, dim, dim))
    given = {}
    for t in triples:
        i, j, k = (int(x) for x in t[:3])
        if max(i, j, k) >= dim:
            raise InvalidInput(f"bracket index out of range in {t}")
        if (i, j, k) in given and given[(i, j, k)] != float(t[3]):
            raise InvalidInput(f"duplicate bracket triple {t[:3]} with different coefficients")
        given[(i, j, k)] = float(t[3])
    for (i, j, k), v in given.items():
        c[i, j, k] = v
        if (j, i, k) not in given:
            c[j, i, k] = -v
    return c


def _matrix(doc, key, dim):
    a = np.array(doc[key], dtype=float)
    if a.shape != (dim, dim):
        raise InvalidInput(f"{key} must be {dim}x{dim}, got shape {a.shape}")
    return a


class LoadedDocument:
    """Parsed document: algebra plus either a metric (and optional J) or a j-algebra."""

    def __init__(self, doc):
        self.doc = doc
        dim = int(doc["dim"])
        labels = doc.get("basis_labels")
        if labels is not None and len(labels) != dim:
            raise InvalidInput("basis_labels length does not match dim")
        self.alg = ac.LieAlgebra(brackets_from_triples(dim, doc["brackets"]), labels)
        self.metadata = dict(doc.get("metadata", {}))
        self.metric = None
        self.jmat = None
        self.jalgebra = None
        if "metric" in doc:
            gram = _matrix(doc, "metric", dim)
            if not np.array_equal(gram, gram.T):
                raise InvalidInput("metric is not symmetric")
            self.metric = ac.Metric(gram)
            if "j" in doc:
                self.jmat = _matrix(doc, "j", dim)
        else:
            jm = _matrix(doc, "j", dim)
            om = np.array(doc["omega"], dtype=float)
            if om.shape != (dim,):
                raise InvalidInput(f"omega must have length {dim}")
            self.jmat = jm
            self.jalgebra = ja.JAlgebra(self.alg, jm, om, dict(self.metadata))

    def validation(self):
        reps = [ac.validate_algebra(self.alg)]
        if self.jalgebra is not None and reps[0].passed:
            reps.append(ja.validate_jalgebra(self.jalgebra))
        return reps

    def structure(self):
        """Kähler (or almost-Hermitian) structure, or ``None`` when no J is given."""
        if self.jmat is None:
            return None
        g = self.jalgebra.metric if self.jalgebra is not None else self.metric
        return hm.Structure(self.alg, g, self.jmat, "kahler")

    def geometry_metric(self):
        return self.jalgebra.metric if self.jalgebra is not None else self.metric


def load_document(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc.strerror}") from None
    return LoadedDocument(parse_document(text))


def _triples(alg):
    out = []
    c = alg.brackets
    m = alg.dim
    for i in range(m):
        for j in range(i + 1, m):
            for k in range(m):
                if c[i, j, k] != 0.0:
                    out.append([i, j, k, float(c[i, j, k])])
    return out


def context_document(ctx):
    """AlgebraDocument for a catalog context; j-algebra examples are exported as ``(j, omega)``."""
    meta = {"example": ctx.name, "params": dict(ctx.params), "jbar_source": ctx.jbar_source, "deform_t": ctx.deform_t}
    if ctx.jalgebra is not None and np.array_equal(ctx.jalgebra.metric.gram, ctx.metric.gram):
        geometry = {"j": ctx.jalgebra.jmat, "omega": ctx.jalgebra.omega}
    else:
        geometry = {"metric": ctx.metric.gram, "j": ctx.jmat}
    doc = {
        "schema_version": SCHEMA_VERSION,
        "dim": ctx.alg.dim,
        "basis_labels": list(ctx.alg.basis_labels),
        "brackets": _triples(ctx.alg),
    }
    doc.update(geometry)
    doc["metadata"] = meta
    return doc
