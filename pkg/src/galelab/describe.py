"""JSON description documents for gales, sources, constructors and experiments.

Every ``describe()`` output in the package round-trips through the builders
here, except rules wrapping arbitrary callables.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

from . import core, diagonal, zoo
from .words import FileSource, PeriodicSource, RuleSource, Source, WordSource

SCHEMA_ID = "galelab.experiment/v1"


class SpecError(ValueError):
    """A description document that cannot be parsed or resolved."""


def _frac(x, what: str) -> Fraction:
    try:
        if isinstance(x, float):
            raise TypeError("floats are not exact")
        return Fraction(x)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise SpecError(f"{what}: expected an exact rational like '3/2', got {x!r}") from exc


def _need(doc: dict, key: str, where: str):
    if not isinstance(doc, dict):
        raise SpecError(f"{where}: expected an object, got {type(doc).__name__}")
    if key not in doc:
        raise SpecError(f"{where}: missing field {key!r}")
    return doc[key]


# --------------------------------------------------------------------------
# sources


def build_source(doc: dict) -> Source:
    kind = _need(doc, "kind", "source")
    try:
        if kind == "periodic":
            return PeriodicSource(_need(doc, "pattern", "source"), doc.get("head", ""))
        if kind == "word":
            return WordSource(_need(doc, "bits", "source"))
        if kind == "file":
            return FileSource(_need(doc, "path", "source"))
        if kind == "rule":
            params = {k: v for k, v in doc.items() if k not in ("kind", "rule")}
            return RuleSource(_need(doc, "rule", "source"), **params)
        if kind == "constructor":
            return diagonal.ConstructedSource(build_constructor(_need(doc, "constructor", "source")))
    except (KeyError, OSError) as exc:
        raise SpecError(f"source: {exc}") from exc
    except ValueError as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(f"source: {exc}") from exc
    raise SpecError(f"source: unknown kind {kind!r}")


# --------------------------------------------------------------------------
# gales


def _alphabet(params: dict) -> zoo.BlockAlphabet:
    return zoo.BlockAlphabet(int(_need(params, "l", "block params")), tuple(_need(params, "S", "block params")))


def _gale_builders() -> dict[str, Callable[[Fraction, str, dict], core.GaleRule]]:
    def table(q, kind, p):
        values = {w: _frac(v, f"table value at {w!r}") for w, v in _need(p, "values", "table params").items()}
        return core.TableRule(values, q, kind)

    def combine(q, kind, p):
        gales = [build_gale(g) for g in _need(p, "gales", "combine params")]
        return core.combine(gales, [_frac(a, "coefficient") for a in _need(p, "coeffs", "combine params")])

    def cover_sum(q, kind, p):
        covers = [g["params"]["cover"] for g in _need(p, "gales", "cover_sum params")]
        return zoo.cover_sum_gale(q, covers)

    return {
        "trivial": lambda q, kind, p: zoo.trivial_gale(q),
        "singleton": lambda q, kind, p: zoo.singleton_gale(q, build_source(_need(p, "target", "singleton params"))),
        "cover": lambda q, kind, p: zoo.cover_gale(q, _need(p, "cover", "cover params")),
        "cover_sum": cover_sum,
        "frequency": lambda q, kind, p: zoo.frequency_gale(q, _frac(_need(p, "y", "frequency params"), "y")),
        "block": lambda q, kind, p: zoo.block_gale(q, _alphabet(p)),
        "circuit": lambda q, kind, p: zoo.circuit_gale(q, {int(n): int(t) for n, t in _need(p, "budget", "circuit params").items()}),
        "table": table,
        "combine": combine,
        "dilate": lambda q, kind, p: core.dilate(build_gale(_need(p, "base", "dilate params")), q),
        "supergale_to_gale": lambda q, kind, p: core.supergale_to_gale(build_gale(_need(p, "base", "conversion params"))),
    }


def build_gale(doc: dict) -> core.GaleRule:
    rule = _need(doc, "rule", "gale")
    q = _frac(_need(doc, "q", "gale"), "gale q")
    kind = doc.get("kind", core.GALE)
    params = doc.get("params", {})
    builders = _gale_builders()
    if rule not in builders:
        raise SpecError(f"gale: unknown or non-serializable rule {rule!r}")
    try:
        return builders[rule](q, kind, params)
    except SpecError:
        raise
    except (ValueError, KeyError, TypeError) as exc:
        raise SpecError(f"gale {rule!r}: {exc}") from exc


def build_family(doc: dict) -> Callable[[Fraction], core.GaleRule]:
    """A gale description without q, turned into q -> gale."""
    _need(doc, "rule", "family")
    if "q" in doc:
        raise SpecError("family: leave q out; the estimator chooses it")
    # resolve once to surface errors early
    build_gale({**doc, "q": "2"})
    return lambda q: build_gale({**doc, "q": core.fmt_q(Fraction(q))})


# --------------------------------------------------------------------------
# constructors


def build_constructor(doc: dict) -> diagonal.Constructor:
    cid = _need(doc, "constructor", "constructor")
    d = build_gale(_need(doc, "gale", "constructor"))
    p = doc.get("params", {})
    try:
        if cid == "min_branch":
            return diagonal.min_branch_constructor(d)
        if cid == "block":
            return diagonal.block_constructor(d, _alphabet(p))
        if cid == "frequency":
            eps = p.get("epsilon")
            plan = diagonal.FrequencyPlan(
                _frac(_need(p, "alpha", "frequency plan"), "alpha"),
                int(_need(p, "c", "frequency plan")),
                None if eps is None else _frac(eps, "epsilon"),
                p.get("mode", diagonal.DESK),
            )
            return diagonal.frequency_constructor(d, plan)
        if cid == "circuit":
            return diagonal.circuit_constructor(d, _frac(_need(p, "alpha", "circuit params"), "alpha"), int(_need(p, "n_max", "circuit params")))
    except SpecError:
        raise
    except (ValueError, KeyError, TypeError) as exc:
        raise SpecError(f"constructor {cid!r}: {exc}") from exc
    raise SpecError(f"constructor: unknown kind {cid!r}")


# --------------------------------------------------------------------------
# experiment documents


@dataclass
class ExperimentSpec:
    schema: str
    gale: dict | None = None
    family: dict | None = None
    sources: list[dict] = field(default_factory=list)
    constructor: dict | None = None
    probe: dict = field(default_factory=dict)
    circuits: dict | None = None
    output: dict = field(default_factory=dict)

    def to_json(self) -> str:
        doc: dict[str, Any] = {"schema": self.schema}
        for key in ("gale", "family", "constructor", "circuits"):
            if getattr(self, key) is not None:
                doc[key] = getattr(self, key)
        if self.sources:
            doc["sources"] = self.sources
        if self.probe:
            doc["probe"] = self.probe
        if self.output:
            doc["output"] = self.output
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


KNOWN_KEYS = {"schema", "gale", "family", "source", "sources", "constructor", "probe", "circuits", "output"}


def parse_spec(doc: Any) -> ExperimentSpec:
    if not isinstance(doc, dict):
        raise SpecError("experiment document must be a JSON object")
    schema = doc.get("schema")
    if schema != SCHEMA_ID:
        raise SpecError(f"unsupported schema {schema!r}; expected {SCHEMA_ID!r}")
    extra = set(doc) - KNOWN_KEYS
    if extra:
        raise SpecError(f"unknown top-level fields: {sorted(extra)}")
    sources = list(doc.get("sources", []))
    if "source" in doc:
        sources.insert(0, doc["source"])
    spec = ExperimentSpec(
        schema,
        doc.get("gale"),
        doc.get("family"),
        sources,
        doc.get("constructor"),
        dict(doc.get("probe", {})),
        doc.get("circuits"),
        dict(doc.get("output", {})),
    )
    # resolve every reference once so errors surface at parse time
    if spec.gale is not None:
        build_gale(spec.gale)
    if spec.family is not None:
        build_family(spec.family)
    for s in spec.sources:
        if s.get("kind") != "constructor":
            build_source(s)
    if spec.constructor is not None:
        build_constructor(spec.constructor)
    return spec


def load_spec(path: str | Path) -> ExperimentSpec:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecError(f"cannot read spec: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"spec is not valid JSON: {exc}") from exc
    return parse_spec(doc)


def dumps(description: dict) -> str:
    """Canonical JSON text for a description (stable key order)."""
    return json.dumps(description, sort_keys=True, separators=(",", ":"))


__all__ = [
    "SCHEMA_ID",
    "ExperimentSpec",
    "SpecError",
    "build_constructor",
    "build_family",
    "build_gale",
    "build_source",
    "dumps",
    "load_spec",
    "parse_spec",
]
