"""JSON instance files.

Schema::

    {
      "mode": "float" | "rational",
      "domain_upper": 1,
      "function": {"family": "power", "parameters": {"exponent": 3}},
      "certificate": {"coeffs": ["0", "0", "3"]},          # optional
      "instance": {
        "q": ["1/2", "1/2"],
        "blocks": [{"p": [...], "x": [...]}, ...],
        "r_blocks": [[...], ...]                           # optional
      }
    }

Rational-mode numbers are ``"num/den"`` or finite decimal strings (plain
JSON integers are accepted too); float-mode numbers are JSON numbers.
Function families and their ``parameters``:

* ``power``: ``{"exponent": p}``
* ``cube_log``: ``{}``
* ``polynomial``: ``{"coeffs": [c0, c1, ...]}``
* ``linear_combination``: ``{"terms": [{"scale": s, "function": {...}}, ...]}``
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Union

from .core import (
    Block,
    FunctionModel,
    GeneralInstance,
    Mode,
    PointVector,
    Polynomial,
    Scalar,
    ValidationError,
    Weights,
    cube_log,
    format_scalar,
    linear_combination,
    polynomial,
    power,
    to_scalar,
)


@dataclass(frozen=True)
class InstanceFile:
    mode: Mode
    function: FunctionModel
    certificate: Optional[Polynomial]
    instance: GeneralInstance

    @property
    def domain_upper(self) -> Scalar:
        return self.instance.domain_upper

    @property
    def effective_function(self) -> FunctionModel:
        """The function with the file's certificate, if any, replacing the built-in one."""
        if self.certificate is None:
            return self.function
        return self.function.with_certificate(self.certificate)


def _number(value: Any, mode: Mode, path: str) -> Scalar:
    if mode is Mode.RATIONAL and isinstance(value, float):
        raise ValidationError("rational mode expects \"num/den\" or decimal strings, not JSON floats", path)
    try:
        return to_scalar(value, mode)
    except ValidationError as exc:
        raise ValidationError(exc.message, path) from None


def _numbers(values: Any, mode: Mode, path: str) -> tuple:
    if not isinstance(values, list):
        raise ValidationError("expected a list of numbers", path)
    return tuple(_number(v, mode, f"{path}[{i}]") for i, v in enumerate(values))


def _weights(values: Any, mode: Mode, path: str) -> Weights:
    raw = _numbers(values, mode, path)
    try:
        return Weights(raw, mode)
    except ValidationError as exc:
        raise ValidationError(exc.message, path + exc.path) from None


def _points(values: Any, a: Scalar, mode: Mode, path: str) -> PointVector:
    raw = _numbers(values, mode, path)
    try:
        return PointVector(raw, a, mode)
    except ValidationError as exc:
        sub = exc.path[1:] if exc.path.startswith("x") else exc.path
        raise ValidationError(exc.message, path + sub) from None


def _literal(value: Any) -> Any:
    """Raw parameter literal: strings stay exact, numbers pass through."""
    if isinstance(value, str):
        return to_scalar(value, Mode.RATIONAL)
    return value


def function_from_dict(doc: Any, path: str = "function") -> FunctionModel:
    if not isinstance(doc, dict) or "family" not in doc:
        raise ValidationError("expected an object with a 'family' field", path)
    family = doc["family"]
    params = doc.get("parameters", {}) or {}
    try:
        if family == "power":
            if "exponent" not in params:
                raise ValidationError("missing exponent", "parameters.exponent")
            return power(_literal(params["exponent"]))
        if family == "cube_log":
            return cube_log()
        if family == "polynomial":
            coeffs = params.get("coeffs")
            if not isinstance(coeffs, list) or not coeffs:
                raise ValidationError("expected a nonempty coefficient list", "parameters.coeffs")
            return polynomial([_literal(c) for c in coeffs])
        if family == "linear_combination":
            terms = params.get("terms")
            if not isinstance(terms, list) or not terms:
                raise ValidationError("expected a nonempty term list", "parameters.terms")
            built = []
            for i, t in enumerate(terms):
                built.append((_literal(t.get("scale")),
                              function_from_dict(t.get("function"), f"{path}.parameters.terms[{i}].function")))
            return linear_combination(built)
    except ValidationError as exc:
        if exc.path.startswith(path):
            raise
        raise ValidationError(exc.message, f"{path}.{exc.path}" if exc.path else path) from None
    raise ValidationError(f"unknown family {family!r}", f"{path}.family")


def _raw_out(value: Any) -> Any:
    if isinstance(value, float):
        return value
    if isinstance(value, int):
        return value
    return format_scalar(value)


def function_to_dict(f: FunctionModel) -> Dict[str, Any]:
    if f.family == "power":
        return {"family": "power", "parameters": {"exponent": _raw_out(f.exponent)}}
    if f.family == "cube_log":
        return {"family": "cube_log", "parameters": {}}
    if f.family == "polynomial":
        return {"family": "polynomial", "parameters": {"coeffs": [_raw_out(c) for c in f.coeffs]}}
    return {"family": "linear_combination",
            "parameters": {"terms": [{"scale": _raw_out(s), "function": function_to_dict(g)}
                                     for s, g in f.terms]}}


def parse_instance_document(doc: Any) -> InstanceFile:
    if not isinstance(doc, dict):
        raise ValidationError("top level must be a JSON object")
    mode_raw = doc.get("mode", "float")
    try:
        mode = Mode(mode_raw)
    except ValueError:
        raise ValidationError(f"unknown mode {mode_raw!r}", "mode") from None
    a = _number(doc.get("domain_upper", 1), mode, "domain_upper")
    f = function_from_dict(doc.get("function"))
    cert = None
    if doc.get("certificate") is not None:
        coeffs = doc["certificate"].get("coeffs") if isinstance(doc["certificate"], dict) else None
        if not isinstance(coeffs, list) or not coeffs:
            raise ValidationError("expected a nonempty coefficient list", "certificate.coeffs")
        cert = Polynomial(_numbers(coeffs, mode, "certificate.coeffs"))
    body = doc.get("instance")
    if not isinstance(body, dict):
        raise ValidationError("missing instance object", "instance")
    blocks_raw = body.get("blocks")
    if not isinstance(blocks_raw, list) or not blocks_raw:
        raise ValidationError("expected a nonempty list of blocks", "instance.blocks")
    q = _weights(body.get("q", [1] if mode is Mode.RATIONAL else [1.0]), mode, "instance.q")
    blocks = []
    for i, b in enumerate(blocks_raw):
        bp = f"instance.blocks[{i}]"
        if not isinstance(b, dict):
            raise ValidationError("expected an object with p and x", bp)
        p = _weights(b.get("p"), mode, bp + ".p")
        x = _points(b.get("x"), a, mode, bp + ".x")
        try:
            blocks.append(Block(p, x))
        except ValidationError as exc:
            raise ValidationError(exc.message, bp) from None
    r_blocks = None
    if body.get("r_blocks") is not None:
        if not isinstance(body["r_blocks"], list):
            raise ValidationError("expected a list of weight vectors", "instance.r_blocks")
        r_blocks = tuple(_weights(r, mode, f"instance.r_blocks[{i}]") for i, r in enumerate(body["r_blocks"]))
    try:
        ginst = GeneralInstance(q, tuple(blocks), r_blocks)
    except ValidationError as exc:
        raise ValidationError(exc.message, "instance." + exc.path if exc.path else "instance") from None
    return InstanceFile(mode, f, cert, ginst)


def instance_document(f: FunctionModel, ginst: GeneralInstance,
                      certificate: Optional[Polynomial] = None) -> Dict[str, Any]:
    doc: Dict[str, Any] = {
        "mode": ginst.mode.value,
        "domain_upper": format_scalar(ginst.domain_upper),
        "function": function_to_dict(f),
    }
    if certificate is not None:
        mode = ginst.mode
        doc["certificate"] = {"coeffs": [format_scalar(to_scalar(c, mode)) for c in certificate.coeffs]}
    body: Dict[str, Any] = {
        "q": [format_scalar(v) for v in ginst.q],
        "blocks": [{"p": [format_scalar(v) for v in b.p], "x": [format_scalar(v) for v in b.x]}
                   for b in ginst.blocks],
    }
    if ginst.r_blocks is not None:
        body["r_blocks"] = [[format_scalar(v) for v in r] for r in ginst.r_blocks]
    doc["instance"] = body
    return doc


def load_instance_file(path: Union[str, Path]) -> InstanceFile:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON: {exc}") from None
    return parse_instance_document(doc)


def dump_instance_file(path: Union[str, Path], f: FunctionModel, ginst: GeneralInstance,
                       certificate: Optional[Polynomial] = None) -> None:
    Path(path).write_text(json.dumps(instance_document(f, ginst, certificate), indent=2) + "\n")
