"""Domain types, scalar modes, validation and enumeration helpers.

Every real quantity is either a Python ``float`` (float mode) or a
``fractions.Fraction`` (rational mode).  Containers fix their mode on
construction and refuse to mix the two.
"""
from __future__ import annotations

import enum
import hashlib
import itertools
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Iterator, Optional, Sequence, Tuple, Union

Scalar = Union[float, Fraction]

DEFAULT_CAP = 10**7
CAP_ENV_VAR = "TERZATIC_CAP"
FLOAT_SUM_TOL = 1e-12


class Mode(str, enum.Enum):
    FLOAT = "float"
    RATIONAL = "rational"


class TerzaticError(Exception):
    """Base class for all library errors."""


class ValidationError(TerzaticError, ValueError):
    """Invalid input.  ``path`` names the offending field when known."""

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message)
        self.message = message
        self.path = path

    def at(self, prefix: str) -> "ValidationError":
        path = f"{prefix}.{self.path}" if self.path and not self.path.startswith("[") else prefix + self.path
        return type(self)(self.message, path)


class DomainError(ValidationError):
    pass


class ModeError(ValidationError):
    pass


class ExactnessError(TerzaticError):
    """Raised when a computation cannot be carried out in exact arithmetic."""


class MissingCertificateError(TerzaticError):
    pass


class EnumerationCapError(TerzaticError):
    def __init__(self, count: int, cap: int):
        super().__init__(f"multi-index enumeration of {count} tuples exceeds cap {cap}")
        self.count = count
        self.cap = cap


# ---------------------------------------------------------------------------
# scalars


def parse_literal(text: str) -> Fraction:
    """Parse ``"num/den"``, an integer or a finite decimal string exactly."""
    s = text.strip()
    try:
        value = Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"not an exact rational literal: {text!r}") from exc
    return value


def format_scalar(value: Scalar) -> Union[str, float]:
    """JSON-friendly form: ``"num/den"`` for rationals, the float itself otherwise."""
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    return float(value)


def to_scalar(value: Any, mode: Mode) -> Scalar:
    if isinstance(value, bool):
        raise ValidationError(f"boolean is not a number: {value!r}")
    if isinstance(value, str):
        value = parse_literal(value)
    if mode is Mode.RATIONAL:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, int):
            return Fraction(value)
        if isinstance(value, float):
            if not math.isfinite(value):
                raise ValidationError(f"non-finite value {value!r}")
            return Fraction(value)
        raise ValidationError(f"unsupported scalar {value!r}")
    if isinstance(value, (int, float, Fraction)):
        out = float(value)
        if not math.isfinite(out):
            raise ValidationError(f"non-finite value {value!r}")
        return out
    raise ValidationError(f"unsupported scalar {value!r}")


def infer_mode(values: Iterable[Any]) -> Mode:
    """Float mode as soon as any float is present, rational otherwise."""
    for v in values:
        if isinstance(v, float):
            return Mode.FLOAT
    return Mode.RATIONAL


def scalar_mode(value: Scalar) -> Mode:
    return Mode.FLOAT if isinstance(value, float) else Mode.RATIONAL


def zero(mode: Mode) -> Scalar:
    return Fraction(0) if mode is Mode.RATIONAL else 0.0


def one(mode: Mode) -> Scalar:
    return Fraction(1) if mode is Mode.RATIONAL else 1.0


def msum(values: Iterable[Scalar], mode: Mode) -> Scalar:
    """Exact sum for rationals; correctly rounded ``math.fsum`` for floats."""
    if mode is Mode.RATIONAL:
        return sum(values, Fraction(0))
    return math.fsum(values)


def mprod(values: Iterable[Scalar], mode: Mode) -> Scalar:
    out = one(mode)
    for v in values:
        out = out * v
    return out


def _coerce_all(values: Sequence[Any], mode: Optional[Mode], path: str) -> Tuple[Tuple[Scalar, ...], Mode]:
    values = list(values)
    if mode is None:
        mode = infer_mode(values)
    out = []
    for i, v in enumerate(values):
        try:
            out.append(to_scalar(v, mode))
        except ValidationError as exc:
            raise ValidationError(exc.message, f"{path}[{i}]") from None
    return tuple(out), mode


def _check_homogeneous(mode: Mode, *others: Mode) -> None:
    for m in others:
        if m is not mode:
            raise ModeError(f"cannot mix {mode.value} and {m.value} values in one computation")


# ---------------------------------------------------------------------------
# weights, points, instances


@dataclass(frozen=True)
class Weights:
    """A probability vector with strictly positive entries.

    Entries must sum to 1 exactly (rational) or within ``1e-12`` (float).
    Use :func:`make_weights` to normalize raw positive values.
    """

    w: Tuple[Scalar, ...]
    mode: Optional[Mode] = None

    def __post_init__(self):
        values, mode = _coerce_all(self.w, self.mode, "w")
        if not values:
            raise ValidationError("weights must be nonempty")
        for i, v in enumerate(values):
            if v <= 0:
                raise ValidationError(f"weight {v} is not strictly positive", f"[{i}]")
        total = msum(values, mode)
        if mode is Mode.RATIONAL:
            if total != 1:
                raise ValidationError(f"weights sum to {total}, not 1")
        elif abs(total - 1.0) > FLOAT_SUM_TOL:
            raise ValidationError(f"weights sum to {total!r}, not 1 within {FLOAT_SUM_TOL}")
        object.__setattr__(self, "w", values)
        object.__setattr__(self, "mode", mode)

    def __len__(self) -> int:
        return len(self.w)

    def __iter__(self) -> Iterator[Scalar]:
        return iter(self.w)

    def __getitem__(self, i: int) -> Scalar:
        return self.w[i]


def make_weights(raw: Sequence[Any], mode: Optional[Mode] = None) -> Weights:
    """Normalize positive values onto the simplex.

    >>> make_weights([1, 3]).w
    (Fraction(1, 4), Fraction(3, 4))
    """
    values, mode = _coerce_all(raw, mode, "w")
    if not values:
        raise ValidationError("weights must be nonempty")
    for i, v in enumerate(values):
        if v <= 0:
            raise ValidationError(f"weight {v} is not strictly positive", f"[{i}]")
    total = msum(values, mode)
    return Weights(tuple(v / total for v in values), mode)


@dataclass(frozen=True)
class PointVector:
    x: Tuple[Scalar, ...]
    domain_upper: Any = 1
    mode: Optional[Mode] = None

    def __post_init__(self):
        mode = self.mode
        if mode is None:
            mode = infer_mode(list(self.x) + [self.domain_upper])
        values, mode = _coerce_all(self.x, mode, "x")
        if not values:
            raise ValidationError("point vector must be nonempty")
        try:
            a = to_scalar(self.domain_upper, mode)
        except ValidationError as exc:
            raise ValidationError(exc.message, "domain_upper") from None
        if a <= 0:
            raise ValidationError(f"domain upper bound {a} must be positive", "domain_upper")
        for i, v in enumerate(values):
            if not 0 <= v <= a:
                raise DomainError(f"point {v} outside [0, {a}]", f"[{i}]")
        object.__setattr__(self, "x", values)
        object.__setattr__(self, "domain_upper", a)
        object.__setattr__(self, "mode", mode)

    def __len__(self) -> int:
        return len(self.x)

    def __iter__(self) -> Iterator[Scalar]:
        return iter(self.x)

    def __getitem__(self, i: int) -> Scalar:
        return self.x[i]


def _check_in_domain(value: Scalar, a: Scalar, what: str) -> None:
    slack = 0 if isinstance(value, Fraction) else FLOAT_SUM_TOL * max(1.0, float(a))
    if not -slack <= value <= a + slack:
        raise DomainError(f"{what} {value} outside [0, {a}]")


@dataclass(frozen=True)
class SimpleInstance:
    p: Weights
    x: PointVector

    def __post_init__(self):
        if len(self.p) != len(self.x):
            raise ValidationError(f"p has length {len(self.p)} but x has length {len(self.x)}")
        _check_homogeneous(self.p.mode, self.x.mode)
        _check_in_domain(barycenter(self), self.x.domain_upper, "barycenter")

    @classmethod
    def of(cls, p: Sequence[Any], x: Sequence[Any], domain_upper: Any = 1,
           mode: Optional[Mode] = None, normalize: bool = False) -> "SimpleInstance":
        if mode is None:
            mode = infer_mode(list(p) + list(x) + [domain_upper])
        weights = make_weights(p, mode) if normalize else Weights(tuple(p), mode)
        return cls(weights, PointVector(tuple(x), domain_upper, mode))

    @property
    def mode(self) -> Mode:
        return self.p.mode

    @property
    def n(self) -> int:
        return len(self.p)

    @property
    def domain_upper(self) -> Scalar:
        return self.x.domain_upper

    def as_general(self, r: Optional[Weights] = None) -> "GeneralInstance":
        return GeneralInstance(Weights((one(self.mode),), self.mode), (Block(self.p, self.x),),
                               None if r is None else (r,))


@dataclass(frozen=True)
class Block:
    p: Weights
    x: PointVector

    def __post_init__(self):
        if len(self.p) != len(self.x):
            raise ValidationError(f"p has length {len(self.p)} but x has length {len(self.x)}")
        _check_homogeneous(self.p.mode, self.x.mode)

    def __len__(self) -> int:
        return len(self.p)


@dataclass(frozen=True)
class GeneralInstance:
    """Outer weights ``q`` over ``k`` blocks, plus an optional second weight family.

    ``r_blocks[i]`` is the alternative weight vector for block ``i``; it is
    required by the ratio-extrema bounds.
    """

    q: Weights
    blocks: Tuple[Block, ...]
    r_blocks: Optional[Tuple[Weights, ...]] = None

    def __post_init__(self):
        blocks = tuple(self.blocks)
        object.__setattr__(self, "blocks", blocks)
        if not blocks:
            raise ValidationError("at least one block is required", "blocks")
        if len(self.q) != len(blocks):
            raise ValidationError(f"q has length {len(self.q)} but there are {len(blocks)} blocks", "q")
        mode = self.q.mode
        a = blocks[0].x.domain_upper
        for i, b in enumerate(blocks):
            try:
                _check_homogeneous(mode, b.p.mode)
            except ModeError as exc:
                raise ModeError(exc.message, f"blocks[{i}]") from None
            if b.x.domain_upper != a:
                raise ValidationError("all blocks must share one domain upper bound", f"blocks[{i}].x")
        if self.r_blocks is not None:
            rb = tuple(self.r_blocks)
            object.__setattr__(self, "r_blocks", rb)
            if len(rb) != len(blocks):
                raise ValidationError(f"expected {len(blocks)} r blocks, got {len(rb)}", "r_blocks")
            for i, (r, b) in enumerate(zip(rb, blocks)):
                if len(r) != len(b):
                    raise ValidationError(f"length {len(r)} does not match block length {len(b)}",
                                          f"r_blocks[{i}]")
                try:
                    _check_homogeneous(mode, r.mode)
                except ModeError as exc:
                    raise ModeError(exc.message, f"r_blocks[{i}]") from None
        _check_in_domain(general_barycenter(self, "p"), a, "barycenter x_bar")
        if self.r_blocks is not None:
            _check_in_domain(general_barycenter(self, "r"), a, "r-barycenter x_check")

    @classmethod
    def of(cls, q: Sequence[Any], blocks: Sequence[Tuple[Sequence[Any], Sequence[Any]]],
           r_blocks: Optional[Sequence[Sequence[Any]]] = None, domain_upper: Any = 1,
           mode: Optional[Mode] = None) -> "GeneralInstance":
        if mode is None:
            raw: list = list(q) + [domain_upper]
            for p, x in blocks:
                raw += list(p) + list(x)
            for r in r_blocks or ():
                raw += list(r)
            mode = infer_mode(raw)
        built = tuple(Block(Weights(tuple(p), mode), PointVector(tuple(x), domain_upper, mode))
                      for p, x in blocks)
        rb = None if r_blocks is None else tuple(Weights(tuple(r), mode) for r in r_blocks)
        return cls(Weights(tuple(q), mode), built, rb)

    @property
    def mode(self) -> Mode:
        return self.q.mode

    @property
    def k(self) -> int:
        return len(self.blocks)

    @property
    def sizes(self) -> Tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    @property
    def domain_upper(self) -> Scalar:
        return self.blocks[0].x.domain_upper

    def weight_family(self, family: str) -> Tuple[Weights, ...]:
        if family == "p":
            return tuple(b.p for b in self.blocks)
        if family == "r":
            if self.r_blocks is None:
                raise ValidationError("r weights requested but r_blocks is absent", "r_blocks")
            return self.r_blocks
        raise ValidationError(f"unknown weight family {family!r}")

    def points(self) -> Iterator[Scalar]:
        for b in self.blocks:
            yield from b.x


def barycenter(inst: SimpleInstance) -> Scalar:
    return msum((p * x for p, x in zip(inst.p, inst.x)), inst.p.mode)


def general_barycenter(ginst: GeneralInstance, family: str = "p") -> Scalar:
    mode = ginst.mode
    weights = ginst.weight_family(family)
    return msum((qi * msum((w * x for w, x in zip(wi, b.x)), mode)
                 for qi, wi, b in zip(ginst.q, weights, ginst.blocks)), mode)


def convert_instance(inst, mode: Mode):
    """Re-express a simple or general instance in another arithmetic mode.

    Float to rational conversion is exact per entry and then renormalizes
    the weights so they sum to exactly 1.
    """
    if isinstance(inst, SimpleInstance):
        return SimpleInstance(_convert_weights(inst.p, mode),
                              PointVector(tuple(to_scalar(v, mode) for v in inst.x),
                                          to_scalar(inst.domain_upper, mode), mode))
    a = to_scalar(inst.domain_upper, mode)
    blocks = tuple(Block(_convert_weights(b.p, mode),
                         PointVector(tuple(to_scalar(v, mode) for v in b.x), a, mode))
                   for b in inst.blocks)
    rb = None if inst.r_blocks is None else tuple(_convert_weights(r, mode) for r in inst.r_blocks)
    return GeneralInstance(_convert_weights(inst.q, mode), blocks, rb)


def _convert_weights(w: Weights, mode: Mode) -> Weights:
    if w.mode is mode:
        return w
    if mode is Mode.FLOAT:
        return Weights(tuple(float(v) for v in w), mode)
    return make_weights(tuple(Fraction(v) for v in w), mode)


# ---------------------------------------------------------------------------
# functions and certificates


@dataclass(frozen=True)
class Polynomial:
    """``c_0 + c_1 t + ... + c_d t^d`` evaluated in the mode of its argument."""

    coeffs: Tuple[Any, ...]

    def __post_init__(self):
        coeffs = tuple(self.coeffs)
        if not coeffs:
            coeffs = (0,)
        object.__setattr__(self, "coeffs", coeffs)

    def __call__(self, t: Scalar) -> Scalar:
        mode = scalar_mode(t)
        out = zero(mode)
        for c in reversed(self.coeffs):
            out = out * t + to_scalar(c, mode)
        return out

    def __add__(self, other: "Polynomial") -> "Polynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return Polynomial(tuple(_add_raw(x, y) for x, y in zip(a, b)))

    def scaled(self, s: Any) -> "Polynomial":
        return Polynomial(tuple(_mul_raw(s, c) for c in self.coeffs))


def _raw(v: Any) -> Union[float, Fraction]:
    if isinstance(v, str):
        return parse_literal(v)
    if isinstance(v, int):
        return Fraction(v)
    return v


def _add_raw(x: Any, y: Any):
    return _raw(x) + _raw(y)


def _mul_raw(x: Any, y: Any):
    return _raw(x) * _raw(y)


@dataclass(frozen=True)
class _CombinedCertificate:
    terms: Tuple[Tuple[Any, Callable[[Scalar], Scalar]], ...]

    def __call__(self, t: Scalar) -> Scalar:
        mode = scalar_mode(t)
        return msum((to_scalar(s, mode) * c(t) for s, c in self.terms), mode)


@dataclass(frozen=True)
class _PowerCertificate:
    exponent: float

    def __call__(self, t: Scalar) -> Scalar:
        return self.exponent * float(t) ** (self.exponent - 1)


class Claim(str, enum.Enum):
    SUPER = "superterzatic"
    SUB = "subterzatic"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class FunctionModel:
    """A real function on ``[0, a]`` with an optional certificate ``C(x_bar)``.

    Build instances with :func:`power`, :func:`cube_log`, :func:`polynomial`
    or :func:`linear_combination`.  The ``claim`` tag only selects the
    default inequality direction; it is never trusted as a fact.
    """

    family: str
    exponent: Any = None
    coeffs: Tuple[Any, ...] = ()
    terms: Tuple[Tuple[Any, "FunctionModel"], ...] = ()
    certificate: Optional[Callable[[Scalar], Scalar]] = field(default=None, compare=False)
    claim: Claim = Claim.UNKNOWN

    def __call__(self, x: Scalar) -> Scalar:
        if x < 0:
            raise DomainError(f"function argument {x} is negative")
        mode = scalar_mode(x)
        if self.family == "power":
            e = self.exponent
            if mode is Mode.RATIONAL:
                if Fraction(e).denominator != 1:
                    raise ExactnessError(f"x^{e} is not rational-valued on rationals")
                return x ** int(e)
            return float(x) ** float(e)
        if self.family == "cube_log":
            if mode is Mode.RATIONAL:
                raise ExactnessError("x^3 log(1/x) is transcendental; use float mode")
            return 0.0 if x == 0 else -(x ** 3) * math.log(x)
        if self.family == "polynomial":
            return Polynomial(self.coeffs)(x)
        if self.family == "linear_combination":
            return msum((to_scalar(s, mode) * g(x) for s, g in self.terms), mode)
        raise ValidationError(f"unknown function family {self.family!r}")

    @property
    def supports_exact(self) -> bool:
        if self.family == "power":
            return Fraction(self.exponent).denominator == 1
        if self.family == "cube_log":
            return False
        if self.family == "linear_combination":
            return all(g.supports_exact for _, g in self.terms)
        return True

    @property
    def default_rel_tol(self) -> float:
        return 1e-9 if self.supports_exact else 1e-8

    def with_certificate(self, certificate: Optional[Callable[[Scalar], Scalar]]) -> "FunctionModel":
        return FunctionModel(self.family, self.exponent, self.coeffs, self.terms, certificate, self.claim)

    def describe(self) -> str:
        if self.family == "power":
            return f"x^{self.exponent}"
        if self.family == "cube_log":
            return "x^3 ln(1/x)"
        if self.family == "polynomial":
            return "poly(" + ", ".join(str(c) for c in self.coeffs) + ")"
        return " + ".join(f"{s}*({g.describe()})" for s, g in self.terms)


def power(exponent: Any) -> FunctionModel:
    """``x^p`` for ``p >= 3`` with the certificate ``p * x_bar^(p-1)``."""
    e = _raw(exponent)
    if e < 3:
        raise ValidationError(f"power exponent must be >= 3, got {exponent}", "exponent")
    if Fraction(e).denominator == 1:
        n = int(e)
        cert: Callable = Polynomial(tuple([0] * (n - 1) + [n]))
        e = n
    else:
        cert = _PowerCertificate(float(e))
    return FunctionModel("power", exponent=e, certificate=cert, claim=Claim.SUPER)


def cube_log() -> FunctionModel:
    """``x^3 ln(1/x)`` with value 0 at 0; no known certificate."""
    return FunctionModel("cube_log", claim=Claim.SUB)


def polynomial(coeffs: Sequence[Any], certificate: Optional[Callable] = None,
               claim: Claim = Claim.UNKNOWN) -> FunctionModel:
    if not coeffs:
        raise ValidationError("polynomial needs at least one coefficient", "coeffs")
    return FunctionModel("polynomial", coeffs=tuple(_raw(c) for c in coeffs),
                         certificate=certificate, claim=Claim(claim))


def linear_combination(terms: Sequence[Tuple[Any, FunctionModel]],
                       certificate: Optional[Callable] = None) -> FunctionModel:
    """Positive combination ``sum s_i f_i``.

    Without an explicit certificate, the same positive combination of the
    member certificates is used (``None`` if any member lacks one).
    """
    if not terms:
        raise ValidationError("linear combination needs at least one term", "terms")
    cleaned = []
    for i, (s, g) in enumerate(terms):
        s = _raw(s)
        if s <= 0:
            raise ValidationError(f"scale {s} must be strictly positive", f"terms[{i}].scale")
        cleaned.append((s, g))
    if certificate is None and all(g.certificate is not None for _, g in cleaned):
        if all(isinstance(g.certificate, Polynomial) for _, g in cleaned):
            total = Polynomial((0,))
            for s, g in cleaned:
                total = total + g.certificate.scaled(s)
            certificate = total
        else:
            certificate = _CombinedCertificate(tuple((s, g.certificate) for s, g in cleaned))
    claims = {g.claim for _, g in cleaned}
    claim = claims.pop() if len(claims) == 1 else Claim.UNKNOWN
    return FunctionModel("linear_combination", terms=tuple(cleaned), certificate=certificate, claim=claim)


def cube_sharp_certificate() -> Polynomial:
    """``C(x_bar) = 2 x_bar``, the exact threshold for ``x^3`` under the printed inequality."""
    return Polynomial((0, 2))


def terza_quotient(f: Callable[[Scalar], Scalar], d: Scalar, domain_upper: Optional[Scalar] = None) -> Scalar:
    """``f(|d|)/|d|`` with the convention that the quotient is 0 at ``d == 0``.

    Only an exact zero triggers the convention.
    """
    if d == 0:
        return zero(scalar_mode(d))
    ad = abs(d)
    if domain_upper is not None and ad > domain_upper:
        raise DomainError(f"|d| = {ad} exceeds domain upper bound {domain_upper}")
    return f(ad) / ad


# ---------------------------------------------------------------------------
# enumeration and seeding


def resolve_cap(cap: Optional[int] = None) -> int:
    if cap is not None:
        return int(cap)
    env = os.environ.get(CAP_ENV_VAR)
    if env:
        try:
            return int(env)
        except ValueError:
            raise ValidationError(f"{CAP_ENV_VAR} must be an integer, got {env!r}") from None
    return DEFAULT_CAP


def multi_indices(*sizes: int, cap: Optional[int] = None) -> Iterator[Tuple[int, ...]]:
    """All 1-based multi-indices ``(j_1, ..., j_k)`` in lexicographic order.

    The cap is checked eagerly, before the first tuple is produced.
    """
    check_cap(sizes, cap)
    return itertools.product(*(range(1, n + 1) for n in sizes))


def check_cap(sizes: Sequence[int], cap: Optional[int] = None) -> int:
    if not sizes:
        raise ValidationError("at least one block size is required")
    for i, n in enumerate(sizes):
        if n < 1:
            raise ValidationError(f"block size {n} must be >= 1", f"[{i}]")
    limit = resolve_cap(cap)
    count = math.prod(sizes)
    if count > limit:
        raise EnumerationCapError(count, limit)
    return count


def derive_subseed(seed: int, index: int) -> int:
    """Stable 64-bit sub-seed for trial ``index`` of a run seeded with ``seed``."""
    digest = hashlib.blake2b(f"{seed}/{index}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")
