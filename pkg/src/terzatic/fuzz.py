"""Seeded random search for violations of the implemented inequalities.

Trial ``t`` of a run with master seed ``s`` draws its instance from
``derive_subseed(s, t)`` alone, so any trial can be replayed in isolation
and trials may run in any order.
"""
from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, List, Optional, Tuple, Union

from .bounds import corollary8_check, theorem6_lower_check, theorem6_upper_check
from .core import (
    Block,
    EnumerationCapError,
    FunctionModel,
    GeneralInstance,
    Mode,
    PointVector,
    Polynomial,
    Scalar,
    SimpleInstance,
    ValidationError,
    Weights,
    derive_subseed,
    make_weights,
    resolve_cap,
    to_scalar,
)
from .instance_io import dump_instance_file
from .superterzatic import CheckReport, Verdict, check_def2, check_lemma5

TARGETS = ("def2", "lemma5", "thm6_lower", "thm6_upper", "cor8_lower", "cor8_upper")
_SINGLE_BLOCK = {"def2", "cor8_lower", "cor8_upper"}
_NEEDS_R = {"thm6_lower", "thm6_upper", "cor8_lower", "cor8_upper"}
_DENOM = 64


@dataclass(frozen=True)
class Shape:
    k_range: Tuple[int, int] = (1, 3)
    n_range: Tuple[int, int] = (1, 4)
    domain_upper: Any = 1
    with_r: bool = False
    r_equals_p: bool = False

    def __post_init__(self):
        for name in ("k_range", "n_range"):
            lo, hi = getattr(self, name)
            if lo < 1 or hi < lo:
                raise ValidationError(f"invalid range {(lo, hi)}", name)


def _rng_point(rng: random.Random, a: Scalar, mode: Mode) -> Scalar:
    if mode is Mode.RATIONAL:
        d = rng.randint(1, _DENOM)
        return a * Fraction(rng.randint(0, d), d)
    return a * rng.random()


def _rng_weights(rng: random.Random, n: int, mode: Mode) -> Weights:
    if mode is Mode.RATIONAL:
        return make_weights([Fraction(rng.randint(1, _DENOM), _DENOM) for _ in range(n)], mode)
    return make_weights([1.0 - rng.random() for _ in range(n)], mode)


def gen_simple(shape: Shape, sub_seed: int, mode: Mode = Mode.FLOAT) -> SimpleInstance:
    """Uniform points on ``[0, a]`` with normalized positive uniform weights."""
    rng = random.Random(sub_seed)
    a = to_scalar(shape.domain_upper, mode)
    n = rng.randint(*shape.n_range)
    x = PointVector(tuple(_rng_point(rng, a, mode) for _ in range(n)), a, mode)
    return SimpleInstance(_rng_weights(rng, n, mode), x)


def gen_general(shape: Shape, sub_seed: int, mode: Mode = Mode.FLOAT) -> GeneralInstance:
    rng = random.Random(sub_seed)
    a = to_scalar(shape.domain_upper, mode)
    k = rng.randint(*shape.k_range)
    blocks = []
    for _ in range(k):
        n = rng.randint(*shape.n_range)
        x = PointVector(tuple(_rng_point(rng, a, mode) for _ in range(n)), a, mode)
        blocks.append(Block(_rng_weights(rng, n, mode), x))
    q = _rng_weights(rng, k, mode)
    r_blocks = None
    if shape.with_r:
        if shape.r_equals_p:
            r_blocks = tuple(b.p for b in blocks)
        else:
            r_blocks = tuple(_rng_weights(rng, len(b), mode) for b in blocks)
    return GeneralInstance(q, tuple(blocks), r_blocks)


@dataclass(frozen=True)
class FuzzConfig:
    target: str
    function: FunctionModel
    certificate: Optional[Callable[[Scalar], Scalar]] = None
    trials: int = 1000
    seed: int = 0
    k_range: Tuple[int, int] = (1, 3)
    n_range: Tuple[int, int] = (1, 4)
    domain_upper: Any = 1
    mode: Mode = Mode.FLOAT
    direction: Optional[str] = None
    rel_tol: Optional[float] = None
    r_equals_p: bool = False
    cap: Optional[int] = None
    workers: int = 1

    def __post_init__(self):
        if self.target not in TARGETS:
            raise ValidationError(f"unknown target {self.target!r}; choose from {', '.join(TARGETS)}", "target")
        if self.trials < 0:
            raise ValidationError("trials must be >= 0", "trials")
        object.__setattr__(self, "mode", Mode(self.mode))
        shape = self.shape
        worst = shape.n_range[1] ** shape.k_range[1]
        if worst > resolve_cap(self.cap):
            raise ValidationError(f"shape allows {worst} multi-indices, above the enumeration cap", "n_range")

    @property
    def shape(self) -> Shape:
        k_range = (1, 1) if self.target in _SINGLE_BLOCK else self.k_range
        return Shape(k_range, self.n_range, self.domain_upper, self.target in _NEEDS_R, self.r_equals_p)

    @property
    def model(self) -> FunctionModel:
        if self.certificate is None:
            return self.function
        return self.function.with_certificate(self.certificate)


@dataclass(frozen=True)
class Violation:
    trial: int
    sub_seed: int
    instance: GeneralInstance
    report: CheckReport


@dataclass
class FuzzReport:
    trials_run: int = 0
    violations: List[Violation] = field(default_factory=list)
    min_slack: Optional[Scalar] = None
    degenerate: int = 0
    cap_errors: int = 0
    min_slack_trial: Optional[int] = None

    @property
    def ok(self) -> bool:
        return not self.violations


def generate(config: FuzzConfig, sub_seed: int) -> GeneralInstance:
    return gen_general(config.shape, sub_seed, config.mode)


def evaluate(config: FuzzConfig, ginst: GeneralInstance) -> CheckReport:
    f = config.model
    kw = dict(direction=config.direction, rel_tol=config.rel_tol)
    t = config.target
    if t == "def2":
        b = ginst.blocks[0]
        return check_def2(f, SimpleInstance(b.p, b.x), config.direction, rel_tol=config.rel_tol)
    if t == "lemma5":
        return check_lemma5(f, ginst, config.direction, rel_tol=config.rel_tol, cap=config.cap)
    if t == "thm6_lower":
        return theorem6_lower_check(f, ginst, cap=config.cap, **kw)
    if t == "thm6_upper":
        return theorem6_upper_check(f, ginst, cap=config.cap, **kw)
    b = ginst.blocks[0]
    side = "lower" if t == "cor8_lower" else "upper"
    return corollary8_check(f, b.x, b.p, ginst.r_blocks[0], side, **kw)


def replay(config: FuzzConfig, trial: int) -> Tuple[GeneralInstance, CheckReport]:
    """Regenerate and re-check a single trial."""
    ginst = generate(config, derive_subseed(config.seed, trial))
    return ginst, evaluate(config, ginst)


def _run_trial(config: FuzzConfig, trial: int):
    sub = derive_subseed(config.seed, trial)
    try:
        ginst = generate(config, sub)
        return trial, sub, ginst, evaluate(config, ginst)
    except EnumerationCapError:
        return trial, sub, None, None


def run_fuzz(config: FuzzConfig) -> FuzzReport:
    """Run ``config.trials`` trials; results are merged in trial order."""
    trials = range(config.trials)
    if config.workers > 1:
        with ThreadPoolExecutor(config.workers) as pool:
            results = list(pool.map(lambda t: _run_trial(config, t), trials))
    else:
        results = [_run_trial(config, t) for t in trials]

    report = FuzzReport()
    for trial, sub, ginst, check in results:
        report.trials_run += 1
        if check is None:
            report.cap_errors += 1
            continue
        if check.verdict is Verdict.DEGENERATE:
            report.degenerate += 1
        if report.min_slack is None or check.slack < report.min_slack:
            report.min_slack = check.slack
            report.min_slack_trial = trial
        if check.verdict is Verdict.VIOLATED:
            report.violations.append(Violation(trial, sub, ginst, check))
    return report


def write_reproducers(report: FuzzReport, config: FuzzConfig, out_dir: Union[str, Path],
                      limit: Optional[int] = None) -> List[Path]:
    """One instance file per violation, named by target and trial index."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cert = config.model.certificate
    cert = cert if isinstance(cert, Polynomial) else None
    paths = []
    for v in report.violations[:limit]:
        path = out / f"{config.target}-seed{config.seed}-trial{v.trial}.json"
        dump_instance_file(path, config.function, v.instance, cert)
        paths.append(path)
    return paths

