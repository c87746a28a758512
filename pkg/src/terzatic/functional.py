"""Jensen functional and its tensor-weighted generalization over k blocks."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

from .core import (
    GeneralInstance,
    Mode,
    Scalar,
    SimpleInstance,
    barycenter,
    general_barycenter,
    msum,
    multi_indices,
    mprod,
)

Atom = Tuple[Scalar, Scalar]  # (weight, value)


@dataclass(frozen=True)
class AtomDistribution:
    """Finite discrete law given as ``(weight, value)`` atoms.

    In merged form values are sorted and distinct.
    """

    atoms: Tuple[Atom, ...]
    mode: Mode
    merged: bool = False

    @property
    def total_weight(self) -> Scalar:
        return msum((w for w, _ in self.atoms), self.mode)

    def expect(self, g: Callable[[Scalar], Scalar]) -> Scalar:
        return msum((w * g(v) for w, v in self.atoms), self.mode)

    def mean(self) -> Scalar:
        return msum((w * v for w, v in self.atoms), self.mode)

    def __len__(self) -> int:
        return len(self.atoms)


def jensen(f: Callable[[Scalar], Scalar], inst: SimpleInstance) -> Scalar:
    """``sum p_i f(x_i) - f(sum p_i x_i)``."""
    mode = inst.mode
    return msum((p * f(x) for p, x in zip(inst.p, inst.x)), mode) - f(barycenter(inst))


def _merge_key(value: Scalar, mode: Mode):
    if mode is Mode.RATIONAL:
        return value
    return float(f"{value:.12g}")


def merge_atoms(atoms: List[Atom], mode: Mode) -> Tuple[Atom, ...]:
    """Coalesce equal values, summing their weights.

    Float values are treated as equal when they agree to 12 significant
    digits; the first value seen represents the group.
    """
    groups: Dict[object, List[Scalar]] = defaultdict(list)
    reps: Dict[object, Scalar] = {}
    for w, v in atoms:
        key = _merge_key(v, mode)
        reps.setdefault(key, v)
        groups[key].append(w)
    merged = [(msum(groups[key], mode), reps[key]) for key in groups]
    merged.sort(key=lambda a: a[1])
    return tuple(merged)


def tensor_atoms(ginst: GeneralInstance, family: str = "p",
                 cap: Optional[int] = None) -> List[Atom]:
    """One atom per multi-index: weight ``prod_i w_{i j_i}``, value ``sum_i q_i x_{i j_i}``."""
    mode = ginst.mode
    weights = ginst.weight_family(family)
    q = ginst.q
    xs = [b.x for b in ginst.blocks]
    atoms = []
    for idx in multi_indices(*ginst.sizes, cap=cap):
        w = mprod((weights[i][j - 1] for i, j in enumerate(idx)), mode)
        s = msum((q[i] * xs[i][j - 1] for i, j in enumerate(idx)), mode)
        atoms.append((w, s))
    return atoms


def tensor_distribution(ginst: GeneralInstance, family: str = "p", merge: bool = True,
                        cap: Optional[int] = None) -> AtomDistribution:
    atoms = tensor_atoms(ginst, family, cap)
    if merge:
        return AtomDistribution(merge_atoms(atoms, ginst.mode), ginst.mode, merged=True)
    return AtomDistribution(tuple(atoms), ginst.mode, merged=False)


def generalized_jensen(f: Callable[[Scalar], Scalar], ginst: GeneralInstance, family: str = "p",
                       cap: Optional[int] = None) -> Scalar:
    """Tensor-weighted Jensen functional for the chosen weight family (``"p"`` or ``"r"``).

    Evaluated over the merged atom distribution; ``k = 1`` gives :func:`jensen`.
    """
    dist = tensor_distribution(ginst, family, merge=True, cap=cap)
    return dist.expect(f) - f(general_barycenter(ginst, family))
