"""Possibility distributions and their consonant mass-function equivalents.

A normal possibility distribution (maximum value 1) carries exactly the same
information as a mass function whose focal elements are nested, and the
bridge is what lets context-derived typicality values act as singleton
plausibilities downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Hashable, Mapping

from .errors import AllZero, BadFrame, NotNormal
from .evidence import BPA, Frame, NORM_TOL, Subset, _build_bpa


@dataclass(frozen=True)
class PossibilityDistribution:
    """Element-wise grading in [0,1] over a frame; missing entries read as 0."""

    frame: Frame
    values: Mapping[Hashable, float]

    def __init__(self, frame: Frame, values: Mapping[Hashable, float]):
        complete = {}
        for x in frame.elements:
            v = float(values.get(x, 0.0))
            if not 0.0 <= v <= 1.0:
                raise BadFrame(f"possibility {v!r} for {x!r} is outside [0,1]")
            complete[x] = v
        for x in values:
            frame.index(x)  # unknown elements raise BadFrame
        if all(v == 0.0 for v in complete.values()):
            raise AllZero("no element has positive possibility")
        object.__setattr__(self, "frame", frame)
        object.__setattr__(self, "values", complete)

    def __getitem__(self, element: Hashable) -> float:
        return self.values[element]

    @property
    def max_value(self) -> float:
        return max(self.values.values())

    def is_normal(self, tol: float = NORM_TOL) -> bool:
        return abs(self.max_value - 1.0) <= tol


def normalize(pi: PossibilityDistribution) -> PossibilityDistribution:
    """Divide every value by the largest, making the maximum exactly 1."""
    top = pi.max_value
    if top <= 0.0:
        raise AllZero("cannot normalize an all-zero distribution")
    return PossibilityDistribution(
        pi.frame, {x: v / top for x, v in pi.values.items()}
    )


def poss_measure(pi: PossibilityDistribution, b: Subset) -> float:
    """Possibility of a subset: the maximum over its members (0 if empty)."""
    if b.frame != pi.frame:
        raise BadFrame("subset belongs to a different frame")
    if b.is_empty:
        return 0.0
    return max(pi.values[x] for x in b.members)


def consonant_bpa(pi: PossibilityDistribution) -> BPA:
    """The unique nested-focal bpa whose singleton plausibilities equal ``pi``.

    Elements are sorted by descending possibility (ties broken by frame
    order, which cannot change the result because tied differences vanish);
    the i-th focal element is the top-i prefix with mass pi_i - pi_{i+1}.
    Requires a normal distribution.
    """
    if not pi.is_normal():
        raise NotNormal(f"maximum possibility is {pi.max_value!r}, not 1")
    order = sorted(
        range(pi.frame.size),
        key=lambda i: (-pi.values[pi.frame.elements[i]], i),
    )
    raw: dict[int, float] = {}
    prefix = 0
    for rank, i in enumerate(order):
        prefix |= 1 << i
        here = pi.values[pi.frame.elements[i]]
        nxt = (
            pi.values[pi.frame.elements[order[rank + 1]]]
            if rank + 1 < len(order)
            else 0.0
        )
        step = here - nxt
        if step != 0.0:
            raw[prefix] = step
    return _build_bpa(pi.frame, raw)
