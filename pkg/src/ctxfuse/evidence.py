"""Exact belief-function arithmetic over small finite frames.

Masses live on subsets of a frame of discernment, represented as bit masks
over the frame's element order.  Every operation enumerates stored focal
elements only, never all 2^n subsets, so frames stay cheap as long as the
number of focal elements does.  Frames are capped at 24 elements; the
intended scale is small candidate products.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Hashable, Iterable, Iterator, Mapping

from .errors import (
    BadFrame,
    EmptyFocal,
    FrameMismatch,
    NotNormalized,
    TotalConflict,
)

MAX_FRAME = 24

#: tolerance for "sums to 1" checks on masses and probabilities
NORM_TOL = 1e-9
#: tolerance for algebraic identities (duality, commutativity, ...)
IDENTITY_TOL = 1e-12


@dataclass(frozen=True)
class Frame:
    """An ordered frame of discernment with distinct, opaque elements."""

    elements: tuple[Hashable, ...]

    def __init__(self, elements: Iterable[Hashable]):
        object.__setattr__(self, "elements", tuple(elements))
        if not self.elements:
            raise BadFrame("frame must contain at least one element")
        if len(set(self.elements)) != len(self.elements):
            raise BadFrame("frame elements must be distinct")
        if len(self.elements) > MAX_FRAME:
            raise BadFrame(
                f"frame of size {len(self.elements)} exceeds the cap of {MAX_FRAME}"
            )
        object.__setattr__(
            self, "_index", {x: i for i, x in enumerate(self.elements)}
        )

    @property
    def size(self) -> int:
        return len(self.elements)

    def index(self, element: Hashable) -> int:
        try:
            return self._index[element]
        except KeyError:
            raise BadFrame(f"{element!r} is not an element of this frame") from None

    def subset(self, members: Iterable[Hashable]) -> "Subset":
        mask = 0
        for x in members:
            mask |= 1 << self.index(x)
        return Subset(self, mask)

    def singleton(self, element: Hashable) -> "Subset":
        return Subset(self, 1 << self.index(element))

    def empty(self) -> "Subset":
        return Subset(self, 0)

    def full(self) -> "Subset":
        return Subset(self, (1 << self.size) - 1)

    def all_subsets(self) -> Iterator["Subset"]:
        """Every subset of the frame, empty set included.  2^n of them."""
        for mask in range(1 << self.size):
            yield Subset(self, mask)


@dataclass(frozen=True)
class Subset:
    """A subset of a frame, stored as an index mask."""

    frame: Frame
    mask: int

    def __post_init__(self):
        if not 0 <= self.mask < (1 << self.frame.size):
            raise BadFrame(f"mask {self.mask:#x} out of range for this frame")

    @property
    def members(self) -> tuple[Hashable, ...]:
        return tuple(
            x for i, x in enumerate(self.frame.elements) if self.mask >> i & 1
        )

    @property
    def size(self) -> int:
        return self.mask.bit_count()

    @property
    def is_empty(self) -> bool:
        return self.mask == 0

    def complement(self) -> "Subset":
        return Subset(self.frame, self.mask ^ (1 << self.frame.size) - 1)

    def __and__(self, other: "Subset") -> "Subset":
        _check_same_frame(self.frame, other.frame)
        return Subset(self.frame, self.mask & other.mask)

    def __or__(self, other: "Subset") -> "Subset":
        _check_same_frame(self.frame, other.frame)
        return Subset(self.frame, self.mask | other.mask)

    def issubset(self, other: "Subset") -> bool:
        return self.mask & ~other.mask == 0

    def intersects(self, other: "Subset") -> bool:
        return self.mask & other.mask != 0

    def __contains__(self, element: Hashable) -> bool:
        return self.mask >> self.frame.index(element) & 1 == 1


def _check_same_frame(f1: Frame, f2: Frame) -> None:
    if f1 != f2:
        raise FrameMismatch("operands live on different frames")


class BPA:
    """A basic probability assignment: positive masses on non-empty subsets.

    Zero-mass subsets are never stored, so the key set is exactly the set of
    focal elements.  Instances are immutable; construct them through
    :func:`new_bpa`, :func:`vacuous` or :func:`from_probabilities`.
    """

    __slots__ = ("frame", "_masses")

    def __init__(self, frame: Frame, masses: dict[int, float], _checked: bool = False):
        if not _checked:
            raise TypeError("use new_bpa / vacuous / from_probabilities")
        self.frame = frame
        self._masses = masses

    def mass(self, subset: Subset) -> float:
        if subset.frame != self.frame:
            raise BadFrame("subset belongs to a different frame")
        return self._masses.get(subset.mask, 0.0)

    def focal_elements(self) -> Iterator[tuple[Subset, float]]:
        """Focal elements in deterministic (mask) order."""
        for mask in sorted(self._masses):
            yield Subset(self.frame, mask), self._masses[mask]

    def focal_masks(self) -> dict[int, float]:
        return dict(self._masses)

    def is_probabilistic(self) -> bool:
        """True when every focal element is a singleton."""
        return all(mask.bit_count() == 1 for mask in self._masses)

    def __len__(self) -> int:
        return len(self._masses)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BPA)
            and self.frame == other.frame
            and self._masses == other._masses
        )

    def __repr__(self) -> str:
        parts = ", ".join(
            f"{{{','.join(map(str, s.members))}}}={v:g}"
            for s, v in self.focal_elements()
        )
        return f"BPA({parts})"


def _build_bpa(frame: Frame, raw: dict[int, float]) -> BPA:
    """Validate and freeze a mask->mass dict (zeros dropped, sum checked)."""
    masses = {m: v for m, v in raw.items() if v != 0.0}
    if 0 in masses:
        raise EmptyFocal("positive mass on the empty set")
    if any(v < 0 for v in masses.values()):
        raise NotNormalized("negative mass")
    total = math.fsum(masses.values())
    if abs(total - 1.0) > NORM_TOL:
        raise NotNormalized(f"masses sum to {total!r}, not 1")
    return BPA(frame, masses, _checked=True)


def new_bpa(frame: Frame, assignments: Iterable[tuple[Subset, float]]) -> BPA:
    """Build a bpa from (subset, mass) pairs.

    Duplicate subsets have their masses summed and zero entries are dropped.
    Raises EmptyFocal for positive mass on the empty set, NotNormalized when
    the total differs from 1 beyond tolerance, and BadFrame for subsets of a
    different frame.
    """
    raw: dict[int, float] = {}
    for subset, value in assignments:
        if subset.frame != frame:
            raise BadFrame("assignment subset belongs to a different frame")
        if value == 0.0:
            continue
        if value > 0.0 and subset.mask == 0:
            raise EmptyFocal("positive mass on the empty set")
        raw[subset.mask] = raw.get(subset.mask, 0.0) + value
    return _build_bpa(frame, raw)


def vacuous(frame: Frame) -> BPA:
    """The bpa of total ignorance: all mass on the whole frame."""
    return BPA(frame, {(1 << frame.size) - 1: 1.0}, _checked=True)


def from_probabilities(frame: Frame, p: Mapping[Hashable, float]) -> BPA:
    """Encode a probability distribution as a bpa with singleton focals."""
    raw: dict[int, float] = {}
    for element, value in p.items():
        if value < 0:
            raise NotNormalized(f"negative probability for {element!r}")
        if value > 0:
            raw[1 << frame.index(element)] = value
    return _build_bpa(frame, raw)


def belief(m: BPA, a: Subset) -> float:
    """Total mass committed to subsets of ``a``."""
    if a.frame != m.frame:
        raise BadFrame("subset belongs to a different frame")
    return math.fsum(
        v for mask, v in m._masses.items() if mask & ~a.mask == 0
    )


def plausibility(m: BPA, a: Subset) -> float:
    """Total mass of focal elements intersecting ``a``.

    Computed directly from the definition; the duality with
    ``1 - belief(complement)`` is an invariant checked by the tests, not an
    implementation shortcut.
    """
    if a.frame != m.frame:
        raise BadFrame("subset belongs to a different frame")
    return math.fsum(v for mask, v in m._masses.items() if mask & a.mask)


def conflict(m1: BPA, m2: BPA) -> float:
    """Mass assigned by the product measure to empty intersections."""
    _check_same_frame(m1.frame, m2.frame)
    return math.fsum(
        v1 * v2
        for mask1, v1 in m1._masses.items()
        for mask2, v2 in m2._masses.items()
        if mask1 & mask2 == 0
    )


def combine(m1: BPA, m2: BPA) -> BPA:
    """Dempster's rule: intersect focal pairs, renormalize by 1 - conflict."""
    _check_same_frame(m1.frame, m2.frame)
    raw: dict[int, float] = {}
    kappa_parts = []
    for mask1, v1 in m1._masses.items():
        for mask2, v2 in m2._masses.items():
            inter = mask1 & mask2
            if inter:
                raw[inter] = raw.get(inter, 0.0) + v1 * v2
            else:
                kappa_parts.append(v1 * v2)
    kappa = math.fsum(kappa_parts)
    if kappa >= 1.0 - 1e-12:
        raise TotalConflict(f"conflict mass {kappa!r} leaves nothing to renormalize")
    scale = 1.0 - kappa
    return _build_bpa(frame=m1.frame, raw={k: v / scale for k, v in raw.items()})
