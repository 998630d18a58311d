"""Fusing recognizer probabilities with singleton plausibilities.

Marginal distributions over symbol and text alternatives lift to mass
functions on the product frame whose focal elements are cylinder sets;
combining the two lifts reproduces the independent product distribution.
Fusing a probability distribution with per-element plausibilities reduces to
a normalized pointwise product, which is scale-invariant in the
plausibilities, so raw typicality values can be used without prior
normalization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Hashable, Literal, Mapping

from .errors import BadFrame, NotNormalized, UnknownLabel, ZeroEvidence
from .evidence import BPA, Frame, MAX_FRAME, NORM_TOL, new_bpa


@dataclass(frozen=True)
class ProductFrame:
    """The joint frame over (symbol, text) label pairs, in s-major order."""

    s_labels: tuple[Hashable, ...]
    t_labels: tuple[Hashable, ...]
    frame: Frame

    def __init__(self, s_labels, t_labels):
        s_labels = tuple(s_labels)
        t_labels = tuple(t_labels)
        if len(s_labels) * len(t_labels) > MAX_FRAME:
            raise BadFrame(
                f"product frame of {len(s_labels)}x{len(t_labels)} pairs "
                f"exceeds the cap of {MAX_FRAME}"
            )
        object.__setattr__(self, "s_labels", s_labels)
        object.__setattr__(self, "t_labels", t_labels)
        object.__setattr__(
            self, "frame", Frame((s, t) for s in s_labels for t in t_labels)
        )

    def cylinder(self, axis: Literal["symbol", "text"], label: Hashable):
        """The subset fixing one coordinate: all pairs carrying ``label``."""
        if axis == "symbol":
            if label not in self.s_labels:
                raise UnknownLabel(f"{label!r} is not a symbol alternative")
            members = [(label, t) for t in self.t_labels]
        elif axis == "text":
            if label not in self.t_labels:
                raise UnknownLabel(f"{label!r} is not a text alternative")
            members = [(s, label) for s in self.s_labels]
        else:
            raise ValueError(f"axis must be 'symbol' or 'text', got {axis!r}")
        return self.frame.subset(members)


def lift_marginal(
    pf: ProductFrame,
    axis: Literal["symbol", "text"],
    p: Mapping[Hashable, float],
) -> BPA:
    """Lift a marginal distribution to the product frame.

    Each label's probability becomes the mass of its cylinder set, because a
    marginal says nothing about the other coordinate.
    """
    total = math.fsum(p.values())
    if abs(total - 1.0) > NORM_TOL:
        raise NotNormalized(f"marginal sums to {total!r}, not 1")
    return new_bpa(
        pf.frame, [(pf.cylinder(axis, label), v) for label, v in p.items()]
    )


def fuse_prob_plaus(
    p: Mapping[Hashable, float], pl: Mapping[Hashable, float]
) -> dict[Hashable, float]:
    """Posterior over elements: p(a)*pl(a), renormalized.

    ``pl`` may be on any positive scale; the normalization absorbs it.
    Elements of ``p`` missing from ``pl`` read as plausibility 0.
    """
    total = math.fsum(p.values())
    if abs(total - 1.0) > NORM_TOL:
        raise NotNormalized(f"probabilities sum to {total!r}, not 1")
    if any(v < 0 for v in pl.values()):
        raise ValueError("negative plausibility")
    weighted = {a: p[a] * pl.get(a, 0.0) for a in p}
    denom = math.fsum(weighted.values())
    if denom <= 0.0:
        raise ZeroEvidence(
            "every element with positive probability has zero plausibility"
        )
    return {a: w / denom for a, w in weighted.items()}


def plausibility_sum_check(
    pl: Mapping[Hashable, float]
) -> Literal["ok", "below_one"]:
    """Advisory check that singleton plausibilities could come from a bpa.

    Any bpa gives singleton plausibilities summing to at least 1; a smaller
    sum means the values cannot be literal plausibilities.  Fusion is
    scale-invariant, so this is a warning signal rather than an error.
    """
    return "ok" if math.fsum(pl.values()) >= 1.0 - NORM_TOL else "below_one"
