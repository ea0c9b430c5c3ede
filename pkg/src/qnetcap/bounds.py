"""Single-edge capacity bound functions and per-edge orientation optimization.

Lower bounds are achievable rates from (reverse) coherent information; upper
bounds come from relative entropy of entanglement for thermal-loss channels
and squashed entanglement for amplitude damping. Pure loss is distillable, so
its lower and upper bounds coincide at -log2(1-eta).

An undirected physical edge can be used in either direction, and with
asymmetric device noise the two directions give different compound channels.
``oriented_edge_bounds`` evaluates both and keeps, independently for the lower
and the upper bound, the more favourable direction.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize_scalar

from .channels import (
    FAMILY_AD,
    FAMILY_TL,
    ChannelSpec,
    NodeSpec,
    as_damping,
    as_thermal,
    family,
    node_split_ad,
    node_split_tl,
)
from .errors import DomainError, FamilyError

# Grid size for the coarse pass of the 1-D maximization in ad_rci.
_AD_GRID_POINTS = 1001
# Refinement tolerance on the optimizer's argument.
_AD_U_TOL = 1e-10

BOUND_ORDER_TOL = 1e-12


def h2(u: float) -> float:
    """Binary entropy -u log2 u - (1-u) log2(1-u), in bits."""
    if not 0.0 <= u <= 1.0 or math.isnan(u):
        raise DomainError(f"probability must lie in [0, 1], got {u}")
    if u == 0.0 or u == 1.0:
        return 0.0
    return -u * math.log2(u) - (1.0 - u) * math.log2(1.0 - u)


def _h2_arr(x: np.ndarray) -> np.ndarray:
    safe = np.clip(x, 0.0, 1.0)
    left = np.where(safe > 0.0, safe, 1.0)
    right = np.where(safe < 1.0, 1.0 - safe, 1.0)
    return -(left * np.log2(left) + right * np.log2(right))


def bosonic_h(x: float) -> float:
    """Thermal-state entropy function (x+1)log2(x+1) - x log2 x, in bits."""
    if x < 0.0 or math.isnan(x):
        raise DomainError(f"mean photon number must be >= 0, got {x}")
    if x == 0.0:
        return 0.0
    return (x + 1.0) * math.log2(x + 1.0) - x * math.log2(x)


def ad_rci(p_tot: float) -> float:
    """Best coherent-information rate of an amplitude-damping channel.

    Maximizes H2(u) - H2(u*p) over the input excitation u: coarse 1001-point
    grid to locate the peak, then bounded scalar minimization (golden-section
    with parabolic steps) to refine u within 1e-10. Clamped to >= 0.
    """
    if not 0.0 <= p_tot <= 1.0 or math.isnan(p_tot):
        raise DomainError(f"damping probability must lie in [0, 1], got {p_tot}")
    if p_tot == 0.0:
        return 1.0
    if p_tot == 1.0:
        return 0.0
    return _ad_rci_opt(float(p_tot))


@lru_cache(maxsize=8192)
def _ad_rci_opt(p_tot: float) -> float:
    u = np.linspace(0.0, 1.0, _AD_GRID_POINTS)
    f = _h2_arr(u) - _h2_arr(u * p_tot)
    i = int(np.argmax(f))
    lo = u[max(i - 1, 0)]
    hi = u[min(i + 1, _AD_GRID_POINTS - 1)]
    res = minimize_scalar(
        lambda v: h2(v * p_tot) - h2(v),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": _AD_U_TOL},
    )
    best = max(float(f[i]), -float(res.fun))
    return max(0.0, best)


def ad_squashed(p_tot: float) -> float:
    """Squashed-entanglement upper bound for amplitude damping."""
    if not 0.0 <= p_tot <= 1.0 or math.isnan(p_tot):
        raise DomainError(f"damping probability must lie in [0, 1], got {p_tot}")
    return max(0.0, h2(0.5 - p_tot / 4.0) - h2(1.0 - p_tot / 4.0))


def tl_rci(eta_tot: float, nbar_tot: float) -> float:
    """Reverse-coherent-information rate of a thermal-loss channel, clamped to >= 0."""
    raw = _tl_rci_raw(eta_tot, nbar_tot)
    return max(0.0, raw)


def _tl_rci_raw(eta_tot: float, nbar_tot: float) -> float:
    if not 0.0 < eta_tot < 1.0 or math.isnan(eta_tot):
        if eta_tot == 1.0:
            raise DomainError("transmissivity 1 is divergent; treat as infinite capacity explicitly")
        raise DomainError(f"transmissivity must lie in (0, 1), got {eta_tot}")
    if nbar_tot < 0.0 or math.isnan(nbar_tot):
        raise DomainError(f"thermal photon number must be >= 0, got {nbar_tot}")
    return -math.log2(1.0 - eta_tot) - bosonic_h(nbar_tot / (1.0 - eta_tot))


def tl_ree(eta_tot: float, nbar_tot: float) -> float:
    """Relative-entropy-of-entanglement upper bound for a thermal-loss channel.

    Adds -(nbar/(1-eta)) log2 eta on top of the unclamped rate, so it never
    falls below tl_rci. Once the output noise reaches the transmissivity the
    channel is entanglement breaking and its capacity is exactly 0; the
    expression touches 0 precisely at that point, and past it the bound is
    pinned to 0 rather than letting the expression grow again.
    """
    raw = _tl_rci_raw(eta_tot, nbar_tot)
    if nbar_tot >= eta_tot:
        return 0.0
    return max(0.0, raw - (nbar_tot / (1.0 - eta_tot)) * math.log2(eta_tot))


def plob_pure_loss(eta: float) -> float:
    """Exact two-way capacity of the pure-loss channel, -log2(1-eta)."""
    if not 0.0 < eta < 1.0 or math.isnan(eta):
        if eta == 1.0:
            raise DomainError("transmissivity 1 is divergent; treat as infinite capacity explicitly")
        raise DomainError(f"transmissivity must lie in (0, 1), got {eta}")
    return -math.log2(1.0 - eta)


class BoundKind(enum.Enum):
    RCI_LOWER = "rci-lower"
    SQUASHED_UPPER = "squashed-upper"
    REE_UPPER = "ree-upper"
    PLOB_EXACT = "plob-exact"


@dataclass(frozen=True)
class EdgeBounds:
    """Capacity bounds for one physical edge, each with its chosen direction."""

    lower: float
    upper: float
    lower_orientation: tuple[str, str]
    upper_orientation: tuple[str, str]
    lower_kind: BoundKind
    upper_kind: BoundKind

    def __post_init__(self):
        if self.lower < 0.0:
            raise DomainError(f"lower bound must be >= 0, got {self.lower}")
        if self.upper < self.lower - BOUND_ORDER_TOL:
            raise DomainError(f"bounds out of order: lower {self.lower} > upper {self.upper}")


def orientation_str(direction: tuple[str, str]) -> str:
    return f"{direction[0]}->{direction[1]}"


def _direction_bounds(edge: ChannelSpec, sender: NodeSpec, receiver: NodeSpec, fam: str):
    """(lower, upper, lower kind, upper kind) for one direction of use."""
    if fam == FAMILY_AD:
        p_tot = node_split_ad(as_damping(edge), sender, receiver)
        return ad_rci(p_tot), ad_squashed(p_tot), BoundKind.RCI_LOWER, BoundKind.SQUASHED_UPPER
    eta_tot, nbar_tot = node_split_tl(as_thermal(edge), sender, receiver)
    if eta_tot == 1.0:
        if nbar_tot == 0.0:
            return math.inf, math.inf, BoundKind.PLOB_EXACT, BoundKind.PLOB_EXACT
        raise DomainError("thermal edge with unit transmissivity and added noise is not modelled")
    if nbar_tot == 0.0:
        value = plob_pure_loss(eta_tot)
        return value, value, BoundKind.PLOB_EXACT, BoundKind.PLOB_EXACT
    return (
        tl_rci(eta_tot, nbar_tot),
        tl_ree(eta_tot, nbar_tot),
        BoundKind.RCI_LOWER,
        BoundKind.REE_UPPER,
    )


def edge_family(edge: ChannelSpec, node_a: NodeSpec, node_b: NodeSpec, fam: str | None = None) -> str:
    """Resolve the channel family of an edge and its endpoint internals."""
    present = {family(c) for c in (edge, node_a.recv, node_a.send, node_b.recv, node_b.send)}
    present.discard(None)
    if len(present) > 1:
        raise FamilyError(f"edge {node_a.id}-{node_b.id} mixes channel families {sorted(present)}")
    if present:
        found = present.pop()
        if fam is not None and fam != found:
            raise FamilyError(f"edge {node_a.id}-{node_b.id} is {found!r} but the graph family is {fam!r}")
        return found
    if fam is None:
        raise FamilyError(
            f"edge {node_a.id}-{node_b.id} is all-identity; channel family must be given explicitly"
        )
    return fam


def oriented_edge_bounds(
    edge: ChannelSpec, node_a: NodeSpec, node_b: NodeSpec, fam: str | None = None
) -> EdgeBounds:
    """Capacity bounds of an undirected edge, optimized over direction of use.

    Both directed compounds are evaluated; the lower and upper bounds are
    maximized over direction independently. Ties go to the lexicographically
    smaller (sender, receiver) id pair.
    """
    resolved = edge_family(edge, node_a, node_b, fam)
    if resolved not in (FAMILY_AD, FAMILY_TL):
        raise FamilyError(f"unknown channel family {resolved!r}")
    candidates = []
    for sender, receiver in ((node_a, node_b), (node_b, node_a)):
        lo, up, lo_kind, up_kind = _direction_bounds(edge, sender, receiver, resolved)
        candidates.append(((sender.id, receiver.id), lo, up, lo_kind, up_kind))
    candidates.sort(key=lambda c: c[0])
    best_lo = max(candidates, key=lambda c: c[1])
    best_up = max(candidates, key=lambda c: c[2])
    return EdgeBounds(
        lower=best_lo[1],
        upper=best_up[2],
        lower_orientation=best_lo[0],
        upper_orientation=best_up[0],
        lower_kind=best_lo[3],
        upper_kind=best_up[4],
    )
