"""Weakly-regular lattice cells, connectivity constants, and threshold solving.

Two cell types are generated: a triangular lattice (interior degree 6, every
adjacent pair sharing 2 neighbours) and a square lattice with both diagonals
(interior degree 8, sharing 4 along axes and 2 along diagonals). The
connectivity constants delta and omega scale the end-to-end capacity target
down to a per-edge requirement: bulk edges must carry C/delta, user-connected
edges C/omega. Solving bound_function(xi) = target/scale for the physical
parameter xi (edge length, internal loss, or receiver noise) yields the
tolerable-parameter thresholds; running the solve with the lower and the upper
bound function brackets the true threshold.

With every edge at one uniform value c, these lattices satisfy the threshold
conditions outright and the flooding capacity equals k*c exactly (the
user-isolating cut is minimal); ``verify_theorem2`` checks that consequence
numerically.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import qkd as qkd_mod
from .bounds import ad_rci, ad_squashed, plob_pure_loss, tl_rci, tl_ree
from .channels import (
    FAMILY_AD,
    FAMILY_TL,
    ChannelSpec,
    FibreParams,
    Identity,
    NodeSpec,
    as_damping,
    as_thermal,
    compose_ad,
    compose_tl,
    family,
)
from .errors import DomainError, FamilyError, MonotonicityError, NotAttainableError
from .network import Edge, NetworkGraph

# Bisection tolerances: relative width in xi, relative residual in the bound.
XI_REL_TOL = 1e-9
RESIDUAL_REL_TOL = 1e-6
# Initial search bracket in the parameter's natural units, expanded by
# doubling outward at most this many times.
BRACKET_START = (1e-6, 1e3)
MAX_EXPANSIONS = 60
MONOTONE_SAMPLES = 64

PARAM_EDGE_LENGTH = "edgeLength"
PARAM_INTERNAL_LOSS = "internalLoss"
PARAM_RECEIVER_NOISE = "receiverNoise"

DIRECTION_MAX = "maxTolerable"
DIRECTION_MIN = "minRequired"

CELL_TRIANGULAR = "triangular6"
CELL_MANHATTAN = "manhattan8"

# Per cell type: degree, commonality multiset superset, geometric density factor.
_CELLS = {
    CELL_TRIANGULAR: (6, ((2, 2, 2, 2, 2, 2),), 2.0 / math.sqrt(3.0)),
    CELL_MANHATTAN: (8, ((2, 2, 2, 2, 4, 4, 4, 4),), 2.0),
}


@dataclass(frozen=True)
class WrnSpec:
    """A uniform weakly-regular lattice patch with one device template.

    ``radius`` counts concentric cell layers around the centre; the generated
    patch spans two node rings per cell layer. The recv/send template applies
    to every node, end users included; leave both Identity for ideal devices.
    """

    cell_type: str
    radius: int
    edge_length_km: float
    family: str
    recv: ChannelSpec = Identity()
    send: ChannelSpec = Identity()
    gamma: float = 0.02
    nbar_B: float = 0.002
    k: int = field(init=False)
    commonalities: tuple = field(init=False)

    def __post_init__(self):
        if self.cell_type not in _CELLS:
            raise DomainError(f"cell type must be one of {sorted(_CELLS)}, got {self.cell_type!r}")
        if self.radius < 2:
            raise DomainError(f"radius must be >= 2 so the users sit deep inside, got {self.radius}")
        if self.edge_length_km <= 0.0:
            raise DomainError(f"edge length must be > 0 km, got {self.edge_length_km}")
        if self.family not in (FAMILY_AD, FAMILY_TL):
            raise DomainError(f"family must be 'ad' or 'tl', got {self.family!r}")
        for spec in (self.recv, self.send):
            fam = family(spec)
            if fam is not None and fam != self.family:
                raise FamilyError(f"internal template {spec!r} does not match family {self.family!r}")
        k, lambdas, _ = _CELLS[self.cell_type]
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "commonalities", lambdas)

    @property
    def xi_geom(self) -> float:
        return _CELLS[self.cell_type][2]


def delta(k: int, commonalities) -> int:
    """Bulk connectivity constant: min over multisets of sum(k - entry - 1)."""
    lambdas = tuple(tuple(l) for l in commonalities)
    if not lambdas:
        raise DomainError("the commonality superset must not be empty")
    for lam in lambdas:
        if len(lam) != k:
            raise DomainError(f"each commonality multiset needs exactly k={k} entries, got {lam}")
        for entry in lam:
            if not 0 <= entry <= k - 1:
                raise DomainError(f"commonality entries must lie in [0, {k - 1}], got {entry}")
    return min(sum(k - entry - 1 for entry in lam) for lam in lambdas)


def omega(k: int, delta_value: int) -> Fraction:
    """User-edge connectivity constant delta*(k-1)/(delta-k+1), exact."""
    if delta_value <= k - 1:
        raise DomainError(f"omega needs delta > k-1, got delta={delta_value}, k={k}")
    return Fraction(delta_value * (k - 1), delta_value - (k - 1))


def _triangular_coords(rings: int):
    coords = []
    for q in range(-rings, rings + 1):
        for r in range(-rings, rings + 1):
            if (abs(q) + abs(r) + abs(q + r)) // 2 <= rings:
                coords.append((q, r))
    return coords


_TRI_HALF_DIRS = ((1, 0), (0, 1), (-1, 1))
_TRI_ALL_DIRS = ((1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1))
_KING_HALF_DIRS = ((1, 0), (0, 1), (1, 1), (1, -1))


def _node_id(coord: tuple[int, int]) -> str:
    return f"n{coord[0]}_{coord[1]}"


def generate(spec: WrnSpec) -> NetworkGraph:
    """Build the lattice patch as a NetworkGraph with uniform fibre edges.

    End users are the two lattice nodes at offsets (-2, 0) and (2, 0) from the
    centre: four hops apart, non-adjacent, and at least two node rings away
    from the boundary for every allowed radius.
    """
    rings = 2 * spec.radius
    if spec.cell_type == CELL_TRIANGULAR:
        coords = _triangular_coords(rings)
        half_dirs = _TRI_HALF_DIRS
        member = set(coords)
    else:
        coords = [(x, y) for x in range(-rings, rings + 1) for y in range(-rings, rings + 1)]
        half_dirs = _KING_HALF_DIRS
        member = set(coords)
    users = ((-2, 0), (2, 0))
    fibre = FibreParams(length_km=spec.edge_length_km, gamma=spec.gamma, nbar_B=spec.nbar_B)
    nodes = {}
    for coord in coords:
        role = "user" if coord in users else "repeater"
        node_id = _node_id(coord)
        nodes[node_id] = NodeSpec(node_id, recv=spec.recv, send=spec.send, role=role)
    edges = []
    for coord in coords:
        for dx, dy in half_dirs:
            other = (coord[0] + dx, coord[1] + dy)
            if other in member:
                edges.append(Edge(_node_id(coord), _node_id(other), fibre=fibre))
    graph = NetworkGraph(
        nodes=nodes,
        edges=tuple(edges),
        users=(_node_id(users[0]), _node_id(users[1])),
        family=spec.family,
    )
    _check_weak_regularity(graph, spec)
    return graph


def _check_weak_regularity(graph: NetworkGraph, spec: WrnSpec) -> None:
    """Interior nodes must have degree k and a commonality multiset in the superset."""
    neighbours: dict[str, set[str]] = {n: set() for n in graph.nodes}
    for edge in graph.edges:
        neighbours[edge.a].add(edge.b)
        neighbours[edge.b].add(edge.a)
    allowed = {tuple(sorted(lam)) for lam in spec.commonalities}
    for node, nbrs in neighbours.items():
        if len(nbrs) != spec.k:
            continue  # boundary node of the finite patch
        lam = tuple(sorted(len(neighbours[other] & nbrs) for other in nbrs))
        if lam not in allowed:
            raise DomainError(f"node {node} has commonality multiset {lam}, outside the superset")
    for user in graph.users:
        if len(neighbours[user]) != spec.k:
            raise DomainError(f"end user {user} is not an interior node")


def node_count(spec: WrnSpec) -> int:
    rings = 2 * spec.radius
    if spec.cell_type == CELL_TRIANGULAR:
        return 3 * rings * rings + 3 * rings + 1
    return (2 * rings + 1) ** 2


def edge_count(spec: WrnSpec) -> int:
    rings = 2 * spec.radius
    if spec.cell_type == CELL_TRIANGULAR:
        return 9 * rings * rings + 3 * rings
    return 16 * rings * rings + 4 * rings


@dataclass(frozen=True)
class ThresholdResult:
    """Bracketed threshold for one physical parameter at one scale."""

    param: str
    scale_name: str  # "delta" | "omega"
    scale: float
    target: float
    direction: str
    from_lower_fn: float  # xi* solved on the achievable (lower) bound
    from_upper_fn: float  # xi* solved on the upper bound

    @property
    def bracket(self) -> tuple[float, float]:
        lo, hi = sorted((self.from_lower_fn, self.from_upper_fn))
        return (lo, hi)

    def as_json(self) -> dict:
        x_name = self.scale_name
        return {
            "param": self.param,
            "x": x_name,
            "bracket": list(self.bracket),
            "direction": self.direction,
            "target": self.target,
        }


@dataclass(frozen=True)
class DensityResult:
    """Least nodes per km^2 compatible with a maximum link length."""

    d_max: float
    xi_geom: float
    rho_min: float


def min_nodal_density(d_max: float, cell_type: str) -> DensityResult:
    if cell_type not in _CELLS:
        raise DomainError(f"cell type must be one of {sorted(_CELLS)}, got {cell_type!r}")
    if d_max <= 0.0 or math.isnan(d_max):
        raise DomainError(f"maximum link length must be > 0 km, got {d_max}")
    xi_geom = _CELLS[cell_type][2]
    return DensityResult(d_max=d_max, xi_geom=xi_geom, rho_min=xi_geom / (d_max * d_max))


def _scan_direction(fn: Callable[[float], float], lo: float, hi: float) -> str:
    """Classify fn as non-increasing or non-decreasing on [lo, hi] from samples."""
    if lo <= 0.0:
        raise DomainError(f"search bracket must be positive, got [{lo}, {hi}]")
    ratio = (hi / lo) ** (1.0 / (MONOTONE_SAMPLES - 1))
    xs = [lo * ratio**i for i in range(MONOTONE_SAMPLES - 1)] + [hi]
    values = [fn(x) for x in xs]
    rises = any(b > a for a, b in zip(values, values[1:]))
    falls = any(b < a for a, b in zip(values, values[1:]))
    if rises and falls:
        raise MonotonicityError("bound function is not monotone on the search bracket")
    if not rises and not falls:
        raise MonotonicityError("bound function is constant on the search bracket")
    return DIRECTION_MIN if rises else DIRECTION_MAX


def _solve(
    fn: Callable[[float], float],
    target: float,
    scale: float,
    direction: str | None,
    bracket: tuple[float, float],
) -> tuple[float, str]:
    if target <= 0.0 or math.isnan(target):
        raise DomainError(f"capacity target must be > 0, got {target}")
    if scale <= 0.0:
        raise DomainError(f"scale must be > 0, got {scale}")
    goal = target / float(scale)
    lo, hi = bracket
    found = _scan_direction(fn, lo, hi)
    if direction is not None and direction != found:
        raise MonotonicityError(f"bound function is {found}, caller expected {direction}")
    sign = -1.0 if found == DIRECTION_MAX else 1.0

    def residual(x: float) -> float:
        return sign * (fn(x) - goal)

    r_lo, r_hi = residual(lo), residual(hi)
    # Expanding past the bound function's own domain (fibre transmissivity
    # saturating at 1.0, say) means no representable parameter certifies
    # the target, which is a solvability verdict and not a caller mistake.
    try:
        expansions = 0
        while r_lo > 0.0 and expansions < MAX_EXPANSIONS:
            lo /= 2.0
            r_lo = residual(lo)
            expansions += 1
        expansions = 0
        while r_hi < 0.0 and expansions < MAX_EXPANSIONS:
            hi *= 2.0
            r_hi = residual(hi)
            expansions += 1
    except DomainError as exc:
        raise NotAttainableError(
            f"per-edge target {goal:g} is out of reach: {exc}"
        ) from exc
    if r_lo > 0.0 or r_hi < 0.0:
        raise NotAttainableError(
            f"no parameter value in ({lo:g}, {hi:g}) reaches the per-edge target {goal:g}"
        )
    if r_lo == 0.0:
        return lo, found
    if r_hi == 0.0:
        return hi, found
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        r_mid = residual(mid)
        if r_mid == 0.0:
            lo = hi = mid
            break
        if r_mid < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= XI_REL_TOL * max(abs(lo), abs(hi)):
            break
    xi = 0.5 * (lo + hi)
    achieved = fn(xi)
    if abs(achieved - goal) > RESIDUAL_REL_TOL * goal:
        raise MonotonicityError(
            f"bisection landed at bound value {achieved:g}, target {goal:g}; "
            "the function may step discontinuously"
        )
    return xi, found


def solve_threshold(
    bound_fn: Callable[[float], float],
    target: float,
    scale: float,
    direction: str | None = None,
    bracket: tuple[float, float] = BRACKET_START,
) -> float:
    """Parameter value where scale * bound_fn(xi) crosses the capacity target.

    ``bound_fn`` must be monotone on the bracket (verified by sampling).
    Bisection runs to relative 1e-9 in xi and the result reproduces
    target/scale to relative 1e-6. Raises NotAttainableError when the target
    lies outside the function's range even after bracket expansion, and
    MonotonicityError for non-monotone input.
    """
    xi, _ = _solve(bound_fn, target, scale, direction, bracket)
    return xi


def _fibre_eta(spec: WrnSpec, d: float) -> float:
    return 10.0 ** (-spec.gamma * d)


def _tl_pair(spec: WrnSpec, d: float, recv: tuple[float, float], send: tuple[float, float]):
    eta = _fibre_eta(spec, d)
    return compose_tl([send, (eta, spec.nbar_B), recv])


def _tl_bound(pair: tuple[float, float], upper: bool) -> float:
    eta_tot, nbar_tot = pair
    if eta_tot >= 1.0:
        raise DomainError("degenerate edge with unit transmissivity in a threshold solve")
    if nbar_tot == 0.0:
        return plob_pure_loss(eta_tot)
    return tl_ree(eta_tot, nbar_tot) if upper else tl_rci(eta_tot, nbar_tot)


def bound_functions(
    spec: WrnSpec,
    param: str,
    qkd_setup: qkd_mod.QkdSetup | None = None,
) -> tuple[Callable[[float], float], Callable[[float], float], tuple[float, float]]:
    """(lower fn, upper fn, start bracket) for one tunable parameter.

    The remaining parameters are frozen from the spec. With a QKD setup the
    receiver template becomes ThermalLoss(tau_eff, nbar_r(eta(d))) and the
    sender is ideal; that combination only applies to thermal-loss lattices
    varied over edge length.
    """
    if param == PARAM_EDGE_LENGTH:
        if spec.family == FAMILY_AD:
            if qkd_setup is not None:
                raise FamilyError("QKD receiver models apply to thermal-loss lattices only")
            p_send = as_damping(spec.send)
            p_recv = as_damping(spec.recv)

            def p_tot(d: float) -> float:
                return compose_ad([p_send, 1.0 - _fibre_eta(spec, d), p_recv])

            return (lambda d: ad_rci(p_tot(d)), lambda d: ad_squashed(p_tot(d)), BRACKET_START)
        if qkd_setup is not None:
            def pair(d: float):
                eta = _fibre_eta(spec, d)
                recv = (qkd_setup.tau_eff, qkd_mod.receiver_noise(qkd_setup, eta))
                return compose_tl([(1.0, 0.0), (eta, spec.nbar_B), recv])
        else:
            recv_t = as_thermal(spec.recv)
            send_t = as_thermal(spec.send)

            def pair(d: float):
                return _tl_pair(spec, d, recv_t, send_t)

        return (lambda d: _tl_bound(pair(d), False), lambda d: _tl_bound(pair(d), True), BRACKET_START)

    if param == PARAM_INTERNAL_LOSS:
        if spec.family != FAMILY_AD:
            raise FamilyError("internal loss is the damping-family parameter")
        if qkd_setup is not None:
            raise FamilyError("QKD receiver models apply to thermal-loss lattices only")
        p_edge = 1.0 - _fibre_eta(spec, spec.edge_length_km)

        def p_tot_int(p_int: float) -> float:
            return compose_ad([p_int, p_edge])

        bracket = (BRACKET_START[0], 1.0 - 1e-9)
        return (lambda p: ad_rci(p_tot_int(p)), lambda p: ad_squashed(p_tot_int(p)), bracket)

    if param == PARAM_RECEIVER_NOISE:
        if spec.family != FAMILY_TL:
            raise FamilyError("receiver noise is the thermal-family parameter")
        tau_r = as_thermal(spec.recv)[0]
        send_t = as_thermal(spec.send)

        def pair_noise(nbar_r: float):
            return _tl_pair(spec, spec.edge_length_km, (tau_r, nbar_r), send_t)

        return (
            lambda n: _tl_bound(pair_noise(n), False),
            lambda n: _tl_bound(pair_noise(n), True),
            BRACKET_START,
        )

    raise DomainError(
        f"param must be one of {PARAM_EDGE_LENGTH!r}, {PARAM_INTERNAL_LOSS!r}, "
        f"{PARAM_RECEIVER_NOISE!r}, got {param!r}"
    )


def connectivity(spec: WrnSpec) -> tuple[int, Fraction]:
    d = delta(spec.k, spec.commonalities)
    if d <= spec.k:
        warnings.warn(
            f"delta={d} is not above k={spec.k}; threshold scaling is degenerate",
            RuntimeWarning,
            stacklevel=2,
        )
    return d, omega(spec.k, d)


def threshold_report(
    spec: WrnSpec,
    target: float,
    param: str,
    qkd_setup: qkd_mod.QkdSetup | None = None,
) -> tuple[ThresholdResult, ThresholdResult]:
    """Bracketed thresholds for bulk edges (scale delta) and user edges (scale omega)."""
    lower_fn, upper_fn, bracket = bound_functions(spec, param, qkd_setup)
    d_val, w_val = connectivity(spec)
    results = []
    for scale_name, scale in (("delta", float(d_val)), ("omega", float(w_val))):
        xi_lo, direction = _solve(lower_fn, target, scale, None, bracket)
        xi_up, direction_up = _solve(upper_fn, target, scale, None, bracket)
        if direction_up != direction:
            raise MonotonicityError("lower and upper bound functions disagree in direction")
        results.append(
            ThresholdResult(
                param=param,
                scale_name=scale_name,
                scale=scale,
                target=target,
                direction=direction,
                from_lower_fn=xi_lo,
                from_upper_fn=xi_up,
            )
        )
    return results[0], results[1]


def verify_theorem2(spec: WrnSpec, edge_value: float, tol: float = 1e-9) -> bool:
    """Check the uniform-value consequence: flooding capacity equals k * c.

    Annotates the generated lattice with the exact uniform value and compares
    the max-flow result against k * c and against the user-isolation cut.
    """
    if not isinstance(spec, WrnSpec):
        raise DomainError("verify_theorem2 needs a WrnSpec; arbitrary graphs are not weakly regular")
    if edge_value <= 0.0 or math.isnan(edge_value):
        raise DomainError(f"edge value must be > 0, got {edge_value}")
    from .network import annotate_uniform, min_neighbourhood_capacity
    from .routing import max_flow

    connectivity(spec)  # surfaces the degenerate-delta warning if applicable
    graph = generate(spec)
    bg = annotate_uniform(graph, edge_value)
    flood = max_flow(bg, "lower").value
    isolation = min_neighbourhood_capacity(bg, "lower")
    expected = spec.k * edge_value
    return abs(flood - expected) <= tol and abs(isolation - expected) <= tol
