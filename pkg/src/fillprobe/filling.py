"""Filling norms of 1-boundaries in a truncated complex.

The rational norm is the linear program

    min sum(a+ + a-)   s.t.   d2 (a+ - a-) = b,   a+, a- >= 0,

whose optimum at a basic solution is automatically rational; the
integral norm solves the same program with integrality imposed.  Values
computed in a ball are exact for the truncated complex and upper bounds
for the full complex; certificates carry that distinction explicitly
and never claim global exactness.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .complexes import Chain, TwoComplex, get_complex
from .errors import NotABoundaryError, NotACycleError
from .exactlp import LinearProgram, LPStatus, solve_ilp, solve_lp
from .presentation import GroupPresentation
from .rationals import Q, qstr
from .rewriting import RewritingSystem

RING_Q = "Q"
RING_Z = "Z"

STATUS_UPPER_BOUND = "upper-bound"
STATUS_EXACT_WITHIN_BALL = "exact-within-ball"


def l1_norm(chain: Chain):
    """Sum of absolute values of the coefficients."""
    return chain.l1()


@dataclass(frozen=True)
class FillingCertificate:
    """An exact filling with its norm value and provenance.

    ``status`` records soundness: values are exact for the truncated
    complex at ``radius`` and upper bounds for the untruncated one.
    ``stabilized`` marks agreement across two consecutive radii.
    """

    value: object
    witness: Chain
    ring: str
    radius: int
    status: str = STATUS_UPPER_BOUND
    stabilized: bool = False

    def to_dict(self) -> dict:
        return {
            "value": qstr(self.value),
            "ring": self.ring,
            "radius": self.radius,
            "status": self.status,
            "stabilized": self.stabilized,
            "witness": {str(cell): qstr(c)
                        for cell, c in sorted(self.witness.entries.items())},
            "witness_l1": qstr(self.witness.l1()),
        }


@dataclass(frozen=True)
class BoundaryCheck:
    fillable: bool
    witness: Optional[Chain] = None


def _require_cycle(b: Chain, complex_: TwoComplex):
    if b.dimension != 1:
        raise NotACycleError("expected a 1-chain")
    if b.entries and max(b.entries) >= complex_.ball.num_edges:
        raise NotACycleError("chain indexes edges outside this complex")
    if not complex_.apply_d1(b).is_zero():
        raise NotACycleError("chain is not a cycle (nonzero boundary)")


def _filling_program(b: Chain, complex_: TwoComplex):
    """Reduced LP over active edge rows, or None when some edge of b
    is covered by no cell (immediately infeasible)."""
    covered = set()
    for col in complex_.d2:
        covered.update(col)
    if any(e not in covered for e in b.entries):
        return None
    row_of = {e: i for i, e in enumerate(sorted(covered | set(b.entries)))}
    nc = complex_.num_cells
    rows = [dict() for _ in row_of]
    for ci, col in enumerate(complex_.d2):
        pos, neg = 2 * ci, 2 * ci + 1
        for e, inc in col.items():
            r = rows[row_of[e]]
            r[pos] = Q(inc)
            r[neg] = Q(-inc)
    rhs = [Q(0)] * len(row_of)
    for e, coeff in b.entries.items():
        rhs[row_of[e]] = coeff
    objective = [Q(1)] * (2 * nc)
    return LinearProgram.make(2 * nc, rows, rhs, objective)


def _witness_chain(num_cells: int, witness: dict) -> Chain:
    entries: dict = {}
    for j, v in witness.items():
        cell, part = divmod(j, 2)
        entries[cell] = entries.get(cell, Q(0)) + (v if part == 0 else -v)
    return Chain(2, entries)


def is_boundary(b: Chain, complex_: TwoComplex, *,
                pivot_rule: str = "bland") -> BoundaryCheck:
    """LP feasibility of d2 a = b within the ball.

    A negative answer never certifies that b fails to bound in the full
    complex; it only says no filling exists at this truncation.
    """
    _require_cycle(b, complex_)
    if b.is_zero():
        return BoundaryCheck(True, Chain(2, {}))
    lp = _filling_program(b, complex_)
    if lp is None:
        return BoundaryCheck(False)
    feasibility = LinearProgram.make(lp.num_vars, lp.rows, lp.rhs,
                                     [Q(0)] * lp.num_vars)
    result = solve_lp(feasibility, pivot_rule=pivot_rule)
    if result.status is LPStatus.INFEASIBLE:
        return BoundaryCheck(False)
    witness = _witness_chain(complex_.num_cells, result.witness)
    return BoundaryCheck(True, witness)


def _certificate(b: Chain, complex_: TwoComplex, ring: str, value, witness: Chain,
                 status: str = STATUS_UPPER_BOUND,
                 stabilized: bool = False) -> FillingCertificate:
    if not (complex_.apply_d2(witness) + (-b)).is_zero():
        raise AssertionError("filling witness does not bound b")
    if witness.l1() != value:
        raise AssertionError("filling witness norm does not match value")
    if ring == RING_Z and not witness.is_integral():
        raise AssertionError("integral certificate has fractional witness")
    return FillingCertificate(value, witness, ring, complex_.ball.radius,
                              status, stabilized)


def filling_norm_q(b: Chain, complex_: TwoComplex, *,
                   pivot_rule: str = "bland") -> FillingCertificate:
    """Minimal l1 mass of a rational filling within the ball."""
    _require_cycle(b, complex_)
    if b.is_zero():
        return _certificate(b, complex_, RING_Q, Q(0), Chain(2, {}))
    lp = _filling_program(b, complex_)
    if lp is None:
        raise NotABoundaryError("no filling within this ball (uncovered edge)")
    result = solve_lp(lp, pivot_rule=pivot_rule)
    if result.status is LPStatus.INFEASIBLE:
        raise NotABoundaryError("no filling within this ball")
    witness = _witness_chain(complex_.num_cells, result.witness)
    return _certificate(b, complex_, RING_Q, result.value, witness)


def filling_norm_z(b: Chain, complex_: TwoComplex, *,
                   node_budget: int = 100_000,
                   pivot_rule: str = "bland") -> FillingCertificate:
    """Minimal l1 mass of an integral filling within the ball (ILP)."""
    _require_cycle(b, complex_)
    if not b.is_integral():
        raise NotACycleError("integral norm needs an integral boundary")
    if b.is_zero():
        return _certificate(b, complex_, RING_Z, Q(0), Chain(2, {}))
    lp = _filling_program(b, complex_)
    if lp is None:
        raise NotABoundaryError("no filling within this ball (uncovered edge)")
    result = solve_ilp(lp, node_budget=node_budget, pivot_rule=pivot_rule)
    if result.status is LPStatus.INFEASIBLE:
        raise NotABoundaryError("no integral filling within this ball")
    witness = _witness_chain(complex_.num_cells, result.witness)
    return _certificate(b, complex_, RING_Z, result.value, witness)


def default_initial_radius(b: Chain, presentation: GroupPresentation) -> int:
    """Heuristic starting radius: half the boundary mass plus one plus
    the longest relator."""
    half = int(b.l1() // 2)
    return half + 1 + presentation.max_relator_length()


def norm_with_escalation(b: Chain, presentation: GroupPresentation,
                         rws: RewritingSystem, r_start: int, r_max: int, *,
                         ring: str = RING_Q,
                         vertex_cap: int = 200_000,
                         node_budget: int = 100_000,
                         pivot_rule: str = "bland",
                         cache_dir: str | None = None) -> FillingCertificate:
    """Compute the norm at growing radii, stopping once the value repeats
    at two consecutive radii.

    The repeat is reported via ``stabilized`` and the certificate status
    becomes exact-within-ball; no claim about the untruncated complex is
    ever made.  The chain must have been built at a radius <= r_start
    (edge indices are stable under ball growth).
    """
    if r_start > r_max:
        raise ValueError("r_start must not exceed r_max")
    previous = None
    last_error = None
    for radius in range(r_start, r_max + 1):
        complex_ = get_complex(presentation, rws, radius,
                               vertex_cap=vertex_cap, cache_dir=cache_dir)
        if b.entries and max(b.entries) >= complex_.ball.num_edges:
            # the loop is not contained in this ball (edge indices are
            # stable, so out-of-range indices mean exactly that)
            last_error = NotABoundaryError(
                f"boundary support leaves the radius-{radius} ball")
            continue
        try:
            if ring == RING_Z:
                cert = filling_norm_z(b, complex_, node_budget=node_budget,
                                      pivot_rule=pivot_rule)
            else:
                cert = filling_norm_q(b, complex_, pivot_rule=pivot_rule)
        except NotABoundaryError as exc:
            last_error = exc
            previous = None
            continue
        if previous is not None and previous.value == cert.value:
            return FillingCertificate(cert.value, cert.witness, cert.ring,
                                      cert.radius, STATUS_EXACT_WITHIN_BALL,
                                      stabilized=True)
        previous = cert
    if previous is not None:
        return previous
    raise last_error if last_error is not None else NotABoundaryError(
        "no filling within the allowed radii")
