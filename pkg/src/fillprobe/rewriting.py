"""String rewriting over the signed generator alphabet.

Free-group cancellation (x x^-1 -> empty) is hardwired into the
reduction engine; explicit rules sit on top of it.  Every explicit rule
must strictly decrease the shortlex order, so rewriting terminates and
local confluence (all critical pairs joinable) implies confluence.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from enum import Enum

from .errors import IncompleteSystemError
from .presentation import (
    GroupPresentation,
    Word,
    inverse_word,
    shortlex_key,
)

DEFAULT_MAX_RULES = 256
DEFAULT_MAX_LEN = 64
# Fairness cap: completion processes at most this many equations per rule
# budget unit before giving up.
_EQUATIONS_PER_RULE = 400


class RewriteStatus(Enum):
    CONFLUENT = "confluent"
    INCOMPLETE = "incomplete"


@dataclass(frozen=True)
class RewritingSystem:
    """Oriented rules (lhs -> rhs, lhs shortlex-greater) plus a status.

    The implicit cancellation rules are not stored but participate in
    reduction and in critical-pair analysis.
    """

    ngens: int
    rules: tuple
    status: RewriteStatus
    _table: dict = field(default=None, compare=False, repr=False)
    _maxlhs: int = field(default=0, compare=False, repr=False)

    def __post_init__(self):
        table = {}
        for lhs, rhs in self.rules:
            if shortlex_key(lhs) <= shortlex_key(rhs):
                raise ValueError(f"rule {lhs} -> {rhs} is not shortlex-reducing")
            table[tuple(lhs)] = tuple(rhs)
        maxlhs = max((len(l) for l in table), default=0)
        object.__setattr__(self, "_table", table)
        object.__setattr__(self, "_maxlhs", max(maxlhs, 2))

    @classmethod
    def empty(cls, ngens: int) -> "RewritingSystem":
        return cls(ngens, (), RewriteStatus.CONFLUENT)

    @property
    def confluent(self) -> bool:
        return self.status is RewriteStatus.CONFLUENT

    def reduce(self, word) -> Word:
        """Rewrite to an irreducible word (cancellation plus rules)."""
        table = self._table
        maxlhs = self._maxlhs
        out = []
        pending = list(reversed(word))
        while pending:
            x = pending.pop()
            if out and out[-1] == -x:
                out.pop()
                continue
            out.append(x)
            n = len(out)
            for length in range(min(maxlhs, n), 1, -1):
                rhs = table.get(tuple(out[n - length:]))
                if rhs is not None:
                    del out[n - length:]
                    pending.extend(reversed(rhs))
                    break
            else:
                if n >= 1:
                    rhs = table.get((out[-1],))
                    if rhs is not None:
                        out.pop()
                        pending.extend(reversed(rhs))
        return tuple(out)

    def rules_key(self) -> str:
        """Canonical serialization for cache keys."""
        return repr(sorted(self.rules))


def normal_form(word, rws: RewritingSystem) -> Word:
    """Unique irreducible descendant of a word; requires confluence."""
    if not rws.confluent:
        raise IncompleteSystemError(
            "normal forms require a confluent rewriting system")
    return rws.reduce(word)


def _cancellation_rules(ngens: int):
    rules = []
    for g in range(1, ngens + 1):
        rules.append(((g, -g), ()))
        rules.append(((-g, g), ()))
    return rules


def _critical_pair_sources(l1, r1, l2, r2):
    """Words with two distinct single-step reductions from rules 1 and 2.

    Yields (left_result, right_result) before normalization: proper
    overlaps (a suffix of l1 equals a prefix of l2) and strict
    inclusions of l2 inside l1.
    """
    n1, n2 = len(l1), len(l2)
    for o in range(1, min(n1, n2)):
        if l1[n1 - o:] == l2[:o]:
            yield r1 + l2[o:], l1[:n1 - o] + r2
    if n2 < n1:
        for i in range(n1 - n2 + 1):
            if l1[i:i + n2] == l2:
                yield r1, l1[:i] + r2 + l1[i + n2:]


def _all_pair_sources(rules_a, rules_b):
    for l1, r1 in rules_a:
        for l2, r2 in rules_b:
            yield from _critical_pair_sources(l1, r1, l2, r2)


def check_local_confluence(rws: RewritingSystem):
    """Return unresolved critical pairs (normalized, deduplicated).

    Empty result plus shortlex-reducing rules means the system is
    confluent (Newman's lemma), so the status may be set CONFLUENT.
    """
    working = list(rws.rules) + _cancellation_rules(rws.ngens)
    unresolved = []
    seen = set()
    for u, v in _all_pair_sources(working, working):
        a, b = rws.reduce(u), rws.reduce(v)
        if a == b:
            continue
        pair = (a, b) if shortlex_key(a) >= shortlex_key(b) else (b, a)
        if pair not in seen:
            seen.add(pair)
            unresolved.append(pair)
    return unresolved


def _orient(u, v):
    if u == v:
        return None
    return (u, v) if shortlex_key(u) > shortlex_key(v) else (v, u)


def _seed_rules(presentation: GroupPresentation):
    """One equation per relator: front half equals inverse of back half."""
    seeds = []
    for r in presentation.relators:
        h = (len(r) + 1) // 2
        seeds.append((r[:h], inverse_word(r[h:])))
    return seeds


def knuth_bendix_bounded(presentation: GroupPresentation,
                         max_rules: int = DEFAULT_MAX_RULES,
                         max_len: int = DEFAULT_MAX_LEN) -> RewritingSystem:
    """Bounded Knuth-Bendix completion seeded from the relators.

    Returns a CONFLUENT system if completion closes within the budget,
    otherwise an INCOMPLETE system carrying the partial rule set.
    Budget exhaustion is a status, never an exception.
    """
    ngens = presentation.num_generators
    seeds = _seed_rules(presentation)
    if max_rules < len(seeds):
        raise ValueError("max_rules below the relator-derived seed count")

    cancels = _cancellation_rules(ngens)
    table: dict = {}

    def reducer():
        return RewritingSystem(ngens, tuple(table.items()),
                               RewriteStatus.INCOMPLETE)

    # Priority queue of equations, smallest shortlex first (fairness).
    counter = 0
    heap = []

    def push(u, v):
        nonlocal counter
        heapq.heappush(heap, (shortlex_key(u), shortlex_key(v), counter, u, v))
        counter += 1

    for u, v in seeds:
        push(u, v)

    budget = _EQUATIONS_PER_RULE * max_rules
    processed = 0
    while heap:
        processed += 1
        if processed > budget:
            return reducer()
        _, _, _, u, v = heapq.heappop(heap)
        rs = reducer()
        pair = _orient(rs.reduce(u), rs.reduce(v))
        if pair is None:
            continue
        lhs, rhs = pair
        if len(lhs) > max_len or len(rhs) > max_len:
            return reducer()
        # Interreduce: rules whose lhs the new rule rewrites go back to
        # the queue; rhs sides are re-normalized in place.
        doomed = [l2 for l2 in table
                  if len(lhs) <= len(l2) and _contains(l2, lhs)]
        for l2 in doomed:
            push(l2, table.pop(l2))
        table[lhs] = rhs
        rs = reducer()
        for l2 in list(table):
            if l2 != lhs:
                table[l2] = rs.reduce(table[l2])
        if len(table) > max_rules:
            return reducer()
        current = list(table.items()) + cancels
        new_rule = (lhs, rhs)
        for other in current:
            for a, b in _critical_pair_sources(*new_rule, *other):
                push(a, b)
            if other != new_rule:
                for a, b in _critical_pair_sources(*other, *new_rule):
                    push(a, b)
    return RewritingSystem(ngens, tuple(sorted(table.items())),
                           RewriteStatus.CONFLUENT)


def _contains(big, small) -> bool:
    n, m = len(big), len(small)
    if m > n:
        return False
    return any(big[i:i + m] == small for i in range(n - m + 1))


def system_from_rules(ngens: int, rules, *, verify: bool = True) -> RewritingSystem:
    """Build a system from explicit rules, setting status by checking
    local confluence when ``verify`` is on."""
    canonical = tuple(sorted((tuple(l), tuple(r)) for l, r in rules))
    rws = RewritingSystem(ngens, canonical, RewriteStatus.INCOMPLETE)
    if verify and not check_local_confluence(rws):
        rws = RewritingSystem(ngens, canonical, RewriteStatus.CONFLUENT)
    return rws
