"""Strategy AST, location resolution, and the transactional evaluator.

Expressions: id | fail | R(loc) | S;S | S||S | S* | S or S, plus an At
wrapper that factors one location list over a subexpression.  Failure is
transactional: whenever a subexpression reports failure the net is exactly
as it was when that subexpression started.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .errors import StepLimitExceeded, UnknownRule, UnknownSelection, UnlocatedRule
from .net import AgentPort, Net, Redex
from .rules import (
    RedexSet,
    RuleSet,
    RewriteDelta,
    apply_rule,
    undo_delta,
    update_redexes,
    update_redexes_undo,
)

DEFAULT_MAX_STEPS = 1_000_000


# -- selectors and locations -------------------------------------------------

@dataclass(frozen=True, slots=True)
class AllSel:
    pass


@dataclass(frozen=True, slots=True)
class NamedSel:
    name: str


@dataclass(frozen=True, slots=True)
class InterfaceSel:
    inner: "Selector"


@dataclass(frozen=True, slots=True)
class SuccessorsSel:
    inner: "Selector"


Selector = Union[AllSel, NamedSel, InterfaceSel, SuccessorsSel]


@dataclass(frozen=True, slots=True)
class Location:
    selector: Selector
    depth: int  # -1 = closure to fixpoint


# -- expression nodes --------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Id:
    pass


@dataclass(frozen=True, slots=True)
class Fail:
    pass


@dataclass(frozen=True, slots=True)
class Apply:
    rule: str
    loc: Optional[Location] = None


@dataclass(frozen=True, slots=True)
class Seq:
    left: "StrategyExpr"
    right: "StrategyExpr"


@dataclass(frozen=True, slots=True)
class Par:
    left: "StrategyExpr"
    right: "StrategyExpr"


@dataclass(frozen=True, slots=True)
class Star:
    body: "StrategyExpr"


@dataclass(frozen=True, slots=True)
class Or:
    left: "StrategyExpr"
    right: "StrategyExpr"


@dataclass(frozen=True, slots=True)
class At:
    body: "StrategyExpr"
    locations: tuple[Location, ...]


StrategyExpr = Union[Id, Fail, Apply, Seq, Par, Star, Or, At]


# -- locations ---------------------------------------------------------------

def _resolve_selector(net: Net, sel: Selector) -> Optional[set[int]]:
    """Agent set for a selector; None stands for every agent."""
    if isinstance(sel, AllSel):
        return None
    if isinstance(sel, NamedSel):
        members = net.selections.get(sel.name)
        if members is None:
            raise UnknownSelection(f"no selection named {sel.name!r}")
        return set(members)
    inner = _resolve_selector(net, sel.inner)
    if inner is None:
        inner = set(net.agents)
    if isinstance(sel, InterfaceSel):
        return interface_selector(net, inner)
    return successors_selector(net, inner)


def _principal_neighbours(net: Net, aid: int) -> list[int]:
    """Agents one principal-carrying edge away from aid."""
    out = []
    arity = net.signature.arity(net.agents[aid])
    for port in range(arity + 1):
        peer = net.peer(AgentPort(aid, port))
        if isinstance(peer, AgentPort) and (port == 0 or peer.port == 0):
            out.append(peer.agent)
    return out


def _close_region(net: Net, start: set[int], depth: int) -> set[int]:
    region = set(start)
    frontier = set(start)
    rounds = 0
    while frontier and (depth < 0 or rounds < depth):
        rounds += 1
        grown: set[int] = set()
        for aid in frontier:
            for nb in _principal_neighbours(net, aid):
                if nb not in region:
                    region.add(nb)
                    grown.add(nb)
        frontier = grown
    return region


def _resolve_region(net: Net, loc: Location) -> Optional[set[int]]:
    """Like resolve_location but keeps the everywhere case as None."""
    start = _resolve_selector(net, loc.selector)
    if start is None:
        return None
    if loc.depth == 0:
        return start
    return _close_region(net, start, loc.depth)


def resolve_location(net: Net, loc: Location) -> set[int]:
    region = _resolve_region(net, loc)
    return set(net.agents) if region is None else region


def interface_selector(net: Net, inner: set[int]) -> set[int]:
    """Members of inner wired to anything outside inner (agent or free port)."""
    out = set()
    for aid in inner:
        arity = net.signature.arity(net.agents[aid])
        for port in range(arity + 1):
            peer = net.peer(AgentPort(aid, port))
            if peer is None:
                continue
            if not isinstance(peer, AgentPort) or peer.agent not in inner:
                out.add(aid)
                break
    return out


def successors_selector(net: Net, inner: set[int]) -> set[int]:
    """Outside agents one principal-carrying edge away from inner."""
    out = set()
    for aid in inner:
        arity = net.signature.arity(net.agents[aid])
        for port in range(arity + 1):
            peer = net.peer(AgentPort(aid, port))
            if (
                isinstance(peer, AgentPort)
                and peer.agent not in inner
                and (port == 0 or peer.port == 0)
            ):
                out.add(peer.agent)
    return out


def match_rule_at(net, redexes: RedexSet, rule, region: Optional[set[int]]) -> Optional[Redex]:
    """Smallest-id redex for rule's symbol pair with both agents in region."""
    return redexes.smallest(rule.lhs[0], rule.lhs[1], region)


# -- elaboration -------------------------------------------------------------

def _push(expr: StrategyExpr, loc: Optional[Location]) -> StrategyExpr:
    if isinstance(expr, (Id, Fail)):
        return expr
    if isinstance(expr, Apply):
        got = expr.loc if expr.loc is not None else loc
        if got is None:
            raise UnlocatedRule(f"rule {expr.rule} has no location")
        return Apply(expr.rule, got)
    if isinstance(expr, Seq):
        return Seq(_push(expr.left, loc), _push(expr.right, loc))
    if isinstance(expr, Par):
        return Par(_push(expr.left, loc), _push(expr.right, loc))
    if isinstance(expr, Or):
        return Or(_push(expr.left, loc), _push(expr.right, loc))
    if isinstance(expr, Star):
        return Star(_push(expr.body, loc))
    if isinstance(expr, At):
        parts = [_push(expr.body, inner) for inner in expr.locations]
        out = parts[0]
        for part in parts[1:]:
            out = Seq(out, part)
        return out
    raise TypeError(f"not a strategy node: {expr!r}")


def elaborate(expr: StrategyExpr) -> StrategyExpr:
    """Push At locations down to the Apply leaves; innermost wins.

    Raises UnlocatedRule if any rule application ends up with no location.
    """
    return _push(expr, None)


# -- evaluation --------------------------------------------------------------

@dataclass(slots=True)
class _Rec:
    rule_name: str
    agents: tuple[int, int]
    delta: RewriteDelta
    group: int


@dataclass
class Outcome:
    status: str  # "success" | "failure"
    steps: list[tuple[str, tuple[int, int]]]
    groups: list[list[tuple[str, tuple[int, int]]]]

    @property
    def ok(self) -> bool:
        return self.status == "success"


class Evaluator:
    def __init__(self, net: Net, redexes: RedexSet, rules: RuleSet,
                 max_steps: int = DEFAULT_MAX_STEPS):
        self.net = net
        self.rs = redexes
        self.rules = rules
        self.cap = max_steps
        self.records: list[_Rec] = []
        self._next_group = 0

    # one committed rewrite; group ties Par composites together
    def _commit(self, rule, redex: Redex, group: int) -> None:
        if len(self.records) >= self.cap:
            raise StepLimitExceeded(f"committed step cap {self.cap} exceeded")
        delta = apply_rule(self.net, redex, rule)
        update_redexes(self.rs, delta, self.net)
        self.records.append(_Rec(rule.name, (redex.left_agent, redex.right_agent), delta, group))

    def mark(self) -> int:
        return len(self.records)

    def rollback(self, mark: int) -> None:
        while len(self.records) > mark:
            rec = self.records.pop()
            undo_delta(self.net, rec.delta)
            update_redexes_undo(self.rs, rec.delta, self.net)

    def run(self, expr: StrategyExpr) -> Outcome:
        ok = self._eval(expr)
        steps = [(r.rule_name, r.agents) for r in self.records]
        groups: list[list[tuple[str, tuple[int, int]]]] = []
        last_group = None
        for rec in self.records:
            if rec.group != last_group:
                groups.append([])
                last_group = rec.group
            groups[-1].append((rec.rule_name, rec.agents))
        return Outcome("success" if ok else "failure", steps, groups)

    def _eval(self, expr: StrategyExpr) -> bool:
        if isinstance(expr, Id):
            return True
        if isinstance(expr, Fail):
            return False
        if isinstance(expr, Apply):
            return self._eval_apply(expr)
        if isinstance(expr, Seq):
            mark = self.mark()
            if not self._eval(expr.left):
                return False
            if not self._eval(expr.right):
                self.rollback(mark)
                return False
            return True
        if isinstance(expr, Or):
            # a failed left branch has already rolled itself back
            return self._eval(expr.left) or self._eval(expr.right)
        if isinstance(expr, Star):
            return self._eval_star(expr)
        if isinstance(expr, Par):
            return self._eval_par(expr)
        if isinstance(expr, At):
            return self._eval(_push(expr, None))
        raise TypeError(f"not a strategy node: {expr!r}")

    def _eval_apply(self, expr: Apply) -> bool:
        rule = self.rules.get(expr.rule)
        if rule is None:
            raise UnknownRule(f"no rule named {expr.rule!r}")
        if expr.loc is None:
            raise UnlocatedRule(f"rule {expr.rule} has no location")
        region = _resolve_region(self.net, expr.loc)
        redex = match_rule_at(self.net, self.rs, rule, region)
        if redex is None:
            return False
        self._next_group += 1
        self._commit(rule, redex, self._next_group)
        return True

    def _eval_star(self, expr: Star) -> bool:
        idle = 0
        while True:
            before = self.mark()
            if not self._eval(expr.body):
                return True
            if self.mark() == before:
                # success without progress: only the cap stops this loop
                idle += 1
                if idle > self.cap:
                    raise StepLimitExceeded(
                        f"{self.cap} non-progressing iterations under *"
                    )
            else:
                idle = 0

    def _eval_par(self, expr: Par) -> bool:
        net = self.net
        mark = self.mark()
        entry_counters = (net.next_agent_id, net.next_edge_id)

        if not self._eval(expr.left):
            return False
        steps_left = [(r.rule_name, r.agents) for r in self.records[mark:]]
        after_left = (net.next_agent_id, net.next_edge_id)
        self.rollback(mark)

        # disjoint fresh-id ranges: the right run starts where the left ended
        net.next_agent_id, net.next_edge_id = after_left
        ok = self._eval(expr.right)
        steps_right = [(r.rule_name, r.agents) for r in self.records[mark:]]
        self.rollback(mark)
        net.next_agent_id, net.next_edge_id = entry_counters
        if not ok:
            return False

        touched_left = {a for _, pair in steps_left for a in pair}
        touched_right = {a for _, pair in steps_right for a in pair}
        if touched_left & touched_right:
            return False

        # both sides commit as one composite group, left steps first
        self._next_group += 1
        group = self._next_group
        for rule_name, (a, b) in steps_left + steps_right:
            rule = self.rules.get(rule_name)
            eid = net.edge_at(AgentPort(a, 0))
            redex = net.redex_of_edge(eid) if eid is not None else None
            if (
                rule is None
                or redex is None
                or {redex.left_agent, redex.right_agent} != {a, b}
            ):
                self.rollback(mark)
                return False
            self._commit(rule, redex, group)
        return True


def eval_strategy(net: Net, redexes: RedexSet, rules: RuleSet, expr: StrategyExpr,
                  max_steps: int = DEFAULT_MAX_STEPS) -> Outcome:
    """Evaluate expr against net, mutating net and redexes on success.

    On failure both are exactly as passed in.  Raises StepLimitExceeded when
    the committed-step or idle-iteration cap is hit, UnknownRule and
    UnknownSelection for bad references, UnlocatedRule for unelaborated rule
    applications.
    """
    return Evaluator(net, redexes, rules, max_steps).run(expr)
