"""Interaction rules, rule application, and incremental redex maintenance.

A rule replaces an active pair by its right-hand-side net; the mapping pairs
every left-hand-side auxiliary port with either an rhs port or another lhs
port, which is what makes interface preservation a syntactic property.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

from .errors import Report, RedexStale, RuleMismatch
from .net import AgentPort, FreePort, Net, PortRef, Redex, Signature, validate_net

SIDE_ALPHA = 0
SIDE_BETA = 1


@dataclass(frozen=True, slots=True)
class LhsPort:
    """An auxiliary port of the rule's left side: (side, index 1..arity)."""

    side: int
    index: int

    def __repr__(self) -> str:
        return f"{'LR'[self.side]}.{self.index}"


MapTarget = Union[LhsPort, AgentPort]


@dataclass
class InteractionRule:
    name: str
    lhs: tuple[str, str]
    rhs: Net
    mapping: list[tuple[LhsPort, MapTarget]]

    def pair_key(self) -> tuple[str, str]:
        return tuple(sorted(self.lhs))  # type: ignore[return-value]


def pair_key(sym_a: str, sym_b: str) -> tuple[str, str]:
    return (sym_a, sym_b) if sym_a <= sym_b else (sym_b, sym_a)


def validate_rule(sig: Signature, rule: InteractionRule) -> Report:
    report = Report()
    for symbol in rule.lhs:
        if symbol not in sig:
            report.add("UnknownSymbol", f"rule {rule.name}: lhs symbol {symbol!r} unknown")
            return report
    report.extend(validate_net(rule.rhs))
    if rule.rhs.free_ports:
        report.add(
            "RhsFreePorts",
            f"rule {rule.name}: rhs must not declare free ports of its own",
        )

    arities = (sig.arity(rule.lhs[0]), sig.arity(rule.lhs[1]))
    wanted = {
        LhsPort(side, index)
        for side in (SIDE_ALPHA, SIDE_BETA)
        for index in range(1, arities[side] + 1)
    }
    seen: dict[LhsPort, int] = {}
    rhs_targets: dict[AgentPort, int] = {}
    for src, tgt in rule.mapping:
        for lp in (src, tgt) if isinstance(tgt, LhsPort) else (src,):
            seen[lp] = seen.get(lp, 0) + 1
            if lp not in wanted:
                report.add("BadLhsPort", f"rule {rule.name}: {lp} is not an lhs aux port")
        if isinstance(tgt, AgentPort):
            symbol = rule.rhs.agents.get(tgt.agent)
            if symbol is None or not 0 <= tgt.port <= sig.arity(symbol):
                report.add("BadRhsRef", f"rule {rule.name}: mapping targets missing rhs port {tgt}")
            else:
                rhs_targets[tgt] = rhs_targets.get(tgt, 0) + 1
    for lp in sorted(wanted - seen.keys(), key=lambda p: (p.side, p.index)):
        report.add("UnmappedInterfacePort", f"rule {rule.name}: {lp} has no mapping entry")
    for lp, count in seen.items():
        if count > 1:
            report.add("DuplicateMapping", f"rule {rule.name}: {lp} mapped {count} times")

    for aid in sorted(rule.rhs.agents):
        symbol = rule.rhs.agents[aid]
        for port in range(sig.arity(symbol) + 1):
            ref = AgentPort(aid, port)
            wired = rule.rhs.edge_at(ref) is not None
            mapped = rhs_targets.get(ref, 0)
            if wired and mapped:
                report.add("RhsPortConflict", f"rule {rule.name}: rhs port {ref} both wired and mapped")
            elif mapped > 1:
                report.add("RhsPortConflict", f"rule {rule.name}: rhs port {ref} mapped {mapped} times")
            elif not wired and not mapped:
                report.add("DanglingRhsPort", f"rule {rule.name}: rhs port {ref} is unwired and unmapped")
    return report


class RuleSet:
    """Rules indexed by unordered symbol pair; at most one rule per pair."""

    def __init__(self, rules: Optional[list[InteractionRule]] = None):
        self.rules: list[InteractionRule] = list(rules) if rules else []
        self.index: dict[tuple[str, str], InteractionRule] = {}
        self.by_name: dict[str, InteractionRule] = {}
        for rule in self.rules:
            self.index.setdefault(rule.pair_key(), rule)
            self.by_name.setdefault(rule.name, rule)

    def for_pair(self, sym_a: str, sym_b: str) -> Optional[InteractionRule]:
        return self.index.get(pair_key(sym_a, sym_b))

    def get(self, name: str) -> Optional[InteractionRule]:
        return self.by_name.get(name)

    def __iter__(self) -> Iterator[InteractionRule]:
        return iter(self.rules)

    def __len__(self) -> int:
        return len(self.rules)


def validate_ruleset(sig: Signature, rs: RuleSet) -> Report:
    report = Report()
    pairs: dict[tuple[str, str], str] = {}
    names: set[str] = set()
    for rule in rs.rules:
        report.extend(validate_rule(sig, rule))
        key = rule.pair_key()
        if key in pairs:
            report.add(
                "DuplicatePair",
                f"rules {pairs[key]} and {rule.name} share the pair {key[0]} >< {key[1]}",
            )
        pairs[key] = rule.name
        if rule.name in names:
            report.add("DuplicateRuleName", f"rule name {rule.name} used twice")
        names.add(rule.name)
    return report


@dataclass
class RewriteDelta:
    """What one rule application changed; enough to undo it exactly."""

    rule_name: str
    consumed: tuple[int, int]
    removed_agents: list[tuple[int, str]]
    removed_edges: list[tuple[int, tuple[PortRef, PortRef]]]
    added_agents: list[tuple[int, str]]
    added_edges: list[tuple[int, tuple[PortRef, PortRef]]]
    selection_undo: list[tuple[str, set[int], set[int]]]
    counters_before: tuple[int, int]


_NET_LINK = 0
_MAP_LINK = 1
_CYCLE = object()


def apply_rule(net: Net, redex: Redex, rule: InteractionRule) -> RewriteDelta:
    """Fire `rule` at `redex`, mutating the net; returns an invertible delta.

    The two redex agents and all incident edges go away; rhs agents come in
    with fresh ids; every former peer of an lhs aux port is respliced to its
    mapping target by following wiring chains through the dying pair, so a
    chain that closes on itself is dropped and a free-free wiring can appear.
    """
    ends = net.edges.get(redex.edge)
    if ends is None:
        raise RedexStale(f"edge {redex.edge} is gone")
    if {ends[0], ends[1]} != {AgentPort(redex.left_agent, 0), AgentPort(redex.right_agent, 0)}:
        raise RedexStale(f"edge {redex.edge} no longer joins the redex pair")

    sym_left = net.agents[redex.left_agent]
    sym_right = net.agents[redex.right_agent]
    if (sym_left, sym_right) == rule.lhs:
        side_agent = (redex.left_agent, redex.right_agent)
    elif (sym_right, sym_left) == rule.lhs:
        side_agent = (redex.right_agent, redex.left_agent)
    else:
        raise RuleMismatch(
            f"rule {rule.name} is for {rule.lhs}, redex is ({sym_left}, {sym_right})"
        )

    counters_before = (net.next_agent_id, net.next_edge_id)
    sig = net.signature
    arities = (sig.arity(rule.lhs[0]), sig.arity(rule.lhs[1]))
    lhs_ports = [
        LhsPort(side, index)
        for side in (SIDE_ALPHA, SIDE_BETA)
        for index in range(1, arities[side] + 1)
    ]
    concrete = {lp: AgentPort(side_agent[lp.side], lp.index) for lp in lhs_ports}
    port_owner = {ap: lp for lp, ap in concrete.items()}

    # net-side links of each lhs aux port, with redex-internal wires folded
    # back into lhs-port space
    net_link: dict[LhsPort, object] = {}
    for lp in lhs_ports:
        peer = net.peer(concrete[lp])
        if isinstance(peer, AgentPort) and peer in port_owner:
            net_link[lp] = port_owner[peer]
        elif peer is not None:
            net_link[lp] = peer

    # remove the redex edge, then every edge still incident to the pair
    removed_edges: list[tuple[int, tuple[PortRef, PortRef]]] = []
    removed_edges.append((redex.edge, net.disconnect(redex.edge)))
    for lp in lhs_ports:
        eid = net.edge_at(concrete[lp])
        if eid is not None:
            removed_edges.append((eid, net.disconnect(eid)))
    removed_agents = [
        (side_agent[SIDE_ALPHA], rule.lhs[0]),
        (side_agent[SIDE_BETA], rule.lhs[1]),
    ]
    del net.agents[side_agent[SIDE_ALPHA]]
    del net.agents[side_agent[SIDE_BETA]]

    # instantiate rhs agents and internal wiring with fresh ids
    inst: dict[int, int] = {}
    added_agents: list[tuple[int, str]] = []
    for rid in sorted(rule.rhs.agents):
        symbol = rule.rhs.agents[rid]
        new_id = net.next_agent_id
        net.next_agent_id += 1
        net.agents[new_id] = symbol
        inst[rid] = new_id
        added_agents.append((new_id, symbol))
    added_edges: list[tuple[int, tuple[PortRef, PortRef]]] = []
    for reid in sorted(rule.rhs.edges):
        a, b = rule.rhs.edges[reid]
        assert isinstance(a, AgentPort) and isinstance(b, AgentPort)
        eid = net._add_edge(AgentPort(inst[a.agent], a.port), AgentPort(inst[b.agent], b.port))
        added_edges.append((eid, net.edges[eid]))

    map_link: dict[LhsPort, object] = {}
    for src, tgt in rule.mapping:
        if isinstance(tgt, LhsPort):
            map_link[src] = tgt
            map_link[tgt] = src
        else:
            map_link[src] = AgentPort(inst[tgt.agent], tgt.port)

    # splice: walk each chain of links out to its two real endpoints
    def walk(start: LhsPort, kind: int, visited: set[LhsPort]):
        cur, k = start, kind
        while True:
            links = net_link if k == _NET_LINK else map_link
            nxt = links.get(cur)
            if nxt is None:
                return None
            if not isinstance(nxt, LhsPort):
                return nxt
            if nxt == start:
                return _CYCLE
            visited.add(nxt)
            cur, k = nxt, _MAP_LINK if k == _NET_LINK else _NET_LINK

    visited: set[LhsPort] = set()
    for lp in lhs_ports:
        if lp in visited:
            continue
        visited.add(lp)
        end_a = walk(lp, _NET_LINK, visited)
        if end_a is _CYCLE:
            continue
        end_b = walk(lp, _MAP_LINK, visited)
        if end_b is _CYCLE:
            continue
        if end_a is None or end_b is None or end_a == end_b:
            continue
        eid = net._add_edge(end_a, end_b)  # type: ignore[arg-type]
        added_edges.append((eid, net.edges[eid]))

    consumed = (redex.left_agent, redex.right_agent)
    selection_undo: list[tuple[str, set[int], set[int]]] = []
    if net.selections:
        created = [aid for aid, _ in added_agents]
        consumed_set = set(consumed)
        for name, members in net.selections.items():
            hit = members & consumed_set
            if hit:
                grown = set(created) - members
                members -= hit
                members |= grown
                selection_undo.append((name, hit, grown))

    return RewriteDelta(
        rule_name=rule.name,
        consumed=consumed,
        removed_agents=removed_agents,
        removed_edges=removed_edges,
        added_agents=added_agents,
        added_edges=added_edges,
        selection_undo=selection_undo,
        counters_before=counters_before,
    )


def undo_delta(net: Net, delta: RewriteDelta) -> None:
    """Reverse one apply_rule exactly, counters included."""
    for eid, (a, b) in reversed(delta.added_edges):
        del net.edges[eid]
        del net._port_edge[a]
        del net._port_edge[b]
    for aid, _ in delta.added_agents:
        del net.agents[aid]
    for aid, symbol in delta.removed_agents:
        net.agents[aid] = symbol
    for eid, (a, b) in delta.removed_edges:
        net.edges[eid] = (a, b)
        net._port_edge[a] = eid
        net._port_edge[b] = eid
    for name, removed_ids, added_ids in delta.selection_undo:
        members = net.selections[name]
        members -= added_ids
        members |= removed_ids
    net.next_agent_id, net.next_edge_id = delta.counters_before


class RedexSet:
    """Current redexes of one net, maintained incrementally.

    Mirrors find_active_pairs after every mutation.  Lookup of the smallest
    redex for a symbol pair goes through a lazily-cleaned heap so strategy
    evaluation stays O(log n) per step on whole-net locations.
    """

    def __init__(self) -> None:
        self._by_edge: dict[int, Redex] = {}
        self._by_pair: dict[tuple[str, str], dict[int, Redex]] = {}
        self._heaps: dict[tuple[str, str], list[tuple[int, int, int]]] = {}

    @classmethod
    def from_net(cls, net: Net) -> "RedexSet":
        rs = cls()
        for redex in net.find_active_pairs():
            rs.add(redex)
        return rs

    def add(self, redex: Redex) -> None:
        if redex.edge in self._by_edge:
            return
        key = pair_key(*redex.symbols)
        self._by_edge[redex.edge] = redex
        self._by_pair.setdefault(key, {})[redex.edge] = redex
        heapq.heappush(
            self._heaps.setdefault(key, []),
            (redex.left_agent, redex.right_agent, redex.edge),
        )

    def discard(self, eid: int) -> None:
        redex = self._by_edge.pop(eid, None)
        if redex is not None:
            key = pair_key(*redex.symbols)
            self._by_pair[key].pop(eid, None)

    def smallest(self, sym_a: str, sym_b: str, region: Optional[set[int]] = None) -> Optional[Redex]:
        """Smallest (min id, max id) live redex on the unordered symbol pair.

        With a region, both agents must be members; None means everywhere.
        """
        key = pair_key(sym_a, sym_b)
        if region is None:
            heap = self._heaps.get(key)
            if not heap:
                return None
            live = self._by_pair.get(key, {})
            while heap:
                mn, mx, eid = heap[0]
                redex = live.get(eid)
                if redex is not None and redex.pair_key == (mn, mx):
                    return redex
                heapq.heappop(heap)
            return None
        best = None
        for redex in self._by_pair.get(key, {}).values():
            if redex.left_agent in region and redex.right_agent in region:
                if best is None or redex.pair_key < best.pair_key:
                    best = redex
        return best

    def as_sorted_list(self) -> list[Redex]:
        return sorted(self._by_edge.values(), key=lambda r: r.pair_key)

    def __len__(self) -> int:
        return len(self._by_edge)

    def __contains__(self, eid: int) -> bool:
        return eid in self._by_edge

    def __iter__(self) -> Iterator[Redex]:
        return iter(self.as_sorted_list())


def update_redexes(rs: RedexSet, delta: RewriteDelta, net: Net) -> None:
    """Bring rs in sync after apply_rule(delta) without a full rescan.

    Only removed and added edges can change the redex population: edges are
    immutable endpoint pairs, so untouched edges keep their status.
    """
    for eid, _ in delta.removed_edges:
        rs.discard(eid)
    for eid, _ in delta.added_edges:
        redex = net.redex_of_edge(eid)
        if redex is not None:
            rs.add(redex)


def update_redexes_undo(rs: RedexSet, delta: RewriteDelta, net: Net) -> None:
    """Bring rs in sync after undo_delta(delta)."""
    for eid, _ in delta.added_edges:
        rs.discard(eid)
    for eid, _ in delta.removed_edges:
        redex = net.redex_of_edge(eid)
        if redex is not None:
            rs.add(redex)
