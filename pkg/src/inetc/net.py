"""Interaction net data model: signatures, agents, port-level edges, free ports.

An agent of arity n owns ports 0..n; port 0 is the principal port and the
only one through which interaction happens.  Every port sits in at most one
edge.  Free ports are named, ordered, and form the net's interface.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Optional, Union

from .errors import (
    InvalidPortRef,
    PortOccupied,
    Report,
    SelfEndpoint,
    UnknownAgent,
    UnknownSymbol,
)

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class Signature:
    """Symbol table mapping agent names to arities (arity n = n+1 ports)."""

    def __init__(self, entries: Optional[dict[str, int]] = None):
        self.entries: dict[str, int] = {}
        if entries:
            for name, arity in entries.items():
                self.declare(name, arity)

    def declare(self, name: str, arity: int) -> None:
        if not _NAME_RE.match(name):
            raise UnknownSymbol(f"bad symbol name {name!r}")
        if arity < 0:
            raise UnknownSymbol(f"negative arity for {name!r}")
        if name in self.entries and self.entries[name] != arity:
            raise UnknownSymbol(f"symbol {name!r} redeclared with a different arity")
        self.entries[name] = arity

    def arity(self, name: str) -> int:
        try:
            return self.entries[name]
        except KeyError:
            raise UnknownSymbol(f"unknown symbol {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self.entries

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Signature) and self.entries == other.entries

    def __repr__(self) -> str:
        items = ", ".join(f"{k}:{v}" for k, v in sorted(self.entries.items()))
        return f"Signature({{{items}}})"


@dataclass(frozen=True, slots=True)
class AgentPort:
    """Port `port` of agent `agent` (0 = principal)."""

    agent: int
    port: int

    def sort_key(self) -> tuple:
        return (0, self.agent, self.port)

    def __repr__(self) -> str:
        return f"{self.agent}.{self.port}"


@dataclass(frozen=True, slots=True)
class FreePort:
    """A named free port; the declaration order of names is the interface."""

    name: str

    def sort_key(self) -> tuple:
        return (1, self.name, 0)

    def __repr__(self) -> str:
        return f"free:{self.name}"


PortRef = Union[AgentPort, FreePort]


def edge_key(a: PortRef, b: PortRef) -> tuple[PortRef, PortRef]:
    """Canonical (order-insensitive) form of an edge's endpoint pair."""
    return (a, b) if a.sort_key() <= b.sort_key() else (b, a)


@dataclass(frozen=True, slots=True)
class Redex:
    """An edge joining the principal ports of two distinct agents."""

    edge: int
    left_agent: int
    right_agent: int
    symbols: tuple[str, str]

    @property
    def pair_key(self) -> tuple[int, int]:
        return (self.left_agent, self.right_agent)


class Net:
    """A mutable interaction net bound to a signature.

    Agent ids and edge ids are monotone counters and never reused, which keeps
    replays and trace labels deterministic.  `selections` are named agent sets
    used by strategy locations.
    """

    __slots__ = (
        "signature",
        "agents",
        "edges",
        "free_ports",
        "_free_set",
        "selections",
        "next_agent_id",
        "next_edge_id",
        "_port_edge",
    )

    def __init__(self, signature: Signature):
        self.signature = signature
        self.agents: dict[int, str] = {}
        self.edges: dict[int, tuple[PortRef, PortRef]] = {}
        self.free_ports: list[str] = []
        self._free_set: set[str] = set()
        self.selections: dict[str, set[int]] = {}
        self.next_agent_id = 0
        self.next_edge_id = 0
        self._port_edge: dict[PortRef, int] = {}

    # -- construction ------------------------------------------------------

    def add_agent(self, symbol: str) -> int:
        if symbol not in self.signature:
            raise UnknownSymbol(f"unknown symbol {symbol!r}")
        aid = self.next_agent_id
        self.next_agent_id += 1
        self.agents[aid] = symbol
        return aid

    def declare_free(self, name: str) -> None:
        """Declare a free-port name; position in the interface is first-use order."""
        if not _NAME_RE.match(name):
            raise InvalidPortRef(f"bad free-port name {name!r}")
        if name not in self._free_set:
            self._free_set.add(name)
            self.free_ports.append(name)

    def connect(self, a: PortRef, b: PortRef) -> int:
        if a == b:
            raise SelfEndpoint(f"cannot connect {a} to itself")
        for ref in (a, b):
            self._check_ref(ref, declare=True)
        for ref in (a, b):
            if ref in self._port_edge:
                raise PortOccupied(f"{ref} is already connected")
        return self._add_edge(a, b)

    def _add_edge(self, a: PortRef, b: PortRef) -> int:
        eid = self.next_edge_id
        self.next_edge_id += 1
        self.edges[eid] = edge_key(a, b)
        self._port_edge[a] = eid
        self._port_edge[b] = eid
        return eid

    def _check_ref(self, ref: PortRef, declare: bool = False) -> None:
        if isinstance(ref, AgentPort):
            symbol = self.agents.get(ref.agent)
            if symbol is None:
                raise InvalidPortRef(f"no agent {ref.agent}")
            if not 0 <= ref.port <= self.signature.arity(symbol):
                raise InvalidPortRef(f"port {ref.port} out of range for {symbol}")
        else:
            if declare:
                self.declare_free(ref.name)
            elif ref.name not in self._free_set:
                raise InvalidPortRef(f"undeclared free port {ref.name!r}")

    def disconnect(self, eid: int) -> tuple[PortRef, PortRef]:
        try:
            a, b = self.edges.pop(eid)
        except KeyError:
            raise InvalidPortRef(f"no edge {eid}") from None
        del self._port_edge[a]
        del self._port_edge[b]
        return a, b

    def delete_agent(self, aid: int) -> None:
        if aid not in self.agents:
            raise UnknownAgent(f"no agent {aid}")
        for port in range(self.signature.arity(self.agents[aid]) + 1):
            eid = self._port_edge.get(AgentPort(aid, port))
            if eid is not None:
                self.disconnect(eid)
        del self.agents[aid]
        for members in self.selections.values():
            members.discard(aid)

    # -- queries -----------------------------------------------------------

    def interface(self) -> list[str]:
        """Free-port names in declaration order."""
        return list(self.free_ports)

    def symbol_of(self, aid: int) -> str:
        try:
            return self.agents[aid]
        except KeyError:
            raise UnknownAgent(f"no agent {aid}") from None

    def ports_of(self, aid: int) -> Iterator[AgentPort]:
        for port in range(self.signature.arity(self.agents[aid]) + 1):
            yield AgentPort(aid, port)

    def edge_at(self, ref: PortRef) -> Optional[int]:
        return self._port_edge.get(ref)

    def peer(self, ref: PortRef) -> Optional[PortRef]:
        """The endpoint at the far side of ref's edge, if any."""
        eid = self._port_edge.get(ref)
        if eid is None:
            return None
        a, b = self.edges[eid]
        return b if a == ref else a

    def redex_of_edge(self, eid: int) -> Optional[Redex]:
        ends = self.edges.get(eid)
        if ends is None:
            return None
        a, b = ends
        if (
            isinstance(a, AgentPort)
            and isinstance(b, AgentPort)
            and a.port == 0
            and b.port == 0
            and a.agent != b.agent
        ):
            lo, hi = (a.agent, b.agent) if a.agent < b.agent else (b.agent, a.agent)
            return Redex(eid, lo, hi, (self.agents[lo], self.agents[hi]))
        return None

    def find_active_pairs(self) -> list[Redex]:
        """All principal-principal edges, sorted by (min id, max id)."""
        found = []
        for eid in self.edges:
            r = self.redex_of_edge(eid)
            if r is not None:
                found.append(r)
        found.sort(key=lambda r: r.pair_key)
        return found

    def is_normal_form(self) -> bool:
        return not self.find_active_pairs()

    def select(self, name: str, members: set[int]) -> None:
        for aid in members:
            if aid not in self.agents:
                raise UnknownAgent(f"selection {name!r} references missing agent {aid}")
        self.selections[name] = set(members)

    # -- copying / equality ------------------------------------------------

    def copy(self) -> "Net":
        dup = Net(self.signature)
        dup.agents = dict(self.agents)
        dup.edges = dict(self.edges)
        dup.free_ports = list(self.free_ports)
        dup._free_set = set(self._free_set)
        dup.selections = {k: set(v) for k, v in self.selections.items()}
        dup.next_agent_id = self.next_agent_id
        dup.next_edge_id = self.next_edge_id
        dup._port_edge = dict(self._port_edge)
        return dup

    def structure(self) -> tuple:
        """Structural fingerprint: agents, edge endpoint pairs, interface, selections.

        Edge ids and counters are bookkeeping and excluded; edge endpoint pairs
        compare as a set of canonical pairs.
        """
        return (
            dict(self.agents),
            frozenset(self.edges.values()),
            tuple(self.free_ports),
            {k: frozenset(v) for k, v in self.selections.items()},
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Net):
            return NotImplemented
        return self.signature == other.signature and self.structure() == other.structure()

    def __repr__(self) -> str:
        return (
            f"Net(agents={len(self.agents)}, edges={len(self.edges)}, "
            f"free={self.free_ports})"
        )


def new_net(signature: Signature) -> Net:
    return Net(signature)


def validate_net(net: Net) -> Report:
    """Check every Net invariant without mutating; violations come back as data."""
    report = Report()
    for aid, symbol in net.agents.items():
        if symbol not in net.signature:
            report.add("UnknownSymbol", f"agent {aid} has unknown symbol {symbol!r}")
    seen_free = set()
    for name in net.free_ports:
        if not _NAME_RE.match(name):
            report.add("BadFreeName", f"free port name {name!r} is not an identifier")
        if name in seen_free:
            report.add("DuplicateFreeName", f"free port {name!r} declared twice")
        seen_free.add(name)
    degree: dict[PortRef, int] = {}
    for eid, (a, b) in net.edges.items():
        if a == b:
            report.add("SelfEndpoint", f"edge {eid} joins an endpoint to itself")
        for ref in (a, b):
            degree[ref] = degree.get(ref, 0) + 1
            if isinstance(ref, AgentPort):
                symbol = net.agents.get(ref.agent)
                if symbol is None:
                    report.add("DanglingRef", f"edge {eid} references missing agent {ref.agent}")
                elif symbol in net.signature and not (
                    0 <= ref.port <= net.signature.arity(symbol)
                ):
                    report.add(
                        "PortOutOfRange",
                        f"edge {eid} references port {ref.port} of {symbol} agent {ref.agent}",
                    )
            elif ref.name not in seen_free:
                report.add("DanglingRef", f"edge {eid} references undeclared free port {ref.name!r}")
    for ref, count in degree.items():
        if count > 1:
            report.add("PortDegree", f"{ref} appears in {count} edges")
    for name, members in net.selections.items():
        for aid in members:
            if aid not in net.agents:
                report.add("BadSelection", f"selection {name!r} references missing agent {aid}")
    if net.agents and net.next_agent_id <= max(net.agents):
        report.add("CounterBehind", "next_agent_id is not past the largest agent id")
    # the occupancy index must mirror the edge map exactly
    mirror = {}
    for eid, (a, b) in net.edges.items():
        mirror[a] = eid
        mirror[b] = eid
    if mirror != net._port_edge:
        report.add("IndexSkew", "port-occupancy index disagrees with the edge map")
    return report
