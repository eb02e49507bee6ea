"""Net isomorphism: a symbol-preserving agent bijection fixing free-port names.

Backtracking search, connectivity-guided so already-mapped neighbours force
candidates (long chains stay linear).  Chosen over canonical hashing for
correctness; only used at test scale and for trace diagnostics.
"""

from __future__ import annotations

from collections import Counter
from typing import Optional

from .net import AgentPort, FreePort, Net, PortRef


def _peer_shape(net: Net, ref: Optional[PortRef]) -> tuple:
    """Mapping-independent shape of a peer endpoint, for pruning."""
    if ref is None:
        return ("none",)
    if isinstance(ref, FreePort):
        return ("free", ref.name)
    return ("agent", net.agents[ref.agent], ref.port)


def _agent_shape(net: Net, aid: int) -> tuple:
    arity = net.signature.arity(net.agents[aid])
    return tuple(_peer_shape(net, net.peer(AgentPort(aid, p))) for p in range(arity + 1))


def iso_equal(a: Net, b: Net) -> bool:
    if a.signature.entries != b.signature.entries:
        return False
    if Counter(a.agents.values()) != Counter(b.agents.values()):
        return False
    if set(a.free_ports) != set(b.free_ports):
        return False
    if len(a.edges) != len(b.edges):
        return False

    # free ports are fixed by name: their peers must agree in shape, and
    # free-free wiring edges must be identical name pairs
    for name in a.free_ports:
        pa, pb = a.peer(FreePort(name)), b.peer(FreePort(name))
        if _peer_shape(a, pa) != _peer_shape(b, pb):
            return False
        if isinstance(pa, FreePort) and isinstance(pb, FreePort) and pa.name != pb.name:
            return False

    shapes_a = {aid: _agent_shape(a, aid) for aid in a.agents}
    shapes_b = {aid: _agent_shape(b, aid) for aid in b.agents}
    if Counter(shapes_a.values()) != Counter(shapes_b.values()):
        return False

    pool: dict[tuple, list[int]] = {}
    for bid in sorted(b.agents):
        pool.setdefault(shapes_b[bid], []).append(bid)

    mapping: dict[int, int] = {}
    used: set[int] = set()

    def compatible(aid: int, bid: int) -> bool:
        if a.agents[aid] != b.agents[bid]:
            return False
        arity = a.signature.arity(a.agents[aid])
        for port in range(arity + 1):
            pa = a.peer(AgentPort(aid, port))
            pb = b.peer(AgentPort(bid, port))
            if (pa is None) != (pb is None):
                return False
            if pa is None:
                continue
            if isinstance(pa, FreePort):
                if not isinstance(pb, FreePort) or pa.name != pb.name:
                    return False
                continue
            if not isinstance(pb, AgentPort) or pa.port != pb.port:
                return False
            mapped = mapping.get(pa.agent)
            if mapped is not None and mapped != pb.agent:
                return False
            if mapped is None and pb.agent in used:
                return False
        return True

    def forced_candidates(aid: int) -> Optional[list[int]]:
        """Image forced through any already-mapped neighbour, if one exists."""
        arity = a.signature.arity(a.agents[aid])
        for port in range(arity + 1):
            pa = a.peer(AgentPort(aid, port))
            if isinstance(pa, AgentPort) and pa.agent in mapping and pa.agent != aid:
                img = b.peer(AgentPort(mapping[pa.agent], pa.port))
                if not isinstance(img, AgentPort) or img.agent in used:
                    return []
                return [img.agent]
        return None

    def pick_next() -> Optional[int]:
        fallback = None
        fallback_size = None
        for aid in sorted(a.agents):
            if aid in mapping:
                continue
            if forced_candidates(aid) is not None:
                return aid
            size = len(pool[shapes_a[aid]])
            if fallback is None or size < fallback_size:
                fallback, fallback_size = aid, size
        return fallback

    def search() -> bool:
        if len(mapping) == len(a.agents):
            return True
        aid = pick_next()
        candidates = forced_candidates(aid)
        if candidates is None:
            candidates = [bid for bid in pool[shapes_a[aid]] if bid not in used]
        for bid in candidates:
            if bid in used or not compatible(aid, bid):
                continue
            mapping[aid] = bid
            used.add(bid)
            if search():
                return True
            del mapping[aid]
            used.remove(bid)
        return False

    return search()
