"""Machine exchange formats: net/trace JSON and DOT for visualisation.

All exporters are deterministic: identical input bytes out.  Net JSON
round-trips exactly on agent ids; edge ids are an internal matter and are
not serialized.
"""

from __future__ import annotations

import json

from .errors import ResolveError
from .net import AgentPort, FreePort, Net, PortRef, Signature
from .trace import Document


def _ep_obj(ref: PortRef) -> dict:
    if isinstance(ref, FreePort):
        return {"free": ref.name}
    return {"agent": ref.agent, "port": ref.port}


def _sorted_edges(net: Net) -> list[tuple[PortRef, PortRef]]:
    return sorted(net.edges.values(), key=lambda e: (e[0].sort_key(), e[1].sort_key()))


def net_to_obj(net: Net) -> dict:
    return {
        "agents": [{"id": aid, "symbol": net.agents[aid]} for aid in sorted(net.agents)],
        "edges": [[_ep_obj(a), _ep_obj(b)] for a, b in _sorted_edges(net)],
        "free": list(net.free_ports),
        "selections": {name: sorted(net.selections[name]) for name in sorted(net.selections)},
    }


def net_to_json(net: Net) -> str:
    return json.dumps(net_to_obj(net), indent=2) + "\n"


def ep_from_obj(obj: dict) -> PortRef:
    if "free" in obj:
        return FreePort(obj["free"])
    return AgentPort(int(obj["agent"]), int(obj["port"]))


def net_from_obj(obj: dict, sig: Signature) -> Net:
    try:
        net = Net(sig)
        for name in obj.get("free", []):
            net.declare_free(name)
        for entry in obj["agents"]:
            aid = int(entry["id"])
            if aid in net.agents:
                raise ResolveError("DuplicateAgentId", f"agent id {aid} listed twice")
            net.agents[aid] = entry["symbol"]
            if entry["symbol"] not in sig:
                raise ResolveError("UnknownSymbol", f"unknown symbol {entry['symbol']!r}")
            net.next_agent_id = max(net.next_agent_id, aid + 1)
        for pair in obj["edges"]:
            net.connect(ep_from_obj(pair[0]), ep_from_obj(pair[1]))
        for name, members in obj.get("selections", {}).items():
            net.select(name, {int(aid) for aid in members})
        return net
    except ResolveError:
        raise
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ResolveError("BadJson", f"malformed net object: {exc}") from None


def net_from_json(text: str, sig: Signature) -> Net:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ResolveError("BadJson", str(exc)) from None
    if not isinstance(obj, dict):
        raise ResolveError("BadJson", "net JSON must be an object")
    return net_from_obj(obj, sig)


def trace_to_obj(doc: Document) -> dict:
    edges = []
    for child in sorted(doc.trace.edges):
        parent, label = doc.trace.edges[child]
        agents: list[int] = []
        for _, pair in label.steps:
            agents.extend(pair)
        edges.append({
            "from": parent,
            "to": child,
            "rule": "||".join(rule for rule, _ in label.steps),
            "agents": agents,
            "strategy": label.strategy,
        })
    return {
        "root": doc.trace.root,
        "nodes": {str(nid): net_to_obj(doc.trace.nodes[nid]) for nid in sorted(doc.trace.nodes)},
        "edges": edges,
    }


def export_trace_json(doc: Document) -> str:
    return json.dumps(trace_to_obj(doc), indent=2) + "\n"


def _arrow(ref: PortRef) -> str:
    return "normal" if isinstance(ref, AgentPort) and ref.port == 0 else "none"


def _dot_name(ref: PortRef) -> str:
    if isinstance(ref, FreePort):
        return f"fp_{ref.name}"
    return f"a{ref.agent}"


def _port_label(ref: PortRef) -> str:
    return "" if isinstance(ref, FreePort) else str(ref.port)


def export_dot(net: Net) -> str:
    lines = ["digraph inet {", "  rankdir=LR;"]
    for aid in sorted(net.agents):
        lines.append(f'  a{aid} [label="a{aid}:{net.agents[aid]}"];')
    for name in net.free_ports:
        lines.append(f'  fp_{name} [shape=box, label="{name}"];')
    for a, b in _sorted_edges(net):
        lines.append(
            f"  {_dot_name(a)} -> {_dot_name(b)} "
            f'[dir=both, arrowtail={_arrow(a)}, arrowhead={_arrow(b)}, '
            f'taillabel="{_port_label(a)}", headlabel="{_port_label(b)}"];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
