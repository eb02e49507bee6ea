"""Canonical printers for documents and strategies.

Output is deterministic: sorted symbol/rule/strategy names, agents renamed
a0..aN in id order, wires in canonical endpoint order.  Reparsing printed
text yields a structurally equal document.
"""

from __future__ import annotations

from .net import AgentPort, FreePort, Net, PortRef, Signature
from .rules import InteractionRule, LhsPort, SIDE_ALPHA
from .strategy import (
    AllSel,
    Apply,
    At,
    Fail,
    Id,
    InterfaceSel,
    Location,
    NamedSel,
    Or,
    Par,
    Seq,
    Star,
    StrategyExpr,
    SuccessorsSel,
)
from .trace import Document

_PAR, _OR, _SEQ, _POST, _ATOM = 0, 1, 2, 3, 4


def _selector(sel) -> str:
    if isinstance(sel, AllSel):
        return "all"
    if isinstance(sel, NamedSel):
        return sel.name
    if isinstance(sel, InterfaceSel):
        return f"interface({_selector(sel.inner)})"
    if isinstance(sel, SuccessorsSel):
        return f"successors({_selector(sel.inner)})"
    raise TypeError(f"not a selector: {sel!r}")


def _location(loc: Location) -> str:
    return f"({_selector(loc.selector)},{loc.depth})"


def _suffix(locations: tuple[Location, ...]) -> str:
    if len(locations) == 1:
        return _location(locations[0])
    return "[" + ",".join(_location(loc) for loc in locations) + "]"


def _expr(expr: StrategyExpr, min_level: int) -> str:
    if isinstance(expr, Id):
        return "id"
    if isinstance(expr, Fail):
        return "fail"
    if isinstance(expr, Apply):
        if expr.loc is None:
            return expr.rule
        text, level = f"{expr.rule}{_location(expr.loc)}", _POST
    elif isinstance(expr, At):
        if isinstance(expr.body, Apply) and expr.body.loc is None:
            body = expr.body.rule
        else:
            body = f"({_expr(expr.body, _PAR)})"
        text, level = f"{body}{_suffix(expr.locations)}", _POST
    elif isinstance(expr, Star):
        text, level = f"{_expr(expr.body, _POST)}*", _POST
    elif isinstance(expr, Seq):
        text, level = f"{_expr(expr.left, _SEQ)};{_expr(expr.right, _POST)}", _SEQ
    elif isinstance(expr, Or):
        text, level = f"{_expr(expr.left, _OR)} or {_expr(expr.right, _SEQ)}", _OR
    elif isinstance(expr, Par):
        text, level = f"{_expr(expr.left, _PAR)} || {_expr(expr.right, _OR)}", _PAR
    else:
        raise TypeError(f"not a strategy node: {expr!r}")
    return f"({text})" if level < min_level else text


def print_strategy(expr: StrategyExpr) -> str:
    return _expr(expr, _PAR)


def _agent_names(net: Net) -> dict[int, str]:
    return {aid: f"a{i}" for i, aid in enumerate(sorted(net.agents))}


def _ep(ref: PortRef, names: dict[int, str]) -> str:
    if isinstance(ref, FreePort):
        return f"free {ref.name}"
    return f"{names[ref.agent]}.{ref.port}"


def _net_lines(net: Net, names: dict[int, str], indent: str) -> list[str]:
    lines = []
    if net.free_ports:
        lines.append(f"{indent}free {', '.join(net.free_ports)};")
    for aid in sorted(net.agents):
        lines.append(f"{indent}{names[aid]} : {net.agents[aid]};")
    for a, b in sorted(net.edges.values(), key=lambda e: (e[0].sort_key(), e[1].sort_key())):
        lines.append(f"{indent}wire {_ep(a, names)} - {_ep(b, names)};")
    return lines


def _lhs_accessor(lhs: tuple[str, str], port: LhsPort) -> str:
    if lhs[0] == lhs[1]:
        prefix = "L" if port.side == SIDE_ALPHA else "R"
        return f"{prefix}.{lhs[0]}.{port.index}"
    return f"L.{lhs[port.side]}.{port.index}"


def _rule_block(rule: InteractionRule) -> list[str]:
    names = _agent_names(rule.rhs)
    lines = [f"rule {rule.name} : {rule.lhs[0]} >< {rule.lhs[1]} {{"]
    lines.append("  rhs {")
    lines.extend(_net_lines(rule.rhs, names, "    "))
    lines.append("  }")
    entries = sorted(rule.mapping, key=lambda e: (e[0].side, e[0].index))
    for src, tgt in entries:
        if isinstance(tgt, LhsPort):
            shown = _lhs_accessor(rule.lhs, tgt)
        else:
            shown = f"{names[tgt.agent]}.{tgt.port}"
        lines.append(f"  map {_lhs_accessor(rule.lhs, src)} -> {shown};")
    lines.append("}")
    return lines


def _signature_block(sig: Signature) -> list[str]:
    lines = ["signature {"]
    for name in sorted(sig.entries):
        lines.append(f"  {name}: {sig.entries[name]};")
    lines.append("}")
    return lines


def _net_block(name: str, net: Net, names: dict[int, str]) -> list[str]:
    return [f"net {name} {{"] + _net_lines(net, names, "  ") + ["}"]


def net_document(sig: Signature, net: Net, name: str = "main") -> str:
    """A minimal document (signature + one net) for writing results to disk."""
    lines = _signature_block(sig) + [""]
    lines.extend(_net_block(name, net, _agent_names(net)))
    return "\n".join(lines) + "\n"


def print_document(doc: Document) -> str:
    chunks: list[list[str]] = [_signature_block(doc.signature)]
    for rule in sorted(doc.rules, key=lambda r: r.name):
        chunks.append(_rule_block(rule))
    names = _agent_names(doc.m0)
    chunks.append(_net_block("main", doc.m0, names))
    for sel_name in sorted(doc.m0.selections):
        members = sorted(doc.m0.selections[sel_name])
        block = [f"named {sel_name} {{"]
        block.extend(f"  {names[aid]};" for aid in members)
        block.append("}")
        chunks.append(block)
    strategy_lines = [
        f"strategy {name} = {print_strategy(doc.strategies[name])};"
        for name in sorted(doc.strategies)
    ]
    if strategy_lines:
        chunks.append(strategy_lines)
    return "\n\n".join("\n".join(chunk) for chunk in chunks) + "\n"
