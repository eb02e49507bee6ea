"""Documents and the branching trace tree.

A document bundles signature, rules, named strategies and the base model
m0; its trace is a tree of full net snapshots.  Nodes are immutable once
recorded: explore and strategy runs only ever append.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .errors import (
    DocumentError,
    RedexStale,
    Report,
    RuleMismatch,
    UnknownNode,
    UnknownStrategy,
    UnlocatedRule,
)
from .iso import iso_equal
from .net import AgentPort, Net, Redex, Signature, validate_net
from .rules import RedexSet, RuleSet, apply_rule, validate_ruleset
from .strategy import DEFAULT_MAX_STEPS, StrategyExpr, elaborate, eval_strategy

Step = tuple[str, tuple[int, int]]


@dataclass(frozen=True)
class Label:
    """Edge annotation: the steps behind one child, usually just one.

    A Par composite carries several steps under a single label.  strategy
    is the name of the strategy run that produced the child, if any.
    """

    steps: tuple[Step, ...]
    strategy: Optional[str] = None


@dataclass
class TraceTree:
    root: int
    nodes: dict[int, Net]
    edges: dict[int, tuple[int, Label]]  # child -> (parent, label)
    children: dict[int, list[int]]
    next_id: int

    @classmethod
    def fresh(cls, m0: Net) -> "TraceTree":
        return cls(root=0, nodes={0: m0.copy()}, edges={}, children={0: []}, next_id=1)

    def add_child(self, parent: int, net: Net, label: Label) -> int:
        nid = self.next_id
        self.next_id += 1
        self.nodes[nid] = net
        self.edges[nid] = (parent, label)
        self.children[nid] = []
        self.children[parent].append(nid)
        return nid


@dataclass
class Document:
    signature: Signature
    rules: RuleSet
    strategies: dict[str, StrategyExpr]
    m0: Net
    trace: TraceTree


@dataclass(frozen=True)
class NodeView:
    net: Net
    label: Optional[Label]
    parent: Optional[int]


def new_document(sig: Signature, rules: RuleSet, strategies: dict[str, StrategyExpr],
                 m0: Net) -> Document:
    report = Report()
    report.extend(validate_ruleset(sig, rules))
    report.extend(validate_net(m0))
    if m0.signature is not sig and m0.signature != sig:
        report.add("SignatureMismatch", "m0 was built against a different signature")
    for name, expr in strategies.items():
        try:
            elaborate(expr)
        except UnlocatedRule as exc:
            report.add("UnlocatedRule", f"strategy {name}: {exc}")
    if not report.ok:
        raise DocumentError(report.violations)
    return Document(sig, rules, strategies, m0, TraceTree.fresh(m0))


def _require_node(doc: Document, node_id: int) -> Net:
    net = doc.trace.nodes.get(node_id)
    if net is None:
        raise UnknownNode(f"no trace node {node_id}")
    return net


def _existing_child(doc: Document, node_id: int, steps: tuple[Step, ...]) -> Optional[int]:
    for cid in doc.trace.children[node_id]:
        if doc.trace.edges[cid][1].steps == steps:
            return cid
    return None


def _child_for_redex(doc: Document, node_id: int, redex: Redex, rule) -> int:
    """One-step child for a redex, reusing a child with the same label."""
    steps: tuple[Step, ...] = ((rule.name, (redex.left_agent, redex.right_agent)),)
    existing = _existing_child(doc, node_id, steps)
    if existing is not None:
        return existing
    child = doc.trace.nodes[node_id].copy()
    apply_rule(child, redex, rule)
    return doc.trace.add_child(node_id, child, Label(steps))


def explore(doc: Document, node_id: int) -> list[int]:
    """One child per rule-covered redex of the node's net; idempotent."""
    net = _require_node(doc, node_id)
    out = []
    for redex in net.find_active_pairs():
        rule = doc.rules.for_pair(*redex.symbols)
        if rule is None:
            continue
        out.append(_child_for_redex(doc, node_id, redex, rule))
    return out


def apply_redex(doc: Document, node_id: int, edge_id: int) -> int:
    """Child for the redex on one edge (per-redex steering); idempotent."""
    net = _require_node(doc, node_id)
    redex = net.redex_of_edge(edge_id)
    if redex is None:
        raise RedexStale(f"edge {edge_id} is not a live active pair")
    rule = doc.rules.for_pair(*redex.symbols)
    if rule is None:
        raise RuleMismatch(f"no rule covers pair {redex.symbols}")
    return _child_for_redex(doc, node_id, redex, rule)


def run_strategy(doc: Document, node_id: int, strategy: Union[str, StrategyExpr],
                 max_steps: int = DEFAULT_MAX_STEPS) -> tuple[str, list[int]]:
    """Evaluate a strategy from a node; append one child per committed group.

    Always a fresh branch: repeated runs of the same strategy append again.
    Returns the outcome status and the new node ids, root-to-leaf.
    """
    base = _require_node(doc, node_id)
    name: Optional[str] = None
    if isinstance(strategy, str):
        name = strategy
        expr = doc.strategies.get(strategy)
        if expr is None:
            raise UnknownStrategy(f"no strategy named {strategy!r}")
    else:
        expr = strategy
    expr = elaborate(expr)

    working = base.copy()
    outcome = eval_strategy(working, RedexSet.from_net(working), doc.rules, expr, max_steps)
    if not outcome.ok:
        return ("failure", [])

    # committed steps replay deterministically from the snapshot, so the
    # intermediate nets can be rebuilt and recorded group by group
    current = base.copy()
    parent = node_id
    new_ids = []
    for group in outcome.groups:
        for rule_name, (a, b) in group:
            eid = current.edge_at(AgentPort(a, 0))
            redex = current.redex_of_edge(eid) if eid is not None else None
            rule = doc.rules.get(rule_name)
            if redex is None or rule is None or {redex.left_agent, redex.right_agent} != {a, b}:
                raise RedexStale(f"replay lost step {rule_name} at ({a}, {b})")
            apply_rule(current, redex, rule)
        parent = doc.trace.add_child(parent, current.copy(), Label(tuple(group), name))
        new_ids.append(parent)
    return ("success", new_ids)


def get_node(doc: Document, node_id: int) -> NodeView:
    net = _require_node(doc, node_id)
    if node_id == doc.trace.root:
        return NodeView(net.copy(), None, None)
    parent, label = doc.trace.edges[node_id]
    return NodeView(net.copy(), label, parent)


def iso_classes(doc: Document, node_ids: Optional[list[int]] = None) -> list[list[int]]:
    """Partition trace nodes into isomorphism classes (diagnostic only)."""
    ids = sorted(doc.trace.nodes) if node_ids is None else list(node_ids)
    classes: list[list[int]] = []
    for nid in ids:
        net = doc.trace.nodes[nid]
        for cls in classes:
            if iso_equal(net, doc.trace.nodes[cls[0]]):
                cls.append(nid)
                break
        else:
            classes.append([nid])
    return classes
