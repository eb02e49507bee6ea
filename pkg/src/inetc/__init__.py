"""Interaction net engine: nets, rules, strategies, traces, and text formats."""

from .errors import (
    DocumentError,
    InetError,
    ParseError,
    RedexStale,
    ResolveError,
    RuleMismatch,
    StepLimitExceeded,
    UnknownNode,
    UnknownRule,
    UnknownSelection,
    UnknownStrategy,
    UnlocatedRule,
    Violation,
)
from .net import AgentPort, FreePort, Net, Redex, Signature, new_net, validate_net
from .iso import iso_equal
from .rules import (
    InteractionRule,
    LhsPort,
    RedexSet,
    RewriteDelta,
    RuleSet,
    apply_rule,
    undo_delta,
    update_redexes,
    validate_rule,
    validate_ruleset,
)
from .strategy import (
    AllSel,
    Apply,
    At,
    DEFAULT_MAX_STEPS,
    Evaluator,
    Fail,
    Id,
    InterfaceSel,
    Location,
    NamedSel,
    Or,
    Outcome,
    Par,
    Seq,
    Star,
    SuccessorsSel,
    elaborate,
    eval_strategy,
    interface_selector,
    match_rule_at,
    resolve_location,
    successors_selector,
)
from .trace import (
    Document,
    Label,
    TraceTree,
    apply_redex,
    explore,
    get_node,
    iso_classes,
    new_document,
    run_strategy,
)
from .dsl import parse_document, parse_source, parse_strategy, assemble_document
from .printer import net_document, print_document, print_strategy
from .export import (
    export_dot,
    export_trace_json,
    net_from_json,
    net_from_obj,
    net_to_json,
    net_to_obj,
    trace_to_obj,
)

__version__ = "0.1.0"
