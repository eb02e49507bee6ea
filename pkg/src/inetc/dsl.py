"""Concrete syntax: lexer and parser for documents and strategy expressions.

A document holds one signature block, rule/net/named blocks in any order,
and `strategy NAME = EXPR;` lines.  Parsing is two-phase: a syntax pass
into raw items (so block order never matters), then a build pass that
resolves names against the signature and reports positions on error.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .errors import ParseError, ResolveError
from .net import AgentPort, FreePort, Net, Signature
from .rules import InteractionRule, LhsPort, RuleSet, SIDE_ALPHA, SIDE_BETA
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
from .trace import Document, new_document

KEYWORDS = {
    "signature", "rule", "net", "named", "strategy", "rhs", "map", "wire",
    "free", "id", "fail", "or", "all", "interface", "successors",
}
_CASELESS = {"interface", "successors"}


@dataclass(frozen=True, slots=True)
class Token:
    kind: str  # "ident" | "int" | "kw" | "punct" | "eof"
    value: str
    line: int
    col: int


_TWO_CHAR = ("->", "><", "||")
_ONE_CHAR = set("{}()[]:;,.=-*")


def lex(text: str) -> list[Token]:
    toks: list[Token] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "/" and text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_col = col
        if text.startswith(_TWO_CHAR, i):
            two = text[i:i + 2]
            toks.append(Token("punct", two, line, start_col))
            i += 2
            col += 2
            continue
        if ch == "⋈":  # bowtie, alias for ><
            toks.append(Token("punct", "><", line, start_col))
            i += 1
            col += 1
            continue
        if ch in _ONE_CHAR:
            toks.append(Token("punct", ch, line, start_col))
            i += 1
            col += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(Token("int", text[i:j], line, start_col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            if word in KEYWORDS:
                toks.append(Token("kw", word, line, start_col))
            elif word.lower() in _CASELESS:
                toks.append(Token("kw", word.lower(), line, start_col))
            else:
                toks.append(Token("ident", word, line, start_col))
            col += j - i
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", line, start_col)
    toks.append(Token("eof", "", line, col))
    return toks


# -- raw syntax items --------------------------------------------------------

# endpoints: ("agent", name, port) | ("free", name) | ("lhs", "L"|"R", sym, port)
RawEp = tuple

@dataclass(slots=True)
class RawDecl:
    name: str
    symbol: str
    line: int
    col: int

@dataclass(slots=True)
class RawWire:
    a: RawEp
    b: RawEp
    line: int
    col: int

@dataclass(slots=True)
class RawFree:
    names: list[str]
    line: int
    col: int

@dataclass(slots=True)
class RawNet:
    name: str
    items: list
    line: int
    col: int

@dataclass(slots=True)
class RawMap:
    src: RawEp
    tgt: RawEp
    line: int
    col: int

@dataclass(slots=True)
class RawRule:
    name: str
    lhs: tuple[str, str]
    rhs_items: list
    maps: list[RawMap]
    line: int
    col: int

@dataclass(slots=True)
class RawNamed:
    name: str
    members: list[str]
    line: int
    col: int

@dataclass(slots=True)
class RawSource:
    signature: Optional[list[tuple[str, int, int, int]]] = None
    rules: list[RawRule] = field(default_factory=list)
    nets: list[RawNet] = field(default_factory=list)
    named: list[RawNamed] = field(default_factory=list)
    strategies: list[tuple[str, StrategyExpr, int, int]] = field(default_factory=list)


class _Parser:
    def __init__(self, toks: list[Token]):
        self.toks = toks
        self.pos = 0

    def peek(self, ahead: int = 0) -> Token:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self) -> Token:
        tok = self.toks[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, kind: str, value: Optional[str] = None) -> bool:
        tok = self.peek()
        return tok.kind == kind and (value is None or tok.value == value)

    def fail(self, expected: tuple[str, ...]) -> ParseError:
        tok = self.peek()
        shown = tok.value if tok.kind != "eof" else "end of input"
        want = " or ".join(expected)
        return ParseError(f"expected {want}, found {shown!r}", tok.line, tok.col, expected)

    def expect(self, kind: str, value: Optional[str] = None) -> Token:
        if not self.at(kind, value):
            raise self.fail((value if value is not None else kind,))
        return self.next()

    def ident(self, what: str = "name") -> Token:
        if not self.at("ident"):
            raise self.fail((what,))
        return self.next()

    def int_value(self) -> int:
        return int(self.expect("int").value)

    # -- document structure ------------------------------------------------

    def source(self) -> RawSource:
        src = RawSource()
        while True:
            tok = self.peek()
            if tok.kind == "eof":
                return src
            if tok.kind != "kw":
                raise self.fail(("signature", "rule", "net", "named", "strategy"))
            if tok.value == "signature":
                if src.signature is not None:
                    raise ParseError("second signature block", tok.line, tok.col)
                src.signature = self.signature_block()
            elif tok.value == "rule":
                src.rules.append(self.rule_block())
            elif tok.value == "net":
                src.nets.append(self.net_block())
            elif tok.value == "named":
                src.named.append(self.named_block())
            elif tok.value == "strategy":
                src.strategies.append(self.strategy_line())
            else:
                raise self.fail(("signature", "rule", "net", "named", "strategy"))

    def signature_block(self) -> list[tuple[str, int, int, int]]:
        self.expect("kw", "signature")
        self.expect("punct", "{")
        entries = []
        while not self.at("punct", "}"):
            name = self.ident("symbol name")
            self.expect("punct", ":")
            arity = self.int_value()
            self.expect("punct", ";")
            entries.append((name.value, arity, name.line, name.col))
        self.next()
        return entries

    def net_block(self) -> RawNet:
        kw = self.expect("kw", "net")
        name = self.ident("net name")
        self.expect("punct", "{")
        items = self.block_items()
        self.expect("punct", "}")
        return RawNet(name.value, items, kw.line, kw.col)

    def block_items(self) -> list:
        items: list = []
        while True:
            tok = self.peek()
            if tok.kind == "punct" and tok.value == "}":
                return items
            if tok.kind == "kw" and tok.value == "wire":
                items.append(self.wire_line())
            elif tok.kind == "kw" and tok.value == "free":
                items.append(self.free_line())
            elif tok.kind == "ident":
                items.append(self.decl_line())
            else:
                raise self.fail(("declaration", "wire", "free", "}"))

    def decl_line(self) -> RawDecl:
        name = self.ident()
        self.expect("punct", ":")
        symbol = self.ident("symbol name")
        self.expect("punct", ";")
        return RawDecl(name.value, symbol.value, name.line, name.col)

    def wire_line(self) -> RawWire:
        kw = self.expect("kw", "wire")
        a = self.endpoint()
        self.expect("punct", "-")
        b = self.endpoint()
        self.expect("punct", ";")
        return RawWire(a, b, kw.line, kw.col)

    def free_line(self) -> RawFree:
        kw = self.expect("kw", "free")
        names = [self.ident("free-port name").value]
        while self.at("punct", ","):
            self.next()
            names.append(self.ident("free-port name").value)
        self.expect("punct", ";")
        return RawFree(names, kw.line, kw.col)

    def endpoint(self) -> RawEp:
        if self.at("kw", "free"):
            self.next()
            return ("free", self.ident("free-port name").value)
        name = self.ident("endpoint")
        self.expect("punct", ".")
        if self.at("int"):
            return ("agent", name.value, self.int_value())
        if name.value in ("L", "R") and self.at("ident"):
            sym = self.next().value
            self.expect("punct", ".")
            return ("lhs", name.value, sym, self.int_value())
        raise self.fail(("port number",))

    def rule_block(self) -> RawRule:
        kw = self.expect("kw", "rule")
        name = self.ident("rule name")
        self.expect("punct", ":")
        sym_a = self.ident("symbol name").value
        self.expect("punct", "><")
        sym_b = self.ident("symbol name").value
        self.expect("punct", "{")
        self.expect("kw", "rhs")
        self.expect("punct", "{")
        rhs_items = self.block_items()
        self.expect("punct", "}")
        maps = []
        while self.at("kw", "map"):
            maps.append(self.map_line())
        self.expect("punct", "}")
        return RawRule(name.value, (sym_a, sym_b), rhs_items, maps, kw.line, kw.col)

    def map_line(self) -> RawMap:
        kw = self.expect("kw", "map")
        src = self.endpoint()
        self.expect("punct", "->")
        tgt = self.endpoint()
        self.expect("punct", ";")
        return RawMap(src, tgt, kw.line, kw.col)

    def named_block(self) -> RawNamed:
        kw = self.expect("kw", "named")
        name = self.ident("selection name")
        self.expect("punct", "{")
        members = []
        while not self.at("punct", "}"):
            members.append(self.ident("agent name").value)
            self.expect("punct", ";")
        self.next()
        return RawNamed(name.value, members, kw.line, kw.col)

    def strategy_line(self) -> tuple[str, StrategyExpr, int, int]:
        kw = self.expect("kw", "strategy")
        name = self.ident("strategy name")
        self.expect("punct", "=")
        expr = self.full_strategy()
        self.expect("punct", ";")
        return (name.value, expr, kw.line, kw.col)

    # -- strategy expressions ----------------------------------------------
    # precedence, loosest first: || < or < ; < postfix (* and locations)

    def full_strategy(self) -> StrategyExpr:
        expr = self.par_level()
        locs = self.location_suffixes()
        return At(expr, tuple(locs)) if locs else expr

    def par_level(self) -> StrategyExpr:
        left = self.or_level()
        while self.at("punct", "||"):
            self.next()
            left = Par(left, self.or_level())
        return left

    def or_level(self) -> StrategyExpr:
        left = self.seq_level()
        while self.at("kw", "or"):
            self.next()
            left = Or(left, self.seq_level())
        return left

    def seq_level(self) -> StrategyExpr:
        left = self.post_level()
        # a ';' only continues the sequence if an atom follows; otherwise it
        # belongs to the enclosing statement
        while self.at("punct", ";") and self._starts_atom(self.peek(1)):
            self.next()
            left = Seq(left, self.post_level())
        return left

    @staticmethod
    def _starts_atom(tok: Token) -> bool:
        if tok.kind == "ident":
            return True
        if tok.kind == "kw" and tok.value in ("id", "fail"):
            return True
        return tok.kind == "punct" and tok.value == "("

    def post_level(self) -> StrategyExpr:
        expr = self.atom()
        locs = self.location_suffixes()
        if locs:
            expr = At(expr, tuple(locs))
        while self.at("punct", "*"):
            self.next()
            expr = Star(expr)
        return expr

    def atom(self) -> StrategyExpr:
        tok = self.peek()
        if tok.kind == "kw" and tok.value == "id":
            self.next()
            return Id()
        if tok.kind == "kw" and tok.value == "fail":
            self.next()
            return Fail()
        if tok.kind == "ident":
            self.next()
            return Apply(tok.value, None)
        if tok.kind == "punct" and tok.value == "(":
            self.next()
            expr = self.full_strategy()
            self.expect("punct", ")")
            return expr
        raise self.fail(("id", "fail", "rule name", "("))

    def location_suffixes(self) -> list[Location]:
        locs: list[Location] = []
        while True:
            if self.at("punct", "("):
                self.next()
                locs.append(self.location_body(")"))
            elif self.at("punct", "["):
                self.next()
                if self.at("punct", "("):
                    while True:
                        self.expect("punct", "(")
                        locs.append(self.location_body(")"))
                        if not self.at("punct", ","):
                            break
                        self.next()
                    self.expect("punct", "]")
                else:
                    locs.append(self.location_body("]"))
            else:
                return locs

    def location_body(self, closer: str) -> Location:
        sel = self.selector()
        self.expect("punct", ",")
        depth_tok = self.peek()
        negative = False
        if self.at("punct", "-"):
            self.next()
            negative = True
        depth = self.int_value()
        if negative:
            depth = -depth
        if depth < -1:
            raise ParseError(f"depth {depth} below -1", depth_tok.line, depth_tok.col)
        self.expect("punct", closer)
        return Location(sel, depth)

    def selector(self):
        tok = self.peek()
        if tok.kind == "kw" and tok.value == "all":
            self.next()
            return AllSel()
        if tok.kind == "kw" and tok.value in ("interface", "successors"):
            self.next()
            self.expect("punct", "(")
            inner = self.selector()
            self.expect("punct", ")")
            return InterfaceSel(inner) if tok.value == "interface" else SuccessorsSel(inner)
        if tok.kind == "ident":
            self.next()
            return NamedSel(tok.value)
        raise self.fail(("all", "interface", "successors", "selection name"))


# -- build pass --------------------------------------------------------------

@dataclass
class SourceDocument:
    signature: Signature
    rules: list[InteractionRule]
    nets: dict[str, Net]
    agent_names: dict[str, dict[str, int]]
    named: list[RawNamed]
    strategies: dict[str, StrategyExpr]


def _build_net(sig: Signature, items: list, in_rule: bool) -> tuple[Net, dict[str, int]]:
    net = Net(sig)
    names: dict[str, int] = {}
    for item in items:
        if isinstance(item, RawDecl):
            if item.name in names:
                raise ResolveError("DuplicateAgentName", f"agent {item.name!r} declared twice",
                                   item.line, item.col)
            if item.symbol not in sig:
                raise ResolveError("UnknownSymbol", f"unknown symbol {item.symbol!r}",
                                   item.line, item.col)
            names[item.name] = net.add_agent(item.symbol)
    for item in items:
        if isinstance(item, RawFree):
            if in_rule:
                raise ResolveError("FreePortInRule", "rule rhs cannot declare free ports",
                                   item.line, item.col)
            for name in item.names:
                net.declare_free(name)
    for item in items:
        if isinstance(item, RawWire):
            a = _resolve_ep(sig, net, names, item.a, in_rule, item.line, item.col)
            b = _resolve_ep(sig, net, names, item.b, in_rule, item.line, item.col)
            try:
                net.connect(a, b)
            except Exception as exc:
                raise ResolveError(type(exc).__name__, str(exc), item.line, item.col) from None
    return net, names


def _resolve_ep(sig: Signature, net: Net, names: dict[str, int], ep: RawEp,
                in_rule: bool, line: int, col: int):
    if ep[0] == "free":
        if in_rule:
            raise ResolveError("FreePortInRule", "rule rhs cannot reference free ports", line, col)
        return FreePort(ep[1])
    if ep[0] == "lhs":
        raise ResolveError(
            "LhsPortInWire",
            "lhs ports connect through map lines, not wires" if in_rule
            else "lhs accessors only make sense inside a rule",
            line, col,
        )
    _, name, port = ep
    aid = names.get(name)
    if aid is None:
        raise ResolveError("UnknownAgentName", f"no agent named {name!r}", line, col)
    arity = sig.arity(net.agents[aid])
    if not 0 <= port <= arity:
        raise ResolveError("PortOutOfRange", f"{name}.{port} exceeds arity {arity}", line, col)
    return AgentPort(aid, port)


def _resolve_lhs_port(sig: Signature, lhs: tuple[str, str], ep: RawEp,
                      line: int, col: int) -> LhsPort:
    _, prefix, sym, port = ep
    if sym not in lhs:
        raise ResolveError("UnknownLhsSymbol", f"{sym!r} is not on this rule's lhs", line, col)
    if lhs[0] == lhs[1]:
        side = SIDE_ALPHA if prefix == "L" else SIDE_BETA
    else:
        side = SIDE_ALPHA if sym == lhs[0] else SIDE_BETA
    arity = sig.arity(sym)
    if port == 0:
        raise ResolveError("PrincipalInMapping", "port 0 is consumed by the interaction", line, col)
    if port > arity:
        raise ResolveError("PortOutOfRange", f"{sym}.{port} exceeds arity {arity}", line, col)
    return LhsPort(side, port)


def _build_rule(sig: Signature, raw: RawRule) -> InteractionRule:
    for sym in raw.lhs:
        if sym not in sig:
            raise ResolveError("UnknownSymbol", f"unknown symbol {sym!r}", raw.line, raw.col)
    rhs, names = _build_net(sig, raw.rhs_items, in_rule=True)
    mapping: list[tuple[LhsPort, object]] = []
    for entry in raw.maps:
        if entry.src[0] != "lhs":
            raise ResolveError("MapSourceNotLhs", "map lines start from an lhs port (L.sym.n)",
                               entry.line, entry.col)
        src = _resolve_lhs_port(sig, raw.lhs, entry.src, entry.line, entry.col)
        if entry.tgt[0] == "lhs":
            tgt: object = _resolve_lhs_port(sig, raw.lhs, entry.tgt, entry.line, entry.col)
        elif entry.tgt[0] == "agent":
            tgt = _resolve_ep(sig, rhs, names, entry.tgt, True, entry.line, entry.col)
        else:
            raise ResolveError("FreePortInRule", "rule rhs cannot reference free ports",
                               entry.line, entry.col)
        mapping.append((src, tgt))
    return InteractionRule(raw.name, raw.lhs, rhs, mapping)


def parse_source(text: str) -> SourceDocument:
    raw = _Parser(lex(text)).source()
    if raw.signature is None:
        raise ResolveError("MissingSignature", "document has no signature block")
    sig = Signature()
    for name, arity, line, col in raw.signature:
        try:
            sig.declare(name, arity)
        except Exception as exc:
            raise ResolveError("BadSymbol", str(exc), line, col) from None

    rules = [_build_rule(sig, r) for r in raw.rules]
    nets: dict[str, Net] = {}
    agent_names: dict[str, dict[str, int]] = {}
    for raw_net in raw.nets:
        if raw_net.name in nets:
            raise ResolveError("DuplicateNet", f"net {raw_net.name!r} defined twice",
                               raw_net.line, raw_net.col)
        net, names = _build_net(sig, raw_net.items, in_rule=False)
        nets[raw_net.name] = net
        agent_names[raw_net.name] = names

    strategies: dict[str, StrategyExpr] = {}
    for name, expr, line, col in raw.strategies:
        if name in strategies:
            raise ResolveError("DuplicateStrategy", f"strategy {name!r} defined twice", line, col)
        strategies[name] = expr
    return SourceDocument(sig, rules, nets, agent_names, raw.named, strategies)


def assemble_document(src: SourceDocument, main: str = "main") -> Document:
    base = src.nets.get(main)
    if base is None:
        raise ResolveError("MissingNet", f"no net named {main!r}")
    m0 = base.copy()
    names = src.agent_names[main]
    seen: set[str] = set()
    for block in src.named:
        if block.name in seen:
            raise ResolveError("DuplicateSelection", f"selection {block.name!r} defined twice",
                               block.line, block.col)
        seen.add(block.name)
        members = set()
        for member in block.members:
            aid = names.get(member)
            if aid is None:
                raise ResolveError("UnknownAgentName",
                                   f"selection {block.name!r}: no agent named {member!r} in {main!r}",
                                   block.line, block.col)
            members.add(aid)
        m0.select(block.name, members)
    return new_document(src.signature, RuleSet(src.rules), dict(src.strategies), m0)


def parse_document(text: str, main: str = "main") -> Document:
    return assemble_document(parse_source(text), main)


def parse_strategy(text: str) -> StrategyExpr:
    parser = _Parser(lex(text))
    expr = parser.full_strategy()
    if parser.at("punct", ";"):
        parser.next()
    if not parser.at("eof"):
        raise parser.fail(("end of input",))
    return expr
