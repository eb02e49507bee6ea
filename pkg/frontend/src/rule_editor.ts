import { NetJson, isAgentEnd } from "./model.js";
import { freshName } from "./doc_text.js";

// Rule drawing: lhs is the lassoed active pair, frozen; rhs is drawn from
// scratch; green dotted correspondence links say where each lhs auxiliary
// port reconnects.  Submission happens by appending the generated rule
// block to the document text and posting it as a new document.

export interface LhsSide {
  side: "L" | "R";
  symbol: string;
  arity: number;
}

export interface LhsPortRef {
  side: "L" | "R";
  port: number; // 1..arity, principal ports are consumed
}

export interface RhsPortRef {
  agent: string; // local rhs agent name
  port: number;
}

export type CorrTarget =
  | { kind: "rhs"; agent: string; port: number }
  | { kind: "lhs"; side: "L" | "R"; port: number };

export interface Correspondence {
  from: LhsPortRef;
  to: CorrTarget;
}

export interface RhsWire {
  a: RhsPortRef;
  b: RhsPortRef;
}

export interface SelectionError {
  error: string;
}

function lhsKey(p: LhsPortRef): string {
  return `${p.side}.${p.port}`;
}

function rhsKey(p: RhsPortRef): string {
  return `${p.agent}.${p.port}`;
}

export class RuleEditorModel {
  readonly rhsAgents: Array<{ name: string; symbol: string }> = [];
  readonly rhsWires: RhsWire[] = [];
  readonly correspondences: Correspondence[] = [];

  private constructor(
    readonly left: LhsSide,
    readonly right: LhsSide,
    private readonly arities: Map<string, number>,
  ) {}

  /**
   * Open the editor from a canvas selection.  The selection must be
   * exactly one active pair: two agents joined principal to principal.
   */
  static fromSelection(
    net: NetJson,
    selection: number[],
    arities: Map<string, number>,
  ): RuleEditorModel | SelectionError {
    if (selection.length !== 2) {
      return { error: `a rule lhs is exactly two agents, got ${selection.length}` };
    }
    const [p, q] = [...selection].sort((x, y) => x - y);
    if (p === q) return { error: "a rule lhs needs two distinct agents" };
    const joined = net.edges.some(
      ([a, b]) =>
        isAgentEnd(a) &&
        isAgentEnd(b) &&
        a.port === 0 &&
        b.port === 0 &&
        ((a.agent === p && b.agent === q) || (a.agent === q && b.agent === p)),
    );
    if (!joined) return { error: "selected agents are not joined on their principal ports" };
    const symOf = new Map(net.agents.map((a) => [a.id, a.symbol]));
    const symL = symOf.get(p);
    const symR = symOf.get(q);
    if (symL === undefined || symR === undefined) return { error: "selection refers to unknown agents" };
    const arity = (s: string) => arities.get(s) ?? 0;
    return new RuleEditorModel(
      { side: "L", symbol: symL, arity: arity(symL) },
      { side: "R", symbol: symR, arity: arity(symR) },
      arities,
    );
  }

  static isError(v: RuleEditorModel | SelectionError): v is SelectionError {
    return "error" in v;
  }

  lhsAuxPorts(): LhsPortRef[] {
    const out: LhsPortRef[] = [];
    for (const side of [this.left, this.right]) {
      for (let port = 1; port <= side.arity; port++) out.push({ side: side.side, port });
    }
    return out;
  }

  addRhsAgent(symbol: string): string {
    const base = symbol[0].toLowerCase() || "x";
    const name = freshName(base, this.rhsAgents.map((a) => a.name));
    this.rhsAgents.push({ name, symbol });
    return name;
  }

  removeRhsAgent(name: string): void {
    const i = this.rhsAgents.findIndex((a) => a.name === name);
    if (i < 0) return;
    this.rhsAgents.splice(i, 1);
    for (let w = this.rhsWires.length - 1; w >= 0; w--) {
      const wire = this.rhsWires[w];
      if (wire.a.agent === name || wire.b.agent === name) this.rhsWires.splice(w, 1);
    }
    for (let c = this.correspondences.length - 1; c >= 0; c--) {
      const t = this.correspondences[c].to;
      if (t.kind === "rhs" && t.agent === name) this.correspondences.splice(c, 1);
    }
  }

  rhsArity(name: string): number {
    const agent = this.rhsAgents.find((a) => a.name === name);
    return agent ? this.arities.get(agent.symbol) ?? 0 : 0;
  }

  /** Ports already used by a wire or a correspondence target. */
  private rhsPortUsed(ref: RhsPortRef): boolean {
    const key = rhsKey(ref);
    for (const w of this.rhsWires) {
      if (rhsKey(w.a) === key || rhsKey(w.b) === key) return true;
    }
    for (const c of this.correspondences) {
      if (c.to.kind === "rhs" && rhsKey({ agent: c.to.agent, port: c.to.port }) === key) return true;
    }
    return false;
  }

  addRhsWire(a: RhsPortRef, b: RhsPortRef): string | null {
    if (rhsKey(a) === rhsKey(b)) return "cannot wire a port to itself";
    for (const ref of [a, b]) {
      if (!this.rhsAgents.some((ag) => ag.name === ref.agent)) return `no rhs agent ${ref.agent}`;
      if (ref.port < 0 || ref.port > this.rhsArity(ref.agent)) return `${rhsKey(ref)} is out of range`;
      if (this.rhsPortUsed(ref)) return `${rhsKey(ref)} is already occupied`;
    }
    this.rhsWires.push({ a, b });
    return null;
  }

  removeRhsWire(index: number): void {
    this.rhsWires.splice(index, 1);
  }

  private lhsCovered(p: LhsPortRef): boolean {
    const key = lhsKey(p);
    for (const c of this.correspondences) {
      if (lhsKey(c.from) === key) return true;
      if (c.to.kind === "lhs" && lhsKey({ side: c.to.side, port: c.to.port }) === key) return true;
    }
    return false;
  }

  /**
   * Link an lhs aux port to an rhs port, or to another lhs aux port for
   * pass-through wiring.  Each lhs port takes exactly one link; relinking
   * requires removing the old one first.
   */
  addCorrespondence(from: LhsPortRef, to: CorrTarget): string | null {
    const sideOf = (s: "L" | "R") => (s === "L" ? this.left : this.right);
    if (from.port < 1 || from.port > sideOf(from.side).arity) {
      return `lhs port ${lhsKey(from)} is out of range`;
    }
    if (this.lhsCovered(from)) return `lhs port ${lhsKey(from)} is already linked`;
    if (to.kind === "lhs") {
      const ref = { side: to.side, port: to.port };
      if (to.port < 1 || to.port > sideOf(to.side).arity) {
        return `lhs port ${lhsKey(ref)} is out of range`;
      }
      if (lhsKey(ref) === lhsKey(from)) return "cannot link a port to itself";
      if (this.lhsCovered(ref)) return `lhs port ${lhsKey(ref)} is already linked`;
    } else {
      const ref = { agent: to.agent, port: to.port };
      if (!this.rhsAgents.some((ag) => ag.name === to.agent)) return `no rhs agent ${to.agent}`;
      if (to.port < 0 || to.port > this.rhsArity(to.agent)) return `${rhsKey(ref)} is out of range`;
      if (this.rhsPortUsed(ref)) return `${rhsKey(ref)} is already occupied`;
    }
    this.correspondences.push({ from, to });
    return null;
  }

  removeCorrespondence(index: number): void {
    this.correspondences.splice(index, 1);
  }

  /** Lhs aux ports still missing their green link. */
  unlinkedLhsPorts(): LhsPortRef[] {
    return this.lhsAuxPorts().filter((p) => !this.lhsCovered(p));
  }

  submittable(): boolean {
    return this.unlinkedLhsPorts().length === 0;
  }

  private lhsRefText(side: "L" | "R", port: number): string {
    const sym = side === "L" ? this.left.symbol : this.right.symbol;
    if (this.left.symbol === this.right.symbol) return `${side}.${sym}.${port}`;
    // distinct symbols: the symbol names the side, keep the L prefix
    return `L.${sym}.${port}`;
  }

  /** The rule block in document syntax. */
  ruleText(name: string): string {
    const lines: string[] = [];
    lines.push(`rule ${name} : ${this.left.symbol} >< ${this.right.symbol} {`);
    if (this.rhsAgents.length === 0 && this.rhsWires.length === 0) {
      lines.push("  rhs { }");
    } else {
      lines.push("  rhs {");
      for (const a of this.rhsAgents) lines.push(`    ${a.name} : ${a.symbol};`);
      for (const w of this.rhsWires) {
        lines.push(`    wire ${w.a.agent}.${w.a.port} - ${w.b.agent}.${w.b.port};`);
      }
      lines.push("  }");
    }
    for (const c of this.sortedCorrespondences()) {
      const src = this.lhsRefText(c.from.side, c.from.port);
      const dst =
        c.to.kind === "rhs"
          ? `${c.to.agent}.${c.to.port}`
          : this.lhsRefText(c.to.side, c.to.port);
      lines.push(`  map ${src} -> ${dst};`);
    }
    lines.push("}");
    return lines.join("\n");
  }

  private sortedCorrespondences(): Correspondence[] {
    const rank = (p: LhsPortRef) => (p.side === "L" ? 0 : 1) * 1000 + p.port;
    return [...this.correspondences].sort((a, b) => rank(a.from) - rank(b.from));
  }
}
