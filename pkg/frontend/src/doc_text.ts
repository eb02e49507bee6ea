// Light-weight scanning of document text.  The client never rewrites nets
// and never parses full documents; it only needs the symbol palette, the
// rule names for the strategy panel, and a way to append a rule block.

export interface SymbolInfo {
  name: string;
  arity: number;
}

const SIG_BLOCK = /signature\s*\{([^}]*)\}/;
const SIG_ENTRY = /([A-Za-z_][A-Za-z0-9_]*)\s*:\s*(\d+)/g;
const RULE_HEAD = /rule\s+([A-Za-z_][A-Za-z0-9_]*)\s*:/g;

/** Symbols declared in the first signature block, in declaration order. */
export function scanSignature(text: string): SymbolInfo[] {
  const block = SIG_BLOCK.exec(stripComments(text));
  if (!block) return [];
  const out: SymbolInfo[] = [];
  for (const m of block[1].matchAll(SIG_ENTRY)) {
    out.push({ name: m[1], arity: parseInt(m[2], 10) });
  }
  return out;
}

export function arityMap(text: string): Map<string, number> {
  const m = new Map<string, number>();
  for (const s of scanSignature(text)) m.set(s.name, s.arity);
  return m;
}

export function scanRuleNames(text: string): string[] {
  const out: string[] = [];
  for (const m of stripComments(text).matchAll(RULE_HEAD)) out.push(m[1]);
  return out;
}

function stripComments(text: string): string {
  return text.replace(/\/\/[^\n]*/g, "");
}

/** Append a rule block, keeping exactly one blank line between blocks. */
export function appendRule(text: string, ruleText: string): string {
  const base = text.replace(/\s+$/, "");
  return base + "\n\n" + ruleText + "\n";
}

/** First identifier of the form `base`, `base2`, ... not in `taken`. */
export function freshName(base: string, taken: Iterable<string>): string {
  const used = new Set(taken);
  if (!used.has(base)) return base;
  for (let i = 2; ; i++) {
    const cand = base + i;
    if (!used.has(cand)) return cand;
  }
}

export interface CaretSnippet {
  lineText: string;
  caret: string; // spaces plus a single ^ under the column
}

/** Render a diagnostic position as the offending line plus a caret line. */
export function caretSnippet(text: string, line: number, col: number): CaretSnippet {
  const lines = text.split("\n");
  const lineText = lines[line - 1] ?? "";
  const n = Math.max(0, Math.min(col - 1, lineText.length));
  return { lineText, caret: " ".repeat(n) + "^" };
}
