import { NetJson, TraceEdge, TraceJson } from "./model.js";

// Tree view of the trace.  Depth-first tidy layout: leaves get successive
// columns, inner nodes sit over the middle of their span.  All content is
// lifted straight from the trace JSON; selecting a node hands the caller
// that node's stored net, never a recomputed one.

export interface TraceNodeView {
  id: number;
  x: number;
  y: number;
  isRoot: boolean;
  isLeaf: boolean;
}

export interface TraceEdgeView {
  from: number;
  to: number;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  label: string;
  rule: string;
  agents: [number, number];
  strategy: string | null;
}

export const X_STEP = 96;
export const Y_STEP = 86;
export const MARGIN = 48;

export function edgeLabel(edge: TraceEdge): string {
  return `${edge.rule} [${edge.agents[0]},${edge.agents[1]}]`;
}

export class TraceViewModel {
  private constructor(
    readonly trace: TraceJson,
    readonly nodes: TraceNodeView[],
    readonly edges: TraceEdgeView[],
    readonly selected: number,
  ) {}

  static build(trace: TraceJson, selected?: number): TraceViewModel {
    const chosen = selected !== undefined && String(selected) in trace.nodes ? selected : trace.root;
    const children = new Map<number, number[]>();
    for (const e of trace.edges) {
      const list = children.get(e.from) ?? [];
      list.push(e.to);
      children.set(e.from, list);
    }
    for (const list of children.values()) list.sort((a, b) => a - b);

    const x = new Map<number, number>();
    const depth = new Map<number, number>();
    let nextLeaf = 0;
    const place = (id: number, d: number): number => {
      depth.set(id, d);
      const kids = children.get(id) ?? [];
      if (kids.length === 0) {
        const col = nextLeaf++;
        x.set(id, col);
        return col;
      }
      const cols = kids.map((k) => place(k, d + 1));
      const mid = (cols[0] + cols[cols.length - 1]) / 2;
      x.set(id, mid);
      return mid;
    };
    place(trace.root, 0);

    const px = (id: number) => MARGIN + (x.get(id) ?? 0) * X_STEP;
    const py = (id: number) => MARGIN + (depth.get(id) ?? 0) * Y_STEP;

    const nodeViews: TraceNodeView[] = Object.keys(trace.nodes)
      .map((k) => parseInt(k, 10))
      .filter((id) => depth.has(id))
      .sort((a, b) => a - b)
      .map((id) => ({
        id,
        x: px(id),
        y: py(id),
        isRoot: id === trace.root,
        isLeaf: (children.get(id) ?? []).length === 0,
      }));

    const edgeViews: TraceEdgeView[] = trace.edges.map((e) => ({
      from: e.from,
      to: e.to,
      x1: px(e.from),
      y1: py(e.from),
      x2: px(e.to),
      y2: py(e.to),
      label: edgeLabel(e),
      rule: e.rule,
      agents: e.agents,
      strategy: e.strategy,
    }));

    return new TraceViewModel(trace, nodeViews, edgeViews, chosen);
  }

  select(id: number): TraceViewModel {
    return TraceViewModel.build(this.trace, id);
  }

  /** The stored snapshot for a node, exactly as the service sent it. */
  netOf(id: number): NetJson | undefined {
    return this.trace.nodes[String(id)];
  }

  selectedNet(): NetJson | undefined {
    return this.netOf(this.selected);
  }

  /** Canvas is read-only whenever a non-root snapshot is shown. */
  readOnly(): boolean {
    return this.selected !== this.trace.root;
  }

  /** Net editing additionally needs a pristine, single-node trace. */
  canEditNet(): boolean {
    return !this.readOnly() && Object.keys(this.trace.nodes).length === 1;
  }

  extent(): { width: number; height: number } {
    let w = 0;
    let h = 0;
    for (const n of this.nodes) {
      w = Math.max(w, n.x);
      h = Math.max(h, n.y);
    }
    return { width: w + MARGIN, height: h + MARGIN };
  }
}
