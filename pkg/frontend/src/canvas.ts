import { EditOp, Endpoint, NetJson, RedexInfo, isAgentEnd } from "./model.js";
import { PositionMap, agentKey, freeKey } from "./layout.js";

// Scene construction for the net canvas.  Pure data in, pure data out;
// the DOM layer only walks the returned scene.  Net content comes from
// service responses verbatim, positions come from the layout module, and
// the two never mix on the wire.

export type CanvasMode = "view" | "draw";

export interface PortGlyph {
  index: number;
  x: number;
  y: number;
  principal: boolean;
  occupied: boolean;
}

export interface AgentGlyph {
  id: number;
  symbol: string;
  x: number;
  y: number;
  r: number;
  selected: boolean;
  ports: PortGlyph[]; // index 0 first; rendered as the triangle
}

export interface FreeAnchor {
  name: string;
  x: number;
  y: number;
  occupied: boolean;
}

export interface EdgeGlyph {
  a: Endpoint;
  b: Endpoint;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  redex: boolean;
  rule: string | null; // set when redex and a rule covers the pair
  edgeId: number | null; // service edge id, known only for redexes
}

export interface Scene {
  mode: CanvasMode;
  agents: AgentGlyph[];
  edges: EdgeGlyph[];
  freePorts: FreeAnchor[];
}

export const AGENT_RADIUS = 26;

/** Anchor point of a port on the agent circle. Port 0 points up. */
export function portAnchor(cx: number, cy: number, r: number, index: number, total: number): { x: number; y: number } {
  const angle = -Math.PI / 2 + (index * 2 * Math.PI) / Math.max(1, total);
  return { x: cx + r * Math.cos(angle), y: cy + r * Math.sin(angle) };
}

export function buildScene(
  net: NetJson,
  redexes: RedexInfo[],
  arities: Map<string, number>,
  positions: PositionMap,
  mode: CanvasMode,
  selection: ReadonlySet<number> = new Set(),
): Scene {
  const occupied = new Set<string>();
  for (const [a, b] of net.edges) {
    occupied.add(epKey(a));
    occupied.add(epKey(b));
  }

  const agents: AgentGlyph[] = net.agents.map((a) => {
    const pos = positions.get(agentKey(a.id)) ?? { x: 0, y: 0 };
    const arity = arities.get(a.symbol) ?? inferArity(net, a.id);
    const total = arity + 1;
    const ports: PortGlyph[] = [];
    for (let p = 0; p < total; p++) {
      const anchor = portAnchor(pos.x, pos.y, AGENT_RADIUS, p, total);
      ports.push({
        index: p,
        x: anchor.x,
        y: anchor.y,
        principal: p === 0,
        occupied: occupied.has(epKey({ agent: a.id, port: p })),
      });
    }
    return {
      id: a.id,
      symbol: a.symbol,
      x: pos.x,
      y: pos.y,
      r: AGENT_RADIUS,
      selected: selection.has(a.id),
      ports,
    };
  });
  const byId = new Map(agents.map((g) => [g.id, g]));

  const freePorts: FreeAnchor[] = net.free.map((name) => {
    const pos = positions.get(freeKey(name)) ?? { x: 0, y: 0 };
    return { name, x: pos.x, y: pos.y, occupied: occupied.has(epKey({ free: name })) };
  });
  const byName = new Map(freePorts.map((f) => [f.name, f]));

  const redexByPair = new Map<string, RedexInfo>();
  for (const r of redexes) redexByPair.set(pairKey(r.agents[0], r.agents[1]), r);

  const edges: EdgeGlyph[] = net.edges.map(([a, b]) => {
    const pa = endPoint(a, byId, byName);
    const pb = endPoint(b, byId, byName);
    let redex: RedexInfo | undefined;
    if (isAgentEnd(a) && isAgentEnd(b) && a.port === 0 && b.port === 0) {
      redex = redexByPair.get(pairKey(a.agent, b.agent));
    }
    return {
      a,
      b,
      x1: pa.x,
      y1: pa.y,
      x2: pb.x,
      y2: pb.y,
      redex: redex !== undefined,
      rule: redex?.rule ?? null,
      edgeId: redex?.edgeId ?? null,
    };
  });

  return { mode, agents, edges, freePorts };
}

function epKey(ep: Endpoint): string {
  return isAgentEnd(ep) ? `a${ep.agent}.${ep.port}` : `f:${ep.free}`;
}

function pairKey(a: number, b: number): string {
  return a < b ? `${a}|${b}` : `${b}|${a}`;
}

function endPoint(
  ep: Endpoint,
  agents: Map<number, AgentGlyph>,
  frees: Map<string, FreeAnchor>,
): { x: number; y: number } {
  if (isAgentEnd(ep)) {
    const g = agents.get(ep.agent);
    if (!g) return { x: 0, y: 0 };
    const port = g.ports[ep.port];
    return port ? { x: port.x, y: port.y } : { x: g.x, y: g.y };
  }
  const f = frees.get(ep.free);
  return f ? { x: f.x, y: f.y } : { x: 0, y: 0 };
}

// Arity fallback when a symbol is missing from the palette map: the widest
// port index seen on that agent.  Under-counts unwired trailing ports,
// which only happens for documents created outside this editor.
function inferArity(net: NetJson, agentId: number): number {
  let max = 0;
  for (const [a, b] of net.edges) {
    for (const ep of [a, b]) {
      if (isAgentEnd(ep) && ep.agent === agentId) max = Math.max(max, ep.port);
    }
  }
  return max;
}

// Gesture payloads.  Each builder returns the exact op batch for one user
// action; note none of them carry coordinates.

export function placeAgentOps(symbol: string): EditOp[] {
  return [{ op: "addAgent", symbol }];
}

export function drawEdgeOps(a: Endpoint, b: Endpoint): EditOp[] {
  return [{ op: "connect", a, b }];
}

/** Port dragged to empty canvas: declare a free port and wire to it. */
export function drawEdgeToFreeOps(from: Endpoint, name: string): EditOp[] {
  return [
    { op: "addFree", name },
    { op: "connect", a: from, b: { free: name } },
  ];
}

export function deleteAgentOps(agentId: number): EditOp[] {
  return [{ op: "deleteAgent", agent: agentId }];
}

export function disconnectOps(at: Endpoint): EditOp[] {
  return [{ op: "disconnect", at }];
}

export function nameSelectionOps(name: string, agentIds: Iterable<number>): EditOp[] {
  return [{ op: "nameSelection", name, agents: [...agentIds] }];
}

/** Agents whose centers fall inside a lasso rectangle. */
export function agentsInRect(
  scene: Scene,
  x1: number,
  y1: number,
  x2: number,
  y2: number,
): number[] {
  const [lo, hi] = x1 <= x2 ? [x1, x2] : [x2, x1];
  const [top, bot] = y1 <= y2 ? [y1, y2] : [y2, y1];
  return scene.agents
    .filter((g) => g.x >= lo && g.x <= hi && g.y >= top && g.y <= bot)
    .map((g) => g.id);
}
