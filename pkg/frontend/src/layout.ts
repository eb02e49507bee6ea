import { NetJson, isAgentEnd } from "./model.js";

// Force-directed placement for net views.  Deterministic: seeded initial
// positions, fixed iteration count, no wall-clock input.  Pinned nodes
// never move; everything here is view state and stays client-side.

export interface LayoutPoint {
  x: number;
  y: number;
  pinned?: boolean;
}

export type PositionMap = Map<string, LayoutPoint>;

export interface LayoutOptions {
  width?: number;
  height?: number;
  iterations?: number;
  seed?: number;
}

export function agentKey(id: number): string {
  return `agent:${id}`;
}

export function freeKey(name: string): string {
  return `free:${name}`;
}

// mulberry32; good enough for jitter and cheap to reimplement anywhere
function rng(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

interface Body {
  key: string;
  x: number;
  y: number;
  pinned: boolean;
}

/**
 * Compute positions for every agent and free port of `net`.  Entries in
 * `prev` are reused (and pinned ones frozen); new nodes get seeded spots.
 */
export function runLayout(net: NetJson, prev: PositionMap, opts: LayoutOptions = {}): PositionMap {
  const width = opts.width ?? 900;
  const height = opts.height ?? 600;
  const iterations = opts.iterations ?? 180;
  const rand = rng(opts.seed ?? 42);
  const cx = width / 2;
  const cy = height / 2;

  const keys: string[] = [];
  for (const a of net.agents) keys.push(agentKey(a.id));
  for (const f of net.free) keys.push(freeKey(f));

  const bodies: Body[] = keys.map((key, i) => {
    const old = prev.get(key);
    if (old) return { key, x: old.x, y: old.y, pinned: !!old.pinned };
    // seeded ring placement, angle by index so insertion order is stable
    const angle = (i / Math.max(1, keys.length)) * 2 * Math.PI;
    const r = Math.min(width, height) * 0.3 * (0.7 + 0.3 * rand());
    return { key, x: cx + r * Math.cos(angle) + rand() * 8, y: cy + r * Math.sin(angle) + rand() * 8, pinned: false };
  });
  const index = new Map(bodies.map((b, i) => [b.key, i]));

  const springs: Array<[number, number]> = [];
  for (const [a, b] of net.edges) {
    const ka = isAgentEnd(a) ? agentKey(a.agent) : freeKey(a.free);
    const kb = isAgentEnd(b) ? agentKey(b.agent) : freeKey(b.free);
    const ia = index.get(ka);
    const ib = index.get(kb);
    if (ia !== undefined && ib !== undefined && ia !== ib) springs.push([ia, ib]);
  }

  const restLen = 110;
  const fx = new Float64Array(bodies.length);
  const fy = new Float64Array(bodies.length);

  for (let step = 0; step < iterations; step++) {
    fx.fill(0);
    fy.fill(0);
    // pairwise repulsion; n is small at desk scale so n^2 is fine
    for (let i = 0; i < bodies.length; i++) {
      for (let j = i + 1; j < bodies.length; j++) {
        let dx = bodies[i].x - bodies[j].x;
        let dy = bodies[i].y - bodies[j].y;
        let d2 = dx * dx + dy * dy;
        if (d2 < 1e-4) {
          // coincident points: push apart deterministically
          dx = 0.5 + (i % 3) * 0.25;
          dy = 0.5 + (j % 3) * 0.25;
          d2 = dx * dx + dy * dy;
        }
        const f = 5200 / d2;
        const d = Math.sqrt(d2);
        fx[i] += (dx / d) * f;
        fy[i] += (dy / d) * f;
        fx[j] -= (dx / d) * f;
        fy[j] -= (dy / d) * f;
      }
    }
    for (const [ia, ib] of springs) {
      const dx = bodies[ib].x - bodies[ia].x;
      const dy = bodies[ib].y - bodies[ia].y;
      const d = Math.max(1e-2, Math.sqrt(dx * dx + dy * dy));
      const f = 0.04 * (d - restLen);
      fx[ia] += (dx / d) * f * restLen;
      fy[ia] += (dy / d) * f * restLen;
      fx[ib] -= (dx / d) * f * restLen;
      fy[ib] -= (dy / d) * f * restLen;
    }
    const cool = 1 - step / iterations;
    const cap = 18 * cool + 1;
    for (let i = 0; i < bodies.length; i++) {
      const b = bodies[i];
      if (b.pinned) continue;
      // gentle pull to the viewport center
      fx[i] += (cx - b.x) * 0.005;
      fy[i] += (cy - b.y) * 0.005;
      const mag = Math.sqrt(fx[i] * fx[i] + fy[i] * fy[i]);
      const scale = mag > cap ? cap / mag : 1;
      b.x += fx[i] * scale;
      b.y += fy[i] * scale;
    }
  }

  const out: PositionMap = new Map();
  for (const b of bodies) {
    out.set(b.key, { x: round2(b.x), y: round2(b.y), pinned: b.pinned || undefined });
  }
  return out;
}

function round2(v: number): number {
  return Math.round(v * 100) / 100;
}

/** Pin a node at a position, typically after a user drag. */
export function pin(positions: PositionMap, key: string, x: number, y: number): PositionMap {
  const next = new Map(positions);
  next.set(key, { x, y, pinned: true });
  return next;
}

export function unpin(positions: PositionMap, key: string): PositionMap {
  const next = new Map(positions);
  const old = next.get(key);
  if (old) next.set(key, { x: old.x, y: old.y });
  return next;
}

// Persistence.  Layout is the only thing stored locally; it is keyed by
// document so reloading a document brings back the same picture.

export interface KV {
  get(key: string): string | null;
  set(key: string, value: string): void;
}

export class MemoryKV implements KV {
  private store = new Map<string, string>();
  get(key: string): string | null {
    return this.store.has(key) ? this.store.get(key)! : null;
  }
  set(key: string, value: string): void {
    this.store.set(key, value);
  }
}

export function browserKV(): KV {
  try {
    const probe = "__inet_probe__";
    window.localStorage.setItem(probe, "1");
    window.localStorage.removeItem(probe);
    return {
      get: (k) => window.localStorage.getItem(k),
      set: (k, v) => window.localStorage.setItem(k, v),
    };
  } catch {
    return new MemoryKV();
  }
}

const STORE_PREFIX = "inet-editor/layout/";

export function savePositions(kv: KV, docId: string, positions: PositionMap): void {
  const obj: Record<string, LayoutPoint> = {};
  for (const [k, v] of positions) obj[k] = v;
  kv.set(STORE_PREFIX + docId, JSON.stringify(obj));
}

export function loadPositions(kv: KV, docId: string): PositionMap {
  const raw = kv.get(STORE_PREFIX + docId);
  const out: PositionMap = new Map();
  if (!raw) return out;
  try {
    const obj = JSON.parse(raw) as Record<string, LayoutPoint>;
    for (const [k, v] of Object.entries(obj)) {
      if (typeof v?.x === "number" && typeof v?.y === "number" && isFinite(v.x) && isFinite(v.y)) {
        out.set(k, { x: v.x, y: v.y, pinned: v.pinned || undefined });
      }
    }
  } catch {
    // corrupt stored layout: start fresh
  }
  return out;
}
