import { AgentGlyph, EdgeGlyph, FreeAnchor, Scene } from "./canvas.js";
import { Endpoint } from "./model.js";
import { TraceViewModel } from "./trace_view.js";

// SVG rendering.  Everything is rebuilt from the scene on each render;
// at desk scale that is cheaper than diffing and impossible to desync.

const SVG_NS = "http://www.w3.org/2000/svg";

export function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | number> = {},
): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, String(v));
  return node;
}

export function clear(node: Element): void {
  while (node.firstChild) node.removeChild(node.firstChild);
}

export interface SceneHandlers {
  onAgentPointerDown?(agent: AgentGlyph, ev: PointerEvent): void;
  onPortPointerDown?(end: Endpoint, x: number, y: number, ev: PointerEvent): void;
  onEdgeClick?(edge: EdgeGlyph, ev: MouseEvent): void;
  onFreePointerDown?(anchor: FreeAnchor, ev: PointerEvent): void;
}

/** Outward-pointing triangle marking a principal port. */
export function trianglePoints(cx: number, cy: number, px: number, py: number): string {
  let dx = px - cx;
  let dy = py - cy;
  const d = Math.sqrt(dx * dx + dy * dy) || 1;
  dx /= d;
  dy /= d;
  const nx = -dy;
  const ny = dx;
  const tipX = px + dx * 9;
  const tipY = py + dy * 9;
  const b1x = px + nx * 6;
  const b1y = py + ny * 6;
  const b2x = px - nx * 6;
  const b2y = py - ny * 6;
  return `${tipX},${tipY} ${b1x},${b1y} ${b2x},${b2y}`;
}

export function renderScene(svg: SVGSVGElement, scene: Scene, handlers: SceneHandlers = {}): void {
  clear(svg);
  const edgeLayer = svgEl("g");
  const agentLayer = svgEl("g");
  svg.append(edgeLayer, agentLayer);

  for (const edge of scene.edges) {
    const line = svgEl("line", {
      x1: edge.x1,
      y1: edge.y1,
      x2: edge.x2,
      y2: edge.y2,
      class: edge.redex ? (edge.rule ? "edge redex" : "edge redex no-rule") : "edge",
    });
    if (edge.redex) {
      const title = svgEl("title");
      title.textContent = edge.rule ? `redex: rule ${edge.rule}` : "redex: no rule for this pair";
      line.append(title);
    }
    line.addEventListener("click", (ev) => handlers.onEdgeClick?.(edge, ev));
    edgeLayer.append(line);
  }

  for (const glyph of scene.agents) {
    agentLayer.append(renderAgent(glyph, handlers));
  }

  for (const anchor of scene.freePorts) {
    const g = svgEl("g", { class: "free-port" });
    g.append(
      svgEl("rect", { x: anchor.x - 5, y: anchor.y - 5, width: 10, height: 10, class: "free-box" }),
    );
    const label = svgEl("text", { x: anchor.x + 9, y: anchor.y + 4, class: "free-label" });
    label.textContent = anchor.name;
    g.append(label);
    g.addEventListener("pointerdown", (ev) => handlers.onFreePointerDown?.(anchor, ev));
    agentLayer.append(g);
  }
}

function renderAgent(glyph: AgentGlyph, handlers: SceneHandlers): SVGGElement {
  const g = svgEl("g", { class: glyph.selected ? "agent selected" : "agent" });
  const body = svgEl("circle", { cx: glyph.x, cy: glyph.y, r: glyph.r, class: "agent-body" });
  body.addEventListener("pointerdown", (ev) => handlers.onAgentPointerDown?.(glyph, ev));
  g.append(body);

  const label = svgEl("text", { x: glyph.x, y: glyph.y + 5, class: "agent-label" });
  label.textContent = glyph.symbol;
  g.append(label);

  for (const port of glyph.ports) {
    if (port.principal) {
      const tri = svgEl("polygon", {
        points: trianglePoints(glyph.x, glyph.y, port.x, port.y),
        class: port.occupied ? "principal occupied" : "principal",
      });
      tri.addEventListener("pointerdown", (ev) =>
        handlers.onPortPointerDown?.({ agent: glyph.id, port: 0 }, port.x, port.y, ev),
      );
      g.append(tri);
    } else {
      const dot = svgEl("circle", {
        cx: port.x,
        cy: port.y,
        r: 5,
        class: port.occupied ? "aux occupied" : "aux",
      });
      dot.addEventListener("pointerdown", (ev) =>
        handlers.onPortPointerDown?.({ agent: glyph.id, port: port.index }, port.x, port.y, ev),
      );
      const num = svgEl("text", {
        x: port.x + (port.x >= glyph.x ? 8 : -8),
        y: port.y + 4,
        class: "aux-num",
        "text-anchor": port.x >= glyph.x ? "start" : "end",
      });
      num.textContent = String(port.index);
      g.append(dot, num);
    }
  }
  return g;
}

export interface TraceHandlers {
  onNodeClick?(id: number): void;
}

export function renderTrace(svg: SVGSVGElement, view: TraceViewModel, handlers: TraceHandlers = {}): void {
  clear(svg);
  const { width, height } = view.extent();
  svg.setAttribute("viewBox", `0 0 ${Math.max(width, 200)} ${Math.max(height, 120)}`);

  for (const edge of view.edges) {
    svg.append(
      svgEl("line", { x1: edge.x1, y1: edge.y1, x2: edge.x2, y2: edge.y2, class: "trace-edge" }),
    );
    const lx = (edge.x1 + edge.x2) / 2;
    const ly = (edge.y1 + edge.y2) / 2 - 5;
    const label = svgEl("text", { x: lx + 6, y: ly, class: "trace-label" });
    label.textContent = edge.label;
    if (edge.strategy) {
      const title = svgEl("title");
      title.textContent = `strategy ${edge.strategy}`;
      label.append(title);
    }
    svg.append(label);
  }

  for (const node of view.nodes) {
    const cls = node.id === view.selected ? "trace-node selected" : "trace-node";
    const g = svgEl("g", { class: cls });
    g.append(svgEl("circle", { cx: node.x, cy: node.y, r: 15 }));
    const label = svgEl("text", { x: node.x, y: node.y + 4, class: "trace-node-label" });
    label.textContent = String(node.id);
    g.append(label);
    g.addEventListener("click", () => handlers.onNodeClick?.(node.id));
    svg.append(g);
  }
}
