import { ServiceClient, ServiceError } from "./api.js";
import {
  CanvasMode,
  Scene,
  agentsInRect,
  buildScene,
  deleteAgentOps,
  disconnectOps,
  drawEdgeOps,
  drawEdgeToFreeOps,
  placeAgentOps,
} from "./canvas.js";
import { arityMap, caretSnippet, freshName, scanRuleNames, scanSignature } from "./doc_text.js";
import {
  KV,
  PositionMap,
  agentKey,
  browserKV,
  freeKey,
  loadPositions,
  pin,
  runLayout,
  savePositions,
} from "./layout.js";
import { Endpoint, NodeState, isAgentEnd } from "./model.js";
import { RuleEditorModel } from "./rule_editor.js";
import { renderScene, renderTrace, svgEl, clear } from "./dom.js";
import { TraceViewModel } from "./trace_view.js";

const DEFAULT_DOC = `signature { Z: 0; S: 1; Add: 2; }

rule addZ : Z >< Add {
  rhs { }
  map L.Add.1 -> L.Add.2;
}

rule addS : S >< Add {
  rhs {
    s : S;
    a : Add;
    wire s.1 - a.2;
  }
  map L.S.1 -> a.0;
  map L.Add.1 -> a.1;
  map L.Add.2 -> s.0;
}

net main {
  s1 : S; z1 : Z;
  t1 : S; z2 : Z;
  add : Add;
  free out;
  wire s1.0 - add.0;
  wire s1.1 - z1.0;
  wire t1.0 - add.1;
  wire t1.1 - z2.0;
  wire add.2 - free out;
}

strategy go = (addS or addZ)*(all,-1);
`;

type Drag =
  | { kind: "move"; key: string; dx: number; dy: number }
  | { kind: "wire"; from: Endpoint; x: number; y: number }
  | { kind: "lasso"; x0: number; y0: number; x1: number; y1: number };

class App {
  private client: ServiceClient | null = null;
  private docId: string | null = null;
  private docText = DEFAULT_DOC;
  private view: TraceViewModel | null = null;
  private node: NodeState | null = null;
  private positions: PositionMap = new Map();
  private mode: CanvasMode = "view";
  private selection = new Set<number>();
  private palette: string | null = null;
  private editor: RuleEditorModel | null = null;
  private scene: Scene | null = null;
  private drag: Drag | null = null;
  private animating = 0;
  private readonly kv: KV = browserKV();

  private readonly canvas = byId<SVGSVGElement>("canvas");
  private readonly traceSvg = byId<SVGSVGElement>("trace");
  private readonly overlay = byId<SVGSVGElement>("overlay");

  start(): void {
    const text = byId<HTMLTextAreaElement>("doc-text");
    text.value = this.docText;
    text.addEventListener("input", () => {
      this.docText = text.value;
    });
    const remembered = this.kv.get("inet-editor/base-url");
    if (remembered) byId<HTMLInputElement>("base-url").value = remembered;

    byId<HTMLButtonElement>("btn-create").addEventListener("click", () => void this.createDocument());
    byId<HTMLButtonElement>("btn-mode-view").addEventListener("click", () => this.setMode("view"));
    byId<HTMLButtonElement>("btn-mode-draw").addEventListener("click", () => this.setMode("draw"));
    byId<HTMLButtonElement>("btn-run").addEventListener("click", () => void this.runStrategy());
    byId<HTMLButtonElement>("btn-explore").addEventListener("click", () => void this.explore());
    byId<HTMLButtonElement>("btn-make-rule").addEventListener("click", () => this.openRuleEditor());
    byId<HTMLInputElement>("strategy-expr").addEventListener("keydown", (ev) => {
      if (ev.key === "Enter") void this.runStrategy();
    });

    this.canvas.addEventListener("pointermove", (ev) => this.onPointerMove(ev));
    this.canvas.addEventListener("pointerup", (ev) => this.onPointerUp(ev));
    this.canvas.addEventListener("pointerdown", (ev) => this.onCanvasPointerDown(ev));

    this.render();
  }

  private setMode(mode: CanvasMode): void {
    if (mode === "draw" && !(this.view?.canEditNet() ?? false)) {
      this.status("drawing edits the initial net; this trace is already explored, create a new document to edit", "warn");
      return;
    }
    this.mode = mode;
    this.render();
  }

  private baseUrl(): string {
    const raw = byId<HTMLInputElement>("base-url").value.trim() || "http://127.0.0.1:8742";
    return raw.replace(/\/+$/, "");
  }

  private async createDocument(): Promise<void> {
    const url = this.baseUrl();
    this.kv.set("inet-editor/base-url", url);
    this.client = new ServiceClient(url);
    try {
      const { docId } = await this.client.createDocument(this.docText);
      this.docId = docId;
      this.positions = loadPositions(this.kv, docId);
      this.selection.clear();
      this.editor = null;
      this.mode = "view";
      this.status(`document ${docId.slice(0, 8)} created`, "ok");
      await this.refresh();
    } catch (err) {
      this.showError(err);
    }
  }

  private async refresh(selectId?: number): Promise<void> {
    if (!this.client || !this.docId) return;
    const trace = await this.client.getTrace(this.docId);
    const want = selectId ?? this.view?.selected;
    this.view = TraceViewModel.build(trace, want);
    this.node = await this.client.getNode(this.docId, this.view.selected);
    this.positions = runLayout(this.node.net, this.positions, { width: 900, height: 560 });
    savePositions(this.kv, this.docId, this.positions);
    for (const id of [...this.selection]) {
      if (!this.node.net.agents.some((a) => a.id === id)) this.selection.delete(id);
    }
    this.render();
  }

  private async selectNode(id: number): Promise<void> {
    if (!this.view || this.view.selected === id) return;
    this.selection.clear();
    if (this.mode === "draw") this.mode = "view";
    try {
      await this.refresh(id);
    } catch (err) {
      this.showError(err);
    }
  }

  // ---- canvas gestures ----------------------------------------------

  private scenePoint(ev: PointerEvent): { x: number; y: number } {
    const rect = this.canvas.getBoundingClientRect();
    return { x: ev.clientX - rect.left, y: ev.clientY - rect.top };
  }

  private onCanvasPointerDown(ev: PointerEvent): void {
    if (ev.target !== this.canvas || !this.scene) return;
    const { x, y } = this.scenePoint(ev);
    if (this.mode === "draw" && this.palette && this.canEdit()) {
      void this.placeAgent(this.palette, x, y);
      return;
    }
    if (this.mode === "view") {
      this.drag = { kind: "lasso", x0: x, y0: y, x1: x, y1: y };
    }
  }

  private onAgentPointerDown(id: number, ev: PointerEvent): void {
    ev.stopPropagation();
    const { x, y } = this.scenePoint(ev);
    if (this.mode === "view") {
      if (ev.shiftKey) {
        if (this.selection.has(id)) this.selection.delete(id);
        else this.selection.add(id);
        this.render();
        return;
      }
      const pos = this.positions.get(agentKey(id)) ?? { x, y };
      this.drag = { kind: "move", key: agentKey(id), dx: pos.x - x, dy: pos.y - y };
    } else if (this.canEdit() && ev.altKey) {
      void this.edit(deleteAgentOps(id));
    }
  }

  private onPortPointerDown(end: Endpoint, px: number, py: number, ev: PointerEvent): void {
    ev.stopPropagation();
    if (this.mode === "draw" && this.canEdit()) {
      this.drag = { kind: "wire", from: end, x: px, y: py };
    } else if (this.mode === "view" && isAgentEnd(end)) {
      this.onAgentPointerDown(end.agent, ev);
    }
  }

  private onFreePointerDown(name: string, ev: PointerEvent): void {
    ev.stopPropagation();
    const { x, y } = this.scenePoint(ev);
    if (this.mode === "draw" && this.canEdit()) {
      this.drag = { kind: "wire", from: { free: name }, x, y };
    } else if (this.mode === "view") {
      const pos = this.positions.get(freeKey(name)) ?? { x, y };
      this.drag = { kind: "move", key: freeKey(name), dx: pos.x - x, dy: pos.y - y };
    }
  }

  private onEdgeClick(edgeId: number | null, a: Endpoint, ev: MouseEvent): void {
    ev.stopPropagation();
    if (this.mode === "draw" && this.canEdit()) {
      void this.edit(disconnectOps(a));
      return;
    }
    if (this.mode === "view" && edgeId !== null) {
      void this.applyRedex(edgeId);
    }
  }

  private onPointerMove(ev: PointerEvent): void {
    if (!this.drag) return;
    const { x, y } = this.scenePoint(ev);
    if (this.drag.kind === "move") {
      this.positions = pin(this.positions, this.drag.key, x + this.drag.dx, y + this.drag.dy);
      this.renderCanvas();
    } else if (this.drag.kind === "wire") {
      this.renderOverlay(this.drag.x, this.drag.y, x, y, "wire-preview");
    } else {
      this.drag.x1 = x;
      this.drag.y1 = y;
      this.renderLasso(this.drag);
    }
  }

  private onPointerUp(ev: PointerEvent): void {
    const drag = this.drag;
    this.drag = null;
    clear(this.overlay);
    if (!drag || !this.scene) return;
    const { x, y } = this.scenePoint(ev);
    if (drag.kind === "move") {
      if (this.docId) savePositions(this.kv, this.docId, this.positions);
      this.renderCanvas();
      return;
    }
    if (drag.kind === "lasso") {
      const dx = Math.abs(drag.x1 - drag.x0);
      const dy = Math.abs(drag.y1 - drag.y0);
      if (dx < 4 && dy < 4) {
        this.selection.clear();
      } else {
        this.selection = new Set(agentsInRect(this.scene, drag.x0, drag.y0, drag.x1, drag.y1));
      }
      this.render();
      return;
    }
    const target = this.portAt(x, y);
    if (target && !sameEndpoint(target, drag.from)) {
      void this.edit(drawEdgeOps(drag.from, target));
    } else if (!target) {
      const name = freshName("f", this.node?.net.free ?? []);
      void this.edit(drawEdgeToFreeOps(drag.from, name)).then(() => {
        if (this.docId) {
          this.positions = pin(this.positions, freeKey(name), x, y);
          savePositions(this.kv, this.docId, this.positions);
          this.renderCanvas();
        }
      });
    }
  }

  /** Nearest unoccupied port anchor within grab distance, if any. */
  private portAt(x: number, y: number): Endpoint | null {
    if (!this.scene) return null;
    let best: Endpoint | null = null;
    let bestD = 16;
    for (const g of this.scene.agents) {
      for (const p of g.ports) {
        if (p.occupied) continue;
        const d = Math.hypot(p.x - x, p.y - y);
        if (d < bestD) {
          bestD = d;
          best = { agent: g.id, port: p.index };
        }
      }
    }
    for (const f of this.scene.freePorts) {
      if (f.occupied) continue;
      const d = Math.hypot(f.x - x, f.y - y);
      if (d < bestD) {
        bestD = d;
        best = { free: f.name };
      }
    }
    return best;
  }

  private canEdit(): boolean {
    return this.view?.canEditNet() ?? false;
  }

  // ---- service calls ------------------------------------------------

  private async placeAgent(symbol: string, x: number, y: number): Promise<void> {
    if (!this.client || !this.docId || !this.node) return;
    const before = new Set(this.node.net.agents.map((a) => a.id));
    try {
      await this.client.editNet(this.docId, placeAgentOps(symbol));
      await this.refresh();
      const added = this.node?.net.agents.find((a) => !before.has(a.id));
      if (added && this.docId) {
        this.positions = pin(this.positions, agentKey(added.id), x, y);
        savePositions(this.kv, this.docId, this.positions);
        this.renderCanvas();
      }
    } catch (err) {
      this.showError(err);
    }
  }

  private async edit(ops: Parameters<ServiceClient["editNet"]>[1]): Promise<void> {
    if (!this.client || !this.docId) return;
    try {
      await this.client.editNet(this.docId, ops);
      await this.refresh();
    } catch (err) {
      this.showError(err);
    }
  }

  private async applyRedex(edgeId: number): Promise<void> {
    if (!this.client || !this.docId || !this.view) return;
    try {
      const { childId } = await this.client.applyStep(this.docId, this.view.selected, edgeId);
      await this.refresh(childId);
      this.status(`applied redex, now at node ${childId}`, "ok");
    } catch (err) {
      this.showError(err);
    }
  }

  private async explore(): Promise<void> {
    if (!this.client || !this.docId || !this.view) return;
    try {
      const { children } = await this.client.explore(this.docId, this.view.selected);
      await this.refresh();
      this.status(`explore: ${children.length} child${children.length === 1 ? "" : "ren"}`, "ok");
    } catch (err) {
      this.showError(err);
    }
  }

  private async runStrategy(): Promise<void> {
    if (!this.client || !this.docId || !this.view) {
      this.status("create a document first", "warn");
      return;
    }
    const expr = byId<HTMLInputElement>("strategy-expr").value.trim();
    if (!expr) return;
    if (scanRuleNames(this.docText).length === 0) {
      this.status("this document declares no rules", "warn");
      return;
    }
    this.clearDiag();
    const from = this.view.selected;
    try {
      const result = await this.client.runStrategy(this.docId, from, expr);
      if (result.status === "failure") {
        this.status("strategy failed, net unchanged", "warn");
        return;
      }
      await this.refresh();
      await this.animatePath(result.path);
      this.status(`strategy succeeded: ${result.path.length} step${result.path.length === 1 ? "" : "s"}`, "ok");
    } catch (err) {
      if (err instanceof ServiceError && err.diagnostics.length > 0) {
        this.showCaret(expr, err.diagnostics[0]);
      }
      this.showError(err);
    }
  }

  private async animatePath(path: number[]): Promise<void> {
    const token = ++this.animating;
    for (const id of path) {
      if (token !== this.animating) return;
      await this.refresh(id);
      await sleep(320);
    }
  }

  // ---- rule editor --------------------------------------------------

  private openRuleEditor(): void {
    if (!this.node) {
      this.status("create a document first", "warn");
      return;
    }
    const opened = RuleEditorModel.fromSelection(this.node.net, [...this.selection], arityMap(this.docText));
    if (RuleEditorModel.isError(opened)) {
      this.status(opened.error, "warn");
      return;
    }
    this.editor = opened;
    byId<HTMLInputElement>("rule-name").value = freshName("r", scanRuleNames(this.docText));
    byId<HTMLElement>("rule-dialog").classList.add("open");
    this.renderRuleEditor();
  }

  private closeRuleEditor(): void {
    this.editor = null;
    byId<HTMLElement>("rule-dialog").classList.remove("open");
  }

  private renderRuleEditor(): void {
    const editor = this.editor;
    if (!editor) return;
    byId<HTMLElement>("rule-lhs").textContent = `${editor.left.symbol} >< ${editor.right.symbol}`;

    const agentsDiv = byId<HTMLElement>("rule-rhs-agents");
    agentsDiv.textContent = "";
    for (const a of editor.rhsAgents) {
      const row = document.createElement("div");
      row.className = "rhs-agent";
      row.textContent = `${a.name} : ${a.symbol}`;
      const del = document.createElement("button");
      del.textContent = "x";
      del.addEventListener("click", () => {
        editor.removeRhsAgent(a.name);
        this.renderRuleEditor();
      });
      row.append(del);
      agentsDiv.append(row);
    }

    const symbolSel = byId<HTMLSelectElement>("rule-add-symbol");
    fillSelect(symbolSel, scanSignature(this.docText).map((s) => s.name));
    byId<HTMLButtonElement>("rule-add-agent").onclick = () => {
      if (symbolSel.value) {
        editor.addRhsAgent(symbolSel.value);
        this.renderRuleEditor();
      }
    };

    const rhsPorts: string[] = [];
    for (const a of editor.rhsAgents) {
      for (let p = 0; p <= editor.rhsArity(a.name); p++) rhsPorts.push(`${a.name}.${p}`);
    }
    const wireA = byId<HTMLSelectElement>("rule-wire-a");
    const wireB = byId<HTMLSelectElement>("rule-wire-b");
    fillSelect(wireA, rhsPorts);
    fillSelect(wireB, rhsPorts);
    byId<HTMLButtonElement>("rule-add-wire").onclick = () => {
      const a = parseRhsRef(wireA.value);
      const b = parseRhsRef(wireB.value);
      if (a && b) {
        const err = editor.addRhsWire(a, b);
        if (err) this.status(err, "warn");
        this.renderRuleEditor();
      }
    };

    const wiresDiv = byId<HTMLElement>("rule-rhs-wires");
    wiresDiv.textContent = "";
    editor.rhsWires.forEach((w, i) => {
      const row = document.createElement("div");
      row.textContent = `${w.a.agent}.${w.a.port} - ${w.b.agent}.${w.b.port}`;
      const del = document.createElement("button");
      del.textContent = "x";
      del.addEventListener("click", () => {
        editor.removeRhsWire(i);
        this.renderRuleEditor();
      });
      row.append(del);
      wiresDiv.append(row);
    });

    const lhsSel = byId<HTMLSelectElement>("rule-link-from");
    fillSelect(lhsSel, editor.unlinkedLhsPorts().map((p) => `${p.side}.${p.port}`));
    const targetSel = byId<HTMLSelectElement>("rule-link-to");
    fillSelect(targetSel, [
      ...rhsPorts,
      ...editor.unlinkedLhsPorts().map((p) => `lhs:${p.side}.${p.port}`),
    ]);
    byId<HTMLButtonElement>("rule-add-link").onclick = () => {
      const from = parseLhsRef(lhsSel.value);
      const to = parseTarget(targetSel.value);
      if (from && to) {
        const err = editor.addCorrespondence(from, to);
        if (err) this.status(err, "warn");
        this.renderRuleEditor();
      }
    };

    const linksDiv = byId<HTMLElement>("rule-links");
    linksDiv.textContent = "";
    editor.correspondences.forEach((c, i) => {
      const row = document.createElement("div");
      row.className = "corr-link";
      const toText =
        c.to.kind === "rhs" ? `${c.to.agent}.${c.to.port}` : `${c.to.side}.${c.to.port}`;
      row.textContent = `${c.from.side}.${c.from.port} ~ ${toText}`;
      const del = document.createElement("button");
      del.textContent = "x";
      del.addEventListener("click", () => {
        editor.removeCorrespondence(i);
        this.renderRuleEditor();
      });
      row.append(del);
      linksDiv.append(row);
    });

    const nameInput = byId<HTMLInputElement>("rule-name");
    const preview = byId<HTMLElement>("rule-preview");
    const submit = byId<HTMLButtonElement>("rule-submit");
    const renderPreview = () => {
      preview.textContent = editor.ruleText(nameInput.value || "r1");
      const missing = editor.unlinkedLhsPorts();
      submit.disabled = missing.length > 0 || !/^[A-Za-z_][A-Za-z0-9_]*$/.test(nameInput.value);
      byId<HTMLElement>("rule-missing").textContent =
        missing.length > 0
          ? "unlinked lhs ports: " + missing.map((p) => `${p.side}.${p.port}`).join(", ")
          : "";
    };
    nameInput.oninput = renderPreview;
    renderPreview();

    submit.onclick = () => void this.submitRule();
    byId<HTMLButtonElement>("rule-cancel").onclick = () => this.closeRuleEditor();
  }

  private async submitRule(): Promise<void> {
    const editor = this.editor;
    if (!editor || !editor.submittable()) return;
    const name = byId<HTMLInputElement>("rule-name").value;
    const { appendRule } = await import("./doc_text.js");
    const nextText = appendRule(this.docText, editor.ruleText(name));
    this.docText = nextText;
    byId<HTMLTextAreaElement>("doc-text").value = nextText;
    this.closeRuleEditor();
    await this.createDocument();
  }

  // ---- rendering ----------------------------------------------------

  private render(): void {
    this.renderPalette();
    this.renderModeButtons();
    this.renderCanvas();
    this.renderTracePanel();
    this.renderRedexList();
    byId<HTMLElement>("doc-label").textContent = this.docId
      ? `document ${this.docId.slice(0, 8)} / node ${this.view?.selected ?? 0}` +
        (this.view?.readOnly() ? " (read-only)" : "")
      : "no document";
  }

  private renderPalette(): void {
    const div = byId<HTMLElement>("palette");
    div.textContent = "";
    for (const sym of scanSignature(this.docText)) {
      const btn = document.createElement("button");
      btn.textContent = `${sym.name}/${sym.arity}`;
      btn.className = this.palette === sym.name ? "palette-btn active" : "palette-btn";
      btn.addEventListener("click", () => {
        this.palette = this.palette === sym.name ? null : sym.name;
        this.renderPalette();
      });
      div.append(btn);
    }
  }

  private renderModeButtons(): void {
    byId<HTMLButtonElement>("btn-mode-view").classList.toggle("active", this.mode === "view");
    byId<HTMLButtonElement>("btn-mode-draw").classList.toggle("active", this.mode === "draw");
    byId<HTMLButtonElement>("btn-mode-draw").disabled = !this.canEdit();
  }

  private renderCanvas(): void {
    if (!this.node) {
      clear(this.canvas);
      return;
    }
    this.scene = buildScene(
      this.node.net,
      this.node.redexes,
      arityMap(this.docText),
      this.positions,
      this.mode,
      this.selection,
    );
    renderScene(this.canvas, this.scene, {
      onAgentPointerDown: (g, ev) => this.onAgentPointerDown(g.id, ev),
      onPortPointerDown: (end, px, py, ev) => this.onPortPointerDown(end, px, py, ev),
      onEdgeClick: (edge, ev) => this.onEdgeClick(edge.edgeId, edge.a, ev),
      onFreePointerDown: (f, ev) => this.onFreePointerDown(f.name, ev),
    });
  }

  private renderTracePanel(): void {
    if (!this.view) {
      clear(this.traceSvg);
      return;
    }
    renderTrace(this.traceSvg, this.view, {
      onNodeClick: (id) => void this.selectNode(id),
    });
  }

  private renderRedexList(): void {
    const div = byId<HTMLElement>("redex-list");
    div.textContent = "";
    if (!this.node) return;
    for (const r of this.node.redexes) {
      const btn = document.createElement("button");
      btn.className = "redex-btn";
      btn.textContent = r.rule
        ? `apply ${r.rule} [${r.agents[0]},${r.agents[1]}]`
        : `no rule for [${r.agents[0]},${r.agents[1]}]`;
      btn.disabled = r.rule === null;
      btn.addEventListener("click", () => void this.applyRedex(r.edgeId));
      div.append(btn);
    }
    if (this.node.redexes.length === 0) {
      div.textContent = "normal form: no redexes";
    }
  }

  private renderOverlay(x1: number, y1: number, x2: number, y2: number, cls: string): void {
    clear(this.overlay);
    this.overlay.append(svgEl("line", { x1, y1, x2, y2, class: cls }));
  }

  private renderLasso(drag: { x0: number; y0: number; x1: number; y1: number }): void {
    clear(this.overlay);
    const x = Math.min(drag.x0, drag.x1);
    const y = Math.min(drag.y0, drag.y1);
    this.overlay.append(
      svgEl("rect", {
        x,
        y,
        width: Math.abs(drag.x1 - drag.x0),
        height: Math.abs(drag.y1 - drag.y0),
        class: "lasso",
      }),
    );
  }

  // ---- status -------------------------------------------------------

  private status(text: string, kind: "ok" | "warn" | "err"): void {
    const el = byId<HTMLElement>("status");
    el.textContent = text;
    el.className = `status ${kind}`;
  }

  private showError(err: unknown): void {
    if (err instanceof ServiceError) {
      this.status(`${err.code}: ${err.message}`, "err");
      if (err.code === "StaleRevision") void this.refresh();
    } else {
      this.status(String(err), "err");
    }
  }

  private showCaret(expr: string, diag: { line: number; col: number; code: string; message: string }): void {
    const snip = caretSnippet(expr, diag.line, diag.col);
    byId<HTMLElement>("diag").textContent =
      `${snip.lineText}\n${snip.caret}\n${diag.code}: ${diag.message}`;
  }

  private clearDiag(): void {
    byId<HTMLElement>("diag").textContent = "";
  }
}

function byId<T extends Element>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as unknown as T;
}

function fillSelect(sel: HTMLSelectElement, values: string[]): void {
  const old = sel.value;
  sel.textContent = "";
  for (const v of values) {
    const opt = document.createElement("option");
    opt.value = v;
    opt.textContent = v;
    sel.append(opt);
  }
  if (values.includes(old)) sel.value = old;
}

function parseRhsRef(value: string): { agent: string; port: number } | null {
  const m = /^([A-Za-z_][A-Za-z0-9_]*)\.(\d+)$/.exec(value);
  return m ? { agent: m[1], port: parseInt(m[2], 10) } : null;
}

function parseLhsRef(value: string): { side: "L" | "R"; port: number } | null {
  const m = /^(L|R)\.(\d+)$/.exec(value);
  return m ? { side: m[1] as "L" | "R", port: parseInt(m[2], 10) } : null;
}

function parseTarget(
  value: string,
): { kind: "rhs"; agent: string; port: number } | { kind: "lhs"; side: "L" | "R"; port: number } | null {
  if (value.startsWith("lhs:")) {
    const ref = parseLhsRef(value.slice(4));
    return ref ? { kind: "lhs", ...ref } : null;
  }
  const ref = parseRhsRef(value);
  return ref ? { kind: "rhs", ...ref } : null;
}

function sameEndpoint(a: Endpoint, b: Endpoint): boolean {
  if (isAgentEnd(a) && isAgentEnd(b)) return a.agent === b.agent && a.port === b.port;
  if (!isAgentEnd(a) && !isAgentEnd(b)) return a.free === b.free;
  return false;
}

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

new App().start();
