import {
  ApplyResponseSchema,
  CreateResponseSchema,
  Diagnostic,
  EditOp,
  EditResponseSchema,
  ExploreResponseSchema,
  NodeState,
  NodeStateSchema,
  StrategyResponseSchema,
  StrategyResult,
  TraceJson,
  TraceSchema,
} from "./model.js";

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly diagnostics: Diagnostic[] = [],
    readonly revision?: number,
  ) {
    super(message);
    this.name = "ServiceError";
  }
}

/**
 * Serializes mutations: each task starts only after the previous one has
 * settled, so at most one write is in flight per client.
 */
export class MutationQueue {
  private tail: Promise<unknown> = Promise.resolve();

  run<T>(task: () => Promise<T>): Promise<T> {
    const next = this.tail.then(task, task);
    this.tail = next.then(
      () => undefined,
      () => undefined,
    );
    return next;
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

/**
 * Typed client for the engine service.  Reads go straight out; all
 * mutations are funneled through a single-flight queue and carry an
 * If-Match header with the last revision this client observed, so a
 * concurrent writer surfaces as a 409 instead of a silent overwrite.
 */
export class ServiceClient {
  private readonly fetchImpl: FetchLike;
  private readonly queue = new MutationQueue();
  private readonly revisions = new Map<string, number>();

  constructor(readonly baseUrl: string, opts?: { fetchImpl?: FetchLike }) {
    this.fetchImpl = opts?.fetchImpl ?? ((u, i) => fetch(u, i));
  }

  /** Last revision observed for a document, if any mutation has run. */
  revisionOf(docId: string): number | undefined {
    return this.revisions.get(docId);
  }

  async createDocument(text: string): Promise<{ docId: string; diagnostics: Diagnostic[] }> {
    const body = await this.request("POST", "/documents", { text });
    const parsed = CreateResponseSchema.parse(body);
    this.revisions.set(parsed.docId, 0);
    return parsed;
  }

  async getNode(docId: string, nodeId: number): Promise<NodeState> {
    const body = await this.request("GET", `/documents/${docId}/nodes/${nodeId}`);
    return NodeStateSchema.parse(body);
  }

  async getTrace(docId: string): Promise<TraceJson> {
    const body = await this.request("GET", `/documents/${docId}/trace`);
    return TraceSchema.parse(body);
  }

  applyStep(docId: string, nodeId: number, edgeId: number): Promise<{ childId: number; revision: number }> {
    return this.mutate(docId, `/documents/${docId}/nodes/${nodeId}/apply`, { edgeId }, (b) =>
      ApplyResponseSchema.parse(b),
    );
  }

  runStrategy(docId: string, nodeId: number, expr: string): Promise<StrategyResult> {
    return this.mutate(docId, `/documents/${docId}/nodes/${nodeId}/strategy`, { expr }, (b) =>
      StrategyResponseSchema.parse(b),
    );
  }

  explore(docId: string, nodeId: number): Promise<{ children: number[] }> {
    return this.mutate(docId, `/documents/${docId}/nodes/${nodeId}/explore`, {}, (b) =>
      ExploreResponseSchema.parse(b),
    );
  }

  editNet(docId: string, ops: EditOp[]): Promise<{ revision: number; diagnostics: Diagnostic[] }> {
    return this.mutate(docId, `/documents/${docId}/edit`, { ops }, (b) =>
      EditResponseSchema.parse(b),
    );
  }

  private mutate<T>(
    docId: string,
    path: string,
    payload: unknown,
    parse: (body: unknown) => T,
  ): Promise<T> {
    return this.queue.run(async () => {
      const known = this.revisions.get(docId);
      const headers: Record<string, string> = {};
      if (known !== undefined) headers["If-Match"] = String(known);
      let body: unknown;
      try {
        body = await this.request("POST", path, payload, headers);
      } catch (err) {
        // learn the server's revision from a stale-precondition reply so
        // the caller's retry can pass the guard
        if (err instanceof ServiceError && err.code === "StaleRevision" && err.revision !== undefined) {
          this.revisions.set(docId, err.revision);
        }
        throw err;
      }
      const parsed = parse(body);
      const rev = (parsed as { revision?: unknown }).revision;
      if (typeof rev === "number") this.revisions.set(docId, rev);
      return parsed;
    });
  }

  private async request(
    method: string,
    path: string,
    payload?: unknown,
    headers: Record<string, string> = {},
  ): Promise<unknown> {
    const init: RequestInit = { method, headers: { ...headers } };
    if (payload !== undefined) {
      (init.headers as Record<string, string>)["Content-Type"] = "application/json";
      init.body = JSON.stringify(payload);
    }
    let resp: Response;
    try {
      resp = await this.fetchImpl(this.baseUrl + path, init);
    } catch (err) {
      throw new ServiceError(0, "NetworkError", String(err));
    }
    let body: unknown = null;
    try {
      body = await resp.json();
    } catch {
      // non-JSON body; body stays null and status decides below
    }
    if (resp.ok) return body;
    throw errorFrom(resp.status, body);
  }
}

function errorFrom(status: number, body: unknown): ServiceError {
  const obj = (body ?? {}) as Record<string, unknown>;
  if (Array.isArray(obj.diagnostics)) {
    const diags = obj.diagnostics as Diagnostic[];
    const first = diags[0];
    const msg = first ? `${first.code}: ${first.message}` : `HTTP ${status}`;
    return new ServiceError(status, first?.code ?? "Invalid", msg, diags);
  }
  const code = typeof obj.error === "string" ? obj.error : `HTTP${status}`;
  const msg = typeof obj.message === "string" ? obj.message : code;
  const revision = typeof obj.revision === "number" ? obj.revision : undefined;
  return new ServiceError(status, code, msg, [], revision);
}
