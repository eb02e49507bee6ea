import { z } from "zod";

// Response shapes for the engine service.  Parsing happens at the HTTP
// boundary (api.ts); everything past that point works with these types.

export const EndpointSchema = z.union([
  z.object({ agent: z.number().int(), port: z.number().int() }),
  z.object({ free: z.string() }),
]);
export type Endpoint = z.infer<typeof EndpointSchema>;

export function isAgentEnd(ep: Endpoint): ep is { agent: number; port: number } {
  return "agent" in ep;
}

export const NetSchema = z.object({
  agents: z.array(z.object({ id: z.number().int(), symbol: z.string() })),
  edges: z.array(z.tuple([EndpointSchema, EndpointSchema])),
  free: z.array(z.string()),
  selections: z.record(z.string(), z.array(z.number().int())),
});
export type NetJson = z.infer<typeof NetSchema>;

export const RedexSchema = z.object({
  edgeId: z.number().int(),
  agents: z.tuple([z.number().int(), z.number().int()]),
  rule: z.string().nullable(),
});
export type RedexInfo = z.infer<typeof RedexSchema>;

export const NodeStateSchema = z.object({
  net: NetSchema,
  redexes: z.array(RedexSchema),
});
export type NodeState = z.infer<typeof NodeStateSchema>;

export const DiagnosticSchema = z.object({
  line: z.number(),
  col: z.number(),
  code: z.string(),
  message: z.string(),
});
export type Diagnostic = z.infer<typeof DiagnosticSchema>;

export const CreateResponseSchema = z.object({
  docId: z.string(),
  diagnostics: z.array(DiagnosticSchema),
});

export const ApplyResponseSchema = z.object({
  childId: z.number().int(),
  revision: z.number().int(),
});

export const StrategyResponseSchema = z.object({
  status: z.enum(["success", "failure"]),
  path: z.array(z.number().int()),
  revision: z.number().int(),
});
export type StrategyResult = z.infer<typeof StrategyResponseSchema>;

export const ExploreResponseSchema = z.object({
  children: z.array(z.number().int()),
});

export const TraceEdgeSchema = z.object({
  from: z.number().int(),
  to: z.number().int(),
  rule: z.string(),
  agents: z.tuple([z.number().int(), z.number().int()]),
  strategy: z.string().nullable(),
});
export type TraceEdge = z.infer<typeof TraceEdgeSchema>;

export const TraceSchema = z.object({
  root: z.number().int(),
  nodes: z.record(z.string(), NetSchema),
  edges: z.array(TraceEdgeSchema),
});
export type TraceJson = z.infer<typeof TraceSchema>;

export const EditResponseSchema = z.object({
  revision: z.number().int(),
  diagnostics: z.array(DiagnosticSchema),
});

// Edit operations, exactly the op objects the edit endpoint accepts.
// Positions and any other view state never appear here.
export type EditOp =
  | { op: "addAgent"; symbol: string }
  | { op: "deleteAgent"; agent: number }
  | { op: "connect"; a: Endpoint; b: Endpoint }
  | { op: "disconnect"; at: Endpoint }
  | { op: "addFree"; name: string }
  | { op: "nameSelection"; name: string; agents: number[] };
