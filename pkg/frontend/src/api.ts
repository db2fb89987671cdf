/**
 * Typed client for the /api/v1 service. Every request and response
 * shape here mirrors the server's JSON exactly; nothing is computed
 * locally beyond parsing.
 */

export interface WireEndpoint {
  id: number;
  port: string;
}

export interface WireEdge {
  from: WireEndpoint;
  to: WireEndpoint;
}

export interface SliderPin {
  slider: { min: number; max: number; value: number };
}

export type Pin = SliderPin | number | string | boolean;

export interface WireNode {
  id: number;
  component: string;
  position: { x: number; y: number };
  pins?: Record<string, Pin>;
}

export interface WireDocument {
  schema_version: number;
  prompt?: string;
  nodes: WireNode[];
  edges: WireEdge[];
}

export interface RepairJson {
  id: string;
  kind: string;
  node?: number;
  edge?: WireEdge;
  side?: string;
  component?: string;
  port?: string;
  new_port?: string;
  value?: number | string;
}

export interface DiagnosticJson {
  rule: string;
  severity: "error" | "warning" | "info";
  message: string;
  node?: number;
  port?: string;
  edge?: WireEdge;
  repair?: RepairJson;
}

export interface DiagnosticsResponse {
  schema_version: number;
  diagnostics: DiagnosticJson[];
}

export interface PortSpec {
  name: string;
  kind: string;
  cardinality: string;
  required: boolean;
  default?: number | string;
  aliases: string[];
}

export interface ComponentSpec {
  name: string;
  aliases: string[];
  category: string;
  inputs: PortSpec[];
  outputs: PortSpec[];
}

export interface RegistryResponse {
  schema_version: number;
  version: string;
  components: ComponentSpec[];
}

export interface MeshJson {
  vertices: number[][];
  faces: number[][];
}

/** One evaluated value; `kind` discriminates the payload fields. */
export interface ValueJson {
  kind: string;
  value?: number | string;
  xyz?: number[];
  a?: number[];
  b?: number[];
  vertices?: number[][];
  center?: number[];
  normal?: number[];
  radius?: number;
  control?: number[][];
  degree?: number;
  profile?: ValueJson;
  direction?: number[];
  sections?: ValueJson[];
  item_kind?: string;
  items?: ValueJson[];
  origin?: number;
  message?: string;
  mesh?: MeshJson;
}

export interface DrawableJson {
  node: number;
  value: ValueJson;
}

export interface EvalResponse {
  schema_version: number;
  order: number[];
  nodes: Record<string, Record<string, ValueJson>>;
  failures: number[];
  origins: number[];
  drawables: DrawableJson[];
  notes: DiagnosticJson[];
}

export interface StageRecordJson {
  stage: number;
  key: string;
  attempt: number;
  reply: string;
}

export interface TranscriptJson {
  schema_version: number;
  prompt: string;
  stages: StageRecordJson[];
  document: WireDocument;
  timing?: Record<string, number>;
}

export interface GenerateResponse {
  document: WireDocument;
  transcript: TranscriptJson;
  notes: { rule: string; severity: string; message: string }[];
}

export interface RepairResponse {
  schema_version: number;
  applied: RepairJson[];
  document: WireDocument;
  diagnostics: DiagnosticJson[];
}

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly location?: string,
  ) {
    super(message);
    this.name = "ServiceError";
  }
}

async function unwrap<T>(response: Response): Promise<T> {
  if (response.ok) {
    return (await response.json()) as T;
  }
  let code = "http-error";
  let message = `${response.status} ${response.statusText}`;
  let location: string | undefined;
  try {
    const body = await response.json();
    if (body && body.error) {
      code = body.error.code ?? code;
      message = body.error.message ?? message;
      location = body.error.location ?? undefined;
    }
  } catch {
    // non-JSON error body; keep the status line
  }
  throw new ServiceError(response.status, code, message, location);
}

/**
 * All methods are thin wrappers over fetch; `base` is "" when the UI
 * is served by the same process (the default deployment).
 */
export class Client {
  constructor(
    private readonly base: string = "",
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  private post(path: string, body: unknown): Promise<Response> {
    return this.fetchFn(`${this.base}${path}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  async generate(prompt: string, session?: string): Promise<GenerateResponse> {
    const body: Record<string, unknown> = { prompt };
    if (session !== undefined) {
      body.session = session;
    }
    return unwrap(await this.post("/api/v1/generate", body));
  }

  async validate(document: WireDocument): Promise<DiagnosticJson[]> {
    const response = await this.post("/api/v1/validate", { document });
    const payload = await unwrap<DiagnosticsResponse>(response);
    return payload.diagnostics;
  }

  async repair(document: WireDocument, repairIds?: string[]): Promise<RepairResponse> {
    const body: Record<string, unknown> = { document };
    if (repairIds !== undefined) {
      body.repair_ids = repairIds;
    }
    return unwrap(await this.post("/api/v1/repair", body));
  }

  async evaluate(
    document: WireDocument,
    overrides?: Record<number, number>,
    meshes = false,
  ): Promise<EvalResponse> {
    return unwrap(
      await this.post("/api/v1/evaluate", { document, overrides: overrides ?? {}, meshes }),
    );
  }

  async registry(): Promise<RegistryResponse> {
    return unwrap(await this.fetchFn(`${this.base}/api/v1/registry`));
  }

  async createSession(document?: WireDocument): Promise<string> {
    const response = await this.fetchFn(`${this.base}/api/v1/session`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: document === undefined ? "" : JSON.stringify(document),
    });
    const payload = await unwrap<{ id: string }>(response);
    return payload.id;
  }

  async getSession(id: string): Promise<WireDocument> {
    const response = await this.fetchFn(`${this.base}/api/v1/session/${id}`);
    const payload = await unwrap<{ id: string; document: WireDocument }>(response);
    return payload.document;
  }

  async putSession(id: string, document: WireDocument): Promise<void> {
    const response = await this.fetchFn(`${this.base}/api/v1/session/${id}`, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(document),
    });
    await unwrap(response);
  }

  async deleteSession(id: string): Promise<void> {
    const response = await this.fetchFn(`${this.base}/api/v1/session/${id}`, {
      method: "DELETE",
    });
    await unwrap(response);
  }
}
