// Typed client for the simulation service JSON API.
// All simulation logic lives server-side; this module only moves documents.

export type ViewKind = "sda3" | "ada3";

export interface TransitionRow {
  automaton: string;
  action: number;
  label: string;
  from: string;
  to: string;
  enabled: boolean;
}

export interface SdaCurrent {
  nodes: Record<string, string>;
  input_sets: Record<string, string[]>;
}

export interface AdaCurrent {
  nodes: Record<string, string | null>;
  vector: Record<string, string>;
}

export interface Snapshot {
  schema_version: number;
  model: string;
  view: ViewKind;
  current: SdaCurrent | AdaCurrent;
  terminated: string[];
  transitions: TransitionRow[];
  history: number[];
  pinned_trace: number[] | null;
  cursor: number;
  configuration: string;
}

export interface AutomatonDoc {
  id: string;
  kind: "server" | "agent";
  nodes: string[];
  initial: string;
  alphabet?: string[];
  initial_input_set?: string[];
  terminal_reachable?: boolean;
  transitions: { action: number; from: string; to: string; label: string }[];
}

export interface AutomataDoc {
  schema_version: number;
  view: ViewKind;
  automata: AutomatonDoc[];
}

export interface WitnessDoc {
  actions: number[];
  steps: { action: string; source: string; target: string }[];
  final: string;
}

export interface VerdictDoc {
  kind: string;
  subject: string | null;
  holds: boolean;
  witness: WitnessDoc | null;
  must_terminate?: boolean;
}

export interface ReportDoc {
  schema_version: number;
  model: string;
  lts: { nodes: number; edges: number };
  deadlock: boolean;
  verdicts: VerdictDoc[];
}

export interface ModelDoc {
  schema_version: number;
  id: string;
  name: string;
  servers: { name: string; values: string[]; services: string[] }[];
  agents: string[];
  actions: { id: number; label: string; terminating: boolean }[];
  automata: { sda3: AutomataDoc; ada3: AutomataDoc };
  report: ReportDoc;
}

export interface SessionResponse {
  session: string;
  model?: string;
  focus?: string | null;
  snapshot: Snapshot;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function unwrap<T>(response: Response): Promise<T> {
  const body = await response.json().catch(() => ({}));
  if (!response.ok) {
    const message =
      typeof body === "object" && body !== null && "error" in body
        ? String((body as { error: unknown }).error)
        : `HTTP ${response.status}`;
    throw new ApiError(response.status, message);
  }
  return body as T;
}

export class ApiClient {
  constructor(private base: string = "") {}

  private async get<T>(path: string): Promise<T> {
    return unwrap<T>(await fetch(this.base + path));
  }

  private async post<T>(path: string, body?: unknown): Promise<T> {
    return unwrap<T>(
      await fetch(this.base + path, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: body === undefined ? "{}" : JSON.stringify(body),
      }),
    );
  }

  listModels(): Promise<{ models: string[] }> {
    return this.get("/models");
  }

  getModel(id: string): Promise<ModelDoc> {
    return this.get(`/models/${encodeURIComponent(id)}`);
  }

  createSession(model: string, view: ViewKind): Promise<SessionResponse> {
    return this.post("/sessions", { model, view });
  }

  getSession(id: string): Promise<SessionResponse> {
    return this.get(`/sessions/${encodeURIComponent(id)}`);
  }

  step(id: string, transition: number): Promise<SessionResponse> {
    return this.post(`/sessions/${encodeURIComponent(id)}/step`, { transition });
  }

  undo(id: string): Promise<SessionResponse> {
    return this.post(`/sessions/${encodeURIComponent(id)}/undo`);
  }

  reset(id: string): Promise<SessionResponse> {
    return this.post(`/sessions/${encodeURIComponent(id)}/reset`);
  }

  loadTrace(
    id: string,
    trace: { verdict: string } | { actions: number[] },
  ): Promise<SessionResponse> {
    return this.post(`/sessions/${encodeURIComponent(id)}/trace`, trace);
  }

  async deleteSession(id: string): Promise<void> {
    const response = await fetch(
      this.base + `/sessions/${encodeURIComponent(id)}`,
      { method: "DELETE" },
    );
    if (!response.ok && response.status !== 204) {
      throw new ApiError(response.status, `HTTP ${response.status}`);
    }
  }
}
