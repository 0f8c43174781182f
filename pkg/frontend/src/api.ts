/** Typed client for the session service JSON API. */

export interface SessionView {
  id: string;
  hypothesis: string;
  validated_prefix_chars: number;
  keystrokes: number;
  mouse_actions: number;
  accepted: boolean;
  last_latency_ms: number;
  latency_ms?: number;
}

export interface TraceEvent {
  position: number;
  character: string;
  contiguous: boolean;
}

export interface AcceptResult {
  trace: {
    events: TraceEvent[];
    final_prediction: string | null;
    accepted: boolean;
    capped: boolean;
  };
  ksmr: number;
}

export interface CreatePayload {
  text?: string;
  sample_id?: string;
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
    this.name = "ApiError";
  }
}

async function parseOrThrow<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let detail = `HTTP ${response.status}`;
    try {
      const body = (await response.json()) as { detail?: unknown };
      if (typeof body.detail === "string") detail = body.detail;
    } catch {
      // non-JSON error body; keep the status line
    }
    throw new ApiError(response.status, detail);
  }
  if (response.status === 204) return undefined as T;
  return (await response.json()) as T;
}

export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private post<T>(path: string, body?: unknown): Promise<T> {
    return this.fetchFn(this.base + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: body === undefined ? "{}" : JSON.stringify(body),
    }).then((r) => parseOrThrow<T>(r));
  }

  createSession(payload: CreatePayload): Promise<SessionView> {
    return this.post<SessionView>("/sessions", payload);
  }

  getSession(id: string): Promise<SessionView> {
    return this.fetchFn(`${this.base}/sessions/${id}`).then((r) => parseOrThrow<SessionView>(r));
  }

  postFeedback(id: string, position: number, character: string): Promise<SessionView> {
    return this.post<SessionView>(`/sessions/${id}/feedback`, { position, character });
  }

  acceptSession(id: string): Promise<AcceptResult> {
    return this.post<AcceptResult>(`/sessions/${id}/accept`);
  }

  deleteSession(id: string): Promise<void> {
    return this.fetchFn(`${this.base}/sessions/${id}`, { method: "DELETE" }).then((r) =>
      parseOrThrow<void>(r),
    );
  }

  listSamples(): Promise<{ samples: string[] }> {
    return this.fetchFn(`${this.base}/samples`).then((r) =>
      parseOrThrow<{ samples: string[] }>(r),
    );
  }
}
