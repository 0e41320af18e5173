// Typed client for the adaptive-curriculum session service. Each method maps
// one-to-one onto a service endpoint; the UI renders only what these return.

export type Modality = "video" | "text" | "exercise" | "quiz";

export interface ItemCard {
  item_id: string;
  modality: Modality;
  difficulty: number;
  duration_minutes: number;
  skills: Record<string, number>;
  prerequisites: Record<string, number>;
}

export interface PathwayView {
  items: ItemCard[];
  engagement: number;
  quality: number;
  reward: number;
}

export interface Signals {
  rolling_accuracy: number;
  accuracy_trend: number;
  mean_engagement: number;
  pace: number;
  streak: number;
}

export interface EventRow {
  seq: number;
  kind: string;
  tick: number;
}

export interface CurriculumUnit {
  target_skill: string;
  mastery_threshold: number;
  item_pool: string[];
}

export interface SessionView {
  session_id: string;
  learner_id: string;
  status: "active" | "completed";
  objectives: string[];
  tick: number;
  assessments: number;
  next_sequence: number;
  mastery: Record<string, number>;
  engagement: number;
  preferences: Record<string, number>;
  signals: Signals;
  performance: number;
  performance_history: [number, number][];
  weights: number[];
  curriculum: { generated_at: number; units: CurriculumUnit[] };
  pathway: PathwayView | null;
  reward_weights: { beta: number; gamma: number };
  events: EventRow[];
}

export interface Explanation {
  summary: string;
  rationale: { item_id: string; text: string }[];
}

export interface NextView {
  session_id: string;
  status: "active" | "completed";
  what_if: boolean;
  beta: number;
  gamma: number;
  pathway: PathwayView;
  study_items: ItemCard[];
  next_item: ItemCard | null;
  next_sequence: number;
  explanation: Explanation | null;
}

export interface SubmitView {
  session_id: string;
  status: "active" | "completed";
  assessments: number;
  next_sequence: number;
  mastery: Record<string, number>;
  engagement: number;
  performance: number;
  signals: Signals;
  pathway: PathwayView | null;
  curriculum_targets: string[];
  next_item: ItemCard | null;
}

export interface ProfileView {
  session_id: string;
  learner_id: string;
  mastery: Record<string, number>;
  engagement: number;
  performance: number;
  preferences: Record<string, number>;
  signals: Signals;
  history_length: number;
}

export interface CreateOverrides {
  beta?: number;
  gamma?: number;
  horizon?: number;
  mastery?: Record<string, number>;
  preferences?: Record<string, number>;
}

export interface CreateRequest {
  learner_id: string;
  objectives: string[];
  overrides?: CreateOverrides;
}

export interface AssessmentRequest {
  sequence: number;
  item_id: string;
  score: number;
  response_time_s?: number;
  engagement_observed?: number;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly field?: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function fail(response: Response): Promise<never> {
  let code = "error";
  let message = `request failed with status ${response.status}`;
  let field: string | undefined;
  try {
    const body = await response.json();
    if (body && typeof body.message === "string") {
      message = body.message;
      if (typeof body.code === "string") code = body.code;
      if (typeof body.field === "string") field = body.field;
    }
  } catch {
    // non-JSON error body; keep the status-line message
  }
  throw new ApiError(response.status, code, message, field);
}

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async get<T>(path: string): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path);
    if (!response.ok) await fail(response);
    return response.json() as Promise<T>;
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!response.ok) await fail(response);
    return response.json() as Promise<T>;
  }

  health(): Promise<{ status: string }> {
    return this.get("/healthz");
  }

  createSession(request: CreateRequest): Promise<SessionView> {
    return this.post("/sessions", request);
  }

  getSession(sessionId: string): Promise<SessionView> {
    return this.get(`/sessions/${encodeURIComponent(sessionId)}`);
  }

  submitAssessment(sessionId: string, request: AssessmentRequest): Promise<SubmitView> {
    return this.post(`/sessions/${encodeURIComponent(sessionId)}/assessments`, request);
  }

  nextItem(
    sessionId: string,
    options: { beta?: number; gamma?: number; adopt?: boolean } = {},
  ): Promise<NextView> {
    const params = new URLSearchParams();
    if (options.beta !== undefined) params.set("beta", String(options.beta));
    if (options.gamma !== undefined) params.set("gamma", String(options.gamma));
    if (options.adopt) params.set("adopt", "true");
    const query = params.toString();
    return this.get(`/sessions/${encodeURIComponent(sessionId)}/next${query ? "?" + query : ""}`);
  }

  profile(sessionId: string): Promise<ProfileView> {
    return this.get(`/sessions/${encodeURIComponent(sessionId)}/profile`);
  }
}
