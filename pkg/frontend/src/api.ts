/** Thin typed client over the service HTTP API. Every screen interaction maps
 * to exactly one of these calls. */

import type {
  Answer,
  AnswerResponse,
  AssessmentEdit,
  AssessmentRow,
  CreateSessionResponse,
  QuestionResponse,
  Representation,
  SessionView,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

type FetchFn = typeof fetch;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchFn = (...args) => fetch(...args),
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const parsed = await response.json();
        detail = typeof parsed.detail === "string" ? parsed.detail : JSON.stringify(parsed);
      } catch {
        /* non-JSON error body; keep the status text */
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  createSession(goal: string, seed?: number): Promise<CreateSessionResponse> {
    return this.request("POST", "/sessions", { goal, seed });
  }

  putRequirements(sessionId: string, requirements: string[]): Promise<{ stage: string }> {
    return this.request("PUT", `/sessions/${sessionId}/requirements`, { requirements });
  }

  getQuestion(sessionId: string): Promise<QuestionResponse> {
    return this.request("GET", `/sessions/${sessionId}/question`);
  }

  postAnswer(sessionId: string, answer: Answer): Promise<AnswerResponse> {
    return this.request("POST", `/sessions/${sessionId}/answer`, answer);
  }

  postMode(sessionId: string, mode: string): Promise<{ mode: string }> {
    return this.request("POST", `/sessions/${sessionId}/mode`, { mode });
  }

  postStop(sessionId: string): Promise<{ terminated: string }> {
    return this.request("POST", `/sessions/${sessionId}/stop`);
  }

  postResume(sessionId: string): Promise<{ stage: string }> {
    return this.request("POST", `/sessions/${sessionId}/resume`);
  }

  getRepresentation(sessionId: string): Promise<Representation> {
    return this.request("GET", `/sessions/${sessionId}/representation`);
  }

  buildAssessment(sessionId: string): Promise<{ rows: AssessmentRow[] }> {
    return this.request("POST", `/sessions/${sessionId}/assessment`);
  }

  patchAssessment(
    sessionId: string,
    edit: AssessmentEdit,
  ): Promise<{ rows: AssessmentRow[] }> {
    return this.request("PATCH", `/sessions/${sessionId}/assessment`, { edit });
  }

  getSession(sessionId: string): Promise<SessionView> {
    return this.request("GET", `/sessions/${sessionId}`);
  }

  async exportWorksheet(
    sessionId: string,
    format: "csv" | "xlsx",
  ): Promise<Uint8Array> {
    const response = await this.fetchFn(
      `${this.baseUrl}/sessions/${sessionId}/export?format=${format}`,
      { method: "GET" },
    );
    if (!response.ok) {
      throw new ApiError(response.status, await response.text());
    }
    return new Uint8Array(await response.arrayBuffer());
  }
}
