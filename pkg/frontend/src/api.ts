// Typed client for the session service. The server is the single source
// of truth: no rating math happens in the browser.

export interface CreatedSession {
  schema_version: number;
  session_id: string;
  algorithm: string;
  item_count: number;
  budget: number;
}

export interface NextPair {
  schema_version: number;
  pair_token: string;
  first_index: number;
  second_index: number;
  first_label: string;
  second_label: string;
  comparisons_done: number;
  budget: number;
  done: false;
}

export interface Progress {
  schema_version: number;
  comparisons_done: number;
  budget: number;
  done: boolean;
}

export interface RankingRow {
  rank: number;
  label: string;
  mu: number;
  sigma: number;
  conservative_score: number;
}

export interface Ranking {
  schema_version: number;
  done: boolean;
  comparisons_done: number;
  budget: number;
  ranking: RankingRow[];
}

export type Winner = "first" | "second" | "draw";

export class ApiError extends Error {
  constructor(
    public status: number,
    public body: Record<string, unknown>,
  ) {
    super(`API error ${status}: ${JSON.stringify(body)}`);
  }

  /** A finished-session conflict, as opposed to a stale pair token. */
  get sessionDone(): boolean {
    return this.status === 409 && this.body["done"] === true;
  }

  get staleToken(): boolean {
    return this.status === 409 && this.body["done"] !== true;
  }
}

export class SessionApi {
  constructor(
    private baseUrl: string = "",
    private fetchImpl: typeof fetch = (...args) => fetch(...args),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchImpl(this.baseUrl + path, init);
    const body = (await res.json()) as Record<string, unknown>;
    if (!res.ok) {
      throw new ApiError(res.status, body);
    }
    return body as T;
  }

  createSession(items: string[]): Promise<CreatedSession> {
    return this.request<CreatedSession>("/sessions", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ items }),
    });
  }

  nextPair(sessionId: string): Promise<NextPair> {
    return this.request<NextPair>(`/sessions/${sessionId}/next-pair`);
  }

  postOutcome(sessionId: string, pairToken: string, winner: Winner): Promise<Progress> {
    return this.request<Progress>(`/sessions/${sessionId}/outcome`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ pair_token: pairToken, winner }),
    });
  }

  ranking(sessionId: string): Promise<Ranking> {
    return this.request<Ranking>(`/sessions/${sessionId}/ranking`);
  }
}
