/**
 * Typed client for the collection service HTTP+JSON API. This is the only
 * backend the UI talks to; nothing here ever carries origin information,
 * because the service never serves any.
 */

export interface SessionInfo {
  token: string;
  started_at: string;
  deadline: string;
  total: number;
  instructions: string;
}

export interface SessionStatus {
  state: 'active' | 'expired' | 'finished';
  position: number;
  total: number;
  completed: number;
  remaining_seconds: number;
}

export interface TaskPayload {
  segment_id: string;
  source: string;
  target: string;
  position: number;
  total: number;
  remaining_seconds: number;
}

export interface ErrorFlags {
  terminology: boolean;
  omission: boolean;
  typography: boolean;
}

export interface Submission {
  postedit: string;
  flags: ErrorFlags;
  comment: string | null;
}

export interface SubmitAck {
  status: string;
  segment_id: string;
  submitted_at: string;
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: unknown,
  ) {
    super(`service responded ${status}`);
  }

  /** The server declared the session over; inputs must stay locked. */
  get sessionOver(): boolean {
    return this.status === 410;
  }
}

async function parse<T>(resp: Response): Promise<T> {
  const body = await resp.json().catch(() => null);
  if (!resp.ok) {
    throw new ApiError(resp.status, body && (body as { detail?: unknown }).detail);
  }
  return body as T;
}

export class ServiceClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  createSession(raterId: string): Promise<SessionInfo> {
    return this.request('POST', '/sessions', { rater_id: raterId });
  }

  getStatus(token: string): Promise<SessionStatus> {
    return this.request('GET', `/sessions/${token}/status`);
  }

  getTask(token: string, index: number): Promise<TaskPayload> {
    return this.request('GET', `/sessions/${token}/tasks/${index}`);
  }

  submitTask(token: string, index: number, submission: Submission): Promise<SubmitAck> {
    return this.request('PUT', `/sessions/${token}/tasks/${index}`, submission);
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { 'content-type': 'application/json' } };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
    }
    const resp = await this.fetchImpl(this.baseUrl + path, init);
    return parse<T>(resp);
  }
}

/**
 * Retry a submission a few times with growing delays; drafts are kept by
 * the caller, so a final failure loses nothing. Session-over responses
 * are not retried: the server's verdict is authoritative.
 */
export async function submitWithRetry(
  client: ServiceClient,
  token: string,
  index: number,
  submission: Submission,
  attempts = 3,
  sleep: (ms: number) => Promise<void> = (ms) => new Promise((r) => setTimeout(r, ms)),
): Promise<SubmitAck> {
  let lastError: unknown;
  for (let attempt = 0; attempt < attempts; attempt++) {
    try {
      return await client.submitTask(token, index, submission);
    } catch (err) {
      if (err instanceof ApiError) {
        throw err;
      }
      lastError = err;
      await sleep(250 * 2 ** attempt);
    }
  }
  throw lastError;
}
