/** Thin fetch client for the gateway.  All mutations go through here;
 * errors carry the HTTP status so callers can treat 409 (stale
 * presentation) differently from a dead gateway. */

import type {
  ClickResponse,
  DeconstructResponse,
  MetricsResponse,
  QueryResponse,
} from "./types.js";

export class GatewayError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "GatewayError";
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  let resp: Response;
  try {
    resp = await fetch(url, init);
  } catch (err) {
    throw new GatewayError(0, `gateway unreachable: ${String(err)}`);
  }
  const body = await resp.text();
  if (!resp.ok) {
    let message = body;
    try {
      message = (JSON.parse(body) as { error?: string }).error ?? body;
    } catch {
      // non-JSON error body, keep the raw text
    }
    throw new GatewayError(resp.status, message);
  }
  return JSON.parse(body) as T;
}

function post<T>(url: string, payload: unknown): Promise<T> {
  return request<T>(url, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(payload),
  });
}

export class GatewayClient {
  constructor(private readonly base: string = "") {}

  query(session: string, terms: string[]): Promise<QueryResponse> {
    return post<QueryResponse>(`${this.base}/query`, { session, terms });
  }

  click(session: string, token: string, object: number): Promise<ClickResponse> {
    return post<ClickResponse>(`${this.base}/click`, { session, token, object });
  }

  metrics(): Promise<MetricsResponse> {
    return request<MetricsResponse>(`${this.base}/metrics`);
  }

  deconstruct(object: number, term?: string): Promise<DeconstructResponse> {
    const payload = term === undefined ? { object } : { object, term };
    return post<DeconstructResponse>(`${this.base}/deconstruct`, payload);
  }
}
