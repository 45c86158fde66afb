// Client for the documented service API. Every request goes through one
// gate that rejects any path outside the documented endpoint set, so no
// other endpoint can ever be contacted.

import type { FactCheckResult, JobView, RumourResult, Suggestion } from "./types";

const DOCUMENTED_PATHS: RegExp[] = [
  /^\/api\/health$/,
  /^\/api\/autocomplete(\?.*)?$/,
  /^\/api\/factcheck$/,
  /^\/api\/factcheck\/[A-Za-z0-9-]+$/,
  /^\/api\/rumour$/,
  /^\/api\/rumour\/[A-Za-z0-9-]+$/,
  /^\/api\/claims\/[A-Za-z0-9_.-]+$/,
  /^\/api\/trees\/[A-Za-z0-9_.-]+$/,
];

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class ApiClient {
  constructor(private baseUrl: string = "") {}

  private gate(path: string): string {
    if (!DOCUMENTED_PATHS.some((re) => re.test(path))) {
      throw new Error(`undocumented endpoint: ${path}`);
    }
    return this.baseUrl + path;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await fetch(this.gate(path), init);
    if (!resp.ok) {
      let detail = resp.statusText;
      try {
        const body = (await resp.json()) as { error?: string };
        if (body.error) detail = body.error;
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(resp.status, detail);
    }
    return (await resp.json()) as T;
  }

  autocomplete(query: string, limit = 10): Promise<{ suggestions: Suggestion[] }> {
    const q = encodeURIComponent(query);
    return this.request(`/api/autocomplete?q=${q}&limit=${limit}`);
  }

  submitFactCheck(claim: string): Promise<{ job_id: string; state: string }> {
    return this.request("/api/factcheck", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ claim }),
    });
  }

  submitRumour(claim: string): Promise<{ job_id: string; state: string }> {
    return this.request("/api/rumour", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ claim }),
    });
  }

  factCheckJob(jobId: string): Promise<JobView<FactCheckResult>> {
    return this.request(`/api/factcheck/${jobId}`);
  }

  rumourJob(jobId: string): Promise<JobView<RumourResult>> {
    return this.request(`/api/rumour/${jobId}`);
  }

  jobStatus(kind: "FactCheck" | "Rumour", jobId: string) {
    return kind === "FactCheck" ? this.factCheckJob(jobId) : this.rumourJob(jobId);
  }
}
