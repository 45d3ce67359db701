// Thin client over the serve endpoints; the only backend this UI talks to.

import type {
  InstanceDoc, ModelDoc, RefreshDoc, SourceDoc, TouchingDoc,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {}

  private async get<T>(path: string): Promise<T> {
    const resp = await this.fetchImpl(this.base + path);
    const body = await resp.json();
    if (!resp.ok) {
      throw new ApiError(resp.status, body?.error ?? `GET ${path} failed`);
    }
    return body as T;
  }

  model(): Promise<ModelDoc> {
    return this.get("/api/model");
  }

  instance(id: string): Promise<InstanceDoc> {
    return this.get(`/api/instance/${encodeURIComponent(id)}`);
  }

  source(file: string, from: number, to: number): Promise<SourceDoc> {
    const q = new URLSearchParams({
      file, from: String(from), to: String(to),
    });
    return this.get(`/api/source?${q}`);
  }

  touching(entity: string): Promise<TouchingDoc> {
    const q = new URLSearchParams({ entity });
    return this.get(`/api/touching?${q}`);
  }

  async refresh(id: string, params?: Record<string, string>): Promise<RefreshDoc> {
    const resp = await this.fetchImpl(
      `${this.base}/api/instance/${encodeURIComponent(id)}/refresh`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(params ? { params } : {}),
      },
    );
    const body = await resp.json();
    if (!resp.ok) {
      throw new ApiError(resp.status, body?.error ?? "refresh failed");
    }
    return body as RefreshDoc;
  }
}
