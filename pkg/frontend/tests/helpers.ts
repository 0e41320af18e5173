import { inject } from "vitest";
import type { FetchLike } from "../src/api.js";

declare module "vitest" {
  interface ProvidedContext {
    baseUrl: string;
  }
}

export function baseUrl(): string {
  return inject("baseUrl");
}

export interface RecordedCall {
  method: string;
  url: string;
  status: number;
  /** Parsed response JSON; null when the body was not JSON. */
  body: unknown;
}

/**
 * A fetch that records every request's method, URL, status, and parsed
 * response body, so tests can compare what the screen shows against what the
 * server actually sent.
 */
export function recordingFetch(log: RecordedCall[]): FetchLike {
  return async (input, init) => {
    const response = await fetch(input, init);
    const entry: RecordedCall = {
      method: init?.method ?? "GET",
      url: String(input),
      status: response.status,
      body: null,
    };
    try {
      entry.body = await response.clone().json();
    } catch {
      entry.body = null;
    }
    log.push(entry);
    return response;
  };
}

export function uniqueLearner(prefix: string): string {
  return `${prefix}-${Math.random().toString(36).slice(2, 10)}`;
}
