/** Typed client for the JSON API. Concurrent identical requests are
 * deduplicated by query key: callers awaiting the same URL share one
 * in-flight fetch. */

import type {
  ResourcesResponse,
  SearchResponse,
  SubjectNamesResponse,
  SubjectsResponse,
} from "./types"

const inflight = new Map<string, Promise<unknown>>()

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message)
  }
}

async function request(path: string): Promise<unknown> {
  const response = await fetch(path, { headers: { Accept: "application/json" } })
  let body: unknown = null
  try {
    body = await response.json()
  } catch {
    // non-JSON error body; fall through to the generic error below
  }
  if (!response.ok) {
    const error = (body as { error?: { code?: string; message?: string } } | null)?.error
    throw new ApiError(
      response.status,
      error?.code ?? "http_error",
      error?.message ?? `request failed with status ${response.status}`,
    )
  }
  return body
}

export function getJson<T>(path: string): Promise<T> {
  const existing = inflight.get(path)
  if (existing) return existing as Promise<T>
  const pending = request(path).finally(() => {
    inflight.delete(path)
  })
  inflight.set(path, pending)
  return pending as Promise<T>
}

/** Exposed for tests. */
export function inflightCount(): number {
  return inflight.size
}

function resourcesParam(resources: string[]): string {
  return resources.length ? `&resources=${encodeURIComponent(resources.join(","))}` : ""
}

export function fetchResources(): Promise<ResourcesResponse> {
  return getJson("/api/resources")
}

export function fetchSubjectView(
  subject: string,
  resources: string[],
): Promise<SubjectsResponse> {
  const query = resources.length
    ? `?resources=${encodeURIComponent(resources.join(","))}`
    : ""
  return getJson(`/api/subjects/${encodeURIComponent(subject)}${query}`)
}

export function searchAssertions(
  query: string,
  resources: string[],
  page: number,
): Promise<SearchResponse> {
  return getJson(
    `/api/search?q=${encodeURIComponent(query)}&page=${page}${resourcesParam(resources)}`,
  )
}

export function fetchSubjectNames(prefix: string): Promise<SubjectNamesResponse> {
  return getJson(`/api/subject-names?prefix=${encodeURIComponent(prefix)}`)
}
