/** URL hash <-> view state codec. The UI is a pure projection of
 * (URL, API responses), so any URL reload reproduces its view exactly. */

export type AppState =
  | { view: "home" }
  | { view: "subject"; subject: string; resources: string[] }
  | { view: "search"; query: string; resources: string[]; page: number }

function splitResources(raw: string | null): string[] {
  if (!raw) return []
  return raw
    .split(",")
    .map((r) => r.trim())
    .filter(Boolean)
}

export function parseHash(hash: string): AppState {
  const trimmed = hash.replace(/^#/, "")
  if (!trimmed || trimmed === "/") return { view: "home" }
  const [path, queryString = ""] = trimmed.split("?", 2)
  const params = new URLSearchParams(queryString)
  const segments = path.split("/").filter(Boolean)

  if (segments[0] === "subject" && segments.length === 2) {
    return {
      view: "subject",
      subject: decodeURIComponent(segments[1]),
      resources: splitResources(params.get("resources")),
    }
  }
  if (segments[0] === "search") {
    const query = params.get("q") ?? ""
    if (!query) return { view: "home" }
    const page = Number.parseInt(params.get("page") ?? "1", 10)
    return {
      view: "search",
      query,
      resources: splitResources(params.get("resources")),
      page: Number.isFinite(page) && page >= 1 ? page : 1,
    }
  }
  return { view: "home" }
}

export function formatHash(state: AppState): string {
  switch (state.view) {
    case "home":
      return "#/"
    case "subject": {
      const params = new URLSearchParams()
      if (state.resources.length) params.set("resources", state.resources.join(","))
      const suffix = params.toString()
      return `#/subject/${encodeURIComponent(state.subject)}${suffix ? "?" + suffix : ""}`
    }
    case "search": {
      const params = new URLSearchParams()
      params.set("q", state.query)
      if (state.resources.length) params.set("resources", state.resources.join(","))
      if (state.page > 1) params.set("page", String(state.page))
      return `#/search?${params.toString()}`
    }
  }
}
