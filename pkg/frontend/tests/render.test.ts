import { readFileSync } from "node:fs"

import { afterEach, describe, expect, it, vi } from "vitest"

import {
  renderError,
  renderHome,
  renderSearchView,
  renderSubjectView,
} from "../src/render"
import { parseHash } from "../src/state"
import {
  PREDICATES,
  setDevMode,
  type ResourcesResponse,
  type SearchResponse,
  type SubjectsResponse,
} from "../src/types"

function fixture<T>(name: string): T {
  const url = new URL(`./fixtures/${name}`, import.meta.url)
  return JSON.parse(readFileSync(url, "utf-8")) as T
}

const subjects = fixture<SubjectsResponse>("subjects_elephant.json")
const search = fixture<SearchResponse>("search_airplane.json")
const resources = fixture<ResourcesResponse>("resources.json")

afterEach(() => {
  setDevMode(false)
  vi.restoreAllMocks()
})

describe("subject view", () => {
  it("renders 13 predicate sections per resource column", () => {
    const html = renderSubjectView(subjects)
    const resourceNames = Object.keys(subjects.resources)
    expect(html.match(/class="resource-column"/g) ?? []).toHaveLength(resourceNames.length)
    const sections = html.match(/<section class="predicate-section[^"]*"/g) ?? []
    expect(sections).toHaveLength(13 * resourceNames.length)
    for (const predicate of PREDICATES) {
      expect(html).toContain(`data-predicate="${predicate}"`)
    }
  })

  it("shows a grey total badge matching the payload for every section", () => {
    const html = renderSubjectView(subjects)
    for (const [, column] of Object.entries(subjects.resources)) {
      for (const predicate of PREDICATES) {
        const slot = column.predicates[predicate]
        expect(html).toContain(
          `${predicate} <span class="grey">${slot.total}</span>`,
        )
      }
    }
  })

  it("collapses empty sections and lists top objects in rank order", () => {
    const html = renderSubjectView(subjects)
    expect(html).toContain('predicate-section empty collapsed')
    const atLocation = subjects.resources["GPT2-XL-demo"].predicates["AtLocation"]
    const objects = atLocation.top.map((a) => a.object)
    let cursor = -1
    for (const object of objects) {
      const at = html.indexOf(`${object}`, cursor + 1)
      expect(at, `object ${object} missing or out of order`).toBeGreaterThan(cursor)
      cursor = at
    }
  })

  it("matches the snapshot", () => {
    expect(renderSubjectView(subjects)).toMatchSnapshot()
  })

  it("reproduces the identical view when the URL is reloaded", () => {
    const url = "#/subject/elephant?resources=GPT2-XL-demo,ConceptNet-demo"
    const first = { state: parseHash(url), html: renderSubjectView(subjects) }
    const second = { state: parseHash(url), html: renderSubjectView(subjects) }
    expect(second.state).toEqual(first.state)
    expect(second.html).toBe(first.html)
    expect(first.html).toMatchSnapshot()
  })

  it("escapes markup in API strings", () => {
    const payload: SubjectsResponse = {
      subject: "<script>alert(1)</script>",
      resources: {
        "r<1>": {
          predicates: {
            AtLocation: {
              top: [
                {
                  subject: "s",
                  predicate: "AtLocation",
                  object: "<b>bold</b>",
                  score: -0.1,
                  local_rank: 1,
                  subject_rank: 1,
                  global_rank: 1,
                  resource: "r<1>",
                },
              ],
              total: 1,
            },
          },
        },
      },
    }
    const html = renderSubjectView(payload)
    expect(html).not.toContain("<script>alert(1)</script>")
    expect(html).not.toContain("<b>bold</b>")
    expect(html).toContain("&lt;b&gt;bold&lt;/b&gt;")
  })

  it("shows an explicit empty state for an unknown subject", () => {
    const empty: SubjectsResponse = {
      subject: "wombatish",
      resources: Object.fromEntries(
        Object.keys(subjects.resources).map((name) => [
          name,
          {
            predicates: Object.fromEntries(
              PREDICATES.map((p) => [p, { top: [], total: 0 }]),
            ),
          },
        ]),
      ),
    }
    const html = renderSubjectView(empty)
    expect(html).toContain("No assertions found")
    const sections = html.match(/<section class="predicate-section[^"]*"/g) ?? []
    expect(sections).toHaveLength(13 * Object.keys(subjects.resources).length)
    expect(html).not.toContain("<ol>")
  })

  it("warns about unknown API fields in dev mode only", () => {
    const spy = vi.spyOn(console, "warn").mockImplementation(() => {})
    const payload = JSON.parse(JSON.stringify(subjects)) as SubjectsResponse
    ;(payload as unknown as Record<string, unknown>)["brand_new_field"] = 1
    renderSubjectView(payload)
    expect(spy).not.toHaveBeenCalled()
    setDevMode(true)
    renderSubjectView(payload)
    expect(spy).toHaveBeenCalledWith(
      expect.stringContaining("brand_new_field"),
    )
  })
})

describe("search view", () => {
  it("renders one row per result with resource and score columns", () => {
    const html = renderSearchView(search, [])
    const body = html.slice(html.indexOf("<tbody>"))
    expect(body.match(/<tr>/g) ?? []).toHaveLength(search.results.length)
    for (const row of search.results) {
      expect(html).toContain(row.object)
    }
    expect(html).toContain(`${search.total} assertions`)
  })

  it("links to the next page when more results exist", () => {
    const paged: SearchResponse = { ...search, total: 120, page: 2, page_size: 50 }
    const html = renderSearchView(paged, ["gen"])
    expect(html).toContain('class="prev"')
    expect(html).toContain('class="next"')
    expect(html).toContain("#/search?q=airplane&resources=gen&page=3")
    expect(html).toContain("#/search?q=airplane&resources=gen")
    expect(html).toContain("page 2 of 3")
  })

  it("omits the pager links at the edges", () => {
    const single: SearchResponse = { ...search, total: search.results.length, page: 1 }
    const html = renderSearchView(single, [])
    expect(html).not.toContain('class="prev"')
    expect(html).not.toContain('class="next"')
  })

  it("shows an empty state for zero results", () => {
    const empty: SearchResponse = { ...search, total: 0, results: [] }
    expect(renderSearchView(empty, [])).toContain("empty-state")
  })

  it("matches the snapshot", () => {
    expect(renderSearchView(search, [])).toMatchSnapshot()
  })
})

describe("home and error states", () => {
  it("lists resources with sizes", () => {
    const html = renderHome(resources)
    for (const r of resources.resources) {
      expect(html).toContain(r.name)
      expect(html).toContain(`${r.size} assertions`)
    }
  })

  it("renders a visible error banner with a retry affordance", () => {
    const html = renderError("service unreachable")
    expect(html).toContain("error-banner")
    expect(html).toContain("service unreachable")
    expect(html).toContain('class="retry"')
  })
})
