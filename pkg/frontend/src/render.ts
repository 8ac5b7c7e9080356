/** Pure HTML renderers: every view is a deterministic function of the
 * parsed URL state and the API responses it displays. */

import { formatHash } from "./state"
import {
  ASSERTION_FIELDS,
  PREDICATES,
  warnUnknownFields,
  type AssertionRow,
  type PredicateSlot,
  type ResourcesResponse,
  type SearchResponse,
  type SubjectsResponse,
} from "./types"

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
}

function formatScore(score: number | null): string {
  return score === null ? "" : score.toFixed(3)
}

function renderAssertionItem(row: AssertionRow): string {
  warnUnknownFields(row as unknown as Record<string, unknown>, ASSERTION_FIELDS, "assertion")
  const score = formatScore(row.score)
  const title = score ? ` title="score ${score}"` : ""
  return `<li${title}>${escapeHtml(row.object)}${
    score ? ` <span class="score">${score}</span>` : ""
  }</li>`
}

function renderPredicateSection(predicate: string, slot: PredicateSlot): string {
  warnUnknownFields(slot as unknown as Record<string, unknown>, ["top", "total"], "slot")
  const empty = slot.total === 0
  const classes = empty ? "predicate-section empty collapsed" : "predicate-section"
  const items = slot.top.map(renderAssertionItem).join("")
  return [
    `<section class="${classes}" data-predicate="${escapeHtml(predicate)}">`,
    `<h3>${escapeHtml(predicate)} <span class="grey">${slot.total}</span></h3>`,
    empty ? "" : `<ol>${items}</ol>`,
    `</section>`,
  ].join("")
}

export function renderSubjectView(payload: SubjectsResponse): string {
  warnUnknownFields(
    payload as unknown as Record<string, unknown>,
    ["subject", "resources"],
    "subjects",
  )
  const columns = Object.entries(payload.resources).map(([name, column]) => {
    const sections = PREDICATES.map((predicate) =>
      renderPredicateSection(predicate, column.predicates[predicate] ?? { top: [], total: 0 }),
    ).join("")
    return [
      `<div class="resource-column" data-resource="${escapeHtml(name)}">`,
      `<h2>${escapeHtml(name)}</h2>`,
      sections,
      `</div>`,
    ].join("")
  })
  if (!columns.length) {
    return `<p class="empty-state">No resources selected.</p>`
  }
  const grandTotal = Object.values(payload.resources).reduce(
    (sum, column) =>
      sum + Object.values(column.predicates).reduce((s, slot) => s + slot.total, 0),
    0,
  )
  const emptyNote =
    grandTotal === 0
      ? `<p class="empty-state">No assertions found for ${escapeHtml(
          JSON.stringify(payload.subject),
        )} in the selected resources.</p>`
      : ""
  return [
    `<h1>${escapeHtml(payload.subject)}</h1>`,
    emptyNote,
    `<div class="resource-columns">`,
    ...columns,
    `</div>`,
  ].join("")
}

export function renderSearchView(payload: SearchResponse, resources: string[]): string {
  warnUnknownFields(
    payload as unknown as Record<string, unknown>,
    ["query", "page", "page_size", "total", "results"],
    "search",
  )
  if (payload.total === 0) {
    return `<p class="empty-state">No assertions match ${escapeHtml(
      JSON.stringify(payload.query),
    )}.</p>`
  }
  const rows = payload.results
    .map((row) => {
      warnUnknownFields(row as unknown as Record<string, unknown>, ASSERTION_FIELDS, "assertion")
      return [
        `<tr>`,
        `<td class="grey">${escapeHtml(row.resource ?? "")}</td>`,
        `<td>${escapeHtml(row.subject)}</td>`,
        `<td>${escapeHtml(row.predicate)}</td>`,
        `<td>${escapeHtml(row.object)}</td>`,
        `<td class="score">${formatScore(row.score)}</td>`,
        `</tr>`,
      ].join("")
    })
    .join("")
  const lastPage = Math.ceil(payload.total / payload.page_size)
  const pager: string[] = []
  if (payload.page > 1) {
    const href = formatHash({
      view: "search",
      query: payload.query,
      resources,
      page: payload.page - 1,
    })
    pager.push(`<a class="prev" href="${href}">previous</a>`)
  }
  pager.push(`<span>page ${payload.page} of ${lastPage}</span>`)
  if (payload.page < lastPage) {
    const href = formatHash({
      view: "search",
      query: payload.query,
      resources,
      page: payload.page + 1,
    })
    pager.push(`<a class="next" href="${href}">next</a>`)
  }
  return [
    `<h1>${payload.total} assertions for ${escapeHtml(JSON.stringify(payload.query))}</h1>`,
    `<table class="search-results">`,
    `<thead><tr><th>resource</th><th>subject</th><th>predicate</th><th>object</th><th>score</th></tr></thead>`,
    `<tbody>${rows}</tbody>`,
    `</table>`,
    `<nav class="pager">${pager.join(" ")}</nav>`,
  ].join("")
}

export function renderHome(payload: ResourcesResponse): string {
  const rows = payload.resources
    .map(
      (r) =>
        `<li>${escapeHtml(r.name)} <span class="grey">${r.size} assertions, ${escapeHtml(
          r.kind,
        )}</span></li>`,
    )
    .join("")
  return [
    `<h1>Commonsense knowledge bases</h1>`,
    `<p>Pick a subject or search all assertions.</p>`,
    `<ul class="resource-list">${rows}</ul>`,
  ].join("")
}

export function renderLoading(label: string): string {
  return `<p class="loading">Loading ${escapeHtml(label)}…</p>`
}

export function renderError(message: string): string {
  return [
    `<div class="error-banner" role="alert">`,
    `<strong>Request failed.</strong> ${escapeHtml(message)}`,
    ` <button type="button" class="retry">Retry</button>`,
    `</div>`,
  ].join("")
}
