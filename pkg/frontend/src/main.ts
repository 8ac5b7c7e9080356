/** SPA bootstrap: route on the URL hash, fetch, render, wire inputs. */

import {
  fetchResources,
  fetchSubjectNames,
  fetchSubjectView,
  searchAssertions,
} from "./api"
import {
  renderError,
  renderHome,
  renderLoading,
  renderSearchView,
  renderSubjectView,
} from "./render"
import { formatHash, parseHash, type AppState } from "./state"
import { setDevMode } from "./types"

const app = document.getElementById("app") as HTMLElement
const subjectInput = document.getElementById("subject-input") as HTMLInputElement
const searchInput = document.getElementById("search-input") as HTMLInputElement
const subjectNames = document.getElementById("subject-names") as HTMLDataListElement

setDevMode(new URLSearchParams(window.location.search).has("dev"))

async function render(state: AppState): Promise<string> {
  switch (state.view) {
    case "home":
      return renderHome(await fetchResources())
    case "subject":
      return renderSubjectView(await fetchSubjectView(state.subject, state.resources))
    case "search":
      return renderSearchView(
        await searchAssertions(state.query, state.resources, state.page),
        state.resources,
      )
  }
}

let generation = 0

async function route(): Promise<void> {
  const state = parseHash(window.location.hash)
  const current = ++generation
  app.innerHTML = renderLoading(state.view)
  try {
    const html = await render(state)
    if (current === generation) app.innerHTML = html
  } catch (error) {
    if (current !== generation) return
    app.innerHTML = renderError(error instanceof Error ? error.message : String(error))
    app.querySelector(".retry")?.addEventListener("click", () => void route())
  }
}

function go(state: AppState): void {
  const hash = formatHash(state)
  if (window.location.hash === hash) {
    void route()
  } else {
    window.location.hash = hash
  }
}

document.getElementById("subject-form")?.addEventListener("submit", (event) => {
  event.preventDefault()
  const subject = subjectInput.value.trim()
  if (subject) go({ view: "subject", subject, resources: [] })
})

document.getElementById("search-form")?.addEventListener("submit", (event) => {
  event.preventDefault()
  const query = searchInput.value.trim()
  if (!query) {
    searchInput.setCustomValidity("Enter a search term")
    searchInput.reportValidity()
    return
  }
  searchInput.setCustomValidity("")
  go({ view: "search", query, resources: [], page: 1 })
})

searchInput?.addEventListener("input", () => searchInput.setCustomValidity(""))

subjectInput?.addEventListener("input", () => {
  const prefix = subjectInput.value.trim()
  if (prefix.length < 2) return
  void fetchSubjectNames(prefix)
    .then((payload) => {
      subjectNames.innerHTML = payload.names
        .map((name) => `<option value="${name.replace(/"/g, "&quot;")}"></option>`)
        .join("")
    })
    .catch(() => {
      // autocomplete is best-effort; typing still works without it
    })
})

window.addEventListener("hashchange", () => void route())
void route()
