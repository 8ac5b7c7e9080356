/** Shared wire types for the read-only JSON API. */

export const PREDICATES = [
  "AtLocation",
  "CapableOf",
  "Causes",
  "Desires",
  "HasA",
  "HasPrerequisite",
  "HasProperty",
  "HasSubevent",
  "MadeOf",
  "MotivatedByGoal",
  "PartOf",
  "UsedFor",
  "ReceivesAction",
] as const

export type PredicateName = (typeof PREDICATES)[number]

export interface AssertionRow {
  subject: string
  predicate: string
  object: string
  score: number | null
  local_rank: number
  subject_rank: number
  global_rank: number
  resource: string | null
}

export interface PredicateSlot {
  top: AssertionRow[]
  total: number
}

export interface SubjectsResponse {
  subject: string
  resources: Record<string, { predicates: Record<string, PredicateSlot> }>
}

export interface SearchResponse {
  query: string
  page: number
  page_size: number
  total: number
  results: AssertionRow[]
}

export interface ResourceInfo {
  name: string
  kind: string
  size: number
}

export interface ResourcesResponse {
  resources: ResourceInfo[]
}

export interface SubjectNamesResponse {
  names: string[]
}

let devMode = false

/** Development builds log silently-dropped API fields to the console. */
export function setDevMode(on: boolean): void {
  devMode = on
}

export function warnUnknownFields(
  payload: Record<string, unknown>,
  known: readonly string[],
  context: string,
): void {
  if (!devMode) return
  for (const key of Object.keys(payload)) {
    if (!known.includes(key)) {
      console.warn(`unknown API field ${context}.${key} (not rendered)`)
    }
  }
}

export const ASSERTION_FIELDS = [
  "subject",
  "predicate",
  "object",
  "score",
  "local_rank",
  "subject_rank",
  "global_rank",
  "resource",
] as const
