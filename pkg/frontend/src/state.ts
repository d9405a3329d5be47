/** Page session state and its URL encoding.
 *
 * The URL is the whole session: every pair of functions here must
 * round-trip, so a copied address reproduces the page exactly.
 */

export const CLAUSE_KINDS = ["code", "text", "any"] as const;
export type ClauseKind = (typeof CLAUSE_KINDS)[number];

export interface Clause {
  element: string;
  kind: ClauseKind;
  value: string;
}

export const DEFAULT_DISPLAY = "en";

/** Parse "element:kind:value"; only the first two colons split, so
 * values like "oai:ex:sf" survive. Returns null on malformed text. */
export function parseClause(text: string): Clause | null {
  const first = text.indexOf(":");
  if (first < 0) return null;
  const second = text.indexOf(":", first + 1);
  if (second < 0) return null;
  const element = text.slice(0, first).trim();
  const kind = text.slice(first + 1, second).trim();
  const value = text.slice(second + 1).trim();
  if (!element || !value) return null;
  if (!(CLAUSE_KINDS as readonly string[]).includes(kind)) return null;
  return { element, kind: kind as ClauseKind, value };
}

export function clauseText(clause: Clause): string {
  return `${clause.element}:${clause.kind}:${clause.value}`;
}

export function sameClause(a: Clause, b: Clause): boolean {
  return a.element === b.element && a.kind === b.kind && a.value === b.value;
}

export interface SearchSession {
  clauses: Clause[];
  display: string;
}

export function searchSessionFromUrl(url: URL): SearchSession {
  const clauses: Clause[] = [];
  for (const text of url.searchParams.getAll("clause")) {
    const clause = parseClause(text);
    if (clause) clauses.push(clause);
  }
  return {
    clauses,
    display: url.searchParams.get("display") ?? DEFAULT_DISPLAY,
  };
}

export function searchSessionUrl(session: SearchSession): string {
  const params = new URLSearchParams();
  for (const clause of session.clauses) {
    params.append("clause", clauseText(clause));
  }
  if (session.display !== DEFAULT_DISPLAY) {
    params.set("display", session.display);
  }
  const query = params.toString();
  return query ? `/search?${query}` : "/search";
}

export interface RecordSession {
  identifier: string;
  selected?: string;
  display: string;
}

export function recordSessionFromUrl(url: URL): RecordSession {
  const identifier = decodeURIComponent(
    url.pathname.replace(/^\/record\//, ""),
  );
  return {
    identifier,
    selected: url.searchParams.get("selected") ?? undefined,
    display: url.searchParams.get("display") ?? DEFAULT_DISPLAY,
  };
}

export function recordSessionUrl(session: RecordSession): string {
  const params = new URLSearchParams();
  if (session.selected) params.set("selected", session.selected);
  if (session.display !== DEFAULT_DISPLAY) {
    params.set("display", session.display);
  }
  const query = params.toString();
  const path = `/record/${encodeURIComponent(session.identifier)}`;
  return query ? `${path}?${query}` : path;
}

export interface JoinSession {
  left: Clause[];
  right: Clause[];
  on: string;
}

export function joinSessionFromUrl(url: URL): JoinSession {
  const side = (key: string): Clause[] => {
    const clauses: Clause[] = [];
    for (const text of url.searchParams.getAll(key)) {
      const clause = parseClause(text);
      if (clause) clauses.push(clause);
    }
    return clauses;
  };
  return {
    left: side("left"),
    right: side("right"),
    on: url.searchParams.get("on") ?? "",
  };
}

export function joinSessionUrl(session: JoinSession): string {
  const params = new URLSearchParams();
  for (const clause of session.left) {
    params.append("left", clauseText(clause));
  }
  for (const clause of session.right) {
    params.append("right", clauseText(clause));
  }
  if (session.on) params.set("on", session.on);
  const query = params.toString();
  return query ? `/join?${query}` : "/join";
}
