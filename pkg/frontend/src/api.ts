/** Typed client for the union-catalog JSON API.
 *
 * Every number and label the UI shows comes out of these responses;
 * the client holds no vocabulary data of its own.
 */

export interface MatchedCode {
  element: string;
  code: string;
}

export interface EntrySummary {
  identifier: string;
  provider: string;
  datestamp: string;
  title: string;
  matched_codes: MatchedCode[];
}

export interface RenderedRow {
  name: string;
  refine: string | null;
  refine_label: string | null;
  code: string | null;
  code_label: string | null;
  content: string;
  lang: string;
}

export interface EntryView {
  identifier: string;
  provider: string;
  datestamp: string;
  alternatives: string[];
  elements: RenderedRow[];
}

export interface FacetCell {
  count: number;
  label: string;
}

export type Facets = Record<string, FacetCell>;

export interface JoinPair {
  left: EntrySummary;
  right: EntrySummary;
  shared: string[];
}

export interface ProviderRow {
  archive_id: string;
  name: string;
  base_url: string;
  earliest_datestamp: string;
  last_success: string | null;
  items_held: number;
  last_error: string | null;
}

/** A non-2xx answer, carrying the server's machine code and its
 * human message (which names offending vocabulary codes). */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export class Api {
  /** base is "" in the browser (same origin); tests pass the spawned
   * server's absolute address. */
  constructor(private readonly base: string = "") {}

  private async call<T>(path: string, params?: URLSearchParams): Promise<T> {
    const query = params && Array.from(params).length > 0 ? `?${params}` : "";
    const response = await fetch(`${this.base}${path}${query}`);
    const body: unknown = await response.json();
    if (!response.ok) {
      const fault =
        (body as { error?: { code?: string; message?: string } }).error ?? {};
      throw new ApiError(
        response.status,
        fault.code ?? "unknown",
        fault.message ?? `request failed with status ${response.status}`,
      );
    }
    return body as T;
  }

  search(clauses: string[]): Promise<EntrySummary[]> {
    const params = new URLSearchParams();
    for (const clause of clauses) params.append("clause", clause);
    return this.call("/api/search", params);
  }

  entry(
    identifier: string,
    selected?: string,
    display?: string,
  ): Promise<EntryView> {
    const params = new URLSearchParams();
    if (selected) params.set("selected", selected);
    if (display) params.set("display", display);
    return this.call(
      `/api/entry/${encodeURIComponent(identifier)}`,
      params,
    );
  }

  facets(element: string, display?: string): Promise<Facets> {
    const params = new URLSearchParams();
    if (display) params.set("display", display);
    return this.call(`/api/facets/${encodeURIComponent(element)}`, params);
  }

  join(left: string[], right: string[], on: string): Promise<JoinPair[]> {
    const params = new URLSearchParams();
    for (const clause of left) params.append("left", clause);
    for (const clause of right) params.append("right", clause);
    params.set("on", on);
    return this.call("/api/join", params);
  }

  providers(): Promise<ProviderRow[]> {
    return this.call("/api/providers");
  }
}
