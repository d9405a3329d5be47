/** Search: active clauses, facet sidebar, result list. Every control
 * navigates to a new URL; the page itself is stateless. */

import { Api, ApiError, EntrySummary, Facets } from "./api.js";
import { clauseChips, clauseForm } from "./clause_form.js";
import { el, errorPanel } from "./dom.js";
import { FACET_ELEMENTS } from "./elements.js";
import {
  Clause,
  SearchSession,
  clauseText,
  sameClause,
  searchSessionFromUrl,
  searchSessionUrl,
} from "./state.js";

export interface PageContext {
  api: Api;
  navigate(href: string): void;
}

interface FacetBlock {
  name: string;
  facets: Facets;
}

type SearchOutcome =
  | { rows: EntrySummary[] }
  | { failure: ApiError }
  | null;

export async function searchPage(
  ctx: PageContext,
  url: URL,
): Promise<HTMLElement> {
  const session = searchSessionFromUrl(url);

  // facets and results load concurrently
  const facetJobs = Promise.all(
    FACET_ELEMENTS.map((name) =>
      ctx.api.facets(name, session.display).then(
        (facets): FacetBlock => ({ name, facets }),
        (): FacetBlock => ({ name, facets: {} }),
      ),
    ),
  );
  const resultsJob: Promise<SearchOutcome> =
    session.clauses.length > 0
      ? ctx.api.search(session.clauses.map(clauseText)).then(
          (rows) => ({ rows }),
          (failure) => {
            if (failure instanceof ApiError) return { failure };
            throw failure;
          },
        )
      : Promise.resolve(null);
  const [facetData, outcome] = await Promise.all([facetJobs, resultsJob]);

  const labelFor = (element: string, code: string): string | null =>
    facetData.find((block) => block.name === element)?.facets[code]?.label ??
    null;

  const page = el("div", { class: "page search-page" });
  page.append(controls(ctx, session));
  const columns = el("div", { class: "columns" });
  columns.append(
    sidebar(ctx, session, facetData),
    resultsPane(session, outcome, labelFor),
  );
  page.append(columns);
  return page;
}

function controls(ctx: PageContext, session: SearchSession): HTMLElement {
  const bar = el("div", { class: "controls" });
  bar.append(
    clauseChips(session.clauses, (index) => {
      const clauses = session.clauses.filter((_, i) => i !== index);
      ctx.navigate(searchSessionUrl({ ...session, clauses }));
    }),
    clauseForm((clause) => {
      ctx.navigate(
        searchSessionUrl({
          ...session,
          clauses: [...session.clauses, clause],
        }),
      );
    }),
    displayPicker(session.display, (display) =>
      ctx.navigate(searchSessionUrl({ ...session, display })),
    ),
  );
  return bar;
}

export function displayPicker(
  current: string,
  onApply: (display: string) => void,
): HTMLElement {
  const input = el("input", {
    class: "display-lang",
    value: current,
    size: "4",
    title: "label language; falls back to English",
  });
  const apply = el("button", { type: "button", class: "display-apply" }, [
    "Labels",
  ]);
  apply.addEventListener("click", () => {
    const display = input.value.trim();
    if (display) onApply(display);
  });
  return el("span", { class: "display-picker" }, [apply, input]);
}

function sidebar(
  ctx: PageContext,
  session: SearchSession,
  facetData: FacetBlock[],
): HTMLElement {
  const pane = el("aside", { class: "facets" });
  for (const block of facetData) {
    const section = el("section", { "data-facet": block.name });
    section.append(el("h3", {}, [block.name]));
    const list = el("ul", {});
    const codes = Object.keys(block.facets).sort((a, b) => {
      const byCount = block.facets[b].count - block.facets[a].count;
      return byCount !== 0 ? byCount : a.localeCompare(b);
    });
    for (const code of codes) {
      const cell = block.facets[code];
      const clause: Clause = { element: block.name, kind: "code", value: code };
      const active = session.clauses.some((c) => sameClause(c, clause));
      const button = el(
        "button",
        {
          type: "button",
          class: active ? "facet active" : "facet",
          "data-element": block.name,
          "data-code": code,
          title: code,
        },
        [`${cell.label} (${cell.count})`],
      );
      button.addEventListener("click", () => {
        const clauses = active
          ? session.clauses.filter((c) => !sameClause(c, clause))
          : [...session.clauses, clause];
        ctx.navigate(searchSessionUrl({ ...session, clauses }));
      });
      list.append(el("li", {}, [button]));
    }
    section.append(list);
    pane.append(section);
  }
  return pane;
}

function resultsPane(
  session: SearchSession,
  outcome: SearchOutcome,
  labelFor: (element: string, code: string) => string | null,
): HTMLElement {
  const pane = el("main", { class: "results" });
  if (outcome === null) {
    pane.append(
      el("p", { class: "hint" }, [
        "Add a clause or pick a facet to search the catalog.",
      ]),
    );
    return pane;
  }
  if ("failure" in outcome) {
    pane.append(errorPanel(outcome.failure.message));
    return pane;
  }
  if (outcome.rows.length === 0) {
    pane.append(el("p", { class: "empty" }, ["No records match."]));
    return pane;
  }
  pane.append(
    el("p", { class: "count" }, [`${outcome.rows.length} record(s)`]),
  );
  for (const row of outcome.rows) {
    pane.append(resultItem(row, session, labelFor));
  }
  return pane;
}

function resultItem(
  row: EntrySummary,
  session: SearchSession,
  labelFor: (element: string, code: string) => string | null,
): HTMLElement {
  const item = el("article", { class: "result", "data-id": row.identifier });
  const href =
    `/record/${encodeURIComponent(row.identifier)}` +
    (session.display !== "en" ? `?display=${session.display}` : "");
  item.append(
    el("h4", {}, [
      el("a", { href }, [row.title || row.identifier]),
      " ",
      el("span", { class: "badge provider" }, [row.provider]),
    ]),
    el("p", { class: "identifier" }, [row.identifier]),
  );
  if (row.matched_codes.length > 0) {
    const list = el("ul", { class: "matches" });
    for (const match of row.matched_codes) {
      const label = labelFor(match.element, match.code);
      list.append(
        el("li", { class: "match", title: match.code }, [
          `${match.element}: ${label ?? match.code}`,
        ]),
      );
    }
    item.append(list);
  }
  return item;
}
