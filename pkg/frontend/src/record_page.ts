/** One entry in full: element table with code labels, a language
 * selector when the record offers several readings. */

import { ApiError, EntryView, RenderedRow } from "./api.js";
import { el, errorPanel, option } from "./dom.js";
import {
  RecordSession,
  recordSessionFromUrl,
  recordSessionUrl,
} from "./state.js";
import { PageContext, displayPicker } from "./search_page.js";

export async function recordPage(
  ctx: PageContext,
  url: URL,
): Promise<HTMLElement> {
  const session = recordSessionFromUrl(url);
  let view: EntryView;
  try {
    view = await ctx.api.entry(
      session.identifier,
      session.selected,
      session.display,
    );
  } catch (failure) {
    if (failure instanceof ApiError && failure.status === 404) {
      return notFoundPage(session.identifier);
    }
    if (failure instanceof ApiError) {
      return errorPanel(failure.message);
    }
    throw failure;
  }

  const page = el("div", { class: "page record-page" });
  page.append(
    el("h2", {}, [
      view.identifier,
      " ",
      el("span", { class: "badge provider" }, [view.provider]),
    ]),
    el("p", { class: "datestamp" }, [`last changed ${view.datestamp}`]),
  );

  const controls = el("div", { class: "controls" });
  if (view.alternatives.length > 1) {
    controls.append(languageSelector(ctx, session, view.alternatives));
  }
  controls.append(
    displayPicker(session.display, (display) =>
      ctx.navigate(recordSessionUrl({ ...session, display })),
    ),
  );
  page.append(controls, elementTable(view.elements));
  return page;
}

function languageSelector(
  ctx: PageContext,
  session: RecordSession,
  alternatives: string[],
): HTMLElement {
  const select = el("select", { class: "alternative-select" });
  select.append(...alternatives.map((lang) => option(lang)));
  select.value = session.selected ?? alternatives[0];
  select.addEventListener("change", () => {
    ctx.navigate(recordSessionUrl({ ...session, selected: select.value }));
  });
  return el("label", { class: "alternative-picker" }, [
    "Reading: ",
    select,
  ]);
}

function elementTable(rows: RenderedRow[]): HTMLElement {
  const body = el("tbody", {});
  for (const row of rows) {
    body.append(elementRow(row));
  }
  return el("table", { class: "elements" }, [
    el("thead", {}, [
      el("tr", {}, [
        el("th", {}, ["element"]),
        el("th", {}, ["content"]),
        el("th", {}, ["code"]),
        el("th", {}, ["lang"]),
      ]),
    ]),
    body,
  ]);
}

function elementRow(row: RenderedRow): HTMLElement {
  const name = el("td", { class: "name" }, [row.name]);
  if (row.refine !== null) {
    name.append(
      " ",
      el("span", { class: "refine", title: row.refine }, [
        `(${row.refine_label ?? row.refine})`,
      ]),
    );
  }
  const code = el("td", { class: "code" });
  if (row.code !== null) {
    // label shown, raw code on hover
    code.append(
      el("span", { class: "code-label", title: row.code }, [
        row.code_label ?? row.code,
      ]),
    );
  }
  return el("tr", { "data-element": row.name }, [
    name,
    el("td", { class: "content" }, [row.content]),
    code,
    el("td", { class: "lang" }, [row.lang]),
  ]);
}

function notFoundPage(identifier: string): HTMLElement {
  return el("div", { class: "page not-found" }, [
    el("h2", {}, ["No such entry"]),
    el("p", {}, [
      `The catalog has no entry ${identifier}. It may have been `,
      "withdrawn by its archive.",
    ]),
    el("p", {}, [el("a", { href: "/search" }, ["Back to search"])]),
  ]);
}
