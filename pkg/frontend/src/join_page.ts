/** Pairs of entries sharing a code: two clause sets and a join
 * element. A non-coded join element is refused before any request. */

import { ApiError, JoinPair } from "./api.js";
import { clauseChips, clauseForm } from "./clause_form.js";
import { el, errorPanel, option } from "./dom.js";
import { CODED_ELEMENTS, isCodedElement } from "./elements.js";
import {
  JoinSession,
  clauseText,
  joinSessionFromUrl,
  joinSessionUrl,
} from "./state.js";
import { PageContext } from "./search_page.js";

type JoinOutcome =
  | { pairs: JoinPair[] }
  | { failure: ApiError }
  | { refusal: string }
  | null;

export async function joinPage(
  ctx: PageContext,
  url: URL,
): Promise<HTMLElement> {
  const session = joinSessionFromUrl(url);
  const outcome = await load(ctx, session);

  const page = el("div", { class: "page join-page" });
  page.append(
    el("p", { class: "hint" }, [
      "Pair every left match with every right match sharing a code ",
      "on the chosen element.",
    ]),
    sideControls(ctx, session, "left"),
    sideControls(ctx, session, "right"),
    joinOnPicker(ctx, session),
    resultsPane(outcome),
  );
  return page;
}

async function load(
  ctx: PageContext,
  session: JoinSession,
): Promise<JoinOutcome> {
  if (!session.on || session.left.length === 0 || session.right.length === 0) {
    return null;
  }
  if (!isCodedElement(session.on)) {
    // refused here; the server never sees this request
    return {
      refusal: `${session.on} carries no codes, so it cannot join records; pick a coded element.`,
    };
  }
  try {
    return {
      pairs: await ctx.api.join(
        session.left.map(clauseText),
        session.right.map(clauseText),
        session.on,
      ),
    };
  } catch (failure) {
    if (failure instanceof ApiError) return { failure };
    throw failure;
  }
}

function sideControls(
  ctx: PageContext,
  session: JoinSession,
  side: "left" | "right",
): HTMLElement {
  const clauses = session[side];
  const block = el("fieldset", { class: `side ${side}` });
  block.append(
    el("legend", {}, [side]),
    clauseChips(clauses, (index) => {
      const kept = clauses.filter((_, i) => i !== index);
      ctx.navigate(joinSessionUrl({ ...session, [side]: kept }));
    }),
    clauseForm((clause) => {
      ctx.navigate(
        joinSessionUrl({ ...session, [side]: [...clauses, clause] }),
      );
    }, `Add ${side} clause`),
  );
  return block;
}

function joinOnPicker(ctx: PageContext, session: JoinSession): HTMLElement {
  const select = el("select", { class: "join-on" });
  select.append(
    option("", "join on..."),
    ...CODED_ELEMENTS.map((name) => option(name)),
  );
  select.value = isCodedElement(session.on) ? session.on : "";
  select.addEventListener("change", () => {
    ctx.navigate(joinSessionUrl({ ...session, on: select.value }));
  });
  return el("label", { class: "join-picker" }, ["Join on: ", select]);
}

function resultsPane(outcome: JoinOutcome): HTMLElement {
  const pane = el("main", { class: "pairs" });
  if (outcome === null) {
    pane.append(
      el("p", { class: "hint" }, [
        "Give both sides at least one clause and pick a join element.",
      ]),
    );
    return pane;
  }
  if ("refusal" in outcome) {
    pane.append(errorPanel(outcome.refusal));
    return pane;
  }
  if ("failure" in outcome) {
    pane.append(errorPanel(outcome.failure.message));
    return pane;
  }
  if (outcome.pairs.length === 0) {
    pane.append(
      el("p", { class: "empty" }, [
        "No pairs: nothing on the left shares a code with anything ",
        "on the right.",
      ]),
    );
    return pane;
  }
  const body = el("tbody", {});
  for (const pair of outcome.pairs) {
    body.append(
      el("tr", { class: "pair" }, [
        el("td", {}, [entryLink(pair.left.identifier, pair.left.title)]),
        el("td", { class: "shared" }, [pair.shared.join(", ")]),
        el("td", {}, [entryLink(pair.right.identifier, pair.right.title)]),
      ]),
    );
  }
  pane.append(
    el("table", { class: "pair-table" }, [
      el("thead", {}, [
        el("tr", {}, [
          el("th", {}, ["left"]),
          el("th", {}, ["shared codes"]),
          el("th", {}, ["right"]),
        ]),
      ]),
      body,
    ]),
  );
  return pane;
}

function entryLink(identifier: string, title: string): HTMLElement {
  return el("a", { href: `/record/${encodeURIComponent(identifier)}` }, [
    title || identifier,
  ]);
}
