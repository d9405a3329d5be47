/** The clause builder row and the chips for active clauses, shared by
 * the search and join pages. */

import { el, option } from "./dom.js";
import { ELEMENT_NAMES } from "./elements.js";
import { Clause, CLAUSE_KINDS, ClauseKind, clauseText } from "./state.js";

export function clauseForm(
  onAdd: (clause: Clause) => void,
  label = "Add clause",
): HTMLElement {
  const elementSelect = el("select", { class: "clause-element" });
  elementSelect.append(
    option("any", "any element"),
    ...ELEMENT_NAMES.map((name) => option(name)),
  );
  const kindSelect = el("select", { class: "clause-kind" });
  kindSelect.append(...CLAUSE_KINDS.map((kind) => option(kind)));
  const valueInput = el("input", {
    class: "clause-value",
    placeholder: "value",
  });
  const add = () => {
    const value = valueInput.value.trim();
    if (!value) return;
    onAdd({
      element: elementSelect.value,
      kind: kindSelect.value as ClauseKind,
      value,
    });
  };
  const button = el("button", { type: "button", class: "clause-add" }, [
    label,
  ]);
  button.addEventListener("click", add);
  valueInput.addEventListener("keydown", (event) => {
    if (event.key === "Enter") add();
  });
  return el("span", { class: "clause-form" }, [
    elementSelect,
    kindSelect,
    valueInput,
    button,
  ]);
}

export function clauseChips(
  clauses: Clause[],
  onRemove: (index: number) => void,
): HTMLElement {
  const list = el("ul", { class: "clause-chips" });
  clauses.forEach((clause, index) => {
    const remove = el(
      "button",
      { type: "button", class: "chip-remove", "aria-label": "remove" },
      ["×"],
    );
    remove.addEventListener("click", () => onRemove(index));
    list.append(
      el("li", { class: "chip", "data-clause": clauseText(clause) }, [
        clauseText(clause),
        remove,
      ]),
    );
  });
  return list;
}
