/** Tiny DOM builders. Values go in as text nodes, never as markup. */

type Child = Node | string;

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  children: Child[] = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  node.append(...children);
  return node;
}

export function clear(node: HTMLElement): void {
  while (node.firstChild) node.removeChild(node.firstChild);
}

export function option(value: string, label = value): HTMLOptionElement {
  return el("option", { value }, [label]);
}

export function errorPanel(message: string): HTMLElement {
  return el("div", { class: "error", role: "alert" }, [message]);
}
