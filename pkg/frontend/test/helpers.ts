/** Shared plumbing: the live server's address, app mounting, and a
 * cleanup hook that tears down every app a test created. */

import { inject } from "vitest";
import { Api } from "../src/api.js";
import { App } from "../src/router.js";

export const BASE_URL: string = inject("baseUrl");

export function newApi(): Api {
  return new Api(BASE_URL);
}

export interface Mounted {
  app: App;
  root: HTMLElement;
}

const live: Mounted[] = [];

/** Mount a fresh app over the real server and navigate it to path. */
export async function mount(path: string, api: Api = newApi()): Promise<Mounted> {
  const root = document.createElement("div");
  document.body.append(root);
  const app = new App(api, root);
  live.push({ app, root });
  await app.navigate(path);
  return { app, root };
}

export function cleanup(): void {
  for (const { app, root } of live.splice(0)) {
    app.destroy();
    root.remove();
  }
  window.history.replaceState(null, "", "/");
}

export function texts(scope: ParentNode, selector: string): string[] {
  return Array.from(
    scope.querySelectorAll(selector),
    (node) => node.textContent?.trim() ?? "",
  );
}

export function find<T extends Element>(scope: ParentNode, selector: string): T {
  const node = scope.querySelector<T>(selector);
  if (!node) throw new Error(`expected an element matching ${selector}`);
  return node;
}

export function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}
