/** URL-driven shell: every interaction becomes a navigation, every
 * navigation a full page rebuild. Out-of-order rebuilds are dropped
 * by ticket, so slow responses never clobber a newer page. */

import { Api } from "./api.js";
import { clear, el, errorPanel } from "./dom.js";
import { joinPage } from "./join_page.js";
import { recordPage } from "./record_page.js";
import { searchPage } from "./search_page.js";
import { Sequence } from "./sequence.js";

export class App {
  private readonly sequence = new Sequence();
  private pending: Promise<void> = Promise.resolve();
  private readonly onPopState = () => {
    this.pending = this.render();
  };
  private readonly onClick = (event: Event) => {
    this.interceptLink(event as MouseEvent);
  };

  constructor(
    private readonly api: Api,
    private readonly root: HTMLElement,
  ) {
    window.addEventListener("popstate", this.onPopState);
    this.root.addEventListener("click", this.onClick);
  }

  destroy(): void {
    window.removeEventListener("popstate", this.onPopState);
    this.root.removeEventListener("click", this.onClick);
  }

  private interceptLink(event: MouseEvent): void {
    if (
      event.defaultPrevented ||
      event.button !== 0 ||
      event.metaKey ||
      event.ctrlKey ||
      event.shiftKey ||
      event.altKey
    ) {
      return;
    }
    const target = event.target as Element | null;
    const anchor = target?.closest("a");
    const href = anchor?.getAttribute("href");
    if (!href || !href.startsWith("/")) return;
    event.preventDefault();
    void this.navigate(href);
  }

  navigate(href: string): Promise<void> {
    history.pushState({}, "", href);
    this.pending = this.render();
    return this.pending;
  }

  /** Settles when the most recent navigation has rendered. */
  whenIdle(): Promise<void> {
    return this.pending;
  }

  async render(): Promise<void> {
    const ticket = this.sequence.issue();
    const url = new URL(window.location.href);
    let page: HTMLElement;
    try {
      page = await this.buildPage(url);
    } catch (failure) {
      page = errorPanel(
        failure instanceof Error ? failure.message : String(failure),
      );
    }
    if (!this.sequence.isCurrent(ticket)) return; // a newer navigation won
    clear(this.root);
    this.root.append(this.chrome(url.pathname), page);
  }

  private buildPage(url: URL): Promise<HTMLElement> {
    const ctx = {
      api: this.api,
      navigate: (href: string) => void this.navigate(href),
    };
    const path = url.pathname;
    if (path === "/" || path === "/search") return searchPage(ctx, url);
    if (path.startsWith("/record/")) return recordPage(ctx, url);
    if (path === "/join") return joinPage(ctx, url);
    return Promise.resolve(
      el("div", { class: "page not-found" }, [
        el("h2", {}, ["Nothing here"]),
        el("p", {}, [el("a", { href: "/search" }, ["Back to search"])]),
      ]),
    );
  }

  private chrome(path: string): HTMLElement {
    const navLink = (href: string, label: string) =>
      el(
        "a",
        { href, class: path === href ? "current" : "" },
        [label],
      );
    return el("header", { class: "chrome" }, [
      el("h1", {}, ["Language resource catalog"]),
      el("nav", {}, [
        navLink("/search", "Search"),
        " ",
        navLink("/join", "Join"),
      ]),
    ]);
  }
}
