/** Record page behavior over the live server. */

import { afterEach, describe, expect, it } from "vitest";
import { cleanup, find, mount, texts } from "./helpers.js";

afterEach(cleanup);

describe("element table", () => {
  it("shows one row per element with code labels", async () => {
    const { root } = await mount("/record/oai:dfki:KPML");
    const rows = root.querySelectorAll('tr[data-element="Subject.language"]');
    expect(rows.length).toBe(9);
    const labels = Array.from(
      root.querySelectorAll<HTMLElement>(".code-label"),
    );
    const bulgarian = labels.find((n) => n.getAttribute("title") === "bg");
    expect(bulgarian?.textContent).toBe("Bulgarian");
    // every coded cell keeps the raw code reachable on hover
    for (const label of labels) {
      expect(label.getAttribute("title")).toBeTruthy();
    }
  });

  it("labels codes in the asked-for display language", async () => {
    const { root } = await mount("/record/oai:ldc:LDC94T5?display=fr");
    const labels = Array.from(
      root.querySelectorAll<HTMLElement>(".code-label"),
    );
    const german = labels.find((n) => n.getAttribute("title") === "de");
    expect(german?.textContent).toBe("allemand");
  });
});

describe("readings", () => {
  it("offers no selector when the record has a single reading", async () => {
    const { root } = await mount("/record/oai:elra:HULEX");
    expect(root.querySelector(".alternative-select")).toBeNull();
  });

  it("starts from the first reading and keeps vernacular rows", async () => {
    const { root } = await mount("/record/oai:elra:FABLES");
    const select = find<HTMLSelectElement>(root, ".alternative-select");
    expect(select.value).toBe("en");
    const contents = texts(root, "td.content");
    expect(contents).toContain("Hungarian fables");
    expect(contents).toContain("Mesék");
    expect(contents).not.toContain("Fables hongroises");
  });

  it("switches reading through the selector", async () => {
    const { app, root } = await mount("/record/oai:elra:FABLES");
    const select = find<HTMLSelectElement>(root, ".alternative-select");
    select.value = "fr";
    select.dispatchEvent(new Event("change"));
    await app.whenIdle();

    expect(window.location.search).toContain("selected=fr");
    const contents = texts(root, "td.content");
    expect(contents).toContain("Fables hongroises");
    expect(contents).toContain("Mesék");
    expect(contents).not.toContain("Hungarian fables");
    expect(find<HTMLSelectElement>(root, ".alternative-select").value).toBe(
      "fr",
    );
  });
});

describe("missing entries", () => {
  it("shows a not-found page with a way back", async () => {
    const { root } = await mount("/record/oai:dfki:NOPE");
    expect(texts(root, "h2")).toContain("No such entry");
    expect(root.querySelector('a[href="/search"]')).not.toBeNull();
  });
});
