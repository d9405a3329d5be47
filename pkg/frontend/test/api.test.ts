/** The typed client against the live server: shapes, labels, and the
 * error channel. */

import { describe, expect, it } from "vitest";
import { ApiError } from "../src/api.js";
import { newApi } from "./helpers.js";

const api = newApi();

describe("search", () => {
  it("finds the three Bulgarian records across providers", async () => {
    const rows = await api.search(["Subject.language:code:bg"]);
    expect(rows.map((r) => r.identifier).sort()).toEqual([
      "oai:dfki:KPML",
      "oai:elra:L0030",
      "oai:ldc:LDC94T5",
    ]);
    expect(new Set(rows.map((r) => r.provider))).toEqual(
      new Set(["dfki", "elra", "ldc"]),
    );
  });

  it("reports matched codes on each summary", async () => {
    const rows = await api.search(["Subject.language:code:hu"]);
    expect(rows).toHaveLength(1);
    expect(rows[0].matched_codes).toEqual([
      { element: "Subject.language", code: "hu" },
    ]);
  });

  it("surfaces an ambiguous code as an ApiError with the label", async () => {
    const failure = await api
      .search(["Subject.language:code:mhk"])
      .then(() => null, (exc: unknown) => exc);
    expect(failure).toBeInstanceOf(ApiError);
    const error = failure as ApiError;
    expect(error.status).toBe(400);
    expect(error.code).toBe("code_ambiguous");
    expect(error.message).toContain("other Mon Khmer languages");
  });
});

describe("entry", () => {
  it("returns every element row with labels", async () => {
    const view = await api.entry("oai:dfki:KPML");
    const langs = view.elements.filter((e) => e.name === "Subject.language");
    expect(langs).toHaveLength(9);
    const bulgarian = langs.find((e) => e.code === "bg");
    expect(bulgarian?.code_label).toBe("Bulgarian");
  });

  it("labels codes in the asked-for display language", async () => {
    const view = await api.entry("oai:ldc:LDC94T5", undefined, "fr");
    const german = view.elements.find((e) => e.code === "de");
    expect(german?.code_label).toBe("allemand");
  });

  it("defaults a multi-reading record to its first alternative", async () => {
    const view = await api.entry("oai:elra:FABLES");
    expect(view.alternatives).toEqual(["en", "fr"]);
    const contents = view.elements.map((e) => e.content);
    expect(contents).toContain("Hungarian fables");
    expect(contents).toContain("Mesék");
    expect(contents).not.toContain("Fables hongroises");
  });

  it("signals a missing entry with status 404", async () => {
    const failure = await api
      .entry("oai:dfki:NOPE")
      .then(() => null, (exc: unknown) => exc);
    expect(failure).toBeInstanceOf(ApiError);
    expect((failure as ApiError).status).toBe(404);
    expect((failure as ApiError).code).toBe("not_found");
  });
});

describe("facets", () => {
  it("counts holdings per code with labels", async () => {
    const facets = await api.facets("Subject.language");
    expect(facets["bg"]).toEqual({ count: 3, label: "Bulgarian" });
  });

  it("labels facets in the asked-for display language", async () => {
    const facets = await api.facets("Subject.language", "fr");
    expect(facets["de"]?.label).toBe("allemand");
  });
});

describe("join", () => {
  it("pairs entries sharing a markup code", async () => {
    const pairs = await api.join(
      ["Type.functionality:text:Lexica"],
      ["Subject.language:code:hu"],
      "Format.markup",
    );
    expect(pairs).toHaveLength(1);
    expect(pairs[0].left.identifier).toBe("oai:ldc:TOOL1");
    expect(pairs[0].right.identifier).toBe("oai:elra:HULEX");
    expect(pairs[0].shared).toEqual(["oai:ex:sf"]);
  });
});
