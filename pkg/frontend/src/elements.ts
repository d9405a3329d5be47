/** Structural schema of the record format: the element names and
 * which of them carry codes. This mirrors the server's element table
 * (interface shape, not vocabulary content), so the join form can
 * refuse a non-coded element before any request goes out.
 */

export const ELEMENT_NAMES = [
  "Contributor",
  "Coverage",
  "Creator",
  "Date",
  "Description",
  "Format",
  "Format.cpu",
  "Format.encoding",
  "Format.markup",
  "Format.os",
  "Format.sourcecode",
  "Identifier",
  "Language",
  "Publisher",
  "Relation",
  "Rights",
  "Rights.software",
  "Source",
  "Subject",
  "Subject.language",
  "Title",
  "Type",
  "Type.data",
  "Type.functionality",
] as const;

export const CODED_ELEMENTS = [
  "Format",
  "Format.cpu",
  "Format.encoding",
  "Format.markup",
  "Format.os",
  "Format.sourcecode",
  "Language",
  "Rights",
  "Rights.software",
  "Subject.language",
  "Type",
  "Type.data",
  "Type.functionality",
] as const;

export function isCodedElement(name: string): boolean {
  return (CODED_ELEMENTS as readonly string[]).includes(name);
}

/** Elements whose facets make a useful sidebar. */
export const FACET_ELEMENTS = ["Subject.language", "Type.data", "Format.os"];
