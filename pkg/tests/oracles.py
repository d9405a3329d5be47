"""Reference implementations the indexed catalog is checked against.

Everything here evaluates clauses directly, entry by entry, with no
index and no shared state, so agreement with the catalog is evidence
rather than tautology.
"""

from olac import model
from olac.model import descriptor_for
from olac.vocab import LANGUAGE_VOCABULARY, CodeUnknown


def canonical_code(registry, vocabulary_id, code):
    if vocabulary_id == LANGUAGE_VOCABULARY:
        return registry.canonical_language_code(code)
    return registry.resolve(vocabulary_id, code).code


def codes_by_element(registry, record):
    """Canonical codes the record carries, keyed by element name."""
    held = {}
    for element in record.elements:
        if element.code is None:
            continue
        vocabulary_id = descriptor_for(element.name).code_vocabulary
        if vocabulary_id is None:
            continue
        held.setdefault(element.name, set()).add(
            canonical_code(registry, vocabulary_id, element.code))
    return held


def _code_match(registry, record, element_name, value):
    names = model.ELEMENT_NAMES if element_name == "any" else (element_name,)
    held = codes_by_element(registry, record)
    for name in names:
        vocabulary_id = descriptor_for(name).code_vocabulary
        if vocabulary_id is None:
            continue
        try:
            wanted = canonical_code(registry, vocabulary_id, value)
        except CodeUnknown:
            continue  # ambiguity errors propagate to the caller
        for code in held.get(name, ()):
            if code == wanted or code.startswith(wanted + "/"):
                return True
    return False


def _text_match(record, element_name, value):
    needle = value.casefold()
    for element in record.elements:
        if element_name != "any" and element.name != element_name:
            continue
        if needle in element.content.casefold():
            return True
    return False


def clause_matches(registry, record, clause):
    if clause.kind == "text":
        return _text_match(record, clause.element, clause.value)
    if clause.kind == "code":
        return _code_match(registry, record, clause.element, clause.value)
    return (_text_match(record, clause.element, clause.value)
            or _code_match(registry, record, clause.element, clause.value))


def search(registry, entries, query):
    """Filter-and-sort over a plain entry list."""
    hits = [entry for entry in entries
            if all(clause_matches(registry, entry.record, clause)
                   for clause in query.clauses)]
    hits.sort(key=lambda entry: entry.identifier)
    return hits


def join(registry, entries, left, right, join_on):
    lefts = search(registry, entries, left)
    rights = search(registry, entries, right)
    pairs = []
    for l_entry in lefts:
        l_codes = codes_by_element(registry, l_entry.record).get(join_on, set())
        if not l_codes:
            continue
        for r_entry in rights:
            if r_entry.identifier == l_entry.identifier:
                continue
            r_codes = codes_by_element(registry, r_entry.record).get(join_on, set())
            if l_codes & r_codes:
                pairs.append((l_entry, r_entry))
    pairs.sort(key=lambda pair: (pair[0].identifier, pair[1].identifier))
    return pairs


def facet_counts(registry, entries, element_name):
    counts = {}
    for entry in entries:
        for code in codes_by_element(registry, entry.record).get(element_name, ()):
            counts[code] = counts.get(code, 0) + 1
    return counts
