import pytest

from olac.model import MetadataElement, MetadataRecord

# A software resource description as interchange XML. Deliberately
# kept with its historical wart: the Type.functionality end tag
# disagrees with its start tag in case, which the parser must repair.
KPML_DOCUMENT = b"""<?xml version="1.0" encoding="UTF-8"?>
<olac
  xmlns="http://www.language-archives.org/OLAC/0.3/"
  xmlns:xsi="http://www.w3.org/2001/XMLSchema-instance"
  xsi:schemaLocation="http://www.language-archives.org/OLAC/0.3/
                http://www.language-archives.org/OLAC/olac-0.3b1.xsd">
  <Title>KPML</Title>
  <Identifier>http://www.purl.org/net/kpml/</Identifier>
  <Creator refine="Author">Bateman, John</Creator>
  <Subject.language code="es"/> <Subject.language code="ru"/>
  <Subject.language code="ja"/> <Subject.language code="el"/>
  <Subject.language code="de"/> <Subject.language code="fr"/>
  <Subject.language code="en"/> <Subject.language code="cs"/>
  <Subject.language code="bg"/>
  <Format.os code="MSWindows/winNT"/> <Format.os code="MSWindows/win95"/>
  <Format.os code="MSWindows/win98"/> <Format.os code="Unix/Solaris"/>
  <Type.functionality>Annotation Tools, Grammars, Lexica, Development Tools,
    Formalisms, Theories, Deep Generation, Morphological Generation,
    Shallow Generation</type.functionality>
  <Relation refine="Requires">Windows: none; Solaris: CommonLisp + CLIM</Relation>
  <Description>Natural Language Generation Linguistic Resource Development and
    Maintenance workbench for large scale generation grammar development,
    teaching, and experimental generation. Based on systemic-functional
    linguistics. Descendent of the Penman NLG system.</Description>
</olac>
"""

KPML_FUNCTIONALITY = (
    "Annotation Tools, Grammars, Lexica, Development Tools, Formalisms, "
    "Theories, Deep Generation, Morphological Generation, Shallow Generation")

KPML_DESCRIPTION = (
    "Natural Language Generation Linguistic Resource Development and "
    "Maintenance workbench for large scale generation grammar development, "
    "teaching, and experimental generation. Based on systemic-functional "
    "linguistics. Descendent of the Penman NLG system.")

ECI_LANGUAGE_CODES = (
    "sq", "bg", "zh", "cs", "nl", "en", "et", "fr", "gd", "de", "el", "it",
    "ja", "la", "lt", "ms", "es", "da", "uz", "no", "pt", "ru", "sr", "sv",
    "tr", "bo")


def build_kpml_record() -> MetadataRecord:
    elements = [
        MetadataElement("Title", content="KPML"),
        MetadataElement("Identifier", content="http://www.purl.org/net/kpml/"),
        MetadataElement("Creator", refine="Author", content="Bateman, John"),
    ]
    for code in ("es", "ru", "ja", "el", "de", "fr", "en", "cs", "bg"):
        elements.append(MetadataElement("Subject.language", code=code))
    for code in ("MSWindows/winNT", "MSWindows/win95", "MSWindows/win98",
                 "Unix/Solaris"):
        elements.append(MetadataElement("Format.os", code=code))
    elements.append(MetadataElement("Type.functionality",
                                    content=KPML_FUNCTIONALITY))
    elements.append(MetadataElement("Relation", refine="Requires",
                                    content="Windows: none; Solaris: CommonLisp + CLIM"))
    elements.append(MetadataElement("Description", content=KPML_DESCRIPTION))
    return MetadataRecord(elements=tuple(elements))


def build_eci_record() -> MetadataRecord:
    elements = [
        MetadataElement("Date", content="1994"),
        MetadataElement("Title", content="ECI Multilingual Text"),
        MetadataElement("Type", code="text"),
        MetadataElement("Identifier", content="1-58563-033-3"),
    ]
    for code in ECI_LANGUAGE_CODES:
        elements.append(MetadataElement("Subject.language", code=code))
    elements.append(MetadataElement(
        "Identifier", content="http://www.ldc.upenn.edu/Catalog/LDC94T5.html"))
    elements.append(MetadataElement(
        "Description",
        content="Recommended Applications: information retrieval, "
                "machine translation, language modeling"))
    return MetadataRecord(elements=tuple(elements))


def build_bulmodic_record() -> MetadataRecord:
    return MetadataRecord(elements=(
        MetadataElement("Title", content="Bulgarian Morphological Dictionary"),
        MetadataElement("Date", content="1998"),
        MetadataElement("Subject.language", code="bg"),
        MetadataElement(
            "Description",
            content="67,500 entries divided into 242 inflectional types "
                    "(including proper nouns), morphosyntactic information "
                    "for each entry, and a morphological engine (MS DOS and "
                    "WINDOWS 95/NT) for morphological analysis and generation"),
        MetadataElement(
            "Identifier",
            content="http://www.icp.inpg.fr/ELRA/cata/text_det.html#bulmodic"),
    ))


@pytest.fixture
def kpml_document() -> bytes:
    return KPML_DOCUMENT


@pytest.fixture
def kpml_record() -> MetadataRecord:
    return build_kpml_record()


@pytest.fixture
def eci_record() -> MetadataRecord:
    return build_eci_record()


@pytest.fixture
def bulmodic_record() -> MetadataRecord:
    return build_bulmodic_record()
