from __future__ import annotations

import json
from pathlib import Path

import pytest

from authordrift.ingest import build_index, read_products, read_relations

CORKUM_DOI = "10.1186/s12865-015-0113-0"
FIGSHARE_DOI = "10.6084/m9.figshare.c.3600443_d4.v1"
CORKUM_TITLE = (
    "Immune cell subsets and their gene expression profiles from human PBMC isolated by "
    "Vacutainer Cell Preparation Tube (CPT™) and standard density gradient"
)
FIGSHARE_TITLE = "Additional file 4: Table S4. of " + CORKUM_TITLE

AUTHORS_P = [
    "Corkum, Christopher P.",
    "Ings, Danielle P.",
    "Burgess, Christopher",
    "Karwowska, Sylwia",
    "Kroll, Werner",
    "Michalak, Tomasz I.",
]
AUTHORS_D = [
    "Corkum, Christopher",
    "Ings, Danielle",
    "Burgess, Christopher",
    "Karwowska, Sylwia",
    "Kroll, Werner",
    "Michalak, Tomasz",
]

CORKUM_PRODUCTS = [
    {
        "id": CORKUM_DOI,
        "kind": "publication",
        "title": CORKUM_TITLE,
        "date": "2015-04-01",
        "authors": [{"name": n} for n in AUTHORS_P],
    },
    {
        "id": FIGSHARE_DOI,
        "kind": "dataset",
        "title": FIGSHARE_TITLE,
        "date": "2015-04-01",
        "authors": [{"name": n} for n in AUTHORS_D],
    },
    {
        "id": "10.9999/unrelated",
        "kind": "publication",
        "title": "An unrelated paper",
        "date": "2016",
        "authors": [{"name": "Doe, Jane"}],
    },
]
CORKUM_RELATIONS = [
    {"source": CORKUM_DOI, "target": FIGSHARE_DOI, "semantics": "IsSupplementedBy"},
]


def jsonl_bytes(rows) -> bytes:
    return "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in rows).encode("utf-8")


def write_jsonl(path: Path, rows) -> Path:
    path.write_bytes(jsonl_bytes(rows))
    return path


def index_from_rows(products, relations):
    import io

    ps, _ = read_products(io.BytesIO(jsonl_bytes(products)))
    rs, _ = read_relations(io.BytesIO(jsonl_bytes(relations)))
    return build_index(ps, rs)


@pytest.fixture
def corkum_index():
    return index_from_rows(CORKUM_PRODUCTS, CORKUM_RELATIONS)


@pytest.fixture
def corkum_files(tmp_path):
    return (
        write_jsonl(tmp_path / "products.jsonl", CORKUM_PRODUCTS),
        write_jsonl(tmp_path / "relations.jsonl", CORKUM_RELATIONS),
    )


# Acceptance bookkeeping: one line per criterion in the terminal summary.
ACCEPTANCE_RESULTS: list = []


@pytest.fixture
def criterion():
    def record(number: int, name: str, passed: bool, detail: str = "") -> bool:
        ACCEPTANCE_RESULTS.append((number, name, passed, detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, passed, detail in sorted(ACCEPTANCE_RESULTS, key=lambda r: r[0]):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {number}. {name} {detail}".rstrip())
