"""Seeded synthetic dumps with ground truth, for evaluation and benchmarking.

The generator plants three kinds of publication/supplement links:

* declared: an ``IsSupplementedBy`` (or inverse ``IsSupplementTo``) edge;
* supplement-like citations: a ``Cites``/``References`` edge between a
  publication and a supplement built exactly like a declared one, sharing
  at least one author and dated within 120 days;
* background: citations between unrelated records, some sharing an author
  but dated years apart.

Only the first two are truth for retrofitting.
"""

from __future__ import annotations

import datetime as dt
import gzip
import json
import os
import random
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

GIVEN_NAMES = (
    "Anna", "Bruno", "Carla", "Daniel", "Elena", "Fabio", "Greta", "Hugo", "Irene", "Jonas",
    "Karin", "Luca", "Marta", "Nils", "Olga", "Pavel", "Rosa", "Stefan", "Tomasz", "Ulla",
    "Viktor", "Wanda", "Xavier", "Yara", "Zeno", "Sylwia", "Werner", "Christopher", "Danielle",
    "Andrea", "Paolo", "Ornella", "Miguel", "Chen", "Priya", "Kenji", "Amara", "Lars", "Ines",
    "Mateo", "Noor", "Oscar", "Petra", "Quentin", "Renata", "Sven", "Teresa", "Umberto", "Vera",
)
SYLLABLES = (
    "ka", "ro", "mi", "te", "lan", "ser", "vo", "din", "ble", "har", "mo", "ni", "ski", "ber",
    "gu", "lo", "pe", "san", "chi", "wa", "tor", "el", "zak", "fen", "dra", "mu", "qui", "ost",
)
WORDS = (
    "immune", "cell", "subsets", "gene", "expression", "profiles", "human", "isolated", "standard",
    "density", "gradient", "analysis", "network", "dynamics", "model", "soil", "carbon", "climate",
    "ocean", "temperature", "protein", "structure", "learning", "graph", "metadata", "survey",
    "coastal", "sediment", "neural", "signal", "quantum", "lattice", "thermal", "transport",
    "species", "diversity", "forest", "urban", "mobility", "energy", "storage", "battery",
    "genome", "variant", "cohort", "clinical", "trial", "imaging", "microscopy", "spectra",
    "galaxy", "cluster", "seismic", "fault", "river", "basin", "drought", "crop", "yield",
    "language", "corpus", "archive", "citation", "library", "software", "pipeline", "sensor",
)
SUBJECTS = ("biology", "physics", "earth sciences", "medicine", "computer science")
SUPPLEMENT_TITLES = (
    "Additional file {n}: Table S{n}. of {title}",
    "Data from: {title}",
    "{title}",
    "Supplementary material for {title}",
    "Dataset for {title}",
)
SOFTWARE_TITLES = ("Source code for {title}", "{title} (software)", "Code and data: {title}")

EPOCH = dt.date(2005, 1, 1)
SPAN_DAYS = 17 * 365


@dataclass
class Person:
    family: str
    given: str
    middle: str  # single initial or ""

    def render(self, rng: random.Random, variant: bool) -> str:
        given, middle, family = self.given, self.middle, self.family
        if variant:
            roll = rng.random()
            if roll < 0.4:
                middle = ""
            elif roll < 0.6:
                given = given[0] + "."
            elif roll < 0.8:
                return " ".join(p for p in (given, f"{middle}." if middle else "", family) if p)
        parts = given + (f" {middle}." if middle else "")
        return f"{family}, {parts}"


@dataclass
class Corpus:
    products: List[dict] = field(default_factory=list)
    relations: List[dict] = field(default_factory=list)
    declared: List[Tuple[str, str]] = field(default_factory=list)
    supplement_cites: List[Tuple[str, str]] = field(default_factory=list)

    def truth(self) -> dict:
        return {
            "declared": sorted(list(p) for p in self.declared),
            "supplement_cites": sorted(list(p) for p in self.supplement_cites),
        }


class Generator:
    def __init__(self, seed: int):
        self.rng = random.Random(seed)
        self._next_id = 0

    def person(self) -> Person:
        rng = self.rng
        family = "".join(rng.choice(SYLLABLES) for _ in range(rng.randint(2, 4))).capitalize()
        middle = rng.choice("ABCDEFGHJKLMNPRSTW") if rng.random() < 0.35 else ""
        return Person(family, rng.choice(GIVEN_NAMES), middle)

    def title(self) -> str:
        words = self.rng.sample(WORDS, self.rng.randint(6, 11))
        return " ".join(words).capitalize()

    def date(self) -> dt.date:
        return EPOCH + dt.timedelta(days=self.rng.randrange(SPAN_DAYS))

    def pid(self, kind: str) -> str:
        self._next_id += 1
        prefix = {"publication": "10.5555/pub", "dataset": "10.5281/zenodo", "software": "10.5281/sw"}
        return f"{prefix[kind]}.{self._next_id:07d}"

    def record(self, kind: str, title: str, date: dt.date, authors: List[str], subjects=None) -> dict:
        rec = {
            "id": self.pid(kind),
            "kind": kind,
            "title": title,
            "date": date.isoformat(),
            "authors": [{"name": a} for a in authors],
        }
        if subjects:
            rec["subjects"] = subjects
        return rec

    def team(self) -> List[Person]:
        return [self.person() for _ in range(self.rng.randint(1, 8))]

    def supplement_authors(self, team: List[Person], keep_first: bool) -> List[str]:
        rng = self.rng
        members = list(team)
        roll = rng.random()
        if roll < 0.25 and len(members) > 1:
            survivors = [m for m in members[1:] if rng.random() < 0.6]
            members = members[:1] + survivors if keep_first else survivors or members[:1]
        elif roll < 0.45:
            members = members + [self.person() for _ in range(rng.randint(1, 3))]
        elif roll < 0.6 and len(members) > 2:
            i, j = rng.sample(range(1, len(members)), 2) if keep_first else rng.sample(range(len(members)), 2)
            members[i], members[j] = members[j], members[i]
        return [m.render(rng, variant=rng.random() < 0.3) for m in members]

    def linked_pair(self, corpus: Corpus, keep_first: bool) -> Tuple[dict, dict]:
        rng = self.rng
        team = self.team()
        title = self.title()
        date = self.date()
        subjects = [rng.choice(SUBJECTS)] if rng.random() < 0.7 else None
        pub = self.record("publication", title, date, [m.render(rng, False) for m in team], subjects)
        kind = "software" if rng.random() < 0.2 else "dataset"
        templates = SOFTWARE_TITLES if kind == "software" else SUPPLEMENT_TITLES
        sup_title = rng.choice(templates).format(n=rng.randint(1, 9), title=title)
        sup_date = date + dt.timedelta(days=rng.randint(-30, 120))
        sup = self.record(kind, sup_title, sup_date, self.supplement_authors(team, keep_first))
        corpus.products += [pub, sup]
        return pub, sup


def generate_corpus(
    seed: int,
    n_declared: int = 1000,
    n_supplement_cites: int = 200,
    n_background_publications: int = 2000,
    n_background_supplements: int = 1500,
    n_background_cites: int = 3000,
    n_near_misses: int = 200,
) -> Corpus:
    """Build a corpus whose planted links are recorded as ground truth.

    ``n_near_misses`` adds citations between records that share an author
    but lie more than a year apart and have unrelated titles.
    """
    gen = Generator(seed)
    rng = gen.rng
    corpus = Corpus()

    for _ in range(n_declared):
        pub, sup = gen.linked_pair(corpus, keep_first=False)
        if rng.random() < 0.3:
            rel = {"source": sup["id"], "target": pub["id"], "semantics": "IsSupplementTo"}
        else:
            rel = {"source": pub["id"], "target": sup["id"], "semantics": "IsSupplementedBy"}
        corpus.relations.append(rel)
        corpus.declared.append((pub["id"], sup["id"]))

    for _ in range(n_supplement_cites):
        pub, sup = gen.linked_pair(corpus, keep_first=True)
        corpus.relations.append(_citation(rng, pub["id"], sup["id"]))
        corpus.supplement_cites.append((pub["id"], sup["id"]))

    pubs, sups = [], []
    for _ in range(n_background_publications):
        team = gen.team()
        rec = gen.record("publication", gen.title(), gen.date(), [m.render(rng, False) for m in team])
        pubs.append((rec, team))
    for _ in range(n_background_supplements):
        kind = "software" if rng.random() < 0.2 else "dataset"
        team = gen.team()
        rec = gen.record(kind, gen.title(), gen.date(), [m.render(rng, False) for m in team])
        sups.append((rec, team))
    corpus.products += [r for r, _ in pubs] + [r for r, _ in sups]

    for _ in range(n_near_misses):
        pub, team = rng.choice(pubs)
        pub_date = dt.date.fromisoformat(pub["date"])
        gap = rng.randint(400, 2000) * rng.choice((-1, 1))
        date = pub_date + dt.timedelta(days=gap)
        if not EPOCH <= date <= EPOCH + dt.timedelta(days=SPAN_DAYS):
            date = pub_date - dt.timedelta(days=gap)
        authors = [team[0].render(rng, False)] + [gen.person().render(rng, False) for _ in range(rng.randint(0, 4))]
        rng.shuffle(authors)
        sup = gen.record("dataset", gen.title(), date, authors)
        corpus.products.append(sup)
        corpus.relations.append(_citation(rng, pub["id"], sup["id"]))

    all_ids = [p["id"] for p in corpus.products]
    sup_ids = [r["id"] for r, _ in sups]
    pub_ids = [r["id"] for r, _ in pubs]
    truth = set(corpus.declared) | set(corpus.supplement_cites)
    while n_background_cites > 0:
        roll = rng.random()
        if roll < 0.6 and pub_ids and sup_ids:
            a, b = rng.choice(pub_ids), rng.choice(sup_ids)
        else:
            a, b = rng.choice(all_ids), rng.choice(all_ids)
        if a == b or (a, b) in truth or (b, a) in truth:
            continue
        corpus.relations.append(_citation(rng, a, b))
        n_background_cites -= 1

    order = list(range(len(corpus.products)))
    rng.shuffle(order)
    corpus.products = [corpus.products[i] for i in order]
    rng.shuffle(corpus.relations)
    return corpus


def _citation(rng: random.Random, citing: str, cited: str) -> dict:
    roll = rng.random()
    if roll < 0.5:
        return {"source": citing, "target": cited, "semantics": "Cites"}
    if roll < 0.7:
        return {"source": cited, "target": citing, "semantics": "IsCitedBy"}
    if roll < 0.9:
        return {"source": citing, "target": cited, "semantics": "References"}
    return {"source": cited, "target": citing, "semantics": "IsReferencedBy"}


def scaled_corpus(seed: int, n_products: int = 100_000, n_relations: int = 150_000) -> Corpus:
    """Corpus sized by total product and relation counts (declared links are 20% of products)."""
    n_declared = n_products // 5
    n_cites = n_products // 20
    n_near = n_products // 100
    remaining = n_products - 2 * n_declared - 2 * n_cites - n_near
    n_bg_pub = remaining * 3 // 5
    n_bg_sup = remaining - n_bg_pub
    n_bg_rel = n_relations - n_declared - n_cites - n_near
    return generate_corpus(
        seed,
        n_declared=n_declared,
        n_supplement_cites=n_cites,
        n_background_publications=n_bg_pub,
        n_background_supplements=n_bg_sup,
        n_background_cites=n_bg_rel,
        n_near_misses=n_near,
    )


def write_corpus(corpus: Corpus, directory: str, compress: bool = False) -> Dict[str, str]:
    """Write products, relations and truth files; returns their paths."""
    os.makedirs(directory, exist_ok=True)
    suffix = ".jsonl.gz" if compress else ".jsonl"
    paths = {
        "products": os.path.join(directory, "products" + suffix),
        "relations": os.path.join(directory, "relations" + suffix),
        "truth": os.path.join(directory, "truth.json"),
    }
    for key, rows in (("products", corpus.products), ("relations", corpus.relations)):
        opener = gzip.open if compress else open
        with opener(paths[key], "wt", encoding="utf-8") as fh:
            for row in rows:
                fh.write(json.dumps(row, ensure_ascii=False))
                fh.write("\n")
    with open(paths["truth"], "w", encoding="utf-8") as fh:
        json.dump(corpus.truth(), fh, indent=1)
        fh.write("\n")
    return paths


def precision_recall(found: List[Tuple[str, str]], truth: List[Tuple[str, str]]) -> Tuple[float, float]:
    found_set, truth_set = set(found), set(truth)
    hits = len(found_set & truth_set)
    precision = hits / len(found_set) if found_set else 1.0
    recall = hits / len(truth_set) if truth_set else 1.0
    return precision, recall
