"""Acceptance criteria, one test per criterion.

Each test records its outcome through the ``criterion`` fixture so the
terminal summary prints one PASS/FAIL line per criterion.
"""

import filecmp
import gzip
import io
import itertools
import json
import os
import random
import resource
import subprocess
import sys
import time

import pytest

from authordrift.couples import select_declared_couples
from authordrift.drift import order_stats, overlap_stats
from authordrift.errors import IoFailure
from authordrift.ingest import read_products, read_relations
from authordrift.model import ProductId, normalize_name
from authordrift.namematch import MatcherConfig, match_author_lists
from authordrift.retrofit import calibrate_interval, retrofit_by_similarity, retrofit_simple
from authordrift.synth import generate_corpus, precision_recall, scaled_corpus, write_corpus

from conftest import AUTHORS_D, AUTHORS_P, CORKUM_PRODUCTS, index_from_rows, jsonl_bytes


def names(raws):
    return [normalize_name(r).with_rank(i) for i, r in enumerate(raws, start=1)]


def test_criterion_1_corkum_fixture(criterion):
    start = time.perf_counter()
    a_p, a_d = names(AUTHORS_P), names(AUTHORS_D)
    exact = overlap_stats(MatcherConfig(exact=True).align(a_p, a_d))
    fuzzy_alignment = match_author_lists(a_p, a_d)
    fuzzy = overlap_stats(fuzzy_alignment)
    order = order_stats(fuzzy_alignment, a_p, a_d)
    elapsed = time.perf_counter() - start
    ok = (
        (exact.intersection, exact.symdiff) == (3, 6)
        and (fuzzy.intersection, fuzzy.symdiff) == (6, 0)
        and fuzzy.jaccard == 1.0
        and order.kendall_tau == 1.0
        and elapsed < 1.0
    )
    detail = (f"(exact {exact.intersection}/{exact.symdiff}, fuzzy {fuzzy.intersection}/{fuzzy.symdiff}, "
              f"jaccard {fuzzy.jaccard}, tau {order.kendall_tau}, {elapsed:.3f}s)")
    assert criterion(1, "Corkum fixture", ok, detail), detail


NAME_POOL = [
    "Smith, John", "Smith, J.", "Smith, Jon", "Smyth, John", "Smith, Mary", "Jones, Mary",
    "Jones, M. R.", "Li, Wei", "Lu, Wei", "Kroll, Werner", "Kroll, W.", "Doe, Jane",
    "Corkum, Christopher P.", "Corkum, Christopher", "Ings, Danielle", "Müller, Jürgen",
    "Mueller, Juergen", "García Márquez, Gabriel", "Michalak, Tomasz I.", "Karwowska, Sylwia",
]
THRESHOLDS = (0.0, 0.1, 0.25, 0.5, 1.0)


def alignment_violations(a_p, a_d):
    problems = []
    sizes = []
    for threshold in THRESHOLDS:
        alignment = match_author_lists(a_p, a_d, threshold)
        stats = overlap_stats(alignment)
        ps = [i for i, _, _ in alignment.matches]
        ds = [j for _, j, _ in alignment.matches]
        if len(set(ps)) != len(ps) or len(set(ds)) != len(ds):
            problems.append("not injective")
        if sorted(ps + list(alignment.p_only)) != list(range(1, len(a_p) + 1)):
            problems.append("p side not partitioned")
        if sorted(ds + list(alignment.d_only)) != list(range(1, len(a_d) + 1)):
            problems.append("d side not partitioned")
        if any(d > threshold for _, _, d in alignment.matches):
            problems.append("match above threshold")
        if stats.symdiff != len(a_p) + len(a_d) - 2 * stats.intersection:
            problems.append("symdiff identity")
        if not 0.0 <= stats.jaccard <= 1.0:
            problems.append("jaccard range")
        sizes.append(stats.intersection)
    if sizes != sorted(sizes):
        problems.append("threshold monotonicity")
    return problems


def test_criterion_2_set_identity_properties(criterion):
    rng = random.Random(20240601)
    violations = 0
    for _ in range(10_000):
        a_p = names([rng.choice(NAME_POOL) for _ in range(rng.randint(0, 12))])
        a_d = names([rng.choice(NAME_POOL) for _ in range(rng.randint(0, 12))])
        violations += bool(alignment_violations(a_p, a_d))
    detail = f"({violations} violations over 10000 pairs)"
    assert criterion(2, "Set-identity properties", violations == 0, detail), detail


UNIVERSE = ["Alpha, Anna", "Bravo, Bruno", "Charlie, Carla", "Delta, Dora"]


def enumerate_expected(p, d):
    common = set(p) & set(d)
    matched = sorted((p.index(x) + 1, d.index(x) + 1) for x in common)
    conc = sum((a - c) * (b - e) > 0 for (a, b), (c, e) in itertools.combinations(matched, 2))
    disc = sum((a - c) * (b - e) < 0 for (a, b), (c, e) in itertools.combinations(matched, 2))
    n = len(matched)
    return (len(common), len(set(p) ^ set(d)), None if n < 2 else (conc - disc) / (n * (n - 1) / 2))


def test_criterion_3_brute_force_oracle(criterion):
    lists = [perm for k in range(5) for perm in itertools.permutations(UNIVERSE, k)]
    mismatches = 0
    for p in lists:
        for d in lists:
            a_p, a_d = names(p), names(d)
            alignment = match_author_lists(a_p, a_d)
            ov, od = overlap_stats(alignment), order_stats(alignment, a_p, a_d)
            inter, symdiff, tau = enumerate_expected(p, d)
            got_tau = od.kendall_tau
            tau_ok = got_tau is None if tau is None else (got_tau is not None and abs(got_tau - tau) < 1e-12)
            mismatches += not ((ov.intersection, ov.symdiff) == (inter, symdiff) and tau_ok)
    detail = f"({mismatches} mismatches over {len(lists) ** 2} pairs)"
    assert criterion(3, "Brute-force oracle equivalence", mismatches == 0, detail), detail


def test_criterion_4_synthetic_retrofit(criterion):
    corpus = generate_corpus(seed=7, n_declared=1000, n_supplement_cites=200)
    index = index_from_rows(corpus.products, corpus.relations)
    declared = select_declared_couples(index)
    declared_pairs = {c.pair for c in declared}
    truth = [(ProductId.parse(p), ProductId.parse(d)) for p, d in corpus.supplement_cites]

    simple = [c.pair for c in retrofit_simple(index, declared=declared)]
    recovered = len(set(simple) & set(truth)) / len(truth)
    overlap = len(set(simple) & declared_pairs)

    interval = calibrate_interval(declared, index, k=2)
    scored = [c.pair for c in retrofit_by_similarity(index, interval, exclude=declared)]
    precision, recall = precision_recall(scored, truth)

    ok = len(declared) == 1000 and recovered >= 0.95 and overlap == 0 and precision >= 0.8 and recall >= 0.8
    detail = (f"(simple recovers {recovered:.3f}, overlap {overlap}; similarity precision {precision:.3f} "
              f"recall {recall:.3f}, interval [{interval.lower:.3f}, {interval.upper:.3f}])")
    assert criterion(4, "Synthetic retrofit correctness", ok, detail), detail


def fuzz_case(rng):
    valid = jsonl_bytes(CORKUM_PRODUCTS + [{"source": "10.1/a", "target": "10.1/b", "semantics": "Cites"}])
    kind = rng.randrange(5)
    if kind == 0:
        return bytes(rng.randrange(256) for _ in range(rng.randint(0, 400)))
    if kind == 1:
        data = bytearray(valid)
        for _ in range(rng.randint(1, 20)):
            data[rng.randrange(len(data))] = rng.randrange(256)
        return bytes(data)
    if kind == 2:
        return valid[: rng.randint(0, len(valid))]
    if kind == 3:
        lines = valid.split(b"\n")
        rng.shuffle(lines)
        junk = [b"", b"null", b"[]", b"{}", b'{"id": 1}', b"\xff\xfe", b"{" * 5000, b"[" * 100000]
        return b"\n".join(lines + rng.sample(junk, 3))
    return gzip.compress(valid)[: rng.randint(0, 200)]


def test_criterion_5_ingestion_accounting(criterion):
    rng = random.Random(99)
    violations = []
    for case in range(1000):
        data = fuzz_case(rng)
        for reader in (read_products, read_relations):
            try:
                records, stats = reader(io.BytesIO(data))
                emitted = sum(1 for _ in records)
            except IoFailure:
                # a stream whose gzip header is present but whose body is corrupt is fatal by design
                if not data.startswith(b"\x1f\x8b\x08"):
                    violations.append((case, "unexpected IoFailure"))
                continue
            except Exception as exc:  # any other escape is a crash
                violations.append((case, repr(exc)))
                continue
            if not (stats.balanced() and stats.records_emitted == emitted):
                violations.append((case, stats.as_dict()))
    detail = f"({len(violations)} violations over 1000 cases)"
    assert criterion(5, "Ingestion accounting under fuzzing", not violations, detail), violations[:5]


@pytest.fixture(scope="module")
def pipeline_runs(tmp_path_factory):
    """Generate the 100k/150k corpus and run the full pipeline twice in subprocesses."""
    root = tmp_path_factory.mktemp("scale")
    corpus = scaled_corpus(seed=2024, n_products=100_000, n_relations=150_000)
    paths = write_corpus(corpus, str(root / "data"), compress=True)
    runs = []
    for n in (1, 2):
        out_dir = root / f"run{n}"
        cmd = [sys.executable, "-m", "authordrift.cli", "run", "--products", paths["products"],
               "--relations", paths["relations"], "--out-dir", str(out_dir)]
        start = time.perf_counter()
        proc = subprocess.run(cmd, capture_output=True, text=True)
        runs.append({"out_dir": out_dir, "code": proc.returncode, "stderr": proc.stderr,
                     "stdout": proc.stdout, "seconds": time.perf_counter() - start})
    peak_kib = resource.getrusage(resource.RUSAGE_CHILDREN).ru_maxrss
    return {"corpus": corpus, "runs": runs, "peak_bytes": peak_kib * 1024}


OUTPUTS = ("couples.jsonl", "retrofitted.jsonl", "drift.jsonl", "drift.csv", "aggregate.csv")


@pytest.mark.slow
def test_criterion_6_determinism(pipeline_runs, criterion):
    first, second = pipeline_runs["runs"]
    codes_ok = first["code"] == second["code"] == 0
    identical = codes_ok and all(
        filecmp.cmp(first["out_dir"] / name, second["out_dir"] / name, shallow=False) for name in OUTPUTS
    )
    n_couples = 0
    if codes_ok:
        with open(first["out_dir"] / "couples.jsonl", encoding="utf-8") as fh:
            n_couples = sum(1 for _ in fh)
    planted = len(pipeline_runs["corpus"].declared)
    ok = identical and n_couples == planted
    detail = f"(exit {first['code']}/{second['code']}, identical={identical}, couples {n_couples}/{planted})"
    assert criterion(6, "Determinism on 100k corpus", ok, detail), detail + first["stderr"][-2000:]


@pytest.mark.slow
def test_criterion_7_performance(pipeline_runs, criterion):
    slowest = max(r["seconds"] for r in pipeline_runs["runs"])
    peak = pipeline_runs["peak_bytes"]
    cores = os.cpu_count()
    ok = all(r["code"] == 0 for r in pipeline_runs["runs"]) and slowest < 60 and peak < 4 * 1024 ** 3
    detail = f"(slowest run {slowest:.1f}s, peak RSS {peak / 1024 ** 2:.0f} MiB, {cores} core(s))"
    assert criterion(7, "Desk-scale performance", ok, detail), detail
