"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line with its elapsed time (run with ``pytest -s`` to see them).
"""

import json
import random
import time
from itertools import combinations

import pytest

import bruteforce as bf
from conftest import (FIG_TREE_TEXT, API_CLASSIFIER, build_corpus, m,
                      random_corpus, WORKED_TREES)

from apicomp.cli import main as cli_main
from apicomp.clusterer import cluster, initial_clusters, refine_clusters
from apicomp.components import RelatednessLabels, Component, precision
from apicomp.graph_builder import ApiGraph
from apicomp.metrics import (CorpusMetrics, QualityWeights, average_path_length,
                             call_freq, co_occur, pair_distance, pair_weight,
                             weight)
from apicomp.pruner import prune, prune_corpus
from apicomp.synth import PlantSpec, generate, write_generated
from apicomp.trace_model import MethodRef, classify, parse_trace_file

TOL = 1e-12
A, B, D, E, L = (m(f"lib.Ops.{x}") for x in "ABDEL")


def _report(number: int, description: str, started: float) -> None:
    elapsed = time.perf_counter() - started
    print(f"PASS criterion {number}: {description} ({elapsed:.2f}s)")


@pytest.fixture(scope="module")
def worked_corpus():
    return build_corpus({"app1": WORKED_TREES})


def test_criterion_01_pruning_micro_example():
    started = time.perf_counter()
    tree = classify(parse_trace_file(FIG_TREE_TEXT, "demo", "s0"), API_CLASSIFIER)
    assert tree.node_count() == 21
    pruned = prune(tree)
    assert pruned.node_count() == 13
    assert time.perf_counter() - started < 1.0
    _report(1, "hand-encoded example tree prunes 21 -> 13 nodes", started)


def test_criterion_02_weight_worked_example(worked_corpus):
    started = time.perf_counter()
    t1, _, t3 = worked_corpus.trees["app1"]
    assert abs(pair_weight(D, E, t1) - 0.20) <= TOL
    assert abs(pair_weight(D, E, t3) - 1.00) <= TOL
    assert abs(weight(D, E, worked_corpus) - 0.60) <= TOL
    _report(2, "pair weight 0.20 / 1.00 per tree, 0.60 averaged", started)


def test_criterion_03_distance_worked_example(worked_corpus):
    started = time.perf_counter()
    t1 = worked_corpus.trees["app1"][0]
    assert average_path_length(A, B, t1) == 1
    assert average_path_length(A, E, t1) == 3
    _report(3, "path lengths A-B = 1 and A-E = 3 in the first tree", started)


def test_criterion_04_frequency_ordering(worked_corpus):
    started = time.perf_counter()
    assert call_freq([A, B], worked_corpus) > call_freq([A, L], worked_corpus)
    _report(4, "call_freq({A,B}) > call_freq({A,L})", started)


def test_criterion_05_oracle_equivalence():
    started = time.perf_counter()
    for seed in range(100):
        corpus = random_corpus(seed, max_trees=5, max_nodes=12)
        engine = CorpusMetrics(corpus)
        trees = [t for ts in corpus.trees.values() for t in ts]
        methods = engine.methods()
        if len(methods) < 2:
            continue
        rng = random.Random(seed)
        pairs = [tuple(rng.sample(methods, 2)) for _ in range(5)]
        for c, v in pairs:
            assert abs(engine.local_freq(c, v) - bf.lfreq(c, v, corpus)) <= TOL
            assert abs(engine.global_freq(c, v) - bf.gfreq(c, v, corpus)) <= TOL
            assert abs(engine.distance(c, v) - bf.distance(c, v, corpus)) <= TOL
            assert abs(engine.weight(c, v) - bf.weight(c, v, corpus)) <= TOL
            for tree in trees:
                assert co_occur(c, v, tree) == bf.co_occur(c, v, tree)
                assert abs(pair_distance(c, v, tree) - bf.dis(c, v, tree)) <= TOL
                assert abs(pair_weight(c, v, tree) - bf.wei(c, v, tree)) <= TOL
        size = min(len(methods), 4)
        group = rng.sample(methods, size) if size >= 2 else None
        if group:
            assert abs(engine.call_freq(group) - bf.call_freq(group, corpus)) <= TOL
            assert abs(engine.call_dist(group) - bf.call_dist(group, corpus)) <= TOL
            assert abs(engine.call_weight(group) - bf.call_weight(group, corpus)) <= TOL
            assert abs(engine.quality(group) - bf.quality(group, corpus)) <= TOL
    elapsed = time.perf_counter() - started
    assert elapsed < 30.0
    _report(5, "100 random corpora match the brute-force oracle to 1e-12", started)


def test_criterion_06_clustering_properties():
    started = time.perf_counter()
    for seed in range(100):
        rng = random.Random(seed)
        n = rng.randint(1, 30)
        vertices = [MethodRef("g.C", f"v{i:02d}") for i in range(n)]
        graph = ApiGraph(vertices)
        for i in range(n):
            for j in range(i + 1, n):
                if rng.random() < 0.15:
                    graph.add_edge(vertices[i], vertices[j], rng.random())
        state = initial_clusters(graph)
        clusters = refine_clusters(graph, state)
        covered = set().union(*(c.members for c in clusters))
        assert covered == set(graph.vertices)
        assert len(clusters) <= len(state.centers)

    two_triangles = ApiGraph([])
    for u, v in [("a", "b"), ("a", "c"), ("b", "c"),
                 ("c", "d"), ("c", "e"), ("d", "e")]:
        two_triangles.add_edge(MethodRef("g.C", u), MethodRef("g.C", v), 0.5)
    clusters = cluster(two_triangles)
    counts: dict[MethodRef, int] = {}
    for c in clusters:
        for member in c.members:
            counts[member] = counts.get(member, 0) + 1
    overlapping = [v for v, n in counts.items() if n > 1]
    assert overlapping == [MethodRef("g.C", "c")]

    elapsed = time.perf_counter() - started
    assert elapsed < 30.0
    _report(6, "cover + non-increasing refinement on 100 graphs; "
               "two-triangle overlap is exactly the shared vertex", started)


def test_criterion_07_planted_recovery(tmp_path):
    started = time.perf_counter()
    for k in (2, 3, 5):
        corpus_dir = tmp_path / f"synth{k}"
        write_generated(PlantSpec(component_count=k, seed=k * 101,
                                  inter_call_prob=0.0, noise_prob=0.0),
                        corpus_dir)
        out = tmp_path / f"out{k}"
        assert cli_main(["run", "--corpus", str(corpus_dir),
                         "--classifier", str(corpus_dir / "classifier.txt"),
                         "--out", str(out)]) == 0
        report = json.loads((out / "report.json").read_text())
        got = {frozenset(c["provided_interface"]) for c in report["components"]}
        truth = {frozenset(line.split(","))
                 for line in (corpus_dir / "ground_truth.txt").read_text().splitlines()}
        assert got == truth
    elapsed = time.perf_counter() - started
    assert elapsed < 10.0
    _report(7, "k in {2,3,5} disjoint plants recovered exactly end to end", started)


def test_criterion_08_range_and_convexity():
    started = time.perf_counter()
    corpus, _ = generate(
        PlantSpec(component_count=3, methods_per_component=(4, 7),
                  inter_call_prob=0.3, noise_prob=0.3, trees_per_app=4,
                  app_count=3, seed=2024))
    pruned = prune_corpus(corpus)
    engine = CorpusMetrics(pruned)
    methods = engine.methods()
    rng = random.Random(2024)
    for i in range(1000):
        group = rng.sample(methods, rng.randint(2, 5))
        weights = QualityWeights(rng.random(), rng.random(), rng.random()) \
            if i % 3 == 0 and rng.random() > 0.1 else QualityWeights()
        attrs = (engine.call_freq(group), engine.call_dist(group),
                 engine.call_weight(group))
        q = engine.quality(group, weights)
        for value in (*attrs, q):
            assert 0.0 <= value <= 1.0
        assert min(attrs) - TOL <= q <= max(attrs) + TOL
    elapsed = time.perf_counter() - started
    assert elapsed < 10.0
    _report(8, "1000 random sets: attributes and quality in [0,1], "
               "quality between min and max attribute", started)


def test_criterion_09_determinism(tmp_path):
    started = time.perf_counter()
    corpus_dir = tmp_path / "synth"
    write_generated(PlantSpec(component_count=3, inter_call_prob=0.2,
                              noise_prob=0.2, seed=9), corpus_dir)
    outputs = []
    for name, jobs in (("a", "1"), ("b", "8"), ("c", "8")):
        out = tmp_path / name
        assert cli_main(["run", "--corpus", str(corpus_dir),
                         "--classifier", str(corpus_dir / "classifier.txt"),
                         "--jobs", jobs, "--out", str(out)]) == 0
        outputs.append(out)
    for filename in ("report.json", "report.txt"):
        blobs = [(o / filename).read_bytes() for o in outputs]
        assert blobs[0] == blobs[1] == blobs[2]
    _report(9, "byte-identical reports across reruns and parallelism", started)


def test_criterion_10_precision_evaluator():
    started = time.perf_counter()
    core = [m(f"x.Core{i}.m{j}") for i, j in
            [(0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (2, 1),
             (3, 0), (4, 0), (5, 0), (6, 0)]]
    helpers = [m(f"x.Helper{i}.run") for i in range(4)]
    assert len(core) + len(helpers) == 14
    assert len({ref.class_name for ref in core + helpers}) == 11
    component = Component(core[0], frozenset(core + helpers),
                          frozenset(r.class_name for r in core + helpers),
                          frozenset())
    labels = RelatednessLabels.from_pairs(list(combinations(core, 2)))
    assert precision(component, labels) == 10 / 14
    _report(10, "14-method interface with 7 related classes scores 10/14", started)
