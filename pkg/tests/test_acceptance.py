"""Acceptance criteria, one test each, each printing a PASS/FAIL line."""

import random
import time

import numpy as np
import pytest
from scipy import stats as sps

from firstlink.centrality import eigenvector_centrality
from firstlink.cli import main
from firstlink.graph import ABSENT
from firstlink.scalefree import compare_distributions, fit_power_law, rank_exponent
from firstlink.synthetic import (
    fixed_depth_graph,
    fixture,
    random_functional_graph,
    ring,
    sample_discrete_power_law,
    synthetic_dump,
)
from firstlink.traversal import (
    StepCounter,
    compute_funnels,
    compute_path_lengths,
    compute_stats,
    compute_visits,
    detect_cycles,
    visits_matrix_oracle,
)
from firstlink.wikiparse import compute_regions, extract_first_link, iter_link_candidates
from markup_corpus import CORPUS, random_markup


def peel(succ):
    """Cycle members: what survives repeated removal of nodes with no in-links."""
    n = len(succ)
    indeg = [0] * n
    for t in succ:
        if t != ABSENT:
            indeg[t] += 1
    alive = [True] * n
    stack = [v for v in range(n) if indeg[v] == 0]
    while stack:
        v = stack.pop()
        alive[v] = False
        t = succ[v]
        if t != ABSENT:
            indeg[t] -= 1
            if indeg[t] == 0:
                stack.append(t)
    return alive


def test_fixture_exactness(criterion):
    start = time.perf_counter()
    graph, table = fixture()
    _, stats = compute_stats(graph)
    elapsed = time.perf_counter() - start
    v = {t: int(stats.visits[table.lookup(t)]) for t in "ABCDEFG"}
    f = {t: int(stats.funnels[table.lookup(t)]) for t in "ABCDEFG"}
    ok = v["A"] == 7 and f["E"] == 2 and f["C"] == 4 and f["A"] == 0 and f["B"] == 0 and elapsed < 1.0
    detail = f"visits(A)={v['A']} funnels(E)={f['E']} funnels(C)={f['C']} funnels(A)={f['A']} funnels(B)={f['B']} in {elapsed:.3f}s"
    assert criterion("fixture exactness", ok, detail)


@pytest.fixture(scope="module")
def random_graphs():
    rng = np.random.default_rng(1000)
    graphs = []
    for i in range(1000):
        n = int(rng.integers(1, 501))
        p_absent = float(rng.choice([0.0, 0.02, 0.2]))
        planted = int(rng.integers(0, 12))
        graphs.append(random_functional_graph(n, rng, p_absent=p_absent, planted_cycles=planted))
    return graphs


def test_oracle_equivalence(criterion, random_graphs):
    start = time.perf_counter()
    violations = 0
    cycle_counts = set()
    for g in random_graphs:
        succ = g.successor.tolist()
        cycles = detect_cycles(g)
        cycle_counts.add(len(cycles))
        visits = compute_visits(g, cycles)
        funnels = compute_funnels(g, cycles)
        oracle = visits_matrix_oracle(g).row_sums()
        violations += int(np.count_nonzero(oracle != visits))
        on_cycle = peel(succ)
        child_v = [0] * g.n
        child_f = [0] * g.n
        for u, t in enumerate(succ):
            if t != ABSENT and not on_cycle[u]:
                child_v[t] += int(visits[u])
                child_f[t] += int(funnels[u])
        for v in range(g.n):
            if on_cycle[v]:
                violations += int(funnels[v] != 0)
            else:
                violations += int(visits[v] != 1 + child_v[v]) + int(funnels[v] != 1 + child_f[v])
    elapsed = time.perf_counter() - start
    ok = violations == 0 and elapsed < 120 and len(cycle_counts) > 5
    detail = (f"{len(random_graphs)} graphs, {violations} violations, "
              f"cycle counts {min(cycle_counts)}..{max(cycle_counts)}, {elapsed:.1f}s")
    assert criterion("oracle equivalence", ok, detail)


def test_cycle_plateau(criterion, random_graphs):
    bad = 0
    checked = 0
    for g in random_graphs:
        succ = g.successor.tolist()
        cycles = detect_cycles(g)
        visits = compute_visits(g, cycles)
        # basin of a cycle: every node whose walk ends there, found by walking
        basin = {}
        for s in range(g.n):
            seen, v = set(), s
            while v != ABSENT and v not in seen:
                seen.add(v)
                v = succ[v]
            if v != ABSENT:
                key = min(_cycle_through(succ, v))
                basin[key] = basin.get(key, 0) + 1
        for c in cycles.cycles:
            checked += 1
            vals = {int(visits[m]) for m in c}
            bad += int(vals != {basin[min(c)]})
    assert criterion("cycle plateau", bad == 0, f"{checked} cycles, {bad} without a basin-size plateau")


def _cycle_through(succ, v):
    out, u = [v], succ[v]
    while u != v:
        out.append(u)
        u = succ[u]
    return out


def test_ring_365(criterion):
    g = ring(365)
    cycles = detect_cycles(g)
    lengths = compute_path_lengths(g, cycles)
    ok = len(cycles) == 1 and len(cycles.cycles[0]) == 365 and set(lengths.tolist()) == {365}
    detail = f"{len(cycles)} cycle(s) of length {sorted(set(cycles.lengths().tolist()))}, path lengths {sorted(set(lengths.tolist()))}"
    assert criterion("365-ring", ok, detail)


def test_power_law_recovery(criterion):
    start = time.perf_counter()
    x = sample_discrete_power_law(2.5, 1, 50_000, np.random.default_rng(2016))
    fit = fit_power_law(x)
    cmp = compare_distributions(x, fit, "exponential")
    elapsed = time.perf_counter() - start
    relation = fit.alpha * (fit.gamma - 1)
    ok = (abs(fit.gamma - 2.5) <= 0.05 and fit.xmin <= 3 and relation == pytest.approx(1.0, rel=1e-15, abs=0)
          and cmp.R > 0 and cmp.p < 0.01 and elapsed < 60)
    detail = (f"gamma={fit.gamma:.4f} xmin={fit.xmin} alpha*(gamma-1)={relation!r} "
              f"vs exponential R={cmp.R:.2f} p={cmp.p:.2g}, {elapsed:.1f}s")
    assert criterion("power-law recovery", ok, detail)


def test_rank_exponent_relation(criterion):
    alpha = rank_exponent(1.41)
    assert criterion("rank exponent relation", abs(alpha - 2.44) <= 0.005, f"alpha(1.41)={alpha:.4f}")


def test_parser_corpus(criterion):
    wrong = [(m, e, extract_first_link(m)) for m, e in CORPUS if extract_first_link(m) != e]
    rnd = random.Random(42)
    disagreements = 0
    for _ in range(10_000):
        s = random_markup(rnd)
        single = [(c.offset, c.target) for c in iter_link_candidates(s)]
        regions = compute_regions(s)
        disagreements += int(single != regions.candidates() or extract_first_link(s) != regions.first_link())
    train = extract_first_link(CORPUS[0][0])
    physics = extract_first_link(CORPUS[1][0])
    ok = not wrong and disagreements == 0 and len(CORPUS) >= 30
    detail = (f"{len(CORPUS) - len(wrong)}/{len(CORPUS)} cases (Train -> {train}, Physics -> {physics}), "
              f"{disagreements} scanner/oracle disagreements in 10000 random markups")
    assert criterion("parser corpus", ok, detail)


def test_funnel_isolation(criterion):
    graph, table = fixture()
    cycles, stats = compute_stats(graph)
    members = np.flatnonzero(cycles.in_cycle)
    tri = eigenvector_centrality(ring(3)).scores
    top = int(np.argmax(stats.funnels))
    ok = (np.all(stats.funnels[members] == 0) and np.all(np.abs(tri - 0.577) <= 0.001)
          and not cycles.in_cycle[top])
    detail = (f"cycle funnels {stats.funnels[members].tolist()}, 3-cycle eigenvector {np.round(tri, 4).tolist()}, "
              f"top funnels {table.title_of(top)} (on cycle: {bool(cycles.in_cycle[top])})")
    assert criterion("funnel isolation", ok, detail)


def test_determinism_across_workers(criterion, tmp_path):
    start = time.perf_counter()
    dump = tmp_path / "dump.xml"
    dump.write_bytes(synthetic_dump(10_000, seed=7)[0])
    outputs = {}
    for w in (1, 2, 8):
        edges = tmp_path / f"edges{w}.tsv"
        out = tmp_path / f"analysis{w}"
        assert main(["extract", str(dump), "--out", str(edges), "--workers", str(w)]) == 0
        assert main(["analyze", str(edges), "--out", str(out), "--workers", str(w)]) == 0
        files = {"edges": edges.read_bytes()}
        files.update({p.name: p.read_bytes() for p in sorted(out.iterdir())})
        outputs[w] = files
    elapsed = time.perf_counter() - start
    same = outputs[1] == outputs[2] == outputs[8]
    ok = same and elapsed < 60
    detail = f"{len(outputs[1])} files byte-identical for workers 1,2,8: {same}, {elapsed:.1f}s"
    assert criterion("determinism", ok, detail)


def test_linear_dereference_count(criterion):
    sizes = [10**4, 10**5, 10**6]
    steps = []
    for n in sizes:
        g = fixed_depth_graph(n, depth=8, rng=np.random.default_rng(n))
        counter = StepCounter()
        compute_funnels(g, detect_cycles(g), counter=counter)
        steps.append(counter.steps)
    r2 = sps.linregress(sizes, steps).rvalue ** 2
    detail = f"steps {steps} for n {sizes}, R^2={r2:.6f}"
    assert criterion("linear funnel runtime", r2 > 0.99, detail)
