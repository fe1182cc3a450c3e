import pytest
from hypothesis import given, settings

from starproc import fixtures
from starproc.chart import make_chart, weakly_guarded
from starproc.errors import ChartError, InvalidWitness
from starproc.expr import EMPTY_STEP, chart_of, parse
from starproc.gen import GenParams, gen_chart, gen_llee_onechart
from starproc.llee import (
    Witness,
    eliminate,
    find_loop_subcharts,
    has_infinite_path,
    lee_holds,
    lee_refutation,
    llee_witness,
    loops_back_to,
    search_witness,
    section,
    validate_witness,
    witness_from_dict,
    witness_from_levels,
    witness_to_dict,
)
from starproc.transform import connect_through

from conftest import seeds


def replay_by_hand(w):
    """Independent replay: eliminate level by level and check every loop on the way."""
    live = {t for t in w.base.transitions}
    roots = [w.base.start] if w.base.start is not None else list(w.base.vertices)

    def reachable(sources, edges, avoid=None):
        seen, stack = set(), list(sources)
        while stack:
            x = stack.pop()
            if x in seen or x == avoid:
                continue
            seen.add(x)
            stack.extend(t[2] for t in edges if t[0] == x)
        return seen

    for k in sorted({n for n in w.marking.values() if n > 0}):
        anchors = sorted({t[0] for t in live if w.marking[t] == k})
        for v in anchors:
            entries = [t for t in live if t[0] == v and w.marking[t] == k]
            zero = [t for t in live if w.marking[t] == 0]
            body = reachable([t[2] for t in entries], zero, avoid=v)
            # every body transition must be level 0 at this point
            if any(w.marking[t] > 0 for t in live if t[0] in body):
                return False
            if body & w.base.terminating:
                return False
            # some infinite path exists; dead ends inside the body are allowed
            if not any(t[2] == v or v in reachable([t[2]], zero) for t in entries):
                return False
            inner = [t for t in zero if t[0] in body and t[2] in body]
            if _cyclic(body, inner):
                return False
            live -= set(entries)
        keep = reachable(roots, live)
        live = {t for t in live if t[0] in keep}
    keep = reachable(roots, live)
    return not _cyclic(keep, [t for t in live if t[0] in keep])


def _cyclic(vertices, edges):
    succ = {v: [t[2] for t in edges if t[0] == v] for v in vertices}
    state = {}

    def visit(v):
        state[v] = 1
        for u in succ[v]:
            if state.get(u) == 1 or (u not in state and visit(u)):
                return True
        state[v] = 2
        return False

    return any(v not in state and visit(v) for v in vertices)


def test_fig1_loops(fig1):
    (loop,) = find_loop_subcharts(fig1, "v1")
    assert loop.entries == {("v1", "a", "v11")}
    assert loop.body_transitions == {("v11", EMPTY_STEP, "v1")}
    assert find_loop_subcharts(fixtures.load("g1"), "X1") == []


def test_fig1_elimination_run(fig1):
    c = fig1
    for v in ("v1", "v2"):
        (loop,) = find_loop_subcharts(c, v)
        c = eliminate(c, loop)
    assert ("v1", "a", "v11") not in c.transitions and ("v2", "b", "v21") not in c.transitions
    (loop,) = find_loop_subcharts(c, "v")
    assert loop.entries == {("v", "a", "v11"), ("v", "b", "v21")}
    final = eliminate(c, loop)
    assert final.vertices == {"v"} and final.terminating == {"v"} and not final.transitions


def test_self_loop_elimination():
    c = make_chart([("x", "a", "x")], start="x", terminating=["x"])
    (loop,) = find_loop_subcharts(c, "x")
    out = eliminate(c, loop)
    assert out.vertices == {"x"} and not out.transitions


def test_fig1_witnesses(fig1):
    assert lee_holds(fig1)
    w = llee_witness(fig1)
    assert w is not None and validate_witness(w).valid
    for i in (1, 2, 3):
        report = validate_witness(fixtures.load_witness(f"fig1_witness{i}"))
        assert report.valid and report.guarded


def test_fig1_first_marking_levels():
    w = fixtures.load_witness("fig1_witness1")
    assert w.marking[("v1", "a", "v11")] == 1
    assert w.marking[("v2", "b", "v21")] == 2
    assert w.marking[("v", "a", "v11")] == 3
    assert w.marking[("v", "b", "v21")] == 3


def test_appendix_charts_fail_lee():
    for name in ("g1", "g2"):
        c = fixtures.load(name)
        assert not lee_holds(c)
        assert llee_witness(c) is None


def test_fig4_connect_through_loses_llee(fig4):
    assert llee_witness(connect_through(fig4, "abcd1", "abcd2")) is None


def test_invalid_marking():
    c = chart_of(parse("a·b"))
    w = witness_from_levels(c, {("a·b", "a", "1·b"): 1})
    assert not validate_witness(w).valid


def test_fig4_witness_flags():
    report = validate_witness(fixtures.load_witness("fig4_witness"))
    assert report.valid and report.guarded and report.one_transition_limited


def test_loops_back_to_fig1():
    w = fixtures.load_witness("fig1_witness1")
    rel = loops_back_to(w)
    assert "v1" in rel["v11"] and "v2" in rel["v21"]
    assert {"v1", "v2", "v11", "v21"} <= section(w, "v")


def test_loops_back_to_without_marks():
    c = chart_of(parse("a·b"))
    rel = loops_back_to(witness_from_levels(c, {}))
    assert all(not targets for targets in rel.values())


def test_loops_back_to_rejects_invalid():
    c = chart_of(parse("a·b"))
    with pytest.raises(InvalidWitness):
        loops_back_to(witness_from_levels(c, {("a·b", "a", "1·b"): 1}))


def test_fig5_section_of_top_is_the_scc(fig5_witness):
    assert section(fig5_witness, "abc") == fig5_witness.base.vertices


def test_witness_json_roundtrip(fig5_witness):
    doc = witness_to_dict(fig5_witness)
    back = witness_from_dict(doc)
    assert back.base == fig5_witness.base and back.marking == fig5_witness.marking
    doc["marking"][0]["level"] = -1
    with pytest.raises(ChartError):
        witness_from_dict(doc)


def test_infinite_paths(fig1):
    assert has_infinite_path(fig1)
    assert not has_infinite_path(chart_of(parse("a·b")))


def test_fixture_witnesses_replay_by_hand():
    for name in fixtures.WITNESSES:
        assert replay_by_hand(fixtures.load_witness(name)), name


@given(seeds)
def test_found_witnesses_are_valid(seed):
    c = gen_chart(GenParams(seed=seed, empty_step_density=0.3), n_vertices=7)
    w = llee_witness(c)
    if w is None:
        return
    report = validate_witness(w)
    assert report.valid
    assert replay_by_hand(w)
    if report.guarded:
        assert weakly_guarded(c)
    if report.one_transition_limited:
        assert report.guarded


@settings(max_examples=60)
@given(seeds)
def test_lee_and_llee_agree(seed):
    n = 4 + seed % 9
    c = gen_chart(GenParams(seed=seed, empty_step_density=0.3), n_vertices=n, density=0.25)
    assert lee_holds(c) == (llee_witness(c) is not None)


@given(seeds)
def test_generated_witnesses_agree_with_oracle(seed):
    c, w = gen_llee_onechart(GenParams(seed=seed))
    assert validate_witness(w).valid
    assert replay_by_hand(w)
    # shuffling the level numbers out of order breaks the replay
    if w.max_level >= 2:
        flipped = Witness(c, {t: (w.max_level + 1 - n if n else 0) for t, n in w.marking.items()})
        assert validate_witness(flipped).valid == replay_by_hand(flipped)


def test_refutation_of_g2():
    g2 = fixtures.load("g2")
    cycle = lee_refutation(g2)
    assert sorted(cycle) == [("Y1", "a", "Y2"), ("Y2", "b", "Y1")]
    assert lee_refutation(fixtures.load("fig5")) is None


@given(seeds)
def test_refutation_never_hits_llee_charts(seed):
    c, _ = gen_llee_onechart(GenParams(seed=seed, max_size=20))
    assert lee_refutation(c) is None


@settings(max_examples=60)
@given(seeds)
def test_refuted_charts_defeat_the_search(seed):
    c = gen_chart(GenParams(seed=seed, empty_step_density=0.3), n_vertices=6, density=0.3)
    cycle = lee_refutation(c)
    if cycle is None:
        return
    assert all(t in c.transitions for t in cycle)
    assert [t[2] for t in cycle] == [t[0] for t in cycle[1:] + cycle[:1]]
    outcome = search_witness(c, budget=100_000, layered=False)
    assert outcome.witness is None and not outcome.exhausted
