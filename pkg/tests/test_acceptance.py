"""End-to-end acceptance suite.

Each test covers one advertised guarantee and prints a PASS/FAIL line in
the terminal summary (see conftest).  Oracles are computed independently
of the engine under test: plain integer arithmetic for addition, full
rescans for incremental tracking, structural snapshots for purity.
"""

import random
import time
from itertools import combinations
from pathlib import Path

import pytest

from gen_nets import (
    add_rules,
    add_sig,
    addition_net,
    church,
    complete_ruleset,
    net_with_redexes,
    sig5,
)
from test_strategy import two_gadget_net
from test_trace import check_tree
from inetc import (
    AgentPort,
    AllSel,
    Apply,
    Fail,
    Location,
    Net,
    Or,
    Par,
    RedexSet,
    Seq,
    Star,
    apply_redex,
    apply_rule,
    elaborate,
    eval_strategy,
    explore,
    iso_equal,
    new_document,
    parse_document,
    parse_strategy,
    run_strategy,
    update_redexes,
)
from inetc.errors import DocumentError, ParseError, ResolveError
from inetc.net import FreePort

ALL = Location(AllSel(), -1)

# every rewrite made through checked_apply asserts interface preservation;
# the dedicated criterion below then confirms the check actually ran
INTERFACE_CHECKED = 0


def checked_apply(net, redex, rules):
    global INTERFACE_CHECKED
    rule = rules.for_pair(*redex.symbols)
    assert rule is not None
    before = list(net.free_ports)
    delta = apply_rule(net, redex, rule)
    assert list(net.free_ports) == before
    INTERFACE_CHECKED += 1
    return delta


def reduce_random(rng, net, rules):
    """Uniformly random maximal reduction; returns the step count."""
    steps = 0
    while True:
        redexes = net.find_active_pairs()
        if not redexes:
            return steps
        checked_apply(net, rng.choice(redexes), rules)
        steps += 1
        assert steps <= 10_000


def ref_add(n, m):
    # recursive oracle, no engine involvement
    if n == 0:
        return m
    return ref_add(n - 1, m) + 1


def church_out(sig, k):
    net = Net(sig)
    net.connect(church(net, k), FreePort("out"))
    return net


@pytest.mark.acceptance("unary addition end-to-end (n,m <= 20)")
def test_addition_end_to_end():
    sig = add_sig()
    rules = add_rules(sig)
    expr = elaborate(parse_strategy("(addS or addZ)*(all,-1)"))
    t0 = time.perf_counter()
    for n in range(21):
        for m in range(21):
            net = addition_net(sig, n, m)
            outcome = eval_strategy(net, RedexSet.from_net(net), rules, expr)
            assert outcome.ok, (n, m)
            assert len(outcome.steps) == n + 1, (n, m)
            assert net.is_normal_form()
            assert list(net.free_ports) == ["out"]
            assert iso_equal(net, church_out(sig, ref_add(n, m))), (n, m)
    assert time.perf_counter() - t0 < 1.0


@pytest.mark.acceptance("diamond property on 500 random nets")
def test_diamond_property():
    rng = random.Random(20260822)
    sig = sig5()
    rules = complete_ruleset(rng, sig)
    t0 = time.perf_counter()
    pairs_checked = 0
    for _ in range(500):
        net = net_with_redexes(rng, sig, rng.randint(4, 10), 2)
        redexes = net.find_active_pairs()
        assert len(redexes) >= 2
        for r1, r2 in combinations(redexes, 2):
            one = net.copy()
            checked_apply(one, one.redex_of_edge(r1.edge), rules)
            residual = one.redex_of_edge(r2.edge)
            assert residual is not None
            checked_apply(one, residual, rules)

            other = net.copy()
            checked_apply(other, other.redex_of_edge(r2.edge), rules)
            residual = other.redex_of_edge(r1.edge)
            assert residual is not None
            checked_apply(other, residual, rules)

            assert iso_equal(one, other)
            pairs_checked += 1
    assert pairs_checked >= 500
    assert time.perf_counter() - t0 < 30.0


@pytest.mark.acceptance("permutation equivalence (100 nets x 10 orders)")
def test_permutation_equivalence():
    rng = random.Random(31337)
    sig = sig5()
    rules = complete_ruleset(rng, sig, decreasing=True)
    for _ in range(100):
        net = net_with_redexes(rng, sig, rng.randint(3, 8), 1)
        first_net = None
        first_len = None
        for _ in range(10):
            work = net.copy()
            length = reduce_random(rng, work, rules)
            assert work.is_normal_form()
            if first_net is None:
                first_net, first_len = work, length
            else:
                assert length == first_len
                assert iso_equal(work, first_net)


@pytest.mark.acceptance("incremental redex tracking matches rescan (1000+ steps)")
def test_incremental_redexes_match_rescan():
    rng = random.Random(404)
    sig = sig5()
    rules = complete_ruleset(rng, sig)
    checked = 0
    while checked < 1200:
        net = net_with_redexes(rng, sig, rng.randint(3, 10), 1)
        rs = RedexSet.from_net(net)
        for _ in range(rng.randint(1, 30)):
            live = rs.as_sorted_list()
            if not live:
                break
            redex = rng.choice(live)
            delta = checked_apply(net, redex, rules)
            update_redexes(rs, delta, net)
            incremental = {(r.edge, r.pair_key) for r in rs.as_sorted_list()}
            rescan = {(r.edge, r.pair_key) for r in net.find_active_pairs()}
            assert incremental == rescan
            checked += 1
    assert checked >= 1000


@pytest.mark.acceptance("interface preserved by every rewrite")
def test_interface_preservation():
    rng = random.Random(55)
    sig = sig5()
    rules = complete_ruleset(rng, sig)
    local = 0
    nets = 0
    while local < 300:
        nets += 1
        assert nets < 2000
        net = net_with_redexes(rng, sig, rng.randint(3, 9), 1)
        for _ in range(rng.randint(5, 30)):
            redexes = net.find_active_pairs()
            if not redexes:
                break
            checked_apply(net, rng.choice(redexes), rules)
            local += 1
    assert local >= 300
    # the same assertion guarded every rewrite in the suites above
    assert INTERFACE_CHECKED >= local


def snapshot(net, rs):
    return (
        net.structure(),
        net.next_agent_id,
        net.next_edge_id,
        [(r.edge, r.pair_key) for r in rs.as_sorted_list()],
    )


@pytest.mark.acceptance("strategy semantics: purity, par vs seq, rollback, composite")
def test_strategy_semantics():
    rng = random.Random(777)
    sig = sig5()
    rules = complete_ruleset(rng, sig)
    rule_names = sorted(rules.by_name)

    # (a) failure purity on 200+ failing evaluations
    failures = 0
    attempts = 0
    while failures < 200:
        attempts += 1
        assert attempts < 5000
        net = net_with_redexes(rng, sig, rng.randint(2, 8), 1)
        rs = RedexSet.from_net(net)
        name = rng.choice(rule_names)
        expr = rng.choice([
            Seq(Apply(name, ALL), Fail()),
            Par(Apply(name, ALL), Apply(name, ALL)),
            Seq(Apply(name, ALL), Seq(Apply(rng.choice(rule_names), ALL), Fail())),
            Or(Fail(), Apply(name, ALL)),
        ])
        before = snapshot(net, rs)
        outcome = eval_strategy(net, rs, rules, elaborate(expr))
        if outcome.ok:
            continue
        assert snapshot(net, rs) == before
        failures += 1

    # (b) par == seq in both orders on disjoint matches
    add_sigma = add_sig()
    arules = add_rules(add_sigma)
    for _ in range(100):
        base = two_gadget_net(add_sigma, rng.randint(2, 4))
        results = []
        for expr in (
            Par(Apply("addS", ALL), Apply("addZ", ALL)),
            Seq(Apply("addS", ALL), Apply("addZ", ALL)),
            Seq(Apply("addZ", ALL), Apply("addS", ALL)),
        ):
            work = base.copy()
            outcome = eval_strategy(work, RedexSet.from_net(work), arules,
                                    elaborate(expr))
            assert outcome.ok
            assert len(outcome.steps) == 2
            results.append(work)
        assert iso_equal(results[0], results[1])
        assert iso_equal(results[1], results[2])

    # (c) a failing sequence rolls back its committed prefix
    net = addition_net(add_sigma, 2, 1)
    rs = RedexSet.from_net(net)
    before = snapshot(net, rs)
    outcome = eval_strategy(net, rs, arules,
                            elaborate(parse_strategy("(addS; fail)(all,-1)")))
    assert outcome.status == "failure"
    assert snapshot(net, rs) == before

    # (d) compound located expression parses, elaborates, runs
    src = """
    signature { Z: 0; S: 1; Add: 2; }
    rule R1 : Z >< Add { rhs { } map L.Add.1 -> L.Add.2; }
    rule R2 : S >< Add {
      rhs { s : S; a : Add; wire s.1 - a.2; }
      map L.S.1 -> a.0; map L.Add.1 -> a.1; map L.Add.2 -> s.0;
    }
    rule R3 : Z >< S { rhs { z : Z; } map L.S.1 -> z.0; }
    net main {
      s1 : S; add : Add;
      free i; free x; free y;
      wire s1.0 - add.0;
      wire s1.1 - free i;
      wire add.1 - free x;
      wire add.2 - free y;
    }
    named sub1 { s1; add; }
    strategy s = (R1 or R2);R3*[interface(sub1),0];
    """
    doc = parse_document(src)
    elaborate(doc.strategies["s"])
    status, path = run_strategy(doc, 0, "s")
    assert status == "success"
    assert len(path) == 1
    assert doc.trace.edges[path[0]][1].steps[0][0] == "R2"


@pytest.mark.acceptance("trace contract and invariants (1000 mixed ops)")
def test_trace_contract():
    sig = add_sig()
    rules = add_rules(sig)

    # a node with k rule-covered redexes explores to exactly k children
    net = two_gadget_net(sig, 2)
    u1 = net.add_agent("Z")
    u2 = net.add_agent("Z")
    net.connect(AgentPort(u1, 0), AgentPort(u2, 0))
    doc = new_document(sig, rules, {}, net)
    covered = {
        (rules.for_pair(*r.symbols).name, (r.left_agent, r.right_agent))
        for r in net.find_active_pairs()
        if rules.for_pair(*r.symbols) is not None
    }
    assert len(net.find_active_pairs()) == len(covered) + 1
    children = explore(doc, 0)
    assert len(children) == len(covered) == 2
    labels = {
        (doc.trace.edges[c][1].steps[0][0], doc.trace.edges[c][1].steps[0][1])
        for c in children
    }
    assert labels == covered

    # invariants survive a long mixed workload
    rng = random.Random(99)
    go = Star(Or(Apply("addS", ALL), Apply("addZ", ALL)))
    doc = new_document(sig, rules, {"go": go}, addition_net(sig, 4, 3))
    ops = 0
    while ops < 1000:
        node = rng.choice(sorted(doc.trace.nodes))
        roll = rng.random()
        if roll < 0.45:
            explore(doc, node)
        elif roll < 0.8:
            redexes = doc.trace.nodes[node].find_active_pairs()
            if redexes:
                apply_redex(doc, node, rng.choice(redexes).edge)
        else:
            run_strategy(doc, node, "go")
        ops += 1
    check_tree(doc)


FIXTURES = sorted(Path(__file__).parent.glob("fixtures/*.inet"))


def mutate(rng, text):
    chars = list(text)
    for _ in range(rng.randint(1, 8)):
        if not chars:
            break
        kind = rng.random()
        pos = rng.randrange(len(chars))
        if kind < 0.35:
            del chars[pos]
        elif kind < 0.7:
            chars.insert(pos, rng.choice("{}()[];.:->< \nabQRZwxyz0123456789*|,"))
        else:
            a, b = rng.randrange(len(chars)), rng.randrange(len(chars))
            chars[a], chars[b] = chars[b], chars[a]
    return "".join(chars)


@pytest.mark.acceptance("parser round-trip fixpoint and 10k-input fuzz")
def test_parser_robustness():
    from inetc import print_document

    assert len(FIXTURES) >= 20
    corpus = []
    for path in FIXTURES:
        doc = parse_document(path.read_text())
        text = print_document(doc)
        assert print_document(parse_document(text)) == text, path.name
        corpus.append(path.read_text())

    rng = random.Random(802701)
    outcomes = {"ok": 0, "diagnosed": 0}
    for i in range(10_000):
        if i % 10 == 0:
            text = "".join(rng.choice("{}();.:->< \nabwxyzSZR0123456789*|,\"'\\")
                           for _ in range(rng.randint(0, 120)))
        else:
            text = mutate(rng, rng.choice(corpus))
        try:
            parse_document(text)
            outcomes["ok"] += 1
        except (ParseError, ResolveError, DocumentError):
            outcomes["diagnosed"] += 1
    assert outcomes["ok"] + outcomes["diagnosed"] == 10_000
    assert outcomes["diagnosed"] > 0


@pytest.mark.acceptance("throughput: 100k+ steps fully normalize under 10 s")
def test_throughput():
    sig = add_sig()
    rules = add_rules(sig)
    n, m = 100_000, 3
    net = addition_net(sig, n, m)
    rs = RedexSet.from_net(net)
    expr = elaborate(Star(Or(Apply("addS", ALL), Apply("addZ", ALL))))

    t0 = time.perf_counter()
    outcome = eval_strategy(net, rs, rules, expr, max_steps=200_000)
    elapsed = time.perf_counter() - t0

    assert outcome.ok
    assert len(outcome.steps) == n + 1 >= 100_000
    assert net.is_normal_form()
    symbols = sorted(net.agents.values())
    assert symbols.count("S") == n + m
    assert symbols.count("Z") == 1
    assert list(net.free_ports) == ["out"]
    assert elapsed < 10.0, f"normalization took {elapsed:.2f}s"
