import random

import pytest

from inetc import (
    AgentPort,
    FreePort,
    InteractionRule,
    Net,
    Redex,
    RedexSet,
    RuleSet,
    apply_rule,
    iso_equal,
    undo_delta,
    update_redexes,
    validate_net,
    validate_rule,
    validate_ruleset,
)
from inetc.errors import RedexStale
from inetc.rules import SIDE_ALPHA, SIDE_BETA, LhsPort, update_redexes_undo

from gen_nets import add_rules, add_sig, addition_net, complete_ruleset, random_net, sig5


def one_sig():
    from inetc import Signature

    sig = Signature()
    sig.declare("A", 1)
    sig.declare("E", 2)
    return sig


def wire_through_rule(sig, name="aa"):
    """A >< A rewrites to nothing, splicing the two aux peers together."""
    return InteractionRule(
        name=name, lhs=("A", "A"), rhs=Net(sig),
        mapping=[(LhsPort(SIDE_ALPHA, 1), LhsPort(SIDE_BETA, 1))],
    )


def the_redex(net):
    pairs = net.find_active_pairs()
    assert len(pairs) == 1
    return pairs[0]


# -- validation --------------------------------------------------------------


def test_validate_addition_rules():
    sig = add_sig()
    rs = add_rules(sig)
    report = validate_ruleset(sig, rs)
    assert report.ok, report.violations


def test_validate_rule_rejects_rhs_free_ports():
    sig = one_sig()
    rhs = Net(sig)
    a = rhs.add_agent("A")
    rhs.connect(AgentPort(a, 0), FreePort("x"))
    rule = InteractionRule(
        name="bad", lhs=("A", "A"), rhs=rhs,
        mapping=[(LhsPort(SIDE_ALPHA, 1), LhsPort(SIDE_BETA, 1))],
    )
    codes = {v.code for v in validate_rule(sig, rule).violations}
    assert "RhsFreePorts" in codes
    assert "DanglingRhsPort" in codes  # a.1 is neither wired nor mapped


def test_validate_rule_coverage_codes():
    sig = one_sig()
    rule = InteractionRule(name="bad", lhs=("A", "A"), rhs=Net(sig), mapping=[])
    codes = {v.code for v in validate_rule(sig, rule).violations}
    assert "UnmappedInterfacePort" in codes

    rule = InteractionRule(
        name="bad2", lhs=("A", "A"), rhs=Net(sig),
        mapping=[
            (LhsPort(SIDE_ALPHA, 1), LhsPort(SIDE_BETA, 1)),
            (LhsPort(SIDE_ALPHA, 1), LhsPort(SIDE_BETA, 1)),
        ],
    )
    codes = {v.code for v in validate_rule(sig, rule).violations}
    assert "DuplicateMapping" in codes

    rule = InteractionRule(
        name="bad3", lhs=("A", "A"), rhs=Net(sig),
        mapping=[
            (LhsPort(SIDE_ALPHA, 1), LhsPort(SIDE_BETA, 1)),
            (LhsPort(SIDE_ALPHA, 2), LhsPort(SIDE_BETA, 9)),
        ],
    )
    codes = {v.code for v in validate_rule(sig, rule).violations}
    assert "BadLhsPort" in codes

    rule = InteractionRule(
        name="bad4", lhs=("A", "A"), rhs=Net(sig),
        mapping=[
            (LhsPort(SIDE_ALPHA, 1), AgentPort(5, 0)),
            (LhsPort(SIDE_BETA, 1), LhsPort(SIDE_BETA, 1)),
        ],
    )
    codes = {v.code for v in validate_rule(sig, rule).violations}
    assert "BadRhsRef" in codes


def test_validate_rule_rhs_port_conflicts():
    sig = one_sig()
    rhs = Net(sig)
    a = rhs.add_agent("A")
    rhs.connect(AgentPort(a, 0), AgentPort(a, 1))
    rule = InteractionRule(
        name="bad", lhs=("A", "A"), rhs=rhs,
        mapping=[
            (LhsPort(SIDE_ALPHA, 1), AgentPort(a, 0)),  # also wired
            (LhsPort(SIDE_BETA, 1), LhsPort(SIDE_BETA, 1)),  # degenerate but covers
        ],
    )
    codes = {v.code for v in validate_rule(sig, rule).violations}
    assert "RhsPortConflict" in codes


def test_validate_ruleset_duplicates():
    sig = one_sig()
    r1 = wire_through_rule(sig, "one")
    r2 = wire_through_rule(sig, "two")
    report = validate_ruleset(sig, RuleSet([r1, r2]))
    assert any(v.code == "DuplicatePair" for v in report.violations)

    e_rhs = Net(sig)
    r3 = InteractionRule(
        name="one", lhs=("A", "E"), rhs=e_rhs,
        mapping=[
            (LhsPort(SIDE_ALPHA, 1), LhsPort(SIDE_BETA, 1)),
            (LhsPort(SIDE_BETA, 2), LhsPort(SIDE_BETA, 2)),
        ],
    )
    report = validate_ruleset(sig, RuleSet([r1, r3]))
    assert any(v.code == "DuplicateRuleName" for v in report.violations)


def test_ruleset_lookup_is_unordered():
    sig = add_sig()
    rs = add_rules(sig)
    assert rs.for_pair("S", "Add").name == "addS"
    assert rs.for_pair("Add", "S").name == "addS"
    assert rs.for_pair("S", "S") is None
    assert rs.get("addZ").name == "addZ"
    assert rs.get("mul") is None


# -- application -------------------------------------------------------------


def test_apply_addition_step_structure():
    sig = add_sig()
    rs = add_rules(sig)
    net = addition_net(sig, 1, 0)
    delta = apply_rule(net, the_redex(net), rs.get("addS"))
    assert delta.rule_name == "addS"
    assert validate_net(net).ok
    # one S and one Add were created, add+S consumed
    assert sorted(net.agents.values()) == ["Add", "S", "Z", "Z"]
    # exactly one new active pair: the fresh Add against the inner Z
    assert len(net.find_active_pairs()) == 1

    delta2 = apply_rule(net, the_redex(net), rs.get("addZ"))
    assert delta2.rule_name == "addZ"
    assert net.is_normal_form()
    assert sorted(net.agents.values()) == ["S", "Z"]
    assert net.interface() == ["out"]


def test_apply_orientation_swap():
    """The same rule fires no matter which side holds the smaller agent id."""
    sig = add_sig()
    rs = add_rules(sig)

    expected = None
    for order in ("add_first", "chain_first"):
        net = Net(sig)
        net.declare_free("out")
        if order == "add_first":
            add = net.add_agent("Add")
            s = net.add_agent("S")
            z = net.add_agent("Z")
        else:
            s = net.add_agent("S")
            z = net.add_agent("Z")
            add = net.add_agent("Add")
        net.connect(AgentPort(s, 1), AgentPort(z, 0))
        net.connect(AgentPort(add, 0), AgentPort(s, 0))
        net.connect(AgentPort(add, 1), FreePort("y"))
        net.connect(AgentPort(add, 2), FreePort("out"))
        apply_rule(net, the_redex(net), rs.get("addS"))
        assert validate_net(net).ok
        if expected is None:
            expected = net
        else:
            assert iso_equal(expected, net)


def test_apply_same_symbol_rule_orients_alpha_to_smaller_id():
    sig = one_sig()
    # E >< E: alpha keeps its aux ports in order, beta crossed
    rhs = Net(sig)
    rule = InteractionRule(
        name="ee", lhs=("E", "E"), rhs=rhs,
        mapping=[
            (LhsPort(SIDE_ALPHA, 1), LhsPort(SIDE_BETA, 2)),
            (LhsPort(SIDE_ALPHA, 2), LhsPort(SIDE_BETA, 1)),
        ],
    )
    net = Net(sig)
    e1 = net.add_agent("E")
    e2 = net.add_agent("E")
    net.connect(AgentPort(e1, 0), AgentPort(e2, 0))
    for i, name in ((1, "a1"), (2, "a2")):
        net.connect(AgentPort(e1, i), FreePort(name))
    for i, name in ((1, "b1"), (2, "b2")):
        net.connect(AgentPort(e2, i), FreePort(name))
    apply_rule(net, the_redex(net), rule)
    # alpha = e1 (smaller id): a1 joins b2 and a2 joins b1
    assert net.peer(FreePort("a1")) == FreePort("b2")
    assert net.peer(FreePort("a2")) == FreePort("b1")


def test_apply_splices_chains_through_empty_rhs():
    sig = one_sig()
    rule = wire_through_rule(sig)
    net = Net(sig)
    a1 = net.add_agent("A")
    a2 = net.add_agent("A")
    net.connect(AgentPort(a1, 0), AgentPort(a2, 0))
    net.connect(AgentPort(a1, 1), FreePort("x"))
    net.connect(AgentPort(a2, 1), FreePort("y"))
    apply_rule(net, the_redex(net), rule)
    assert net.agents == {}
    assert net.peer(FreePort("x")) == FreePort("y")
    assert net.interface() == ["x", "y"]


def test_apply_drops_vicious_circle():
    sig = one_sig()
    rule = wire_through_rule(sig)
    net = Net(sig)
    a1 = net.add_agent("A")
    a2 = net.add_agent("A")
    net.connect(AgentPort(a1, 0), AgentPort(a2, 0))
    net.connect(AgentPort(a1, 1), AgentPort(a2, 1))  # closes the circle
    apply_rule(net, the_redex(net), rule)
    assert net.agents == {}
    assert net.edges == {}
    assert validate_net(net).ok


def test_apply_handles_dangling_aux_port():
    sig = one_sig()
    rule = wire_through_rule(sig)
    net = Net(sig)
    a1 = net.add_agent("A")
    a2 = net.add_agent("A")
    net.connect(AgentPort(a1, 0), AgentPort(a2, 0))
    net.connect(AgentPort(a2, 1), FreePort("y"))
    # a1.1 dangles; after the rewrite y has no peer
    apply_rule(net, the_redex(net), rule)
    assert net.agents == {}
    assert net.edge_at(FreePort("y")) is None
    assert net.interface() == ["y"]


def test_apply_stale_redex_raises():
    sig = add_sig()
    rs = add_rules(sig)
    net = addition_net(sig, 1, 0)
    redex = the_redex(net)
    net.disconnect(redex.edge)
    with pytest.raises(RedexStale):
        apply_rule(net, redex, rs.get("addS"))

    net2 = addition_net(sig, 1, 0)
    real = the_redex(net2)
    fake = Redex(edge=real.edge, left_agent=real.left_agent,
                 right_agent=real.right_agent + 40, symbols=real.symbols)
    with pytest.raises(RedexStale):
        apply_rule(net2, fake, rs.get("addS"))


def test_apply_preserves_selections_of_survivors():
    sig = add_sig()
    rs = add_rules(sig)
    net = addition_net(sig, 2, 1)
    redex = the_redex(net)
    survivors = set(net.agents) - {redex.left_agent, redex.right_agent}
    net.select("keep", survivors)
    net.select("gone", {redex.left_agent})
    delta = apply_rule(net, redex, rs.get("addS"))
    created = {aid for aid, _ in delta.added_agents}
    # consumed members drop out; created agents join selections that lost one
    assert net.selections["keep"] == survivors
    assert net.selections["gone"] == created


# -- undo --------------------------------------------------------------------


def test_undo_restores_structure_and_counters():
    rng = random.Random(11)
    sig = sig5()
    for _ in range(30):
        rules = complete_ruleset(rng, sig)
        net = random_net(rng, sig, rng.randint(4, 12))
        pairs = net.find_active_pairs()
        if not pairs:
            continue
        before = net.structure()
        ids_before = (net.next_agent_id, net.next_edge_id)
        redex = rng.choice(pairs)
        rule = rules.for_pair(*redex.symbols)
        delta = apply_rule(net, redex, rule)
        undo_delta(net, delta)
        assert net.structure() == before
        assert (net.next_agent_id, net.next_edge_id) == ids_before
        assert validate_net(net).ok


def test_undo_restores_redex_set():
    rng = random.Random(12)
    sig = sig5()
    net = random_net(rng, sig, 10, redex_bias=3)
    rules = complete_ruleset(rng, sig)
    redexes = RedexSet.from_net(net)
    baseline = {r.edge for r in redexes.as_sorted_list()}
    pairs = net.find_active_pairs()
    assert pairs
    redex = pairs[0]
    delta = apply_rule(net, redex, rules.for_pair(*redex.symbols))
    update_redexes(redexes, delta, net)
    undo_delta(net, delta)
    update_redexes_undo(redexes, delta, net)
    assert {r.edge for r in redexes.as_sorted_list()} == baseline


# -- incremental redex tracking ----------------------------------------------


def test_redexset_matches_rescan_over_random_walk():
    rng = random.Random(13)
    sig = sig5()
    for _ in range(20):
        rules = complete_ruleset(rng, sig, max_rhs=2)
        net = random_net(rng, sig, 10, redex_bias=3)
        redexes = RedexSet.from_net(net)
        for _ in range(25):
            live = net.find_active_pairs()
            assert {r.edge for r in redexes.as_sorted_list()} == {r.edge for r in live}
            if not live:
                break
            redex = rng.choice(live)
            delta = apply_rule(net, redex, rules.for_pair(*redex.symbols))
            update_redexes(redexes, delta, net)


def test_smallest_picks_min_agent_pair_and_respects_region():
    sig = one_sig()
    net = Net(sig)
    a1 = net.add_agent("A")
    a2 = net.add_agent("A")
    a3 = net.add_agent("A")
    a4 = net.add_agent("A")
    net.connect(AgentPort(a1, 0), AgentPort(a2, 0))
    net.connect(AgentPort(a3, 0), AgentPort(a4, 0))
    redexes = RedexSet.from_net(net)
    best = redexes.smallest("A", "A")
    assert (best.left_agent, best.right_agent) == (a1, a2)
    regional = redexes.smallest("A", "A", region={a3, a4})
    assert (regional.left_agent, regional.right_agent) == (a3, a4)
    assert redexes.smallest("A", "E") is None
    # region containing only one endpoint does not match
    assert redexes.smallest("A", "A", region={a1, a3}) is None
