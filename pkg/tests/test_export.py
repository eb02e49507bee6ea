import json
import random

import pytest

from gen_nets import add_rules, add_sig, addition_net, net_with_redexes, sig5, complete_ruleset
from inetc import (
    AgentPort,
    AllSel,
    Apply,
    FreePort,
    Location,
    Net,
    Par,
    Star,
    Or,
    export_dot,
    export_trace_json,
    iso_equal,
    net_from_json,
    net_to_json,
    net_to_obj,
    new_document,
    run_strategy,
    trace_to_obj,
)
from inetc.errors import ResolveError

ALL = Location(AllSel(), -1)


def gapped_net():
    """Net with a hole in the id sequence and every endpoint flavour."""
    sig = add_sig()
    net = Net(sig)
    a = net.add_agent("Add")
    victim = net.add_agent("Z")
    z = net.add_agent("Z")
    net.delete_agent(victim)
    net.connect(AgentPort(a, 0), AgentPort(z, 0))
    net.connect(AgentPort(a, 1), FreePort("in"))
    net.declare_free("loose")
    net.connect(FreePort("out"), AgentPort(a, 2))
    net.select("grp", {a})
    return net


def test_net_json_roundtrip_exact():
    net = gapped_net()
    back = net_from_json(net_to_json(net), net.signature)
    assert back.agents == net.agents
    assert back.free_ports == net.free_ports
    assert back.selections == net.selections
    assert back.structure() == net.structure()
    assert back.next_agent_id > max(back.agents)


def test_net_json_free_free_edge():
    sig = add_sig()
    net = Net(sig)
    net.connect(FreePort("a"), FreePort("b"))
    back = net_from_json(net_to_json(net), sig)
    assert back.structure() == net.structure()


def test_net_json_loop_edge():
    sig = add_sig()
    net = Net(sig)
    a = net.add_agent("Add")
    net.connect(AgentPort(a, 1), AgentPort(a, 2))
    net.connect(AgentPort(a, 0), FreePort("o"))
    back = net_from_json(net_to_json(net), sig)
    assert back.structure() == net.structure()


def test_net_json_random_roundtrip():
    rng = random.Random(7)
    sig = sig5()
    for _ in range(30):
        net = net_with_redexes(rng, sig, rng.randint(2, 12), 1)
        back = net_from_json(net_to_json(net), sig)
        assert back.agents == net.agents
        assert back.structure() == net.structure()
        assert iso_equal(back, net)


def test_net_json_insertion_order_independent():
    sig = add_sig()
    x = Net(sig)
    a = x.add_agent("Add")
    z = x.add_agent("Z")
    x.connect(AgentPort(a, 0), AgentPort(z, 0))
    x.connect(AgentPort(a, 1), FreePort("p"))
    x.connect(AgentPort(a, 2), FreePort("q"))

    y = Net(sig)
    y.declare_free("p")
    y.declare_free("q")
    a2 = y.add_agent("Add")
    z2 = y.add_agent("Z")
    y.connect(FreePort("q"), AgentPort(a2, 2))
    y.connect(AgentPort(z2, 0), AgentPort(a2, 0))
    y.connect(AgentPort(a2, 1), FreePort("p"))

    assert net_to_json(x) == net_to_json(y)
    assert export_dot(x) == export_dot(y)


@pytest.mark.parametrize(
    "text",
    [
        "not json",
        "[1, 2]",
        "{}",
        '{"agents": 3, "edges": []}',
        '{"agents": [{"id": "x"}], "edges": []}',
        '{"agents": [], "edges": [[{"agent": 0, "port": 0}]]}',
    ],
)
def test_net_json_bad_input(text):
    with pytest.raises(ResolveError) as err:
        net_from_json(text, add_sig())
    assert err.value.code == "BadJson"


def test_net_json_duplicate_id():
    text = json.dumps(
        {
            "agents": [{"id": 0, "symbol": "Z"}, {"id": 0, "symbol": "Z"}],
            "edges": [],
        }
    )
    with pytest.raises(ResolveError) as err:
        net_from_json(text, add_sig())
    assert err.value.code == "DuplicateAgentId"


def test_net_json_unknown_symbol():
    text = json.dumps({"agents": [{"id": 0, "symbol": "Nope"}], "edges": []})
    with pytest.raises(ResolveError) as err:
        net_from_json(text, add_sig())
    assert err.value.code == "UnknownSymbol"


# -- DOT ---------------------------------------------------------------------


def test_dot_empty_net():
    net = Net(add_sig())
    assert export_dot(net) == "digraph inet {\n  rankdir=LR;\n}\n"


def test_dot_marks_principal_ports():
    sig = add_sig()
    net = Net(sig)
    a = net.add_agent("Add")
    z = net.add_agent("Z")
    net.connect(AgentPort(a, 0), AgentPort(z, 0))
    net.connect(AgentPort(a, 1), FreePort("x"))
    net.connect(AgentPort(a, 2), FreePort("y"))
    out = export_dot(net)
    redex_lines = [l for l in out.splitlines() if "arrowtail=normal, arrowhead=normal" in l]
    assert len(redex_lines) == 1
    assert "a0 -> a1" in redex_lines[0]
    assert '  fp_x [shape=box, label="x"];' in out
    assert 'a0 [label="a0:Add"]' in out
    # aux-to-free edges keep unmarked tails
    assert out.count("arrowhead=none") == 2


def test_dot_deterministic_bytes():
    rng = random.Random(11)
    net = net_with_redexes(rng, sig5(), 10, 2)
    assert export_dot(net) == export_dot(net)
    assert export_dot(net.copy()) == export_dot(net)


# -- trace JSON --------------------------------------------------------------


def make_doc(n, m):
    sig = add_sig()
    rules = add_rules(sig)
    go = Star(Or(Apply("addS", ALL), Apply("addZ", ALL)))
    return new_document(sig, rules, {"go": go}, addition_net(sig, n, m))


def test_trace_json_schema():
    doc = make_doc(2, 1)
    status, path = run_strategy(doc, 0, "go")
    assert status == "success" and len(path) == 3
    obj = trace_to_obj(doc)
    assert obj["root"] == 0
    assert set(obj["nodes"]) == {"0", "1", "2", "3"}
    for nid, net_obj in obj["nodes"].items():
        assert set(net_obj) == {"agents", "edges", "free", "selections"}
    assert [e["from"] for e in obj["edges"]] == [0, 1, 2]
    assert [e["to"] for e in obj["edges"]] == [1, 2, 3]
    for e in obj["edges"]:
        assert set(e) == {"from", "to", "rule", "agents", "strategy"}
        assert e["strategy"] == "go"
        assert len(e["agents"]) == 2
    assert [e["rule"] for e in obj["edges"]] == ["addS", "addS", "addZ"]
    # the document text is valid JSON and stable
    text = export_trace_json(doc)
    assert json.loads(text) == obj
    assert export_trace_json(doc) == text


def par_doc():
    sig = add_sig()
    rules = add_rules(sig)
    net = Net(sig)
    a = net.add_agent("Add")
    z = net.add_agent("Z")
    net.connect(AgentPort(a, 0), AgentPort(z, 0))
    net.connect(AgentPort(a, 1), FreePort("x"))
    net.connect(AgentPort(a, 2), FreePort("y"))
    b = net.add_agent("Add")
    s = net.add_agent("S")
    net.connect(AgentPort(b, 0), AgentPort(s, 0))
    net.connect(AgentPort(s, 1), FreePort("t"))
    net.connect(AgentPort(b, 1), FreePort("u"))
    net.connect(AgentPort(b, 2), FreePort("v"))
    return new_document(sig, rules, {}, net), (a, z, b, s)


def test_trace_json_par_group():
    doc, (a, z, b, s) = par_doc()
    expr = Par(Apply("addS", ALL), Apply("addZ", ALL))
    status, path = run_strategy(doc, 0, expr)
    assert status == "success" and len(path) == 1
    obj = trace_to_obj(doc)
    (edge,) = obj["edges"]
    assert edge["rule"] == "addS||addZ"
    assert sorted(edge["agents"]) == sorted([b, s, a, z])
    assert edge["strategy"] is None
