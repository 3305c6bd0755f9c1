import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import count_netlist
from spicenet.spice import (
    ArityError,
    Component,
    ComponentKind,
    Netlist,
    NetlistStats,
    Polarity,
    UnknownPrefix,
    UnsupportedDirective,
    canonicalize,
    netlist_stats,
    parse_netlist,
    serialize_netlist,
)


def test_parse_resistor():
    n = parse_netlist("R1 in out 1k")
    assert n.components == (
        Component("R1", ComponentKind.RESISTOR, (("pos", "in"), ("neg", "out")), value="1k"),
    )


def test_three_node_mosfet_gets_bulk_from_source():
    (m,) = parse_netlist("M1 d g s NMOS").components
    assert m.kind is ComponentKind.MOSFET
    assert m.terminals == (("drain", "d"), ("gate", "g"), ("source", "s"), ("bulk", "s"))
    assert m.model == "NMOS"
    assert m.polarity is Polarity.N


def test_four_node_mosfet():
    (m,) = parse_netlist("M2 d g s b PMOS W=1u").components
    assert m.net("bulk") == "b"
    assert m.model == "PMOS" and m.value == "W=1u"
    assert m.polarity is Polarity.P


def test_three_node_mosfet_with_params():
    (m,) = parse_netlist("M1 d g s NMOS W=1u L=1u").components
    assert m.net("bulk") == "s"
    assert m.value == "W=1u L=1u"


def test_comment_and_end_only():
    n = parse_netlist("* comment only\n.end")
    assert n.components == ()
    assert n.directives == (".end",)
    assert n.comments == ("* comment only",)


def test_empty_input_is_empty_netlist():
    assert parse_netlist("") == Netlist()
    assert parse_netlist("\n  \n") == Netlist()


@pytest.mark.parametrize(
    "line, kind",
    [
        ("C1 a b 1p", ComponentKind.CAPACITOR),
        ("l1 a b 1n", ComponentKind.INDUCTOR),
        ("Q1 c b e NPN", ComponentKind.BJT),
        ("D1 a k DMOD", ComponentKind.DIODE),
        ("V1 a 0 5", ComponentKind.VOLTAGE_SOURCE),
        ("V1 a 0 AC 1", ComponentKind.AC_SOURCE),
        ("V1 a 0 dc 1.8", ComponentKind.DC_SOURCE),
        ("VBAT3 a 0 9", ComponentKind.BATTERY),
        ("I1 a 0 1m", ComponentKind.CURRENT_SOURCE),
    ],
)
def test_kinds(line, kind):
    assert parse_netlist(line).components[0].kind is kind


def test_continuation_lines_are_joined():
    n = parse_netlist("R1 a\n+ b\n+ 2k\n")
    assert n.components[0].nets == ("a", "b")
    assert n.components[0].value == "2k"


def test_title_directive():
    assert parse_netlist(".title amp\nR1 a 0").title == "amp"


@pytest.mark.parametrize("text", ["X1 a b sub", "K1 L1 L2 0.9", "E1 a 0 b 0 10"])
def test_unknown_prefix(text):
    with pytest.raises(UnknownPrefix):
        parse_netlist(text)


@pytest.mark.parametrize("text", ["R1 a", "M1 d g", "Q1 c b"])
def test_arity(text):
    with pytest.raises(ArityError):
        parse_netlist(text)


def test_subckt_rejected():
    with pytest.raises(UnsupportedDirective):
        parse_netlist(".subckt inv a y\nM1 y a 0 NMOS\n.ends")


def test_error_reports_line_number():
    with pytest.raises(UnknownPrefix, match="line 2"):
        parse_netlist("R1 a 0\nZ1 a 0")


def test_serialize_identity():
    assert serialize_netlist(parse_netlist("R1 in out 1k")) == "R1 in out 1k\n"


def test_serialize_three_node_mosfet():
    text = serialize_netlist(parse_netlist("M1 d g s s NMOS"))
    assert text == "M1 d g s NMOS\n"
    assert parse_netlist(text) == parse_netlist("M1 d g s NMOS")


def test_serialize_four_node_mode():
    n = parse_netlist("M1 d g s NMOS")
    assert serialize_netlist(n, mosfet_nodes="4") == "M1 d g s s NMOS\n"


def test_ambiguous_value_keeps_bulk_explicit():
    n = parse_netlist("M1 d g s s NMOS 2")
    assert parse_netlist(serialize_netlist(n)) == n


def test_serialize_empty():
    assert serialize_netlist(Netlist()) == ""
    assert serialize_netlist(Netlist(directives=(".end",))) == ".end\n"


def test_stats_rc():
    s = netlist_stats(parse_netlist("V1 in 0\nR1 in out\nC1 out 0"))
    assert s == NetlistStats(3, 3, 0, 3)


def test_stats_empty():
    assert netlist_stats(Netlist()) == NetlistStats(0, 0, 0, 0)


def test_stats_two_mosfets():
    s = netlist_stats(parse_netlist("M1 d g 0 NMOS\nM2 d g 0 NMOS"))
    assert s == NetlistStats(2, 3, 2, 2)


def test_canonicalize_ground_alias():
    n = canonicalize(parse_netlist("r1 a gnd"))
    assert serialize_netlist(n) == "R1 a 0\n"


def test_canonicalize_orders_by_kind_then_name():
    n = canonicalize(parse_netlist("C2 a 0\nR1 a 0"))
    assert [c.name for c in n.components] == ["R1", "C2"]


def test_canonicalize_custom_aliases():
    n = canonicalize(parse_netlist("R1 a vss"), ground_aliases={"VSS"})
    assert n.components[0].nets == ("a", "0")


def test_corpus_stats_match_independent_count(corpus, data_dir):
    frozen = json.loads((data_dir / "corpus_stats.json").read_text())
    assert set(frozen) == set(corpus)
    for name, text in corpus.items():
        assert count_netlist(text) == frozen[name], name
        assert netlist_stats(parse_netlist(text)).as_dict() == frozen[name], name


def test_corpus_covers_every_kind(corpus):
    kinds = {c.kind for text in corpus.values() for c in parse_netlist(text).components}
    assert kinds == set(ComponentKind) - {ComponentKind.GROUND}
    assert any("0" in parse_netlist(t).nets for t in corpus.values())


# -- properties ---------------------------------------------------------------

net_names = st.sampled_from(["0", "gnd", "GND", "a", "b", "out", "vdd", "n1", "x_2"])
values = st.sampled_from([None, "1k", "10p", "2.2u", "W=1u L=1u"])


@st.composite
def component_lines(draw):
    letter = draw(st.sampled_from("RCLMQDVI"))
    name = letter + draw(st.from_regex(r"[0-9][0-9A-Za-z_]{0,3}", fullmatch=True))
    if letter == "M":
        nodes = [draw(net_names) for _ in range(draw(st.sampled_from([3, 4])))]
        model = draw(st.sampled_from(["NMOS", "PMOS", "nch"]))
        params = draw(st.sampled_from(["", "W=1u", "W=2u L=180n"]))
        return " ".join([name, *nodes, model, params]).strip()
    if letter == "Q":
        return " ".join([name, *[draw(net_names) for _ in range(3)], draw(st.sampled_from(["NPN", "PNP"]))])
    if letter == "D":
        return f"{name} {draw(net_names)} {draw(net_names)} DMOD"
    value = draw(st.sampled_from(["1k", "10p", "AC 1", "DC 1.8", "5"]))
    return f"{name} {draw(net_names)} {draw(net_names)} {value}"


spice_sources = st.lists(
    st.one_of(component_lines(), st.sampled_from(["* note", ".end", ".model NMOS nmos", ".op"])),
    max_size=12,
).map("\n".join)


@given(spice_sources)
def test_roundtrip_property(text):
    n = parse_netlist(text)
    once = serialize_netlist(n)
    again = parse_netlist(once)
    assert again == n
    assert serialize_netlist(again) == once


@given(spice_sources)
def test_canonicalize_idempotent(text):
    c = canonicalize(parse_netlist(text))
    assert canonicalize(c) == c


@given(spice_sources)
def test_num_nodes_is_union_of_terminal_nets(text):
    n = parse_netlist(text)
    nets = set()
    for c in n.components:
        nets |= {net for _, net in c.terminals}
    assert netlist_stats(n).num_nodes == len(nets)


@given(spice_sources)
def test_no_component_line_dropped(text):
    lines = [ln for ln in text.splitlines() if ln.strip() and ln.strip()[0] not in "*."]
    assert len(parse_netlist(text).components) == len(lines)
    s = netlist_stats(parse_netlist(text))
    assert 0 <= s.num_mosfets <= s.num_components
