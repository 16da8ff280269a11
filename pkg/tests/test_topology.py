# tests/test_topology.py
import logging

import pytest

from packet.epoch import EpochConfig, Packet
from router.behavioral import Policy
from topology import (
    NAMED_TOPOLOGIES,
    PUBLISHED_BUTTERFLY4_JJ,
    build_butterfly,
    build_mesh,
    build_topology,
    closest_configuration,
    jj_count,
    min_node_hops,
    router_jj,
    to_dot,
    topology_size,
)
from topology.endpoints import EndpointQueue
from topology.mesh import dor_port, node_ports
from topology.model import ROUTER_PD_PS
from topology.pulsenet import PulseNetwork, check_pulse_geometry, retimer_budget
from validators.errors import InvalidGeometry, InvalidSize


def walk(topo, src, dst):
    """Follow each router's own request for ``dst``; returns (endpoint, retimed links crossed)."""
    elem, _port = topo.injection[src]
    retimed = 0
    for _ in range(10 * len(topo.elements)):
        out = 0 if topo.elements[elem].cfg.requests_top(dst) else 1
        link = topo.links[(elem, out)]
        if link.kind == "endpoint":
            return link.target, retimed
        retimed += link.delay
        elem = link.target
    raise AssertionError(f"no endpoint reached from {src} for {dst}")


# ========================
# BUTTERFLY
# ========================

@pytest.mark.parametrize("k", [2, 4, 8, 16])
def test_butterfly_shape_and_destination_tags(k):
    topo = build_butterfly(k)
    assert len(topo.elements) == (k // 2) * topo.stages_per_node
    assert 2 ** topo.stages_per_node == k
    for src in range(1, k + 1):
        for dst in range(1, k + 1):
            assert walk(topo, src, dst) == (dst, 0)


def test_butterfly4_thresholds():
    topo = build_butterfly(4)
    assert {name: topo.element(name).cfg.thr_slot for name in "ABCD"} == {"A": 2, "B": 2, "C": 1, "D": 3}
    assert topo.element("C").top_destinations == frozenset({1})


def test_butterfly_rand_bit_positions_distinct():
    topo = build_butterfly(8, policy="randomized_rr")
    positions = [e.rand_bit_position for e in topo.order]
    assert positions == [i % 8 for i in range(12)]
    assert all(e.cfg.policy is Policy.RANDOMIZED_RR for e in topo.order)


@pytest.mark.parametrize("k,ecfg", [
    (3, None),
    (1, None),
    (4, EpochConfig(num_destinations=2)),
])
def test_butterfly_invalid_size(k, ecfg):
    with pytest.raises(InvalidSize):
        build_butterfly(k, ecfg)


def test_butterfly_schedule_offsets():
    topo = build_butterfly(4)
    offsets = topo.control_offsets()
    assert offsets[topo.aliases["A"]] == 0
    assert offsets[topo.aliases["C"]] == ROUTER_PD_PS
    assert topo.propagation_delay == 2 * ROUTER_PD_PS
    assert topo.first_stage_groups() == [[1, 2], [3, 4]]


# ========================
# MESH
# ========================

def test_mesh8_shape():
    topo = build_topology("mesh8")
    assert topo.n_endpoints == 8
    assert len(topo.elements) == 16
    assert topo.retimers == 8
    assert topo.meta["node_radix"] == 4
    assert topo.stages_per_node == 2


def test_mesh_node_ports_order():
    assert node_ports(2, 2, 2, (0, 0)) == {"L0": 0, "L1": 1, "S": 2, "E": 3}
    assert node_ports(2, 2, 2, (1, 1)) == {"L0": 0, "L1": 1, "N": 2, "W": 3}


def test_dimension_order_goes_x_first():
    # endpoint 8 lives on node (1, 1); from (0, 0) go east first
    assert dor_port(2, 2, 2, (0, 0), 8) == 3
    assert dor_port(2, 2, 2, (0, 1), 8) == 2
    assert dor_port(2, 2, 2, (1, 1), 8) == 1


@pytest.mark.parametrize("name", ["mesh8", "cmesh32"])
def test_mesh_routes_every_pair_minimally(name):
    topo = build_topology(name)
    for src in range(1, topo.n_endpoints + 1):
        for dst in range(1, topo.n_endpoints + 1):
            endpoint, retimed = walk(topo, src, dst)
            assert endpoint == dst
            assert retimed + 1 == min_node_hops(topo, src, dst)


@pytest.mark.parametrize("args,ecfg", [
    ((1, 1, 2), None),
    ((2, 2, 0), None),
    ((2, 2, 2), EpochConfig(num_destinations=4)),
    ((2, 2, 2), EpochConfig(num_destinations=8, control_slot=15, data_period=0)),
])
def test_mesh_invalid_geometry(args, ecfg):
    with pytest.raises(InvalidGeometry):
        build_mesh(*args, epoch_cfg=ecfg)


def test_retimer_sizing():
    topo = build_topology("mesh8", data_period=300)
    assert topo.epoch_cfg.epoch == 840
    assert topo.retimer_delay_ps == 840 - 2 * ROUTER_PD_PS
    assert topo.retimer_stages == 28


# ========================
# AREA
# ========================

def test_router_jj_per_policy():
    assert router_jj(Policy.ROUND_ROBIN) == 481
    assert router_jj(Policy.RANDOMIZED_RR) == 505
    assert router_jj(Policy.FIXED_PRIORITY) < 481


def test_butterfly4_area_matches_published():
    manifest = jj_count(build_topology("butterfly4"))
    assert manifest["total_with_retimers"] == PUBLISHED_BUTTERFLY4_JJ
    assert manifest["retimer_jj"] == 0


def test_mesh8_area():
    manifest = jj_count(build_topology("mesh8", data_period=300))
    assert manifest["router_jj"] == 16 * 481
    assert manifest["jj_per_retimer"] == 58
    assert manifest["total_with_retimers"] == 8160
    assert manifest["total_without_retimers"] == 7696
    assert 5.0 <= manifest["retimer_share_percent"] <= 30.0


def test_closest_configuration_to_published_mesh():
    best = closest_configuration(lambda dp: build_topology("mesh8", data_period=dp))
    assert best["data_period_ps"] == 60
    assert best["delta"] == -8


def test_closest_configuration_without_candidates():
    with pytest.raises(InvalidGeometry):
        closest_configuration(lambda dp: build_topology("mesh8", control_slot=15, data_period=dp), data_periods=[0])


# ========================
# NAMED TOPOLOGIES / EXPORT
# ========================

@pytest.mark.parametrize("name,size", [("router2", 2), ("butterfly4", 4), ("bfly32", 32), ("mesh8", 8),
                                       ("cmesh32", 32)])
def test_named_sizes(name, size):
    assert topology_size(name) == size
    assert build_topology(name).n_endpoints == size


def test_unknown_topology():
    with pytest.raises(ValueError, match="Invalid value for 'topology'"):
        build_topology("torus9")
    assert "torus9" not in NAMED_TOPOLOGIES


def test_dot_export():
    text = to_dot(build_topology("mesh8"))
    assert text.startswith('digraph "mesh8"')
    assert "style=dashed" in text
    assert "dashed" not in to_dot(build_topology("butterfly4"))


# ========================
# ENDPOINT QUEUES
# ========================

class TestEndpointQueue:
    def test_reinjection_served_first(self):
        q = EndpointQueue(1)
        q.offer("fresh")
        q.reinject("bounced")
        assert q.next_packet() == "bounced"
        assert q.next_packet() == "fresh"
        assert q.next_packet() is None

    def test_source_first_when_configured(self):
        q = EndpointQueue(1, reinject_first=False)
        q.reinject("bounced")
        q.offer("fresh")
        assert q.next_packet() == "fresh"

    def test_high_water_warning(self, caplog):
        q = EndpointQueue(3, warn_at=2)
        with caplog.at_level(logging.WARNING):
            for i in range(3):
                q.offer(i)
        assert q.high_water == 3
        assert len(q) == 3
        assert sum("queue reached" in r.message for r in caplog.records) == 1


# ========================
# PULSE-LEVEL NETWORK
# ========================

class TestPulseNetwork:
    def test_butterfly_area_is_the_router_sum(self):
        net = PulseNetwork(build_topology("butterfly4"))
        assert net.retimers == []
        assert net.jj_report()["total"] == sum(jj["total"] for jj in net.jj_routers.values())
        assert set(net.offsets.values()) == {0, net.pd_b}
        assert net.exits == {1: 1, 2: 1, 3: 1, 4: 1}

    def test_mesh_links_are_retimed(self):
        net = PulseNetwork(build_topology("mesh8", data_period=600))
        assert len(net.retimers) == 8
        assert net.jj_report()["retimer"] > 0
        assert len(net.jj_routers) == 16

    def test_packets_cross_butterfly(self):
        net = PulseNetwork(build_topology("butterfly4"))
        to_3, to_1 = Packet(3, {1, 4}), Packet(1, {2})
        assert net.run([{1: to_3, 3: to_1}, {}]) == [{3: to_3, 1: to_1}, {}]

    def test_mesh_packet_takes_an_epoch_per_node(self):
        net = PulseNetwork(build_topology("mesh8", data_period=600))
        pkt = Packet(8, {3})
        assert net.run([{1: pkt}, {}, {}]) == [{}, {}, {8: pkt}]

    def test_runs_are_independent(self):
        net = PulseNetwork(build_topology("butterfly4"))
        pkt = Packet(2, {5})
        first = net.run([{4: pkt}])
        assert net.run([{4: pkt}]) == first == [{2: pkt}]

    @pytest.mark.parametrize("name,kwargs,match", [
        ("cmesh32", {}, "limited to 8 endpoints"),
        ("bfly32", {}, "limited to 8 endpoints"),
        ("mesh8", {"data_period": 300}, None),
        ("mesh8", {"data_period": 600, "control_slot": 50}, None),
    ])
    def test_unsupported_geometry(self, name, kwargs, match):
        topo = build_topology(name, **kwargs)
        with pytest.raises(InvalidGeometry, match=match):
            check_pulse_geometry(topo)
        with pytest.raises(InvalidGeometry, match=match):
            PulseNetwork(topo)

    def test_retimer_budget(self):
        assert retimer_budget(1200, 1, 1, 0, 214) == 1200 - 2 * 214
        assert retimer_budget(1200, 1, 0, 1, 214) == 1200
