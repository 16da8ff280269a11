# tests/test_flitsim.py
import itertools

import pytest

from flitsim.livelock import escape_trials, network_livelock, router_livelock
from flitsim.metrics import collect, measure, wilson_interval
from flitsim.network import FlitNetwork
from flitsim.traffic import NAMED_STUDY_PATTERNS, PATTERNS, make_pattern, map_address
from topology import build_topology, min_node_hops
from validators.errors import InadmissiblePattern

# ========================
# TRAFFIC PATTERNS
# ========================

@pytest.mark.parametrize("kind,addr,n,expected", [
    ("bitcomp", 5, 32, 26),
    ("bitcomp", 0, 8, 7),
    ("tornado", 0, 8, 3),
    ("tornado", 0, 6, 2),
    ("shuffle", 0b011, 8, 0b110),
    ("shuffle", 0b100, 8, 0b001),
    ("transpose", 0b0001, 16, 0b0100),
    ("best", 0b001, 8, 0b100),
])
def test_map_address(kind, addr, n, expected):
    assert map_address(kind, addr, n) == expected


@pytest.mark.parametrize("kind", ["tornado", "bitcomp", "shuffle", "transpose", "best"])
def test_permutations_are_bijections(kind):
    assert sorted(map_address(kind, a, 32) for a in range(32)) == list(range(32))


def test_study_patterns_are_known():
    assert set(NAMED_STUDY_PATTERNS) <= set(PATTERNS)


def test_uniform_generation_is_seeded():
    first = make_pattern("uniform", 8, 0.5, seed=3)
    second = make_pattern("uniform", 8, 0.5, seed=3)
    assert [first.generate() for _ in range(20)] == [second.generate() for _ in range(20)]


def test_full_rate_injects_every_source():
    pattern = make_pattern("bitcomp", 8, 1.0)
    assert pattern.generate() == [(s, 9 - s) for s in range(1, 9)]


def test_worst_pattern_uses_first_stage_groups():
    topo = build_topology("butterfly4")
    pattern = make_pattern("worst", 4, 1.0, seed=0, topology=topo)
    assert set(pattern.destination_distribution(1)) == {1, 2}
    assert set(pattern.destination_distribution(3)) == {3, 4}


@pytest.mark.parametrize("kwargs", [
    {"kind": "fixed", "n_endpoints": 4, "rate": 1.0, "mapping": {1: 2, 3: 2}},
    {"kind": "fixed", "n_endpoints": 4, "rate": 1.0, "mapping": {1: 5}},
    {"kind": "fixed", "n_endpoints": 4, "rate": 1.0, "mapping": {}},
    {"kind": "bitcomp", "n_endpoints": 6, "rate": 0.5},
])
def test_inadmissible_patterns(kwargs):
    with pytest.raises(InadmissiblePattern):
        make_pattern(**kwargs)


def test_fixed_pattern_at_half_rate_is_admissible():
    pattern = make_pattern("fixed", 4, 0.5, mapping={1: 2, 3: 2})
    assert list(pattern.sources()) == [1, 3]


@pytest.mark.parametrize("kind,rate", [("zipf", 0.5), ("uniform", 1.5)])
def test_invalid_pattern_arguments(kind, rate):
    with pytest.raises(ValueError):
        make_pattern(kind, 8, rate)


# ========================
# NETWORK
# ========================

class TestFlitNetwork:
    def test_single_packet_crosses_butterfly_in_one_epoch(self):
        net = FlitNetwork(build_topology("butterfly4"), record_paths=True)
        flit = net.offer(1, 3)
        events = net.step()
        assert [e["event"] for e in events] == ["inject", "deliver"]
        assert flit.deliver_epoch == 0
        assert flit.hops == 2
        assert flit.path == ["s0e0", "s1e1"]

    def test_mesh_hop_takes_an_epoch_per_node(self):
        net = FlitNetwork(build_topology("mesh8"), record_paths=True)
        flit = net.offer(1, 8)
        net.run(5)
        assert flit.deliver_epoch == 2
        assert flit.hops == 3
        assert flit.path == ["0,0", "0,1", "1,1"]

    def test_conservation_under_load(self):
        net = FlitNetwork(build_topology("mesh8"), seed=1)
        pattern = make_pattern("uniform", 8, 0.7, seed=1)
        for _ in range(300):
            net.step(pattern)
            assert net.is_conserved()
        assert net.totals["delivered"] > 0

    def test_retire_instead_of_reinject(self):
        net = FlitNetwork(build_topology("butterfly4"), reinject=False)
        net.offer(1, 2)
        net.offer(3, 2)
        events = net.step()
        kinds = sorted(e["event"] for e in events)
        assert kinds == ["deflect", "deliver", "inject", "inject", "retire"]
        assert net.totals["retired"] == 1
        assert net.is_conserved()

    def test_misdelivered_packet_is_reinjected(self):
        net = FlitNetwork(build_topology("butterfly4"))
        net.offer(1, 2)
        loser = net.offer(3, 2)
        net.run(3)
        assert loser.reinjections == 1
        assert loser.deliver_epoch == 1

    @pytest.mark.parametrize("rand_source", ["rng", "lfsr"])
    def test_randomized_runs_are_reproducible(self, rand_source):
        def trace(seed):
            net = FlitNetwork(build_topology("butterfly4", policy="randomized_rr"), seed=seed,
                              rand_source=rand_source)
            pattern = make_pattern("uniform", 4, 0.8, seed=seed)
            return [net.step(pattern) for _ in range(50)]

        assert trace(4) == trace(4)

    def test_unknown_rand_source(self):
        with pytest.raises(ValueError, match="rand_source"):
            FlitNetwork(build_topology("router2"), rand_source="thermal")

    def test_policy_override(self):
        net = FlitNetwork(build_topology("butterfly4"), policy="fixed_priority")
        assert {r.cfg.policy.value for r in net.routers.values()} == {"fixed_priority"}


# ========================
# METRICS
# ========================

def test_wilson_interval():
    assert wilson_interval(0, 0) == (0.0, 1.0)
    low, high = wilson_interval(50, 100)
    assert low < 0.5 < high
    assert wilson_interval(0, 100)[0] == pytest.approx(0.0)


def test_conflict_free_pattern_delivers_everything():
    net = FlitNetwork(build_topology("butterfly4"))
    metrics = measure(net, make_pattern("best", 4, 1.0), warmup=10, sample_epochs=100)
    assert metrics.deflection_prob == 0.0
    assert metrics.worst_endpoint_fraction == 1.0
    assert metrics.accepted_load == 1.0
    assert metrics.latency_p99 == 0.0
    assert metrics.epochs == 100


def test_uniform_measurement_fields():
    net = FlitNetwork(build_topology("mesh8"), seed=2)
    metrics = measure(net, make_pattern("uniform", 8, 0.4, seed=2), warmup=50, sample_epochs=400)
    assert metrics.deflection_ci_low <= metrics.deflection_prob <= metrics.deflection_ci_high
    assert metrics.per_hop[0]["hop"] == 1
    assert metrics.throughput_bps_per_port > 0
    assert set(metrics.endpoint_fractions) == set(range(1, 9))
    row = metrics.as_row()
    assert "per_hop" not in row and row["pattern"] == "uniform"


def test_measure_rejects_bad_window():
    net = FlitNetwork(build_topology("router2"))
    with pytest.raises(ValueError, match="warmup"):
        measure(net, make_pattern("uniform", 2, 0.5), warmup=10, sample_epochs=10)


def test_collect_on_scripted_run():
    net = FlitNetwork(build_topology("butterfly4"))
    net.offer(2, 4)
    net.step()
    metrics = collect(net)
    assert metrics.pattern == "scripted"
    assert metrics.delivered == 1


# ========================
# LIVELOCK
# ========================

def test_round_robin_livelocks():
    result = router_livelock("round_robin", max_epochs=1000)
    assert not result.delivered
    assert result.deflections == result.attempts == 500


def test_fixed_priority_serves_victim():
    result = router_livelock("fixed_priority", max_epochs=100)
    assert result.delivered and result.delivered_epoch == 0


def test_no_adversary_no_livelock():
    assert router_livelock("round_robin", max_epochs=100, adversary=False).delivered


def test_randomized_round_robin_escapes():
    results = escape_trials("randomized_rr", trials=100, max_epochs=10_000, rand_q=0.25)
    assert all(r.delivered for r in results)
    assert len({r.delivered_epoch for r in results}) > 1


def test_router_livelock_oldest_age_is_the_victim():
    result = router_livelock("round_robin", max_epochs=40)
    assert result.oldest_age_max == result.victim_age == 40
    assert result.oldest_age_mean == pytest.approx(20.5)


def test_network_livelock_idle_network():
    result = network_livelock(build_topology("butterfly4"), victim=(1, 4))
    assert result.delivered and result.delivered_epoch == 0
    assert (result.attempts, result.deflections, result.hops) == (1, 0, 2)
    assert result.oldest_age_max == result.victim_age == 1


def test_network_livelock_accepts_network_or_topology():
    topo = build_topology("butterfly4")
    flows = [(2, 2), (3, 2)]
    built = network_livelock(topo, victim=(1, 2), background=flows, max_epochs=60, seed=3)
    given = network_livelock(FlitNetwork(build_topology("butterfly4"), seed=3), victim=(1, 2),
                             background=flows, max_epochs=60)
    assert built == given
    assert built.victim_age <= 60
    assert built.oldest_age_max >= built.victim_age
    assert built.policy == "round_robin"


def test_network_livelock_on_mesh_with_retirement():
    net = FlitNetwork(build_topology("mesh8"), reinject=False)
    result = network_livelock(net, victim=(2, 3), background=[(3, 3)], max_epochs=20)
    assert result.attempts == 1
    assert result.delivered or result.deflections >= 1
    assert net.is_conserved()


def test_network_livelock_rejects_empty_run():
    with pytest.raises(ValueError, match="max_epochs"):
        network_livelock(build_topology("router2"), victim=(1, 2), max_epochs=0)


# ========================
# DEFLECTION RATES
# ========================

def test_saturated_uniform_router_deflects_a_quarter():
    net = FlitNetwork(build_topology("router2"), reinject=False)
    metrics = measure(net, make_pattern("uniform", 2, 1.0, seed=5), warmup=100, sample_epochs=20000)
    assert metrics.deflection_prob == pytest.approx(0.25, abs=0.01)


def test_worst_case_butterfly_per_hop_deflections():
    topo = build_topology("butterfly4")
    net = FlitNetwork(topo, reinject=False)
    pattern = make_pattern("worst", 4, 1.0, seed=2, topology=topo)
    metrics = measure(net, pattern, warmup=100, sample_epochs=20000)
    by_hop = {row["hop"]: row["prob"] for row in metrics.per_hop}
    assert by_hop[1] == pytest.approx(0.5)
    assert by_hop[2] == pytest.approx(0.25, abs=0.02)


@pytest.mark.parametrize("topology", ["cmesh32", "bfly32"])
@pytest.mark.parametrize("kind", NAMED_STUDY_PATTERNS)
def test_study_patterns_on_large_networks(topology, kind):
    net = FlitNetwork(build_topology(topology), seed=1)
    metrics = measure(net, make_pattern(kind, 32, 0.3, seed=1), warmup=20, sample_epochs=200)
    assert net.is_conserved()
    assert metrics.delivered > 0
    assert metrics.throughput_bps_per_port > 0


def test_single_mesh_deflection_costs_two_hops():
    topo = build_topology("mesh8")
    checked = 0
    for (s1, s2), d1, d2 in itertools.product(itertools.combinations(range(1, 9), 2), range(1, 9), range(1, 9)):
        net = FlitNetwork(topo, reinject=False)
        flits = [net.offer(s1, d1), net.offer(s2, d2)]
        net.run(10)
        assert net.is_conserved()
        for flit in flits:
            if flit.deliver_epoch is not None and flit.deflections == 1:
                assert flit.hops == min_node_hops(topo, flit.src, flit.dst) + 2, (s1, d1, s2, d2)
                checked += 1
    assert checked > 0
