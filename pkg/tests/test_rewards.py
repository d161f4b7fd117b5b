"""Reward formula oracles and per-path reward list semantics.

Expected values here are frozen independently (hand arithmetic) before being
compared against the implementation; tolerances cover only IEEE rounding.
"""

import math

import pytest

from rlroute.network import TrafficDemand
from rlroute.rewards import (
    DEFAULT_WEIGHTS,
    HopQoSRecord,
    QoSWeights,
    global_reward,
    global_rewards_for_path,
    local_reward,
    local_rewards_for_path,
    make_weights,
    reward_hop,
    reward_intensity,
    reward_reliability,
    reward_transmission,
    reward_utilization,
)


def record(hop_index=1, src=0, dst=1, sender=50e6, receiver=50e6, incoming=0.0,
           max_bw=10e6, used=0.0, rel=1.0, lost=False):
    return HopQoSRecord(
        hop_index=hop_index,
        src_id=src,
        dst_id=dst,
        sender_processing_rate=sender,
        receiver_processing_rate=receiver,
        receiver_incoming_traffic=incoming,
        link_max_bandwidth=max_bw,
        link_used_bandwidth=used,
        link_reliability=rel,
        has_lost=lost,
    )


class TestTermFormulas:
    def test_hop_is_reciprocal_of_hop_index(self):
        assert reward_hop(1) == 1.0
        assert reward_hop(4) == 0.25

    def test_transmission_is_scaled_arctangent(self):
        assert reward_transmission(50) == pytest.approx(0.9873, abs=5e-5)
        assert reward_transmission(0) == 0.0
        # Saturates toward 1 as the sender gets faster.
        assert reward_transmission(10) < reward_transmission(1000) < 1.0

    def test_reliability_is_identity(self):
        assert reward_reliability(0.95) == 0.95

    def test_intensity_current_and_estimated(self):
        assert reward_intensity(5, 50) == 0.9
        assert reward_intensity(5, 50, 0.5) == 0.89

    def test_intensity_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            reward_intensity(5, 0)
        with pytest.raises(ValueError):
            reward_intensity(5, 50, -1.0)

    def test_utilization_current_and_estimated(self):
        assert reward_utilization(5, 10) == 0.5
        assert reward_utilization(5, 10, 0.5) == pytest.approx(0.45, abs=1e-12)

    def test_intensity_can_go_negative_when_overloaded(self):
        assert reward_intensity(60, 50) < 0
        assert reward_utilization(12, 10) < 0


class TestWeights:
    def test_default_constants(self):
        assert DEFAULT_WEIGHTS.local_constant == 5.1
        assert DEFAULT_WEIGHTS.global_constant == 3.0

    def test_global_constant_ignores_hop_and_transmission(self):
        w = make_weights(7.0, 3.0, 1.0, 1.0, 1.0)
        assert w.global_constant == 3.0
        assert w.local_constant == pytest.approx(13.1)

    def test_rejects_negative_weight(self):
        with pytest.raises(ValueError):
            make_weights(1, 1, -0.1, 1, 1)

    def test_zero_weights_allowed(self):
        w = make_weights(0, 0, 0, 0, 1)
        assert w.local_constant == pytest.approx(1.1)
        assert w.global_constant == 1.0


class TestCompositeRewards:
    # Shared scenario: hop 4, 50 Mb/s sender, reliability 0.95, receiver at
    # 5 of 50 Mb/s incoming, link at 5 of 10 Mb/s, demand adds 0.5 Mb/s.
    def scenario(self):
        return record(hop_index=4, incoming=5e6, used=5e6, rel=0.95)

    def test_local_uses_estimated_forms(self):
        # 0.25 + 0.98727 + 0.95 + 0.89 + 0.45 - 5.1
        value = local_reward(self.scenario(), DEFAULT_WEIGHTS, 0.5e6)
        assert value == pytest.approx(-1.57273, abs=1e-4)

    def test_global_uses_current_forms(self):
        # 0.95 + 0.9 + 0.5 - 3.0
        value = global_reward(self.scenario(), DEFAULT_WEIGHTS)
        assert value == pytest.approx(-0.65, abs=1e-12)

    def test_local_success_never_beats_negative_margin(self):
        # Perfect hop: every term at its maximum still lands 0.1 below zero.
        perfect = record(hop_index=1, sender=1e12)
        assert local_reward(perfect, DEFAULT_WEIGHTS, 1.0) <= -0.1

    def test_global_reward_of_perfect_hop_is_zero(self):
        perfect = record(rel=1.0, incoming=0.0, used=0.0)
        assert global_reward(perfect, DEFAULT_WEIGHTS) == 0.0

    def test_weights_scale_terms(self):
        only_util = make_weights(0, 0, 0, 0, 1)
        value = local_reward(record(used=5e6, max_bw=10e6), only_util, 0.5e6)
        assert value == pytest.approx(0.45 - 1.1, abs=1e-12)


class TestRewardLists:
    def demand(self):
        return TrafficDemand(0, 2, 0.5e6)

    def reaching_records(self):
        return [
            record(hop_index=1, src=0, dst=1),
            record(hop_index=2, src=1, dst=2),
        ]

    def test_successful_path_all_actions_succeed(self):
        rewards = local_rewards_for_path(self.reaching_records(), DEFAULT_WEIGHTS, self.demand())
        assert [r.action_success for r in rewards] == [True, True]
        assert [(r.src_id, r.dst_id) for r in rewards] == [(0, 1), (1, 2)]
        assert all(r.value <= -0.1 for r in rewards)

    def test_dead_end_fails_locally_but_not_globally(self):
        # Ends at node 3, demand destination is 2, nothing lost.
        records = [record(hop_index=1, src=0, dst=1), record(hop_index=2, src=1, dst=3)]
        local = local_rewards_for_path(records, DEFAULT_WEIGHTS, self.demand())
        glob = global_rewards_for_path(records, DEFAULT_WEIGHTS)
        assert local[-1].action_success is False
        assert local[-1].value == -DEFAULT_WEIGHTS.local_constant
        assert glob[-1].action_success is True

    def test_lost_packet_fails_both(self):
        records = [record(hop_index=1, src=0, dst=1), record(hop_index=2, src=1, dst=2, lost=True)]
        local = local_rewards_for_path(records, DEFAULT_WEIGHTS, self.demand())
        glob = global_rewards_for_path(records, DEFAULT_WEIGHTS)
        assert local[-1].value == -DEFAULT_WEIGHTS.local_constant
        assert glob[-1].action_success is False
        assert glob[-1].value == -DEFAULT_WEIGHTS.global_constant

    def test_global_success_values_nonpositive(self):
        glob = global_rewards_for_path(self.reaching_records(), DEFAULT_WEIGHTS)
        assert all(r.value <= 0 for r in glob)

    def test_loss_only_allowed_on_last_record(self):
        records = [record(hop_index=1, src=0, dst=1, lost=True), record(hop_index=2, src=1, dst=2)]
        with pytest.raises(ValueError):
            local_rewards_for_path(records, DEFAULT_WEIGHTS, self.demand())

    def test_empty_records_rejected(self):
        with pytest.raises(ValueError):
            local_rewards_for_path([], DEFAULT_WEIGHTS, self.demand())

    def test_transmission_term_reads_rate_in_mbps(self):
        # Sender at 50 Mb/s must score like atan(50), not atan(5e7).
        w = make_weights(0, 1, 0, 0, 0)
        value = local_reward(record(sender=50e6), w, 1.0)
        assert value == pytest.approx(math.atan(50) * 2 / math.pi - 1.1, abs=1e-12)


class TestRecordValidation:
    def test_hop_index_must_be_positive(self):
        with pytest.raises(ValueError):
            record(hop_index=0)

    def test_reliability_bounds(self):
        with pytest.raises(ValueError):
            record(rel=1.2)
