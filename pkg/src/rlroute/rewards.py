"""Pure reward arithmetic for QoS-aware path learning.

Five per-factor rewards, each capped at 1 for admissible inputs:

    hop reward          1 / hop_index
    transmission reward (2/pi) * atan(sender processing rate in Mb/s)
    reliability reward  the link's reliability fraction
    intensity reward    1 - (receiver incoming traffic + extra) / receiver rate
    utilization reward  1 - (link used bandwidth + extra) / link max bandwidth

The "extra" term switches intensity/utilization between their current form
(extra = 0) and their estimated form (extra = the demand's traffic rate).

Composite rewards subtract a weight-derived normalizer so that every
successfully performed action scores negative:

    local reward   = Wc*hop + Wt*trans + Wr*rel + Wi*inten_est + Wu*util_est
                     - (Wc + Wt + Wr + Wi + Wu + 0.1)
    global reward  = Wr*rel + Wi*inten + Wu*util - (Wr + Wi + Wu)

Local rewards drive per-demand action selection with user weights and the
estimated forms; global rewards describe network status with the framework
default weights and the current forms. Rates in records are bits/s; only the
transmission reward reads its argument numerically in Mb/s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .network import TrafficDemand

# One megabit per second, in bits/s; the transmission reward's unit scale.
MBPS = 1.0e6

# Margin added to the local normalizer so successful local rewards are <= -0.1.
LOCAL_MARGIN = 0.1


@dataclass(frozen=True)
class QoSWeights:
    """Nonnegative weights for the five QoS factors, plus derived constants."""

    hop_count: float
    transmission: float
    reliability: float
    intensity: float
    utilization: float

    def __post_init__(self) -> None:
        for name in ("hop_count", "transmission", "reliability", "intensity", "utilization"):
            if getattr(self, name) < 0:
                raise ValueError(f"weight {name} must be >= 0, got {getattr(self, name)}")

    @property
    def local_constant(self) -> float:
        """Normalizer for local rewards: sum of all weights plus 0.1."""
        return (
            self.hop_count
            + self.transmission
            + self.reliability
            + self.intensity
            + self.utilization
            + LOCAL_MARGIN
        )

    @property
    def global_constant(self) -> float:
        """Normalizer for global rewards: reliability + intensity + utilization."""
        return self.reliability + self.intensity + self.utilization


def make_weights(
    wc: float, wt: float, wr: float, wi: float, wu: float
) -> QoSWeights:
    """Build QoSWeights from the five factor weights, in the conventional
    order: hop count, transmission, reliability, intensity, utilization."""
    return QoSWeights(wc, wt, wr, wi, wu)


# Framework default weights, used for every global-table update.
DEFAULT_WEIGHTS = make_weights(1.0, 1.0, 1.0, 1.0, 1.0)


@dataclass(frozen=True)
class HopQoSRecord:
    """Per-hop observation returned by the data plane for action src->dst.

    hop_index is the 1-based position of the hop in the performed sequence.
    Rates are bits/s. has_lost marks the hop where the packet was lost; only
    the last record of an execution may carry it.
    """

    hop_index: int
    src_id: int
    dst_id: int
    sender_processing_rate: float
    receiver_processing_rate: float
    receiver_incoming_traffic: float
    link_max_bandwidth: float
    link_used_bandwidth: float
    link_reliability: float
    has_lost: bool = False

    def __post_init__(self) -> None:
        if self.hop_index < 1:
            raise ValueError(f"hop_index must be >= 1, got {self.hop_index}")
        for name in (
            "sender_processing_rate",
            "receiver_processing_rate",
            "receiver_incoming_traffic",
            "link_max_bandwidth",
            "link_used_bandwidth",
        ):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")
        if not 0.0 <= self.link_reliability <= 1.0:
            raise ValueError(f"link_reliability {self.link_reliability} outside [0, 1]")


@dataclass(frozen=True)
class RewardRecord:
    """One action's reward: the (state, action) node pair, whether the action
    counts as successfully performed, and the reward value."""

    src_id: int
    dst_id: int
    action_success: bool
    value: float


def reward_hop(hop_index: int) -> float:
    """Hop-position reward, 1/hop_index; in (0, 1]."""
    if hop_index < 1:
        raise ValueError(f"hop_index must be >= 1, got {hop_index}")
    return 1.0 / hop_index


def reward_transmission(sender_rate_mbps: float) -> float:
    """Transmission-delay reward, (2/pi)*atan(rate); the argument is the
    sending node's processing rate expressed numerically in Mb/s."""
    if sender_rate_mbps < 0:
        raise ValueError(f"sender rate must be >= 0, got {sender_rate_mbps}")
    return (2.0 / math.pi) * math.atan(sender_rate_mbps)


def reward_reliability(reliability: float) -> float:
    """Link-reliability reward; the identity on [0, 1]."""
    if not 0.0 <= reliability <= 1.0:
        raise ValueError(f"reliability {reliability} outside [0, 1]")
    return reliability


def reward_intensity(receiver_incoming: float, receiver_rate: float, extra: float = 0.0) -> float:
    """Traffic-intensity reward at the receiving node, 1 - (incoming+extra)/rate.

    extra = 0 gives the current form; extra = the demand's traffic gives the
    estimated form. May go negative when the node is overloaded.
    """
    if receiver_rate <= 0:
        raise ValueError("receiver processing rate must be > 0")
    if extra < 0:
        raise ValueError(f"extra traffic must be >= 0, got {extra}")
    return 1.0 - (receiver_incoming + extra) / receiver_rate


def reward_utilization(used: float, max_bandwidth: float, extra: float = 0.0) -> float:
    """Link-utilization reward, 1 - (used+extra)/max; negative when the link
    is over-subscribed (deliberately unclamped)."""
    if max_bandwidth <= 0:
        raise ValueError("link max bandwidth must be > 0")
    if extra < 0:
        raise ValueError(f"extra traffic must be >= 0, got {extra}")
    return 1.0 - (used + extra) / max_bandwidth


def local_reward(record: HopQoSRecord, weights: QoSWeights, demand_traffic: float) -> float:
    """Composite local reward of one successfully performed hop.

    Uses the estimated intensity/utilization forms (extra = demand_traffic)
    and subtracts the local normalizer, so the result is <= -0.1 whenever the
    per-factor rewards are <= 1.
    """
    return (
        weights.hop_count * reward_hop(record.hop_index)
        + weights.transmission * reward_transmission(record.sender_processing_rate / MBPS)
        + weights.reliability * reward_reliability(record.link_reliability)
        + weights.intensity
        * reward_intensity(
            record.receiver_incoming_traffic, record.receiver_processing_rate, demand_traffic
        )
        + weights.utilization
        * reward_utilization(record.link_used_bandwidth, record.link_max_bandwidth, demand_traffic)
        - weights.local_constant
    )


def global_reward(record: HopQoSRecord, weights: QoSWeights) -> float:
    """Composite global reward of one hop: network status only (reliability,
    current intensity, current utilization), <= 0 for admissible inputs."""
    return (
        weights.reliability * reward_reliability(record.link_reliability)
        + weights.intensity
        * reward_intensity(record.receiver_incoming_traffic, record.receiver_processing_rate)
        + weights.utilization
        * reward_utilization(record.link_used_bandwidth, record.link_max_bandwidth)
        - weights.global_constant
    )


def _check_records(records: Sequence[HopQoSRecord]) -> None:
    if not records:
        raise ValueError("cannot compute rewards for an empty record list")
    for record in records[:-1]:
        if record.has_lost:
            raise ValueError("only the last record of an execution may carry has_lost")


def local_rewards_for_path(
    records: Sequence[HopQoSRecord], weights: QoSWeights, demand: TrafficDemand
) -> list[RewardRecord]:
    """Local rewards for an executed hop sequence, in hop order.

    Every hop but the last is successful. The last hop fails if the packet
    was lost OR its receiver is not the demand's destination (a dead end or
    truncation); a failed hop is valued at -local_constant, the penalty that
    update rules accumulate.
    """
    _check_records(records)
    rewards = [
        RewardRecord(r.src_id, r.dst_id, True, local_reward(r, weights, demand.traffic))
        for r in records[:-1]
    ]
    last = records[-1]
    if last.has_lost or last.dst_id != demand.dst:
        rewards.append(RewardRecord(last.src_id, last.dst_id, False, -weights.local_constant))
    else:
        rewards.append(
            RewardRecord(last.src_id, last.dst_id, True, local_reward(last, weights, demand.traffic))
        )
    return rewards


def global_rewards_for_path(
    records: Sequence[HopQoSRecord], weights: QoSWeights
) -> list[RewardRecord]:
    """Global rewards for an executed hop sequence, in hop order.

    The last hop fails only on packet loss; reaching a dead end still yields
    a normal network-status reward. A failed hop is valued at -global_constant.
    """
    _check_records(records)
    rewards = [
        RewardRecord(r.src_id, r.dst_id, True, global_reward(r, weights))
        for r in records[:-1]
    ]
    last = records[-1]
    if last.has_lost:
        rewards.append(RewardRecord(last.src_id, last.dst_id, False, -weights.global_constant))
    else:
        rewards.append(RewardRecord(last.src_id, last.dst_id, True, global_reward(last, weights)))
    return rewards
