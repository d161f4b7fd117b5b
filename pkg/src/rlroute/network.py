"""Directed-graph network model: nodes, links, demands, paths, topology i/o.

This module is the single source of truth for all QoS state the simulator
reads. All data rates are bits per second unless a name says otherwise.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Iterator, Union

# Processing rate assigned when a graph is built from a bare node count.
DEFAULT_PROCESSING_RATE = 50e6


class TopologyError(ValueError):
    """Raised when a topology document or construction input is invalid."""


@dataclass
class NodeState:
    """One network node.

    incoming_traffic is a derived aggregate: the sum of used bandwidth over
    all inbound links. It is initialized from the link set and maintained
    incrementally by place_traffic, not recomputed per query.
    """

    node_id: int
    processing_rate: float
    incoming_traffic: float = 0.0

    def __post_init__(self) -> None:
        if self.node_id < 0:
            raise TopologyError(f"node id {self.node_id} is negative")
        if not self.processing_rate > 0:
            raise TopologyError(
                f"node {self.node_id}: processing_rate must be > 0, "
                f"got {self.processing_rate}"
            )
        if self.incoming_traffic < 0:
            raise TopologyError(
                f"node {self.node_id}: incoming_traffic must be >= 0"
            )


@dataclass
class LinkState:
    """One directed link.

    used_bandwidth may exceed max_bandwidth: over-subscription is an
    observable (and penalized) state, not a construction error.
    """

    src: int
    dst: int
    max_bandwidth: float
    used_bandwidth: float = 0.0
    reliability: float = 1.0

    def __post_init__(self) -> None:
        if self.src == self.dst:
            raise TopologyError(f"link ({self.src},{self.dst}): self loops are not allowed")
        if not self.max_bandwidth > 0:
            raise TopologyError(
                f"link ({self.src},{self.dst}): max_bandwidth must be > 0, "
                f"got {self.max_bandwidth}"
            )
        if self.used_bandwidth < 0:
            raise TopologyError(
                f"link ({self.src},{self.dst}): used_bandwidth must be >= 0"
            )
        if not 0.0 <= self.reliability <= 1.0:
            raise TopologyError(
                f"link ({self.src},{self.dst}): reliability {self.reliability} "
                f"outside [0, 1]"
            )

    @property
    def utilization(self) -> float:
        return self.used_bandwidth / self.max_bandwidth


@dataclass(frozen=True)
class TrafficDemand:
    """A (source, destination, estimated traffic rate) triple; the unit of work."""

    src: int
    dst: int
    traffic: float

    def __post_init__(self) -> None:
        if self.src == self.dst:
            raise ValueError(f"demand src and dst must differ, got {self.src}")
        if not self.traffic > 0:
            raise ValueError(f"demand traffic must be > 0, got {self.traffic}")


@dataclass(frozen=True)
class RoutePath:
    """A simple (loop-free) node sequence; links are the consecutive pairs."""

    nodes: tuple[int, ...]
    reached_destination: bool = False

    def __post_init__(self) -> None:
        if not self.nodes:
            raise ValueError("a path must contain at least its start node")
        if len(set(self.nodes)) != len(self.nodes):
            raise ValueError(f"path {list(self.nodes)} repeats a node")

    @property
    def hop_count(self) -> int:
        return len(self.nodes) - 1

    def links(self) -> list[tuple[int, int]]:
        return list(zip(self.nodes[:-1], self.nodes[1:]))


class NetworkGraph:
    """Directed graph of NodeState / LinkState with ascending-id adjacency.

    Node ids are dense 0..N-1. At most one link exists per ordered (src, dst)
    pair. Construct through build_graph or load_topology.
    """

    def __init__(self, nodes: list[NodeState], links: dict[tuple[int, int], LinkState]):
        self._nodes = nodes
        self._links = links
        self._out: list[list[int]] = [[] for _ in nodes]
        for src, dst in sorted(links):
            self._out[src].append(dst)

    @property
    def num_nodes(self) -> int:
        return len(self._nodes)

    @property
    def nodes(self) -> list[NodeState]:
        return self._nodes

    def node(self, node_id: int) -> NodeState:
        return self._nodes[node_id]

    def has_node(self, node_id: int) -> bool:
        return 0 <= node_id < len(self._nodes)

    def has_link(self, src: int, dst: int) -> bool:
        return (src, dst) in self._links

    def link(self, src: int, dst: int) -> LinkState:
        try:
            return self._links[(src, dst)]
        except KeyError:
            raise KeyError(f"no link ({src},{dst}) in graph") from None

    def out_neighbors(self, node_id: int) -> list[int]:
        """Next-hop candidates from node_id, in ascending id order."""
        return self._out[node_id]

    def iter_links(self) -> Iterator[LinkState]:
        """All links in (src, dst) order; the canonical iteration order."""
        for key in sorted(self._links):
            yield self._links[key]

    def copy(self) -> "NetworkGraph":
        nodes = [NodeState(n.node_id, n.processing_rate, n.incoming_traffic) for n in self._nodes]
        links = {
            key: LinkState(l.src, l.dst, l.max_bandwidth, l.used_bandwidth, l.reliability)
            for key, l in self._links.items()
        }
        return NetworkGraph(nodes, links)

    def max_link_utilization(self) -> float:
        return max((l.utilization for l in self._links.values()), default=0.0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NetworkGraph):
            return NotImplemented
        return self._nodes == other._nodes and self._links == other._links

    def __repr__(self) -> str:
        return f"NetworkGraph(nodes={len(self._nodes)}, links={len(self._links)})"


LinkSpec = Union[LinkState, tuple]


def build_graph(
    nodes: Union[int, Iterable[NodeState]],
    links: Iterable[LinkSpec] = (),
    default_processing_rate: float = DEFAULT_PROCESSING_RATE,
) -> NetworkGraph:
    """Build a validated NetworkGraph.

    nodes: either a node count (every node gets default_processing_rate) or
    an iterable of NodeState with dense ids 0..N-1.
    links: LinkState instances or tuples (src, dst, max_bw[, used_bw[, reliability]]).

    Each node's incoming_traffic is initialized as the sum of used bandwidth
    over its inbound links; any incoming_traffic on the given NodeStates is
    overwritten (it is a derived quantity).
    """
    if isinstance(nodes, int):
        node_list = [NodeState(i, default_processing_rate) for i in range(nodes)]
    else:
        node_list = sorted(list(nodes), key=lambda n: n.node_id)
        ids = [n.node_id for n in node_list]
        if ids != list(range(len(node_list))):
            raise TopologyError(f"node ids must be dense 0..N-1, got {ids}")

    link_map: dict[tuple[int, int], LinkState] = {}
    for spec in links:
        link = spec if isinstance(spec, LinkState) else LinkState(*spec)
        key = (link.src, link.dst)
        for end in key:
            if not 0 <= end < len(node_list):
                raise TopologyError(
                    f"link ({link.src},{link.dst}): endpoint {end} is not a node id"
                )
        if key in link_map:
            raise TopologyError(f"duplicate link ({link.src},{link.dst})")
        link_map[key] = link

    graph = NetworkGraph(node_list, link_map)
    _recompute_incoming(graph)
    return graph


def _recompute_incoming(graph: NetworkGraph) -> None:
    for node in graph.nodes:
        node.incoming_traffic = 0.0
    for link in graph.iter_links():
        graph.node(link.dst).incoming_traffic += link.used_bandwidth


def check_path(graph: NetworkGraph, path: RoutePath) -> None:
    """Raise ValueError unless every consecutive pair of path is a graph link."""
    for src, dst in path.links():
        if not graph.has_link(src, dst):
            raise ValueError(f"path {list(path.nodes)} uses missing link ({src},{dst})")


def place_traffic(graph: NetworkGraph, path: RoutePath, demand: TrafficDemand) -> NetworkGraph:
    """Place demand.traffic along path: every path link's used_bandwidth and
    every path node's incoming_traffic (except the source) grow by the
    demand's rate. The path must be valid in graph, must have reached its
    destination, and must connect the demand's endpoints.
    """
    check_path(graph, path)
    if not path.reached_destination:
        raise ValueError("refusing to place traffic on a path that did not reach its destination")
    if path.nodes[0] != demand.src or path.nodes[-1] != demand.dst:
        raise ValueError(
            f"path {list(path.nodes)} does not connect demand "
            f"{demand.src}->{demand.dst}"
        )
    for src, dst in path.links():
        graph.link(src, dst).used_bandwidth += demand.traffic
    for node_id in path.nodes[1:]:
        graph.node(node_id).incoming_traffic += demand.traffic
    return graph


# ---------------------------------------------------------------------------
# Topology document i/o
#
# Schema:
#   {"nodes": [{"id": 0, "processing_rate_bps": 1.0e8}],
#    "links": [{"src": 0, "dst": 1, "max_bandwidth_bps": 1.0e7,
#               "used_bandwidth_bps": 1.0e6, "reliability": 0.95}]}
# used_bandwidth_bps defaults to 0.0 and reliability to 1.0 when omitted.
# ---------------------------------------------------------------------------

def _want_number(obj: dict, where: str, key: str, *, default=None):
    if key not in obj:
        if default is not None:
            return default
        raise TopologyError(f"{where}.{key}: required field missing")
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise TopologyError(f"{where}.{key}: expected a number, got {value!r}")
    return value


def _want_int(obj: dict, where: str, key: str) -> int:
    value = _want_number(obj, where, key)
    if not isinstance(value, int):
        raise TopologyError(f"{where}.{key}: expected an integer, got {value!r}")
    return value


def graph_from_dict(document: dict) -> NetworkGraph:
    """Parse and validate one topology document (already JSON-decoded)."""
    if not isinstance(document, dict):
        raise TopologyError("topology document must be a JSON object")
    for section in ("nodes", "links"):
        if section not in document or not isinstance(document[section], list):
            raise TopologyError(f"{section}: required list missing")

    nodes = []
    for i, entry in enumerate(document["nodes"]):
        where = f"nodes[{i}]"
        if not isinstance(entry, dict):
            raise TopologyError(f"{where}: expected an object")
        node_id = _want_int(entry, where, "id")
        rate = _want_number(entry, where, "processing_rate_bps")
        try:
            nodes.append(NodeState(node_id, float(rate)))
        except TopologyError as exc:
            raise TopologyError(f"{where}: {exc}") from None

    links = []
    for i, entry in enumerate(document["links"]):
        where = f"links[{i}]"
        if not isinstance(entry, dict):
            raise TopologyError(f"{where}: expected an object")
        src = _want_int(entry, where, "src")
        dst = _want_int(entry, where, "dst")
        max_bw = _want_number(entry, where, "max_bandwidth_bps")
        used = _want_number(entry, where, "used_bandwidth_bps", default=0.0)
        rel = _want_number(entry, where, "reliability", default=1.0)
        try:
            links.append(LinkState(src, dst, float(max_bw), float(used), float(rel)))
        except TopologyError as exc:
            raise TopologyError(f"{where}: {exc}") from None

    try:
        return build_graph(nodes, links)
    except TopologyError as exc:
        raise TopologyError(str(exc)) from None


def graph_to_dict(graph: NetworkGraph) -> dict:
    return {
        "nodes": [
            {"id": n.node_id, "processing_rate_bps": n.processing_rate}
            for n in graph.nodes
        ],
        "links": [
            {
                "src": l.src,
                "dst": l.dst,
                "max_bandwidth_bps": l.max_bandwidth,
                "used_bandwidth_bps": l.used_bandwidth,
                "reliability": l.reliability,
            }
            for l in graph.iter_links()
        ],
    }


def load_topology(source: Union[str, Path, IO[str]]) -> NetworkGraph:
    """Load a topology document from a path or open text file."""
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            document = json.load(fh)
    else:
        document = json.load(source)
    return graph_from_dict(document)


def save_topology(graph: NetworkGraph, dest: Union[str, Path, IO[str]]) -> None:
    """Write the topology document; loading it back reproduces the graph."""
    document = graph_to_dict(graph)
    if isinstance(dest, (str, Path)):
        with open(dest, "w", encoding="utf-8") as fh:
            json.dump(document, fh, indent=2)
            fh.write("\n")
    else:
        json.dump(document, dest, indent=2)
        dest.write("\n")
