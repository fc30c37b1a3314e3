"""Routing, capacity and latency analysis for Walker star LEO constellations."""
from .capacity import PathCensus, census, lambda_max
from .errors import ConfigurationError, DegenerateError, UnreachableError
from .geometry import (Constellation, ConstellationConfig, GroundStation, build_constellation,
                       load_ground_stations, propagate, slant_range)
from .link_budget import LinkBudgetParams, data_rate, fspl, received_power
from .metrics import Metric, RouteQuery, plane_gate, weight
from .routing import RoutePath, Router, burst_latency, shortest_path
from .simulator import BurstEvent, PacketRecord, TrafficConfig, collect_stats, generate_traffic, run_snapshot
from .topology import Edge, LinkKind, TopologySnapshot, build_topology

__version__ = "0.1.0"
