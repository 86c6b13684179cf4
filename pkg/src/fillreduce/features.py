"""Per-node state features: degree and collective influence.

Collective influence of v is (deg(v) - 1) * sum over neighbors u of
(deg(u) - 1), a cheap centrality that looks one hop out. Both features are
computed on the current elimination graph, so they change as nodes are
removed and cliques form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .symbolic import EliminationGraph

NUM_FEATURES = 2  # degree, collective influence


@dataclass
class NodeFeatures:
    """Feature matrix x of shape (len(nodes), 2); row k describes nodes[k].

    ``nodes`` is the sorted live-node list, the same row order used by the
    policy network's propagation operator.
    """

    nodes: list[int]
    x: np.ndarray


def compute_features(g: EliminationGraph) -> NodeFeatures:
    """Degree and collective influence for every live node.

    Isolated nodes get (0, 0): the empty neighbor sum already makes the
    influence vanish, so no sign artifact from the (deg - 1) factor.
    """
    nodes = sorted(g.live)
    x = np.zeros((len(nodes), NUM_FEATURES), dtype=np.float64)
    deg = {v: len(g.adj[v]) for v in nodes}
    for row, v in enumerate(nodes):
        d = deg[v]
        x[row, 0] = d
        if d > 0:
            x[row, 1] = (d - 1) * sum(deg[u] - 1 for u in g.adj[v])
    return NodeFeatures(nodes, x)


def normalize_features(nf: NodeFeatures) -> NodeFeatures:
    """Scale each column by 1 / max(1, column max) into [0, 1]."""
    scale = np.maximum(1.0, nf.x.max(axis=0, initial=0.0))
    return NodeFeatures(nf.nodes, nf.x / scale)
