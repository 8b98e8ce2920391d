"""Multi-channel placement of photon pairs on signal/idler frequency bins.

A placement assigns each pair (channel r, slot m) a cell (k, k') of the
integer signal-bin x idler-bin grid.  Decoding multiplies bin masks on the
two axes, so the per-pair decode weight factorizes as
H^d(pair) = H^d_s(k) * H^d_i(k'); arbitrary per-channel codewords are
realizable exactly when the bipartite pair-placement graph is a forest.
The staircase arrangement packs channels onto adjacent anti-diagonals so
the whole graph is one tree, leaving a single redundant decoder degree of
freedom while keeping the occupied frequency extent minimal.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (CodeSpaceOverflow, CycleDetected, InfeasibleDecode,
                     OddM, ValidityWarning)
from .spectra import PairShift

_INT_LIMIT = 2 ** 63 - 1


@dataclass(frozen=True)
class ChannelLayout:
    """R channels of M pairs placed on integer frequency bins.

    placement maps (r, m), both 1-based, to a cell (signal_bin, idler_bin).
    bin_width is the physical bin pitch (units of gamma); delta_r holds the
    per-channel joint shifts, i.e. channel r's pairs share the
    anti-diagonal signal_bin + idler_bin = -delta_r[r-1] / bin_width.
    """

    r: int
    m: int
    placement: dict
    bin_width: float = 100.0
    delta_r: tuple = ()

    def __post_init__(self):
        if self.r < 1 or self.m < 1:
            raise ValueError("need at least one channel and one pair")
        if len(self.placement) != self.r * self.m:
            raise ValueError("placement must cover every (channel, slot)")
        cells = list(self.placement.values())
        if len(set(cells)) != len(cells):
            raise ValueError("placement cells must be distinct")

    @property
    def n_pairs(self) -> int:
        return self.r * self.m

    def pair_index(self, r: int, m: int, alternate: bool = False) -> int:
        """1-based pair enumeration: canonical n = (r-1)M + m, or the
        alternate channel-interleaved rule n = r + (m-1)R."""
        if alternate:
            return r + (m - 1) * self.r
        return (r - 1) * self.m + m

    def cell(self, r: int, m: int) -> tuple:
        return self.placement[(r, m)]

    def pair_shift(self, r: int, m: int, weight: complex = 1.0) -> PairShift:
        """Physical shifts of the pair at cell (k, k'): the idler sits at
        k' * bin_width and the signal at k * bin_width."""
        k, kp = self.placement[(r, m)]
        return PairShift(weight=weight, delta_p=kp * self.bin_width,
                         delta_q=-(k + kp) * self.bin_width)


def staircase(r: int, m: int, bin_width: float = 100.0) -> ChannelLayout:
    """Dense diagonal-offset arrangement of R channels with M pairs each.

    Channels come in blocks of two sharing a signal-bin range; the two
    members of a block sit on adjacent anti-diagonals, and consecutive
    blocks chain through one shared idler bin.  The result is a spanning
    forest (a single tree for even R), so factorized decoding works with
    exactly one redundant degree of freedom per connected component.
    """
    if m % 2 != 0:
        raise OddM(f"pairs per channel must be even, got {m}")
    placement = {}
    delta_r = []
    for c in range(1, r + 1):
        block = (c + 1) // 2
        anti = (block - 1) * 2 * m + ((c - 1) % 2)
        delta_r.append(-anti * bin_width)
        for slot in range(1, m + 1):
            k = (block - 1) * m + slot
            placement[(c, slot)] = (k, anti - k)
    return ChannelLayout(r=r, m=m, placement=placement,
                         bin_width=bin_width, delta_r=tuple(delta_r))


def _graph(layout: ChannelLayout):
    """Bipartite adjacency: nodes ('s', k) and ('i', k'), one edge per pair."""
    adj = {}
    edges = []
    for (r, m), (k, kp) in sorted(layout.placement.items()):
        u, v = ("s", k), ("i", kp)
        adj.setdefault(u, []).append((v, (r, m)))
        adj.setdefault(v, []).append((u, (r, m)))
        edges.append((u, v, (r, m)))
    return adj, edges


def _ancestry(parent, node):
    path = [node]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    return path


def _find_cycle(adj):
    """DFS cycle search; returns the node sequence of one cycle, or None."""
    seen = set()
    for start in adj:
        if start in seen:
            continue
        stack = [(start, None)]
        parent = {start: None}
        while stack:
            node, via = stack.pop()
            if node in seen:
                continue
            seen.add(node)
            for nxt, pair in adj[node]:
                if pair == via:
                    continue   # don't reuse the edge we arrived on
                if nxt in seen:
                    # tree paths from both endpoints meet at a common
                    # ancestor; their union plus this edge is the cycle
                    pa = _ancestry(parent, node)
                    pb = _ancestry(parent, nxt)
                    index_a = {n: i for i, n in enumerate(pa)}
                    j = next(i for i, n in enumerate(pb) if n in index_a)
                    return pa[:index_a[pb[j]]] + list(reversed(pb[:j + 1]))
                if nxt not in parent:
                    parent[nxt] = node
                    stack.append((nxt, pair))
    return None


def validate(layout: ChannelLayout, tau: float | None = None) -> dict:
    """Check decodability of a layout and count leftover decoder freedom.

    Each placed pair imposes one multiplicative constraint
    H^d_s(k) * H^d_i(k') = H^d(pair); the log-linearized system is solvable
    for arbitrary nonzero targets exactly when the placement graph has no
    cycle.  Returns {"valid": True, "dof": nodes - edges, "components":
    per-component counts}; raises CycleDetected otherwise.

    With tau given, warns when the inter-channel shift spacing is below
    20/tau (pair ridges of neighboring channels then overlap spectrally).
    """
    adj, edges = _graph(layout)
    cycle = _find_cycle(adj)
    if cycle is not None:
        raise CycleDetected(
            "placement contains a cycle; decode weights cannot factorize: "
            + " - ".join(f"{axis}{k}" for axis, k in cycle), cycle=cycle)

    # forest: dof = one free gauge per connected component
    seen = set()
    components = []
    for start in adj:
        if start in seen:
            continue
        comp_nodes = 0
        stack = [start]
        seen.add(start)
        while stack:
            node = stack.pop()
            comp_nodes += 1
            for nxt, _ in adj[node]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        components.append(comp_nodes)
    n_nodes = sum(components)
    n_edges = len(edges)
    dof = n_nodes - n_edges

    if tau is not None and len(layout.delta_r) > 1:
        shifts = sorted(layout.delta_r)
        gap = min(b - a for a, b in zip(shifts, shifts[1:]))
        if gap < 20.0 / tau:
            warnings.warn(
                f"inter-channel shift spacing {gap:.4g} below 20/tau = "
                f"{20.0 / tau:.4g}; channels will crosstalk", ValidityWarning)

    return {"valid": True, "dof": dof, "nodes": n_nodes, "edges": n_edges,
            "components": len(components)}


def dimension(layout: ChannelLayout) -> int:
    """Code-space dimension M**R (one of M codewords per channel)."""
    d = layout.m ** layout.r
    if d > _INT_LIMIT:
        raise CodeSpaceOverflow(
            f"{layout.m}**{layout.r} exceeds the representable range")
    return d


def factor_decode(layout: ChannelLayout, per_channel_codewords):
    """Split per-pair decode weights into signal-bin and idler-bin factors.

    per_channel_codewords is an (R, M) array whose (r, m) entry is the
    required product H^d_s(k) * H^d_i(k') for that pair's cell.  The gauge
    fixes one node per connected component to 1 (a signal bin where
    possible, matching the single-channel convention H^d_s = 1).  Zero
    targets are representable only on leaf edges, by zeroing the leaf
    endpoint; anywhere else they would force whole subtrees to zero.

    Returns (signal_weights, idler_weights) as {bin: complex} dicts.
    """
    targets = np.asarray(per_channel_codewords, dtype=complex)
    if targets.shape != (layout.r, layout.m):
        raise InfeasibleDecode(
            f"expected codeword array of shape {(layout.r, layout.m)}, "
            f"got {targets.shape}")
    validate(layout)

    adj, edges = _graph(layout)
    degree = {node: len(nbrs) for node, nbrs in adj.items()}
    target_of = {(r, m): targets[r - 1, m - 1] for (r, m) in layout.placement}

    values = {}
    # zero targets first: only a leaf endpoint may carry the zero
    for u, v, pair in edges:
        if target_of[pair] != 0:
            continue
        if degree[v] == 1:
            leaf = v       # prefer zeroing the idler side of a bare edge
        elif degree[u] == 1:
            leaf = u
        else:
            raise InfeasibleDecode(
                f"pair {pair} requests decode 0 on a shared cell "
                f"{layout.placement[pair]}; zeros need a private bin")
        values[leaf] = 0.0

    # propagate over nonzero edges, one gauge choice per component
    nonzero_adj = {}
    for u, v, pair in edges:
        if target_of[pair] == 0:
            continue
        nonzero_adj.setdefault(u, []).append((v, pair))
        nonzero_adj.setdefault(v, []).append((u, pair))

    for start in sorted(nonzero_adj):
        if start in values:
            continue
        # gauge root: a signal node of this component when one exists
        stack = [start]
        comp = []
        probe = {start}
        while stack:
            node = stack.pop()
            comp.append(node)
            for nxt, _ in nonzero_adj[node]:
                if nxt not in probe:
                    probe.add(nxt)
                    stack.append(nxt)
        if any(n in values for n in comp):
            root = next(n for n in comp if n in values)
        else:
            root = min((n for n in comp if n[0] == "s"), default=comp[0])
            values[root] = 1.0
        stack = [root]
        while stack:
            node = stack.pop()
            for nxt, pair in nonzero_adj[node]:
                if nxt in values:
                    continue
                values[nxt] = target_of[pair] / values[node]
                stack.append(nxt)

    # any node touched only by zero edges and not yet fixed: free, gauge 1
    for node in adj:
        values.setdefault(node, 1.0)

    for u, v, pair in edges:
        resid = values[u] * values[v] - target_of[pair]
        if abs(resid) > 1e-12 * max(1.0, abs(target_of[pair])):
            raise InfeasibleDecode(
                f"factorization residual {abs(resid):.3e} on pair {pair}")

    signal = {k: values[("s", k)] for (axis, k) in values if axis == "s"}
    idler = {k: values[("i", k)] for (axis, k) in values if axis == "i"}
    return signal, idler
