"""SPQR trees by recursive splitting, the gem-freeness characterisation, the
planar fan-structure conditions, and the glued planar layout construction."""

from dataclasses import dataclass, field
from itertools import combinations

from .exceptions import PreconditionError, StructureError
from .graphs import Graph, biconnected_components, connected_components
from .layouts import TreeLayout, bandwidth_of_layout, layout_from_tree_partition, validate_layout, TreePartition

__all__ = [
    "SkeletonEdge",
    "SpqrNode",
    "SpqrTree",
    "build_spqr",
    "gem_free_check",
    "planar_fan_conditions",
    "tree_partition_construct",
    "planar_layout_construct",
    "serialize_spqr",
]


@dataclass(frozen=True)
class SkeletonEdge:
    u: int
    v: int
    virtual_id: int = None  # id shared with the partner node; None for real edges

    def key(self):
        return (min(self.u, self.v), max(self.u, self.v))


@dataclass
class SpqrNode:
    kind: str  # 'S', 'P' or 'R'
    edges: list

    def vertices(self):
        vs = set()
        for e in self.edges:
            vs.add(e.u)
            vs.add(e.v)
        return tuple(sorted(vs))

    def degree(self, v):
        return sum(1 for e in self.edges if v in (e.u, e.v))

    def max_degree(self):
        return max((self.degree(v) for v in self.vertices()), default=0)


@dataclass
class SpqrTree:
    nodes: list
    tree_edges: list  # (node_a, node_b, virtual_id)

    def adjacency(self):
        adj = {i: [] for i in range(len(self.nodes))}
        for a, b, vid in self.tree_edges:
            adj[a].append((b, vid))
            adj[b].append((a, vid))
        return adj

    def adhesion(self, vid):
        """The separating pair of the tree edge with this virtual id."""
        for node in self.nodes:
            for e in node.edges:
                if e.virtual_id == vid:
                    return e.key()
        raise StructureError("unknown virtual id %d" % vid)

    def validate(self):
        for node in self.nodes:
            vs = node.vertices()
            if node.kind == "P":
                if len(vs) != 2 or len(node.edges) < 3:
                    raise StructureError("P-node must be two vertices with >= 3 edges")
            elif node.kind == "S":
                if len(vs) < 3 or len(node.edges) != len(vs):
                    raise StructureError("S-node must be a cycle of length >= 3")
                if any(node.degree(v) != 2 for v in vs):
                    raise StructureError("S-node skeleton is not a cycle")
                keys = [e.key() for e in node.edges]
                if len(set(keys)) != len(keys):
                    raise StructureError("S-node skeleton has parallel edges")
            elif node.kind == "R":
                if not _is_simple_3_connected(node.edges):
                    raise StructureError("R-node skeleton is not simple 3-connected")
            else:
                raise StructureError("unknown node kind %r" % node.kind)
        for a, b, _ in self.tree_edges:
            if self.nodes[a].kind == self.nodes[b].kind and self.nodes[a].kind in "SP":
                raise StructureError("adjacent %s-nodes" % self.nodes[a].kind)


def _edge_vertices(edges):
    vs = set()
    for e in edges:
        vs.add(e.u)
        vs.add(e.v)
    return vs


def _connected(vertices, edges):
    if not vertices:
        return True
    adj = {v: set() for v in vertices}
    for e in edges:
        if e.u in adj and e.v in adj:
            adj[e.u].add(e.v)
            adj[e.v].add(e.u)
    start = next(iter(vertices))
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen == set(vertices)


def _is_simple_cycle(edges):
    vs = _edge_vertices(edges)
    if len(vs) < 3 or len(edges) != len(vs):
        return False
    keys = [e.key() for e in edges]
    if len(set(keys)) != len(keys):
        return False
    degree = {}
    for e in edges:
        degree[e.u] = degree.get(e.u, 0) + 1
        degree[e.v] = degree.get(e.v, 0) + 1
    return all(d == 2 for d in degree.values()) and _connected(vs, edges)


def _is_simple_3_connected(edges):
    vs = sorted(_edge_vertices(edges))
    keys = [e.key() for e in edges]
    if len(set(keys)) != len(keys):
        return False
    if len(vs) < 4:
        return False
    for pair in combinations(vs, 2):
        rest = [v for v in vs if v not in pair]
        sub = [e for e in edges if e.u not in pair and e.v not in pair]
        if not _connected(set(rest), sub):
            return False
    return _connected(set(vs), edges)


def build_spqr(g):
    """Canonical SPQR tree of a 2-connected graph by recursive splitting at
    the lexicographically smallest separating pair, then merging adjacent
    same-type S/S and P/P nodes."""
    if g.n < 3:
        raise StructureError("SPQR tree needs n >= 3")
    if not _two_connected(g):
        raise StructureError("graph is not 2-connected")

    next_vid = [0]
    raw_nodes = []

    def fresh_vid():
        next_vid[0] += 1
        return next_vid[0] - 1

    def split(edges):
        vs = sorted(_edge_vertices(edges))
        keys = set()
        all_same_pair = len(vs) == 2
        if all_same_pair:
            raw_nodes.append(SpqrNode("P", list(edges)))
            return
        if _is_simple_cycle(edges):
            raw_nodes.append(SpqrNode("S", list(edges)))
            return
        pair = _find_split_pair(vs, edges)
        if pair is None:
            raw_nodes.append(SpqrNode("R", list(edges)))
            return
        x, y = pair
        trivial = [e for e in edges if e.key() == (x, y)]
        others = [e for e in edges if e.key() != (x, y)]
        comps = _components_without(vs, others, (x, y))
        bridges = []
        for comp in comps:
            comp_set = set(comp)
            bridge = [e for e in others if e.u in comp_set or e.v in comp_set]
            bridges.append(bridge)
        if trivial or len(bridges) + len(trivial) >= 3:
            hub_edges = list(trivial)
            for bridge in bridges:
                vid = fresh_vid()
                hub_edges.append(SkeletonEdge(x, y, vid))
                split(bridge + [SkeletonEdge(x, y, vid)])
            raw_nodes.append(SpqrNode("P", hub_edges))
        else:
            # exactly two bridges, no direct edge: plain tree edge between sides
            vid = fresh_vid()
            split(bridges[0] + [SkeletonEdge(x, y, vid)])
            split(bridges[1] + [SkeletonEdge(x, y, vid)])

    base = [SkeletonEdge(u, v) for u, v in g.edges]
    split(base)

    # tree edges: each virtual id appears in exactly two nodes
    holders = {}
    for i, node in enumerate(raw_nodes):
        for e in node.edges:
            if e.virtual_id is not None:
                holders.setdefault(e.virtual_id, []).append(i)
    tree_edges = []
    for vid, hs in sorted(holders.items()):
        if len(hs) != 2:
            raise StructureError("virtual edge %d not shared by two nodes" % vid)
        tree_edges.append((hs[0], hs[1], vid))

    tree = SpqrTree(raw_nodes, tree_edges)
    tree = _merge_same_type(tree)
    tree.validate()
    return tree


def _two_connected(g):
    if g.n < 3:
        return False
    if len(connected_components(g)) != 1:
        return False
    bct = biconnected_components(g)
    return len(bct.blocks) == 1 and len(bct.block_vertices(0)) == g.n


def _find_split_pair(vs, edges):
    """Lexicographically smallest pair that disconnects, or carries >= 2
    parallel edges; None when 3-connected (and simple)."""
    key_count = {}
    for e in edges:
        key_count[e.key()] = key_count.get(e.key(), 0) + 1
    for pair in combinations(vs, 2):
        if key_count.get(pair, 0) >= 2:
            return pair
        rest = [v for v in vs if v not in pair]
        if not rest:
            continue
        sub = [e for e in edges if e.u not in pair and e.v not in pair]
        if not _connected(set(rest), sub):
            return pair
    return None


def _components_without(vs, other_edges, pair):
    rest = [v for v in vs if v not in pair]
    adj = {v: set() for v in rest}
    for e in other_edges:
        if e.u in adj and e.v in adj:
            adj[e.u].add(e.v)
            adj[e.v].add(e.u)
    comps = []
    seen = set()
    for v in rest:
        if v in seen:
            continue
        comp = [v]
        seen.add(v)
        stack = [v]
        while stack:
            a = stack.pop()
            for b in adj[a]:
                if b not in seen:
                    seen.add(b)
                    comp.append(b)
                    stack.append(b)
        comps.append(sorted(comp))
    return comps


def _merge_same_type(tree):
    nodes = [SpqrNode(n.kind, list(n.edges)) for n in tree.nodes]
    edges = list(tree.tree_edges)
    changed = True
    while changed:
        changed = False
        for idx, (a, b, vid) in enumerate(edges):
            if nodes[a].kind == nodes[b].kind and nodes[a].kind in "SP":
                merged = _glue(nodes[a], nodes[b], vid)
                nodes[a] = merged
                # reroute b's other tree edges to a, drop node b
                new_edges = []
                for a2, b2, vid2 in edges:
                    if vid2 == vid:
                        continue
                    a2 = a if a2 == b else a2
                    b2 = a if b2 == b else b2
                    new_edges.append((a2, b2, vid2))
                edges = new_edges
                keep = [i for i in range(len(nodes)) if i != b]
                remap = {old: new for new, old in enumerate(keep)}
                nodes = [nodes[i] for i in keep]
                edges = [(remap[a2], remap[b2], vid2) for a2, b2, vid2 in edges]
                changed = True
                break
    return SpqrTree(nodes, edges)


def _glue(na, nb, vid):
    ea = [e for e in na.edges if e.virtual_id != vid]
    eb = [e for e in nb.edges if e.virtual_id != vid]
    return SpqrNode(na.kind, ea + eb)


def gem_free_check(g):
    """Exact characterisation of excluding the gem (the 4-fan) as a
    topological minor: in every block's SPQR tree, all R-skeletons are
    subcubic and no vertex lies in two P-or-R skeletons."""
    bct = biconnected_components(g)
    for bi, block in enumerate(bct.blocks):
        block_vs = bct.block_vertices(bi)
        if len(block_vs) < 3:
            continue
        sub, order = g.subgraph(block_vs)
        tree = build_spqr(sub)
        pr_count = {}
        for ni, node in enumerate(tree.nodes):
            if node.kind == "R" and node.max_degree() > 3:
                v_local = max(node.vertices(), key=node.degree)
                return False, {
                    "condition": 1,
                    "block": bi,
                    "node": ni,
                    "vertex": order[v_local],
                    "degree": node.max_degree(),
                }
            if node.kind in "PR":
                for v in node.vertices():
                    pr_count.setdefault(v, []).append(ni)
        for v, hits in sorted(pr_count.items()):
            if len(hits) >= 2:
                return False, {
                    "condition": 2,
                    "block": bi,
                    "vertex": order[v],
                    "nodes": tuple(hits),
                }
    return True, None


def planar_fan_conditions(g, k):
    """For a caller-asserted-planar 2-connected graph: all R-skeleton degrees
    below k, and along any SPQR tree path at most 2k+1 separating pairs
    contain any one vertex."""
    if not _two_connected(g):
        raise StructureError("graph is not 2-connected")
    if k < 3:
        raise StructureError("k must be >= 3")
    tree = build_spqr(g)
    for ni, node in enumerate(tree.nodes):
        if node.kind == "R" and node.max_degree() >= k:
            return False, {"condition": 1, "node": ni, "degree": node.max_degree()}
    # per vertex: the tree edges whose separating pair contains it form a
    # subtree; its diameter in edges is the largest count on one path
    adj = tree.adjacency()
    for x in range(g.n):
        marked = [(a, b) for a, b, vid in tree.tree_edges if x in tree.adhesion(vid)]
        if not marked:
            continue
        nodes_in = set()
        for a, b in marked:
            nodes_in.add(a)
            nodes_in.add(b)
        marked_set = set(frozenset(e) for e in marked)

        def far(start):
            dist = {start: 0}
            stack = [start]
            while stack:
                t = stack.pop()
                for s, _vid in adj[t]:
                    if s in nodes_in and frozenset((t, s)) in marked_set and s not in dist:
                        dist[s] = dist[t] + 1
                        stack.append(s)
            node = max(dist, key=lambda u: (dist[u], u))
            return node, dist[node]

        a, _ = far(min(nodes_in))
        _, dia = far(a)
        if dia > 2 * k + 1:
            return False, {"condition": 2, "vertex": x, "pairs_on_path": dia}
    return True, None


def tree_partition_construct(g, root_set):
    """Valid tree-partition with root_set inside the root part.

    Construction: breadth-first layers from root_set, refined by connectivity
    of the residual graph; parts are (layer, component) cells, the root part
    is all of layer zero.  Width is whatever the layering achieves (callers
    measure it); validity and the root constraint always hold.
    """
    if g.n == 0:
        return TreePartition({}, ())
    root_set = sorted(set(root_set)) or [0]
    layer = {v: None for v in range(g.n)}
    frontier = list(root_set)
    for v in frontier:
        layer[v] = 0
    depth = 0
    while frontier:
        depth += 1
        nxt = []
        for v in frontier:
            for w in g.adjacency[v]:
                if layer[w] is None:
                    layer[w] = depth
                    nxt.append(w)
        frontier = nxt
    # unreachable chunks start below the root part; no edges cross to them
    for comp in connected_components(g):
        if layer[comp[0]] is not None:
            continue
        src = comp[0]
        layer[src] = 1
        frontier = [src]
        d = 1
        while frontier:
            d += 1
            nxt = []
            for v in frontier:
                for w in g.adjacency[v]:
                    if layer[w] is None:
                        layer[w] = d
                        nxt.append(w)
            frontier = nxt
    max_layer = max(layer.values())
    parts = {0: tuple(root_set)}
    part_of = {v: 0 for v in root_set}
    tree_edges = []
    next_id = 1
    prev_cells = {None: 0}  # component-key of upper layer -> part id
    # build per layer: components of the graph induced on layers >= i
    for i in range(1, max_layer + 1):
        high = sorted(v for v in range(g.n) if layer[v] >= i)
        if not high:
            break
        sub, order = g.subgraph(high)
        cells = {}
        for comp in connected_components(sub):
            comp_global = [order[j] for j in comp]
            cell = tuple(v for v in comp_global if layer[v] == i)
            if not cell:
                continue
            pid = next_id
            next_id += 1
            parts[pid] = cell
            for v in cell:
                part_of[v] = pid
            # parent: the part of any layer-(i-1) neighbour component; for
            # i == 1 that is the root part
            if i == 1:
                parent = 0
            else:
                up = None
                for v in comp_global:
                    if layer[v] == i:
                        for w in g.adjacency[v]:
                            if layer[w] == i - 1:
                                up = part_of[w]
                                break
                    if up is not None:
                        break
                parent = up if up is not None else 0
            tree_edges.append((parent, pid))
    tp = TreePartition(parts, tuple(tree_edges))
    tp.validate(g)
    return tp


def _walk_cycle(edges, first, second):
    adj = {}
    for e in edges:
        adj.setdefault(e.u, set()).add(e.v)
        adj.setdefault(e.v, set()).add(e.u)
    walk = [first, second]
    while len(walk) < len(adj):
        prev, cur = walk[-2], walk[-1]
        nxt = next(w for w in sorted(adj[cur]) if w != prev)
        walk.append(nxt)
    return walk


def planar_layout_construct(g, k):
    """Glued layout for a caller-asserted-planar graph: block-cut traversal,
    per-block SPQR traversal with cycles as bandwidth-2 chains, P-nodes as
    two-vertex chains, R-skeletons collapsed from a rooted tree-partition.

    Each SPQR child is laid out with its separating pair (x, y) first (x above
    y); since x and y are already placed by the parent, grafting skips them,
    which realises "remove x from the child layout and glue at y".
    """
    if g.n == 0:
        return TreeLayout(None, {})
    parent = {}
    placed = set()

    def global_depth(v):
        d = 0
        while v in parent:
            v = parent[v]
            d += 1
        return d

    def graft_chain(seq, attach):
        """Place a chain below `attach`; already-placed vertices only move the
        attachment point downward."""
        up = attach
        for v in seq:
            if v in placed:
                up = v
                continue
            placed.add(v)
            if up is not None:
                parent[v] = up
            up = v

    def graft_layout(lay, to_global, attach):
        """Copy a local TreeLayout into the global one below `attach`."""
        for lv in sorted(lay.vertices(), key=lambda v: (lay.depth[v], v)):
            gv = to_global[lv]
            if gv in placed:
                continue
            placed.add(gv)
            lp = lay.parent.get(lv)
            if lp is None:
                if attach is not None:
                    parent[gv] = attach
            else:
                parent[gv] = to_global[lp]

    def skeleton_chain(node, spec):
        """Vertex order (or a local layout) for one skeleton; spec fixes the
        first one or two vertices."""
        vs = list(node.vertices())
        if node.kind == "P":
            x = spec[0] if spec else vs[0]
            y = vs[0] if vs[1] == x else vs[1]
            return [x, y]
        if node.kind == "S":
            if len(spec) == 2:
                first, second = spec
            else:
                first = spec[0] if spec else min(vs)
                nbrs = set()
                for e in node.edges:
                    if first in (e.u, e.v):
                        nbrs.add(e.u if e.v == first else e.v)
                second = min(nbrs)
            walk = _walk_cycle(node.edges, first, second)
            rest = walk[1:]
            seq = [walk[0]]
            i, j = 0, len(rest) - 1
            toggle = True
            while i <= j:
                seq.append(rest[i] if toggle else rest[j])
                if toggle:
                    i += 1
                else:
                    j -= 1
                toggle = not toggle
            return seq
        # R-node: collapse a tree-partition rooted at the required vertices
        index = {v: i for i, v in enumerate(vs)}
        keys = sorted(set(e.key() for e in node.edges))
        sk = Graph(len(vs), [(index[a], index[b]) for a, b in keys])
        root_local = [index[v] for v in spec]
        tp = tree_partition_construct(sk, root_local or [0])
        lay = layout_from_tree_partition(sk, tp, root_node=0, first=tuple(root_local))
        return lay, vs

    def process_block(block_vs, root_vertex, attach):
        sub, order = g.subgraph(block_vs)
        if len(block_vs) == 2:
            u, v = order
            if root_vertex is not None and v == root_vertex:
                u, v = v, u
            graft_chain([u, v], attach)
            return
        ok, witness = planar_fan_conditions(sub, k)
        if not ok:
            raise PreconditionError("planar fan conditions fail on a block: %s" % witness)
        tree = build_spqr(sub)
        adj = tree.adjacency()
        if root_vertex is None:
            root_node, spec = 0, ()
        else:
            local_root = order.index(root_vertex)
            root_node = min(
                i for i, node in enumerate(tree.nodes) if local_root in node.vertices()
            )
            spec = (local_root,)

        def place(ni, via_vid, spec, attach):
            node = tree.nodes[ni]
            res = skeleton_chain(node, spec)
            if isinstance(res, list):
                graft_chain([order[v] for v in res], attach)
            else:
                lay, vs = res
                graft_layout(lay, [order[v] for v in vs], attach)
            for nj, vid in sorted(adj[ni]):
                if vid == via_vid:
                    continue
                a, b = tree.adhesion(vid)
                ga, gb = order[a], order[b]
                x, y = (ga, gb) if global_depth(ga) <= global_depth(gb) else (gb, ga)
                place(nj, vid, (order.index(x), order.index(y)), None)

        place(root_node, None, spec, attach)

    bct = biconnected_components(g)
    root_holder = None
    prev_root = None
    for comp in connected_components(g):
        comp_set = set(comp)
        attach = prev_root
        comp_blocks = [
            bi for bi in range(len(bct.blocks)) if set(bct.block_vertices(bi)) <= comp_set
        ]
        if not comp_blocks:
            v = comp[0]
            placed.add(v)
            if attach is not None:
                parent[v] = attach
            if root_holder is None:
                root_holder = v
            prev_root = v
            continue
        root_block = min(comp_blocks, key=lambda bi: min(bct.block_vertices(bi)))
        queue = [(root_block, None)]
        seen_blocks = {root_block}
        while queue:
            bi, via_cut = queue.pop(0)
            process_block(
                bct.block_vertices(bi), via_cut, attach if via_cut is None else None
            )
            for v in bct.block_vertices(bi):
                if v in bct.cutvertices:
                    for node2 in bct.tree.get(("cut", v), ()):
                        bj = node2[1]
                        if bj not in seen_blocks:
                            seen_blocks.add(bj)
                            queue.append((bj, v))
        comp_root = min((v for v in comp if v in placed), key=global_depth)
        if root_holder is None:
            root_holder = comp_root
        prev_root = comp_root

    layout = TreeLayout(root_holder, parent)
    report = validate_layout(g, layout)
    if not report.ok:
        raise StructureError(
            "planar construction produced an invalid layout: %s" % (report.violations[:4],)
        )
    return layout


def serialize_spqr(tree):
    """Node list with type tags; skeleton edges marked real or virtual with
    their partner tree-edge id."""
    lines = ["spqr %d %d" % (len(tree.nodes), len(tree.tree_edges))]
    for i, node in enumerate(tree.nodes):
        lines.append("node %d %s" % (i, node.kind))
        for e in sorted(node.edges, key=lambda e: (e.key(), e.virtual_id is not None)):
            u, v = e.key()
            if e.virtual_id is None:
                lines.append("edge %d %d %d real" % (i, u, v))
            else:
                tid = next(
                    t for t, (a, b, vid) in enumerate(tree.tree_edges) if vid == e.virtual_id
                )
                lines.append("edge %d %d %d virtual %d" % (i, u, v, tid))
    for t, (a, b, vid) in enumerate(tree.tree_edges):
        lines.append("tree %d %d %d" % (t, a, b))
    return "\n".join(lines) + "\n"
