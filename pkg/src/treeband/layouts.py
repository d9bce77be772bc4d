"""Tree-layouts and linear layouts: validation, bandwidth and related metrics,
and the constructive conversions (tree-partition collapse, subdivision
extension, proper chordal completion)."""

from dataclasses import dataclass, field
from itertools import combinations

from .exceptions import FormatError, InvalidLayoutError, StructureError
from .graphs import Graph, connected_components

__all__ = [
    "TreeLayout",
    "LinearLayout",
    "TreePartition",
    "LayoutReport",
    "validate_layout",
    "bandwidth_of_layout",
    "linear_bandwidth",
    "layout_from_tree_partition",
    "extend_layout_to_subdivision",
    "treespan_of_layout",
    "edge_treewidth_of_layout",
    "proper_chordal_completion",
    "serialize_layout",
    "parse_layout",
    "chain_layouts",
]


class TreeLayout:
    """Rooted tree on exactly the vertices of the host graph.

    `root` is None only for the empty layout (empty graph).  `parent` maps
    every non-root vertex to its parent; `depth` is derived.
    """

    __slots__ = ("root", "parent", "depth", "children")

    def __init__(self, root, parent):
        self.root = root
        self.parent = dict(parent)
        if root is None:
            if self.parent:
                raise StructureError("empty layout cannot have parent entries")
            self.depth = {}
            self.children = {}
            return
        if root in self.parent:
            raise StructureError("root must not have a parent")
        children = {root: []}
        for c in self.parent:
            children.setdefault(c, [])
        for c, p in sorted(self.parent.items()):
            if p not in children:
                raise StructureError("parent %r is not a vertex of the layout" % (p,))
            children[p].append(c)
        depth = {root: 0}
        stack = [root]
        while stack:
            v = stack.pop()
            for c in children[v]:
                depth[c] = depth[v] + 1
                stack.append(c)
        if len(depth) != len(self.parent) + 1:
            raise StructureError("parent relation contains a cycle or unreachable vertex")
        self.depth = depth
        self.children = children

    def vertices(self):
        return self.depth.keys()

    def is_ancestor(self, a, b):
        """True iff a is an ancestor of b (inclusive)."""
        while b is not None and self.depth.get(b, -1) >= self.depth[a]:
            if a == b:
                return True
            b = self.parent.get(b)
        return False

    def path_between(self, a, b):
        """Vertices of the tree path from a to b, inclusive."""
        da, db = self.depth[a], self.depth[b]
        pa, pb = a, b
        left, right = [], []
        while self.depth[pa] > self.depth[pb]:
            left.append(pa)
            pa = self.parent[pa]
        while self.depth[pb] > self.depth[pa]:
            right.append(pb)
            pb = self.parent[pb]
        while pa != pb:
            left.append(pa)
            right.append(pb)
            pa = self.parent[pa]
            pb = self.parent[pb]
        return left + [pa] + right[::-1]

    def subtree(self, v):
        out = [v]
        stack = [v]
        while stack:
            u = stack.pop()
            for c in self.children.get(u, ()):
                out.append(c)
                stack.append(c)
        return out

    def __eq__(self, other):
        return (
            isinstance(other, TreeLayout)
            and self.root == other.root
            and self.parent == other.parent
        )

    def __repr__(self):
        return "TreeLayout(root=%r, n=%d)" % (self.root, len(self.depth))


@dataclass(frozen=True)
class LinearLayout:
    """Bijection order: V -> 1..n."""

    order: dict

    def as_path_layout(self):
        """The same order viewed as a path-shaped TreeLayout."""
        seq = sorted(self.order, key=lambda v: self.order[v])
        if not seq:
            return TreeLayout(None, {})
        parent = {seq[i]: seq[i - 1] for i in range(1, len(seq))}
        return TreeLayout(seq[0], parent)


@dataclass(frozen=True)
class TreePartition:
    """Partition of V indexed by the nodes of a tree.

    `parts` maps node id -> tuple of vertices; `tree_edges` are node pairs.
    """

    parts: dict
    tree_edges: tuple

    def width(self):
        return max((len(p) for p in self.parts.values()), default=0)

    def validate(self, g):
        seen = set()
        for p in self.parts.values():
            for v in p:
                if v in seen:
                    raise StructureError("vertex %d in two parts" % v)
                seen.add(v)
        if seen != set(range(g.n)):
            raise StructureError("parts do not partition V")
        nodes = set(self.parts)
        for a, b in self.tree_edges:
            if a not in nodes or b not in nodes:
                raise StructureError("tree edge on unknown node")
        # the node tree must be a tree
        if nodes:
            adj = {t: set() for t in nodes}
            for a, b in self.tree_edges:
                adj[a].add(b)
                adj[b].add(a)
            seen_nodes = set()
            stack = [next(iter(sorted(nodes)))]
            while stack:
                t = stack.pop()
                if t in seen_nodes:
                    continue
                seen_nodes.add(t)
                stack.extend(adj[t])
            if seen_nodes != nodes or len(self.tree_edges) != len(nodes) - 1:
                raise StructureError("part index graph is not a tree")
        node_of = {v: t for t, part in self.parts.items() for v in part}
        edge_ok = set(map(frozenset, self.tree_edges))
        for u, v in g.edges:
            tu, tv = node_of[u], node_of[v]
            if tu != tv and frozenset((tu, tv)) not in edge_ok:
                raise StructureError("edge %s spans non-adjacent parts" % ((u, v),))
        return True


@dataclass(frozen=True)
class LayoutReport:
    ok: bool
    violations: tuple = ()


def validate_layout(g, t):
    """Check that every edge of g joins an ancestor-descendant pair of t."""
    if set(t.depth) != set(range(g.n)):
        raise StructureError("layout does not span V(g)")
    bad = []
    for u, v in g.edges:
        a, b = (u, v) if t.depth[u] <= t.depth[v] else (v, u)
        if not t.is_ancestor(a, b):
            bad.append((u, v))
    return LayoutReport(not bad, tuple(bad))


def bandwidth_of_layout(g, t):
    """Max depth difference over edges; requires a valid layout."""
    report = validate_layout(g, t)
    if not report.ok:
        raise InvalidLayoutError("layout invalid on edges %s" % (report.violations,))
    return max((abs(t.depth[u] - t.depth[v]) for u, v in g.edges), default=0)


def linear_bandwidth(g, s):
    order = s.order
    if sorted(order) != list(range(g.n)) or sorted(order.values()) != list(range(1, g.n + 1)):
        raise StructureError("order is not a bijection V -> 1..n")
    return max((abs(order[u] - order[v]) for u, v in g.edges), default=0)


def layout_from_tree_partition(g, tp, root_node=None, first=()):
    """Collapse a tree-partition into a tree-layout of bandwidth <= 2*width.

    Each part becomes a chain (ascending vertex ids, except that the vertices
    in `first` are pulled to the front in the given order) and child parts hang
    below the end of their parent's chain.  By default the tree is rooted at
    the node whose part contains the minimum vertex id.
    """
    tp.validate(g)
    if not tp.parts:
        return TreeLayout(None, {})
    if root_node is None:
        root_node = min(
            (t for t in tp.parts if tp.parts[t]),
            key=lambda t: min(tp.parts[t]),
            default=sorted(tp.parts)[0],
        )
    adj = {t: [] for t in tp.parts}
    for a, b in tp.tree_edges:
        adj[a].append(b)
        adj[b].append(a)

    def chain(part):
        head = [v for v in first if v in part]
        rest = sorted(v for v in part if v not in head)
        return head + rest

    parent = {}
    root_chain = chain(tp.parts[root_node])
    root = root_chain[0] if root_chain else None
    for i in range(1, len(root_chain)):
        parent[root_chain[i]] = root_chain[i - 1]
    attach = {root_node: root_chain[-1] if root_chain else None}
    seen = {root_node}
    stack = [root_node]
    while stack:
        t = stack.pop()
        for s in sorted(adj[t]):
            if s in seen:
                continue
            seen.add(s)
            seq = chain(tp.parts[s])
            up = attach[t]
            for v in seq:
                if up is None:
                    # degenerate: empty ancestor chain, start a new root
                    root = v
                else:
                    parent[v] = up
                up = v
            attach[s] = up
            stack.append(s)
    layout = TreeLayout(root, parent)
    report = validate_layout(g, layout)
    if not report.ok:
        raise InvalidLayoutError("tree-partition collapse produced invalid layout")
    return layout


def extend_layout_to_subdivision(g, t, edge, times):
    """Subdivide `edge` `times` times and extend the layout below the deeper endpoint.

    The new vertices hang on a chain below y; positions along the chain zigzag
    (odd positions ascending, then even descending) so no new edge stretches
    more than max(bandwidth, 2) <= bandwidth+1.
    """
    x, y = edge
    if not g.has_edge(x, y):
        raise StructureError("edge %s not in graph" % (edge,))
    if times < 1:
        raise StructureError("times must be >= 1")
    report = validate_layout(g, t)
    if not report.ok:
        raise InvalidLayoutError("layout invalid")
    if t.depth[x] > t.depth[y]:
        x, y = y, x
    new = list(range(g.n, g.n + times))
    edges = [e for e in g.edges if e != (min(x, y), max(x, y))]
    path = [x] + new + [y]
    for i in range(len(path) - 1):
        a, b = path[i], path[i + 1]
        edges.append((min(a, b), max(a, b)))
    h = Graph(g.n + times, edges)

    # chain under y; subdivision vertex i (0-based along the path from x)
    # sits at chain position positions[i]: odd 1-based positions ascending,
    # then even positions descending, so consecutive path vertices are at
    # chain distance <= 2 and the first one is directly below y
    positions = list(range(1, times + 1, 2)) + list(range(times - times % 2, 0, -2))
    parent = dict(t.parent)
    by_pos = {pos: new[i] for i, pos in enumerate(positions)}
    prev = y
    for pos in range(1, times + 1):
        parent[by_pos[pos]] = prev
        prev = by_pos[pos]
    new_layout = TreeLayout(t.root, parent)
    if not validate_layout(h, new_layout).ok:
        raise InvalidLayoutError("subdivision extension produced invalid layout")
    return h, new_layout


def treespan_of_layout(g, t):
    """Max pruned-subtree size minus one.

    The pruned subtree of v keeps the descendants w of v (v included) such
    that some neighbour of v lies in the subtree below w (w included).
    """
    report = validate_layout(g, t)
    if not report.ok:
        raise InvalidLayoutError("layout invalid")
    if g.n == 0:
        return 0
    best = 0
    for v in t.vertices():
        nbrs = set(g.adjacency[v])
        kept = 0
        # post-order over the subtree of v: does the subtree at w contain a neighbour?
        order = t.subtree(v)
        has_nbr = {}
        for w in reversed(order):
            flag = w in nbrs
            for c in t.children.get(w, ()):
                if c in has_nbr:
                    flag = flag or has_nbr[c]
            has_nbr[w] = flag
            if flag or w == v:
                kept += 1
        best = max(best, kept - 1)
    return best


def edge_treewidth_of_layout(g, t):
    """Max over nodes u of edges with one end in the subtree of u (inclusive)
    and the other at a strict ancestor of u."""
    report = validate_layout(g, t)
    if not report.ok:
        raise InvalidLayoutError("layout invalid")
    best = 0
    for u in t.vertices():
        sub = set(t.subtree(u))
        cnt = 0
        for a, b in g.edges:
            if (a in sub) != (b in sub):
                # the outside endpoint is an ancestor of u since the layout is valid
                cnt += 1
        best = max(best, cnt)
    return best


def proper_chordal_completion(g, t):
    """Fill each tree-interval [x, y] of an edge xy into a clique.

    Returns (H, omega(H) - 1); the latter equals the layout bandwidth.
    """
    report = validate_layout(g, t)
    if not report.ok:
        raise InvalidLayoutError("layout invalid")
    extra = set(g.edges)
    best_interval = 1 if g.n else 0
    for u, v in g.edges:
        interval = t.path_between(u, v)
        best_interval = max(best_interval, len(interval))
        for a, b in combinations(interval, 2):
            extra.add((min(a, b), max(a, b)))
    h = Graph(g.n, sorted(extra))
    return h, best_interval - 1


def maximal_cliques(g):
    """Bron-Kerbosch with pivoting; desk scale."""
    cliques = []

    def expand(r, p, x):
        if not p and not x:
            cliques.append(frozenset(r))
            return
        pivot = max(p | x, key=lambda v: len(p & set(g.adjacency[v])))
        for v in sorted(p - set(g.adjacency[pivot])):
            nv = set(g.adjacency[v])
            expand(r | {v}, p & nv, x & nv)
            p = p - {v}
            x = x | {v}

    expand(set(), set(range(g.n)), set())
    return cliques


def cliques_consecutive_on_paths(g, t):
    """True iff every maximal clique of g induces a contiguous vertical path of t."""
    for clique in maximal_cliques(g):
        vs = sorted(clique, key=lambda v: t.depth[v])
        lo, hi = vs[0], vs[-1]
        path = t.path_between(lo, hi)
        if set(path) != set(vs):
            return False
        if len(path) != len(vs):
            return False
    return True


def chain_layouts(g):
    """Deterministic per-component chaining helper used by layout builders:
    yields components ordered by their representative (minimum vertex)."""
    return connected_components(g)


def serialize_layout(t):
    """'root r' line then 'child parent' lines sorted by child; 'empty' if no root."""
    if t.root is None:
        return "empty\n"
    lines = ["root %d" % t.root]
    for c in sorted(t.parent):
        lines.append("%d %d" % (c, t.parent[c]))
    return "\n".join(lines) + "\n"


def parse_layout(text):
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise FormatError("empty layout text")
    if lines[0] == "empty":
        return TreeLayout(None, {})
    if not lines[0].startswith("root "):
        raise FormatError("expected 'root r' header", line=1)
    root = int(lines[0].split()[1])
    parent = {}
    for i, ln in enumerate(lines[1:], start=2):
        parts = ln.split()
        if len(parts) != 2:
            raise FormatError("expected 'child parent'", line=i)
        c, p = int(parts[0]), int(parts[1])
        if c in parent:
            raise FormatError("duplicate child %d" % c, line=i)
        parent[c] = p
    return TreeLayout(root, parent)
