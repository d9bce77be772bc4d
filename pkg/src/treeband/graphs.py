"""Simple undirected graphs: representation, parsing, family generators, cuts.

Vertices are always the dense range 0..n-1.  Graphs are immutable after
construction; derived graphs (subdivisions, completions) are new values.
"""

from collections import deque
from dataclasses import dataclass, field

from .exceptions import FormatError, ParameterError

__all__ = [
    "Graph",
    "FamilySpec",
    "parse_graph",
    "serialize_graph",
    "generate_family",
    "connected_components",
    "biconnected_components",
    "BlockCutTree",
    "menger_mu",
]


class Graph:
    """Immutable simple undirected graph on vertices 0..n-1.

    ``adjacency[v]`` is the sorted tuple of neighbours of v and
    ``neighbour_masks[v]`` the same set as a bitmask (bit i = vertex i).
    """

    __slots__ = ("n", "m", "adjacency", "edges", "neighbour_masks")

    def __init__(self, n, edges):
        if n < 0:
            raise ParameterError("vertex count must be nonnegative")
        seen = set()
        adj = [[] for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ParameterError("vertex id out of range: (%d, %d) with n=%d" % (u, v, n))
            if u == v:
                raise ParameterError("loop at vertex %d" % u)
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ParameterError("duplicate edge %s" % (key,))
            seen.add(key)
            adj[u].append(v)
            adj[v].append(u)
        self.n = n
        self.edges = tuple(sorted(seen))
        self.m = len(self.edges)
        self.adjacency = tuple(tuple(sorted(a)) for a in adj)
        masks = []
        for v in range(n):
            mask = 0
            for w in self.adjacency[v]:
                mask |= 1 << w
            masks.append(mask)
        self.neighbour_masks = tuple(masks)

    def neighbours(self, v):
        return self.adjacency[v]

    def closed_neighbourhood(self, v):
        return tuple(sorted(self.adjacency[v] + (v,)))

    def degree(self, v):
        return len(self.adjacency[v])

    def has_edge(self, u, v):
        return self.neighbour_masks[u] >> v & 1 == 1

    def subgraph(self, vertices):
        """Induced subgraph; returns (graph, old-id list in new-id order)."""
        order = sorted(vertices)
        index = {v: i for i, v in enumerate(order)}
        edges = [(index[u], index[v]) for u, v in self.edges if u in index and v in index]
        return Graph(len(order), edges), order

    def __eq__(self, other):
        return isinstance(other, Graph) and self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    def __repr__(self):
        return "Graph(n=%d, m=%d)" % (self.n, self.m)


@dataclass(frozen=True)
class FamilySpec:
    """Named graph family plus its integer parameters.

    Kinds and parameters:
      path(k), cycle(k), complete(k), star(k leaves),
      complete-bipartite(s, t), grid(rows, cols), wall(k), fan(k),
      dipole-subdivided(k), k-multiple-subdivided(k; base graph),
      subdivided-binary-tree(height)
    """

    kind: str
    params: tuple = ()
    base: Graph = None


def parse_graph(text):
    """Parse the edge-list format: '# comment' lines, then 'n m', then m lines 'u v' with u < v."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    header = None
    edges = []
    n = m = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if header is None:
            if len(parts) != 2:
                raise FormatError("expected header 'n m'", line=lineno)
            try:
                n, m = int(parts[0]), int(parts[1])
            except ValueError:
                raise FormatError("non-integer header", line=lineno)
            if n < 0 or m < 0:
                raise FormatError("negative counts in header", line=lineno)
            header = lineno
            continue
        if len(parts) != 2:
            raise FormatError("expected edge 'u v'", line=lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise FormatError("non-integer edge", line=lineno)
        if u == v:
            raise FormatError("loop %d %d" % (u, v), line=lineno)
        if not (0 <= u < v < n):
            raise FormatError("edge must satisfy 0 <= u < v < n", line=lineno)
        if (u, v) in edges:
            raise FormatError("duplicate edge %d %d" % (u, v), line=lineno)
        edges.append((u, v))
    if header is None:
        raise FormatError("missing header line")
    if len(edges) != m:
        raise FormatError("declared m=%d but found %d edges" % (m, len(edges)))
    return Graph(n, edges)


def serialize_graph(g):
    """Canonical edge-list text: header then edges sorted lexicographically."""
    lines = ["%d %d" % (g.n, g.m)]
    lines.extend("%d %d" % e for e in g.edges)
    return "\n".join(lines) + "\n"


def _require(cond, message):
    if not cond:
        raise ParameterError(message)


def generate_family(spec):
    """Build the named family graph with its documented, frozen vertex numbering."""
    kind, p = spec.kind, spec.params
    if kind == "path":
        _require(len(p) == 1 and p[0] >= 1, "path(k) needs k >= 1")
        k = p[0]
        return Graph(k, [(i, i + 1) for i in range(k - 1)])
    if kind == "cycle":
        _require(len(p) == 1 and p[0] >= 3, "cycle(k) needs k >= 3")
        k = p[0]
        return Graph(k, [(i, (i + 1) % k) for i in range(k)])
    if kind == "complete":
        _require(len(p) == 1 and p[0] >= 1, "complete(k) needs k >= 1")
        k = p[0]
        return Graph(k, [(i, j) for i in range(k) for j in range(i + 1, k)])
    if kind == "star":
        # centre is vertex 0, leaves 1..k
        _require(len(p) == 1 and p[0] >= 1, "star(k) needs k >= 1 leaves")
        k = p[0]
        return Graph(k + 1, [(0, i) for i in range(1, k + 1)])
    if kind == "complete-bipartite":
        # side A = 0..s-1, side B = s..s+t-1
        _require(len(p) == 2 and p[0] >= 1 and p[1] >= 1, "complete-bipartite(s,t) needs s,t >= 1")
        s, t = p
        return Graph(s + t, [(i, s + j) for i in range(s) for j in range(t)])
    if kind == "grid":
        # vertex (r, c) gets id r*cols + c
        _require(len(p) == 2 and p[0] >= 1 and p[1] >= 1, "grid(rows,cols) needs rows,cols >= 1")
        rows, cols = p
        edges = []
        for r in range(rows):
            for c in range(cols):
                if c + 1 < cols:
                    edges.append((r * cols + c, r * cols + c + 1))
                if r + 1 < rows:
                    edges.append((r * cols + c, (r + 1) * cols + c))
        return Graph(rows * cols, edges)
    if kind == "wall":
        return _wall(p)
    if kind == "fan":
        # universal vertex is id 0, the dominated path is 1..k
        _require(len(p) == 1 and p[0] >= 1, "fan(k) needs k >= 1")
        k = p[0]
        edges = [(0, i) for i in range(1, k + 1)]
        edges += [(i, i + 1) for i in range(1, k)]
        return Graph(k + 1, edges)
    if kind == "dipole-subdivided":
        # poles are 0 and 1, the k subdivision vertices are 2..k+1 (this is K_{2,k})
        _require(len(p) == 1 and p[0] >= 1, "dipole-subdivided(k) needs k >= 1")
        k = p[0]
        edges = []
        for i in range(k):
            edges.append((0, 2 + i))
            edges.append((1, 2 + i))
        return Graph(k + 2, edges)
    if kind == "k-multiple-subdivided":
        # base vertices keep their ids; midpoint of copy i of edge e_j (edges in
        # lexicographic order) gets id n_base + j*k + i
        _require(len(p) == 1 and p[0] >= 1, "k-multiple-subdivided(k) needs k >= 1")
        _require(spec.base is not None, "k-multiple-subdivided needs a base graph")
        k = p[0]
        base = spec.base
        edges = []
        nxt = base.n
        for (u, v) in base.edges:
            for _ in range(k):
                edges.append((u, nxt))
                edges.append((v, nxt))
                nxt += 1
        return Graph(nxt, edges)
    if kind == "subdivided-binary-tree":
        # complete binary tree of the given height (>= 1 level), heap numbering
        # 0..2^h-2, with every edge subdivided once; midpoints appended in edge order
        _require(len(p) == 1 and p[0] >= 1, "subdivided-binary-tree(h) needs h >= 1")
        h = p[0]
        size = 2 ** h - 1
        edges = []
        nxt = size
        for child in range(1, size):
            parent = (child - 1) // 2
            edges.append((parent, nxt))
            edges.append((child, nxt))
            nxt += 1
        return Graph(nxt, edges)
    raise ParameterError("unknown family kind %r" % kind)


def _wall(p):
    """The k-wall: 2k x k grid, drop vertical edges {(x,y),(x,y+1)} with x+y odd,
    then drop degree-one vertices.  Surviving grid points are renumbered in
    lexicographic (x, y) order, 1-indexed grid coordinates."""
    _require(len(p) == 1 and p[0] >= 2, "wall(k) needs k >= 2")
    k = p[0]
    verts = [(x, y) for x in range(1, 2 * k + 1) for y in range(1, k + 1)]
    edge_set = set()
    for (x, y) in verts:
        if x + 1 <= 2 * k:
            edge_set.add(((x, y), (x + 1, y)))
        if y + 1 <= k and (x + y) % 2 == 0:
            edge_set.add(((x, y), (x, y + 1)))
    deg = {v: 0 for v in verts}
    for a, b in edge_set:
        deg[a] += 1
        deg[b] += 1
    keep = [v for v in verts if deg[v] >= 2]
    index = {v: i for i, v in enumerate(keep)}
    edges = [(index[a], index[b]) for a, b in edge_set if a in index and b in index]
    return Graph(len(keep), edges)


def _mask_component(start_mask, masks, allowed):
    """Vertices (as a bitmask) reachable from start_mask inside `allowed`."""
    comp = start_mask & allowed
    frontier = comp
    while frontier:
        nxt = 0
        f = frontier
        while f:
            v = (f & -f).bit_length() - 1
            f &= f - 1
            nxt |= masks[v]
        nxt &= allowed & ~comp
        comp |= nxt
        frontier = nxt
    return comp


def connected_components(g):
    """Components as sorted vertex tuples, ordered by their minimum vertex."""
    remaining = (1 << g.n) - 1
    out = []
    while remaining:
        v = (remaining & -remaining).bit_length() - 1
        comp = _mask_component(1 << v, g.neighbour_masks, remaining)
        out.append(tuple(i for i in range(g.n) if comp >> i & 1))
        remaining &= ~comp
    return out


@dataclass(frozen=True)
class BlockCutTree:
    """Blocks (edge sets), cutvertices, and the bipartite block/cutvertex tree.

    Tree nodes are ("block", i) and ("cut", v); `tree` maps each node to the
    sorted tuple of its neighbours.  Isolated vertices appear in neither.
    """

    blocks: tuple
    cutvertices: tuple
    tree: dict = field(compare=False)

    def block_vertices(self, i):
        vs = set()
        for u, v in self.blocks[i]:
            vs.add(u)
            vs.add(v)
        return tuple(sorted(vs))


def biconnected_components(g):
    """Hopcroft-Tarjan blocks: (blocks as edge sets, cutvertices, block-cut tree)."""
    disc = [0] * g.n
    low = [0] * g.n
    timer = [1]
    edge_stack = []
    blocks = []
    cutvertices = set()

    for root in range(g.n):
        if disc[root]:
            continue
        # iterative DFS; stack holds (v, parent, neighbour iterator index)
        stack = [(root, -1, 0)]
        disc[root] = low[root] = timer[0]
        timer[0] += 1
        root_children = 0
        while stack:
            v, parent, i = stack[-1]
            if i < len(g.adjacency[v]):
                stack[-1] = (v, parent, i + 1)
                w = g.adjacency[v][i]
                if w == parent:
                    continue
                if not disc[w]:
                    edge_stack.append((min(v, w), max(v, w)))
                    disc[w] = low[w] = timer[0]
                    timer[0] += 1
                    if v == root:
                        root_children += 1
                    stack.append((w, v, 0))
                elif disc[w] < disc[v]:
                    edge_stack.append((min(v, w), max(v, w)))
                    low[v] = min(low[v], disc[w])
            else:
                stack.pop()
                if stack:
                    u = stack[-1][0]
                    low[u] = min(low[u], low[v])
                    if low[v] >= disc[u]:
                        # u separates v's subtree: pop one block
                        block = []
                        key = (min(u, v), max(u, v))
                        while edge_stack:
                            e = edge_stack.pop()
                            block.append(e)
                            if e == key:
                                break
                        blocks.append(tuple(sorted(block)))
                        if u != root or root_children > 1:
                            cutvertices.add(u)

    tree = {}
    for i, block in enumerate(blocks):
        tree[("block", i)] = []
    for v in cutvertices:
        tree[("cut", v)] = []
    for i, block in enumerate(blocks):
        vs = set()
        for u, v in block:
            vs.add(u)
            vs.add(v)
        for v in vs:
            if v in cutvertices:
                tree[("block", i)].append(("cut", v))
                tree[("cut", v)].append(("block", i))
    tree = {node: tuple(sorted(nbrs)) for node, nbrs in tree.items()}
    return BlockCutTree(tuple(blocks), tuple(sorted(cutvertices)), tree)


def _menger_flow(g, x_set, y_set):
    """Max flow on the split-vertex digraph; returns (flow, cap, adj, source, sink)."""
    n = g.n
    source, sink = 2 * n, 2 * n + 1
    cap = {}
    adj = [[] for _ in range(2 * n + 2)]

    def add(a, b, c):
        if (a, b) not in cap:
            cap[(a, b)] = 0
            cap[(b, a)] = 0
            adj[a].append(b)
            adj[b].append(a)
        cap[(a, b)] += c

    big = n + 1
    for v in range(n):
        add(2 * v, 2 * v + 1, 1)
    for u, v in g.edges:
        add(2 * u + 1, 2 * v, big)
        add(2 * v + 1, 2 * u, big)
    for x in x_set:
        add(source, 2 * x, big)
    for y in y_set:
        add(2 * y + 1, sink, big)

    flow = 0
    while True:
        parent = {source: None}
        queue = deque([source])
        while queue and sink not in parent:
            a = queue.popleft()
            for b in adj[a]:
                if b not in parent and cap[(a, b)] > 0:
                    parent[b] = a
                    queue.append(b)
        if sink not in parent:
            return flow, cap, adj, source, sink
        path = []
        b = sink
        while parent[b] is not None:
            a = parent[b]
            path.append((a, b))
            b = a
        push = min(cap[e] for e in path)
        for a, b in path:
            cap[(a, b)] -= push
            cap[(b, a)] += push
        flow += push


def menger_mu(g, x_set, y_set):
    """mu(X, Y): minimum order of a separation (A, B) with X in A, Y in B.

    Computed as max flow on the split-vertex digraph with unit vertex
    capacities; X and Y vertices themselves may be cut, so mu <= min(|X|, |Y|)
    and |X ∩ Y| always counts.
    """
    x_set, y_set = set(x_set), set(y_set)
    if not x_set or not y_set:
        return 0
    return _menger_flow(g, x_set, y_set)[0]


def menger_cut(g, x_set, y_set):
    """A minimum X-Y separator: (mu, sorted vertex list), from the residual graph."""
    x_set, y_set = set(x_set), set(y_set)
    if not x_set or not y_set:
        return 0, []
    flow, cap, adj, source, sink = _menger_flow(g, x_set, y_set)
    reach = {source}
    queue = deque([source])
    while queue:
        a = queue.popleft()
        for b in adj[a]:
            if b not in reach and cap[(a, b)] > 0:
                reach.add(b)
                queue.append(b)
    cut = [v for v in range(g.n) if 2 * v in reach and 2 * v + 1 not in reach]
    assert len(cut) == flow
    return flow, cut
