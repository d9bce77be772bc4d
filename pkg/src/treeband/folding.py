"""Decomposition folding: pull the bags relevant to an adhesion's
neighbourhoods next to it, then recurse on the in-between subtrees.

The fan fold bounds every vertex's bag-subtree diameter; the dipole fold
bounds how many bags any vertex pair shares.  Both share one region engine:

  * a region is a subtree of the input decomposition whose already-placed
    vertices are split into `active` (sitting in the parent output bag, with
    edge introductions possibly still inside the region) and `gone` (all
    their edges are covered outside; every occurrence in the region is
    deleted);
  * the engine collects a set of required bags, closes it under branching
    nodes, emits the contracted tree with `active` added to every bag and
    far-side adhesions pushed into the deeper endpoint, and recurses on the
    components in between.

Outputs are re-validated (vertex subtrees connected, all edges covered) on
every run.
"""

from .decompositions import (
    TreeDecomposition,
    TreeQueryIndex,
    check_dipole_conditions,
    check_fan_conditions,
    validate_decomposition,
)
from .exceptions import PreconditionError, StructureError

__all__ = [
    "fold_fan",
    "fold_dipole",
    "vertex_subtree_diameters",
    "fan_fold_diameter_bound",
]


def fan_fold_diameter_bound(a, c):
    """Diameter guarantee of the fan fold for checked parameters (a, c)."""
    return 6 * c * a


class _Region:
    """Shared immutable context for one fold run."""

    def __init__(self, g, d, root_node):
        self.g = g
        self.d = d
        self.idx = TreeQueryIndex(d.n_nodes, d.adj, root_node)
        # intro assignment: shallowest bag of each vertex, deeper endpoint per edge
        t_vertex = {}
        for v in range(g.n):
            nodes = d.nodes_with(v)
            if not nodes:
                raise StructureError("vertex %d not in any bag" % v)
            t_vertex[v] = min(nodes, key=lambda t: (self.idx.depth[t], t))
        self.intro_nodes_of = {v: set() for v in range(g.n)}
        for e in g.edges:
            tx, ty = t_vertex[e[0]], t_vertex[e[1]]
            te = tx if self.idx.depth[tx] >= self.idx.depth[ty] else ty
            self.intro_nodes_of[e[0]].add(te)
            self.intro_nodes_of[e[1]].add(te)
        self.out_bags = []
        self.out_edges = []

    def emit(self, bag, parent_out):
        t = len(self.out_bags)
        self.out_bags.append(frozenset(bag))
        if parent_out is not None:
            self.out_edges.append((parent_out, t))
        return t

    def dist(self, a, b):
        l = self.idx.lca(a, b)
        return self.idx.depth[a] + self.idx.depth[b] - 2 * self.idx.depth[l]

    def median(self, a, b, c):
        return self.idx.branching(a, b, c)

    def median_closure(self, nodes):
        nodes = sorted(set(nodes))
        extra = set(nodes)
        for i in range(len(nodes)):
            for j in range(i + 1, len(nodes)):
                for k in range(j + 1, len(nodes)):
                    extra.add(self.median(nodes[i], nodes[j], nodes[k]))
        return extra


def _tree_components(d, nodes, removed):
    """Components of the region subtree after deleting `removed` nodes."""
    nodes = set(nodes)
    removed = set(removed)
    seen = set(removed)
    comps = []
    for s in sorted(nodes):
        if s in seen:
            continue
        comp = {s}
        seen.add(s)
        stack = [s]
        while stack:
            v = stack.pop()
            for w in d.adj[v]:
                if w in nodes and w not in seen:
                    seen.add(w)
                    comp.add(w)
                    stack.append(w)
        comps.append(comp)
    return comps


def _greedy_tree_multicut(d, nodes, rroot, colour_sets):
    """Smallest-ish node set whose removal leaves no component with two colours.

    `colour_sets` maps a colour to the region nodes carrying it.  Classic
    bottom-up greedy: cut a node as soon as its residual subtree would carry
    two colours.
    """
    colours_at = {t: set() for t in nodes}
    for colour, ts in colour_sets.items():
        for t in ts:
            colours_at[t].add(colour)
    parent = {rroot: None}
    order = [rroot]
    stack = [rroot]
    nodes = set(nodes)
    while stack:
        v = stack.pop()
        for w in d.adj[v]:
            if w in nodes and w not in parent:
                parent[w] = v
                order.append(w)
                stack.append(w)
    cut = set()
    residual = {}
    for v in reversed(order):
        col = set(colours_at[v])
        for w in d.adj[v]:
            if w in nodes and parent.get(w) == v and w not in cut:
                col |= residual[w]
        if len(col) >= 2:
            cut.add(v)
            residual[v] = set()
        else:
            residual[v] = col
    return cut


def _fold(g, d, required_fn):
    """Shared fold driver; `required_fn(ctx, nodes, rroot, x_act)` returns the
    required bag nodes for a region with active vertices x_act."""
    if d.n_nodes == 1:
        return TreeDecomposition(d.bags, [])
    if not d.is_tree():
        raise StructureError("decomposition tree is not a tree")
    # initial adhesion: incident to the bag containing vertex 0 (min node id),
    # toward its smallest neighbour
    t0_candidates = [t for t in range(d.n_nodes) if 0 in d.bags[t]]
    t0 = min(t0_candidates) if t0_candidates else 0
    s0 = min(d.adj[t0])
    ctx = _Region(g, d, t0)
    a0 = d.adhesion(t0, s0)
    root_out = ctx.emit(a0, None)
    side_t0 = set(d.side_nodes(s0, t0))
    side_s0 = set(d.side_nodes(t0, s0))
    _fold_region(ctx, side_t0, frozenset(a0), frozenset(), root_out, t0, None, required_fn)
    _fold_region(ctx, side_s0, frozenset(a0), frozenset(), root_out, s0, None, required_fn)
    out = TreeDecomposition(ctx.out_bags, ctx.out_edges)
    report = validate_decomposition(g, out)
    if not report.ok("T1", "T2"):
        raise StructureError("fold produced an invalid decomposition: %s" % report.results)
    return out


def _fold_region(ctx, nodes, active, gone, parent_out, rroot, far, required_fn):
    d = ctx.d
    if not nodes:
        return
    x_act = frozenset(
        x for x in active if any(t in nodes for t in ctx.intro_nodes_of[x])
    )
    gone = frozenset(gone | (active - x_act))

    if len(nodes) == 1:
        t = next(iter(nodes))
        bag = (d.bags[t] - gone) | x_act
        ctx.emit(bag, parent_out)
        return

    if not x_act:
        # the region is edge-independent from everything placed: restart on a
        # bridge adhesion chosen at the bag holding the minimum fresh vertex
        fresh = set()
        for t in nodes:
            fresh |= d.bags[t]
        fresh -= gone
        if not fresh:
            return
        vmin = min(fresh)
        t_star = min(t for t in nodes if vmin in d.bags[t])
        s_star = min(w for w in d.adj[t_star] if w in nodes)
        bridge_bag = d.adhesion(t_star, s_star) - gone
        bridge = ctx.emit(bridge_bag, parent_out)
        for side_root in (t_star, s_star):
            other = s_star if side_root == t_star else t_star
            side = {
                w
                for w in d.side_nodes(other, side_root)
                if w in nodes
            }
            _fold_region(
                ctx, side, frozenset(bridge_bag), gone, bridge, side_root, None, required_fn
            )
        return

    required = set(required_fn(ctx, nodes, rroot, far, x_act))
    if not required:
        required = {rroot}
    closure = ctx.median_closure(required)

    # contracted tree on the closure: adjacent iff no closure node in between
    cl = sorted(closure)
    hat_adj = {b: [] for b in cl}
    for i in range(len(cl)):
        for j in range(i + 1, len(cl)):
            x, y = cl[i], cl[j]
            dxy = ctx.dist(x, y)
            if not any(
                z != x and z != y and ctx.dist(x, z) + ctx.dist(z, y) == dxy
                for z in cl
            ):
                hat_adj[x].append(y)
                hat_adj[y].append(x)
    hat_root = min(cl, key=lambda b: (ctx.dist(b, rroot), b))
    hat_parent = {hat_root: None}
    hat_depth = {hat_root: 0}
    bfs = [hat_root]
    while bfs:
        nxt = []
        for v in bfs:
            for w in hat_adj[v]:
                if w not in hat_parent:
                    hat_parent[w] = v
                    hat_depth[w] = hat_depth[v] + 1
                    nxt.append(w)
        bfs = nxt

    comps = _tree_components(d, nodes, closure)
    comp_info = []
    for comp in comps:
        attach = []
        for b in cl:
            links = [w for w in d.adj[b] if w in comp]
            for w in links:
                attach.append((b, w))
        if len(attach) > 2:
            raise StructureError("component touches more than two closure bags")
        comp_info.append((comp, attach))

    # pushes: for an in-between component the far adhesion lands in the deeper bag
    pushes = {b: set() for b in cl}
    plans = []
    for comp, attach in comp_info:
        if not attach:
            continue
        if len(attach) == 2:
            (b1, c1), (b2, c2) = attach
            if hat_depth[b1] < hat_depth[b2]:
                (b1, c1), (b2, c2) = (b2, c2), (b1, c1)
            adh = (d.adhesion(b1, c1) | d.adhesion(b2, c2))
            pushes[b1] |= d.adhesion(b2, c2) - gone
            plans.append((comp, b1, c1, c2, adh))
        else:
            (b1, c1) = attach[0]
            plans.append((comp, b1, c1, None, d.adhesion(b1, c1)))

    out_of = {}
    for b in sorted(cl, key=lambda x: (hat_depth[x], x)):
        bag = (d.bags[b] - gone) | x_act | pushes[b]
        parent_bag = parent_out if hat_parent[b] is None else out_of[hat_parent[b]]
        out_of[b] = ctx.emit(bag, parent_bag)

    for comp, b1, c1, c2, adh in plans:
        keep = frozenset(
            x for x in x_act if any(t in comp for t in ctx.intro_nodes_of[x])
        )
        active_c = frozenset((adh - gone - x_act) | keep)
        gone_c = frozenset(gone | (x_act - keep))
        _fold_region(ctx, comp, active_c, gone_c, out_of[b1], c1, c2, required_fn)


def _fan_required(ctx, nodes, rroot, far, x_act):
    req = set()
    for x in x_act:
        req |= {t for t in ctx.intro_nodes_of[x] if t in nodes}
    return req


def _dipole_required(ctx, nodes, rroot, far, x_act):
    # anchoring both region entry points keeps every active vertex's
    # occurrence subtree attached to the contracted tree, so actives without
    # introductions inside a component can be retired there
    anchors = {rroot} | ({far} if far is not None else set())
    if len(x_act) == 1:
        return anchors
    colour_sets = {
        x: {t for t in ctx.intro_nodes_of[x] if t in nodes} for x in sorted(x_act)
    }
    cut = _greedy_tree_multicut(ctx.d, nodes, rroot, colour_sets)
    return cut | anchors


def fold_fan(g, d, params):
    """Fold a well-formed decomposition passing the fan conditions (a, b, c);
    the output is a valid decomposition whose bag subtrees have diameter at
    most 6*c*a."""
    a, b, c = params
    ok, witnesses = check_fan_conditions(g, d, a, b, c)
    if not ok:
        raise PreconditionError("fan conditions fail at (a=%d, b=%d, c=%d): %s" % (a, b, c, witnesses[:3]))
    return _fold(g, d, _fan_required)


def fold_dipole(g, d, params):
    """Fold a well-formed decomposition passing the dipole conditions (a, b, c);
    the output is a valid decomposition with bounded pairwise bag overlap."""
    a, b, c = params
    ok, witnesses = check_dipole_conditions(g, d, a, b, c)
    if not ok:
        raise PreconditionError("dipole conditions fail at (a=%d, b=%d, c=%d): %s" % (a, b, c, witnesses[:3]))
    return _fold(g, d, _dipole_required)


def vertex_subtree_diameters(d):
    """Per-vertex diameter (in tree edges) of the subtree of bags containing it."""
    union = set()
    for b in d.bags:
        union |= b
    out = {}
    for v in sorted(union):
        nodes = set(d.nodes_with(v))

        def far(start):
            dist = {start: 0}
            stack = [start]
            while stack:
                x = stack.pop()
                for y in d.adj[x]:
                    if y in nodes and y not in dist:
                        dist[y] = dist[x] + 1
                        stack.append(y)
            far_node = max(dist, key=lambda u: (dist[u], u))
            return far_node, dist[far_node]

        start = min(nodes)
        a, _ = far(start)
        _, dia = far(a)
        out[v] = dia
    return out
