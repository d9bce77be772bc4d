"""Tree decompositions: the T1-T8 property checks, well-formedness
enforcement, exact and heuristic providers, constant-time tree queries,
per-vertex neighbourhood trees, weights and the fan/dipole condition checks."""

from dataclasses import dataclass, field
from itertools import combinations

from .exceptions import FormatError, SizeLimitError, StructureError
from .graphs import Graph, connected_components, menger_cut, menger_mu

__all__ = [
    "TreeDecomposition",
    "ValidationReport",
    "validate_decomposition",
    "enforce_wellformed",
    "exact_tree_decomposition",
    "heuristic_tree_decomposition",
    "TreeQueryIndex",
    "build_query_index",
    "NeighbourhoodTree",
    "neighbourhood_trees",
    "check_fan_conditions",
    "measure_fan_parameters",
    "weight_w",
    "WeightResult",
    "check_dipole_conditions",
    "measure_dipole_parameters",
    "overlap_number",
    "serialize_decomposition",
    "parse_decomposition",
    "layout_from_decomposition",
]


class TreeDecomposition:
    """Tree with bags.  Nodes are 0..len(bags)-1; `root` is optional and only
    needed by the rooted operations (queries, intro maps, folding)."""

    __slots__ = ("bags", "edges", "root", "adj")

    def __init__(self, bags, edges, root=None):
        self.bags = [frozenset(b) for b in bags]
        self.edges = [tuple(sorted(e)) for e in edges]
        self.root = root
        n = len(self.bags)
        adj = [[] for _ in range(n)]
        for a, b in self.edges:
            if not (0 <= a < n and 0 <= b < n) or a == b:
                raise StructureError("bad tree edge %s" % ((a, b),))
            adj[a].append(b)
            adj[b].append(a)
        self.adj = [tuple(sorted(x)) for x in adj]

    @property
    def n_nodes(self):
        return len(self.bags)

    def width(self):
        return max((len(b) for b in self.bags), default=0) - 1

    def adhesion(self, a, b):
        return self.bags[a] & self.bags[b]

    def is_tree(self):
        n = len(self.bags)
        if n == 0:
            return False
        if len(self.edges) != n - 1:
            return False
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for w in self.adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == n

    def nodes_with(self, v):
        return [t for t in range(len(self.bags)) if v in self.bags[t]]

    def rooted_at(self, root):
        return TreeDecomposition(self.bags, self.edges, root=root)

    def parents(self, root=None):
        """Parent array for the given (or stored) root; parent[root] = -1."""
        root = self.root if root is None else root
        if root is None:
            raise StructureError("decomposition is not rooted")
        parent = [-2] * len(self.bags)
        parent[root] = -1
        stack = [root]
        while stack:
            v = stack.pop()
            for w in self.adj[v]:
                if parent[w] == -2:
                    parent[w] = v
                    stack.append(w)
        return parent

    def component_nodes(self, removed):
        """Connected components of the tree after deleting the node set `removed`."""
        removed = set(removed)
        seen = set(removed)
        comps = []
        for s in range(len(self.bags)):
            if s in seen:
                continue
            comp = [s]
            seen.add(s)
            stack = [s]
            while stack:
                v = stack.pop()
                for w in self.adj[v]:
                    if w not in seen:
                        seen.add(w)
                        comp.append(w)
                        stack.append(w)
            comps.append(sorted(comp))
        return comps

    def side_nodes(self, a, b):
        """Nodes of the component of T - edge(a,b) containing b."""
        seen = {a, b}
        out = [b]
        stack = [b]
        while stack:
            v = stack.pop()
            for w in self.adj[v]:
                if w not in seen:
                    seen.add(w)
                    out.append(w)
                    stack.append(w)
        return out

    def bag_union(self, nodes):
        out = set()
        for t in nodes:
            out |= self.bags[t]
        return out

    def __repr__(self):
        return "TreeDecomposition(nodes=%d, width=%d)" % (len(self.bags), self.width())


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class ValidationReport:
    """Pass/fail per property T1..T8 with a witness for each failure."""

    results: dict

    def ok(self, *props):
        props = props or tuple(self.results)
        return all(self.results[p][0] for p in props if p in self.results)

    def witness(self, prop):
        return self.results[prop][1]


def validate_decomposition(g, d, k=None):
    """Report over T1..T6 (always) and T7/T8 (when k is given).

    T8 is checked by exhaustive search over node pairs and bag subsets of size
    at most k+1 with a min-cut computation per pair; exponential in k.
    """
    if not d.is_tree():
        raise StructureError("decomposition tree is not a tree")
    results = {}

    # T1: every vertex's bags induce a nonempty connected subtree
    t1 = (True, None)
    for v in range(g.n):
        nodes = d.nodes_with(v)
        if not nodes:
            t1 = (False, ("missing", v))
            break
        seen = {nodes[0]}
        nodes_set = set(nodes)
        stack = [nodes[0]]
        while stack:
            t = stack.pop()
            for s in d.adj[t]:
                if s in nodes_set and s not in seen:
                    seen.add(s)
                    stack.append(s)
        if seen != nodes_set:
            t1 = (False, ("disconnected", v))
            break
    results["T1"] = t1

    # T2: each edge inside some bag
    t2 = (True, None)
    for e in g.edges:
        if not any(e[0] in b and e[1] in b for b in d.bags):
            t2 = (False, e)
            break
    results["T2"] = t2

    # T3: bags pairwise distinct
    t3 = (True, None)
    seen_bags = {}
    for t, b in enumerate(d.bags):
        if b in seen_bags:
            t3 = (False, (seen_bags[b], t))
            break
        seen_bags[b] = t
    results["T3"] = t3

    # T4 (rooted form): for every node, the residue of every subtree hanging
    # away from the root is connected.  With no stored root, pass iff some
    # root choice works; the unrooted all-components form is not enforceable
    # without growing bags (a star at width one already fails it).
    results["T4"] = _check_t4(g, d)

    # T5: each adhesion vertex has neighbours strictly beyond both sides
    t5 = (True, None)
    for a, b in d.edges:
        adh = d.adhesion(a, b)
        for side_root, other in ((a, b), (b, a)):
            side = d.side_nodes(other, side_root)
            beyond = d.bag_union(side) - adh
            for v in adh:
                if not (set(g.adjacency[v]) & beyond):
                    t5 = (False, (v, (a, b)))
                    break
            if not t5[0]:
                break
        if not t5[0]:
            break
    results["T5"] = t5

    # T6: equal adhesions at a common node force the bag to equal them
    t6 = (True, None)
    for s in range(d.n_nodes):
        by_adh = {}
        for t in d.adj[s]:
            adh = d.adhesion(s, t)
            if adh in by_adh and adh != d.bags[s]:
                t6 = (False, (s, by_adh[adh], t))
                break
            by_adh[adh] = t
        if not t6[0]:
            break
    results["T6"] = t6

    if k is not None:
        t7 = (True, None)
        for a, b in d.edges:
            if len(d.adhesion(a, b)) > k:
                t7 = (False, (a, b))
                break
        results["T7"] = t7
        results["T8"] = _check_t8(g, d, k)
    return ValidationReport(results)


def _directed_edge_ok(g, d, s, t):
    """Is G[beta(side of t seen from s) minus beta(s)] connected (or empty)?"""
    side = d.side_nodes(s, t)
    residue = sorted(d.bag_union(side) - d.bags[s])
    if len(residue) <= 1:
        return True
    sub, _ = g.subgraph(residue)
    return len(connected_components(sub)) == 1


def _t4_roots(g, d):
    """All roots for which the rooted residue-connectivity property holds.

    A root works iff it avoids the far side of every bad directed edge; bad
    edge (s -> t) means the subtree at t, seen from s, has a disconnected
    residue."""
    allowed = set(range(d.n_nodes))
    bad = []
    for s, t in d.edges:
        if not _directed_edge_ok(g, d, s, t):
            # the subtree hanging at t (seen from s) is bad when it points
            # away from the root, so the root must sit inside it
            allowed &= set(d.side_nodes(s, t))
            bad.append((s, t))
        if not _directed_edge_ok(g, d, t, s):
            allowed &= set(d.side_nodes(t, s))
            bad.append((t, s))
    return sorted(allowed), bad


def _check_t4(g, d):
    roots, bad = _t4_roots(g, d)
    if d.root is not None:
        if d.root in roots:
            return (True, None)
        for s, t in bad:
            if d.root in d.side_nodes(s, t):
                return (False, (s, tuple(sorted(d.bag_union(d.side_nodes(s, t)) - d.bags[s]))))
        return (False, bad[0] if bad else None)
    if roots:
        return (True, None)
    s, t = bad[0]
    return (False, (s, tuple(sorted(d.bag_union(d.side_nodes(s, t)) - d.bags[s]))))


def _path_nodes(d, a, b):
    """Nodes of the tree path from a to b."""
    prev = {a: None}
    stack = [a]
    while stack:
        t = stack.pop()
        if t == b:
            break
        for s in d.adj[t]:
            if s not in prev:
                prev[s] = t
                stack.append(s)
    path = [b]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    return path[::-1]


def _separates(g, sep, x_set, y_set):
    """Does `sep` hit every X-Y path (endpoints inside sep count as hit)?"""
    sep = set(sep)
    xs = set(x_set) - sep
    ys = set(y_set) - sep
    if not xs or not ys:
        return True
    allowed = set(range(g.n)) - sep
    seen = set(xs)
    stack = list(xs)
    while stack:
        v = stack.pop()
        if v in ys:
            return False
        for w in g.adjacency[v]:
            if w in allowed and w not in seen:
                seen.add(w)
                stack.append(w)
    return not (seen & ys)


def _check_t8(g, d, k):
    """k-leanness.  For subsets X1, X2 of two bags (sizes <= k+1), whenever
    mu(X1, X2) falls short of min(k+1, |X1|, |X2|), some adhesion on the
    connecting path must be an X1-X2 separator of that minimum order; for a
    single bag the subsets must simply be fully linked."""
    for t1 in range(d.n_nodes):
        for t2 in range(t1, d.n_nodes):
            path = _path_nodes(d, t1, t2)
            path_adhesions = [d.adhesion(path[i], path[i + 1]) for i in range(len(path) - 1)]
            for s1 in range(1, min(len(d.bags[t1]), k + 1) + 1):
                for x1 in combinations(sorted(d.bags[t1]), s1):
                    for s2 in range(1, min(len(d.bags[t2]), k + 1) + 1):
                        for x2 in combinations(sorted(d.bags[t2]), s2):
                            mu = menger_mu(g, x1, x2)
                            if mu >= min(k + 1, len(x1), len(x2)):
                                continue
                            ok = any(
                                len(adh) <= mu and _separates(g, adh, x1, x2)
                                for adh in path_adhesions
                            )
                            if not ok:
                                return (False, (t1, t2, x1, x2, mu))
    return (True, None)


# ---------------------------------------------------------------------------
# well-formedness


def enforce_wellformed(g, d, max_rounds=200):
    """Rewrite d (assumed T1,T2) until T3-T6 hold.

    A disconnected graph is handled per component, the component
    decompositions joined below a fresh empty hub bag (which trivially
    satisfies the well-formedness properties at the junction); the rooted
    residue-connectivity property cannot hold across components otherwise.
    The result carries the chosen root.
    """
    comps = connected_components(g)
    if len(comps) > 1:
        pieces = []
        for comp in comps:
            comp_set = set(comp)
            sub, order = g.subgraph(comp)
            index = {v: i for i, v in enumerate(order)}
            # nodes with a nonempty restriction induce a connected subtree
            keep = [t for t in range(d.n_nodes) if d.bags[t] & comp_set]
            remap = {t: i for i, t in enumerate(keep)}
            bags = [frozenset(index[v] for v in d.bags[t] & comp_set) for t in keep]
            edges = [
                (remap[a], remap[b]) for a, b in d.edges if a in remap and b in remap
            ]
            restricted = TreeDecomposition(bags, edges)
            enforced = _enforce_connected(sub, restricted, max_rounds)
            pieces.append((enforced, order))
        out_bags = [frozenset()]
        out_edges = []
        for enforced, order in pieces:
            offset = len(out_bags)
            for bag in enforced.bags:
                out_bags.append(frozenset(order[v] for v in bag))
            for a, b in enforced.edges:
                out_edges.append((a + offset, b + offset))
            root = enforced.root if enforced.root is not None else 0
            out_edges.append((0, root + offset))
        return TreeDecomposition(out_bags, out_edges, root=0)
    return _enforce_connected(g, d, max_rounds)


def _enforce_connected(g, d, max_rounds=200):
    """Enforcement loop for a connected graph.

    Fix order per round: absorb redundant bags, trim adhesion vertices with a
    one-sided neighbourhood (T5), gather equal adhesions around a hub bag
    (T6), and then repair residue connectivity (T4) by picking a root that
    works or splitting a subtree per residue component.  Gathers and splits
    can be mutually inverse on adversarial inputs; repeated states fall back
    to merging a bag into its neighbour, which strictly shrinks the tree (bags
    may grow; a width guarantee is impossible here in general).
    """
    # nothing to do on an already well-formed input (keeps enforcement
    # idempotent up to the root choice)
    first = validate_decomposition(g, d).results
    if all(first[p][0] for p in ("T1", "T2", "T3", "T4", "T5", "T6")):
        if d.root is not None:
            return d
        roots, _ = _t4_roots(g, d)
        return d.rooted_at(min(roots))

    bags = [set(b) for b in d.bags]
    adj = {t: set(d.adj[t]) for t in range(d.n_nodes)}
    seen_states = set()

    def is_hub(t):
        # a node whose bag equals all its incident adhesions realises the
        # conclusion of T6 and must not be re-absorbed into a neighbour
        return len(adj[t]) >= 2 and all(bags[t] & bags[s] == bags[t] for s in adj[t])

    def absorb_subsets():
        changed = True
        while changed:
            changed = False
            for t in sorted(adj):
                if t not in adj:
                    continue
                if len(adj) == 1:
                    break
                for s in sorted(adj[t]):
                    if bags[t] <= bags[s] and (
                        bags[t] == bags[s] or len(adj[t]) == 1 or not bags[t] or not is_hub(t)
                    ):
                        # graft t's other neighbours onto s, drop t
                        for u in adj[t]:
                            if u != s:
                                adj[u].discard(t)
                                adj[u].add(s)
                                adj[s].add(u)
                        adj[s].discard(t)
                        del adj[t]
                        changed = True
                        break
                if changed:
                    break

    def current(root=None):
        nodes = sorted(adj)
        index = {t: i for i, t in enumerate(nodes)}
        edges = set()
        for t in nodes:
            for s in adj[t]:
                edges.add((min(index[t], index[s]), max(index[t], index[s])))
        return (
            TreeDecomposition(
                [bags[t] for t in nodes],
                sorted(edges),
                root=None if root is None else index[root],
            ),
            index,
        )

    def fresh_id():
        t = len(bags)
        bags.append(set())
        adj[t] = set()
        return t

    def merge_edge(s, t):
        """Merge node t into its neighbour s (bag union); strict progress."""
        bags[s] |= bags[t]
        for u in adj[t]:
            if u != s:
                adj[u].discard(t)
                adj[u].add(s)
                adj[s].add(u)
        adj[s].discard(t)
        del adj[t]

    for _ in range(max_rounds):
        absorb_subsets()
        cur, index = current()
        live = {i: t for t, i in index.items()}
        signature = (
            tuple(sorted(tuple(sorted(b)) for b in cur.bags)),
            tuple(
                sorted(
                    tuple(sorted((tuple(sorted(cur.bags[a])), tuple(sorted(cur.bags[b])))))
                    for a, b in cur.edges
                )
            ),
        )
        looping = signature in seen_states
        seen_states.add(signature)
        report = validate_decomposition(g, cur).results

        if looping:
            # break gather/split cycles by contracting a bad edge
            _roots, bad = _t4_roots(g, cur)
            if bad:
                merge_edge(live[bad[0][0]], live[bad[0][1]])
            else:
                a, b = cur.edges[0]
                merge_edge(live[a], live[b])
            seen_states.clear()
            continue

        if not report["T5"][0]:
            v, (a_small, b_small) = report["T5"][1]
            a, b = live[a_small], live[b_small]
            adh = bags[a] & bags[b]
            # drop v from the side where it has no strictly-beyond neighbour
            for side_root, other in ((a, b), (b, a)):
                side = {side_root}
                stack = [side_root]
                while stack:
                    x = stack.pop()
                    for w in adj[x]:
                        if w != other and w not in side:
                            side.add(w)
                            stack.append(w)
                beyond = set()
                for x in side:
                    beyond |= bags[x]
                beyond -= adh
                if v in adh and not (set(g.adjacency[v]) & beyond):
                    for x in side:
                        bags[x].discard(v)
                    break
            continue

        if not report["T6"][0]:
            s_small, t1_small, _t2 = report["T6"][1]
            s = live[s_small]
            adh = bags[live[t1_small]] & bags[s]
            mid = fresh_id()
            bags[mid] = set(adh)
            gathered = [u for u in sorted(adj[s]) if bags[u] & bags[s] == adh]
            for u in gathered:
                adj[s].discard(u)
                adj[u].discard(s)
                adj[u].add(mid)
                adj[mid].add(u)
            adj[s].add(mid)
            adj[mid].add(s)
            continue

        roots, bad = _t4_roots(g, cur)
        if roots:
            rooted, _ = current(root=live[min(roots)])
            final = validate_decomposition(g, rooted).results
            if all(final[p][0] for p in ("T1", "T2", "T3", "T4", "T5", "T6")):
                return rooted
            continue

        # no viable root: split the far side of the first bad directed edge
        # into one copy per residue component
        s_small, t_small = bad[0]
        t = live[s_small]
        first = live[t_small]
        comp = [first]
        seen = {t, first}
        stack = [first]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    comp.append(w)
                    stack.append(w)
        union = set()
        for v in comp:
            union |= bags[v]
        res = sorted(union - bags[t])
        sub, order = g.subgraph(res)
        parts = [set(order[i] for i in c) for c in connected_components(sub)]
        comp_set = set(comp)
        attach = [s for s in comp if s in adj[t]]
        for part in parts:
            keep = part | bags[t]
            remap = {}
            for v in comp:
                nid = fresh_id()
                bags[nid] = bags[v] & keep
                remap[v] = nid
            for v in comp:
                for w in adj[v]:
                    if w in comp_set:
                        adj[remap[v]].add(remap[w])
                        adj[remap[w]].add(remap[v])
            for s in attach:
                adj[t].add(remap[s])
                adj[remap[s]].add(t)
        for v in comp:
            for w in list(adj[v]):
                adj[w].discard(v)
            del adj[v]

    raise StructureError("well-formedness enforcement did not converge")


# ---------------------------------------------------------------------------
# providers


def exact_tree_decomposition(g, limit=20):
    """Minimum-width decomposition from an optimal elimination order (memoised
    search over vertex subsets); desk scale only."""
    if g.n > limit:
        raise SizeLimitError("exact decomposition limited to n <= %d" % limit)
    from .obstructions import _exact_treewidth, _decomposition_from_elimination

    _, order = _exact_treewidth(g)
    return _decomposition_from_elimination(g, order)


def heuristic_tree_decomposition(g):
    """Min-fill elimination heuristic; valid but not necessarily optimal."""
    from .obstructions import _decomposition_from_elimination

    n = g.n
    live = {v: set(g.adjacency[v]) for v in range(n)}
    order = []
    remaining = set(range(n))
    while remaining:
        best_v, best_fill = None, None
        for v in sorted(remaining):
            nbrs = live[v] & remaining
            fill = sum(
                1
                for a, b in combinations(sorted(nbrs), 2)
                if b not in live[a]
            )
            if best_fill is None or fill < best_fill:
                best_v, best_fill = v, fill
        nbrs = live[best_v] & remaining
        for a, b in combinations(sorted(nbrs), 2):
            live[a].add(b)
            live[b].add(a)
        order.append(best_v)
        remaining.discard(best_v)
    return _decomposition_from_elimination(g, order)


# ---------------------------------------------------------------------------
# rooted queries


class TreeQueryIndex:
    """Constant-time depth / ancestor / LCA / branching queries on a rooted tree.

    DFS discovery intervals give the ancestor test; an Euler tour with a sparse
    table gives LCA; the branching node of a triple is the deepest pairwise LCA.
    """

    def __init__(self, n_nodes, adj, root):
        self.root = root
        self.depth = [0] * n_nodes
        self.tb = [0] * n_nodes
        self.te = [0] * n_nodes
        euler = []
        first = [0] * n_nodes
        timer = [0]
        parent = [-1] * n_nodes
        stack = [(root, -1, False)]
        while stack:
            v, p, done = stack.pop()
            if done:
                self.te[v] = timer[0]
                timer[0] += 1
                if p != -1:
                    euler.append(p)
                continue
            parent[v] = p
            self.depth[v] = 0 if p == -1 else self.depth[p] + 1
            self.tb[v] = timer[0]
            timer[0] += 1
            first[v] = len(euler)
            euler.append(v)
            stack.append((v, p, True))
            for w in reversed(adj[v]):
                if w != p:
                    stack.append((w, v, False))
        self.first = first
        self.euler = euler
        # sparse table over euler depths
        m = len(euler)
        logs = [0] * (m + 1)
        for i in range(2, m + 1):
            logs[i] = logs[i // 2] + 1
        self.logs = logs
        table = [euler[:]]
        j = 1
        while (1 << j) <= m:
            prev = table[-1]
            row = []
            for i in range(m - (1 << j) + 1):
                a = prev[i]
                b = prev[i + (1 << (j - 1))]
                row.append(a if self.depth[a] <= self.depth[b] else b)
            table.append(row)
            j += 1
        self.table = table

    def is_ancestor(self, a, b):
        return self.tb[a] <= self.tb[b] and self.te[b] <= self.te[a]

    def lca(self, a, b):
        i, j = self.first[a], self.first[b]
        if i > j:
            i, j = j, i
        k = self.logs[j - i + 1]
        x = self.table[k][i]
        y = self.table[k][j - (1 << k) + 1]
        return x if self.depth[x] <= self.depth[y] else y

    def branching(self, a, b, c):
        """Deepest of the three pairwise LCAs."""
        candidates = (self.lca(a, b), self.lca(a, c), self.lca(b, c))
        return max(candidates, key=lambda t: self.depth[t])


def build_query_index(d):
    if d.root is None:
        raise StructureError("decomposition must be rooted")
    return TreeQueryIndex(d.n_nodes, d.adj, d.root)


def intro_maps(g, d):
    """t(x) = bag of x closest to the root; t(xy) = deeper of t(x), t(y).

    Ties between equally shallow occurrences cannot happen (occurrences form a
    subtree).  Returns (t_vertex dict, t_edge dict, per-node introduced edges).
    """
    if d.root is None:
        raise StructureError("decomposition must be rooted")
    idx = build_query_index(d)
    t_vertex = {}
    for v in range(g.n):
        nodes = d.nodes_with(v)
        if not nodes:
            raise StructureError("vertex %d missing from decomposition" % v)
        t_vertex[v] = min(nodes, key=lambda t: (idx.depth[t], t))
    t_edge = {}
    introduced = {t: [] for t in range(d.n_nodes)}
    for e in g.edges:
        tx, ty = t_vertex[e[0]], t_vertex[e[1]]
        te = tx if idx.depth[tx] >= idx.depth[ty] else ty
        t_edge[e] = te
        introduced[te].append(e)
    return t_vertex, t_edge, introduced


# ---------------------------------------------------------------------------
# neighbourhood trees and the fan conditions


@dataclass(frozen=True)
class NeighbourhoodTree:
    """Contracted subtree T^x: bags introducing edges at x plus branching nodes."""

    owner: int
    nodes: tuple
    edges: tuple

    def diameter_nodes(self):
        """Number of nodes on the longest path of T^x (0 when empty)."""
        if not self.nodes:
            return 0
        adj = {v: [] for v in self.nodes}
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)

        def far(start):
            dist = {start: 1}
            stack = [start]
            while stack:
                v = stack.pop()
                for w in adj[v]:
                    if w not in dist:
                        dist[w] = dist[v] + 1
                        stack.append(w)
            v = max(dist, key=lambda u: (dist[u], u))
            return v, dist[v]

        v, _ = far(min(self.nodes))
        _, d = far(v)
        return d


def neighbourhood_trees(g, d, conditions=None):
    """Build T^x for every vertex bottom-up; optionally report the dec-fan
    conditions (b, c): per-bag incidence counters C[x] <= b and T^x diameter <= c.

    The per-bag counter C[x] counts child adhesions whose subtree introduces an
    edge at x plus edges introduced at the bag itself that are incident to x.
    """
    t_vertex, t_edge, introduced = intro_maps(g, d)
    idx = build_query_index(d)
    parent = d.parents()
    order = sorted(range(d.n_nodes), key=lambda t: -idx.depth[t])

    # bottom-up: per node, for each x in the adhesion to the parent, the root
    # of the partial T^x inside the subtree
    tree_nodes = {x: set() for x in range(g.n)}
    tree_edges = {x: [] for x in range(g.n)}
    counters = {}
    sub_roots = {t: {} for t in range(d.n_nodes)}  # node -> {x: root of partial T^x}
    for t in order:
        c = {}
        d_ptr = {}
        for s in d.adj[t]:
            if s == parent[t]:
                continue
            for x, root in sub_roots[s].items():
                c[x] = c.get(x, 0) + 1
                if x not in d_ptr:
                    d_ptr[x] = root
                else:
                    if d_ptr[x] != t:
                        tree_nodes[x].add(t)
                        tree_edges[x].append((t, d_ptr[x]))
                        tree_edges[x].append((t, root))
                        d_ptr[x] = t
                    else:
                        tree_edges[x].append((t, root))
        for e in introduced[t]:
            for x in e:
                c[x] = c.get(x, 0) + 1
                if d_ptr.get(x) != t:
                    tree_nodes[x].add(t)
                    if x in d_ptr:
                        tree_edges[x].append((t, d_ptr[x]))
                    d_ptr[x] = t
        counters[t] = c
        if parent[t] != -1:
            adh = d.adhesion(t, parent[t])
            sub_roots[t] = {x: d_ptr[x] for x in adh if x in d_ptr}
        # ensure remembered roots are actual T^x nodes
        for x, r in list(sub_roots[t].items()):
            tree_nodes[x].add(r)

    trees = {}
    for x in range(g.n):
        nodes = tuple(sorted(tree_nodes[x]))
        edges = tuple(sorted((min(a, b), max(a, b)) for a, b in tree_edges[x]))
        trees[x] = NeighbourhoodTree(x, nodes, edges)

    report = None
    if conditions is not None:
        b, c_bound = conditions
        ok = True
        witnesses = []
        adhesion_cap = max((len(d.adhesion(*e)) for e in d.edges), default=0)
        for t in range(d.n_nodes):
            if len(d.bags[t]) <= adhesion_cap:
                continue
            for x, cnt in counters[t].items():
                if cnt > b:
                    ok = False
                    witnesses.append(("counter", t, x, cnt))
        for x in range(g.n):
            dia = trees[x].diameter_nodes()
            if dia > c_bound:
                ok = False
                witnesses.append(("diameter", x, dia))
        report = (ok, tuple(witnesses))
    return trees, report


def _maximal_paths(d):
    """All leaf-to-leaf node paths (single node when the tree is one bag)."""
    leaves = [t for t in range(d.n_nodes) if len(d.adj[t]) <= 1]
    if d.n_nodes == 1:
        return [[0]]
    paths = []
    for i, a in enumerate(leaves):
        for b in leaves[i + 1 :]:
            paths.append(_path_nodes(d, a, b))
    return paths


def relevant_bags_on_path(g, d, idx, intro_bags_of, v, path):
    """Bags of `path` that introduce an edge at v or branch toward one.

    Equals the set of projections of v's introduction bags onto the path."""
    a, b = path[0], path[-1]
    out = set()
    for t in intro_bags_of[v]:
        out.add(idx.branching(t, a, b))
    return out


def check_fan_conditions(g, d, a, b, c):
    """The excluded-fan decomposition conditions at parameters (a, b, c):
    adhesions of size <= a, every vertex has <= b torso neighbours in every
    bag, and every maximal path carries <= c bags relevant to any vertex."""
    if d.root is None:
        d = d.rooted_at(0)
    witnesses = []
    for e in d.edges:
        if len(d.adhesion(*e)) > a:
            witnesses.append(("adhesion", e, len(d.adhesion(*e))))
    # torso neighbours: graph neighbours inside the bag plus co-members of
    # adhesions containing the vertex
    for t in range(d.n_nodes):
        for v in sorted(d.bags[t]):
            torso_nbrs = set(g.adjacency[v]) & d.bags[t]
            for s in d.adj[t]:
                adh = d.adhesion(t, s)
                if v in adh:
                    torso_nbrs |= adh - {v}
            if len(torso_nbrs) > b:
                witnesses.append(("torso", t, v, len(torso_nbrs)))
    idx = build_query_index(d)
    _, t_edge, _ = intro_maps(g, d)
    intro_bags_of = {v: set() for v in range(g.n)}
    for e, t in t_edge.items():
        intro_bags_of[e[0]].add(t)
        intro_bags_of[e[1]].add(t)
    for path in _maximal_paths(d):
        for v in range(g.n):
            if not intro_bags_of[v]:
                continue
            rel = relevant_bags_on_path(g, d, idx, intro_bags_of, v, path)
            if len(rel) > c:
                witnesses.append(("path", v, (path[0], path[-1]), len(rel)))
    return (not witnesses), tuple(witnesses)


def measure_fan_parameters(g, d):
    """Tightest (a, b, c) for which check_fan_conditions passes."""
    if d.root is None:
        d = d.rooted_at(0)
    a = max((len(d.adhesion(*e)) for e in d.edges), default=0)
    b = 0
    for t in range(d.n_nodes):
        for v in d.bags[t]:
            torso_nbrs = set(g.adjacency[v]) & d.bags[t]
            for s in d.adj[t]:
                adh = d.adhesion(t, s)
                if v in adh:
                    torso_nbrs |= adh - {v}
            b = max(b, len(torso_nbrs))
    idx = build_query_index(d)
    _, t_edge, _ = intro_maps(g, d)
    intro_bags_of = {v: set() for v in range(g.n)}
    for e, t in t_edge.items():
        intro_bags_of[e[0]].add(t)
        intro_bags_of[e[1]].add(t)
    c = 1
    for path in _maximal_paths(d):
        for v in range(g.n):
            if intro_bags_of[v]:
                c = max(c, len(relevant_bags_on_path(g, d, idx, intro_bags_of, v, path)))
    return a, b, c


# ---------------------------------------------------------------------------
# weights and dipole conditions


@dataclass(frozen=True)
class WeightResult:
    value: int
    exact: bool


def weight_w(g, d, t, u_set, exhaustive_degree_limit=20):
    """w(t, U) = |bag ∩ U| + minimum number of incident adhesions hitting all
    bag-to-(U outside the bag) paths.

    The minimisation is exact (subset search over incident adhesions) while the
    node degree is small, else greedy with an explicit inexact flag.
    """
    u = set(u_set)
    bag = d.bags[t]
    base = len(bag & u)
    outside = u - bag
    if not outside:
        return WeightResult(base, True)
    adhesions = [d.adhesion(t, s) for s in d.adj[t]]
    if _separates(g, set(), bag, outside):
        return WeightResult(base, True)
    if len(adhesions) <= exhaustive_degree_limit:
        for size in range(1, len(adhesions) + 1):
            for combo in combinations(range(len(adhesions)), size):
                union = set()
                for i in combo:
                    union |= adhesions[i]
                if _separates(g, union, bag, outside):
                    return WeightResult(base + size, True)
        # no subset works (cannot happen for valid decompositions, but stay total)
        return WeightResult(base + len(adhesions), True)
    chosen = 0
    union = set()
    remaining = list(range(len(adhesions)))
    while not _separates(g, union, bag, outside) and remaining:
        best = max(remaining, key=lambda i: len(adhesions[i] - union))
        union |= adhesions[best]
        remaining.remove(best)
        chosen += 1
    return WeightResult(base + chosen, False)


def check_dipole_conditions(g, d, a, b, c):
    """The excluded-dipole decomposition conditions at (a, b, c): adhesions
    <= a; per bag at most one vertex of weight exceeding b; for every pair
    sharing >= 2 bags, <= c bags whose union hits all N(u)-N(v) paths."""
    witnesses = []
    for e in d.edges:
        if len(d.adhesion(*e)) > a:
            witnesses.append(("adhesion", e, len(d.adhesion(*e))))
    for t in range(d.n_nodes):
        heavy = [
            v for v in sorted(d.bags[t]) if weight_w(g, d, t, g.adjacency[v]).value > b
        ]
        if len(heavy) > 1:
            witnesses.append(("heavy", t, tuple(heavy)))
    share = {}
    for t in range(d.n_nodes):
        for u, v in combinations(sorted(d.bags[t]), 2):
            share[(u, v)] = share.get((u, v), 0) + 1
    if d.root is None:
        d = d.rooted_at(0)
    idx = build_query_index(d)
    for (u, v), cnt in sorted(share.items()):
        if cnt < 2:
            continue
        nu, nv = g.adjacency[u], g.adjacency[v]
        mu, sep = menger_cut(g, nu, nv)
        if mu > c:
            witnesses.append(("pair", (u, v), mu))
            continue
        bag_choice = []
        for x in sep:
            nodes = d.nodes_with(x)
            bag_choice.append(min(nodes, key=lambda t: (idx.depth[t], t)))
        union = set()
        for t in set(bag_choice):
            union |= d.bags[t]
        if not _separates(g, union, nu, nv):
            witnesses.append(("pair-cover", (u, v)))
    return (not witnesses), tuple(witnesses)


def measure_dipole_parameters(g, d):
    """Tightest (a, b, c) for which check_dipole_conditions passes."""
    a = max((len(d.adhesion(*e)) for e in d.edges), default=0)
    b = 0
    for t in range(d.n_nodes):
        weights = sorted(
            (weight_w(g, d, t, g.adjacency[v]).value for v in d.bags[t]), reverse=True
        )
        if len(weights) >= 2:
            b = max(b, weights[1])  # all but one vertex must stay below b
    c = 1
    share = {}
    for t in range(d.n_nodes):
        for u, v in combinations(sorted(d.bags[t]), 2):
            share[(u, v)] = share.get((u, v), 0) + 1
    for (u, v), cnt in share.items():
        if cnt >= 2:
            c = max(c, menger_mu(g, g.adjacency[u], g.adjacency[v]))
    return a, b, c


def overlap_number(d):
    """Max over vertex pairs of the number of bags containing both."""
    counts = {}
    best = 0
    for bag in d.bags:
        for u, v in combinations(sorted(bag), 2):
            counts[(u, v)] = counts.get((u, v), 0) + 1
            best = max(best, counts[(u, v)])
    return best


# ---------------------------------------------------------------------------
# layout collapse and serialization


def layout_from_decomposition(g, d):
    """Collapse a rooted decomposition to a tree-layout: linearise each bag
    ascending and keep only the occurrence of each vertex closest to the root."""
    from .layouts import TreeLayout, validate_layout
    from .exceptions import InvalidLayoutError

    if d.root is None:
        d = d.rooted_at(0)
    parent = d.parents()
    order = [d.root]
    queue = [d.root]
    while queue:
        t = queue.pop(0)
        for s in d.adj[t]:
            if s != parent[t]:
                order.append(s)
                queue.append(s)
    placed = set()
    attach = {-1: None}
    lay_parent = {}
    root_vertex = None
    prev_piece_root = None
    for t in order:
        up = attach[parent[t]]
        fresh = [v for v in sorted(d.bags[t]) if v not in placed]
        for v in fresh:
            placed.add(v)
            if up is None:
                # no placed ancestor: start a new piece, chained root-under-previous-root
                if root_vertex is None:
                    root_vertex = v
                else:
                    lay_parent[v] = prev_piece_root
                prev_piece_root = v
            else:
                lay_parent[v] = up
            up = v
        attach[t] = up
    # any completely isolated vertices (not in any bag) are a structural error
    missing = set(range(g.n)) - placed
    if missing:
        raise StructureError("vertices missing from decomposition: %s" % sorted(missing))
    if root_vertex is None:
        return TreeLayout(None, {})
    layout = TreeLayout(root_vertex, lay_parent)
    if not validate_layout(g, layout).ok:
        raise InvalidLayoutError("decomposition collapse produced an invalid layout")
    return layout


def serialize_decomposition(d):
    """Exchange format, 0-based: 'td <nodes> <width+1> <n>' header, one
    'b <id> v1 v2 ...' line per bag, then tree edges '<a> <b>' per line."""
    union = set()
    for b in d.bags:
        union |= b
    n = max(union) + 1 if union else 0
    lines = ["td %d %d %d" % (d.n_nodes, d.width() + 1, n)]
    for t, bag in enumerate(d.bags):
        lines.append(("b %d " % t + " ".join(str(v) for v in sorted(bag))).strip())
    for a, b in sorted(d.edges):
        lines.append("%d %d" % (a, b))
    return "\n".join(lines) + "\n"


def parse_decomposition(text):
    header = None
    bags = {}
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "td":
            if header is not None:
                raise FormatError("duplicate td header", line=lineno)
            if len(parts) != 4:
                raise FormatError("malformed td header", line=lineno)
            header = tuple(int(x) for x in parts[1:])
        elif parts[0] == "b":
            if len(parts) < 2:
                raise FormatError("malformed bag line", line=lineno)
            bags[int(parts[1])] = frozenset(int(v) for v in parts[2:])
        else:
            if len(parts) != 2:
                raise FormatError("malformed tree edge", line=lineno)
            edges.append((int(parts[0]), int(parts[1])))
    if header is None:
        raise FormatError("missing td header")
    count = header[0]
    if sorted(bags) != list(range(count)):
        raise FormatError("bag ids must be 0..%d" % (count - 1))
    return TreeDecomposition([bags[i] for i in range(count)], edges)
