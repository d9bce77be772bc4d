"""Obstruction parameters: rooted path minors, rooted treedepth, fan and
dipole numbers, and the exact classical parameters used as desk-scale oracles.

All searches here favour exhaustive correctness over speed; blowups surface
as BudgetExceededError / SizeLimitError, never as wrong answers.
"""

from collections import deque
from dataclasses import dataclass
from itertools import permutations

from .exceptions import BudgetExceededError, SizeLimitError, StructureError
from .graphs import Graph, connected_components
from .layouts import TreeLayout, validate_layout, bandwidth_of_layout

__all__ = [
    "EliminationForest",
    "rooted_path_minor",
    "rooted_treedepth",
    "fan_number",
    "dipole_number",
    "neighbourhood_treedepth",
    "exact_parameter",
    "internally_disjoint_paths",
]

DEFAULT_MINOR_BUDGET = 5_000_000
TD_COMPONENT_LIMIT = 18
TW_LIMIT = 20
BW_LIMIT = 9
TBW_BRUTE_LIMIT = 8


@dataclass(frozen=True)
class EliminationForest:
    """Witness forest for rooted treedepth: parent map over a vertex subset.

    Roots map to None.  Height counts vertices on the longest root-leaf path.
    """

    parent: dict

    def height(self):
        depth = {}

        def d(v):
            if v in depth:
                return depth[v]
            p = self.parent[v]
            depth[v] = 1 if p is None else d(p) + 1
            return depth[v]

        return max((d(v) for v in self.parent), default=0)

    def root_path(self, v):
        out = []
        while v is not None:
            out.append(v)
            v = self.parent[v]
        return out

    def validate(self, g, u_set):
        """Covers U; forest edges of G are vertical; every outside component
        has its neighbourhood on one root-leaf path."""
        vs = set(self.parent)
        if not set(u_set) <= vs:
            return False
        paths = {v: set(self.root_path(v)) for v in vs}
        for a, b in g.edges:
            if a in vs and b in vs:
                if a not in paths[b] and b not in paths[a]:
                    return False
        outside = sorted(set(range(g.n)) - vs)
        if outside:
            sub, order = g.subgraph(outside)
            for comp in connected_components(sub):
                nbrs = set()
                for i in comp:
                    v = order[i]
                    nbrs.update(w for w in g.adjacency[v] if w in vs)
                if not nbrs:
                    continue
                deepest = max(nbrs, key=lambda w: len(paths[w]))
                if not nbrs <= paths[deepest]:
                    return False
        return True


class _Budget:
    __slots__ = ("left",)

    def __init__(self, budget):
        self.left = budget

    def spend(self):
        self.left -= 1
        if self.left < 0:
            raise BudgetExceededError("rooted path minor search budget exceeded")


def _connected_supersets(g, seed, allowed_mask, emit, budget):
    """Enumerate every connected superset of {seed} inside allowed_mask exactly once.

    Classic fixed/free frontier enumeration: at each step the smallest
    undecided frontier vertex is either included or permanently excluded.
    """
    masks = g.neighbour_masks

    def rec(current, frontier, forbidden):
        budget.spend()
        if emit(current):
            return True
        f = frontier & ~forbidden & ~current
        while f:
            v = (f & -f).bit_length() - 1
            f &= f - 1
            nxt = current | (1 << v)
            if rec(nxt, (frontier | masks[v]) & allowed_mask, forbidden):
                return True
            forbidden |= 1 << v
        return False

    return rec(1 << seed, masks[seed] & allowed_mask, 0)


def rooted_path_minor(g, u_set, k, budget=DEFAULT_MINOR_BUDGET, return_model=False):
    """Does g contain a U-rooted P_k minor?

    Exhaustive search over sequences of k disjoint connected branch sets, each
    meeting U, consecutive sets joined by an edge.  Returns bool, or
    (bool, model) with the verified branch sets when return_model is set.
    """
    if k < 1:
        raise StructureError("k must be >= 1")
    u_mask = 0
    for u in u_set:
        u_mask |= 1 << u
    if k > g.n or (k >= 1 and u_mask == 0):
        return (False, None) if return_model else False
    masks = g.neighbour_masks
    full = (1 << g.n) - 1
    b = _Budget(budget)
    found = []

    def neighbourhood(mask):
        out = 0
        m = mask
        while m:
            v = (m & -m).bit_length() - 1
            m &= m - 1
            out |= masks[v]
        return out & ~mask

    def extend(used, last_mask, sets):
        if len(sets) == k:
            found.extend(sets)
            return True
        if last_mask is None:
            anchors = u_mask
        else:
            anchors = neighbourhood(last_mask) & ~used
        a = anchors
        while a:
            v = (a & -a).bit_length() - 1
            a &= a - 1
            # canonical anchor: v is the smallest anchor vertex of the new set
            allowed = full & ~used & ~(anchors & ((1 << v) - 1))

            def emit(candidate, _v=v):
                if candidate & u_mask == 0:
                    return False
                return extend(used | candidate, candidate, sets + [candidate])

            if _connected_supersets(g, v, allowed, emit, b):
                return True
        return False

    ok = extend(0, None, [])
    if not return_model:
        return ok
    if not ok:
        return False, None
    model = [tuple(i for i in range(g.n) if s >> i & 1) for s in found]
    assert _verify_path_minor_model(g, u_set, model)
    return True, model


def _verify_path_minor_model(g, u_set, model):
    used = set()
    u = set(u_set)
    for branch in model:
        if used & set(branch):
            return False
        used.update(branch)
        if not u & set(branch):
            return False
        sub, order = g.subgraph(branch)
        if len(connected_components(sub)) != 1:
            return False
    for a, b in zip(model, model[1:]):
        sa = set(a)
        if not any(w in sa for v in b for w in g.adjacency[v]):
            return False
    return True


def rooted_treedepth(g, u_set, limit=TD_COMPONENT_LIMIT, return_forest=True):
    """td(G, U) by the recursive definition, with a witness elimination forest.

    0 when no U vertex; max over components when disconnected; otherwise
    1 + min over vertex deletions.  Memoised on the component's vertex bitset
    (U is fixed per query).
    """
    u_mask = 0
    for u in u_set:
        if 0 <= u < g.n:
            u_mask |= 1 << u
    masks = g.neighbour_masks
    memo = {}

    def components_of(mask):
        out = []
        rem = mask
        while rem:
            v = (rem & -rem).bit_length() - 1
            comp = 1 << v
            frontier = comp
            while frontier:
                nxt = 0
                f = frontier
                while f:
                    w = (f & -f).bit_length() - 1
                    f &= f - 1
                    nxt |= masks[w]
                nxt &= mask & ~comp
                comp |= nxt
                frontier = nxt
            out.append(comp)
            rem &= ~comp
        return out

    def solve(mask):
        """Returns (value, parent dict of the chosen elimination forest part)."""
        if mask & u_mask == 0:
            return 0, {}
        if mask in memo:
            return memo[mask]
        comps = components_of(mask)
        if len(comps) > 1:
            value = 0
            forest = {}
            for comp in comps:
                v, f = solve(comp)
                value = max(value, v)
                forest.update(f)
            memo[mask] = (value, forest)
            return memo[mask]
        if bin(mask).count("1") > limit:
            raise SizeLimitError("component larger than the treedepth limit %d" % limit)
        best = None
        best_v = None
        best_sub = None
        m = mask
        while m:
            v = (m & -m).bit_length() - 1
            m &= m - 1
            val, sub = solve(mask & ~(1 << v))
            if best is None or val < best:
                best, best_v, best_sub = val, v, sub
            if best == 0:
                break
        forest = {best_v: None}
        for w, p in best_sub.items():
            forest[w] = best_v if p is None else p
        memo[mask] = (1 + best, forest)
        return memo[mask]

    value, parent = solve((1 << g.n) - 1)
    if not return_forest:
        return value
    forest = EliminationForest(dict(parent))
    assert forest.validate(g, [u for u in u_set if 0 <= u < g.n])
    assert forest.height() == value or value == 0
    return value, forest


def fan_number(g, budget=DEFAULT_MINOR_BUDGET):
    """Largest k such that the k-fan is a topological minor.

    A subdivided k-fan centered on v exists iff G - v has an N(v)-rooted P_k
    minor; returns 0 for edgeless graphs (F_1 is a single edge).
    """
    if g.m == 0:
        return 0
    best = 1
    for v in range(g.n):
        if not g.adjacency[v]:
            continue
        rest = [w for w in range(g.n) if w != v]
        sub, order = g.subgraph(rest)
        index = {w: i for i, w in enumerate(order)}
        u = [index[w] for w in g.adjacency[v]]
        lo, hi = best, sub.n
        # largest feasible k by binary search (monotone in k)
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if rooted_path_minor(sub, u, mid, budget=budget):
                lo = mid
            else:
                hi = mid - 1
        best = max(best, lo)
    return best


def internally_disjoint_paths(g, u, v):
    """Max number of internally vertex-disjoint u-v paths (a direct edge counts one)."""
    if u == v:
        raise StructureError("u and v must differ")
    # unit capacities on internal vertices; edges capacity 1 (sufficient in
    # simple graphs since internal vertices already limit reuse)
    n = g.n
    source, sink = 2 * u + 1, 2 * v
    cap = {}
    adj = [[] for _ in range(2 * n)]

    def add(a, b, c):
        if (a, b) not in cap:
            cap[(a, b)] = 0
            cap[(b, a)] = 0
            adj[a].append(b)
            adj[b].append(a)
        cap[(a, b)] += c

    for w in range(n):
        if w not in (u, v):
            add(2 * w, 2 * w + 1, 1)
    for a, b in g.edges:
        add(2 * a + 1, 2 * b, 1)
        add(2 * b + 1, 2 * a, 1)
    flow = 0
    while True:
        parent = {source: None}
        queue = deque([source])
        while queue and sink not in parent:
            x = queue.popleft()
            for y in adj[x]:
                if y not in parent and cap[(x, y)] > 0:
                    parent[y] = x
                    queue.append(y)
        if sink not in parent:
            return flow
        y = sink
        path = []
        while parent[y] is not None:
            path.append((parent[y], y))
            y = parent[y]
        push = min(cap[e] for e in path)
        for e in path:
            cap[e] -= push
            cap[(e[1], e[0])] += push
        flow += push


def dipole_number(g):
    """Largest k with a k-dipole topological minor: max over pairs of the
    number of internally disjoint paths between them."""
    if g.n < 2:
        raise StructureError("dipole number needs n >= 2")
    best = 0
    for u in range(g.n):
        for v in range(u + 1, g.n):
            best = max(best, internally_disjoint_paths(g, u, v))
    return best


def neighbourhood_treedepth(g, limit=TD_COMPONENT_LIMIT):
    """max over v of td(G, N[v])."""
    best = 0
    for v in range(g.n):
        val = rooted_treedepth(g, g.closed_neighbourhood(v), limit=limit, return_forest=False)
        best = max(best, val)
    return best


# ---------------------------------------------------------------------------
# exact classical parameters (oracle suite)


def _exact_treewidth(g):
    """Held-Karp style DP over vertex subsets; returns (width, elimination order)."""
    n = g.n
    if n == 0:
        return 0, []
    masks = g.neighbour_masks
    full = (1 << n) - 1

    def q_size(s_mask, v):
        """Vertices outside s_mask+{v} reachable from v through s_mask."""
        seen = 1 << v
        frontier = 1 << v
        reach = 0
        while frontier:
            nxt = 0
            f = frontier
            while f:
                w = (f & -f).bit_length() - 1
                f &= f - 1
                nxt |= masks[w]
            nxt &= ~seen
            reach |= nxt & ~s_mask
            frontier = nxt & s_mask
            seen |= nxt
        return bin(reach).count("1")

    memo = {0: (-1, None)}
    order_choice = {}

    def tw(s_mask):
        if s_mask in memo:
            return memo[s_mask][0]
        best = None
        best_v = None
        m = s_mask
        while m:
            v = (m & -m).bit_length() - 1
            m &= m - 1
            rest = s_mask & ~(1 << v)
            val = max(tw(rest), q_size(rest, v))
            if best is None or val < best:
                best, best_v = val, v
        memo[s_mask] = (best, best_v)
        return best

    width = tw(full)
    order = []
    s = full
    while s:
        v = memo[s][1]
        order.append(v)
        s &= ~(1 << v)
    order.reverse()  # elimination order: first eliminated first
    return width, order


def _decomposition_from_elimination(g, order):
    """Fill-in construction: bag of v = {v} + later neighbours in the fill graph."""
    from .decompositions import TreeDecomposition

    n = g.n
    pos = {v: i for i, v in enumerate(order)}
    fill = {v: set(g.adjacency[v]) for v in range(n)}
    for v in order:
        later = [w for w in fill[v] if pos[w] > pos[v]]
        for a in later:
            for b in later:
                if a != b:
                    fill[a].add(b)
    bags = []
    for v in order:
        later = sorted([w for w in fill[v] if pos[w] > pos[v]])
        bags.append(frozenset([v] + later))
    edges = []
    for i, v in enumerate(order):
        later = [w for w in bags[i] if w != v]
        if later:
            w = min(later, key=lambda x: pos[x])
            edges.append((i, pos[w]))
    if n == 0:
        return TreeDecomposition(bags=[frozenset()], edges=[])
    # a disconnected graph yields a bag forest; chain the components
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        parent[find(a)] = find(b)
    roots = sorted(set(find(i) for i in range(n)))
    for a, b in zip(roots, roots[1:]):
        edges.append((find(a), b))
        parent[find(a)] = find(b)
    return TreeDecomposition(bags=bags, edges=edges)


def _exact_bandwidth(g):
    """Branch-and-bound over prefix placements; returns (value, LinearLayout order dict)."""
    from .layouts import LinearLayout

    n = g.n
    if n == 0:
        return 0, LinearLayout({})
    best = [n - 1, list(range(n))]
    adj = g.adjacency
    placed = [None] * n
    posof = {}

    def rec(i, cur):
        if cur >= best[0]:
            return
        if i == n:
            best[0] = cur
            best[1] = placed[:]
            return
        for v in range(n):
            if v in posof:
                continue
            worst = cur
            ok = True
            for w in adj[v]:
                if w in posof:
                    d = i - posof[w]
                    if d >= best[0]:
                        ok = False
                        break
                    worst = max(worst, d)
            if not ok:
                continue
            placed[i] = v
            posof[v] = i
            rec(i + 1, worst)
            del posof[v]
        return

    rec(0, 0)
    order = {v: i + 1 for i, v in enumerate(best[1])}
    return best[0], LinearLayout(order)


def _prufer_trees(n):
    """All labeled trees on n vertices as parent-free edge lists."""
    if n == 1:
        yield []
        return
    if n == 2:
        yield [(0, 1)]
        return
    seq = [0] * (n - 2)
    while True:
        yield _prufer_decode(seq, n)
        i = n - 3
        while i >= 0 and seq[i] == n - 1:
            seq[i] = 0
            i -= 1
        if i < 0:
            return
        seq[i] += 1


def _prufer_decode(seq, n):
    import heapq

    degree = [1] * n
    for x in seq:
        degree[x] += 1
    heap = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(heap)
    edges = []
    for x in seq:
        leaf = heapq.heappop(heap)
        edges.append((leaf, x))
        degree[leaf] -= 1
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(heap, x)
    a = heapq.heappop(heap)
    b = heapq.heappop(heap)
    edges.append((a, b))
    return edges


def _brute_treebandwidth(g):
    """Minimum bandwidth over all rooted labeled trees (Prufer x roots)."""
    n = g.n
    if n == 0:
        return 0, TreeLayout(None, {})
    if n > TBW_BRUTE_LIMIT:
        raise SizeLimitError("brute-force treebandwidth limited to n <= %d" % TBW_BRUTE_LIMIT)
    if g.m == 0:
        parent = {v: v - 1 for v in range(1, n)}
        return 0, TreeLayout(0, parent)
    best = None
    best_layout = None
    for edges in _prufer_trees(n):
        adj = [[] for _ in range(n)]
        for a, b in edges:
            adj[a].append(b)
            adj[b].append(a)
        for root in range(n):
            parent = {}
            depth = [0] * n
            stack = [root]
            seen = {root}
            while stack:
                v = stack.pop()
                for w in adj[v]:
                    if w not in seen:
                        seen.add(w)
                        parent[w] = v
                        depth[w] = depth[v] + 1
                        stack.append(w)
            # ancestor test by parent chains
            ok = True
            bw = 0
            for a, b in g.edges:
                x, y = (a, b) if depth[a] <= depth[b] else (b, a)
                w = y
                while depth[w] > depth[x]:
                    w = parent[w]
                if w != x:
                    ok = False
                    break
                bw = max(bw, depth[y] - depth[x])
            if ok and (best is None or bw < best):
                best = bw
                best_layout = TreeLayout(root, parent)
    return best, best_layout


def exact_parameter(g, which):
    """Exact treewidth / treedepth / bandwidth / treebandwidth-bruteforce with certificates."""
    if which == "treewidth":
        if g.n > TW_LIMIT:
            raise SizeLimitError("treewidth limited to n <= %d" % TW_LIMIT)
        width, order = _exact_treewidth(g)
        return width, _decomposition_from_elimination(g, order)
    if which == "treedepth":
        if g.n > TD_COMPONENT_LIMIT:
            raise SizeLimitError("treedepth limited to n <= %d" % TD_COMPONENT_LIMIT)
        value, forest = rooted_treedepth(g, range(g.n))
        return value, forest
    if which == "bandwidth":
        if g.n > BW_LIMIT:
            raise SizeLimitError("bandwidth limited to n <= %d" % BW_LIMIT)
        return _exact_bandwidth(g)
    if which == "treebandwidth-bruteforce":
        value, layout = _brute_treebandwidth(g)
        if layout is not None and layout.root is not None:
            assert validate_layout(g, layout).ok
            assert bandwidth_of_layout(g, layout) == value
        return value, layout
    raise StructureError("unknown parameter %r" % which)
