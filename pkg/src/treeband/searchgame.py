"""The occupation-time searching game: simulate the strategy a tree-layout
induces against a visible, infinitely fast fugitive, and rebuild layouts from
winning monotone strategies."""

from dataclasses import dataclass, field

from .exceptions import FormatError, InvalidLayoutError, StructureError
from .graphs import connected_components
from .layouts import TreeLayout, bandwidth_of_layout, validate_layout

__all__ = [
    "TraceNode",
    "SearchTrace",
    "strategy_from_layout",
    "layout_from_strategy",
    "serialize_trace",
    "parse_trace",
]


@dataclass
class TraceNode:
    """One placement in the game tree: the searcher goes to `vertex` while the
    fugitive holds `territory`; afterwards `removed` searchers retire and the
    fugitive picks one of the children's components."""

    vertex: int
    territory: tuple
    removed: tuple = ()
    children: list = field(default_factory=list)


@dataclass
class SearchTrace:
    """Branching record of placements.  Since the game tree mirrors the layout,
    each vertex is placed at most once across the whole trace (monotone).

    `occupation` maps vertex -> (start step, end step) along its branch, steps
    counting placements from 1; `max_occupation` is the worst interval length.
    """

    roots: list
    occupation: dict
    max_occupation: int


def strategy_from_layout(g, t):
    """Simulate the induced strategy on every fugitive branch.

    The searcher always takes the root of the layout subtree holding the
    fugitive; a searcher at x retires as soon as x has no neighbour in the
    remaining territory.  Occupation never exceeds bandwidth + 1.
    """
    report = validate_layout(g, t)
    if not report.ok:
        raise InvalidLayoutError("layout invalid on %s" % (report.violations,))
    if g.n == 0:
        return SearchTrace([], {}, 0)

    occupation = {}
    max_occ = [0]

    def record(v, placed_at, end):
        length = end - placed_at + 1
        prev = occupation.get(v)
        if prev is None or prev[1] - prev[0] + 1 < length:
            occupation[v] = (placed_at, end)
        max_occ[0] = max(max_occ[0], length)

    def retire(active, territory_set, step):
        """Split the active searchers into survivors and retirees; removals
        happen between placements, so a retiree was occupied through `step`."""
        kept, removed = [], []
        for v, placed_at in active:
            if set(g.adjacency[v]) & territory_set:
                kept.append((v, placed_at))
            else:
                record(v, placed_at, step)
                removed.append(v)
        return kept, removed

    def play(territory, active, step):
        """territory: vertex tuple of the component holding the fugitive.
        The searcher takes the root of the layout subtree spanning it, which
        is the unique shallowest territory vertex."""
        u = min(territory, key=lambda v: t.depth[v])
        step += 1
        remaining = set(territory) - {u}
        active = active + [(u, step)]
        node = TraceNode(u, tuple(sorted(territory)))
        kept, removed = retire(active, remaining, step)
        node.removed = tuple(sorted(removed))
        # monotonicity: a retired vertex never neighbours the territory again
        for v in node.removed:
            assert not (set(g.adjacency[v]) & remaining)
        if not remaining:
            for v, placed_at in kept:
                record(v, placed_at, step)
            return node
        for comp in _components(g, remaining):
            # the fugitive commits to comp; searchers useless for it retire now
            branch_kept, branch_removed = retire(kept, set(comp), step)
            child = play(comp, branch_kept, step)
            child.removed = tuple(sorted(set(child.removed) | set(branch_removed)))
            node.children.append(child)
        return node

    roots = [play(comp, [], 0) for comp in connected_components(g)]
    return SearchTrace(roots, occupation, max_occ[0])


def _components(g, vertices):
    sub_vertices = sorted(vertices)
    sub, order = g.subgraph(sub_vertices)
    return [tuple(order[i] for i in comp) for comp in connected_components(sub)]


def layout_from_strategy(g, trace, occupation_bound):
    """Rebuild a layout of bandwidth <= occupation_bound - 1 from a winning
    monotone trace: each placement becomes the root of the subtree for its
    territory."""
    placed = set()
    parent = {}

    def check_and_build(node, parent_vertex, territory):
        if node.vertex in placed:
            raise StructureError("vertex %d placed twice: trace not monotone" % node.vertex)
        if node.vertex not in territory:
            raise StructureError("placement outside the fugitive territory")
        placed.add(node.vertex)
        if parent_vertex is not None:
            parent[node.vertex] = parent_vertex
        remaining = set(territory) - {node.vertex}
        comps = _components(g, remaining) if remaining else []
        if len(node.children) != len(comps):
            raise StructureError("trace branches do not match the fugitive components")
        for child in node.children:
            comp = next((c for c in comps if child.vertex in c), None)
            if comp is None:
                raise StructureError("branch placement not in any component")
            check_and_build(child, node.vertex, comp)

    prev_root = None
    root = None
    comps = connected_components(g)
    if len(trace.roots) != len(comps):
        raise StructureError("trace does not cover all components: losing strategy")
    for node, comp in zip(trace.roots, comps):
        check_and_build(node, prev_root, comp)
        if root is None:
            root = node.vertex
        prev_root = node.vertex
    if g.n == 0:
        return TreeLayout(None, {})
    if len(placed) != g.n:
        raise StructureError("territory never emptied: losing strategy")
    layout = TreeLayout(root, parent)
    if not validate_layout(g, layout).ok:
        raise InvalidLayoutError("rebuilt layout invalid")
    k = occupation_bound - 1
    if bandwidth_of_layout(g, layout) > k:
        raise StructureError("rebuilt layout exceeds the occupation bound")
    return layout


def serialize_trace(trace):
    """Pre-order lines 'step <i> place <v> depth <d>' then 'remove <v>' events;
    branch structure is recovered from the depth column."""
    lines = []

    def walk(node, step, depth):
        lines.append("step %d place %d depth %d" % (step, node.vertex, depth))
        for v in node.removed:
            lines.append("remove %d" % v)
        for child in node.children:
            walk(child, step + 1, depth + 1)

    for node in trace.roots:
        walk(node, 1, 0)
    return "\n".join(lines) + ("\n" if lines else "")


def parse_trace(text):
    """Rebuild the trace tree from the serialised form (territories omitted)."""
    roots = []
    stack = []  # (depth, node)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "step":
            if len(parts) != 6 or parts[2] != "place" or parts[4] != "depth":
                raise FormatError("malformed place line", line=lineno)
            depth = int(parts[5])
            node = TraceNode(int(parts[3]), ())
            while stack and stack[-1][0] >= depth:
                stack.pop()
            if depth == 0:
                roots.append(node)
            else:
                if not stack or stack[-1][0] != depth - 1:
                    raise FormatError("depth jump in trace", line=lineno)
                stack[-1][1].children.append(node)
            stack.append((depth, node))
        elif parts[0] == "remove":
            if not stack:
                raise FormatError("remove before any placement", line=lineno)
            node = stack[-1][1]
            node.removed = node.removed + (int(parts[1]),)
        else:
            raise FormatError("unknown trace line", line=lineno)
    return SearchTrace(roots, {}, 0)
