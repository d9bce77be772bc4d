"""Exact treebandwidth via the configuration-window search, plus the
end-to-end approximation pipelines (fan folding for treebandwidth, dipole
folding for overlap treewidth)."""

from dataclasses import dataclass, field

from .decompositions import (
    enforce_wellformed,
    exact_tree_decomposition,
    heuristic_tree_decomposition,
    layout_from_decomposition,
    measure_dipole_parameters,
    measure_fan_parameters,
    overlap_number,
)
from .exceptions import BudgetExceededError, SizeLimitError, StructureError
from .folding import fold_dipole, fold_fan
from .graphs import connected_components
from .layouts import TreeLayout, bandwidth_of_layout, validate_layout
from .obstructions import internally_disjoint_paths, rooted_path_minor

__all__ = [
    "Configuration",
    "decide_treebandwidth",
    "exact_treebandwidth",
    "approximate_treebandwidth",
    "overlap_treewidth_pipeline",
    "ApproxResult",
    "OverlapResult",
]

DEFAULT_STATE_BUDGET = 2_000_000
EXACT_PROVIDER_LIMIT = 14


@dataclass(frozen=True)
class Configuration:
    """A connected component of G minus the window, plus the ordered window
    (most recently placed vertex last)."""

    component: frozenset
    window: tuple


def _components_masks(masks, allowed):
    comps = []
    rem = allowed
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
            nxt &= allowed & ~comp
            comp |= nxt
            frontier = nxt
        comps.append(comp)
        rem &= ~comp
    return comps


def decide_treebandwidth(g, k, budget=DEFAULT_STATE_BUDGET):
    """Is tbw(g) <= k?  Returns (True, TreeLayout) or (False, None).

    Determinised window search: pick u in the current component; if the
    window is full, its oldest vertex w is dropped, which is sound only when
    w has no neighbour left in the component besides u.  (Any path from w back
    into the component in G minus the new window would have to enter the
    component at its first step, so the general separation requirement reduces
    to this neighbourhood-emptiness check; the tests cross-check it against a
    literal reachability computation.)  Memoised on (component, window order).
    """
    if k < 0:
        raise StructureError("k must be >= 0")
    if g.n == 0:
        return True, TreeLayout(None, {})
    if k == 0:
        if g.m > 0:
            return False, None
        parent = {v: v - 1 for v in range(1, g.n)}
        return True, TreeLayout(0, parent)

    masks = g.neighbour_masks
    memo = {}
    counter = [0]

    def solve(comp_mask, window):
        key = (comp_mask, window)
        if key in memo:
            return memo[key]
        counter[0] += 1
        if counter[0] > budget:
            raise BudgetExceededError("state budget exceeded (%d states)" % budget)
        result = None
        m = comp_mask
        while m:
            u = (m & -m).bit_length() - 1
            m &= m - 1
            rest = comp_mask & ~(1 << u)
            if len(window) == k:
                w = window[0]
                if masks[w] & rest:
                    continue  # dropping w would leave it a neighbour in the component
                new_window = window[1:] + (u,)
            else:
                new_window = window + (u,)
            ok = True
            choices = []
            for sub in _components_masks(masks, rest):
                got = solve(sub, new_window)
                if got is None:
                    ok = False
                    break
                choices.append(got)
            if ok:
                result = (u, new_window, choices)
                break
        memo[key] = result
        return result

    comps = connected_components(g)
    plans = []
    for comp in comps:
        mask = 0
        for v in comp:
            mask |= 1 << v
        plan = solve(mask, ())
        if plan is None:
            return False, None
        plans.append(plan)

    # replay the accepting choices into a layout; component roots are chained
    # root-under-previous-root
    parent = {}

    def build(plan, parent_vertex):
        u, window, choices = plan
        if parent_vertex is not None:
            parent[u] = parent_vertex
        for sub in choices:
            build(sub, u)
        return u

    prev_root = None
    root = None
    for plan in plans:
        r = build(plan, prev_root)
        if root is None:
            root = r
        prev_root = r
    layout = TreeLayout(root, parent)
    assert validate_layout(g, layout).ok
    assert bandwidth_of_layout(g, layout) <= k
    return True, layout


def exact_treebandwidth(g, budget=DEFAULT_STATE_BUDGET):
    """Minimum k accepted by decide_treebandwidth, from a safe lower bound up."""
    if g.n == 0:
        return 0, TreeLayout(None, {})
    lower = 1 if g.m > 0 else 0
    if g.n <= EXACT_PROVIDER_LIMIT:
        from .obstructions import exact_parameter

        tw, _ = exact_parameter(g, "treewidth")
        lower = max(lower, tw)
    k = lower
    while True:
        ok, layout = decide_treebandwidth(g, k, budget=budget)
        if ok:
            return k, layout
        k += 1


@dataclass(frozen=True)
class ApproxResult:
    accepted: bool
    layout: TreeLayout = None
    bandwidth: int = None
    reject_reason: str = None
    witness: dict = None
    parameters: tuple = None


def _provider(g, provider=None):
    """Default k-lean provider stand-in: exact at desk scale, heuristic above.

    Returns (decomposition, width_is_exact)."""
    if provider is not None:
        return provider(g), False
    if g.n <= EXACT_PROVIDER_LIMIT:
        return exact_tree_decomposition(g), True
    return heuristic_tree_decomposition(g), False


def _degeneracy(g):
    """Classic peeling bound; degeneracy <= treewidth."""
    deg = {v: g.degree(v) for v in range(g.n)}
    alive = set(range(g.n))
    best = 0
    while alive:
        v = min(alive, key=lambda x: (deg[x], x))
        best = max(best, deg[v])
        alive.discard(v)
        for w in g.adjacency[v]:
            if w in alive:
                deg[w] -= 1
    return best


def approximate_treebandwidth(g, k, provider=None, minor_budget=None):
    """Either a tree-layout (with its achieved bandwidth) or a certified reject.

    Pipeline: width check on the provider decomposition; fan-obstruction scan
    (a fan with 2^k spine vertices certifies tbw > k); well-formedness; fan
    conditions at the measured parameters; fold; collapse to a layout.
    Soundness: a reject always implies tbw(g) > k.
    """
    if k < 0:
        raise StructureError("k must be >= 0")
    if g.n == 0:
        return ApproxResult(True, TreeLayout(None, {}), 0)
    d, width_exact = _provider(g, provider)
    if width_exact and d.width() > k:
        return ApproxResult(
            False,
            reject_reason="treewidth",
            witness={"treewidth": d.width(), "k": k},
        )
    if not width_exact and _degeneracy(g) > k:
        return ApproxResult(
            False,
            reject_reason="treewidth",
            witness={"degeneracy": _degeneracy(g), "k": k},
        )
    # fan obstruction: a topological F_{2^k} forces tbw > k
    spine = 2 ** k
    if spine + 1 <= g.n:
        kwargs = {} if minor_budget is None else {"budget": minor_budget}
        for v in range(g.n):
            if g.degree(v) < 1:
                continue
            rest = [w for w in range(g.n) if w != v]
            sub, order = g.subgraph(rest)
            index = {w: i for i, w in enumerate(order)}
            u = [index[w] for w in g.adjacency[v]]
            found, model = rooted_path_minor(sub, u, spine, return_model=True, **kwargs)
            if found:
                branch_sets = [tuple(order[i] for i in s) for s in model]
                return ApproxResult(
                    False,
                    reject_reason="fan",
                    witness={"hub": v, "spine": spine, "branch_sets": branch_sets},
                )
    d = enforce_wellformed(g, d)
    params = measure_fan_parameters(g, d)
    folded = fold_fan(g, d, params)
    layout = layout_from_decomposition(g, folded.rooted_at(0))
    bw = bandwidth_of_layout(g, layout)
    return ApproxResult(True, layout, bw, parameters=params)


@dataclass(frozen=True)
class OverlapResult:
    accepted: bool
    decomposition: object = None
    width: int = None
    overlap: int = None
    reject_reason: str = None
    witness: dict = None
    parameters: tuple = None


def dipole_reject_threshold(k):
    """A topological dipole of this many parallel paths certifies otw > k."""
    return max(k * k, 2)


def overlap_treewidth_pipeline(g, k, provider=None):
    """Either a decomposition (width and overlap reported) or a certified reject."""
    if k < 0:
        raise StructureError("k must be >= 0")
    if g.n == 0:
        raise StructureError("empty graph")
    d, width_exact = _provider(g, provider)
    if width_exact and d.width() > k:
        return OverlapResult(
            False, reject_reason="treewidth", witness={"treewidth": d.width(), "k": k}
        )
    if not width_exact and _degeneracy(g) > k:
        return OverlapResult(
            False, reject_reason="treewidth", witness={"degeneracy": _degeneracy(g), "k": k}
        )
    threshold = dipole_reject_threshold(k)
    for u in range(g.n):
        for v in range(u + 1, g.n):
            paths = internally_disjoint_paths(g, u, v)
            if paths >= threshold:
                return OverlapResult(
                    False,
                    reject_reason="dipole",
                    witness={"poles": (u, v), "paths": paths, "threshold": threshold},
                )
    d = enforce_wellformed(g, d)
    params = measure_dipole_parameters(g, d)
    folded = fold_dipole(g, d, params)
    return OverlapResult(
        True,
        decomposition=folded,
        width=folded.width(),
        overlap=overlap_number(folded),
        parameters=params,
    )
