"""p-centered colourings from tree-layouts, with brute-force verification."""

from dataclasses import dataclass

from .exceptions import BudgetExceededError, FormatError, InvalidLayoutError, StructureError
from .layouts import bandwidth_of_layout, validate_layout

__all__ = [
    "Colouring",
    "pcentered_from_layout",
    "verify_pcentered",
    "serialize_colouring",
    "parse_colouring",
]


@dataclass(frozen=True)
class Colouring:
    colour: dict
    palette_size: int


def pcentered_from_layout(g, t, p):
    """colour(x) = depth(x) mod (p*k + 1) for a layout of bandwidth k.

    Guaranteed p-centered: in any connected subgraph a repeat of the topmost
    vertex's colour forces > p intermediate depths, all coloured distinctly.
    """
    if p < 1:
        raise StructureError("p must be >= 1")
    report = validate_layout(g, t)
    if not report.ok:
        raise InvalidLayoutError("layout invalid on %s" % (report.violations,))
    k = bandwidth_of_layout(g, t)
    palette = p * k + 1
    colour = {v: t.depth[v] % palette for v in t.vertices()}
    return Colouring(colour, palette)


def _connected_subsets(g):
    """All connected vertex subsets, each exactly once (fixed/free frontier)."""
    masks = g.neighbour_masks
    full = (1 << g.n) - 1
    out = []

    for seed in range(g.n):
        # subsets whose minimum vertex is `seed`
        allowed = full & ~((1 << seed) - 1)

        def rec(current, frontier, forbidden):
            out.append(current)
            f = frontier & ~forbidden & ~current & allowed
            while f:
                v = (f & -f).bit_length() - 1
                f &= f - 1
                rec(current | (1 << v), frontier | masks[v], forbidden)
                forbidden |= 1 << v

        rec(1 << seed, masks[seed], 0)
    return out


def verify_pcentered(g, c, p, max_subsets=5_000_000):
    """Exact check by enumerating connected vertex subsets: each must see more
    than p colours or contain a uniquely coloured vertex.

    Induced subsets suffice: a connected subgraph's vertex set induces a
    connected subgraph, and colours depend only on the vertex set.
    Returns (True, None) or (False, witness vertex tuple).
    """
    if set(c.colour) != set(range(g.n)):
        raise StructureError("colouring is not total on V")
    # crude budget guard before enumerating
    if g.n > 2 and 2 ** g.n > max_subsets:
        raise BudgetExceededError("too many subsets to enumerate (n=%d)" % g.n)
    for mask in _connected_subsets(g):
        seen = {}
        m = mask
        while m:
            v = (m & -m).bit_length() - 1
            m &= m - 1
            seen[c.colour[v]] = seen.get(c.colour[v], 0) + 1
        if len(seen) > p:
            continue
        if any(cnt == 1 for cnt in seen.values()):
            continue
        witness = tuple(v for v in range(g.n) if mask >> v & 1)
        return False, witness
    return True, None


def serialize_colouring(c):
    lines = ["%d %d" % (v, c.colour[v]) for v in sorted(c.colour)]
    return "\n".join(lines) + ("\n" if lines else "")


def parse_colouring(text):
    colour = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise FormatError("expected 'v colour'", line=lineno)
        v, col = int(parts[0]), int(parts[1])
        if v in colour:
            raise FormatError("duplicate vertex %d" % v, line=lineno)
        colour[v] = col
    palette = len(set(colour.values()))
    return Colouring(colour, palette)
