"""
The adjusted Fricke tree of elliptic generator triples.

A node is an ordered triple (E, F, G) of order-two elliptics with
G F E = S^a.  The heights of their fixed points are 1/z, 1/y, 1/x where
(x, y, z) = (gamma_G, gamma_F, gamma_E) solves x^2 + y^2 + z^2 = a x y z.

Paths are strings over ``n`` (nu), ``l`` (lambda), ``r`` (rho); canonical
order is lexicographic with n < l < r.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import MoveRejected, NotHyperbolic
from .group import GroupData
from .mobius import Mobius, translation
from .scalar import simplify

NU, LAMBDA, RHO = "n", "l", "r"
MOVE_ORDER = {NU: 0, LAMBDA: 1, RHO: 2}
GREEK = {NU: "ν", LAMBDA: "λ", RHO: "ρ"}


def path_key(path):
    return tuple(MOVE_ORDER[ch] for ch in path)


@dataclass(frozen=True)
class TreeNode:
    E: Mobius
    F: Mobius
    G: Mobius
    path: str
    group: GroupData = field(repr=False, compare=False)

    @property
    def x(self):
        return self.G.gamma

    @property
    def y(self):
        return self.F.gamma

    @property
    def z(self):
        return self.E.gamma

    @property
    def heights_inv(self):
        return (self.x, self.y, self.z)

    @property
    def level(self):
        return len(self.path)

    @property
    def key(self):
        return path_key(self.path)

    @property
    def greek_path(self):
        return "".join(GREEK[ch] for ch in self.path)

    def fricke_residual(self):
        x, y, z = self.heights_inv
        return simplify(x * x + y * y + z * z - self.group.a * x * y * z)


def root(group: GroupData) -> TreeNode:
    return TreeNode(group.t0, group.t1, group.t2, "", group)


def move_nu(node: TreeNode) -> TreeNode:
    """(E, F, G) -> (FEF, G, S^a F S^-a); only applied at the root."""
    if node.path:
        raise MoveRejected("nu is applied only at the root of the adjusted Fricke tree")
    g = node.group
    E, F, G = node.E, node.F, node.G
    return TreeNode(F @ E @ F, G, g.s_a @ F @ g.s_inv, node.path + NU, g)


def move_rho(node: TreeNode) -> TreeNode:
    """(E, F, G) -> (FGF, F, S^a E S^-a)."""
    g = node.group
    E, F, G = node.E, node.F, node.G
    return TreeNode(F @ G @ F, F, g.s_a @ E @ g.s_inv, node.path + RHO, g)


def move_lambda(node: TreeNode) -> TreeNode:
    """(E, F, G) -> (EFE, E, G)."""
    E, F, G = node.E, node.F, node.G
    return TreeNode(E @ F @ E, E, G, node.path + LAMBDA, node.group)


MOVES = {NU: move_nu, LAMBDA: move_lambda, RHO: move_rho}


def walk(group: GroupData, path: str) -> TreeNode:
    node = root(group)
    for ch in path:
        node = MOVES[ch](node)
    return node


# -- normal-form recurrence --------------------------------------------------
#
# Each node is a real translate (by t) of the normalized triple
#   E0 = [[0, *], [z, 0]], E1 = [[x/z, *], [y, -x/z]], E2 = [[ax - y/z, *], [x, -ax + y/z]]
# and the moves act on (t, x, y, z) without any matrix products.  This is the
# route used in float mode, where deep matrix products lose all precision.


def _order_two(alpha, gamma, arith):
    return Mobius.make(alpha, arith.div(-1 - alpha * alpha, gamma), gamma, -alpha)


def node_from_normal(group, path, t, x, y, z):
    ar, a = group.arith, group.a
    E = _order_two(simplify(z * t), z, ar)
    F = _order_two(simplify(ar.div(x, z) + y * t), y, ar)
    G = _order_two(simplify(a * x - ar.div(y, z) + x * t), x, ar)
    return TreeNode(E, F, G, path, group)


def recurrence_step(move, t, x, y, z, a, arith):
    div = arith.div
    if move == LAMBDA:
        zn = simplify(a * x * z - y)
        return simplify(t - div(x, z * zn)), x, z, zn
    if move == RHO:
        zn = simplify(a * y * z - x)
        return simplify(t + div(y, z * zn)), z, y, zn
    zn = simplify(a * x * y - z)
    return simplify(t + div(a * x * x, z * zn)), y, x, zn


# -- enumeration -------------------------------------------------------------


def _subtree_paths(prefix, depth):
    paths = [prefix]
    frontier = [prefix]
    for _ in range(depth):
        frontier = [p + ch for p in frontier for ch in (LAMBDA, RHO)]
        paths.extend(frontier)
    return paths


def enumerate_tree(group: GroupData, depth: int, method=None):
    """
    Root and nu(root), each with their {lambda, rho}-descendants to ``depth``,
    in canonical path order.  ``method`` is ``"matrix"`` (products of the
    generators; default in exact mode) or ``"recurrence"`` (default in float mode).
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    method = method or ("matrix" if group.arith.exact else "recurrence")
    if method not in ("matrix", "recurrence"):
        raise ValueError(f"unknown enumeration method {method!r}")
    if method == "matrix":
        start = root(group)
        tops = [start, move_nu(start)]
        out = []
        for top in tops:
            frontier = [top]
            out.append(top)
            for _ in range(depth):
                frontier = [m(n) for n in frontier for m in (move_lambda, move_rho)]
                out.extend(frontier)
    else:
        out = _enumerate_recurrence(group, depth)
    out.sort(key=lambda n: n.key)
    return out


def _enumerate_recurrence(group, depth):
    ar, a = group.arith, group.a
    r = root(group)
    t0 = 0
    state0 = (t0, r.x, r.y, r.z)
    states = [("", state0), (NU, recurrence_step(NU, *state0, a, ar))]
    out = []
    for path, st in states:
        frontier = [(path, st)]
        out.append(node_from_normal(group, path, *st))
        for _ in range(depth):
            nxt = []
            for p, s in frontier:
                for mv in (LAMBDA, RHO):
                    nxt.append((p + mv, recurrence_step(mv, *s, a, ar)))
            frontier = nxt
            out.extend(node_from_normal(group, p, *s) for p, s in frontier)
    return out


def heights_by_recurrence(group: GroupData, depth: int):
    """(path, x, y, z) for every node, from the Vieta-type recurrence alone."""
    ar, a = group.arith, group.a
    r = root(group)
    st = (0, r.x, r.y, r.z)
    result = []
    for path, s in (("", st), (NU, recurrence_step(NU, *st, a, ar))):
        frontier = [(path, s)]
        result.append((path, *s[1:]))
        for _ in range(depth):
            frontier = [(p + mv, recurrence_step(mv, *q, a, ar)) for p, q in frontier for mv in (LAMBDA, RHO)]
            result.extend((p, *q[1:]) for p, q in frontier)
    result.sort(key=lambda item: path_key(item[0]))
    return result


# -- per-node data -----------------------------------------------------------


def normal_form(node: TreeNode):
    """(t, E0, E1, E2): t = alpha_E/gamma_E and the triple conjugated by z -> z - t."""
    ar = node.group.arith
    t = ar.div(node.E.alpha, node.E.gamma)
    g, gi = translation(-t), translation(t)
    return t, g @ node.E @ gi, g @ node.F @ gi, g @ node.G @ gi


def normal_shapes(x, y, z, a, arith):
    """The three matrices prescribed for a normalized triple with heights (x, y, z)."""
    E0 = _order_two(0, z, arith)
    E1 = _order_two(arith.div(x, z), y, arith)
    E2 = _order_two(simplify(a * x - arith.div(y, z)), x, arith)
    return E0, E1, E2


@dataclass(frozen=True)
class GeodesicData:
    trace: object
    length: object
    peak_height: object


def geodesic_data(node_or_z, a, arith=None) -> GeodesicData:
    """Trace a z, length 2 arccosh(a z / 2) and peak height sqrt(a^2/4 - 1/z^2)."""
    if isinstance(node_or_z, TreeNode):
        z = node_or_z.z
        arith = arith or node_or_z.group.arith
    else:
        z = node_or_z
    if arith is None:
        raise ValueError("an Arith context is required for a bare z value")
    trace = simplify(a * z)
    if trace <= 2:
        raise NotHyperbolic(f"a z = {trace} <= 2")
    mp = arith.mp
    half = arith.real(trace) / 2
    length = 2 * mp.acosh(half)
    zr = arith.real(z)
    ar = arith.real(a)
    peak = mp.sqrt(ar * ar / 4 - 1 / (zr * zr))
    return GeodesicData(trace, length, peak)


@dataclass(frozen=True)
class ExceptionalGeodesic:
    name: str
    matrix: Mobius
    z: object


def exceptional_geodesics(group: GroupData):
    """The two geodesics not indexed by tree nodes: axes of T1 S^-a and T2 S^-a."""
    ar = group.arith
    out = []
    for name, t in (("T1", group.t1), ("T2", group.t2)):
        m = t @ group.s_inv
        out.append(ExceptionalGeodesic(f"{name}S^-a", m, ar.div(abs(m.trace), group.a)))
    return out


def node_record(node: TreeNode):
    ar = node.group.arith
    rec = {
        "path": node.path,
        "matrices": {k: getattr(node, k).to_list(ar) for k in ("E", "F", "G")},
        "x": ar.fmt(node.x),
        "y": ar.fmt(node.y),
        "z": ar.fmt(node.z),
    }
    try:
        geo = geodesic_data(node, node.group.a)
        rec.update(trace=ar.fmt(geo.trace), length=ar.fmt(geo.length), peak_height=ar.fmt(geo.peak_height))
    except NotHyperbolic:
        rec.update(trace=ar.fmt(node.group.a * node.z), length=None, peak_height=None)
    return rec
