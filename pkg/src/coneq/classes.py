"""Combinatorial structure of a nonnegative matrix over the orthant.

The digraph of P has an edge i -> j exactly when P_ij != 0.  Its strongly
connected components are the *classes*; "alpha has access to beta" means a
path leads from alpha into beta (every class has access to itself).  A set of
vertices is *initial* when it is a union of classes closed under "has access
to": whatever can reach the set is already inside it.  Initial subsets are in
bijection with the P-invariant faces of the orthant, which is why almost all
solvability questions in the other modules reduce to computations here.

Classes are listed in a fixed topological order: access only goes forward
(class c can access class d only if c <= d).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .core import (
    DEFAULT_TOL,
    InvalidInput,
    NonnegMatrix,
    Tolerance,
    scalar_le,
    scalar_lt,
    scalars_equal,
)


@dataclass(frozen=True)
class ClassAnalysis:
    """Classes of a matrix, their topological order and access relation.

    classes       tuple of classes; each class is a sorted tuple of 1-based vertices
    vertex_class  0-based position v-1 -> index of the class containing vertex v
    reach         per class, a bitmask of the classes it has access to (self included)
    """

    n: int
    classes: tuple
    vertex_class: tuple
    reach: tuple

    @property
    def class_count(self) -> int:
        return len(self.classes)

    def class_of_vertex(self, v: int) -> int:
        if not 1 <= v <= self.n:
            raise InvalidInput(f"vertex {v} outside 1..{self.n}")
        return self.vertex_class[v - 1]

    def has_access(self, c_from: int, c_to: int) -> bool:
        return bool(self.reach[c_from] >> c_to & 1)

    def classes_meeting(self, vertices: Iterable[int]) -> int:
        """Bitmask of classes containing at least one of the given vertices."""
        mask = 0
        for v in vertices:
            mask |= 1 << self.class_of_vertex(v)
        return mask

    def accessors_mask(self, target_mask: int) -> int:
        """Bitmask of classes having access to at least one class in target_mask."""
        out = 0
        for c in range(self.class_count):
            if self.reach[c] & target_mask:
                out |= 1 << c
        return out

    def vertices_of_mask(self, mask: int) -> frozenset:
        verts = []
        for c in range(self.class_count):
            if mask >> c & 1:
                verts.extend(self.classes[c])
        return frozenset(verts)

    def to_json_dict(self) -> dict:
        return {
            "classes": [list(c) for c in self.classes],
            "access": [
                [self.has_access(c, d) for d in range(self.class_count)]
                for c in range(self.class_count)
            ],
        }


def _tarjan_sccs(adj: Sequence[Sequence[int]]) -> list:
    """Iterative Tarjan; components come out with every component after all
    components it can reach (reverse topological order)."""
    n = len(adj)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    sccs: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            for k in range(pi, len(adj[v])):
                w = adj[v][k]
                if index[w] == -1:
                    work[-1] = (v, k + 1)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                sccs.append(comp)
    return sccs


@lru_cache(maxsize=512)
def condense(P: NonnegMatrix) -> ClassAnalysis:
    """Classes, topological order and transitive access for a matrix."""
    n = P.n
    adj = [[j for j in range(n) if P.rows[i][j] != 0] for i in range(n)]
    sccs = _tarjan_sccs(adj)
    sccs.reverse()  # topological: access goes forward
    classes = tuple(tuple(sorted(v + 1 for v in comp)) for comp in sccs)
    vertex_class = [0] * n
    for ci, comp in enumerate(classes):
        for v in comp:
            vertex_class[v - 1] = ci
    k = len(classes)
    # direct edges between classes, then reachability by reverse-topological DP
    direct = [0] * k
    for i in range(n):
        ci = vertex_class[i]
        for j in adj[i]:
            cj = vertex_class[j]
            if cj != ci:
                direct[ci] |= 1 << cj
    reach = [0] * k
    for c in range(k - 1, -1, -1):
        mask = 1 << c
        rest = direct[c]
        while rest:
            d = (rest & -rest).bit_length() - 1
            mask |= reach[d]
            rest &= rest - 1
        reach[c] = mask
    return ClassAnalysis(n, classes, tuple(vertex_class), tuple(reach))


def smallest_initial_superset(analysis: ClassAnalysis, vertices: Iterable[int]) -> frozenset:
    """Union of all classes having access to the given vertex set."""
    target = analysis.classes_meeting(vertices)
    return analysis.vertices_of_mask(analysis.accessors_mask(target))


def is_initial(analysis: ClassAnalysis, vertices: Iterable[int]) -> bool:
    vs = frozenset(vertices)
    for v in vs:
        if not 1 <= v <= analysis.n:
            raise InvalidInput(f"vertex {v} outside 1..{analysis.n}")
    return smallest_initial_superset(analysis, vs) == vs


def dual_face(vertices: Iterable[int], n: int) -> frozenset:
    """Complementary support set {1..n} minus the given set."""
    vs = frozenset(vertices)
    return frozenset(range(1, n + 1)) - vs


@dataclass(frozen=True)
class ClassTaxonomy:
    """Per-class radii and structural flags.

    basic          radius equals the spectral radius of the whole matrix
    final          no access to any other class
    initial        no access from any other class
    distinguished  radius strictly exceeds that of every other accessor class
    distinguished_transpose  the same for the transposed access relation
    semi_distinguished       every accessor class has radius <= its own
    """

    radii: tuple
    rho: object
    basic: tuple
    final: tuple
    initial: tuple
    distinguished: tuple
    distinguished_transpose: tuple
    semi_distinguished: tuple

    def semi_distinguished_at(self, lam, tol: Tolerance = DEFAULT_TOL) -> tuple:
        """Indices of semi-distinguished classes whose radius equals lam."""
        return tuple(
            c
            for c, flag in enumerate(self.semi_distinguished)
            if flag and scalars_equal(self.radii[c], lam, tol)
        )

    def to_json_dict(self) -> dict:
        from .core import format_scalar

        return {
            "radii": [format_scalar(r) for r in self.radii],
            "rho": format_scalar(self.rho),
            "basic": list(self.basic),
            "final": list(self.final),
            "initial": list(self.initial),
            "distinguished": list(self.distinguished),
            "distinguished_transpose": list(self.distinguished_transpose),
            "semi_distinguished": list(self.semi_distinguished),
        }


def classify(
    analysis: ClassAnalysis, radii: Sequence, tol: Tolerance = DEFAULT_TOL
) -> ClassTaxonomy:
    """Flag every class given its radius (see spectral.class_radii)."""
    k = analysis.class_count
    if len(radii) != k:
        raise InvalidInput("one radius per class required")
    rho = max(radii) if k else 0
    basic = tuple(scalars_equal(radii[c], rho, tol) for c in range(k))
    final = tuple(analysis.reach[c] == 1 << c for c in range(k))
    initial = tuple(
        all(not analysis.has_access(d, c) for d in range(k) if d != c) for c in range(k)
    )
    distinguished = tuple(
        all(
            scalar_lt(radii[d], radii[c], tol)
            for d in range(k)
            if d != c and analysis.has_access(d, c)
        )
        for c in range(k)
    )
    distinguished_transpose = tuple(
        all(
            scalar_lt(radii[d], radii[c], tol)
            for d in range(k)
            if d != c and analysis.has_access(c, d)
        )
        for c in range(k)
    )
    semi = tuple(
        all(
            scalar_le(radii[d], radii[c], tol)
            for d in range(k)
            if analysis.has_access(d, c)
        )
        for c in range(k)
    )
    return ClassTaxonomy(
        tuple(radii), rho, basic, final, initial, distinguished,
        distinguished_transpose, semi,
    )
