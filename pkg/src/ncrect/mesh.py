"""Structured parallelogram meshes with full vertex/edge/element incidence.

Only uniform n-by-n grids are generated, but every consumer works from
the generic incidence arrays, so other parallelogram meshes could be
added without touching downstream code.

Conventions
-----------
* Element vertices are listed counterclockwise; the first vertex is the
  image of the reference corner (-1, -1).
* Local edge ``l`` of an element joins local vertices ``l`` and
  ``(l+1) % 4``.
* Each edge stores its endpoints in canonical order: the endpoint with
  the lexicographically smaller (x, y) coordinate comes first.  The
  "forward" outer Gauss node of an edge is the one nearer the canonical
  first endpoint; both neighboring elements therefore resolve the same
  forward node.
"""

from dataclasses import dataclass

import numpy as np

from .ref_element import GAUSS_POINTS, OUTER_NODE


@dataclass(frozen=True)
class AffineMap:
    """x = A @ xhat + b maps the reference square onto an element."""

    A: np.ndarray
    b: np.ndarray

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.A))

    def apply(self, pts):
        pts = np.asarray(pts, dtype=float)
        return pts @ self.A.T + self.b

    def pull_back(self, pts):
        pts = np.asarray(pts, dtype=float)
        return (pts - self.b) @ np.linalg.inv(self.A).T


class Mesh:
    """Immutable vertex/edge/element incidence for a parallelogram grid.

    Attributes
    ----------
    vertices : (num_vertices, 2) float
    elements : (num_elements, 4) int, counterclockwise vertex ids
    edges : (num_edges, 2) int, canonical endpoint order
    element_edges : (num_elements, 4) int, edge id of each local edge
    element_edge_forward : (num_elements, 4) bool, True when the local
        edge direction matches the canonical edge direction
    edge_elements : (num_edges, 2) int, adjacent element ids (-1 if none)
    boundary_edge, boundary_vertex : bool masks
    """

    def __init__(self, vertices, elements):
        self.vertices = np.asarray(vertices, dtype=float)
        self.elements = np.asarray(elements, dtype=int)
        self._build_edges()
        for arr in (self.vertices, self.elements, self.edges,
                    self.element_edges, self.element_edge_forward,
                    self.edge_elements, self.boundary_edge,
                    self.boundary_vertex):
            arr.flags.writeable = False

    def _lex_less(self, va, vb):
        pa, pb = self.vertices[va], self.vertices[vb]
        return (pa[0], pa[1]) < (pb[0], pb[1])

    def _build_edges(self):
        edge_ids = {}
        edges = []
        ne = len(self.elements)
        self.element_edges = np.zeros((ne, 4), dtype=int)
        self.element_edge_forward = np.zeros((ne, 4), dtype=bool)
        edge_elems = []
        for el, verts in enumerate(self.elements):
            for loc in range(4):
                a, b = int(verts[loc]), int(verts[(loc + 1) % 4])
                canon = (a, b) if self._lex_less(a, b) else (b, a)
                key = (min(a, b), max(a, b))
                eid = edge_ids.get(key)
                if eid is None:
                    eid = len(edges)
                    edge_ids[key] = eid
                    edges.append(canon)
                    edge_elems.append([el, -1])
                else:
                    edge_elems[eid][1] = el
                self.element_edges[el, loc] = eid
                self.element_edge_forward[el, loc] = (a == canon[0])
        self.edges = np.array(edges, dtype=int)
        self.edge_elements = np.array(edge_elems, dtype=int)
        self.boundary_edge = self.edge_elements[:, 1] < 0
        self.boundary_vertex = np.zeros(len(self.vertices), dtype=bool)
        for eid in np.flatnonzero(self.boundary_edge):
            self.boundary_vertex[self.edges[eid]] = True

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def num_elements(self) -> int:
        return len(self.elements)

    @property
    def num_interior_vertices(self) -> int:
        return int(np.sum(~self.boundary_vertex))

    @property
    def num_interior_edges(self) -> int:
        return int(np.sum(~self.boundary_edge))

    def affine_map(self, element_id: int) -> AffineMap:
        """Affine map taking the reference square onto the element."""
        p = self.vertices[self.elements[element_id]]
        A = np.column_stack([(p[1] - p[0]) / 2, (p[3] - p[0]) / 2])
        b = (p[0] + p[2]) / 2
        return AffineMap(A, b)

    def edge_gauss_points(self, edge_id: int):
        """The 3 Gauss nodes of an edge, ordered (forward, mid, backward).

        The forward node is the one nearer the canonical first endpoint.
        """
        a, b = self.vertices[self.edges[edge_id]]
        mid = (a + b) / 2
        half = (b - a) / 2
        return np.array([mid - OUTER_NODE * half, mid, mid + OUTER_NODE * half])

    def element_gauss_points(self, element_id: int):
        """Images of the 12 reference Gauss points, reference ordering."""
        return self.affine_map(element_id).apply(GAUSS_POINTS)

    def edge_midpoint(self, edge_id: int):
        a, b = self.vertices[self.edges[edge_id]]
        return (a + b) / 2

    def edge_length(self, edge_id: int) -> float:
        a, b = self.vertices[self.edges[edge_id]]
        return float(np.linalg.norm(b - a))

    def outward_normal(self, element_id: int, local_edge: int):
        """Unit normal of a local edge pointing out of the element."""
        verts = self.elements[element_id]
        a = self.vertices[verts[local_edge]]
        b = self.vertices[verts[(local_edge + 1) % 4]]
        t = b - a
        n = np.array([t[1], -t[0]])
        n /= np.linalg.norm(n)
        center = self.vertices[verts].mean(axis=0)
        if np.dot(n, (a + b) / 2 - center) < 0:
            n = -n
        return n

    def locate(self, point, tol=1e-12):
        """Element containing a point; ties resolve to the lower id.

        Raises ValueError when the point lies outside every element; the
        caller decides whether that is an error.
        """
        point = np.asarray(point, dtype=float)
        for el in range(self.num_elements):
            ref = self.affine_map(el).pull_back(point)
            if np.max(np.abs(ref)) <= 1.0 + tol:
                return el
        raise ValueError(f"point {point} is outside the meshed domain")

    def dump(self) -> str:
        """Plain-text record dump for debugging and golden tests.

        One record per line:
            vertex <id> <x> <y> <boundary>
            edge <id> <v_first> <v_second> <boundary>
            element <id> <v0> <v1> <v2> <v3>
        """
        lines = []
        for i, (x, y) in enumerate(self.vertices):
            lines.append(f"vertex {i} {float(x)!r} {float(y)!r} "
                         f"{int(self.boundary_vertex[i])}")
        for i, (a, b) in enumerate(self.edges):
            lines.append(f"edge {i} {a} {b} {int(self.boundary_edge[i])}")
        for i, verts in enumerate(self.elements):
            lines.append("element " + " ".join(str(v) for v in [i, *verts]))
        return "\n".join(lines) + "\n"


def uniform_grid(origin, span_u, span_v, n: int) -> Mesh:
    """n-by-n grid of congruent parallelograms.

    The domain is the parallelogram spanned by span_u and span_v from
    origin.  Spans must be linearly independent.
    """
    origin = np.asarray(origin, dtype=float)
    span_u = np.asarray(span_u, dtype=float)
    span_v = np.asarray(span_v, dtype=float)
    if n < 1:
        raise ValueError(f"grid size must be >= 1, got {n}")
    det = span_u[0] * span_v[1] - span_u[1] * span_v[0]
    if abs(det) < 1e-14 * max(1.0, np.abs(span_u).max() * np.abs(span_v).max()):
        raise ValueError("span vectors are linearly dependent")
    idx = lambda i, j: j * (n + 1) + i
    vertices = np.array([
        origin + (i / n) * span_u + (j / n) * span_v
        for j in range(n + 1) for i in range(n + 1)
    ])
    elements = np.array([
        [idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)]
        for j in range(n) for i in range(n)
    ])
    return Mesh(vertices, elements)


def unit_square_grid(n: int) -> Mesh:
    """n-by-n grid on the unit square (0,1)^2 with h = 1/n."""
    return uniform_grid((0.0, 0.0), (1.0, 0.0), (0.0, 1.0), n)
