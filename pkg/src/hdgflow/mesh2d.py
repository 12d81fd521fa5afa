"""2D triangulations with oriented facets and curved boundary facets.

A `Mesh` is immutable after construction.  Triangles are stored
counterclockwise; every facet carries the unit normal that is outward for
its first (lowest-index) adjacent element, a unit tangent spanning the
local facet frame, and its diameter.  Elements adjacent to a curved
boundary carry an isoparametric polynomial geometry map of degree
`geometry_order`; all other elements are affine.
"""

from dataclasses import dataclass, field

import numpy as np

from .polybasis import REF_EDGES, REF_VERTICES, quad_triangle


class MeshError(Exception):
    """Invalid mesh topology or geometry."""


@dataclass(frozen=True)
class Circle:
    center: tuple
    radius: float


@dataclass(frozen=True)
class Facet:
    """Read-only facet view.  `elems` holds 1 (boundary) or 2 element ids;
    the stored normal is outward for elems[0]."""

    index: int
    vertices: tuple
    elems: tuple
    normal: np.ndarray
    tangent: np.ndarray
    h: float
    label: str | None

    @property
    def is_boundary(self):
        return len(self.elems) == 1


# lattice of the principal nodes of a degree-g triangle, matching the ordering
# used by the curved-map monomial fit
def _lattice(g):
    return [(i, j) for j in range(g + 1) for i in range(g + 1 - j)]


def _monomial_eval(exps, pts):
    pts = np.atleast_2d(pts)
    out = np.empty((pts.shape[0], len(exps)))
    for m, (i, j) in enumerate(exps):
        out[:, m] = pts[:, 0] ** i * pts[:, 1] ** j
    return out


def _monomial_grad(exps, pts):
    pts = np.atleast_2d(pts)
    out = np.zeros((pts.shape[0], len(exps), 2))
    for m, (i, j) in enumerate(exps):
        if i:
            out[:, m, 0] = i * pts[:, 0] ** (i - 1) * pts[:, 1] ** j
        if j:
            out[:, m, 1] = j * pts[:, 0] ** i * pts[:, 1] ** (j - 1)
    return out


def _monomial_hess(exps, pts):
    pts = np.atleast_2d(pts)
    out = np.zeros((pts.shape[0], len(exps), 2, 2))
    for m, (i, j) in enumerate(exps):
        if i >= 2:
            out[:, m, 0, 0] = i * (i - 1) * pts[:, 0] ** (i - 2) * pts[:, 1] ** j
        if i >= 1 and j >= 1:
            v = i * j * pts[:, 0] ** (i - 1) * pts[:, 1] ** (j - 1)
            out[:, m, 0, 1] = v
            out[:, m, 1, 0] = v
        if j >= 2:
            out[:, m, 1, 1] = j * (j - 1) * pts[:, 0] ** i * pts[:, 1] ** (j - 2)
    return out


class Mesh:
    """Immutable 2D triangulation.

    Parameters are raw arrays; use the module-level constructors
    (`load_mesh`, `generate_structured`, `generate_ring`,
    `generate_channel_cylinder`) or `Mesh.build` in normal code.
    """

    def __init__(self, vertices, triangles, facet_vertices, facet_elems,
                 facet_local, facet_flip, facet_labels, geometry_order=1,
                 curved_maps=None, curved_geometry=None):
        self.vertices = np.asarray(vertices, dtype=float)
        self.triangles = np.asarray(triangles, dtype=np.int64)
        self.facet_vertices = facet_vertices
        self.facet_elems = facet_elems
        self.facet_local = facet_local
        self.facet_flip = facet_flip
        self.facet_labels = facet_labels          # dict facet index -> label
        self.geometry_order = geometry_order
        self.curved_maps = curved_maps or {}      # elem -> (2, n_mono) coeffs
        self.curved_geometry = curved_geometry or {}  # label -> Circle

        self.n_elements = len(self.triangles)
        self.n_facets = len(self.facet_vertices)

        a = self.vertices[self.facet_vertices[:, 0]]
        b = self.vertices[self.facet_vertices[:, 1]]
        tang = b - a
        self.facet_h = np.linalg.norm(tang, axis=1)
        if np.any(self.facet_h <= 0):
            raise MeshError("degenerate facet")
        self.facet_tangent = tang / self.facet_h[:, None]
        # rotate tangent by -90 deg: outward for the owning (CCW) element
        self.facet_normal = np.stack(
            [self.facet_tangent[:, 1], -self.facet_tangent[:, 0]], axis=1)

        # elem -> facet connectivity
        self.elem_facets = np.full((self.n_elements, 3), -1, dtype=np.int64)
        self.elem_flip = np.zeros((self.n_elements, 3), dtype=bool)
        for f in range(self.n_facets):
            for side in range(2):
                e = self.facet_elems[f, side]
                if e >= 0:
                    loc = self.facet_local[f, side]
                    self.elem_facets[e, loc] = f
                    self.elem_flip[e, loc] = self.facet_flip[f, side]
        if (self.elem_facets < 0).any():
            raise MeshError("element with unmatched facet")

        # affine geometry
        v0 = self.vertices[self.triangles[:, 0]]
        v1 = self.vertices[self.triangles[:, 1]]
        v2 = self.vertices[self.triangles[:, 2]]
        J = np.stack([v1 - v0, v2 - v0], axis=2)  # (NT, 2, 2), columns = edges
        self.affine_jac = J
        self.affine_det = J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]
        if np.any(self.affine_det <= 0):
            raise MeshError("inverted or degenerate element")
        self.affine_origin = v0
        inv = np.empty_like(J)
        inv[:, 0, 0] = J[:, 1, 1]
        inv[:, 0, 1] = -J[:, 0, 1]
        inv[:, 1, 0] = -J[:, 1, 0]
        inv[:, 1, 1] = J[:, 0, 0]
        self.affine_inv = inv / self.affine_det[:, None, None]
        self._mono_exps = _lattice(self.geometry_order) if self.curved_maps else None

    # -- constructors -------------------------------------------------------

    @staticmethod
    def build(vertices, triangles, boundary_markers=None, geometry_order=1,
              curved_maps=None, curved_geometry=None):
        """Assemble a Mesh from raw arrays, fixing orientation and building
        oriented facets.  boundary_markers maps frozenset vertex pairs (or
        sorted tuples) to label strings."""
        vertices = np.asarray(vertices, dtype=float)
        triangles = np.asarray(triangles, dtype=np.int64).copy()
        markers = {}
        for key, lab in (boundary_markers or {}).items():
            a, b = sorted(key)
            markers[(a, b)] = lab

        # enforce counterclockwise orientation
        v = vertices
        for t in range(len(triangles)):
            i, j, k = triangles[t]
            det = np.cross(v[j] - v[i], v[k] - v[i])
            if det == 0:
                raise MeshError(f"triangle {t} is degenerate")
            if det < 0:
                triangles[t, 1], triangles[t, 2] = triangles[t, 2], triangles[t, 1]

        edge_map = {}
        for t, tri in enumerate(triangles):
            for loc, (la, lb) in enumerate(REF_EDGES):
                a, b = tri[la], tri[lb]
                key = (min(a, b), max(a, b))
                edge_map.setdefault(key, []).append((t, loc, a, b))
        facet_vertices = []
        facet_elems = []
        facet_local = []
        facet_flip = []
        facet_labels = {}
        for key in sorted(edge_map):
            owners = edge_map[key]
            if len(owners) > 2:
                raise MeshError(f"facet {key} shared by {len(owners)} elements")
            owners.sort()
            t0, loc0, a0, b0 = owners[0]
            fidx = len(facet_vertices)
            facet_vertices.append((a0, b0))  # owner traversal direction
            if len(owners) == 2:
                t1, loc1, a1, b1 = owners[1]
                facet_elems.append((t0, t1))
                facet_local.append((loc0, loc1))
                facet_flip.append((False, a1 != a0))
            else:
                facet_elems.append((t0, -1))
                facet_local.append((loc0, -1))
                facet_flip.append((False, False))
                if key in markers:
                    facet_labels[fidx] = markers.pop(key)
        if markers:
            raise MeshError(f"boundary markers on non-boundary edges: {sorted(markers)}")
        return Mesh(vertices, triangles,
                    np.array(facet_vertices, dtype=np.int64),
                    np.array(facet_elems, dtype=np.int64),
                    np.array(facet_local, dtype=np.int64),
                    np.array(facet_flip, dtype=bool),
                    facet_labels, geometry_order=geometry_order,
                    curved_maps=curved_maps, curved_geometry=curved_geometry)

    # -- queries ------------------------------------------------------------

    def facet(self, f):
        elems = tuple(e for e in self.facet_elems[f] if e >= 0)
        return Facet(index=f, vertices=tuple(self.facet_vertices[f]),
                     elems=elems, normal=self.facet_normal[f],
                     tangent=self.facet_tangent[f], h=self.facet_h[f],
                     label=self.facet_labels.get(f))

    @property
    def boundary_markers(self):
        return dict(self.facet_labels)

    def facets_with_label(self, label):
        return np.array(sorted(f for f, lab in self.facet_labels.items() if lab == label),
                        dtype=np.int64)

    @property
    def interior_facets(self):
        return np.where(self.facet_elems[:, 1] >= 0)[0]

    @property
    def boundary_facets(self):
        return np.where(self.facet_elems[:, 1] < 0)[0]

    def is_curved(self, elem):
        return elem in self.curved_maps

    def curved_facets(self):
        """Facet indices lying on a curved boundary label."""
        out = []
        for f, lab in self.facet_labels.items():
            if lab in self.curved_geometry:
                out.append(f)
        return np.array(sorted(out), dtype=np.int64)

    def geometry_map(self, elem, ref_pts, with_hessian=False):
        """Map reference points to physical space.

        Returns (x, J, detJ) with shapes (n,2), (n,2,2), (n,), plus the map
        Hessian (n,2,2,2) when requested (zero for affine elements).
        """
        ref_pts = np.atleast_2d(np.asarray(ref_pts, dtype=float))
        n = ref_pts.shape[0]
        cm = self.curved_maps.get(elem)
        if cm is None:
            J = np.broadcast_to(self.affine_jac[elem], (n, 2, 2))
            det = np.broadcast_to(self.affine_det[elem], (n,))
            x = self.affine_origin[elem][None, :] + ref_pts @ self.affine_jac[elem].T
            if with_hessian:
                return x, J, det, np.zeros((n, 2, 2, 2))
            return x, J, det
        exps = self._mono_exps
        x = _monomial_eval(exps, ref_pts) @ cm.T
        G = _monomial_grad(exps, ref_pts)          # (n, nm, 2)
        J = np.einsum("cm,pmd->pcd", cm, G)        # (n, 2, 2)
        det = J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]
        if with_hessian:
            H = np.einsum("cm,pmde->pcde", cm, _monomial_hess(exps, ref_pts))
            return x, J, det, H
        return x, J, det

    def element_area(self, elem):
        if elem in self.curved_maps:
            q = quad_triangle(2 * self.geometry_order)
            _, _, det = self.geometry_map(elem, q.points)
            return float(np.dot(q.weights, det))
        return 0.5 * self.affine_det[elem]

    def total_area(self):
        return sum(self.element_area(e) for e in range(self.n_elements))

    def h_min(self):
        return float(self.facet_h.min())


# ---------------------------------------------------------------------------
# file loader


def load_mesh(path):
    """Load the text mesh format: `NV NT NBF`, then NV `x y` lines, NT
    `v0 v1 v2` lines and NBF `v0 v1 label` lines.  '#' starts a comment."""
    rows = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if line:
                rows.append((lineno, line.split()))
    if not rows:
        raise MeshError(f"{path}: empty mesh file")

    def parse(row, types, what):
        lineno, tok = row
        if len(tok) != len(types):
            raise MeshError(f"{path}:{lineno}: expected {what}")
        try:
            return [t(x) for t, x in zip(types, tok)]
        except ValueError as exc:
            raise MeshError(f"{path}:{lineno}: {exc}") from None

    nv, nt, nbf = parse(rows[0], [int, int, int], "NV NT NBF header")
    if len(rows) != 1 + nv + nt + nbf:
        raise MeshError(f"{path}: expected {1 + nv + nt + nbf} data lines, got {len(rows)}")
    verts = [parse(r, [float, float], "x y") for r in rows[1:1 + nv]]
    tris = [parse(r, [int, int, int], "v0 v1 v2") for r in rows[1 + nv:1 + nv + nt]]
    markers = {}
    for r in rows[1 + nv + nt:]:
        lineno, tok = r
        if len(tok) != 3:
            raise MeshError(f"{path}:{lineno}: expected 'v0 v1 label'")
        a, b = int(tok[0]), int(tok[1])
        markers[(min(a, b), max(a, b))] = tok[2]
    for lineno, t in zip((r[0] for r in rows[1 + nv:1 + nv + nt]), tris):
        if not all(0 <= v < nv for v in t):
            raise MeshError(f"{path}:{lineno}: vertex index out of range")
    return Mesh.build(np.array(verts), np.array(tris), markers)


# ---------------------------------------------------------------------------
# generators


def generate_structured(rect, nx, ny, labels=("left", "right", "bottom", "top")):
    """Structured triangulation of a rectangle: 2*nx*ny triangles, diagonals
    all running lower-left to upper-right."""
    x0, y0, x1, y1 = rect
    if nx < 1 or ny < 1 or x1 <= x0 or y1 <= y0:
        raise MeshError("degenerate rectangle or nonpositive subdivision")
    xs = np.linspace(x0, x1, nx + 1)
    ys = np.linspace(y0, y1, ny + 1)
    return _structured_lines(xs, ys, labels)


def _structured_lines(xs, ys, labels=("left", "right", "bottom", "top"),
                      skip_cell=None):
    nx, ny = len(xs) - 1, len(ys) - 1
    vid = lambda i, j: j * (nx + 1) + i
    verts = np.array([[x, y] for y in ys for x in xs])
    tris = []
    removed = []
    for j in range(ny):
        for i in range(nx):
            if skip_cell is not None and skip_cell(i, j):
                removed.append((i, j))
                continue
            a, b = vid(i, j), vid(i + 1, j)
            c, d = vid(i + 1, j + 1), vid(i, j + 1)
            tris.append((a, b, c))
            tris.append((a, c, d))
    markers = {}
    left, right, bottom, top = labels
    for j in range(ny):
        markers[(vid(0, j), vid(0, j + 1))] = left
        markers[(vid(nx, j), vid(nx, j + 1))] = right
    for i in range(nx):
        markers[(vid(i, 0), vid(i + 1, 0))] = bottom
        markers[(vid(i, ny), vid(i + 1, ny))] = top
    if skip_cell is None:
        return Mesh.build(verts, np.array(tris), markers)
    return verts, tris, markers, removed


def generate_ring(circle, rect, n_theta, n_layers, theta_offset=0.0,
                  radial_fractions=None, inner_label="obstacle",
                  outer_labels=("left", "right", "bottom", "top")):
    """O-grid between a circle and an enclosing rectangle boundary:
    2 * n_theta * n_layers triangles.  Inner facet chords lie on the circle
    (curve them with `curve_boundary` afterwards)."""
    (cx, cy), r = circle.center, circle.radius
    x0, y0, x1, y1 = rect
    thetas = theta_offset + 2 * np.pi * np.arange(n_theta) / n_theta

    def ray_to_rect(th):
        d = np.array([np.cos(th), np.sin(th)])
        ts = []
        if d[0] > 1e-14:
            ts.append((x1 - cx) / d[0])
        if d[0] < -1e-14:
            ts.append((x0 - cx) / d[0])
        if d[1] > 1e-14:
            ts.append((y1 - cy) / d[1])
        if d[1] < -1e-14:
            ts.append((y0 - cy) / d[1])
        t = min(t for t in ts if t > 0)
        return np.array([cx, cy]) + t * d

    if radial_fractions is None:
        radial_fractions = np.linspace(0.0, 1.0, n_layers + 1)
    radial_fractions = np.asarray(radial_fractions, dtype=float)
    inner = np.stack([np.array([cx + r * np.cos(t), cy + r * np.sin(t)]) for t in thetas])
    outer = np.stack([ray_to_rect(t) for t in thetas])
    verts = []
    for s in radial_fractions:
        verts.append(inner * (1 - s) + outer * s)
    verts = np.concatenate(verts, axis=0)
    vid = lambda i, j: j * n_theta + (i % n_theta)
    tris = []
    for j in range(n_layers):
        for i in range(n_theta):
            a, b = vid(i, j), vid(i + 1, j)
            c, d = vid(i + 1, j + 1), vid(i, j + 1)
            tris.append((a, b, c))
            tris.append((a, c, d))
    markers = {}
    for i in range(n_theta):
        markers[tuple(sorted((vid(i, 0), vid(i + 1, 0))))] = inner_label
    left, right, bottom, top = outer_labels
    tol = 1e-10 * max(x1 - x0, y1 - y0)
    for i in range(n_theta):
        a, b = vid(i, n_layers), vid(i + 1, n_layers)
        pa, pb = verts[a], verts[b]
        if abs(pa[0] - x0) < tol and abs(pb[0] - x0) < tol:
            lab = left
        elif abs(pa[0] - x1) < tol and abs(pb[0] - x1) < tol:
            lab = right
        elif abs(pa[1] - y0) < tol and abs(pb[1] - y0) < tol:
            lab = bottom
        elif abs(pa[1] - y1) < tol and abs(pb[1] - y1) < tol:
            lab = top
        else:
            raise MeshError("outer ring segment spans a rectangle corner; "
                            "choose theta_offset/n_theta so rays hit corners")
        markers[tuple(sorted((a, b)))] = lab
    return Mesh.build(verts, np.array(tris), markers)


def generate_channel_cylinder():
    """Benchmark channel [0,2.2]x[0,0.41] with a radius-0.05 obstacle at
    (0.2,0.2): structured background with a cut-out box plus a graded O-grid
    collar whose two innermost layers are thin (boundary-layer resolution).
    Curve the 'obstacle' facets afterwards."""
    cx, cy, r = 0.2, 0.2, 0.05
    h0 = 0.05
    xs = np.round(np.arange(0, 45) * h0, 10)          # 0 .. 2.2
    ys = np.array([0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.355, 0.41])
    box = (0.1, 0.1, 0.3, 0.3)

    def in_box(i, j):
        xm = 0.5 * (xs[i] + xs[i + 1])
        ym = 0.5 * (ys[j] + ys[j + 1])
        return box[0] < xm < box[2] and box[1] < ym < box[3]

    verts, tris, markers, removed = _structured_lines(
        xs, ys, labels=("inlet", "outlet", "wall", "wall"), skip_cell=in_box)
    verts = list(map(tuple, verts))
    vindex = {tuple(np.round(v, 10)): i for i, v in enumerate(verts)}

    # box boundary nodes ordered by angle around the cylinder
    ring_nodes = []
    for key, v in vindex.items():
        x, y = key
        on = (abs(x - box[0]) < 1e-12 or abs(x - box[2]) < 1e-12) and box[1] - 1e-12 <= y <= box[3] + 1e-12
        on = on or ((abs(y - box[1]) < 1e-12 or abs(y - box[3]) < 1e-12) and box[0] - 1e-12 <= x <= box[2] + 1e-12)
        if on:
            ring_nodes.append((np.arctan2(y - cy, x - cx), v))
    ring_nodes.sort()
    n_theta = len(ring_nodes)  # 16

    radii = [r, 0.06, 0.0725, 0.0875]
    n_layers = len(radii)
    ring_ids = np.empty((n_layers + 1, n_theta), dtype=np.int64)
    for i, (th, pout) in enumerate(ring_nodes):
        pout = np.asarray(pout)
        d = np.array([np.cos(th), np.sin(th)])
        for j, rad in enumerate(radii):
            p = (cx + rad * d[0], cy + rad * d[1])
            key = tuple(np.round(p, 10))
            if key not in vindex:
                vindex[key] = len(verts)
                verts.append(p)
            ring_ids[j, i] = vindex[key]
        ring_ids[n_layers, i] = vindex[tuple(np.round(pout, 10))]
    for j in range(n_layers):
        for i in range(n_theta):
            a, b = ring_ids[j, i], ring_ids[j, (i + 1) % n_theta]
            c, d = ring_ids[j + 1, (i + 1) % n_theta], ring_ids[j + 1, i]
            tris.append((a, b, c))
            tris.append((a, c, d))
    for i in range(n_theta):
        key = tuple(sorted((ring_ids[0, i], ring_ids[0, (i + 1) % n_theta])))
        markers[key] = "obstacle"
    mesh = Mesh.build(np.array(verts, dtype=float), np.array(tris), markers)
    return curve_boundary(mesh, "obstacle", Circle((cx, cy), r), g=3)


# ---------------------------------------------------------------------------
# refinement and curving


def refine_uniform(mesh):
    """Split every triangle into 4 congruent children; boundary markers are
    inherited, new boundary vertices on curved labels are projected onto the
    stored geometry, and curved maps are rebuilt at the same order."""
    v = mesh.vertices
    tris = mesh.triangles
    midpoint = {}
    new_verts = list(map(tuple, v))

    # facet label lookup by sorted vertex pair, for marker inheritance
    edge_label = {}
    for f, lab in mesh.facet_labels.items():
        a, b = mesh.facet_vertices[f]
        edge_label[(min(a, b), max(a, b))] = lab

    def mid(a, b):
        key = (min(a, b), max(a, b))
        if key in midpoint:
            return midpoint[key]
        p = 0.5 * (v[a] + v[b])
        lab = edge_label.get(key)
        geom = mesh.curved_geometry.get(lab) if lab else None
        if geom is not None:
            c = np.asarray(geom.center)
            d = p - c
            p = c + geom.radius * d / np.linalg.norm(d)
        idx = len(new_verts)
        new_verts.append(tuple(p))
        midpoint[key] = idx
        return idx

    new_tris = []
    for (a, b, c) in tris:
        ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
        new_tris.extend([(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)])
    new_markers = {}
    for (a, b), lab in edge_label.items():
        m = midpoint[(min(a, b), max(a, b))]
        new_markers[(min(a, m), max(a, m))] = lab
        new_markers[(min(b, m), max(b, m))] = lab
    out = Mesh.build(np.array(new_verts), np.array(new_tris), new_markers,
                     curved_geometry=dict(mesh.curved_geometry))
    for lab, geom in mesh.curved_geometry.items():
        out = curve_boundary(out, lab, geom, mesh.geometry_order)
    return out


def curve_boundary(mesh, label, geometry, g):
    """Attach degree-g isoparametric maps to elements adjacent to `label`
    facets, interpolating the circular geometry at g+1 points per facet."""
    if g < 1:
        raise MeshError("geometry order must be >= 1")
    if not isinstance(geometry, Circle):
        raise MeshError("only circular boundary geometry is supported")
    facets = mesh.facets_with_label(label)
    if len(facets) == 0:
        raise MeshError(f"no facets labeled {label!r}")
    c = np.asarray(geometry.center, dtype=float)
    r = geometry.radius
    for f in facets:
        for vtx in mesh.facet_vertices[f]:
            if abs(np.linalg.norm(mesh.vertices[vtx] - c) - r) > 1e-8 * r:
                raise MeshError(f"facet {f} endpoint not on the circle")
    curved_geometry = dict(mesh.curved_geometry)
    curved_geometry[label] = geometry
    if g == 1:
        return Mesh(mesh.vertices, mesh.triangles, mesh.facet_vertices,
                    mesh.facet_elems, mesh.facet_local, mesh.facet_flip,
                    dict(mesh.facet_labels), geometry_order=1,
                    curved_maps={}, curved_geometry=curved_geometry)

    exps = _lattice(g)
    lat = np.array([(i / g, j / g) for (i, j) in exps])
    Vmono = _monomial_eval(exps, lat)
    curved_elems = {}
    for f in facets:
        e = mesh.facet_elems[f, 0]
        curved_elems.setdefault(e, []).append(f)
    # keep previously curved elements from other labels
    maps = dict(mesh.curved_maps)
    for e, efacets in curved_elems.items():
        tri = mesh.triangles[e]
        corners = mesh.vertices[tri]
        phys = lat @ np.stack([corners[1] - corners[0], corners[2] - corners[0]]) + corners[0]
        for f in efacets:
            loc = np.where(mesh.elem_facets[e] == f)[0][0]
            la, lb = REF_EDGES[loc]
            pa, pb = corners[la], corners[lb]
            tha = np.arctan2(pa[1] - c[1], pa[0] - c[0])
            thb = np.arctan2(pb[1] - c[1], pb[0] - c[0])
            dth = (thb - tha + np.pi) % (2 * np.pi) - np.pi
            ea = REF_VERTICES[la]
            eb = REF_VERTICES[lb]
            for m, pt in enumerate(lat):
                # is this lattice node on the local edge loc?
                s = _edge_param(ea, eb, pt)
                if s is None:
                    continue
                th = tha + s * dth
                phys[m] = c + r * np.array([np.cos(th), np.sin(th)])
        coeffs = np.linalg.solve(Vmono, phys)  # (n_mono, 2)
        maps[e] = coeffs.T.copy()
    out = Mesh(mesh.vertices, mesh.triangles, mesh.facet_vertices,
               mesh.facet_elems, mesh.facet_local, mesh.facet_flip,
               dict(mesh.facet_labels), geometry_order=g,
               curved_maps=maps, curved_geometry=curved_geometry)
    _check_curved_positivity(out)
    return out


def _edge_param(ea, eb, pt, tol=1e-12):
    d = eb - ea
    w = pt - ea
    cross = d[0] * w[1] - d[1] * w[0]
    if abs(cross) > tol:
        return None
    s = np.dot(w, d) / np.dot(d, d)
    if -tol <= s <= 1 + tol:
        return min(max(s, 0.0), 1.0)
    return None


def _check_curved_positivity(mesh):
    q = quad_triangle(max(4, 2 * mesh.geometry_order + 2))
    for e in mesh.curved_maps:
        _, _, det = mesh.geometry_map(e, q.points)
        if np.any(det <= 0):
            raise MeshError(f"curved element {e} has nonpositive Jacobian")


def geometry_map(mesh, elem, ref_pts, with_hessian=False):
    """Module-level alias for Mesh.geometry_map."""
    return mesh.geometry_map(elem, ref_pts, with_hessian=with_hessian)
