"""Independent reference computations used by the test-suite.

Nothing here imports the strata or tangle code; each function recomputes
its quantity from the analytic surface or by brute force.
"""

import itertools
import math

import numpy as np


# -- analytic folds and cusps -------------------------------------------------

def _grad_param(P, s, t, h):
    Ps = (P(s + h, t) - P(s - h, t)) / (2 * h)
    Pt = (P(s, t + h) - P(s, t - h)) / (2 * h)
    return Ps, Pt


def fold_cusps_on_grid(P, s_range, t_range, v, n=800, periodic=(False, False), h=1e-5):
    """ Cusps of the fold of a parametric patch ``P(s, t)`` under ``v``.

    ``g = <n, v>`` is sampled on an ``n x n`` grid; the fold is its zero
    contour (marching squares) and cusps are sign changes along the contour
    of ``<T, n x v>`` where ``T = P_s g_t - P_t g_s`` is the fold tangent.
    Returns ``(cusp points, contour count)``.
    """
    from skimage.measure import find_contours

    v = np.asarray(v, dtype=float)
    v = v / np.linalg.norm(v)
    s = np.linspace(*s_range, n)
    t = np.linspace(*t_range, n)
    S, T = np.meshgrid(s, t, indexing="ij")

    def normal(S, T):
        Ps, Pt = _grad_param(P, S, T, h)
        nn = np.cross(Ps, Pt)
        return nn / np.linalg.norm(nn, axis=-1)[..., None]

    def gval(S, T):
        return normal(S, T) @ v

    G = gval(S, T)
    contours = find_contours(G, 0.0)
    ds = (s[-1] - s[0]) / (n - 1)
    dt = (t[-1] - t[0]) / (n - 1)
    cusps = []
    for c in contours:
        cs = s[0] + c[:, 0] * ds
        ct = t[0] + c[:, 1] * dt
        Ps, Pt = _grad_param(P, cs, ct, h)
        gs = (gval(cs + h, ct) - gval(cs - h, ct)) / (2 * h)
        gt = (gval(cs, ct + h) - gval(cs, ct - h)) / (2 * h)
        Tv = Ps * gt[:, None] - Pt * gs[:, None]
        nn = normal(cs, ct)
        crit = np.einsum("ij,ij->i", Tv, np.cross(nn, v))
        closed = np.allclose(c[0], c[-1])
        sig = np.sign(crit)
        rng = range(len(sig) - 1) if not closed else range(len(sig) - 1)
        for i in rng:
            if sig[i] != sig[i + 1] and sig[i] != 0:
                w = crit[i] / (crit[i] - crit[i + 1])
                cusps.append(P(cs[i] + w * (cs[i + 1] - cs[i]), ct[i] + w * (ct[i + 1] - ct[i])))
    return cusps, len(contours)


def sphere_chart(fmap, center_axis=0):
    """ ``P(y, z)`` on the front hemisphere ``x > 0`` composed with ``fmap``. """
    def P(y, z):
        y = np.asarray(y, dtype=float)
        z = np.asarray(z, dtype=float)
        x = np.sqrt(np.clip(1 - y * y - z * z, 1e-12, None))
        u = np.stack([x, y, z], axis=-1)
        shp = u.shape
        return fmap(u.reshape(-1, 3)).reshape(shp)
    return P


# -- brute-force double tangents ---------------------------------------------

def winding_number(mesh, point):
    """ Generalized winding number of a closed mesh around ``point``. """
    p = mesh.vertices[mesh.faces] - np.asarray(point, dtype=float)
    a, b, c = p[:, 0], p[:, 1], p[:, 2]
    la, lb, lc = (np.linalg.norm(x, axis=1) for x in (a, b, c))
    num = np.einsum("ij,ij->i", a, np.cross(b, c))
    den = (la * lb * lc + np.einsum("ij,ij->i", a, b) * lc
           + np.einsum("ij,ij->i", b, c) * la + np.einsum("ij,ij->i", c, a) * lb)
    return float(np.sum(2 * np.arctan2(num, den)) / (4 * math.pi))


def brute_double_tangents(mesh, v, folds, samples=12, end_edges=2.0):
    """ Double tangents by exhaustive pairing of PLUS fold segments.

    Every pair of non-adjacent PLUS segments is sampled densely; the closest
    projected sample pair seeds a bounded least-squares refinement and a
    pair counts when the projected distance vanishes.  The open vertical
    piece between the two touching points must have winding number one at
    a row of sample points away from its ends.  Returns the sorted
    polarity list.
    """
    from scipy.optimize import minimize

    v = np.asarray(v, dtype=float)
    v = v / np.linalg.norm(v)
    a0 = np.array([1.0, 0.0, 0.0]) if abs(v[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(v, a0)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(v, e1)
    proj = np.stack([e1, e2], axis=1)

    segs = []
    for li, loop in enumerate(folds):
        n = len(loop.points)
        for i in range(n):
            if loop.plus[i]:
                segs.append((li, i, n, loop.points[i], loop.points[(i + 1) % n]))

    tol = 1e-9 * mesh.diagonal
    zone = end_edges * mesh.mean_edge_length
    u = np.linspace(0.0, 1.0, samples)
    pols = []
    for x in range(len(segs)):
        lx, ix, nx, ax, bx = segs[x]
        sx = (ax + u[:, None] * (bx - ax)) @ proj
        for y in range(x + 1, len(segs)):
            ly, iy, ny, ay, by = segs[y]
            if lx == ly and (abs(ix - iy) == 1 or abs(ix - iy) == nx - 1):
                continue
            sy = (ay + u[:, None] * (by - ay)) @ proj
            d = np.linalg.norm(sx[:, None, :] - sy[None, :, :], axis=2)
            k = np.unravel_index(np.argmin(d), d.shape)
            reach = np.linalg.norm(sx[1] - sx[0]) + np.linalg.norm(sy[1] - sy[0])
            if d[k] > reach:
                continue

            def f(st):
                p = (ax + st[0] * (bx - ax) - ay - st[1] * (by - ay)) @ proj
                return float(p @ p)
            res = minimize(f, [u[k[0]], u[k[1]]], bounds=[(0, 1), (0, 1)],
                           method="L-BFGS-B", options={"ftol": 1e-30, "gtol": 1e-16})
            s, t = res.x
            if math.sqrt(max(res.fun, 0.0)) > tol or s in (0.0, 1.0) or t in (0.0, 1.0):
                continue
            px = ax + s * (bx - ax)
            py = ay + t * (by - ay)
            if np.dot(px, v) > np.dot(py, v):
                hi, lo, thi, tlo = px, py, bx - ax, by - ay
            else:
                hi, lo, thi, tlo = py, px, by - ay, bx - ax
            length = float(np.dot(hi - lo, v))
            if length <= 2 * zone:
                # too short to leave the end zones: only the midpoint decides
                checks = [0.5]
            else:
                checks = np.linspace(zone / length, 1 - zone / length, 9)
            if all(winding_number(mesh, lo + c * (hi - lo)) > 0.5 for c in checks):
                det = np.linalg.det(np.stack([tlo / np.linalg.norm(tlo),
                                              thi / np.linalg.norm(thi), v]))
                pols.append(1 if det < 0 else -1)
    return sorted(pols)


# -- 4-regular multigraphs by half-edge matchings --------------------------------

def _perfect_matchings(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for k in range(len(rest)):
        for m in _perfect_matchings(rest[:k] + rest[k + 1:]):
            yield [(first, rest[k])] + m


def four_regular_counts(c):
    """ Connected 4-regular multigraphs on exactly ``c`` vertices.

    Every perfect matching of the ``4 c`` half-edges is turned into an edge
    multiset; graphs are compared by their sorted edge lists minimized over
    all vertex permutations.
    """
    half = [(v, k) for v in range(c) for k in range(4)]
    seen = set()
    for m in _perfect_matchings(half):
        edges = [tuple(sorted((a[0], b[0]))) for a, b in m]
        adj = {v: set() for v in range(c)}
        for a, b in edges:
            adj[a].add(b)
            adj[b].add(a)
        reach, todo = {0}, [0]
        while todo:
            for w in adj[todo.pop()]:
                if w not in reach:
                    reach.add(w)
                    todo.append(w)
        if len(reach) != c:
            continue
        key = min(tuple(sorted(tuple(sorted((p[a], p[b]))) for a, b in edges))
                  for p in itertools.permutations(range(c)))
        seen.add(key)
    return len(seen)


# -- abelianization by determinantal divisors ------------------------------------

def abelianization_by_minors(n_generators, rows):
    """ ``(rank, torsion)`` of ``Z^n / rowspace`` from gcds of minors.

    The k-th determinantal divisor ``d_k`` is the gcd of all k x k minors;
    the invariant factors are ``d_k / d_{k-1}``.
    """
    from fractions import Fraction

    def det(m):
        m = [[Fraction(x) for x in r] for r in m]
        n = len(m)
        out = Fraction(1)
        for i in range(n):
            p = next((r for r in range(i, n) if m[r][i] != 0), None)
            if p is None:
                return 0
            if p != i:
                m[i], m[p] = m[p], m[i]
                out = -out
            out *= m[i][i]
            for r in range(i + 1, n):
                f = m[r][i] / m[i][i]
                for k in range(i, n):
                    m[r][k] -= f * m[i][k]
        return int(out)

    if not rows or n_generators == 0:
        return n_generators, []
    divisors = [1]
    for k in range(1, min(len(rows), n_generators) + 1):
        g = 0
        for ri in itertools.combinations(range(len(rows)), k):
            for ci in itertools.combinations(range(n_generators), k):
                g = math.gcd(g, det([[rows[r][c] for c in ci] for r in ri]))
        if g == 0:
            break
        divisors.append(g)
    factors = [divisors[k] // divisors[k - 1] for k in range(1, len(divisors))]
    return n_generators - len(factors), [f for f in factors if f != 1]


# -- Clausen function series ----------------------------------------------------------

def regular_ideal_tetrahedron_volume(dps=40):
    """ ``3 Lambda(pi/3)`` with the Lobachevsky function from mpmath's Clausen
    function, cross-checked against a direct accelerated series. """
    import mpmath

    with mpmath.workdps(dps):
        a = 3 * mpmath.clsin(2, 2 * mpmath.pi / 3) / 2
        # Lambda(t) = 1/2 sum sin(2 k t) / k^2; period-3 coefficients
        # sin(2 pi k / 3) are sqrt(3)/2 * (1, -1, 0, ...), summed exactly
        # through the Hurwitz zeta function
        s = mpmath.sqrt(3) / 2 * (mpmath.zeta(2, mpmath.mpf(1) / 3)
                                  - mpmath.zeta(2, mpmath.mpf(2) / 3)) / 9
        b = 3 * s / 2
        assert abs(a - b) < mpmath.mpf(10) ** (-dps + 5)
        return float(a)
