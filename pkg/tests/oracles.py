"""Independent reference computations used by the tests."""
import mpmath


def tree_path_dist(doc, a, b):
    """Distance between two edge loci by splitting edges and summing along a DFS path.

    ``a`` and ``b`` are ``(edge, offset)``; the graph is rebuilt from the raw
    edge list, so nothing is shared with the library's tree code.
    """
    edges = [tuple(e) for e in doc["edges"]]
    adj = {}

    def link(u, v, w):
        adj.setdefault(u, []).append((v, w))
        adj.setdefault(v, []).append((u, w))

    cuts = {}
    for name, (e, t) in (("A", a), ("B", b)):
        cuts.setdefault(e, []).append((t, name))
    for i, (u, v, length) in enumerate(edges):
        stops = [(0.0, u)] + sorted(cuts.get(i, [])) + [(length, v)]
        for (t0, n0), (t1, n1) in zip(stops, stops[1:]):
            if n0 != n1:
                link(n0, n1, t1 - t0)
    # DFS from A
    stack = [("A", None, 0.0)]
    while stack:
        node, parent, acc = stack.pop()
        if node == "B":
            return acc
        for nxt, w in adj[node]:
            if nxt != parent:
                stack.append((nxt, node, acc + w))
    raise AssertionError("B unreachable")


def poincare_dist(u, v, digits=50):
    with mpmath.workdps(digits):
        u = [mpmath.mpf(x) for x in u]
        v = [mpmath.mpf(x) for x in v]
        duv = sum((a - b) ** 2 for a, b in zip(u, v))
        nu = sum(a * a for a in u)
        nv = sum(b * b for b in v)
        return float(mpmath.acosh(1 + 2 * duv / ((1 - nu) * (1 - nv))))


def hyperboloid_dist(x, y, digits=50):
    with mpmath.workdps(digits):
        x = [mpmath.mpf(v) for v in x]
        y = [mpmath.mpf(v) for v in y]
        # recompute time coordinates exactly from the spatial part
        tx = mpmath.sqrt(1 + sum(v * v for v in x[:-1]))
        ty = mpmath.sqrt(1 + sum(v * v for v in y[:-1]))
        b = tx * ty - sum(a * c for a, c in zip(x[:-1], y[:-1]))
        return float(mpmath.acosh(max(b, mpmath.mpf(1))))
