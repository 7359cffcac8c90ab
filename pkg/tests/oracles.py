"""Brute-force reference implementations.

Everything here is plain Python loops over pixel coordinates, written
straight from the definitions and sharing no code with the package.
"""

from collections import deque

NULL = -1


def neighbours(h, w, i, j):
    """Moore neighbours of (i, j) inside the image, excluding (i, j)."""
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            a, b = i + di, j + dj
            if 0 <= a < h and 0 <= b < w:
                yield a, b


def window(h, w, i, j):
    yield i, j
    yield from neighbours(h, w, i, j)


def to_lists(a):
    return [[bool(v) for v in row] for row in a]


def near(a):
    a = to_lists(a)
    h, w = len(a), len(a[0])
    return [[any(a[p][q] for p, q in window(h, w, i, j)) for j in range(w)] for i in range(h)]


def interior(a):
    a = to_lists(a)
    h, w = len(a), len(a[0])
    return [[all(a[p][q] for p, q in window(h, w, i, j)) for j in range(w)] for i in range(h)]


def components(a):
    """BFS components; returns a dict pixel -> frozenset of its component."""
    a = to_lists(a)
    h, w = len(a), len(a[0])
    comp = {}
    for i in range(h):
        for j in range(w):
            if not a[i][j] or (i, j) in comp:
                continue
            seen = {(i, j)}
            queue = deque([(i, j)])
            while queue:
                p = queue.popleft()
                for q in neighbours(h, w, *p):
                    if a[q[0]][q[1]] and q not in seen:
                        seen.add(q)
                        queue.append(q)
            frozen = frozenset(seen)
            for p in seen:
                comp[p] = frozen
    return comp


def canonical_labels(a):
    """Each set pixel labelled with the packed lexicographic maximum of its component."""
    a = to_lists(a)
    h, w = len(a), len(a[0])
    comp = components(a)
    out = [[NULL] * w for _ in range(h)]
    for (i, j), c in comp.items():
        r, s = max(c)
        out[i][j] = r * w + s
    return out


def max_neighbour(labels, i, j):
    h, w = len(labels), len(labels[0])
    best = NULL
    for p, q in window(h, w, i, j):
        if labels[p][q] != NULL and labels[p][q] > best:
            best = labels[p][q]
    return best


def main_iteration(start, labels):
    h, w = len(labels), len(labels[0])
    out = [[NULL] * w for _ in range(h)]
    for i in range(h):
        for j in range(w):
            if start[i][j]:
                ti, tj = divmod(labels[i][j], w)
                out[i][j] = max_neighbour(labels, ti, tj)
    return out


def reach(target, through):
    """Pixels x with a path x = p0, ..., pl in target whose inner pixels are in through.

    ``good`` collects through-pixels from which target is one step away or
    reachable along through-pixels; x then qualifies if it is in target, or
    one step from target or from a good pixel.
    """
    t, th = to_lists(target), to_lists(through)
    h, w = len(t), len(t[0])
    good = set()
    queue = deque()
    for i in range(h):
        for j in range(w):
            if th[i][j] and any(t[p][q] for p, q in window(h, w, i, j)):
                good.add((i, j))
                queue.append((i, j))
    while queue:
        p = queue.popleft()
        for q in neighbours(h, w, *p):
            if th[q[0]][q[1]] and q not in good:
                good.add(q)
                queue.append(q)
    out = [[False] * w for _ in range(h)]
    for i in range(h):
        for j in range(w):
            out[i][j] = t[i][j] or any(
                t[p][q] or (p, q) in good for p, q in neighbours(h, w, i, j))
    return out


def touch(a, b):
    """Pixels of a whose a-component has a pixel in, or next to, b."""
    av, bv = to_lists(a), to_lists(b)
    h, w = len(av), len(av[0])
    nb = near(bv)
    out = [[False] * w for _ in range(h)]
    for (i, j), c in components(av).items():
        out[i][j] = any(nb[p][q] for p, q in c)
    return out


def grow(a, b):
    av = to_lists(a)
    t = touch(b, a)
    return [[x or y for x, y in zip(r1, r2)] for r1, r2 in zip(av, t)]


def surrounded(a, b):
    """x in a such that every path from x to a pixel outside a | b meets b first.

    Checked per pixel by searching from x through a & !b pixels for an
    escape to a pixel in neither a nor b.
    """
    av, bv = to_lists(a), to_lists(b)
    h, w = len(av), len(av[0])
    out = [[False] * w for _ in range(h)]
    for i in range(h):
        for j in range(w):
            if not av[i][j]:
                continue
            seen = {(i, j)}
            queue = deque([(i, j)])
            escaped = False
            while queue and not escaped:
                p = queue.popleft()
                for q in neighbours(h, w, *p):
                    if q in seen:
                        continue
                    seen.add(q)
                    x, y = q
                    if not av[x][y] and not bv[x][y]:
                        escaped = True
                        break
                    if av[x][y] and not bv[x][y]:
                        queue.append(q)
            out[i][j] = not escaped
    return out
