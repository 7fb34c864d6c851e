"""Hot loops over transition tables.

All functions take plain numpy arrays.  A transition table is an ``int64``
array of shape ``(V, 2n)``; entry ``[v, x]`` is the target of letter index
``x`` from vertex ``v`` or ``-1`` when undefined.  The inverse of letter index
``x`` is ``x ^ 1``.

Every kernel goes through :func:`freequot._accel.njit`; the pure Python
version stays available as ``kernel.py_func``.
"""

from __future__ import annotations

import numpy as np

from ._accel import njit


@njit
def bfs_distances(table, src):
    V = table.shape[0]
    k = table.shape[1]
    dist = np.full(V, -1, dtype=np.int64)
    queue = np.empty(V, dtype=np.int64)
    dist[src] = 0
    queue[0] = src
    head = 0
    tail = 1
    while head < tail:
        v = queue[head]
        head += 1
        for x in range(k):
            w = table[v, x]
            if w >= 0 and dist[w] < 0:
                dist[w] = dist[v] + 1
                queue[tail] = w
                tail += 1
    return dist


@njit
def bfs_order(table, src):
    """Vertices in canonical BFS order (letter order breaks ties)."""
    V = table.shape[0]
    k = table.shape[1]
    seen = np.zeros(V, dtype=np.bool_)
    order = np.empty(V, dtype=np.int64)
    seen[src] = True
    order[0] = src
    head = 0
    tail = 1
    while head < tail:
        v = order[head]
        head += 1
        for x in range(k):
            w = table[v, x]
            if w >= 0 and not seen[w]:
                seen[w] = True
                order[tail] = w
                tail += 1
    return order[:tail]


@njit
def _find(parent, v):
    r = v
    while parent[r] != r:
        r = parent[r]
    while parent[v] != r:
        nxt = parent[v]
        parent[v] = r
        v = nxt
    return r


@njit
def _push(stack, top, p, q):
    if top >= stack.shape[0]:
        bigger = np.empty((2 * stack.shape[0], 2), dtype=np.int64)
        bigger[: stack.shape[0]] = stack
        stack = bigger
    stack[top, 0] = p
    stack[top, 1] = q
    return stack, top + 1


@njit
def fold_insert(table, parent, src, lab, dst):
    """Insert labelled edges into a deterministic table and fold.

    ``table`` and ``parent`` are modified in place.  ``table`` must already
    hold an involution-consistent deterministic graph on root vertices (rows
    of non-roots are ignored).  Each edge ``(src[i], lab[i], dst[i])`` is added
    together with its reverse; whenever a vertex would get two targets for
    one letter the targets are merged.  The smaller vertex id always survives
    a merge, so vertex 0 stays a root.  Returns the number of merges.
    """
    k = table.shape[1]
    stack = np.empty((64, 2), dtype=np.int64)
    top = 0
    merges = 0
    for i in range(src.shape[0]):
        u = _find(parent, src[i])
        v = _find(parent, dst[i])
        x = lab[i]
        t = table[u, x]
        if t < 0:
            table[u, x] = v
        else:
            stack, top = _push(stack, top, t, v)
        t = table[v, x ^ 1]
        if t < 0:
            table[v, x ^ 1] = u
        else:
            stack, top = _push(stack, top, t, u)
        merges += _drain(table, parent, stack, top)
        top = 0
    return merges


@njit
def resolve_table(table, parent):
    """Point every root row at root targets; clear rows of merged vertices."""
    V = table.shape[0]
    k = table.shape[1]
    for v in range(V):
        if _find(parent, v) != v:
            for x in range(k):
                table[v, x] = -1
            continue
        for x in range(k):
            t = table[v, x]
            if t >= 0:
                table[v, x] = _find(parent, t)


@njit
def nb_step(table, cur, out):
    """One non-backtracking transfer step on directed-edge states.

    ``cur[w, x]`` counts walks whose last step used letter ``x`` and ended at
    ``w``.  Any next letter except ``x ^ 1`` is allowed.
    """
    V = table.shape[0]
    k = table.shape[1]
    out[:, :] = 0
    for w in range(V):
        s = cur[w, 0]
        for x in range(1, k):
            s += cur[w, x]
        if s == 0:
            continue
        for y in range(k):
            u = table[w, y]
            if u >= 0:
                out[u, y] += s - cur[w, y ^ 1]


@njit
def srw_apply(table, f, out):
    """``out = P f`` with undefined transitions contributing zero."""
    V = table.shape[0]
    k = table.shape[1]
    for v in range(V):
        s = 0.0
        for x in range(k):
            w = table[v, x]
            if w >= 0:
                s += f[w]
        out[v] = s / k


@njit
def dirichlet_power(table, iters, tol):
    """Power iteration for the norm of P restricted to the table's vertices.

    Iterates the two-step operator and returns ``(estimate, steps, converged)``
    where ``estimate = |P f| / |f|`` at the final iterate.  For a symmetric
    nonnegative operator this ratio is a lower bound of the norm at every step
    and nondecreasing along the iteration.
    """
    V = table.shape[0]
    f = np.ones(V)
    f /= np.sqrt(V)
    g = np.empty(V)
    h = np.empty(V)
    est = 0.0
    best = 0.0
    converged = False
    step = 0
    for step in range(1, iters + 1):
        srw_apply(table, f, g)
        ng = np.sqrt(np.dot(g, g))
        if ng == 0.0:
            return 0.0, step, True
        new = ng
        if new > best:
            best = new
        if abs(new - est) < tol:
            converged = True
            est = new
            break
        est = new
        srw_apply(table, g, h)
        nh = np.sqrt(np.dot(h, h))
        if nh == 0.0:
            return best, step, True
        for i in range(V):
            f[i] = h[i] / nh
    return best, step, converged


@njit
def return_probabilities(table, base, steps):
    """``p[t]`` = probability that the walk from ``base`` is at ``base`` after t steps."""
    V = table.shape[0]
    f = np.zeros(V)
    g = np.empty(V)
    f[base] = 1.0
    p = np.zeros(steps + 1)
    p[0] = 1.0
    k = table.shape[1]
    for t in range(1, steps + 1):
        # push-forward of the distribution; P is symmetric on a regular graph
        g[:] = 0.0
        for v in range(V):
            fv = f[v]
            if fv == 0.0:
                continue
            for x in range(k):
                w = table[v, x]
                if w >= 0:
                    g[w] += fv / k
        for i in range(V):
            f[i] = g[i]
        p[t] = f[base]
    return p


@njit
def nb_shortest_closed(table, base, max_len):
    """Length of the shortest non-backtracking closed walk at ``base``.

    BFS over directed-edge states ``(vertex, last letter)``.  Returns -1 if no
    such walk of length ``<= max_len`` exists in the table.
    """
    V = table.shape[0]
    k = table.shape[1]
    seen = np.zeros((V, k), dtype=np.bool_)
    qv = np.empty(V * k, dtype=np.int64)
    qx = np.empty(V * k, dtype=np.int64)
    qd = np.empty(V * k, dtype=np.int64)
    tail = 0
    for y in range(k):
        u = table[base, y]
        if u >= 0:
            if u == base:
                return 1
            if not seen[u, y]:
                seen[u, y] = True
                qv[tail] = u
                qx[tail] = y
                qd[tail] = 1
                tail += 1
    head = 0
    while head < tail:
        v = qv[head]
        x = qx[head]
        d = qd[head]
        head += 1
        if d >= max_len:
            continue
        for y in range(k):
            if y == (x ^ 1):
                continue
            u = table[v, y]
            if u < 0:
                continue
            if u == base:
                return d + 1
            if not seen[u, y]:
                seen[u, y] = True
                qv[tail] = u
                qx[tail] = y
                qd[tail] = d + 1
                tail += 1
    return -1


@njit
def multigraph_girth(indptr, nbr, eid, n_vertices):
    """Girth of a finite multigraph given in CSR form with edge ids.

    Loops count as cycles of length 1 and parallel edges as cycles of length 2.
    A loop appears twice in its vertex's list with the same edge id.
    Returns -1 for forests.
    """
    best = -1
    dist = np.full(n_vertices, -1, dtype=np.int64)
    pedge = np.full(n_vertices, -1, dtype=np.int64)
    queue = np.empty(n_vertices, dtype=np.int64)
    for s in range(n_vertices):
        if best == 1:
            break
        for i in range(n_vertices):
            dist[i] = -1
            pedge[i] = -1
        dist[s] = 0
        queue[0] = s
        head = 0
        tail = 1
        while head < tail:
            u = queue[head]
            head += 1
            if best >= 0 and 2 * dist[u] + 1 >= best:
                break
            for j in range(indptr[u], indptr[u + 1]):
                w = nbr[j]
                e = eid[j]
                if e == pedge[u]:
                    continue
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    pedge[w] = e
                    queue[tail] = w
                    tail += 1
                else:
                    c = dist[u] + dist[w] + 1
                    if best < 0 or c < best:
                        best = c
    return best


@njit
def _drain(table, parent, stack, top):
    k = table.shape[1]
    merges = 0
    while top > 0:
        top -= 1
        p = _find(parent, stack[top, 0])
        q = _find(parent, stack[top, 1])
        if p == q:
            continue
        if q < p:
            p, q = q, p
        parent[q] = p
        merges += 1
        for y in range(k):
            t = table[q, y]
            if t >= 0:
                s = table[p, y]
                if s < 0:
                    table[p, y] = t
                else:
                    stack, top = _push(stack, top, s, t)
                table[q, y] = -1
    return merges


@njit
def _coincide(table, parent, a, b):
    stack = np.empty((64, 2), dtype=np.int64)
    stack[0, 0] = a
    stack[0, 1] = b
    return _drain(table, parent, stack, 1)


@njit
def _get(table, parent, c, x):
    t = table[c, x]
    if t < 0:
        return -1
    return _find(parent, t)


@njit
def _grow(table, parent):
    old = table.shape[0]
    t2 = np.full((2 * old, table.shape[1]), -1, dtype=np.int64)
    t2[:old] = table
    p2 = np.arange(2 * old, dtype=np.int64)
    p2[:old] = parent
    return t2, p2


@njit
def hlt_enumerate(k, rel_flat, rel_off, max_cosets):
    """HLT coset enumeration of the trivial subgroup.

    ``rel_flat``/``rel_off`` hold the relators as letter indices in CSR form.
    Cosets are processed in definition order: every relator is traced from the
    coset (defining cosets to fill gaps, deducing at the last gap) and then all
    missing transitions of the coset are defined.  Coincidences are merged
    with a union-find.

    Returns ``(table, parent, defined, status)`` with status 0 = closed and
    1 = more than ``max_cosets`` live cosets were needed.
    """
    cap = 64
    table = np.full((cap, k), -1, dtype=np.int64)
    parent = np.arange(cap, dtype=np.int64)
    defined = 1
    live = 1
    n_rel = rel_off.shape[0] - 1
    alpha = 0
    while alpha < defined:
        if _find(parent, alpha) != alpha:
            alpha += 1
            continue
        for r in range(n_rel):
            if _find(parent, alpha) != alpha:
                break
            lo = rel_off[r]
            hi = rel_off[r + 1]
            if hi == lo:
                continue
            f = alpha
            b = alpha
            i = lo
            j = hi - 1
            while True:
                while i <= j:
                    t = _get(table, parent, f, rel_flat[i])
                    if t < 0:
                        break
                    f = t
                    i += 1
                if i > j:
                    if f != b:
                        live -= _coincide(table, parent, f, b)
                    break
                while j >= i:
                    t = _get(table, parent, b, rel_flat[j] ^ 1)
                    if t < 0:
                        break
                    b = t
                    j -= 1
                if j < i:
                    live -= _coincide(table, parent, f, b)
                    break
                if i == j:
                    x = rel_flat[i]
                    table[f, x] = b
                    if table[b, x ^ 1] < 0:
                        table[b, x ^ 1] = f
                    else:
                        live -= _coincide(table, parent, table[b, x ^ 1], f)
                    break
                if live >= max_cosets:
                    return table, parent, defined, 1
                if defined >= table.shape[0]:
                    table, parent = _grow(table, parent)
                x = rel_flat[i]
                table[f, x] = defined
                table[defined, x ^ 1] = f
                defined += 1
                live += 1
        if _find(parent, alpha) == alpha:
            for x in range(k):
                if _get(table, parent, alpha, x) < 0:
                    if live >= max_cosets:
                        return table, parent, defined, 1
                    if defined >= table.shape[0]:
                        table, parent = _grow(table, parent)
                    table[alpha, x] = defined
                    table[defined, x ^ 1] = alpha
                    defined += 1
                    live += 1
        alpha += 1
    return table, parent, defined, 0


@njit
def all_roots(parent):
    out = np.empty(parent.shape[0], dtype=np.int64)
    for v in range(parent.shape[0]):
        out[v] = _find(parent, v)
    return out
