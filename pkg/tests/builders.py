"""Random bounded double complexes and small helpers used across tests."""

from __future__ import annotations

import random

from bba.bicomplex import DoubleComplex, schweitzer
from bba.linalg import ONE, Matrix, Scalar, image, solve_affine


def _zigzag_cells(rng: random.Random, p: int, q: int, length: int):
    """A contiguous piece of the staircase ... b_{j-1}, a_j, b_j, ...

    a_j sits at (p+j, q-j) and b_j at (p+j+1, q-j); ∂a_j = b_j and ∂̄a_j = b_{j-1}.
    """
    start = rng.randrange(2)  # 0: begin with an a, 1: begin with a b
    seq = []
    j = 0
    kind = "a" if start == 0 else "b"
    for _ in range(length):
        seq.append((kind, j))
        if kind == "a":
            kind = "b"
        else:
            kind, j = "a", j + 1
    cells = []
    for kind, j in seq:
        cells.append(((p + j, q - j) if kind == "a" else (p + j + 1, q - j), (kind, j)))
    arrows = []
    names = {c[1] for c in cells}
    for _, (kind, j) in cells:
        if kind == "a":
            if ("b", j) in names:
                arrows.append((("a", j), ("b", j), "del"))
            if ("b", j - 1) in names:
                arrows.append((("a", j), ("b", j - 1), "dbar"))
    return cells, arrows


def random_complex(rng: random.Random, max_dim: int = 24, box: int = 4,
                   basis_change: bool = True) -> DoubleComplex:
    """Direct sum of random squares and zigzags, then a random basis change."""
    cells = []  # (bidegree, id)
    arrows = []  # (src id, tgt id, which, coefficient)
    total = 0
    target = rng.randint(1, max_dim)
    uid = 0
    while total < target:
        room = target - total
        if room >= 4 and rng.random() < 0.3:
            p, q = rng.randrange(box), rng.randrange(box)
            v, e1, e2, w = (uid, uid + 1, uid + 2, uid + 3)
            uid += 4
            cells += [((p, q), v), ((p + 1, q), e1), ((p, q + 1), e2), ((p + 1, q + 1), w)]
            arrows += [(v, e1, "del", ONE), (v, e2, "dbar", ONE), (e2, w, "del", ONE), (e1, w, "dbar", -ONE)]
            total += 4
            continue
        length = 1 if rng.random() < 0.6 else rng.randint(2, max(2, min(room, 5)))
        length = min(length, room)
        p, q = rng.randrange(box), rng.randrange(box) + length
        zc, za = _zigzag_cells(rng, p, q, length)
        ids = {}
        for bd, name in zc:
            ids[name] = uid
            cells.append((bd, uid))
            uid += 1
        for s, t, which in za:
            arrows.append((ids[s], ids[t], which, Scalar(rng.choice([1, 2, -1, 3]))))
        total += length
    pos: dict = {}
    where = {}
    for bd, i in cells:
        lst = pos.setdefault(bd, [])
        where[i] = (bd, len(lst))
        lst.append(i)
    dims = {bd: len(v) for bd, v in pos.items()}
    maps = {"del": {}, "dbar": {}}
    for s, t, which, c in arrows:
        (sb, si), (_, ti) = where[s], where[t]
        M = maps[which].setdefault(sb, {})
        M[(ti, si)] = c
    del_ = {bd: _mat(dims, bd, (bd[0] + 1, bd[1]), maps["del"].get(bd, {})) for bd in dims}
    dbar = {bd: _mat(dims, bd, (bd[0], bd[1] + 1), maps["dbar"].get(bd, {})) for bd in dims}
    D = DoubleComplex(dims, del_, dbar)
    if basis_change:
        D = change_basis(D, {bd: random_invertible(rng, n) for bd, n in dims.items()})
    return D


def _mat(dims, src, tgt, entries) -> Matrix:
    rows = [dict() for _ in range(dims.get(tgt, 0))]
    for (i, j), c in entries.items():
        rows[i][j] = c
    return Matrix(dims.get(tgt, 0), dims[src], rows)


def random_invertible(rng: random.Random, n: int) -> Matrix:
    """Permuted product of random unit lower and upper triangular matrices."""
    def tri(lower):
        rows = []
        for i in range(n):
            r = {i: ONE}
            for j in (range(i) if lower else range(i + 1, n)):
                if rng.random() < 0.5:
                    r[j] = Scalar(rng.randint(-3, 3), rng.choice([0, 0, 1]))
            rows.append(r)
        return Matrix(n, n, rows)
    perm = list(range(n))
    rng.shuffle(perm)
    P = Matrix(n, n, [{perm[i]: ONE} for i in range(n)])
    return P @ tri(True) @ tri(False)


def inverse(M: Matrix) -> Matrix:
    n = M.nrows
    cols = []
    for j in range(n):
        sol = solve_affine(M, {j: ONE})
        assert sol.feasible
        cols.append(sol.particular)
    return Matrix.from_columns(cols, n)


def change_basis(D: DoubleComplex, P: dict) -> DoubleComplex:
    """New coordinates v' = P v in every bidegree."""
    return D.change_basis(P, {bd: inverse(M) for bd, M in P.items()})


def schweitzer_vector(R, view, i: int, e) -> dict:
    """Coordinates of an element in the i-th space of a Schweitzer view."""
    offs = view.offsets(i)
    out = {}
    for bd, part in e.homogeneous_parts().items():
        assert bd in offs, f"component at {bd} is not part of this Schweitzer space"
        for j, c in R.sparse(part, bd).items():
            out[offs[bd] + j] = c
    return out


def schweitzer_class(R, center, i: int, e):
    """(is a cocycle, lies in the image of the previous map) for e in S^i."""
    view = schweitzer(R.complex, center[0], center[1], i - 1, i)
    v = schweitzer_vector(R, view, i, e)
    closed = not view.boundary[i].apply_sparse(v)
    exact = image(view.boundary[i - 1]).contains(v)
    return closed, exact


