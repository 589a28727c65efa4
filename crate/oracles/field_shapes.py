"""High-precision shapes of monic power-basis orders, used to freeze test values.

For each polynomial: det of the full Minkowski Gram, successive minima of the
determinant-one shape lattice (found by exhaustive short-vector search), and
the number of lattice involutions other than +-I.
"""
import itertools
from mpmath import mp, mpf, polyroots, sqrt, matrix, im, re

mp.dps = 60


def minkowski_rows(asc):
    n = len(asc) - 1
    roots = polyroots(list(reversed(asc)), maxsteps=500, extraprec=500)
    real = sorted([re(r) for r in roots if abs(im(r)) < mpf(10) ** -40])
    cplx = sorted([r for r in roots if im(r) > mpf(10) ** -40], key=lambda z: (re(z), im(z)))
    rows = []
    for k in range(n):
        row = [r ** k for r in real]
        for z in cplx:
            w = z ** k
            row += [sqrt(2) * re(w), sqrt(2) * im(w)]
        rows.append(row)
    return rows, len(cplx)


def gram(rows):
    n = len(rows)
    return matrix([[sum(a * b for a, b in zip(rows[i], rows[j])) for j in range(n)] for i in range(n)])


def shape_gram(asc):
    rows, i = minkowski_rows(asc)
    g = gram(rows)
    n = len(rows)
    m = n - 1
    p = matrix(m, m)
    for a in range(m):
        for b in range(m):
            p[a, b] = g[a + 1, b + 1] - g[a + 1, 0] * g[b + 1, 0] / n
    d = mp.det(p)
    p = p / d ** (mpf(1) / m)
    return mp.det(g), i, p


def norm(p, v):
    m = len(v)
    return sum(v[a] * p[a, b] * v[b] for a in range(m) for b in range(m))


def short_vectors(p, bound):
    m = p.rows
    inv = p ** -1
    box = [int(mp.floor(sqrt(bound * inv[k, k]))) for k in range(m)]
    out = []
    for v in itertools.product(*[range(-b, b + 1) for b in box]):
        if any(v):
            q = norm(p, v)
            if q <= bound:
                out.append((q, v))
    out.sort()
    return out


def _rank(vs):
    import sympy
    return sympy.Matrix([list(v) for v in vs]).rank()


def successive_minima(p):
    m = p.rows
    bound = max(p[k, k] for k in range(m)) * mpf("1.0001")
    chosen = []
    for q, v in short_vectors(p, bound):
        if _rank(chosen + [v]) > len(chosen):
            chosen.append(v)
            if len(chosen) == m:
                break
    return [norm(p, v) for v in chosen]


def involutions(p, tol=mpf(10) ** -30):
    m = p.rows
    bound = max(p[k, k] for k in range(m)) * mpf("1.0001")
    sv = short_vectors(p, bound)
    cols = [[v for q, v in sv if abs(q - p[k, k]) < tol] for k in range(m)]
    count = 0
    for choice in itertools.product(*cols):
        u = matrix([[choice[c][r] for c in range(m)] for r in range(m)])
        if mp.norm(u.T * p * u - p) > tol:
            continue
        if mp.norm(u * u - mp.eye(m)) != 0:
            continue
        if mp.norm(u - mp.eye(m)) == 0 or mp.norm(u + mp.eye(m)) == 0:
            continue
        count += 1
    return count


if __name__ == "__main__":
    for name, asc in [("x^3-x-1", [-1, -1, 0, 1]), ("x^4-x-1", [-1, -1, 0, 0, 1]),
                      ("x^4-2", [-2, 0, 0, 0, 1]), ("x^5-x-1", [-1, -1, 0, 0, 0, 1])]:
        d, i, p = shape_gram(asc)
        mins = successive_minima(p)
        inv = involutions(p) if p.rows <= 3 else None
        print(name, "det", mp.nstr(d, 20), "i", i, "minima", [mp.nstr(x, 17) for x in mins], "involutions", inv)
