"""Straight-line crossing counts for loops on the square torus.

A class ``s`` at basepoint ``p`` is drawn as the straight segment from ``p``
to ``p + s`` in the plane; its image in the torus is a closed curve.  Two
curves cross wherever one segment meets a lattice translate of the other,
except at a shared basepoint.  Offsets are scaled to integers so that every
test is exact.
"""

from math import gcd

SCALE = 97 * 89


def basepoint(k: int) -> tuple[int, int]:
    """Scaled offset of the ``k``-th vertex; generic enough that parallel curves never overlap."""
    return (k * 89, k * k * 97)


def _cross(a, b) -> int:
    return a[0] * b[1] - a[1] * b[0]


def interior_lattice_points(s) -> int:
    """Self-intersections of the straight curve: lattice points strictly inside the segment."""
    return gcd(abs(s[0]), abs(s[1])) - 1


def crossings(u, v, p=(0, 0), q=(0, 0)) -> int:
    """Transverse meetings of the straight curves ``u`` at ``p`` and ``v`` at ``q``.

    Meetings at a point that is a translate of a common basepoint are not
    counted.  Parallel curves sharing a basepoint overlap; an overlap counts
    as one meeting, since no perturbation separates it when one class is a
    proper multiple.
    """
    U = (u[0] * SCALE, u[1] * SCALE)
    V = (v[0] * SCALE, v[1] * SCALE)
    den = _cross(U, V)
    lo = min(0, u[0], -v[0], u[0] - v[0]) - 2
    hi = max(0, u[0], -v[0], u[0] - v[0]) + 2
    lo_y = min(0, u[1], -v[1], u[1] - v[1]) - 2
    hi_y = max(0, u[1], -v[1], u[1] - v[1]) + 2
    shared = p == q
    count = 0
    for tx in range(lo, hi + 1):
        for ty in range(lo_y, hi_y + 1):
            # p + lam U = q + t + mu V
            w = (q[0] + tx * SCALE - p[0], q[1] + ty * SCALE - p[1])
            if den == 0:
                if _cross(w, U) == 0:
                    return count + 1
                continue
            lam_num, mu_num = _cross(w, V), _cross(w, U)
            if den < 0:
                den_, lam_num, mu_num = -den, -lam_num, -mu_num
            else:
                den_ = den
            # half-open parameter ranges count each torus point once
            if not (0 <= lam_num < den_ and 0 <= mu_num < den_):
                continue
            if shared and lam_num == 0:
                continue
            count += 1
    return count
