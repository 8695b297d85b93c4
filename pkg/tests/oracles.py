"""Independent brute-force oracles used to pin expected values.

Everything here is deliberately naive pure Python (Fractions, recursion,
per-pixel loops) so it shares no code path with the implementations it checks.
"""

from fractions import Fraction


def luma_oracle(r, g, b):
    """BT.601 luma rounded half up, as an exact rational."""
    value = Fraction(299 * r + 587 * g + 114 * b, 1000)
    floor = value.numerator // value.denominator
    return floor + (1 if value - floor >= Fraction(1, 2) else 0)


def otsu_oracle(values):
    """Exhaustive 256-threshold between-class-variance scan, exact rationals.

    Ties go to the smallest t; a single-valued histogram returns that value.
    """
    hist = [0] * 256
    for v in values:
        hist[v] += 1
    total = sum(hist)
    best_t = None
    best_var = Fraction(0)
    for t in range(256):
        n0 = sum(hist[: t + 1])
        n1 = total - n0
        if n0 == 0 or n1 == 0:
            continue
        mu0 = Fraction(sum(i * hist[i] for i in range(t + 1)), n0)
        mu1 = Fraction(sum(i * hist[i] for i in range(t + 1, 256)), n1)
        var = Fraction(n0, total) * Fraction(n1, total) * (mu0 - mu1) ** 2
        if best_t is None or var > best_var:
            best_t, best_var = t, var
    if best_t is None:
        return max(range(256), key=lambda i: hist[i])
    return best_t


def local_mean_fg_oracle(grid, window, bias):
    """Per-pixel foreground mask: value < mean(window, edge-replicated) - bias."""
    h = len(grid)
    w = len(grid[0])
    r = window // 2
    out = []
    for y in range(h):
        row = []
        for x in range(w):
            acc = 0
            for dy in range(-r, r + 1):
                for dx in range(-r, r + 1):
                    yy = min(max(y + dy, 0), h - 1)
                    xx = min(max(x + dx, 0), w - 1)
                    acc += grid[yy][xx]
            mean = Fraction(acc, window * window)
            row.append(Fraction(grid[y][x]) < mean - bias)
        out.append(row)
    return out


def edit_distance_oracle(a, b):
    """Exhaustive recursion (memoized only for speed; same exploration)."""
    seen = {}

    def go(i, j):
        if i == len(a):
            return len(b) - j
        if j == len(b):
            return len(a) - i
        key = (i, j)
        if key in seen:
            return seen[key]
        if a[i] == b[j]:
            result = go(i + 1, j + 1)
        else:
            result = 1 + min(go(i + 1, j), go(i, j + 1), go(i + 1, j + 1))
        seen[key] = result
        return result

    return go(0, 0)
