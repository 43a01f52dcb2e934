"""Pure-numpy fallbacks for the compiled kernels.

Same contracts as the ``_kernels`` extension: exact integer squared
distances and deterministic component labelling.  Slower, but dependency
free; the dispatcher in ``kernels`` picks whichever is available.
"""

from collections import deque

import numpy as np

# Squared-distance sentinel for "no true cell reachable".  Large enough to
# dominate any realistic grid, small enough that adding a squared offset
# cannot overflow int64.
INF_SQ = np.int64(1) << 40


def edt_sq(bits):
    """Exact squared Euclidean distance, in cells, to the nearest true cell.

    Cells of an all-false input come back as ``INF_SQ``; callers are
    expected to handle the empty set before asking for distances.
    """
    bits = np.ascontiguousarray(bits, dtype=bool)
    h, w = bits.shape
    big = np.int64(h + 1)

    # Vertical pass: distance to the nearest true cell in the same column.
    run = np.full(w, big, dtype=np.int64)
    down = np.empty((h, w), dtype=np.int64)
    for i in range(h):
        run = np.where(bits[i], 0, np.minimum(run + 1, big))
        down[i] = run
    run = np.full(w, big, dtype=np.int64)
    vert = down
    for i in range(h - 1, -1, -1):
        run = np.where(bits[i], 0, np.minimum(run + 1, big))
        np.minimum(vert[i], run, out=vert[i])
    f = np.where(vert >= big, INF_SQ, vert * vert)

    # Horizontal pass: brute lower envelope, blocked to bound memory.
    js = np.arange(w, dtype=np.int64)
    off = (js[:, None] - js[None, :]) ** 2
    out = np.empty((h, w), dtype=np.int64)
    chunk = max(1, (1 << 22) // max(1, w * w))
    for i0 in range(0, h, chunk):
        block = f[i0:i0 + chunk]
        cand = off[None, :, :] + block[:, None, :]
        out[i0:i0 + chunk] = cand.min(axis=2)
    np.minimum(out, INF_SQ, out=out)
    return out


def label_components(bits, eight):
    """Label connected components of a boolean grid.

    Returns ``(labels, count)`` where ``labels`` is int32 with -1 for
    background.  Components are numbered by their first cell in row-major
    scan order, which makes the numbering reproducible.
    """
    bits = np.ascontiguousarray(bits, dtype=bool)
    h, w = bits.shape
    labels = np.full((h, w), -1, dtype=np.int32)
    steps = [(-1, 0), (1, 0), (0, -1), (0, 1)]
    if eight:
        steps += [(-1, -1), (-1, 1), (1, -1), (1, 1)]
    count = 0
    for flat in np.flatnonzero(bits):
        y, x = divmod(int(flat), w)
        if labels[y, x] >= 0:
            continue
        labels[y, x] = count
        queue = deque([(y, x)])
        while queue:
            cy, cx = queue.popleft()
            for dy, dx in steps:
                ny, nx = cy + dy, cx + dx
                if 0 <= ny < h and 0 <= nx < w and bits[ny, nx] and labels[ny, nx] < 0:
                    labels[ny, nx] = count
                    queue.append((ny, nx))
        count += 1
    return labels, count
