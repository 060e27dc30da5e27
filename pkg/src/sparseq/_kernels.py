"""Hot inner loops of the k2-tree Boolean algebra.

This file is plain Python, and it is also compiled as the extension module
sparseq._ckernels (see _ckernels.pyx); sparseq.kernels picks whichever is
available at import time.

Data layout shared with k2matrix:
  levels  list of bytearray/bytes, one signature (0..15) per byte, level 0
          first; the last level encodes 2x2 cell blocks.  An empty matrix
          is the empty list.
  pre     per level, prefix popcounts of the signatures: pre[l][p] is the
          number of 1 bits in levels[l][:p], so the children of node
          (l, p) start at index pre[l][p] of level l+1.
  t       transposed flag; a transposed tree is read with the signature
          bits 1 and 2 swapped and the middle children exchanged.

Quadrant bit j of a signature is quadrant (j >> 1, j & 1) in z-order:
top-left, top-right, bottom-left, bottom-right.
"""

POPCOUNT4 = bytes(bin(i).count("1") for i in range(16))
POPBYTE = bytes(bin(i).count("1") for i in range(256))

# signature of the transposed 2x2 block structure: swap bits 1 and 2
TRANS4 = bytes((s & 0b1001) | ((s & 0b0010) << 1) | ((s & 0b0100) >> 1) for s in range(16))
ZSWAP = (0, 2, 1, 3)

# cell masks for one row / column of a 2x2 leaf block
ROWMASK = (0b0011, 0b1100)
COLMASK = (0b0101, 0b1010)


def _mul2_table():
    out = bytearray(256)
    for a in range(16):
        for b in range(16):
            c = 0
            for i in range(2):
                for j in range(2):
                    if ((a >> (i * 2)) & 1 and (b >> j) & 1) or (
                        (a >> (i * 2 + 1)) & 1 and (b >> (2 + j)) & 1
                    ):
                        c |= 1 << (i * 2 + j)
            out[(a << 4) | b] = c
    return bytes(out)


MUL2 = _mul2_table()


def _merge_task_table():
    out = []
    for a in range(16):
        for b in range(16):
            t = bytearray()
            for j in range(4):
                ba = (a >> j) & 1
                bb = (b >> j) & 1
                if ba and bb:
                    t.append(2)
                elif ba:
                    t.append(0)
                elif bb:
                    t.append(1)
            out.append(bytes(t))
    return tuple(out)


MERGE_TASKS = _merge_task_table()
COPYA_TASKS = tuple(b"\x00" * POPCOUNT4[s] for s in range(16))
COPYB_TASKS = tuple(b"\x01" * POPCOUNT4[s] for s in range(16))


# Optional cancellation hook, polled every _CHECK_EVERY product-node
# visits so a deadline can interrupt a long multiplication from outside.
_CHECK_HOOK = None
_CHECK_EVERY = 4096
_check_tick = 0


def set_check_hook(fn):
    """Install (or clear, with None) a callable polled inside multiply;
    it may raise to abort the operation."""
    global _CHECK_HOOK, _check_tick
    _CHECK_HOOK = fn
    _check_tick = 0


def eff_sig(levels, t, l, p):
    return TRANS4[levels[l][p]] if t else levels[l][p]


def child(levels, pre, t, l, p, j):
    """Index in level l+1 of quadrant j of node (l, p), or -1 if empty."""
    jj = ZSWAP[j] if t else j
    sig = levels[l][p]
    if not (sig >> jj) & 1:
        return -1
    return pre[l][p] + POPCOUNT4[sig & ((1 << jj) - 1)]


def sub_ones(levels):
    """Number of matrix 1s stored in a (sub)tree given as level streams."""
    return sum(levels[-1].translate(POPBYTE)) if levels else 0


def merge_seq(la, lb):
    """Bitwise-or of two same-frame trees by one sequential levelwise pass.

    Driven by a task stream per level: 0 copies the next node of A, 1 the
    next node of B, 2 merges the next node of each.  No rank is needed.
    """
    nl = len(la)
    out = []
    tasks = b"\x02"
    for l in range(nl):
        sla = la[l]
        slb = lb[l]
        ia = 0
        ib = 0
        row = bytearray()
        nxt = bytearray()
        last = l == nl - 1
        for kind in tasks:
            if kind == 2:
                sa = sla[ia]
                sb = slb[ib]
                ia += 1
                ib += 1
                row.append(sa | sb)
                if not last:
                    nxt += MERGE_TASKS[(sa << 4) | sb]
            elif kind == 0:
                s = sla[ia]
                ia += 1
                row.append(s)
                if not last:
                    nxt += COPYA_TASKS[s]
            else:
                s = slb[ib]
                ib += 1
                row.append(s)
                if not last:
                    nxt += COPYB_TASKS[s]
        out.append(row)
        tasks = bytes(nxt)
    return out


def merge_mixed(ls, ln, pren):
    """Sum where the second tree is read transposed, navigated by node id.

    The first tree is consumed sequentially; nodes of the transposed one
    are located through its prefix-popcount (rank) tables.  The output is
    in the first tree's frame.
    """
    nl = len(ls)
    out = []
    tasks = [(2, 0)]
    for l in range(nl):
        sls = ls[l]
        sln = ln[l]
        prl = pren[l]
        i = 0
        row = bytearray()
        nxt = []
        last = l == nl - 1
        for kind, pn in tasks:
            if kind == 0:
                s = sls[i]
                i += 1
                row.append(s)
                if not last:
                    for _ in range(POPCOUNT4[s]):
                        nxt.append((0, 0))
            elif kind == 1:
                raw = sln[pn]
                row.append(TRANS4[raw])
                if not last:
                    base = prl[pn]
                    for j in range(4):
                        jj = ZSWAP[j]
                        if (raw >> jj) & 1:
                            nxt.append((1, base + POPCOUNT4[raw & ((1 << jj) - 1)]))
            else:
                ss = sls[i]
                i += 1
                raw = sln[pn]
                row.append(ss | TRANS4[raw])
                if not last:
                    base = prl[pn]
                    for j in range(4):
                        a = (ss >> j) & 1
                        jj = ZSWAP[j]
                        b = (raw >> jj) & 1
                        if b:
                            cn = base + POPCOUNT4[raw & ((1 << jj) - 1)]
                            nxt.append((2, cn) if a else (1, cn))
                        elif a:
                            nxt.append((0, 0))
        out.append(row)
        tasks = nxt
    return out


def _assemble(sig, parts):
    out = [bytearray((sig,))]
    depth = len(parts[0])
    for d in range(depth):
        row = bytearray()
        for sp in parts:
            row += sp[d]
        out.append(row)
    return out


_FULL_CACHE = {}


def _full_sub(depth):
    sub = _FULL_CACHE.get(depth)
    if sub is None:
        sub = [b"\x0f" * (4 ** d) for d in range(depth)]
        _FULL_CACHE[depth] = sub
    return sub


def multiply(la, prea, ta, fa, lb, preb, tb, fb, side, rr, rc):
    """Boolean product by quadrant decomposition (8 child products).

    fa/fb are per-node full-subtree masks used to shortcut dense regions.
    rr/rc, when >= 0, restrict the output (and the corresponding operand
    descent) to one row/column; pruned quadrants are treated as empty.
    """
    if not la or not lb:
        return None
    return _mult(la, prea, ta, fa, lb, preb, tb, fb, 0, 0, 0, side, rr, rc)


def _mult(la, prea, ta, fa, lb, preb, tb, fb, l, pa, pb, size, rr, rc):
    global _check_tick
    if _CHECK_HOOK is not None:
        _check_tick += 1
        if _check_tick >= _CHECK_EVERY:
            _check_tick = 0
            _CHECK_HOOK()
    if size == 2:
        s = MUL2[(eff_sig(la, ta, l, pa) << 4) | eff_sig(lb, tb, l, pb)]
        if rr >= 0:
            s &= ROWMASK[rr]
        if rc >= 0:
            s &= COLMASK[rc]
        return [bytearray((s,))] if s else None
    if rr < 0 and rc < 0 and fa is not None and fb is not None and fa[l][pa] and fb[l][pb]:
        return _full_sub(len(la) - l)
    half = size >> 1
    fullq = half * half
    sig = 0
    parts = []
    for qi in range(2):
        if rr >= 0 and (1 if rr >= half else 0) != qi:
            continue
        rr2 = -1 if rr < 0 else rr - qi * half
        for qj in range(2):
            if rc >= 0 and (1 if rc >= half else 0) != qj:
                continue
            rc2 = -1 if rc < 0 else rc - qj * half
            acc = None
            for k in range(2):
                ca = child(la, prea, ta, l, pa, qi * 2 + k)
                if ca < 0:
                    continue
                cb = child(lb, preb, tb, l, pb, k * 2 + qj)
                if cb < 0:
                    continue
                sub = _mult(la, prea, ta, fa, lb, preb, tb, fb, l + 1, ca, cb, half, rr2, rc2)
                if sub is None:
                    continue
                acc = sub if acc is None else merge_seq(acc, sub)
                if k == 0 and rr2 < 0 and rc2 < 0 and sub_ones(acc) == fullq:
                    break
            if acc is not None:
                sig |= 1 << (qi * 2 + qj)
                parts.append(acc)
    if not sig:
        return None
    return _assemble(sig, parts)


def sum_restricted(la, prea, ta, lb, preb, tb, side, rr, rc):
    """Recursive restricted sum; either operand may be empty ([])."""
    pa = 0 if la else -1
    pb = 0 if lb else -1
    if pa < 0 and pb < 0:
        return None
    return _sum_restr(la, prea, ta, lb, preb, tb, 0, pa, pb, side, rr, rc)


def _sum_restr(la, prea, ta, lb, preb, tb, l, pa, pb, size, rr, rc):
    sa = eff_sig(la, ta, l, pa) if pa >= 0 else 0
    sb = eff_sig(lb, tb, l, pb) if pb >= 0 else 0
    if size == 2:
        s = sa | sb
        if rr >= 0:
            s &= ROWMASK[rr]
        if rc >= 0:
            s &= COLMASK[rc]
        return [bytearray((s,))] if s else None
    half = size >> 1
    sig = 0
    parts = []
    for q in range(4):
        qi = q >> 1
        qj = q & 1
        if rr >= 0 and (1 if rr >= half else 0) != qi:
            continue
        if rc >= 0 and (1 if rc >= half else 0) != qj:
            continue
        rr2 = -1 if rr < 0 else rr - qi * half
        rc2 = -1 if rc < 0 else rc - qj * half
        ca = child(la, prea, ta, l, pa, q) if pa >= 0 else -1
        cb = child(lb, preb, tb, l, pb, q) if pb >= 0 else -1
        if ca < 0 and cb < 0:
            continue
        sub = _sum_restr(la, prea, ta, lb, preb, tb, l + 1, ca, cb, half, rr2, rc2)
        if sub is None:
            continue
        sig |= 1 << q
        parts.append(sub)
    if not sig:
        return None
    return _assemble(sig, parts)


def iter_ones(levels, pre, transposed, side):
    """Yield (row, col) of every stored 1 in z-order of the tree."""
    if not levels:
        return
    stack = [(0, 0, 0, 0, side)]
    while stack:
        l, p, r0, c0, size = stack.pop()
        raw = levels[l][p]
        eff = TRANS4[raw] if transposed else raw
        if size == 2:
            for j in range(4):
                if (eff >> j) & 1:
                    yield (r0 + (j >> 1), c0 + (j & 1))
        else:
            half = size >> 1
            base = pre[l][p]
            for j in range(3, -1, -1):
                if (eff >> j) & 1:
                    jj = ZSWAP[j] if transposed else j
                    cp = base + POPCOUNT4[raw & ((1 << jj) - 1)]
                    stack.append((l + 1, cp, r0 + (j >> 1) * half, c0 + (j & 1) * half, half))


def line_count(levels, pre, transposed, side, idx, want_row):
    """Number of stored 1s in one row (want_row) or column of the matrix."""
    if not levels:
        return 0
    total = 0
    stack = [(0, 0, idx, side)]
    while stack:
        l, p, rel, size = stack.pop()
        raw = levels[l][p]
        eff = TRANS4[raw] if transposed else raw
        if size == 2:
            total += POPCOUNT4[eff & (ROWMASK[rel] if want_row else COLMASK[rel])]
            continue
        half = size >> 1
        hi = 1 if rel >= half else 0
        rel2 = rel - hi * half
        base = pre[l][p]
        for j in range(4):
            if not (eff >> j) & 1:
                continue
            if want_row:
                if (j >> 1) != hi:
                    continue
            elif (j & 1) != hi:
                continue
            jj = ZSWAP[j] if transposed else j
            stack.append((l + 1, base + POPCOUNT4[raw & ((1 << jj) - 1)], rel2, half))
    return total
