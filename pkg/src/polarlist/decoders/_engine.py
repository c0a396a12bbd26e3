"""Numba execution engine for the SC and list decoders.

The decoders run the flat program compiled by :class:`PruneTree`. Each row
of the program is ``(opcode, depth, offset, size)``.

LLR storage follows the ``[L][2N]`` layout: the node at depth ``d`` owns the
region starting at ``2N - 2**(n-d+1)``, so depth 0 (the channel) is
``[0, N)``. Paths reference one row per depth through ``ptr`` and rows are
reference counted, so duplicating a path never copies LLRs. A shared row
is replaced by a free one before it is overwritten.

Partial sums use one of two layouts:

* COPY: ``N`` elements per path slot, node output in place at
  ``[offset, offset + size)``; duplication copies the live prefix.
* SHARED: ``2N - 1`` elements per bank with one region per depth (same
  offsets as the LLRs); paths reference banks and a bank is copied on the
  first write after it became shared.
"""

from __future__ import annotations

from collections import namedtuple

import numpy as np
from numba import njit

from ..crc import crc_check_payload
from ..decode_tree import OP_F, OP_G, OP_H, OP_HL, OP_LF, OP_LI, OP_R0, OP_R1, OP_REP, OP_SPC
from ..kernels import f_block, g_block, h_block, hard_block, sat

PathArrays = namedtuple(
    "PathArrays",
    ["llr", "ref", "ptr", "ps", "pb", "bref", "metric", "alive",
     "cm", "cp", "ck", "order", "target", "nsurv", "claimed", "chase",
     "tmp", "twork", "topp", "tnopp", "payload"],
)


def alloc_path_arrays(n: int, l_max: int, llr_dtype, psum_dtype, shared: bool) -> PathArrays:
    n_log = n.bit_length() - 1
    width = 2 * n if shared else n
    ncand = 4 * l_max
    return PathArrays(
        llr=np.zeros((l_max, 2 * n), dtype=llr_dtype),
        ref=np.zeros((n_log + 1, l_max), dtype=np.int32),
        ptr=np.zeros((l_max, n_log + 1), dtype=np.int32),
        ps=np.zeros((l_max, width), dtype=psum_dtype),
        pb=np.arange(l_max, dtype=np.int32),
        bref=np.zeros(l_max, dtype=np.int32),
        metric=np.zeros(l_max, dtype=np.float64),
        alive=np.zeros(l_max, dtype=np.uint8),
        cm=np.zeros(ncand, dtype=np.float64),
        cp=np.zeros(ncand, dtype=np.int32),
        ck=np.zeros(ncand, dtype=np.int32),
        order=np.zeros(ncand, dtype=np.int32),
        target=np.zeros(ncand, dtype=np.int32),
        nsurv=np.zeros(l_max, dtype=np.int32),
        claimed=np.zeros(l_max, dtype=np.uint8),
        chase=np.zeros((l_max, 3), dtype=np.int32),
        tmp=np.zeros(2 * n, dtype=llr_dtype),
        twork=np.zeros(n, dtype=np.int32),
        topp=np.zeros((n, n_log + 2), dtype=np.int32),
        tnopp=np.zeros(n, dtype=np.int32),
        payload=np.zeros(n, dtype=np.uint8),
    )


@njit(cache=True, inline="always")
def region(n_log, d):
    return (2 << n_log) - (2 << (n_log - d))


# ---------------------------------------------------------------- selection


@njit(cache=True, inline="always")
def _better(vals, a, b, smallest):
    va = abs(vals[a])
    vb = abs(vals[b])
    if va == vb:
        return a < b
    if smallest:
        return va < vb
    return va > vb


@njit(cache=True)
def schreier_two(vals, n, smallest, work, opp, nopp):
    """Knockout tournament for the two extreme ``|vals[:n]|``.

    The runner-up is searched among the champion's direct opponents only.
    Returns ``(first, second, comparisons)``.
    """
    for i in range(n):
        work[i] = i
        nopp[i] = 0
    comps = 0
    m = n
    while m > 1:
        half = m // 2
        for j in range(half):
            a = work[2 * j]
            b = work[2 * j + 1]
            comps += 1
            if _better(vals, a, b, smallest):
                w = a
                lo = b
            else:
                w = b
                lo = a
            opp[w, nopp[w]] = lo
            nopp[w] += 1
            work[j] = w
        if m & 1:
            work[half] = work[m - 1]
            m = half + 1
        else:
            m = half
    c = work[0]
    best = opp[c, 0]
    for r in range(1, nopp[c]):
        comps += 1
        if _better(vals, opp[c, r], best, smallest):
            best = opp[c, r]
    return c, best, comps


@njit(cache=True)
def sort_survivors(metrics, n, order):
    """Stable ascending order of ``metrics[:n]`` written to ``order[:n]``."""
    for i in range(n):
        j = i
        v = metrics[i]
        while j > 0 and metrics[order[j - 1]] > v:
            order[j] = order[j - 1]
            j -= 1
        order[j] = i


@njit(cache=True)
def _argmin_abs(lam, skip1, skip2):
    best = -1
    for i in range(lam.size):
        if i == skip1 or i == skip2:
            continue
        if best < 0 or abs(lam[i]) < abs(lam[best]):
            best = i
    return best


# ------------------------------------------------------------- SC (1 path)


@njit(cache=True)
def rep_tree_sum(lam, tmp, bound):
    """Pairwise saturating reduction in the order the g chain would use."""
    s = lam.size
    for i in range(s):
        tmp[i] = lam[i]
    h = s >> 1
    while h >= 1:
        for i in range(h):
            tmp[i] = sat(tmp[i] + tmp[i + h], bound)
        h >>= 1
    return tmp[0]


@njit(cache=True)
def sc_run(prog, n_log, lam, ps, tmp, bound):
    """Successive cancellation over ``prog``; ``lam[:N]`` holds the channel."""
    for k in range(prog.shape[0]):
        op = prog[k, 0]
        d = prog[k, 1]
        o = prog[k, 2]
        s = prog[k, 3]
        base = region(n_log, d)
        node = lam[base:base + s]
        if op == OP_F:
            h = s >> 1
            cb = region(n_log, d + 1)
            f_block(node[:h], node[h:], lam[cb:cb + h])
        elif op == OP_G:
            h = s >> 1
            cb = region(n_log, d + 1)
            g_block(node[:h], node[h:], ps[o:o + h], lam[cb:cb + h], bound)
        elif op == OP_H:
            h = s >> 1
            h_block(ps[o:o + h], ps[o + h:o + s])
        elif op == OP_HL:
            pass
        elif op == OP_R0 or op == OP_LF:
            ps[o:o + s] = 0
        elif op == OP_R1 or op == OP_LI:
            hard_block(node, ps[o:o + s])
        elif op == OP_REP:
            bit = 1 if rep_tree_sum(node, tmp, bound) < 0 else 0
            ps[o:o + s] = bit
        elif op == OP_SPC:
            out = ps[o:o + s]
            hard_block(node, out)
            parity = 0
            for i in range(s):
                parity ^= out[i]
            if parity:
                i1 = _argmin_abs(node, -1, -1)
                out[i1] ^= 1


# ------------------------------------------------------------- path set ops
#
# Internal helpers take the individual arrays they touch: handing the whole
# PathArrays tuple to a jitted callee costs far more than the work itself.


@njit(cache=True)
def _reset(llr, ref, ptr, pb, bref, metric, alive, chan):
    n = chan.size
    alive[:] = 0
    ref[:, :] = 0
    ptr[:, :] = 0
    bref[:] = 0
    for p in range(pb.size):
        pb[p] = p
    ref[:, 0] = 1
    bref[0] = 1
    alive[0] = 1
    metric[0] = 0.0
    llr[0, 0:n] = chan


@njit(cache=True)
def _own_row(ref, ptr, p, d, L):
    r = ptr[p, d]
    if ref[d, r] > 1:
        for q in range(L):
            if ref[d, q] == 0:
                ref[d, r] -= 1
                ref[d, q] = 1
                ptr[p, d] = q
                return q
    return r


@njit(cache=True)
def _own_bank(ps, pb, bref, p, L):
    b = pb[p]
    if bref[b] > 1:
        for q in range(L):
            if bref[q] == 0:
                ps[q, :] = ps[b, :]
                bref[b] -= 1
                bref[q] = 1
                pb[p] = q
                return q
    return b


@njit(cache=True)
def _psum_out(ps, pb, bref, p, n_log, d, o, s, shared, L):
    """Writable partial-sum view of the node output for path ``p``."""
    if shared:
        b = _own_bank(ps, pb, bref, p, L)
        base = region(n_log, d)
        return ps[b, base:base + s]
    return ps[p, o:o + s]


@njit(cache=True)
def _psum_read(ps, pb, p, n_log, d, o, s, shared):
    if shared:
        base = region(n_log, d)
        return ps[pb[p], base:base + s]
    return ps[p, o:o + s]


@njit(cache=True)
def _decision(ps, pb, p, n, shared):
    if shared:
        return ps[pb[p], 0:n]
    return ps[p, 0:n]


@njit(cache=True)
def _kill(alive, ref, ptr, bref, pb, p, n_log, shared):
    alive[p] = 0
    for d in range(1, n_log + 1):
        ref[d, ptr[p, d]] -= 1
    if shared:
        bref[pb[p]] -= 1


@njit(cache=True)
def _duplicate(alive, metric, ref, ptr, ps, pb, bref, chase, src, dst, n_log, live, shared):
    alive[dst] = 1
    metric[dst] = metric[src]
    for d in range(n_log + 1):
        r = ptr[src, d]
        ptr[dst, d] = r
        if d > 0:
            ref[d, r] += 1
    if shared:
        pb[dst] = pb[src]
        bref[pb[src]] += 1
    else:
        ps[dst, 0:live] = ps[src, 0:live]
    for i in range(3):
        chase[dst, i] = chase[src, i]


@njit(cache=True)
def _normalize(metric, alive, L, msat):
    """Fixed point only (finite ``msat``): subtract the smallest metric."""
    if msat == np.inf:
        return
    mn = np.inf
    for p in range(L):
        if alive[p] and metric[p] < mn:
            mn = metric[p]
    if mn != 0.0 and mn != np.inf:
        for p in range(L):
            if alive[p]:
                metric[p] -= mn


@njit(cache=True)
def _neg_penalty(lam, msat):
    pen = 0.0
    for i in range(lam.size):
        v = lam[i]
        if v < 0:
            pen = min(pen - v, msat)
    return pen


@njit(cache=True)
def _pos_penalty(lam, msat):
    pen = 0.0
    for i in range(lam.size):
        v = lam[i]
        if v > 0:
            pen = min(pen + v, msat)
    return pen


@njit(cache=True)
def _frozen(llr, ptr, ps, pb, bref, metric, alive, n_log, d, o, s, shared, L, msat):
    """Frozen leaf or R0 node: no fork, penalise negative LLRs."""
    base = region(n_log, d)
    for p in range(L):
        if alive[p]:
            lam = llr[ptr[p, d], base:base + s]
            metric[p] = min(metric[p] + _neg_penalty(lam, msat), msat)
            out = _psum_out(ps, pb, bref, p, n_log, d, o, s, shared, L)
            out[:] = 0
    _normalize(metric, alive, L, msat)


@njit(cache=True)
def _candidates(llr, ptr, metric, alive, chase, cm, cp, ck, twork, topp, tnopp,
                op, n_log, d, s, L, msat):
    """Fill ``cm/cp/ck`` for every alive path; returns the candidate count."""
    base = region(n_log, d)
    c = 0
    for p in range(L):
        if not alive[p]:
            continue
        lam = llr[ptr[p, d], base:base + s]
        m = metric[p]
        if op == OP_LI:
            v = lam[0]
            a = float(abs(v))
            cm[c] = min(m + (a if v < 0 else 0.0), msat)
            cm[c + 1] = min(m + (a if v >= 0 else 0.0), msat)
            cp[c] = p
            cp[c + 1] = p
            ck[c] = 0
            ck[c + 1] = 1
            c += 2
        elif op == OP_REP:
            cm[c] = min(m + _neg_penalty(lam, msat), msat)
            cm[c + 1] = min(m + _pos_penalty(lam, msat), msat)
            cp[c] = p
            cp[c + 1] = p
            ck[c] = 0
            ck[c + 1] = 1
            c += 2
        else:
            i1, i2, _ = schreier_two(lam, s, True, twork, topp, tnopp)
            a1 = min(float(abs(lam[i1])), msat)
            a2 = min(float(abs(lam[i2])), msat)
            chase[p, 0] = i1
            chase[p, 1] = i2
            if op == OP_R1:
                p0, p1, p2, p3 = 0.0, a1, a2, min(a1 + a2, msat)
            else:  # OP_SPC
                i3 = _argmin_abs(lam, i1, i2)
                chase[p, 2] = i3
                a3 = min(float(abs(lam[i3])), msat)
                parity = 0
                for i in range(s):
                    if lam[i] < 0:
                        parity ^= 1
                if parity:
                    p0, p1, p2, p3 = a1, a2, a3, min(a1 + a2 + a3, msat)
                else:
                    p0, p1, p2, p3 = 0.0, min(a1 + a2, msat), min(a1 + a3, msat), min(a2 + a3, msat)
            cm[c] = min(m + p0, msat)
            cm[c + 1] = min(m + p1, msat)
            cm[c + 2] = min(m + p2, msat)
            cm[c + 3] = min(m + p3, msat)
            for k in range(4):
                cp[c + k] = p
                ck[c + k] = k
            c += 4
    return c


@njit(cache=True)
def _apply(out, lam, chase, src, kind, op, s):
    """Write the decision of candidate ``kind`` (generated by ``src``) to ``out``."""
    if op == OP_LI:
        out[0] = kind
    elif op == OP_REP:
        out[:] = kind
    elif op == OP_R1:
        hard_block(lam, out)
        if kind & 1:
            out[chase[src, 0]] ^= 1
        if kind & 2:
            out[chase[src, 1]] ^= 1
    else:  # OP_SPC
        hard_block(lam, out)
        i1 = chase[src, 0]
        i2 = chase[src, 1]
        i3 = chase[src, 2]
        parity = 0
        for i in range(s):
            parity ^= out[i]
        if parity:
            out[i1] ^= 1
        if kind == 1:
            out[i1] ^= 1
            out[i2] ^= 1
        elif kind == 2:
            out[i1] ^= 1
            out[i3] ^= 1
        elif kind == 3:
            out[i2] ^= 1
            out[i3] ^= 1


@njit(cache=True)
def _select(llr, ref, ptr, ps, pb, bref, metric, alive, chase, cm, cp, ck, order, target,
            nsurv, claimed, ncand, op, n_log, d, o, s, shared, L, msat):
    """Keep the ``L`` best candidates, then kill, duplicate and update paths."""
    sort_survivors(cm, ncand, order)
    keep = min(ncand, L)
    nsurv[:] = 0
    claimed[:] = 0
    for j in range(keep):
        nsurv[cp[order[j]]] += 1
    for p in range(L):
        if alive[p] and nsurv[p] == 0:
            _kill(alive, ref, ptr, bref, pb, p, n_log, shared)
    free = 0
    for j in range(keep):
        p = cp[order[j]]
        if not claimed[p]:
            claimed[p] = 1
            target[j] = p
        else:
            while alive[free]:
                free += 1
            _duplicate(alive, metric, ref, ptr, ps, pb, bref, chase, p, free, n_log, o, shared)
            target[j] = free
    base = region(n_log, d)
    for j in range(keep):
        c = order[j]
        t = target[j]
        metric[t] = cm[c]
        out = _psum_out(ps, pb, bref, t, n_log, d, o, s, shared, L)
        _apply(out, llr[ptr[t, d], base:base + s], chase, cp[c], ck[c], op, s)
    _normalize(metric, alive, L, msat)


@njit(cache=True)
def _scl(prog, n_log, llr, ref, ptr, ps, pb, bref, metric, alive, chase, cm, cp, ck, order,
         target, nsurv, claimed, twork, topp, tnopp, L, shared, bound, msat):
    for k in range(prog.shape[0]):
        op = prog[k, 0]
        d = prog[k, 1]
        o = prog[k, 2]
        s = prog[k, 3]
        if op == OP_F or op == OP_G:
            h = s >> 1
            base = region(n_log, d)
            cb = region(n_log, d + 1)
            for p in range(L):
                if not alive[p]:
                    continue
                src = llr[ptr[p, d], base:base + s]
                r = _own_row(ref, ptr, p, d + 1, L)
                dst = llr[r, cb:cb + h]
                if op == OP_F:
                    f_block(src[:h], src[h:], dst)
                else:
                    g_block(src[:h], src[h:], _psum_read(ps, pb, p, n_log, d, o, h, shared), dst, bound)
        elif op == OP_H:
            h = s >> 1
            for p in range(L):
                if not alive[p]:
                    continue
                if shared:
                    b = _own_bank(ps, pb, bref, p, L)
                    rd = region(n_log, d)
                    rc = region(n_log, d + 1)
                    ps[b, rd + h:rd + s] = ps[b, rc:rc + h]
                    h_block(ps[b, rd:rd + h], ps[b, rc:rc + h])
                else:
                    h_block(ps[p, o:o + h], ps[p, o + h:o + s])
        elif op == OP_HL:
            if shared:
                h = s >> 1
                rd = region(n_log, d)
                rc = region(n_log, d + 1)
                for p in range(L):
                    if alive[p]:
                        b = _own_bank(ps, pb, bref, p, L)
                        ps[b, rd:rd + h] = ps[b, rc:rc + h]
        elif op == OP_LF or op == OP_R0:
            _frozen(llr, ptr, ps, pb, bref, metric, alive, n_log, d, o, s, shared, L, msat)
        else:
            ncand = _candidates(llr, ptr, metric, alive, chase, cm, cp, ck, twork, topp, tnopp,
                                op, n_log, d, s, L, msat)
            _select(llr, ref, ptr, ps, pb, bref, metric, alive, chase, cm, cp, ck, order, target,
                    nsurv, claimed, ncand, op, n_log, d, o, s, shared, L, msat)


@njit(cache=True)
def _ranked(metric, alive, cm, cp, order, target, L):
    c = 0
    for p in range(L):
        if alive[p]:
            cm[c] = metric[p]
            cp[c] = p
            c += 1
    sort_survivors(cm, c, order)
    for j in range(c):
        target[j] = cp[order[j]]
    return c


@njit(cache=True)
def gather_payload(decision, blocks, out):
    pos = 0
    for b in range(blocks.shape[0]):
        start = blocks[b, 0]
        length = blocks[b, 1]
        for i in range(length):
            out[pos + i] = decision[start + i]
        pos += length
    return pos


@njit(cache=True)
def _crc_select(ps, pb, target, count, n, shared, blocks, payload, n_payload, crc_args):
    for j in range(count):
        p = target[j]
        gather_payload(_decision(ps, pb, p, n, shared), blocks, payload)
        if crc_check_payload(payload, n_payload, *crc_args):
            return p, True, j + 1
    return target[0], False, count


# ------------------------------------------------ PathArrays-level entry points


@njit(cache=True)
def reset_paths(st, n_log, chan):
    _reset(st.llr, st.ref, st.ptr, st.pb, st.bref, st.metric, st.alive, chan)


@njit(cache=True)
def own_row(st, p, d, L):
    return _own_row(st.ref, st.ptr, p, d, L)


@njit(cache=True)
def node_llr(st, p, n_log, d, s):
    base = region(n_log, d)
    return st.llr[st.ptr[p, d], base:base + s]


@njit(cache=True)
def psum_read(st, p, n_log, d, o, s, shared):
    return _psum_read(st.ps, st.pb, p, n_log, d, o, s, shared)


@njit(cache=True)
def decision_view(st, p, n, shared):
    return _decision(st.ps, st.pb, p, n, shared)


@njit(cache=True)
def duplicate_path(st, src, dst, n_log, live, shared):
    """Make slot ``dst`` a copy of path ``src``.

    LLR rows are shared by reference. COPY copies the first ``live``
    partial sums; SHARED only shares the bank.
    """
    _duplicate(st.alive, st.metric, st.ref, st.ptr, st.ps, st.pb, st.bref, st.chase,
               src, dst, n_log, live, shared)


@njit(cache=True)
def frozen_step(st, n_log, d, o, s, shared, L, msat):
    _frozen(st.llr, st.ptr, st.ps, st.pb, st.bref, st.metric, st.alive, n_log, d, o, s, shared, L, msat)


@njit(cache=True)
def gen_candidates(st, op, n_log, d, s, L, msat):
    return _candidates(st.llr, st.ptr, st.metric, st.alive, st.chase, st.cm, st.cp, st.ck,
                       st.twork, st.topp, st.tnopp, op, n_log, d, s, L, msat)


@njit(cache=True)
def select_and_apply(st, ncand, op, n_log, d, o, s, shared, L, msat):
    _select(st.llr, st.ref, st.ptr, st.ps, st.pb, st.bref, st.metric, st.alive, st.chase,
            st.cm, st.cp, st.ck, st.order, st.target, st.nsurv, st.claimed,
            ncand, op, n_log, d, o, s, shared, L, msat)


@njit(cache=True)
def scl_run(prog, n_log, st, L, shared, bound, msat):
    """List decoding over ``prog`` with at most ``L`` paths.

    ``reset_paths`` must have loaded the channel LLRs first.
    """
    _scl(prog, n_log, st.llr, st.ref, st.ptr, st.ps, st.pb, st.bref, st.metric, st.alive,
         st.chase, st.cm, st.cp, st.ck, st.order, st.target, st.nsurv, st.claimed,
         st.twork, st.topp, st.tnopp, L, shared, bound, msat)


@njit(cache=True)
def ranked_paths(st, L):
    """Alive path slots ordered by ``(metric, slot)``; returns the count.

    The slots are left in ``st.target[:count]``.
    """
    return _ranked(st.metric, st.alive, st.cm, st.cp, st.order, st.target, L)


@njit(cache=True)
def crc_select(st, L, n, shared, blocks, n_payload, crc_args):
    """Best-first CRC check over the final list.

    Returns ``(slot, crc_ok, checks)``; falls back to the best metric.
    """
    count = _ranked(st.metric, st.alive, st.cm, st.cp, st.order, st.target, L)
    return _crc_select(st.ps, st.pb, st.target, count, n, shared, blocks, st.payload,
                       n_payload, crc_args)


@njit(cache=True)
def adaptive_run(prog_sc, prog_list, n_log, chan, sc_lam, sc_ps, st, l_max, fully, shared,
                 bound, msat, blocks, n_payload, crc_args, out):
    """SC first, then list decoding on CRC failure.

    ``fully`` doubles L from 2 up to ``l_max``; otherwise jumps straight to
    ``l_max``. Writes the decision into ``out`` and returns
    ``(final L, crc_ok)``.
    """
    n = chan.size
    sc_lam[0:n] = chan
    sc_run(prog_sc, n_log, sc_lam, sc_ps, st.tmp, bound)
    gather_payload(sc_ps, blocks, st.payload)
    if crc_check_payload(st.payload, n_payload, *crc_args):
        out[:] = sc_ps[0:n]
        return 1, True
    L = 2 if fully else l_max
    if L > l_max:
        L = l_max
    while True:
        _reset(st.llr, st.ref, st.ptr, st.pb, st.bref, st.metric, st.alive, chan)
        _scl(prog_list, n_log, st.llr, st.ref, st.ptr, st.ps, st.pb, st.bref, st.metric, st.alive,
             st.chase, st.cm, st.cp, st.ck, st.order, st.target, st.nsurv, st.claimed,
             st.twork, st.topp, st.tnopp, L, shared, bound, msat)
        count = _ranked(st.metric, st.alive, st.cm, st.cp, st.order, st.target, L)
        p, ok, _ = _crc_select(st.ps, st.pb, st.target, count, n, shared, blocks, st.payload,
                               n_payload, crc_args)
        if ok or L >= l_max:
            out[:] = _decision(st.ps, st.pb, p, n, shared)
            return L, ok
        L *= 2


@njit(cache=True)
def list_decode(prog, n_log, chan, st, L, shared, bound, msat, use_crc, blocks, n_payload,
                crc_args, out):
    """One list pass from the channel LLRs, decision written to ``out``.

    With ``use_crc`` the first CRC-valid path in metric order wins, else the
    best metric. Returns ``crc_ok`` (always True without ``use_crc``).
    """
    n = chan.size
    _reset(st.llr, st.ref, st.ptr, st.pb, st.bref, st.metric, st.alive, chan)
    _scl(prog, n_log, st.llr, st.ref, st.ptr, st.ps, st.pb, st.bref, st.metric, st.alive,
         st.chase, st.cm, st.cp, st.ck, st.order, st.target, st.nsurv, st.claimed,
         st.twork, st.topp, st.tnopp, L, shared, bound, msat)
    count = _ranked(st.metric, st.alive, st.cm, st.cp, st.order, st.target, L)
    p = st.target[0]
    ok = True
    if use_crc:
        p, ok, _ = _crc_select(st.ps, st.pb, st.target, count, n, shared, blocks, st.payload,
                               n_payload, crc_args)
    out[:] = _decision(st.ps, st.pb, p, n, shared)
    return ok


@njit(cache=True)
def sc_decode(prog, n_log, chan, lam, ps, tmp, bound, out):
    lam[0:chan.size] = chan
    sc_run(prog, n_log, lam, ps, tmp, bound)
    out[:] = ps[0:chan.size]
