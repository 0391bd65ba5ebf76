"""Finite automata over bit-vector alphabets with transition-based acceptance.

The alphabet of an automaton over tracked variables ``v0..v{n-1}`` is the set
of integers ``0..2**n-1``; bit ``i`` of a symbol is the bit of ``v{i}``.
Transitions are stored per state as lists of ``(cube, target, accepting)``
where a cube fixes some bits and leaves the others free.  A word is accepted
when some run over it ends with an accepting transition, so the empty word is
never accepted.

Algorithms that need per-symbol behaviour (subset construction, projection,
minimisation) expand the cube lists into dense rows; that is fine for the
handful of variables a single formula tracks and is capped at
``MAX_DENSE_VARS``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, NamedTuple, Sequence

from .errors import ResourceLimit, TrackMismatch
from .formula import decode, encode

MAX_DENSE_VARS = 16


class Cube(NamedTuple):
    care: int
    value: int

    def contains(self, sym: int) -> bool:
        return sym & self.care == self.value

    def meet(self, other: "Cube") -> "Cube | None":
        both = self.care & other.care
        if (self.value ^ other.value) & both:
            return None
        return Cube(self.care | other.care, self.value | other.value)

    def symbols(self, n: int) -> Iterable[int]:
        free = [i for i in range(n) if not self.care >> i & 1]
        for k in range(1 << len(free)):
            s = self.value
            for j, i in enumerate(free):
                if k >> j & 1:
                    s |= 1 << i
            yield s

    def pattern(self, tracked: Sequence[str]) -> str:
        return "".join(
            ("1" if self.value >> i & 1 else "0") if self.care >> i & 1 else "*"
            for i in range(len(tracked))
        )


FULL = Cube(0, 0)

Transition = tuple[Cube, int, bool]


@dataclass
class Automaton:
    tracked: tuple[str, ...]
    transitions: list[list[Transition]]
    initial: tuple[int, ...]
    payloads: list = field(default_factory=list)
    deterministic: bool = True

    @property
    def n_states(self) -> int:
        return len(self.transitions)

    @property
    def n_vars(self) -> int:
        return len(self.tracked)

    def payload(self, q: int):
        return self.payloads[q] if self.payloads else q

    def step(self, q: int, sym: int) -> list[tuple[int, bool]]:
        return [(t, a) for c, t, a in self.transitions[q] if c.contains(sym)]

    def symbol_of(self, bits: dict) -> int:
        return sum(1 << i for i, v in enumerate(self.tracked) if bits.get(v, 0))

    def __repr__(self) -> str:
        kind = "DFA" if self.deterministic else "NFA"
        return f"<{kind} over {self.tracked}: {self.n_states} states>"


# --------------------------------------------------------------------------
# exploration


def explore(
    tracked: Sequence[str],
    initial: Hashable,
    successors: Callable[[Hashable], Iterable[tuple[Cube, Hashable, bool]]],
    max_states: int | None = None,
    on_state: Callable[[int], None] | None = None,
) -> Automaton:
    """Breadth-first construction of a deterministic automaton from a successor function."""
    index = {initial: 0}
    payloads = [initial]
    trans: list[list[Transition]] = []
    queue = deque([initial])
    while queue:
        p = queue.popleft()
        row = []
        for cube, succ, acc in successors(p):
            t = index.get(succ)
            if t is None:
                t = len(payloads)
                if max_states is not None and t >= max_states:
                    raise ResourceLimit(f"state limit {max_states} exceeded")
                index[succ] = t
                payloads.append(succ)
                queue.append(succ)
            row.append((cube, t, acc))
        trans.append(row)
        if on_state is not None:
            on_state(len(payloads))
    return Automaton(tuple(tracked), trans, (0,), payloads, True)


# --------------------------------------------------------------------------
# dense helpers


def _check_dense(n: int) -> None:
    if n > MAX_DENSE_VARS:
        raise ResourceLimit(f"{n} tracked variables exceed the dense-alphabet limit {MAX_DENSE_VARS}")


def dense_rows(a: Automaton) -> list[list[list[tuple[int, bool]]]]:
    """rows[q][sym] = list of (target, accepting)."""
    _check_dense(a.n_vars)
    size = 1 << a.n_vars
    rows = []
    for q in range(a.n_states):
        row: list[list[tuple[int, bool]]] = [[] for _ in range(size)]
        for c, t, acc in a.transitions[q]:
            for s in c.symbols(a.n_vars):
                row[s].append((t, acc))
        rows.append(row)
    return rows


def cover(symbols: Iterable[int], n: int) -> list[Cube]:
    """Disjoint cubes whose union is exactly ``symbols`` (Shannon decomposition)."""

    def rec(syms: frozenset, i: int, care: int, value: int) -> list[Cube]:
        if not syms:
            return []
        if len(syms) == 1 << i:
            return [Cube(care, value)]
        b = 1 << (i - 1)
        lo = frozenset(s for s in syms if not s & b)
        hi = frozenset(s & ~b for s in syms if s & b)
        if lo == hi:
            return rec(lo, i - 1, care, value)
        return rec(lo, i - 1, care | b, value) + rec(hi, i - 1, care | b, value | b)

    return rec(frozenset(symbols), n, 0, 0)


def _rows_to_transitions(row: dict, n: int) -> list[Transition]:
    """``row`` maps (target, acc) -> list of symbols."""
    out = []
    for (t, acc), syms in sorted(row.items()):
        for c in cover(syms, n):
            out.append((c, t, acc))
    return out


def compress(a: Automaton) -> Automaton:
    """Merge cubes that share target and acceptance."""
    rows = dense_rows(a)
    trans = []
    for q in range(a.n_states):
        groups: dict = {}
        for s, entries in enumerate(rows[q]):
            for key in entries:
                groups.setdefault(key, []).append(s)
        trans.append(_rows_to_transitions(groups, a.n_vars))
    return Automaton(a.tracked, trans, a.initial, list(a.payloads), a.deterministic)


# --------------------------------------------------------------------------
# track manipulation


def extend(a: Automaton, tracked: Sequence[str]) -> Automaton:
    """Re-index ``a`` over a superset of its tracked variables (new ones are don't-care)."""
    tracked = tuple(tracked)
    if tracked == a.tracked:
        return a
    pos = {v: i for i, v in enumerate(tracked)}
    missing = [v for v in a.tracked if v not in pos]
    if missing:
        raise TrackMismatch(f"variables {missing} not in target tracks {tracked}")
    remap = [pos[v] for v in a.tracked]

    def move(mask: int) -> int:
        out = 0
        for i, j in enumerate(remap):
            if mask >> i & 1:
                out |= 1 << j
        return out

    trans = [[(Cube(move(c.care), move(c.value)), t, acc) for c, t, acc in row] for row in a.transitions]
    return Automaton(tracked, trans, a.initial, list(a.payloads), a.deterministic)


def _same_tracks(a: Automaton, b: Automaton) -> None:
    if a.tracked != b.tracked:
        raise TrackMismatch(f"{a.tracked} vs {b.tracked}")


# --------------------------------------------------------------------------
# boolean operations


def is_complete(a: Automaton) -> bool:
    n = a.n_vars
    for row in a.transitions:
        seen = set()
        for c, _, _ in row:
            seen.update(c.symbols(n))
        if len(seen) != 1 << n:
            return False
    return True


def _subtract(c: Cube, d: Cube, n: int) -> list[Cube]:
    if c.meet(d) is None:
        return [c]
    out = []
    cur = c
    for i in range(n):
        b = 1 << i
        if d.care & b and not cur.care & b:
            out.append(Cube(cur.care | b, cur.value | (~d.value & b)))
            cur = Cube(cur.care | b, cur.value | (d.value & b))
    return out


def complete(a: Automaton) -> Automaton:
    """Add a rejecting sink so every state has a transition on every symbol."""
    n = a.n_vars
    trans = [list(row) for row in a.transitions]
    sink = len(trans)
    used_sink = not a.initial
    for row in trans:
        gaps = [FULL]
        for c, _, _ in row:
            gaps = [g for gap in gaps for g in _subtract(gap, c, n)]
        if gaps:
            used_sink = True
            row.extend((g, sink, False) for g in gaps)
    if not used_sink:
        return a
    trans.append([(FULL, sink, False)])
    payloads = list(a.payloads) + [None] if a.payloads else []
    initial = a.initial or (sink,)
    return Automaton(a.tracked, trans, initial, payloads, a.deterministic)


def _product(a: Automaton, b: Automaton, op: Callable[[bool, bool], bool]) -> Automaton:
    _same_tracks(a, b)
    index: dict = {}
    pairs: list = []
    trans: list[list[Transition]] = []
    queue: deque = deque()

    def get(p) -> int:
        i = index.get(p)
        if i is None:
            i = index[p] = len(pairs)
            pairs.append(p)
            queue.append(p)
        return i

    init = tuple(get((p, q)) for p in a.initial for q in b.initial)
    while queue:
        p, q = queue.popleft()
        row = []
        for c1, t1, a1 in a.transitions[p]:
            for c2, t2, a2 in b.transitions[q]:
                c = c1.meet(c2)
                if c is not None:
                    row.append((c, get((t1, t2)), op(a1, a2)))
        trans.append(row)
    return Automaton(a.tracked, trans, init, pairs, a.deterministic and b.deterministic)


def intersect(a: Automaton, b: Automaton) -> Automaton:
    return _product(a, b, lambda x, y: x and y)


def union(a: Automaton, b: Automaton) -> Automaton:
    _same_tracks(a, b)
    return _product(complete(determinize(a)), complete(determinize(b)), lambda x, y: x or y)


def _subsets(a: Automaton, negate: bool) -> Automaton:
    rows = dense_rows(a)
    n = a.n_vars
    start = frozenset(a.initial)
    index = {start: 0}
    order = [start]
    trans = []
    queue = deque([start])
    while queue:
        S = queue.popleft()
        groups: dict = {}
        for s in range(1 << n):
            T = set()
            acc = False
            for q in S:
                for t, ac in rows[q][s]:
                    T.add(t)
                    acc = acc or ac
            T = frozenset(T)
            i = index.get(T)
            if i is None:
                i = index[T] = len(order)
                order.append(T)
                queue.append(T)
            groups.setdefault((i, acc != negate), []).append(s)
        trans.append(_rows_to_transitions(groups, n))
    return Automaton(a.tracked, trans, (0,), order, True)


def determinize(a: Automaton) -> Automaton:
    if a.deterministic and len(a.initial) == 1:
        return a
    return _subsets(a, negate=False)


def complement(a: Automaton) -> Automaton:
    """Deterministic automaton for the complement language (words of length >= 1)."""
    return _subsets(a, negate=True)


def project(a: Automaton, var: str) -> Automaton:
    """Remove the track of ``var``; acceptance is closed under sign extension of ``var``."""
    if var not in a.tracked:
        return a
    i = a.tracked.index(var)
    n = a.n_vars
    rows = dense_rows(a)
    low = (1 << i) - 1

    def proj(s: int) -> int:
        return (s & low) | ((s >> (i + 1)) << i)

    # pad[p]: bitset of projected symbols tau such that some run from p over
    # symbols projecting to tau ends in an accepting transition
    pad = [0] * a.n_states
    preds: list[list[tuple[int, int]]] = [[] for _ in range(a.n_states)]
    for q in range(a.n_states):
        for s in range(1 << n):
            tau = proj(s)
            for t, acc in rows[q][s]:
                if acc:
                    pad[q] |= 1 << tau
                preds[t].append((q, tau))
    work = deque(range(a.n_states))
    while work:
        p = work.popleft()
        for q, tau in preds[p]:
            bit = 1 << tau
            if pad[p] & bit and not pad[q] & bit:
                pad[q] |= bit
                work.append(q)

    m = n - 1
    trans = []
    for q in range(a.n_states):
        acc_of: dict[tuple[int, int], bool] = {}
        for s in range(1 << n):
            tau = proj(s)
            for t, acc in rows[q][s]:
                key = (tau, t)
                acc_of[key] = acc_of.get(key, False) or acc or bool(pad[t] >> tau & 1)
        groups: dict = {}
        for (tau, t), acc in acc_of.items():
            groups.setdefault((t, acc), []).append(tau)
        trans.append(_rows_to_transitions(groups, m))
    tracked = a.tracked[:i] + a.tracked[i + 1:]
    return Automaton(tracked, trans, a.initial, list(a.payloads), False)


# --------------------------------------------------------------------------
# reachability, emptiness, minimisation


def reachable(a: Automaton) -> list[int]:
    seen = dict.fromkeys(a.initial)
    queue = deque(a.initial)
    while queue:
        q = queue.popleft()
        for _, t, _ in a.transitions[q]:
            if t not in seen:
                seen[t] = None
                queue.append(t)
    return list(seen)


def live_states(a: Automaton) -> set[int]:
    """States with a nonempty language."""
    preds: list[set[int]] = [set() for _ in range(a.n_states)]
    live = set()
    for q, row in enumerate(a.transitions):
        for _, t, acc in row:
            preds[t].add(q)
            if acc:
                live.add(q)
    queue = deque(live)
    while queue:
        p = queue.popleft()
        for q in preds[p]:
            if q not in live:
                live.add(q)
                queue.append(q)
    return live


def is_empty(a: Automaton) -> bool:
    for q in reachable(a):
        if any(acc for _, _, acc in a.transitions[q]):
            return False
    return True


def shortest_accepting_word(a: Automaton) -> list[int] | None:
    """A shortest accepted word as a list of symbols, or None."""
    parent: dict[int, tuple[int, int] | None] = {q: None for q in a.initial}
    queue = deque(a.initial)
    while queue:
        q = queue.popleft()
        for c, t, acc in a.transitions[q]:
            if acc:
                word = [c.value]
                while parent[q] is not None:
                    q, s = parent[q]
                    word.append(s)
                return word[::-1]
        for c, t, _ in a.transitions[q]:
            if t not in parent:
                parent[t] = (q, c.value)
                queue.append(t)
    return None


def word_to_values(tracked: Sequence[str], word: Sequence[int]) -> dict[str, int]:
    return {v: decode([s >> i & 1 for s in word]) for i, v in enumerate(tracked)}


def values_to_word(tracked: Sequence[str], values: dict[str, int], length: int | None = None) -> list[int]:
    need = max([len(encode(values[v])) for v in tracked] + [1])
    length = max(need, length or 0)
    cols = [encode(values[v], length) for v in tracked]
    return [sum(col[k] << i for i, col in enumerate(cols)) for k in range(length)]


def accepts(a: Automaton, word: Sequence[int]) -> bool:
    if not word:
        return False
    current = set(a.initial)
    for k, s in enumerate(word):
        nxt = set()
        last = k == len(word) - 1
        for q in current:
            for t, acc in a.step(q, s):
                if last and acc:
                    return True
                nxt.add(t)
        current = nxt
    return False


def accepts_values(a: Automaton, values: dict[str, int], length: int | None = None) -> bool:
    return accepts(a, values_to_word(a.tracked, values, length))


def trim(a: Automaton) -> Automaton:
    """Keep reachable states with nonempty language; the result may be partial."""
    live = live_states(a)
    keep = [q for q in reachable(a) if q in live]
    new = {q: i for i, q in enumerate(keep)}
    trans = [[(c, new[t], acc) for c, t, acc in a.transitions[q] if t in new] for q in keep]
    payloads = [a.payloads[q] for q in keep] if a.payloads else []
    initial = tuple(new[q] for q in a.initial if q in new)
    return Automaton(a.tracked, trans, initial, payloads, a.deterministic)


def minimize(a: Automaton) -> Automaton:
    """Minimal partial DFA: no empty-language states, all states pairwise distinguishable.

    Blocks start from the acceptance signature of each state and are refined
    with Hopcroft's algorithm over the explicit alphabet.
    """
    a = trim(determinize(a))
    n_states = a.n_states
    if n_states == 0:
        return Automaton(a.tracked, [], (), [], True)
    n = a.n_vars
    size = 1 << n
    sink = n_states
    delta = [[sink] * size for _ in range(n_states + 1)]
    accm = [[False] * size for _ in range(n_states + 1)]
    for q in range(n_states):
        for c, t, acc in a.transitions[q]:
            for s in c.symbols(n):
                delta[q][s] = t
                accm[q][s] = acc
    total = n_states + 1

    sig_blocks: dict = {}
    for q in range(total):
        sig_blocks.setdefault((q == sink, tuple(accm[q])), []).append(q)
    blocks = [set(b) for b in sig_blocks.values()]
    block_of = [0] * total
    for i, b in enumerate(blocks):
        for q in b:
            block_of[q] = i

    inverse: list[list[list[int]]] = [[[] for _ in range(total)] for _ in range(size)]
    for q in range(total):
        for s in range(size):
            inverse[s][delta[q][s]].append(q)

    work = set(range(len(blocks)))
    while work:
        splitter = set(blocks[work.pop()])
        for s in range(size):
            pre = set()
            for p in splitter:
                pre.update(inverse[s][p])
            if not pre:
                continue
            touched: dict[int, set[int]] = {}
            for q in pre:
                touched.setdefault(block_of[q], set()).add(q)
            for bi, inside in touched.items():
                if len(inside) == len(blocks[bi]):
                    continue
                rest = blocks[bi] - inside
                blocks[bi] = inside
                nb = len(blocks)
                blocks.append(rest)
                for q in rest:
                    block_of[q] = nb
                if bi in work:
                    work.add(nb)
                else:
                    work.add(bi if len(inside) <= len(rest) else nb)

    # renumber in BFS order from the initial block for a canonical shape
    init_block = block_of[a.initial[0]]
    order = {init_block: 0}
    queue = deque([init_block])
    reps = []
    while queue:
        b = queue.popleft()
        rep = min(blocks[b])
        reps.append(rep)
        for s in range(size):
            tb = block_of[delta[rep][s]]
            if delta[rep][s] != sink and tb not in order:
                order[tb] = len(order)
                queue.append(tb)
    trans = []
    payloads = []
    for rep in reps:
        groups: dict = {}
        for s in range(size):
            t = delta[rep][s]
            if t == sink:
                continue
            groups.setdefault((order[block_of[t]], accm[rep][s]), []).append(s)
        trans.append(_rows_to_transitions(groups, n))
        payloads.append(a.payloads[rep] if a.payloads else rep)
    return Automaton(a.tracked, trans, (0,), payloads, True)


def complete_size(a: Automaton) -> int:
    """Number of states of the minimal complete DFA for L(a)."""
    m = minimize(a)
    if m.n_states == 0:
        return 1
    return m.n_states + (0 if is_complete(m) else 1)


def language_equal(a: Automaton, b: Automaton) -> bool:
    _same_tracks(a, b)
    x = complete(determinize(a))
    y = complete(determinize(b))
    return is_empty(_product(x, y, lambda p, q: p != q))


def state_languages_distinct(a: Automaton) -> bool:
    """Check the minimality predicate directly: every state has a nonempty,
    pairwise distinct language."""
    for q in range(a.n_states):
        single = Automaton(a.tracked, a.transitions, (q,), [], a.deterministic)
        if is_empty(single):
            return False
    for p in range(a.n_states):
        for q in range(p + 1, a.n_states):
            ap = Automaton(a.tracked, a.transitions, (p,), [], a.deterministic)
            aq = Automaton(a.tracked, a.transitions, (q,), [], a.deterministic)
            if language_equal(ap, aq):
                return False
    return True


def to_dot(a: Automaton, label: Callable[[object], str] | None = None) -> str:
    label = label or str
    lines = ["digraph automaton {", "  rankdir=LR;", '  node [shape=box, fontname="monospace"];']
    for q in range(a.n_states):
        text = label(a.payload(q)).replace("\\", "\\\\").replace('"', '\\"')
        lines.append(f'  q{q} [label="{text}"];')
    for i, q in enumerate(a.initial):
        lines.append(f"  init{i} [shape=point];")
        lines.append(f"  init{i} -> q{q};")
    tracks = ",".join(a.tracked)
    for q, row in enumerate(a.transitions):
        for c, t, acc in row:
            style = ', style=bold, color="darkgreen"' if acc else ""
            lines.append(f'  q{q} -> q{t} [label="{c.pattern(a.tracked) or "()"}"{style}];')
    lines.append(f'  label="tracks: {tracks}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
