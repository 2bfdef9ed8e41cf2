"""Modal automata and the automaton-level constructions: formula to
automaton, simulation into disjunctive form, linearization, translation
back to formulas, and the bottom/M/W/D/B/F/A/U transformations with their
pipelines.
"""

from __future__ import annotations

import itertools
import os

from . import determinize as DT
from . import onestep as O
from . import syntax as S
from .syntax import TT, FF, PROP, NPROP, AND, OR, DIA, BOX, MU, NU


class AutomatonError(Exception):
    pass


class ResourceLimitError(AutomatonError):
    """A construction exceeded the configured state or formula caps."""


def state_cap():
    try:
        return int(os.environ.get("MUCALC_STATE_CAP", "20000"))
    except ValueError:
        return 20000


_DISJUNCT_CAP = 50000
_DUTY_CAP = 10
_FREE_CAP = 10


class ModalAutomaton:
    """Finite-state automaton (states, one-step transition map, priorities).

    Transition entries are OneStepFormula or DisjunctiveOneStep values; the
    automaton is disjunctive when every entry is disjunctive.  A bipartite
    automaton carries its (initial part, final part) split.
    """

    __slots__ = ("states", "transitions", "priority", "bipartition")

    def __init__(self, states, transitions, priority, bipartition=None):
        self.states = tuple(states)
        self.transitions = dict(transitions)
        self.priority = dict(priority)
        for a in self.states:
            if a not in self.transitions or a not in self.priority:
                raise AutomatonError(f"state {a} lacks a transition or priority")
        if bipartition is not None:
            initial, final = bipartition
            bipartition = (frozenset(initial), frozenset(final))
        self.bipartition = bipartition

    @property
    def disjunctive(self):
        return all(isinstance(t, O.DisjunctiveOneStep)
                   for t in self.transitions.values())

    @property
    def generalized(self):
        """States occurring as unguarded literals make an automaton
        generalized; those are rejected by the acceptance game."""
        for t in self.transitions.values():
            if isinstance(t, O.DisjunctiveOneStep):
                continue
            if _has_state_literal(t):
                return True
        return False

    def onestep(self, a):
        t = self.transitions[a]
        if isinstance(t, O.DisjunctiveOneStep):
            return t.to_onestep()
        return t

    def state_atoms(self, a):
        t = self.transitions[a]
        out = t.state_atoms()
        if not isinstance(t, O.DisjunctiveOneStep):
            out |= _state_literals(t)
        return out

    def __repr__(self):
        return f"ModalAutomaton(states={self.states!r})"


def _has_state_literal(alpha):
    k = alpha.kind
    if k in (O.OPOS, O.ONEG):
        return isinstance(alpha.name, int)
    if alpha.left is not None and _has_state_literal(alpha.left):
        return True
    return alpha.right is not None and _has_state_literal(alpha.right)


def _state_literals(alpha):
    k = alpha.kind
    if k in (O.OPOS, O.ONEG):
        return frozenset((alpha.name,)) if isinstance(alpha.name, int) else frozenset()
    out = frozenset()
    if alpha.left is not None:
        out |= _state_literals(alpha.left)
    if alpha.right is not None:
        out |= _state_literals(alpha.right)
    return out


class InitializedAutomaton:
    __slots__ = ("automaton", "initial")

    def __init__(self, automaton, initial):
        if initial not in automaton.states:
            raise AutomatonError(f"initial state {initial} not in the automaton")
        if (automaton.bipartition is not None
                and initial not in automaton.bipartition[0]):
            raise AutomatonError("initial state must lie in the initial part")
        self.automaton = automaton
        self.initial = initial

    def __repr__(self):
        return f"InitializedAutomaton(initial={self.initial}, {self.automaton!r})"


# ---------------------------------------------------------------------------
# occurrence graph, clusters, linearization

def occurrence_edges(aut):
    """a -> set of states occurring in Theta(a)."""
    return {a: aut.state_atoms(a) for a in aut.states}


def active_in(aut):
    """Transitive closure: active[b] = states transitively occurring in
    Theta(b)."""
    edges = occurrence_edges(aut)
    closure = {a: set(edges[a]) for a in aut.states}
    changed = True
    while changed:
        changed = False
        for a in aut.states:
            new = set(closure[a])
            for b in list(closure[a]):
                new |= closure[b]
            if new != closure[a]:
                closure[a] = new
                changed = True
    return {a: frozenset(v) for a, v in closure.items()}


def clusters(aut):
    """Cells of mutual activity (degenerate singletons included)."""
    closure = active_in(aut)
    cells = []
    seen = set()
    for a in aut.states:
        if a in seen:
            continue
        cell = {a}
        for b in aut.states:
            if b != a and b in closure[a] and a in closure[b]:
                cell.add(b)
        seen |= cell
        cells.append(frozenset(cell))
    return cells


def linearize(aut):
    """Injective re-prioritization: parity preserved per state, the original
    strict order preserved inside each cluster, and a state's priority
    exceeds those of states that are active in it but not vice versa.

    For bipartite automata the final part is placed below the initial part.
    """
    closure = active_in(aut)
    cells = clusters(aut)
    final = aut.bipartition[1] if aut.bipartition else frozenset()

    def mentions(c, d):
        return any(b in closure[a] for a in c for b in d)

    order = []
    remaining = list(cells)
    while remaining:
        ready = [c for c in remaining
                 if not any(d is not c and mentions(c, d) and not mentions(d, c)
                            for d in remaining)]
        if not ready:  # pragma: no cover - mutual mentions collapse to cells
            ready = remaining[:]
        ready.sort(key=lambda c: (0 if c <= final else 1, min(map(_skey, c))))
        cell = ready[0]
        remaining.remove(cell)
        order.append(cell)

    new_prio = {}
    base = 0
    for cell in order:
        for a in sorted(cell, key=lambda a: (aut.priority[a], _skey(a))):
            v = base + 1
            if v % 2 != aut.priority[a] % 2:
                v += 1
            new_prio[a] = v
            base = v
    return ModalAutomaton(aut.states, aut.transitions, new_prio, aut.bipartition)


def _skey(a):
    return (str(type(a)), repr(a))


def is_linear(aut):
    prios = list(aut.priority.values())
    if len(set(prios)) != len(prios):
        return False
    closure = active_in(aut)
    for a in aut.states:
        for b in aut.states:
            if b in closure[a] and a not in closure[b]:
                if not aut.priority[a] > aut.priority[b]:
                    return False
    return True


# ---------------------------------------------------------------------------
# formula -> automaton

def from_formula(xi):
    """Equivalent initialized modal automaton for a mu-calculus formula.

    States are pairs (closure member, entry priority): the closure member is
    a modal argument (or the whole formula), and the entry priority is the
    highest variable priority unfolded on the way in since the last modal
    step.  Transitions expand the member through booleans, binders and
    unfoldings down to the next modalities.
    """
    xi = S.prepare(xi)
    prio = S.priorities(xi)
    bm = S.binder_map(xi)
    cap = state_cap()

    key2id = {}
    meta = []
    transitions = {}
    priority = {}
    todo = []
    walk_cache = {}
    walk_memo = {}
    lat_memo = {}

    def state_for(formula, entry):
        key = (formula, entry)
        sid = key2id.get(key)
        if sid is None:
            sid = len(meta)
            if sid >= cap:
                raise ResourceLimitError("state cap exceeded while building automaton")
            key2id[key] = sid
            meta.append(key)
            priority[sid] = entry
            todo.append(key)
        return sid

    def walk(f, cur, unfolding):
        key = (f, cur)
        out = walk_memo.get(key)
        if out is not None:
            return out
        k = f.kind
        if k == PROP:
            if f.name in bm:
                if f.name in unfolding:
                    raise AutomatonError("unguarded recursion; run guard() first")
                out = walk(bm[f.name][1], max(cur, prio[f.name]),
                           unfolding | {f.name})
            else:
                out = O.oplit(f.name)
        elif k == NPROP:
            out = O.onlit(f.name)
        elif k == TT:
            out = O.OTop
        elif k == FF:
            out = O.OBot
        elif k == AND:
            out = O.oand(walk(f.left, cur, unfolding),
                         walk(f.right, cur, unfolding))
        elif k == OR:
            out = O.oor(walk(f.left, cur, unfolding),
                        walk(f.right, cur, unfolding))
        elif k in (MU, NU):
            out = walk(f.left, cur, unfolding)
        elif k == DIA:
            out = O.odia(lat(f.left, cur))
        elif k == BOX:
            out = O.obox(lat(f.left, cur))
        else:
            raise AutomatonError(f"unexpected formula kind {k!r}")
        walk_memo[key] = out
        return out

    def lat(f, cur):
        key = (f, cur)
        out = lat_memo.get(key)
        if out is not None:
            return out
        k = f.kind
        if k == TT:
            out = O.LTop
        elif k == FF:
            out = O.LBot
        elif k == AND:
            out = O.land(lat(f.left, cur), lat(f.right, cur))
        elif k == OR:
            out = O.lor(lat(f.left, cur), lat(f.right, cur))
        else:
            out = O.latom(state_for(f, cur))
        lat_memo[key] = out
        return out

    init = state_for(xi, 0)
    while todo:
        key = todo.pop()
        formula, _entry = key
        cached = walk_cache.get(formula)
        if cached is None:
            cached = walk(formula, 0, frozenset())
            walk_cache[formula] = cached
        transitions[key2id[key]] = cached

    aut = ModalAutomaton(range(len(meta)), transitions, priority)
    return InitializedAutomaton(*minimize(aut, init))


def compress_priorities(priority):
    """Dense parity-and-order preserving renumbering of priority values;
    same-parity neighbours collapse, so the range is minimal."""
    values = sorted(set(priority.values()))
    remap = {}
    cur = None
    for v in values:
        if cur is None:
            cur = v % 2
        elif v % 2 != cur % 2:
            cur += 1
        remap[v] = cur
    return {a: remap[v] for a, v in priority.items()}


def minimize(aut, initial):
    """Drop unreachable states, compress priorities, and merge states with
    identical rows (priority and transition up to the merging), keeping the
    initial.

    Returns (automaton, new initial).  Bipartitions are mapped through.
    """
    aut = ModalAutomaton(aut.states, aut.transitions,
                         compress_priorities(aut.priority), aut.bipartition)
    # reachable restriction
    reach = {initial}
    frontier = [initial]
    while frontier:
        a = frontier.pop()
        for b in aut.state_atoms(a):
            if b not in reach:
                reach.add(b)
                frontier.append(b)
    states = sorted(reach, key=_skey)

    # iterated merging of identical rows (never across a bipartition)
    if aut.bipartition is not None:
        part_tag = {a: (0 if a in aut.bipartition[0] else 1) for a in aut.states}
    else:
        part_tag = {a: 0 for a in aut.states}
    rep = {a: a for a in states}
    while True:
        sig = {}
        changed = False
        for a in states:
            t = aut.transitions[a]
            if isinstance(t, O.DisjunctiveOneStep):
                key = ("d", t.map_states(lambda x: rep[x]))
            else:
                key = ("o", O.rename_states(t, lambda x: rep[x]))
            key = (aut.priority[a], part_tag[a], key)
            if key in sig:
                if rep[a] != rep[sig[key]]:
                    rep[a] = rep[sig[key]]
                    changed = True
            else:
                sig[key] = a
        if not changed:
            break

    kept = sorted({rep[a] for a in states}, key=_skey)
    renum = {a: i for i, a in enumerate(kept)}

    def h(x):
        return renum[rep[x]]

    transitions = {}
    priority = {}
    for a in kept:
        t = aut.transitions[a]
        if isinstance(t, O.DisjunctiveOneStep):
            transitions[renum[a]] = t.map_states(h)
        else:
            transitions[renum[a]] = O.rename_states(t, h)
        priority[renum[a]] = aut.priority[a]
    bip = None
    if aut.bipartition is not None:
        ini, fin = aut.bipartition
        bip = (frozenset(h(a) for a in ini if a in reach),
               frozenset(h(a) for a in fin if a in reach))
    return (ModalAutomaton(range(len(kept)), transitions, priority, bip),
            h(initial))


# ---------------------------------------------------------------------------
# simulation: alternating -> disjunctive (nondeterministic) automata

def simulate(init):
    """Equivalent initialized disjunctive automaton.

    The construction tracks the set of alive states plus the transition
    relation feeding it, and runs a determinized parity word automaton for
    the condition "every thread of alive states satisfies the parity
    condition" along every branch.
    """
    aut = init.automaton
    if aut.disjunctive:
        return init
    if aut.generalized:
        raise AutomatonError("cannot simulate a generalized automaton")

    dpw = DT.DeterminizedParity(_bad_thread_nbw(aut))
    branch_table = {a: _branches(aut.onestep(a)) for a in aut.states}
    letters_table = {a: aut.onestep(a).letters() for a in aut.states}
    cap = state_cap()

    key2id = {}
    meta = []
    transitions = {}
    priority = {}
    todo = []
    rows_cache = {}

    def macro(rel, q):
        key = (rel, q)
        sid = key2id.get(key)
        if sid is None:
            sid = len(meta)
            if sid >= cap:
                raise ResourceLimitError("state cap exceeded during simulation")
            key2id[key] = sid
            meta.append(key)
            # complement of the bad-thread language: shift the parity
            priority[sid] = dpw.priority(q) + 1
            todo.append(key)
        return sid

    root_rel = frozenset(((None, init.initial),))
    root = macro(root_rel, dpw.initial)
    while todo:
        key = todo.pop()
        rel, q = key
        alive = frozenset(b for (_a, b) in rel)
        rows = rows_cache.get(alive)
        if rows is None:
            rows = _macro_rows(aut, branch_table, letters_table, alive)
            rows_cache[alive] = rows
        disjuncts = set()
        for (pi, rels) in rows:
            disjuncts.add((pi, frozenset(macro(r, dpw.step(q, r))
                                         for r in rels)))
        transitions[key2id[key]] = O.DisjunctiveOneStep(disjuncts)

    out = ModalAutomaton(range(len(meta)), transitions, priority)
    out, root = simplify_disjunctive(out, root)
    return InitializedAutomaton(*minimize(out, root))


def nonempty_states(aut):
    """States of a disjunctive automaton with nonempty language, via the
    emptiness game (Exists picks consistent disjuncts, Forall cover
    members)."""
    from . import parity as P
    owner = []
    prio = []
    succ = []
    ids = {}
    for a in aut.states:
        ids[("s", a)] = len(owner)
        owner.append(P.EXISTS)
        prio.append(aut.priority[a])
        succ.append([])
    for a in aut.states:
        spid = ids[("s", a)]
        for (pi, b) in aut.transitions[a].disjuncts:
            if not O.pi_consistent(pi):
                continue
            key = ("d", a, pi, b)
            if key not in ids:
                ids[key] = len(owner)
                owner.append(P.FORALL)
                prio.append(0)
                succ.append([ids[("s", x)] for x in sorted(b, key=_skey)])
            succ[spid].append(ids[key])
    solution = P.solve(P.ParityGame(owner, prio, succ))
    return frozenset(a for a in aut.states if ids[("s", a)] in solution.win_ex)


def simplify_disjunctive(aut, initial):
    """Sound local simplification of a disjunctive automaton: drop disjuncts
    that mention empty-language states, and collapse states that accept
    every pointed model onto one canonical such state."""
    if not aut.disjunctive:
        return aut, initial
    alive = nonempty_states(aut)
    transitions = {}
    for a in aut.states:
        transitions[a] = O.DisjunctiveOneStep(
            [(pi, b) for (pi, b) in aut.transitions[a].disjuncts
             if b <= alive])
    # greatest fixpoint of the cheap "accepts everything" test, restricted
    # to even priorities so that loops through the collapsed states are won
    top = {a for a in aut.states if aut.priority[a] % 2 == 0}
    changed = True
    while changed:
        changed = False
        for a in list(top):
            if not _top_witness(transitions[a], top):
                top.discard(a)
                changed = True
    if top:
        star = min(top)
        transitions[star] = O.DisjunctiveOneStep(
            [(frozenset(), frozenset()), (frozenset(), frozenset((star,)))])
        h = {a: (star if a in top else a) for a in aut.states}
        transitions = {a: t.map_states(lambda x: h[x])
                       for a, t in transitions.items()}
        priority = dict(aut.priority)
        priority[star] = 0
        initial = h[initial]
    else:
        priority = aut.priority
    return (ModalAutomaton(aut.states, transitions, priority, aut.bipartition),
            initial)


def _top_witness(delta, top):
    letters = sorted(delta.letters())
    for ymask in range(1 << len(letters)):
        y = frozenset(p for i, p in enumerate(letters) if ymask >> i & 1)
        blind = any(O.pi_holds(pi, y) and not b for (pi, b) in delta.disjuncts)
        busy = any(O.pi_holds(pi, y) and len(b) == 1 and b <= top
                   for (pi, b) in delta.disjuncts)
        if not (blind and busy):
            return False
    return True


def _bad_thread_nbw(aut):
    """Buchi automaton over transition relations accepting the streams with
    a thread whose maximal recurring priority is odd."""
    prio = compress_priorities(aut.priority)
    odd = sorted({v for v in prio.values() if v % 2 == 1})
    states = [("t", a) for a in aut.states]
    states += [("c", a, v) for a in aut.states for v in odd
               if prio[a] <= v]
    accepting = frozenset(("c", a, v) for a in aut.states for v in odd
                          if prio[a] == v)

    def step(state, rel):
        if state[0] == "t":
            (_, a) = state
            out = []
            for (x, b) in rel:
                if x == a:
                    out.append(("t", b))
                    out.extend(("c", b, v) for v in odd if prio[b] <= v)
            return out
        (_, a, v) = state
        return [("c", b, v) for (x, b) in rel if x == a and prio[b] <= v]

    return DT.NBW(states, frozenset(states), accepting, step)


_BRANCH_CACHE = {}


def _branches(alpha):
    """DNF branches of a one-step formula: (literals, diamond terms,
    merged box term or None)."""
    out = _BRANCH_CACHE.get(alpha)
    if out is not None:
        return out
    k = alpha.kind
    if k == O.OTOP:
        out = [(frozenset(), (), None)]
    elif k == O.OBOT:
        out = []
    elif k == O.OPOS:
        out = [(frozenset(((alpha.name, True),)), (), None)]
    elif k == O.ONEG:
        out = [(frozenset(((alpha.name, False),)), (), None)]
    elif k == O.ODIA:
        out = [(frozenset(), (alpha.term,), None)]
    elif k == O.OBOX:
        out = [(frozenset(), (), alpha.term)]
    elif k == O.OOR:
        out = _branches(alpha.left) + _branches(alpha.right)
    elif k == O.OAND:
        out = []
        seen = set()
        for (l1, d1, b1) in _branches(alpha.left):
            for (l2, d2, b2) in _branches(alpha.right):
                lits = l1 | l2
                if not O.pi_consistent(lits):
                    continue
                if b1 is None:
                    box = b2
                elif b2 is None:
                    box = b1
                else:
                    box = O.land(b1, b2)
                key = (lits, frozenset(d1 + d2), box)
                if key in seen:
                    continue
                seen.add(key)
                out.append((lits, tuple(sorted(set(d1 + d2), key=repr)), box))
        out = _prune_branches(out)
    else:
        raise AutomatonError(f"unexpected one-step kind {k!r}")
    _BRANCH_CACHE[alpha] = out
    return out


def _box_implied(weak, strong):
    """Every value satisfying `strong` satisfies `weak` (boxes as lattice
    terms; None stands for top)."""
    if weak is None or weak is strong:
        return True
    if strong is None:
        return weak.kind == O.LTOP
    return all(O.lattice_holds(weak, m)
               for m in O.lattice_min_models(strong, strong.atoms()))


def _prune_branches(branches):
    """Remove branches subsumed by a weaker one (subset literals, subset
    diamond duties, implied box): the disjunction and the admissible
    markings are unchanged."""
    out = []
    for i, (l1, d1, b1) in enumerate(branches):
        dominated = False
        for j, (l2, d2, b2) in enumerate(branches):
            if i == j:
                continue
            if not (l2 <= l1 and set(d2) <= set(d1) and _box_implied(b2, b1)):
                continue
            mutual = (l1 == l2 and set(d1) == set(d2) and _box_implied(b1, b2))
            if not mutual or j < i:
                dominated = True
                break
        if not dominated:
            out.append((l1, d1, b1))
    return out


def _macro_rows(aut, branch_table, letters_table, alive):
    """All (letter pattern, set of successor relations) rows admissible for
    the set of simultaneously alive states; independent of the word
    automaton component."""
    alive = sorted(alive, key=_skey)
    letters = sorted(set().union(*[letters_table[a] for a in alive]) if alive
                     else set())
    rows = set()
    for ymask in range(1 << len(letters)):
        y = frozenset(p for i, p in enumerate(letters) if ymask >> i & 1)
        pi = frozenset((p, p in y) for p in letters)
        per_state = []
        for a in alive:
            good = [br for br in branch_table[a] if O.pi_holds(br[0], y)]
            per_state.append(good)
        if any(not g for g in per_state):
            continue
        for combo in itertools.product(*per_state):
            boxes = {}
            duties = []
            for a, (_lits, dias, box) in zip(alive, combo):
                boxes[a] = box if box is not None else O.LTop
                duties.extend((a, term) for term in dias)
            if len(duties) > _DUTY_CAP:
                raise ResourceLimitError("too many diamond obligations in simulation")
            # minimal satisfying values per state for the plain box
            free_choice = {}
            for a in alive:
                term = boxes[a]
                free_choice[a] = O.lattice_min_models(term, term.atoms())
            free_rels = sorted({_type_rel(alive, t)
                                for t in _type_product(alive, free_choice)},
                               key=repr)
            if len(free_rels) > _FREE_CAP:
                raise ResourceLimitError("too many successor shapes in simulation")
            for partition in _set_partitions(duties):
                block_types = []
                dead = False
                for block in partition:
                    choices = {}
                    for a in alive:
                        term = boxes[a]
                        for (b_state, d_term) in block:
                            if b_state == a:
                                term = O.land(term, d_term)
                        choices[a] = O.lattice_min_models(term, term.atoms())
                        if not choices[a]:
                            dead = True
                            break
                    if dead:
                        break
                    block_types.append(
                        sorted({_type_rel(alive, t)
                                for t in _type_product(alive, choices)},
                               key=repr))
                if dead:
                    continue
                for picks in itertools.product(*block_types):
                    base = frozenset(picks)
                    for extra in _subsets(free_rels):
                        rels = base | extra
                        if not rels:
                            if not duties:
                                rows.add((pi, frozenset()))
                            continue
                        rows.add((pi, frozenset(rels)))
                        if len(rows) > _DISJUNCT_CAP:
                            raise ResourceLimitError("disjunct cap exceeded in simulation")
    return sorted(rows, key=repr)


def _type_product(alive, choices):
    out = []
    for combo in itertools.product(*[choices[a] for a in alive]):
        out.append(dict(zip(alive, combo)))
    return out


def _type_rel(alive, typ):
    return frozenset((a, b) for a in alive for b in typ[a])


def _subsets(items):
    items = sorted(items, key=repr)
    for mask in range(1 << len(items)):
        yield frozenset(x for i, x in enumerate(items) if mask >> i & 1)


def _set_partitions(items):
    """All partitions of items into nonempty blocks (Bell-number many)."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [part[i] + [first]] + part[i + 1:]
        yield part + [[first]]


# ---------------------------------------------------------------------------
# automaton -> formula (the translation map tr)

def to_formula(init, state=None):
    """Formula equivalent to the initialized automaton (or to the automaton
    seen from `state`), by the inductive translation over a linearization."""
    aut = init.automaton if isinstance(init, InitializedAutomaton) else init
    if state is None:
        state = init.initial
    if not is_linear(aut):
        aut = linearize(aut)
    names = _state_names(aut)
    theta = {a: _onestep_to_formula(aut, a, names) for a in aut.states}
    eta = {a: (S.mu if aut.priority[a] % 2 == 1 else S.nu) for a in aut.states}

    by_prio = sorted(aut.states, key=lambda a: aut.priority[a])
    tr = {}
    for i, m in enumerate(by_prio):
        if _is_canonical_top(aut, m):
            tr[m] = S.Top
            continue
        body = S.substitute(theta[m], {names[a]: tr[a] for a in by_prio[:i]})
        body = S.simplify_units(body)
        tr_m = eta[m](names[m], body) if names[m] in body._fv else body
        for a in by_prio[:i]:
            tr[a] = S.substitute(tr[a], {names[m]: tr_m})
        tr[m] = tr_m
    return S.simplify_units(tr[state])


def _is_canonical_top(aut, a):
    t = aut.transitions[a]
    if not isinstance(t, O.DisjunctiveOneStep) or aut.priority[a] % 2 == 1:
        return False
    want = {(frozenset(), frozenset()), (frozenset(), frozenset((a,)))}
    return set(t.disjuncts) == want


def _state_names(aut):
    used = set()
    for a in aut.states:
        used |= {x for x in aut.onestep(a).letters() if isinstance(x, str)}
    names = {}
    k = 0
    for a in sorted(aut.states, key=_skey):
        while f"z{k}" in used:
            k += 1
        names[a] = f"z{k}"
        k += 1
    return names


def _onestep_to_formula(aut, a, names):
    def term(t):
        k = t.kind
        if k == O.LATOM:
            return S.prop(names[t.atom])
        if k == O.LTOP:
            return S.Top
        if k == O.LBOT:
            return S.Bot
        if k == O.LAND:
            return S.conj(term(t.left), term(t.right))
        return S.disj(term(t.left), term(t.right))

    def go(f):
        k = f.kind
        if k == O.OTOP:
            return S.Top
        if k == O.OBOT:
            return S.Bot
        if k == O.OPOS:
            if isinstance(f.name, int):
                return S.prop(names[f.name])
            return S.prop(f.name)
        if k == O.ONEG:
            return S.nprop(f.name)
        if k == O.OAND:
            return S.conj(go(f.left), go(f.right))
        if k == O.OOR:
            return S.disj(go(f.left), go(f.right))
        if k == O.ODIA:
            return S.dia(term(f.term))
        return S.box(term(f.term))

    return go(aut.onestep(a))


# ---------------------------------------------------------------------------
# the transformations

def positive_in(aut, p):
    for a in aut.states:
        t = aut.transitions[a]
        if isinstance(t, O.DisjunctiveOneStep):
            if any((p, False) in pi for (pi, _b) in t.disjuncts):
                return False
        elif _has_neg_lit(t, p):
            return False
    return True


def _has_neg_lit(alpha, p):
    k = alpha.kind
    if k == O.ONEG:
        return alpha.name == p
    for c in (alpha.left, alpha.right):
        if c is not None and _has_neg_lit(c, p):
            return True
    return False


def _bot_copy(aut, p):
    """Renamed copy with bottom substituted for p (the final part of the
    bipartite transformations).  Returns (state map, transitions, priority)."""
    offset = len(aut.states)
    bot = {a: a + offset for a in aut.states}
    transitions = {}
    priority = {}
    for a in aut.states:
        t = aut.transitions[a]
        t = O.subst_bot(t, p)
        if isinstance(t, O.DisjunctiveOneStep):
            t = t.map_states(lambda x: bot[x])
        else:
            t = O.rename_states(t, lambda x: bot[x])
        transitions[bot[a]] = t
        priority[bot[a]] = aut.priority[a]
    return bot, transitions, priority


def transform_bot(init, p):
    """The automaton evaluating its input as if p were everywhere false."""
    aut = init.automaton
    if not positive_in(aut, p):
        raise AutomatonError(f"transformation needs positivity in {p!r}")
    bot, transitions, priority = _bot_copy(aut, p)
    renum = {bot[a]: i for i, a in enumerate(aut.states)}
    out = ModalAutomaton(
        range(len(aut.states)),
        {renum[b]: (t.map_states(lambda x: renum[x])
                    if isinstance(t, O.DisjunctiveOneStep)
                    else O.rename_states(t, lambda x: renum[x]))
         for b, t in transitions.items()},
        {renum[b]: v for b, v in priority.items()})
    return InitializedAutomaton(out, renum[bot[init.initial]])


def transform_M(init, p):
    aut = init.automaton
    if not aut.disjunctive:
        raise AutomatonError("the monotone transformation needs a disjunctive automaton")
    transitions = {a: O.translate_M(aut.transitions[a], p) for a in aut.states}
    out = ModalAutomaton(aut.states, transitions, aut.priority, aut.bipartition)
    return InitializedAutomaton(out, init.initial)


def _bipartite_transform(init, p, translate, initial_priority=None):
    aut = init.automaton
    if not aut.disjunctive:
        raise AutomatonError("this transformation needs a disjunctive automaton")
    if not positive_in(aut, p):
        raise AutomatonError(f"transformation needs positivity in {p!r}")
    bot, transitions, priority = _bot_copy(aut, p)
    for a in aut.states:
        transitions[a] = translate(aut.transitions[a], lambda x: bot[x])
        priority[a] = (aut.priority[a] if initial_priority is None
                       else initial_priority)
    out = ModalAutomaton(list(aut.states) + [bot[a] for a in aut.states],
                         transitions, priority,
                         (aut.states, [bot[a] for a in aut.states]))
    return InitializedAutomaton(out, init.initial)


def transform_W(init, p):
    return _bipartite_transform(init, p, lambda d, bot: O.translate_W(d, bot))


def transform_B(init, p):
    return _bipartite_transform(init, p, lambda d, bot: O.translate_B(d, bot))


def transform_F(init, p):
    return _bipartite_transform(init, p,
                                lambda d, bot: O.translate_F(d, p, bot),
                                initial_priority=1)


def transform_A(init, p):
    return _bipartite_transform(init, p,
                                lambda d, bot: O.translate_A(d, p, bot),
                                initial_priority=1)


def transform_D(init, p):
    """Finite-depth transformation; applies to arbitrary modal automata."""
    aut = init.automaton
    if not positive_in(aut, p):
        raise AutomatonError(f"transformation needs positivity in {p!r}")
    bot, transitions, priority = _bot_copy(aut, p)
    for a in aut.states:
        t = aut.onestep(a)
        transitions[a] = O.oor(t, O.rename_states(t, lambda x: bot[x]))
        priority[a] = 1
    out = ModalAutomaton(list(aut.states) + [bot[a] for a in aut.states],
                         transitions, priority,
                         (aut.states, [bot[a] for a in aut.states]))
    return InitializedAutomaton(out, init.initial)


def transform_U(init):
    aut = init.automaton
    if not aut.disjunctive:
        raise AutomatonError("the universal transformation needs a disjunctive automaton")
    transitions = {a: O.translate_U(aut.transitions[a]) for a in aut.states}
    out = ModalAutomaton(aut.states, transitions, aut.priority)
    return InitializedAutomaton(out, init.initial)


# ---------------------------------------------------------------------------
# boolean operations on automata

def dual(init):
    """Complement automaton: dual one-step formulas, priorities shifted.

    Accepts a pointed model iff the input does not."""
    aut = init.automaton
    if aut.generalized:
        raise AutomatonError("cannot dualize a generalized automaton")
    transitions = {a: _dual_onestep(aut.onestep(a)) for a in aut.states}
    priority = {a: aut.priority[a] + 1 for a in aut.states}
    return InitializedAutomaton(
        ModalAutomaton(aut.states, transitions, priority), init.initial)


def _dual_onestep(alpha):
    k = alpha.kind
    if k == O.OTOP:
        return O.OBot
    if k == O.OBOT:
        return O.OTop
    if k == O.OPOS:
        return O.onlit(alpha.name)
    if k == O.ONEG:
        return O.oplit(alpha.name)
    if k == O.OAND:
        return O.oor(_dual_onestep(alpha.left), _dual_onestep(alpha.right))
    if k == O.OOR:
        return O.oand(_dual_onestep(alpha.left), _dual_onestep(alpha.right))
    if k == O.ODIA:
        return O.obox(_dual_term(alpha.term))
    return O.odia(_dual_term(alpha.term))


def _dual_term(term):
    k = term.kind
    if k == O.LTOP:
        return O.LBot
    if k == O.LBOT:
        return O.LTop
    if k == O.LAND:
        return O.lor(_dual_term(term.left), _dual_term(term.right))
    if k == O.LOR:
        return O.land(_dual_term(term.left), _dual_term(term.right))
    return term


def conjoin(left, right):
    """Initialized automaton accepting the intersection: disjoint union with
    a fresh initial state whose transition conjoins both initials."""
    offset = len(left.automaton.states)
    transitions = {}
    priority = {}
    for a in left.automaton.states:
        transitions[a] = left.automaton.onestep(a)
        priority[a] = left.automaton.priority[a]
    for a in right.automaton.states:
        t = O.rename_states(right.automaton.onestep(a), lambda x: x + offset)
        transitions[a + offset] = t
        priority[a + offset] = right.automaton.priority[a]
    root = offset + len(right.automaton.states)
    transitions[root] = O.oand(transitions[left.initial],
                               transitions[right.initial + offset])
    priority[root] = 0
    states = list(range(root + 1))
    return InitializedAutomaton(ModalAutomaton(states, transitions, priority),
                                root)


def is_empty(init):
    """Language emptiness of an initialized modal automaton."""
    disj = simulate(init)
    return disj.initial not in nonempty_states(disj.automaton)


class CoverAutomaton:
    """Internal nondeterministic form for containment games: per state a
    list of rows (pi, required macros, admissible macros), standing for the
    one-step formulas pi and diamonds-of-required and box-of-admissible."""

    __slots__ = ("states", "rows", "priority", "initial")

    def __init__(self, states, rows, priority, initial):
        self.states = tuple(states)
        self.rows = dict(rows)
        self.priority = dict(priority)
        self.initial = initial


def to_cover(init):
    """Cover form of an initialized disjunctive automaton."""
    aut = init.automaton
    if not aut.disjunctive:
        raise AutomatonError("cover form needs a disjunctive automaton")
    rows = {}
    for a in aut.states:
        rows[a] = tuple((pi, b, b) for (pi, b) in aut.transitions[a].disjuncts
                        if O.pi_consistent(pi))
    return CoverAutomaton(aut.states, rows, aut.priority, init.initial)


def simulate_cover(init):
    """Cover-form equivalent of an initialized modal automaton; like
    simulate, but extra successor shapes are carried in the admissible set
    of each row instead of being enumerated into separate disjuncts."""
    aut = init.automaton
    if aut.disjunctive:
        return to_cover(init)
    if aut.generalized:
        raise AutomatonError("cannot simulate a generalized automaton")
    dpw = DT.DeterminizedParity(_bad_thread_nbw(aut))
    branch_table = {a: _branches(aut.onestep(a)) for a in aut.states}
    letters_table = {a: aut.onestep(a).letters() for a in aut.states}
    cap = state_cap()

    key2id = {}
    meta = []
    rows_out = {}
    priority = {}
    todo = []
    rows_cache = {}

    def macro(rel, q):
        key = (rel, q)
        sid = key2id.get(key)
        if sid is None:
            sid = len(meta)
            if sid >= cap:
                raise ResourceLimitError("state cap exceeded during simulation")
            key2id[key] = sid
            meta.append(key)
            priority[sid] = dpw.priority(q) + 1
            todo.append(key)
        return sid

    root = macro(frozenset(((None, init.initial),)), dpw.initial)
    while todo:
        key = todo.pop()
        rel, q = key
        alive = frozenset(b for (_a, b) in rel)
        rows = rows_cache.get(alive)
        if rows is None:
            rows = _macro_rows_cover(aut, branch_table, letters_table, alive)
            rows_cache[alive] = rows
        out = []
        for (pi, req, alls) in rows:
            out.append((pi,
                        frozenset(macro(r, dpw.step(q, r)) for r in req),
                        frozenset(macro(r, dpw.step(q, r)) for r in alls)))
        rows_out[key2id[key]] = tuple(out)
    return CoverAutomaton(range(len(meta)), rows_out, priority, root)


_PARTIAL_CAP = 4000


def _macro_rows_cover(aut, branch_table, letters_table, alive):
    """Rows (pi, required rels, admissible rels) for the alive set, with
    subsumption pruning of branch combinations."""
    alive = sorted(alive, key=_skey)
    letters = sorted(set().union(*[letters_table[a] for a in alive]) if alive
                     else set())
    rows = []
    for ymask in range(1 << len(letters)):
        y = frozenset(p for i, p in enumerate(letters) if ymask >> i & 1)
        pi = frozenset((p, p in y) for p in letters)
        per_state = []
        for a in alive:
            good = [br for br in branch_table[a] if O.pi_holds(br[0], y)]
            per_state.append((a, good))
        if any(not g for (_a, g) in per_state):
            continue
        # combo DP over states: aggregate (duties, boxes) with subsumption
        partials = [((), ())]
        for (a, good) in per_state:
            new = []
            for (duties, boxes) in partials:
                for (_lits, dias, box) in good:
                    nd = duties + tuple((a, t) for t in dias)
                    nb = boxes + ((a, box if box is not None else O.LTop),)
                    new.append((nd, nb))
            partials = _prune_partials(new)
            if len(partials) > _PARTIAL_CAP:
                raise ResourceLimitError("too many branch combinations in simulation")
        for (duties, boxes) in partials:
            duties = tuple(sorted(set(duties), key=repr))
            if len(duties) > _DUTY_CAP:
                raise ResourceLimitError("too many diamond obligations in simulation")
            boxmap = dict(boxes)
            free_choice = {}
            for a in alive:
                term = boxmap[a]
                free_choice[a] = O.lattice_min_models(term, term.atoms())
            free = {_type_rel(alive, t)
                    for t in _type_product(alive, free_choice)}
            if len(free) > _FREE_CAP:
                raise ResourceLimitError("too many successor shapes in simulation")
            for partition in _set_partitions(list(duties)):
                block_types = []
                dead = False
                for block in partition:
                    choices = {}
                    for a in alive:
                        term = boxmap[a]
                        for (b_state, d_term) in block:
                            if b_state == a:
                                term = O.land(term, d_term)
                        choices[a] = O.lattice_min_models(term, term.atoms())
                        if not choices[a]:
                            dead = True
                            break
                    if dead:
                        break
                    block_types.append(
                        sorted({_type_rel(alive, t)
                                for t in _type_product(alive, choices)},
                               key=repr))
                if dead:
                    continue
                for picks in itertools.product(*block_types):
                    req = frozenset(picks)
                    rows.append((pi, req, req | free))
                    if len(rows) > _DISJUNCT_CAP:
                        raise ResourceLimitError("row cap exceeded in simulation")
    return _prune_rows(rows)


def _prune_partials(partials):
    """Drop aggregates dominated by one with fewer duties and weaker boxes."""
    canon = []
    seen = set()
    for (duties, boxes) in partials:
        key = (frozenset(duties), boxes)
        if key not in seen:
            seen.add(key)
            canon.append((frozenset(duties), dict(boxes), duties, boxes))
    out = []
    for i, (ds1, bm1, duties1, boxes1) in enumerate(canon):
        dominated = False
        for j, (ds2, bm2, _d2, _b2) in enumerate(canon):
            if i == j:
                continue
            if not (ds2 <= ds1
                    and all(_box_implied(bm2[a], bm1[a]) for a in bm2)):
                continue
            mutual = (ds1 == ds2
                      and all(_box_implied(bm1[a], bm2[a]) for a in bm1))
            if not mutual or j < i:
                dominated = True
                break
        if not dominated:
            out.append((duties1, boxes1))
    return out


def _prune_rows(rows):
    """Drop rows dominated by one with the same letters, fewer required and
    more admissible successor shapes."""
    rows = list(dict.fromkeys(rows))
    out = []
    for i, (pi1, req1, all1) in enumerate(rows):
        dominated = False
        for j, (pi2, req2, all2) in enumerate(rows):
            if i == j or pi1 != pi2:
                continue
            if not (req2 <= req1 and all1 <= all2):
                continue
            mutual = req1 == req2 and all1 == all2
            if not mutual or j < i:
                dominated = True
                break
        if not dominated:
            out.append((pi1, req1, all1))
    return out


def _pair_condition_dpw(odd_left, odd_right):
    """Deterministic parity word automaton over priority pairs accepting
    the streams where both coordinates have even maximal recurring value
    (complemented bad-coordinate Buchi automaton)."""
    states = [("w",)]
    for side, odds in ((0, odd_left), (1, odd_right)):
        for v in odds:
            states.append(("c", side, v, False))
            states.append(("c", side, v, True))
    accepting = frozenset(s for s in states if len(s) == 4 and s[3])

    def step(state, letter):
        out = [] if state[0] == "c" else [("w",)]
        if state[0] == "w":
            for side, odds in ((0, odd_left), (1, odd_right)):
                for v in odds:
                    if letter[side] <= v:
                        out.append(("c", side, v, letter[side] == v))
        else:
            (_, side, v, _hit) = state
            if letter[side] <= v:
                out.append(("c", side, v, letter[side] == v))
        return out

    return DT.DeterminizedParity(DT.NBW(states, [("w",)], accepting, step))


def product_empty(left, right):
    """Emptiness of the intersection of two cover-form automata, as a
    parity game: Exists proposes consistent row pairs and answers cover
    challenges, Forall walks one branch picking challenge members."""
    from . import parity as P
    if not isinstance(left, CoverAutomaton):
        left = to_cover(left)
    if not isinstance(right, CoverAutomaton):
        right = to_cover(right)
    lp = compress_priorities(left.priority)
    rp = compress_priorities(right.priority)
    dpw = _pair_condition_dpw(sorted({v for v in lp.values() if v % 2}),
                              sorted({v for v in rp.values() if v % 2}))

    owner = []
    prio = []
    succ = []
    ids = {}
    todo = []

    def pos(key, own, pr):
        pid = ids.get(key)
        if pid is None:
            pid = len(owner)
            ids[key] = pid
            owner.append(own)
            prio.append(pr)
            succ.append([])
            todo.append(key)
        return pid

    root = pos(("s", left.initial, right.initial, dpw.initial),
               P.EXISTS, 0)
    while todo:
        key = todo.pop()
        pid = ids[key]
        tag = key[0]
        if tag == "s":
            (_, d1, d2, w) = key
            for (pi1, req1, all1) in left.rows[d1]:
                for (pi2, req2, all2) in right.rows[d2]:
                    if not O.pi_consistent(pi1 | pi2):
                        continue
                    succ[pid].append(pos(("d", req1, all1, req2, all2, w),
                                         P.FORALL, 0))
        elif tag == "d":
            (_, req1, all1, req2, all2, w) = key
            for x in sorted(req1):
                succ[pid].append(pos(("r", 0, x, all2, w), P.EXISTS, 0))
            for y in sorted(req2):
                succ[pid].append(pos(("r", 1, y, all1, w), P.EXISTS, 0))
        else:
            (_, side, member, others, w) = key
            for other in sorted(others):
                pair = (member, other) if side == 0 else (other, member)
                w2 = dpw.step(w, (lp[pair[0]], rp[pair[1]]))
                succ[pid].append(pos(("s", pair[0], pair[1], w2),
                                     P.EXISTS, dpw.priority(w2) + 1))
    solution = P.solve(P.ParityGame(owner, prio, succ))
    return root not in solution.win_ex


def complement(init):
    """Disjunctive automaton for the complement language."""
    return simulate(dual(init))


def contained(left, right, complement_cache=None):
    """Language containment of initialized modal automata."""
    l_cover = simulate_cover(left)
    if complement_cache is not None and right in complement_cache:
        r_comp = complement_cache[right]
    else:
        r_comp = simulate_cover(dual(right))
        if complement_cache is not None:
            complement_cache[right] = r_comp
    return product_empty(l_cover, r_comp)


def automata_equiv(left, right, complement_cache=None):
    """Language equivalence of two initialized modal automata."""
    return (contained(left, right, complement_cache)
            and contained(right, left, complement_cache))


# ---------------------------------------------------------------------------
# pipelines and class membership

PIPELINE_STAGES = ("alt", "disj", "M", "W", "D", "B", "C", "F", "A", "U")


def pipeline(xi, stage, p="p"):
    """Composite automaton for a fragment: formula -> alternating ->
    disjunctive -> monotone -> the requested transformation (U skips the
    monotone step; D is applied last in the continuity composite)."""
    if stage not in PIPELINE_STAGES:
        raise ValueError(f"unknown pipeline stage {stage!r}")
    alt = from_formula(xi)
    if stage == "alt":
        return alt
    disj = simulate(alt)
    if stage == "disj":
        return disj
    if stage == "U":
        return transform_U(disj)
    mono = transform_M(disj, p)
    if stage == "M":
        return mono
    if stage == "W":
        return transform_W(mono, p)
    if stage == "B":
        return transform_B(mono, p)
    if stage == "F":
        return transform_F(mono, p)
    if stage == "A":
        return transform_A(mono, p)
    if stage == "D":
        return transform_D(mono, p)
    # continuity: monotone, then finite width, then finite depth
    return transform_D(transform_W(mono, p), p)


def in_class(aut, cls, p):
    """Syntactic class membership: bipartition, one-step grammars and the
    priority constraints."""
    if cls not in ("W", "D", "B", "F", "A", "C"):
        raise ValueError(f"unknown automaton class {cls!r}")
    if aut.bipartition is None:
        return False
    initial, final = aut.bipartition
    # no final state may mention an initial one
    for b in final:
        if aut.state_atoms(b) & initial:
            return False
    for b in final:
        if not O.in_onestep_class(aut.onestep(b), "final", initial, final, p):
            return False
    checks = {"W": ("W",), "D": ("D",), "B": ("B",), "F": ("F",),
              "A": ("A",), "C": ("W", "D")}[cls]
    for a in initial:
        for c in checks:
            if not O.in_onestep_class(aut.onestep(a), c, initial, final, p):
                return False
    if cls in ("D", "C"):
        if any(aut.priority[a] % 2 == 0 for a in initial):
            return False
    return True


# ---------------------------------------------------------------------------
# dumps

def automaton_to_text(init):
    aut = init.automaton if isinstance(init, InitializedAutomaton) else init
    lines = [f"states {len(aut.states)}"]
    if isinstance(init, InitializedAutomaton):
        lines.append(f"initial {init.initial}")
    for a in sorted(aut.states, key=_skey):
        lines.append(f"{a} {aut.priority[a]} {O.onestep_to_text(aut.transitions[a])}")
    return "\n".join(lines)


def automaton_from_text(text):
    lines = [l for l in text.splitlines() if l.strip()]
    if not lines or not lines[0].startswith("states "):
        raise AutomatonError("dump must begin with a 'states n' header")
    n = int(lines[0].split()[1])
    initial = None
    body = lines[1:]
    if body and body[0].startswith("initial "):
        initial = int(body[0].split()[1])
        body = body[1:]
    if len(body) != n:
        raise AutomatonError("dump row count does not match the header")
    transitions = {}
    priority = {}
    states = []
    for line in body:
        head, _, rest = line.partition(" ")
        prio_txt, _, formula_txt = rest.partition(" ")
        a = int(head)
        states.append(a)
        priority[a] = int(prio_txt)
        transitions[a] = O.onestep_from_text(formula_txt, range(n))
    aut = ModalAutomaton(states, transitions, priority)
    if initial is not None:
        return InitializedAutomaton(aut, initial)
    return aut
