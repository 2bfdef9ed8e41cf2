"""Reductions of semantic questions to parity games: the evaluation game
for formulas, the acceptance game for modal automata (with a local one-step
gadget instead of explicit marking moves), and the model-checking entry
points.
"""

from __future__ import annotations

from . import onestep as O
from . import parity as P
from . import syntax as S
from .models import ModelError
from .parity import EXISTS, FORALL
from .syntax import TT, FF, PROP, NPROP, AND, OR, DIA, BOX, MU, NU


class GameBuildError(Exception):
    pass


class _Arena:
    """Incremental parity game builder keyed by hashable position labels."""

    def __init__(self):
        self.ids = {}
        self.owner = []
        self.prio = []
        self.succ = []
        self.label = []

    def position(self, key, owner, prio):
        pid = self.ids.get(key)
        if pid is None:
            pid = len(self.owner)
            self.ids[key] = pid
            self.owner.append(owner)
            self.prio.append(prio)
            self.succ.append([])
            self.label.append(key)
        return pid

    def edge(self, u, v):
        self.succ[u].append(v)

    def game(self):
        return P.ParityGame(self.owner, self.prio, self.succ)


# ---------------------------------------------------------------------------
# the evaluation game

def evaluation_game(xi, model):
    """Evaluation game for a well-named NNF formula on a finite model.

    Positions are (occurrence path, state); unfolding positions carry the
    variable's priority, all others zero.  Returns (game, position map).
    """
    if not S.is_nnf(xi) or not S.is_consistently_named(xi):
        raise GameBuildError("evaluation game needs a consistently named NNF formula")
    missing = xi._fv - set(model.val)
    if missing:
        raise ModelError(f"unbound free variables: {sorted(missing)}")
    bm = S.binder_map(xi)
    bpaths = S.binder_paths(xi)
    prio = S.priorities(xi)
    occ = {path: f for path, f in S.occurrences(xi)}

    arena = _Arena()
    todo = []

    def pos(path, s):
        f = occ[path]
        k = f.kind
        if k == PROP and f.name in bm:
            owner, pr = EXISTS, prio[f.name]
        elif k == PROP or k == NPROP:
            positive = (k == PROP)
            true_here = bool(model.val[f.name] >> s & 1)
            owner = FORALL if (true_here == positive) else EXISTS
            pr = 0
        elif k == TT:
            owner, pr = FORALL, 0
        elif k == FF:
            owner, pr = EXISTS, 0
        elif k == OR or k == DIA:
            owner, pr = EXISTS, 0
        elif k == AND or k == BOX:
            owner, pr = FORALL, 0
        elif k in (MU, NU):
            owner, pr = EXISTS, 0
        else:
            raise GameBuildError(f"unexpected formula kind {k!r}")
        key = (path, s)
        known = key in arena.ids
        pid = arena.position(key, owner, pr)
        if not known:
            todo.append(key)
        return pid

    root = pos((), model.point if model.point is not None else 0)
    for s in range(model.n):
        pos((), s)
    while todo:
        (path, s) = todo.pop()
        pid = arena.ids[(path, s)]
        f = occ[path]
        k = f.kind
        if k == PROP and f.name in bm:
            arena.edge(pid, pos(bpaths[f.name] + (0,), s))
        elif k in (TT, FF, PROP, NPROP):
            pass
        elif k in (AND, OR):
            arena.edge(pid, pos(path + (0,), s))
            arena.edge(pid, pos(path + (1,), s))
        elif k in (DIA, BOX):
            m = model.succ[s]
            while m:
                t = (m & -m).bit_length() - 1
                m &= m - 1
                arena.edge(pid, pos(path + (0,), t))
        else:  # binder
            arena.edge(pid, pos(path + (0,), s))
    return arena.game(), arena.ids


def model_check(xi, model, state):
    """Game-based model checking: solve the evaluation game and test
    whether Exists wins the root position."""
    xi = S.ensure_names(S.to_nnf(xi))
    game, ids = evaluation_game(xi, model)
    solution = P.solve(game)
    return ids[((), state)] in solution.win_ex


# ---------------------------------------------------------------------------
# the acceptance game (one-step gadget)

def acceptance_game(automaton, model):
    """Acceptance parity game with the marking move replaced by a local
    gadget over the one-step formula; basic positions are ('b', a, s).

    Returns (game, position map)."""
    if automaton.generalized:
        raise GameBuildError("acceptance game needs a non-generalized automaton")
    arena = _Arena()
    todo = []

    theta = {a: _expanded(automaton.transitions[a]) for a in automaton.states}

    def basic(a, s):
        key = ("b", a, s)
        known = key in arena.ids
        pid = arena.position(key, EXISTS, automaton.priority[a])
        if not known:
            todo.append(key)
        return pid

    def formula_pos(a, node, s):
        key = ("f", a, id(node), s)
        k = node.kind
        if k == O.OTOP:
            owner = FORALL
        elif k == O.OBOT:
            owner = EXISTS
        elif k == O.OPOS:
            owner = FORALL if model.val.get(node.name, 0) >> s & 1 else EXISTS
        elif k == O.ONEG:
            owner = EXISTS if model.val.get(node.name, 0) >> s & 1 else FORALL
        elif k in (O.OAND, O.OBOX):
            owner = FORALL
        else:
            owner = EXISTS
        known = key in arena.ids
        pid = arena.position(key, owner, 0)
        if not known:
            todo.append((key, node))
        return pid

    def term_pos(a, term, s):
        key = ("l", a, id(term), s)
        k = term.kind
        if k == O.LTOP:
            owner = FORALL
        elif k == O.LBOT:
            owner = EXISTS
        elif k == O.LAND:
            owner = FORALL
        elif k == O.LOR:
            owner = EXISTS
        else:
            owner = EXISTS  # atom: single move
        known = key in arena.ids
        pid = arena.position(key, owner, 0)
        if not known:
            todo.append((key, term))
        return pid

    for a in automaton.states:
        for s in range(model.n):
            basic(a, s)
    while todo:
        item = todo.pop()
        if isinstance(item, tuple) and item and item[0] == "b":
            (_, a, s) = item
            pid = arena.ids[item]
            arena.edge(pid, formula_pos(a, theta[a], s))
            continue
        (key, node) = item
        pid = arena.ids[key]
        (tag, a, _nid, s) = key
        if tag == "f":
            k = node.kind
            if k in (O.OAND, O.OOR):
                arena.edge(pid, formula_pos(a, node.left, s))
                arena.edge(pid, formula_pos(a, node.right, s))
            elif k in (O.ODIA, O.OBOX):
                m = model.succ[s]
                while m:
                    t = (m & -m).bit_length() - 1
                    m &= m - 1
                    arena.edge(pid, term_pos(a, node.term, t))
        else:
            k = node.kind
            if k in (O.LAND, O.LOR):
                arena.edge(pid, term_pos(a, node.left, s))
                arena.edge(pid, term_pos(a, node.right, s))
            elif k == O.LATOM:
                arena.edge(pid, basic(node.atom, s))
    return arena.game(), arena.ids


def _expanded(theta):
    if isinstance(theta, O.DisjunctiveOneStep):
        return theta.to_onestep()
    return theta


def accepts(initialized, model, state):
    """Does the initialized automaton accept the pointed model?"""
    aut = initialized.automaton
    game, ids = acceptance_game(aut, model)
    solution = P.solve(game)
    return ids[("b", initialized.initial, state)] in solution.win_ex


# ---------------------------------------------------------------------------
# explicit-marking acceptance game (reference for the gadget; small inputs)

def acceptance_game_markings(automaton, model, singleton_only=False):
    """The acceptance game with explicit marking moves, for cross-checking
    the gadget construction.  Optionally restrict Exists to markings that
    assign at most one automaton state per successor."""
    if automaton.generalized:
        raise GameBuildError("acceptance game needs a non-generalized automaton")
    states = automaton.states
    value_sets = [frozenset(v) for v in _subsets_list(states)]
    if singleton_only:
        value_sets = [v for v in value_sets if len(v) <= 1]
    arena = _Arena()

    def letters_at(s):
        return frozenset(p for p, mask in model.val.items() if mask >> s & 1)

    basics = {}
    for a in states:
        for s in range(model.n):
            basics[(a, s)] = arena.position(("b", a, s), EXISTS,
                                            automaton.priority[a])
    markings = {}
    for s in range(model.n):
        succ = sorted(_bits(model.succ[s]))
        for combo in _product(value_sets, len(succ)):
            m = tuple(zip(succ, combo))
            markings[(s, m)] = None
    for (s, m) in markings:
        markings[(s, m)] = arena.position(("m", s, m), FORALL, 0)
    for a in states:
        theta = automaton.transitions[a]
        for s in range(model.n):
            succ = sorted(_bits(model.succ[s]))
            for combo in _product(value_sets, len(succ)):
                m = tuple(zip(succ, combo))
                osm = O.OneStepModel(letters_at(s), tuple(succ),
                                     {t: v for (t, v) in m})
                if O.sat1(osm, theta):
                    arena.edge(basics[(a, s)], markings[(s, m)])
    for (s, m), pid in markings.items():
        for (t, block) in m:
            for b in sorted(block, key=repr):
                arena.edge(pid, basics[(b, t)])
    return arena.game(), arena.ids


def _bits(mask):
    while mask:
        yield (mask & -mask).bit_length() - 1
        mask &= mask - 1


def _subsets_list(items):
    items = sorted(items, key=repr)
    for mask in range(1 << len(items)):
        yield [x for i, x in enumerate(items) if mask >> i & 1]


def _product(pool, repeat):
    if repeat == 0:
        yield ()
        return
    for rest in _product(pool, repeat - 1):
        for x in pool:
            yield rest + (x,)


def accepts_markings(initialized, model, state, singleton_only=False):
    aut = initialized.automaton
    game, ids = acceptance_game_markings(aut, model, singleton_only)
    solution = P.solve(game)
    return ids[("b", initialized.initial, state)] in solution.win_ex
