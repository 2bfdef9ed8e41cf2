"""Parity games: arenas, the Zielonka solver with positional strategies,
and a brute-force reference solver for small games.

Convention: max-parity, player Exists wins an infinite play iff the maximum
priority occurring infinitely often is even.  A player stuck at a position
loses there.
"""

from __future__ import annotations

EXISTS = 0
FORALL = 1


class GameError(Exception):
    pass


class ParityGame:
    """Arena with positions 0..n-1, an owner and priority per position and
    an explicit successor list."""

    __slots__ = ("n", "owner", "prio", "succ", "_pred")

    def __init__(self, owner, prio, succ):
        self.n = len(owner)
        if len(prio) != self.n or len(succ) != self.n:
            raise GameError("owner, priority and successor arrays must agree")
        self.owner = tuple(owner)
        self.prio = tuple(prio)
        self.succ = tuple(tuple(s) for s in succ)
        for edges in self.succ:
            for v in edges:
                if not 0 <= v < self.n:
                    raise GameError("successor outside the arena")
        self._pred = None

    def predecessors(self):
        if self._pred is None:
            pred = [[] for _ in range(self.n)]
            for u in range(self.n):
                for v in self.succ[u]:
                    pred[v].append(u)
            self._pred = tuple(tuple(p) for p in pred)
        return self._pred

    def dump(self):
        """One line per position: id owner priority succ,succ,..."""
        lines = []
        for u in range(self.n):
            owner = "E" if self.owner[u] == EXISTS else "A"
            lines.append(f"{u} {owner} {self.prio[u]} "
                         + ",".join(str(v) for v in self.succ[u]))
        return "\n".join(lines)


class Solution:
    __slots__ = ("win_ex", "win_fa", "strategy_ex", "strategy_fa")

    def __init__(self, win_ex, win_fa, strategy_ex, strategy_fa):
        self.win_ex = frozenset(win_ex)
        self.win_fa = frozenset(win_fa)
        self.strategy_ex = dict(strategy_ex)
        self.strategy_fa = dict(strategy_fa)

    def winner(self, u):
        return EXISTS if u in self.win_ex else FORALL


def dual_game(game):
    """Swap owners and shift priorities by one: winners swap."""
    return ParityGame([1 - o for o in game.owner],
                      [p + 1 for p in game.prio], game.succ)


# ---------------------------------------------------------------------------
# Zielonka's algorithm (positions handled as int bitmasks)

def _attractor(game, player, target, region):
    """Attractor of target within region, with the attracting strategy.

    Layered backward BFS; the strategy for player-owned positions picks the
    smallest successor in the previous layers (deterministic).
    """
    pred = game.predecessors()
    succ = game.succ
    owner = game.owner
    attr = target & region
    strategy = {}
    frontier = _mask_bits(attr)
    while frontier:
        nxt = []
        for v in frontier:
            for u in pred[v]:
                bit = 1 << u
                if not (region & bit) or (attr & bit):
                    continue
                if owner[u] == player:
                    strategy[u] = min(w for w in succ[u] if attr >> w & 1)
                    attr |= bit
                    nxt.append(u)
                else:
                    if all((attr >> w & 1) or not (region >> w & 1)
                           for w in succ[u]):
                        attr |= bit
                        nxt.append(u)
        frontier = sorted(nxt)
    return attr, strategy


def _mask_bits(mask):
    out = []
    while mask:
        out.append((mask & -mask).bit_length() - 1)
        mask &= mask - 1
    return out


def solve(game):
    """Exact winning regions and positional winning strategies (Zielonka)."""
    n = game.n
    full = (1 << n) - 1
    owner = game.owner
    succ = game.succ

    strategy = ({}, {})  # indexed by player
    win = [0, 0]

    # dead ends are lost by their owner; peel attractors to them first
    region = full
    dead = [0, 0]
    for u in range(n):
        if not succ[u]:
            dead[owner[u]] |= 1 << u
    for player in (EXISTS, FORALL):
        opponent = 1 - player
        attr, strat = _attractor(game, player, dead[opponent], region)
        win[player] |= attr
        strategy[player].update(strat)
        region &= ~attr
    # the other player's dead ends inside the removed part never got won by
    # their opponent's attractor; iterate until no dead end remains in region
    changed = True
    while changed:
        changed = False
        for player in (EXISTS, FORALL):
            opponent = 1 - player
            base = dead[opponent] & region
            if base:
                attr, strat = _attractor(game, player, base, region)
                win[player] |= attr
                strategy[player].update(strat)
                region &= ~attr
                changed = True

    wex, wfa, sex, sfa = _zielonka(game, region)
    win[EXISTS] |= wex
    win[FORALL] |= wfa
    strategy[EXISTS].update(sex)
    strategy[FORALL].update(sfa)
    return Solution(_mask_bits(win[EXISTS]), _mask_bits(win[FORALL]),
                    strategy[EXISTS], strategy[FORALL])


def _zielonka(game, region):
    """Classic recursion; every position in region has a successor in region."""
    if not region:
        return 0, 0, {}, {}
    prio = game.prio
    owner = game.owner
    succ = game.succ
    d = max(prio[u] for u in _mask_bits(region))
    player = EXISTS if d % 2 == 0 else FORALL
    opponent = 1 - player

    top = 0
    for u in _mask_bits(region):
        if prio[u] == d:
            top |= 1 << u
    attr, attr_strat = _attractor(game, player, top, region)
    wex, wfa, sex, sfa = _zielonka(game, region & ~attr)
    sub_win = (wex, wfa)
    sub_strat = (sex, sfa)
    if not sub_win[opponent]:
        # player wins everywhere in region
        strat = dict(sub_strat[player])
        strat.update(attr_strat)
        for u in _mask_bits(top):
            if owner[u] == player and u not in strat:
                strat[u] = min(v for v in succ[u] if region >> v & 1)
        other = dict(sub_strat[opponent])
        wins = [0, 0]
        wins[player] = region
        strats = [None, None]
        strats[player] = strat
        strats[opponent] = other
        return wins[EXISTS], wins[FORALL], strats[EXISTS], strats[FORALL]

    battr, battr_strat = _attractor(game, opponent, sub_win[opponent], region)
    wex2, wfa2, sex2, sfa2 = _zielonka(game, region & ~battr)
    win2 = (wex2, wfa2)
    strat2 = (sex2, sfa2)
    wins = [0, 0]
    wins[player] = win2[player]
    wins[opponent] = win2[opponent] | battr
    opp_strat = dict(strat2[opponent])
    opp_strat.update(battr_strat)
    opp_strat.update(sub_strat[opponent])
    strats = [None, None]
    strats[player] = strat2[player]
    strats[opponent] = opp_strat
    return wins[EXISTS], wins[FORALL], strats[EXISTS], strats[FORALL]


# ---------------------------------------------------------------------------
# brute force reference

_BRUTE_LIMIT = 10


def solve_bruteforce(game):
    """Reference solver: enumerate positional strategies of each player and
    analyse the induced graphs.  Only for small games."""
    if game.n > _BRUTE_LIMIT:
        raise GameError(f"brute force limited to {_BRUTE_LIMIT} positions")
    win_ex, strat_ex = _brute_player(game, EXISTS)
    win_fa, strat_fa = _brute_player(game, FORALL)
    if win_ex & win_fa or (win_ex | win_fa) != frozenset(range(game.n)):
        raise GameError("brute force violated determinacy")  # pragma: no cover
    return Solution(win_ex, win_fa, strat_ex, strat_fa)


def _strategies(game, player):
    owned = [u for u in range(game.n)
             if game.owner[u] == player and game.succ[u]]

    def go(i, acc):
        if i == len(owned):
            yield dict(acc)
            return
        u = owned[i]
        for v in game.succ[u]:
            acc[u] = v
            yield from go(i + 1, acc)
        del acc[u]

    yield from go(0, {})


def _brute_player(game, player):
    won = set()
    for sigma in _strategies(game, player):
        won.update(_winning_set(game, player, sigma))
    # positional determinacy: some single strategy wins on the whole region
    for sigma in _strategies(game, player):
        if won <= set(_winning_set(game, player, sigma)):
            witness = {u: v for u, v in sigma.items() if u in won}
            return frozenset(won), witness
    raise GameError("no uniform positional strategy found")  # pragma: no cover


def _winning_set(game, player, sigma):
    """Positions from which every sigma-conforming play is won by player."""
    n = game.n
    induced = []
    for u in range(n):
        if game.owner[u] == player:
            induced.append((sigma[u],) if u in sigma else ())
        else:
            induced.append(game.succ[u])
    good = []
    for start in range(n):
        reach = _reachable(induced, start)
        ok = True
        for u in reach:
            if not induced[u] and game.owner[u] == player:
                ok = False
                break
        if ok and _has_bad_cycle(game, induced, reach, player):
            ok = False
        if ok:
            good.append(start)
    return good


def _reachable(induced, start):
    seen = {start}
    todo = [start]
    while todo:
        u = todo.pop()
        for v in induced[u]:
            if v not in seen:
                seen.add(v)
                todo.append(v)
    return seen


def _has_bad_cycle(game, induced, nodes, player):
    """A cycle whose maximum priority has the opponent's parity."""
    bad_parity = 1 if player == EXISTS else 0
    values = sorted({game.prio[u] for u in nodes if game.prio[u] % 2 == bad_parity})
    for v in values:
        sub = {u for u in nodes if game.prio[u] <= v}
        peak = {u for u in sub if game.prio[u] == v}
        if _cycle_through(induced, sub, peak):
            return True
    return False


def _cycle_through(induced, sub, peak):
    for scc in _sccs(induced, sub):
        if not (scc & peak):
            continue
        if len(scc) > 1:
            return True
        (u,) = scc
        if u in induced[u]:
            return True
    return False


def _sccs(induced, nodes):
    """Tarjan over the subgraph on nodes (iterative)."""
    index = {}
    low = {}
    onstack = {}
    stack = []
    sccs = []
    counter = [0]

    def strongconnect(root):
        work = [(root, iter([v for v in induced[root] if v in nodes]))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        onstack[root] = True
        while work:
            u, it = work[-1]
            advanced = False
            for v in it:
                if v not in index:
                    index[v] = low[v] = counter[0]
                    counter[0] += 1
                    stack.append(v)
                    onstack[v] = True
                    work.append((v, iter([w for w in induced[v] if w in nodes])))
                    advanced = True
                    break
                elif onstack.get(v):
                    low[u] = min(low[u], index[v])
            if not advanced:
                work.pop()
                if work:
                    pu = work[-1][0]
                    low[pu] = min(low[pu], low[u])
                if low[u] == index[u]:
                    comp = set()
                    while True:
                        w = stack.pop()
                        onstack[w] = False
                        comp.add(w)
                        if w == u:
                            break
                    sccs.append(comp)

    for u in nodes:
        if u not in index:
            strongconnect(u)
    return sccs


# ---------------------------------------------------------------------------
# strategy verification

def verify_strategy(game, player, strategy, region):
    """True iff every strategy-conforming play starting in region is won."""
    for u, v in strategy.items():
        if v not in game.succ[u]:
            raise GameError(f"strategy selects non-edge {u} -> {v}")
    induced = []
    for u in range(game.n):
        if game.owner[u] == player:
            if u in strategy:
                induced.append((strategy[u],))
            else:
                induced.append(tuple(game.succ[u]))
        else:
            induced.append(tuple(game.succ[u]))
    reach = set()
    for start in region:
        reach |= _reachable(induced, start)
    for u in reach:
        if game.owner[u] == player and not induced[u]:
            return False
    return not _has_bad_cycle(game, induced, reach, player)
