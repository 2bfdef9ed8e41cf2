"""Determinization of nondeterministic Buchi word automata into
deterministic parity word automata via compact Safra trees.

The deterministic automaton is explored lazily: the alphabet never has to
be materialized (the callers feed transition-relation letters on demand).

Priority convention (max-parity, even accepts): every transition yields an
event; the smallest tree-node name that was completed ("green", its label
became the union of its children) or removed decides.  With N a bound on
node names, a green at name e gives priority 2*(N - e) + 2, a removal at
name f gives 2*(N - f) + 3, and an uneventful step gives 1.  A word is
accepted iff the maximum priority seen infinitely often is even, which
holds iff some eventually-stable node turns green infinitely often, i.e.
iff the Buchi automaton accepts.
"""

from __future__ import annotations


class NBW:
    """Nondeterministic Buchi automaton with a functional transition map."""

    def __init__(self, states, initial, accepting, step):
        self.states = tuple(states)
        self.initial = frozenset(initial)
        self.accepting = frozenset(accepting)
        self.step = step  # (state, letter) -> iterable of states

    def post(self, block, letter):
        out = set()
        for q in block:
            out.update(self.step(q, letter))
        return frozenset(out)


# a Safra tree is () for the empty tree or a node (name, label, children)

def _tree_names(node):
    yield node[0]
    for c in node[2]:
        yield from _tree_names(c)


class DeterminizedParity:
    """Lazy deterministic parity automaton equivalent to an NBW.

    States are (tree, priority) pairs; `priority(q)` is the priority of the
    transition that entered q (max-parity, even accepts).
    """

    def __init__(self, nbw):
        self.nbw = nbw
        self.name_bound = len(nbw.states) + 1
        if nbw.initial:
            tree = (1, nbw.initial, ())
        else:
            tree = ()
        self.initial = (tree, 1)
        self._cache = {}

    def priority(self, state):
        return state[1]

    def max_priority(self):
        return 2 * self.name_bound + 3

    def step(self, state, letter):
        key = (state[0], letter)
        out = self._cache.get(key)
        if out is None:
            out = self._step_tree(state[0], letter)
            self._cache[key] = out
        return out

    def _step_tree(self, tree, letter):
        if tree == ():
            return ((), 1)
        nbw = self.nbw
        fresh = [max(_tree_names(tree)) + 1]
        old_names = frozenset(_tree_names(tree))

        def relabel_spawn(node):
            name, label, children = node
            label = nbw.post(label, letter)
            children = tuple(relabel_spawn(c) for c in children)
            hit = label & nbw.accepting
            if hit:
                children = children + ((fresh[0], hit, ()),)
                fresh[0] += 1
            return (name, label, children)

        t = relabel_spawn(tree)

        # horizontal: each state survives only in the oldest sibling subtree
        def sanitize(node, allowed):
            name, label, children = node
            label = label & allowed
            taken = frozenset()
            out = []
            for c in children:
                c2 = sanitize(c, label - taken)
                taken |= c2[1]
                out.append(c2)
            return (name, label, tuple(out))

        t = sanitize(t, frozenset(nbw.states))

        # remove empty nodes (a removed old name is a "kill" event)
        removed = []

        def prune(node):
            name, label, children = node
            if not label:
                removed.extend(n for n in _tree_names(node) if n in old_names)
                return None
            out = tuple(c2 for c2 in (prune(c) for c in children) if c2 is not None)
            return (name, label, out)

        t = prune(t)

        # vertical merge, top down: completed nodes go green and lose
        # their descendants
        greens = []

        def merge(node):
            name, label, children = node
            union = frozenset()
            for c in children:
                union |= c[1]
            if children and union == label:
                greens.append(name)
                removed.extend(n for c in children for n in _tree_names(c)
                               if n in old_names)
                return (name, label, ())
            return (name, label, tuple(merge(c) for c in children))

        if t is not None:
            t = merge(t)

        # event priority (before renaming)
        e = min(greens) if greens else None
        f = min(removed) if removed else None
        nb = self.name_bound
        if e is not None and (f is None or e < f):
            prio = 2 * (nb - e) + 2
        elif f is not None:
            prio = 2 * (nb - f) + 3
        else:
            prio = 1

        if t is None:
            return ((), prio)

        # order-preserving renaming onto 1..k
        survivors = sorted(_tree_names(t))
        renaming = {n: i + 1 for i, n in enumerate(survivors)}

        def rename(node):
            name, label, children = node
            return (renaming[name], label, tuple(rename(c) for c in children))

        return (rename(t), prio)


# ---------------------------------------------------------------------------
# reference semantics on ultimately periodic words (used by the tests)

def nbw_accepts_lasso(nbw, prefix, loop):
    """Does the NBW accept prefix * loop^omega?"""
    block = nbw.initial
    for a in prefix:
        block = nbw.post(block, a)
    # graph over (state, loop position)
    nodes = set()
    edges = {}
    todo = [(q, 0) for q in block]
    nodes.update(todo)
    while todo:
        (q, i) = todo.pop()
        nxt = [(q2, (i + 1) % len(loop)) for q2 in nbw.step(q, loop[i])]
        edges[(q, i)] = nxt
        for v in nxt:
            if v not in nodes:
                nodes.add(v)
                todo.append(v)
    # accepting lasso: reachable cycle through an accepting state
    for scc in _sccs(edges, nodes):
        has_acc = any(q in nbw.accepting for (q, _i) in scc)
        if not has_acc:
            continue
        if len(scc) > 1:
            return True
        (v,) = scc
        if v in edges.get(v, ()):
            return True
    return False


def dpw_accepts_lasso(dpw, prefix, loop):
    """Run the deterministic automaton on prefix * loop^omega and evaluate
    the parity condition on the final cycle."""
    q = dpw.initial
    for a in prefix:
        q = dpw.step(q, a)
    seen = {}
    trace = []
    pos = 0
    while (q, pos) not in seen:
        seen[(q, pos)] = len(trace)
        trace.append(q)
        q = dpw.step(q, loop[pos])
        pos = (pos + 1) % len(loop)
    start = seen[(q, pos)]
    cycle = trace[start:]
    return max(dpw.priority(s) for s in cycle) % 2 == 0


def _sccs(edges, nodes):
    index = {}
    low = {}
    onstack = {}
    stack = []
    sccs = []
    counter = [0]
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(edges.get(root, ())))]
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
                    work.append((v, iter(edges.get(v, ()))))
                    advanced = True
                    break
                elif onstack.get(v):
                    low[u] = min(low[u], index[v])
            if not advanced:
                work.pop()
                if work:
                    low[work[-1][0]] = min(low[work[-1][0]], low[u])
                if low[u] == index[u]:
                    comp = set()
                    while True:
                        w = stack.pop()
                        onstack[w] = False
                        comp.add(w)
                        if w == u:
                            break
                    sccs.append(comp)
    return sccs
