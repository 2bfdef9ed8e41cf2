"""Finite Kripke structures, naive fixpoint semantics, bisimulation,
bounded unravelling and small-model enumeration.

States are dense integers 0..n-1; state sets are handled internally as
integer bitmasks, exposed as frozensets.
"""

from __future__ import annotations

import json

from . import syntax
from .syntax import TT, FF, PROP, NPROP, NEG, AND, OR, DIA, BOX, MU, NU


class ModelError(Exception):
    pass


_ENUM_STATE_LIMIT = 5


class KripkeModel:
    """Finite pointed Kripke structure (states, accessibility, valuation)."""

    __slots__ = ("n", "succ", "val", "point")

    def __init__(self, states, edges, valuation, point=None):
        states = sorted(states)
        if states != list(range(len(states))):
            raise ModelError("states must be the dense range 0..n-1")
        self.n = len(states)
        succ = [0] * self.n
        for (u, v) in edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ModelError(f"edge {(u, v)} outside state range")
            succ[u] |= 1 << v
        self.succ = tuple(succ)
        val = {}
        for name, block in valuation.items():
            mask = 0
            for u in block:
                if not 0 <= u < self.n:
                    raise ModelError(f"valuation of {name!r} outside state range")
                mask |= 1 << u
            val[name] = mask
        self.val = val
        if point is not None and not 0 <= point < self.n:
            raise ModelError("point outside state range")
        self.point = point

    # -- public views -------------------------------------------------

    @property
    def states(self):
        return frozenset(range(self.n))

    @property
    def edges(self):
        out = set()
        for u in range(self.n):
            m = self.succ[u]
            while m:
                v = (m & -m).bit_length() - 1
                out.add((u, v))
                m &= m - 1
        return frozenset(out)

    @property
    def valuation(self):
        return {p: _mask_to_set(m) for p, m in self.val.items()}

    def successors(self, u):
        return _mask_to_set(self.succ[u])

    def __eq__(self, other):
        return (isinstance(other, KripkeModel)
                and self.n == other.n and self.succ == other.succ
                and self.val == other.val and self.point == other.point)

    def __hash__(self):
        return hash((self.n, self.succ, tuple(sorted(self.val.items())), self.point))

    def __repr__(self):
        return (f"KripkeModel(n={self.n}, edges={sorted(self.edges)}, "
                f"valuation={{{', '.join(f'{p!r}: {sorted(s)}' for p, s in sorted(self.valuation.items()))}}}, "
                f"point={self.point})")


def _mask_to_set(mask):
    out = set()
    while mask:
        u = (mask & -mask).bit_length() - 1
        out.add(u)
        mask &= mask - 1
    return frozenset(out)


def _set_to_mask(block):
    mask = 0
    for u in block:
        mask |= 1 << u
    return mask


# ---------------------------------------------------------------------------
# valuation surgery (value semantics: inputs untouched)

def set_p(model, p, block):
    """Model with V(p) replaced by block."""
    val = model.valuation
    val[p] = frozenset(block)
    return KripkeModel(range(model.n), model.edges, val, model.point)


def restrict_p(model, p, block):
    """Model with V(p) intersected with block."""
    val = model.valuation
    val[p] = val.get(p, frozenset()) & frozenset(block)
    return KripkeModel(range(model.n), model.edges, val, model.point)


# ---------------------------------------------------------------------------
# naive semantics by Knaster-Tarski iteration

def eval_naive(phi, model):
    """Meaning set of phi in the model, as a frozenset of states.

    Free fixpoint variables must be interpreted by the valuation; mu/nu are
    computed by fixpoint iteration (at most n rounds per binder).
    """
    missing = phi._fv - set(model.val)
    if missing:
        raise ModelError(f"unbound free variables: {sorted(missing)}")
    return _mask_to_set(_eval_mask(phi, model, {}))


def _eval_mask(phi, model, env):
    full = (1 << model.n) - 1
    succ = model.succ
    n = model.n
    memo = {}

    def go(f, env, envkey):
        k = f.kind
        if k == PROP:
            if f.name in env:
                return env[f.name]
            return model.val[f.name]
        if k == NPROP:
            if f.name in env:
                return full & ~env[f.name]
            return full & ~model.val[f.name]
        if k == TT:
            return full
        if k == FF:
            return 0
        key = (id(f), envkey)
        out = memo.get(key)
        if out is not None:
            return out
        if k == NEG:
            out = full & ~go(f.left, env, envkey)
        elif k == AND:
            out = go(f.left, env, envkey) & go(f.right, env, envkey)
        elif k == OR:
            out = go(f.left, env, envkey) | go(f.right, env, envkey)
        elif k == DIA:
            m = go(f.left, env, envkey)
            out = _set_to_mask(u for u in range(n) if succ[u] & m)
        elif k == BOX:
            m = go(f.left, env, envkey)
            out = _set_to_mask(u for u in range(n) if succ[u] & ~m == 0)
        else:  # fixpoints
            cur = 0 if k == MU else full
            x = f.name
            relevant = f.left._fv
            while True:
                env2 = {y: v for y, v in env.items() if y in relevant}
                env2[x] = cur
                key2 = tuple(sorted(env2.items()))
                nxt = go(f.left, env2, key2)
                if nxt == cur:
                    break
                cur = nxt
            out = cur
        memo[key] = out
        return out

    envkey = tuple(sorted(env.items()))
    return go(phi, env, envkey)


def holds(phi, model, state):
    return state in eval_naive(phi, model)


# ---------------------------------------------------------------------------
# bisimulation by greatest-fixpoint refinement

def bisimilar(model_a, s_a, model_b, s_b):
    """True iff the greatest bisimulation relates (model_a, s_a) and (model_b, s_b)."""
    letters = set(model_a.val) | set(model_b.val)

    def profile(model, u):
        return frozenset(p for p in letters
                         if model.val.get(p, 0) >> u & 1)

    pairs = {(u, v)
             for u in range(model_a.n) for v in range(model_b.n)
             if profile(model_a, u) == profile(model_b, v)}
    changed = True
    while changed:
        changed = False
        for (u, v) in list(pairs):
            us = _mask_to_set(model_a.succ[u])
            vs = _mask_to_set(model_b.succ[v])
            forth = all(any((u2, v2) in pairs for v2 in vs) for u2 in us)
            back = all(any((u2, v2) in pairs for u2 in us) for v2 in vs)
            if not (forth and back):
                pairs.discard((u, v))
                changed = True
    return (s_a, s_b) in pairs


# ---------------------------------------------------------------------------
# bounded kappa-expansion

def unravel(model, s, depth, kappa=1):
    """Tree of paths of length <= depth with kappa copies of every step.

    The root is bisimilar to (model, s) up to modal depth `depth`.
    """
    if kappa < 1:
        raise ModelError("kappa must be at least 1")
    if not 0 <= s < model.n:
        raise ModelError("point outside state range")
    nodes = [(s, 0)]  # (underlying state, depth)
    edges = []
    frontier = [0]
    for d in range(depth):
        nxt = []
        for i in frontier:
            (u, _) = nodes[i]
            for _copy in range(kappa):
                m = model.succ[u]
                while m:
                    v = (m & -m).bit_length() - 1
                    m &= m - 1
                    j = len(nodes)
                    nodes.append((v, d + 1))
                    edges.append((i, j))
                    nxt.append(j)
        frontier = nxt
    valuation = {p: [i for i, (u, _) in enumerate(nodes)
                     if model.val.get(p, 0) >> u & 1]
                 for p in model.val}
    return KripkeModel(range(len(nodes)), edges, valuation, 0)


# ---------------------------------------------------------------------------
# exhaustive enumeration of small pointed models

def enumerate_models(max_states, props):
    """All pointed models with 1..max_states states over the given letters."""
    props = sorted(props)
    if max_states > _ENUM_STATE_LIMIT:
        raise ModelError(f"enumeration bound {max_states} exceeds limit {_ENUM_STATE_LIMIT}")
    if max_states * len(props) > 12:
        raise ModelError("valuation space too large to enumerate")
    for n in range(1, max_states + 1):
        full = 1 << n
        for succ in _tuples(full, n):
            edges = [(u, v) for u in range(n) for v in range(n)
                     if succ[u] >> v & 1]
            for vals in _tuples(full, len(props)):
                valuation = {p: _mask_to_set(vals[i]) for i, p in enumerate(props)}
                for point in range(n):
                    yield KripkeModel(range(n), edges, valuation, point)


def _tuples(limit, length):
    if length == 0:
        yield ()
        return
    for rest in _tuples(limit, length - 1):
        for m in range(limit):
            yield rest + (m,)


# ---------------------------------------------------------------------------
# JSON model files

def model_to_json(model):
    """Canonical JSON text: states, edges, valuation, point (sorted)."""
    doc = {
        "states": list(range(model.n)),
        "edges": [list(e) for e in sorted(model.edges)],
        "valuation": {p: sorted(s) for p, s in sorted(model.valuation.items())},
        "point": model.point,
    }
    return json.dumps(doc)


def model_from_json(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelError(f"invalid model JSON: {e}") from None
    for key in ("states", "edges", "valuation"):
        if key not in doc:
            raise ModelError(f"model JSON lacks {key!r}")
    return KripkeModel(doc["states"], [tuple(e) for e in doc["edges"]],
                       doc["valuation"], doc.get("point"))
