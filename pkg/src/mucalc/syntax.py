"""Modal mu-calculus syntax: AST, parser, normal forms and fragment grammars.

Formulas are immutable and hash-consed: structurally equal formulas are the
same object, so identity comparison and id()-keyed caches are sound.
"""

from __future__ import annotations


class FormulaError(Exception):
    pass


class ParseError(FormulaError):
    def __init__(self, message, pos):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


class NegativeBoundVariable(FormulaError):
    """A binder eta x.phi where x occurs under an odd number of negations."""


# node kinds
TT, FF, PROP, NPROP, NEG, AND, OR, DIA, BOX, MU, NU = (
    "tt", "ff", "prop", "nprop", "neg", "and", "or", "dia", "box", "mu", "nu")

_BINDERS = (MU, NU)
_INTERN = {}


class Formula:
    """One interned AST node; use the module-level constructors to build."""

    __slots__ = ("kind", "name", "left", "right", "_fv", "_pos", "_neg", "_hash")

    def __init__(self, kind, name, left, right):
        self.kind = kind
        self.name = name
        self.left = left
        self.right = right
        fv = pos = neg = frozenset()
        if kind in (PROP, NPROP):
            fv = frozenset((name,))
            if kind == PROP:
                pos = fv
            else:
                neg = fv
        elif kind == NEG:
            fv, pos, neg = left._fv, left._neg, left._pos
        elif kind in (AND, OR):
            fv = left._fv | right._fv
            pos = left._pos | right._pos
            neg = left._neg | right._neg
        elif kind in (DIA, BOX):
            fv, pos, neg = left._fv, left._pos, left._neg
        elif kind in _BINDERS:
            fv = left._fv - {name}
            pos = left._pos - {name}
            neg = left._neg - {name}
        self._fv = fv
        self._pos = pos
        self._neg = neg
        self._hash = hash((kind, name, id(left), id(right)))

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Formula({to_string(self)!r})"

    def __str__(self):
        return to_string(self)

    @property
    def children(self):
        if self.right is not None:
            return (self.left, self.right)
        if self.left is not None:
            return (self.left,)
        return ()


def _mk(kind, name=None, left=None, right=None):
    key = (kind, name, id(left), id(right))
    node = _INTERN.get(key)
    if node is None:
        node = Formula(kind, name, left, right)
        _INTERN[key] = node
    return node


Top = _mk(TT)
Bot = _mk(FF)


def top():
    return Top


def bot():
    return Bot


def prop(name):
    return _mk(PROP, name)


def nprop(name):
    return _mk(NPROP, name)


def neg(phi):
    return _mk(NEG, left=phi)


def conj(phi, psi):
    return _mk(AND, left=phi, right=psi)


def disj(phi, psi):
    return _mk(OR, left=phi, right=psi)


def dia(phi):
    return _mk(DIA, left=phi)


def box(phi):
    return _mk(BOX, left=phi)


def mu(x, phi):
    if x in phi._neg:
        raise NegativeBoundVariable(f"variable {x!r} occurs negatively in mu-binder body")
    return _mk(MU, name=x, left=phi)


def nu(x, phi):
    if x in phi._neg:
        raise NegativeBoundVariable(f"variable {x!r} occurs negatively in nu-binder body")
    return _mk(NU, name=x, left=phi)


def free_vars(phi):
    """Free variables/proposition letters of phi (one namespace)."""
    return phi._fv


def bound_vars(phi):
    out = set()
    stack = [phi]
    seen = set()
    while stack:
        f = stack.pop()
        if id(f) in seen:
            continue
        seen.add(id(f))
        if f.kind in _BINDERS:
            out.add(f.name)
        stack.extend(f.children)
    return frozenset(out)


def all_names(phi):
    out = set()
    stack = [phi]
    seen = set()
    while stack:
        f = stack.pop()
        if id(f) in seen:
            continue
        seen.add(id(f))
        if f.kind in (PROP, NPROP):
            out.add(f.name)
        elif f.kind in _BINDERS:
            out.add(f.name)
        stack.extend(f.children)
    return out


_SUBFORMULAS_CACHE = {}


def subformulas(phi):
    """All distinct subformulas of phi (the DAG nodes)."""
    cached = _SUBFORMULAS_CACHE.get(phi)
    if cached is not None:
        return cached
    seen = {}
    stack = [phi]
    while stack:
        f = stack.pop()
        if id(f) in seen:
            continue
        seen[id(f)] = f
        stack.extend(f.children)
    out = list(seen.values())
    _SUBFORMULAS_CACHE[phi] = out
    return out


def size(phi):
    """Number of distinct subformulas."""
    return len(subformulas(phi))


def modal_depth(phi):
    k = phi.kind
    if k in (TT, FF, PROP, NPROP):
        return 0
    d = max(modal_depth(c) for c in phi.children)
    if k in (DIA, BOX):
        d += 1
    return d


def subformula_at(phi, path):
    """Resolve an occurrence path (tuple of child indices) inside phi."""
    node = phi
    for i in path:
        cs = node.children
        if i >= len(cs):
            raise FormulaError(f"invalid subformula path {path!r}")
        node = cs[i]
    return node


def occurrences(phi):
    """Iterate (path, subformula) over all occurrences, preorder."""
    stack = [((), phi)]
    while stack:
        path, f = stack.pop()
        yield path, f
        for i, c in enumerate(f.children):
            stack.append((path + (i,), c))


# ---------------------------------------------------------------------------
# concrete syntax

_KEYWORDS = {"tt", "ff", "mu", "nu"}


def _tokenize(text):
    toks = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c in " \t\r\n":
            i += 1
            continue
        if c == "<" and text[i:i + 2] == "<>":
            toks.append(("dia", "<>", i)); i += 2
        elif c == "[" and text[i:i + 2] == "[]":
            toks.append(("box", "[]", i)); i += 2
        elif c in "!&|().":
            toks.append((c, c, i)); i += 1
        elif c.isalpha() and c.islower():
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            toks.append((word if word in _KEYWORDS else "id", word, i))
            i = j
        else:
            raise ParseError(f"unexpected character {c!r}", i)
    toks.append(("eof", "", n))
    return toks


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i][0]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind):
        t = self.next()
        if t[0] != kind:
            raise ParseError(f"expected {kind!r}, found {t[1]!r}", t[2])
        return t

    def formula(self):
        lhs = self.conjunct()
        while self.peek() == "|":
            self.next()
            lhs = disj(lhs, self.conjunct())
        return lhs

    def conjunct(self):
        lhs = self.unary()
        while self.peek() == "&":
            self.next()
            lhs = conj(lhs, self.unary())
        return lhs

    def unary(self):
        k, _, pos = self.toks[self.i]
        if k == "!":
            self.next()
            return neg(self.unary())
        if k == "dia":
            self.next()
            return dia(self.unary())
        if k == "box":
            self.next()
            return box(self.unary())
        if k in ("mu", "nu"):
            self.next()
            var = self.expect("id")[1]
            self.expect(".")
            body = self.formula()  # dot has maximal scope
            try:
                return mu(var, body) if k == "mu" else nu(var, body)
            except NegativeBoundVariable as e:
                raise ParseError(str(e), pos) from None
        return self.atom()

    def atom(self):
        k, word, pos = self.next()
        if k == "tt":
            return Top
        if k == "ff":
            return Bot
        if k == "id":
            return prop(word)
        if k == "(":
            f = self.formula()
            self.expect(")")
            return f
        raise ParseError(f"unexpected token {word!r}", pos)


def parse(text):
    """Parse concrete syntax: tt ff ! & | <> [] mu nu, dot with maximal scope."""
    p = _Parser(text)
    f = p.formula()
    p.expect("eof")
    return f


_PREC = {OR: 1, AND: 2}


def to_string(phi):
    def go(f, ctx):
        k = f.kind
        if k == TT:
            return "tt"
        if k == FF:
            return "ff"
        if k == PROP:
            return f.name
        if k == NPROP:
            return "!" + f.name
        if k == NEG:
            return "!" + go(f.left, 3)
        if k == DIA:
            return "<>" + go(f.left, 3)
        if k == BOX:
            return "[]" + go(f.left, 3)
        if k in (AND, OR):
            op = " & " if k == AND else " | "
            mine = _PREC[k]
            s = go(f.left, mine) + op + go(f.right, mine + 1)
            return "(" + s + ")" if ctx > mine else s
        # binder: maximal scope, parenthesize unless outermost context
        s = ("mu " if k == MU else "nu ") + f.name + ". " + go(f.left, 0)
        return "(" + s + ")" if ctx > 0 else s
    return go(phi, 0)


# ---------------------------------------------------------------------------
# normal forms

def is_nnf(phi):
    return all(f.kind != NEG for f in subformulas(phi))


_NNF_CACHE = {}
_PUSH_CACHE = {}


def to_nnf(phi):
    """Negation normal form; semantically equal on every model."""
    out = _NNF_CACHE.get(phi)
    if out is not None:
        return out
    k = phi.kind
    if k in (TT, FF, PROP, NPROP):
        out = phi
    elif k == NEG:
        out = _push_neg(phi.left)
    elif k == AND:
        out = conj(to_nnf(phi.left), to_nnf(phi.right))
    elif k == OR:
        out = disj(to_nnf(phi.left), to_nnf(phi.right))
    elif k == DIA:
        out = dia(to_nnf(phi.left))
    elif k == BOX:
        out = box(to_nnf(phi.left))
    elif k == MU:
        out = mu(phi.name, to_nnf(phi.left))
    else:
        out = nu(phi.name, to_nnf(phi.left))
    _NNF_CACHE[phi] = out
    return out


def _push_neg(phi):
    """NNF of the negation of phi."""
    out = _PUSH_CACHE.get(phi)
    if out is not None:
        return out
    k = phi.kind
    if k == TT:
        out = Bot
    elif k == FF:
        out = Top
    elif k == PROP:
        out = nprop(phi.name)
    elif k == NPROP:
        out = prop(phi.name)
    elif k == NEG:
        out = to_nnf(phi.left)
    elif k == AND:
        out = disj(_push_neg(phi.left), _push_neg(phi.right))
    elif k == OR:
        out = conj(_push_neg(phi.left), _push_neg(phi.right))
    elif k == DIA:
        out = box(_push_neg(phi.left))
    elif k == BOX:
        out = dia(_push_neg(phi.left))
    else:
        # fixpoint duality: !(mu x.phi) == nu x.!(phi[!x/x])
        x = phi.name
        flipped = substitute(phi.left, {x: neg(prop(x))})
        body = _push_neg(flipped)
        out = nu(x, body) if k == MU else mu(x, body)
    _PUSH_CACHE[phi] = out
    return out


def negate(phi):
    """NNF dual of an NNF formula; negate(negate(phi)) is phi."""
    if not is_nnf(phi):
        raise FormulaError("negate expects a formula in negation normal form")
    return _push_neg(phi)


# ---------------------------------------------------------------------------
# substitution and renaming

def _fresh(base, used):
    k = 1
    while f"{base}{k}" in used:
        k += 1
    return f"{base}{k}"


def substitute(phi, bindings):
    """Simultaneous capture-avoiding substitution of formulas for variables."""
    bindings = {x: f for x, f in bindings.items() if f is not prop(x)}
    if not bindings:
        return phi
    return _subst(phi, bindings, _subkey(bindings), {})


def _subkey(sub):
    return tuple(sorted((x, id(f)) for x, f in sub.items()))


def _subst(phi, sub, subkey, memo):
    live_any = phi._fv & sub.keys()
    if not live_any:
        return phi
    key = (phi, subkey)
    out = memo.get(key)
    if out is not None:
        return out
    k = phi.kind
    if k == PROP:
        out = sub.get(phi.name, phi)
    elif k == NPROP:
        out = _push_neg(sub[phi.name]) if phi.name in sub else phi
    elif k == NEG:
        out = neg(_subst(phi.left, sub, subkey, memo))
    elif k == AND:
        out = conj(_subst(phi.left, sub, subkey, memo),
                   _subst(phi.right, sub, subkey, memo))
    elif k == OR:
        out = disj(_subst(phi.left, sub, subkey, memo),
                   _subst(phi.right, sub, subkey, memo))
    elif k == DIA:
        out = dia(_subst(phi.left, sub, subkey, memo))
    elif k == BOX:
        out = box(_subst(phi.left, sub, subkey, memo))
    else:  # binder
        y = phi.name
        body = phi.left
        live = {x: f for x, f in sub.items() if x != y and x in body._fv}
        if not live:
            out = phi
        else:
            if any(y in f._fv for f in live.values()):
                used = all_names(body) | set(live) | {y}
                for f in live.values():
                    used |= all_names(f)
                y2 = _fresh(y, used)
                body = _subst(body, {y: prop(y2)}, _subkey({y: prop(y2)}), {})
                y = y2
            body = _subst(body, live, _subkey(live), memo)
            out = mu(y, body) if k == MU else nu(y, body)
    memo[key] = out
    return out


def is_well_named(phi):
    """Bound variables pairwise distinct and disjoint from the free ones."""
    seen = set()

    def go(f):
        if f.kind in _BINDERS:
            if f.name in seen or f.name in phi._fv:
                return False
            seen.add(f.name)
        return all(go(c) for c in f.children)

    return go(phi)


def is_consistently_named(phi):
    """Every bound variable has a unique binder up to sharing, and bound
    names are disjoint from free ones.  Formulas with shared subterms keep
    their sharing under this weaker discipline, while the binder map stays
    well-defined."""
    binders = {}
    ok = True
    for f in subformulas(phi):
        if f.kind in _BINDERS:
            key = (f.kind, f.left)
            if binders.setdefault(f.name, key) != key or f.name in phi._fv:
                ok = False
    return ok


def ensure_names(phi):
    """The formula itself when its naming is already consistent, otherwise
    an alpha-variant with binder nodes renamed apart (sharing preserved)."""
    return phi if is_consistently_named(phi) else rename_apart(phi)


def rename_apart(phi):
    """Alpha-rename so that every bound name has a unique binder body,
    renaming shared binder nodes rather than occurrences: subterm sharing
    survives, unlike with well_name."""
    pool = set(all_names(phi))
    claimed = {}
    memo = {}

    def go(f):
        out = memo.get(f)
        if out is not None:
            return out
        k = f.kind
        if k in (TT, FF, PROP, NPROP):
            out = f
        elif k == NEG:
            out = neg(go(f.left))
        elif k == AND:
            out = conj(go(f.left), go(f.right))
        elif k == OR:
            out = disj(go(f.left), go(f.right))
        elif k == DIA:
            out = dia(go(f.left))
        elif k == BOX:
            out = box(go(f.left))
        else:
            body = go(f.left)
            name = f.name
            key = (k, body)
            holder = claimed.get(name)
            if holder is None and name not in phi._fv:
                claimed[name] = key
                out = _mk_binder(k, name, body)
            elif holder == key:
                out = _mk_binder(k, name, body)
            else:
                fresh = _fresh(name, pool)
                pool.add(fresh)
                body = substitute(body, {name: prop(fresh)})
                claimed[fresh] = (k, body)
                out = _mk_binder(k, fresh, body)
        memo[f] = out
        return out

    return go(phi)


def _mk_binder(kind, name, body):
    return mu(name, body) if kind == MU else nu(name, body)


def well_name(phi):
    """Alpha-rename binders apart (deterministic smallest-numeric-suffix scheme)."""
    used = set(all_names(phi))
    assigned = set(phi._fv)

    def go(f):
        k = f.kind
        if k in (TT, FF, PROP, NPROP):
            return f
        if k in _BINDERS:
            x, body = f.name, f.left
            if x in assigned:
                x2 = _fresh(x, used | assigned)
                used.add(x2)
                assigned.add(x2)
                body = substitute(body, {x: prop(x2)})
                x = x2
            else:
                assigned.add(x)
            body = go(body)
            return mu(x, body) if k == MU else nu(x, body)
        cs = [go(c) for c in f.children]
        if k == NEG:
            return neg(cs[0])
        if k == AND:
            return conj(cs[0], cs[1])
        if k == OR:
            return disj(cs[0], cs[1])
        if k == DIA:
            return dia(cs[0])
        return box(cs[0])

    return go(phi)


# ---------------------------------------------------------------------------
# well-named formula structure: binder map, dependency order, priorities

def binder_map(phi):
    """For well-named phi: variable -> (kind, unfolding body delta_x)."""
    out = {}
    for f in subformulas(phi):
        if f.kind in _BINDERS:
            out[f.name] = (f.kind, f.left)
    return out


def binder_paths(phi):
    """For well-named phi: variable -> occurrence path of its binder."""
    out = {}
    for path, f in occurrences(phi):
        if f.kind in _BINDERS:
            out[f.name] = path
    return out


def is_guarded(phi):
    """Every bound-variable occurrence under a modality within its binder."""

    def go(f, unguarded):
        k = f.kind
        if k == PROP or k == NPROP:
            return f.name not in unguarded
        if k in (DIA, BOX):
            return go(f.left, frozenset())
        if k in _BINDERS:
            return go(f.left, unguarded | {f.name})
        return all(go(c, unguarded) for c in f.children)

    return go(phi, frozenset())


_REPLACE_CACHE = {}


def _replace_unguarded(phi, x, unit):
    key = (phi, x, unit)
    out = _REPLACE_CACHE.get(key)
    if out is not None:
        return out
    k = phi.kind
    if k == PROP:
        out = unit if phi.name == x else phi
    elif k in (TT, FF, NPROP, DIA, BOX):
        out = phi
    elif k == AND:
        out = _smart_and(_replace_unguarded(phi.left, x, unit),
                         _replace_unguarded(phi.right, x, unit))
    elif k == OR:
        out = _smart_or(_replace_unguarded(phi.left, x, unit),
                        _replace_unguarded(phi.right, x, unit))
    elif k in _BINDERS:
        body = _replace_unguarded(phi.left, x, unit)
        out = _smart_binder(k, phi.name, body)
    else:
        raise FormulaError("guard expects a formula in negation normal form")
    _REPLACE_CACHE[key] = out
    return out


def _smart_and(a, b):
    if a is Bot or b is Bot:
        return Bot
    if a is Top:
        return b
    if b is Top:
        return a
    if a is b:
        return a
    return conj(a, b)


def _smart_or(a, b):
    if a is Top or b is Top:
        return Top
    if a is Bot:
        return b
    if b is Bot:
        return a
    if a is b:
        return a
    return disj(a, b)


def _smart_dia(a):
    return Bot if a is Bot else dia(a)


def _smart_box(a):
    return Top if a is Top else box(a)


def _smart_binder(k, x, body):
    if x not in body._fv:
        return body
    return mu(x, body) if k == MU else nu(x, body)


_GUARD_CACHE = {}


def guard(phi):
    """Equivalent formula with every bound variable guarded in its binder.

    Unguarded occurrences are absorbed into the fixpoint unit (ff for mu,
    tt for nu), innermost binders first, with unit simplification.
    """
    out = _GUARD_CACHE.get(phi)
    if out is not None:
        return out
    k = phi.kind
    if k in (TT, FF, PROP, NPROP):
        out = phi
    elif k == AND:
        out = _smart_and(guard(phi.left), guard(phi.right))
    elif k == OR:
        out = _smart_or(guard(phi.left), guard(phi.right))
    elif k == DIA:
        out = _smart_dia(guard(phi.left))
    elif k == BOX:
        out = _smart_box(guard(phi.left))
    elif k in _BINDERS:
        body = guard(phi.left)
        unit = Bot if k == MU else Top
        body = _replace_unguarded(body, phi.name, unit)
        out = _smart_binder(k, phi.name, body)
    else:
        raise FormulaError("guard expects a formula in negation normal form")
    _GUARD_CACHE[phi] = out
    return out


class DependencyOrder:
    """Strict partial order on the bound variables of a well-named formula."""

    def __init__(self, pairs, variables):
        self.pairs = frozenset(pairs)
        self.variables = frozenset(variables)

    def below(self, x, y):
        return (x, y) in self.pairs

    def __eq__(self, other):
        return (isinstance(other, DependencyOrder)
                and self.pairs == other.pairs and self.variables == other.variables)

    def __repr__(self):
        return f"DependencyOrder({sorted(self.pairs)})"


def dependency_order(phi):
    """x < y iff the unfolding body of x is a subformula of that of y."""
    if not is_consistently_named(phi):
        raise FormulaError("dependency order needs consistently named binders")
    bm = binder_map(phi)
    below = {y: set(bound_vars(dy)) - {y} for y, (_, dy) in bm.items()}
    # transitive closure by union propagation
    changed = True
    while changed:
        changed = False
        for y in below:
            new = set(below[y])
            for x in below[y]:
                new |= below.get(x, set())
            if new != below[y]:
                below[y] = new
                changed = True
    pairs = {(x, y) for y, xs in below.items() for x in xs}
    return DependencyOrder(pairs, bm.keys())


def priorities(phi):
    """Parity priorities for bound variables: mu odd, nu even, monotone
    along the dependency order, innermost variables first."""
    bm = binder_map(phi)
    order = dependency_order(phi)
    remaining = sorted(bm)
    done = []
    while remaining:
        for x in remaining:
            if all(z in done or not order.below(z, x) for z in remaining):
                done.append(x)
                remaining.remove(x)
                break
        else:
            raise FormulaError("cyclic dependency order")
    prio = {}
    for x in done:
        lo = max([1] + [prio[z] for z in done if order.below(z, x)])
        want_odd = bm[x][0] == MU
        if (lo % 2 == 1) != want_odd:
            lo += 1
        prio[x] = lo
    return prio


# ---------------------------------------------------------------------------
# Act map

def act_table(phi):
    """Least solution of the activity equations for bound variables."""
    bm = binder_map(phi)
    fv = phi._fv
    table = {x: frozenset() for x in bm}

    def act(f):
        k = f.kind
        if k in (PROP, NPROP):
            if f.name in table:
                return table[f.name]
            return frozenset((f.name,)) if f.name in fv else frozenset()
        if k in (TT, FF):
            return frozenset()
        out = frozenset()
        for c in f.children:
            out |= act(c)
        return out

    changed = True
    while changed:
        changed = False
        for x, (_, body) in bm.items():
            new = act(body)
            if new != table[x]:
                table[x] = new
                changed = True
    return table


def active(phi, path):
    """Active proposition letters of the subformula occurrence at path."""
    if not is_consistently_named(phi):
        raise FormulaError("active needs consistently named binders")
    sub = subformula_at(phi, path)
    table = act_table(phi)
    fv = phi._fv

    def act(f):
        k = f.kind
        if k in (PROP, NPROP):
            if f.name in table:
                return table[f.name]
            return frozenset((f.name,)) if f.name in fv else frozenset()
        if k in (TT, FF):
            return frozenset()
        out = frozenset()
        for c in f.children:
            out |= act(c)
        return out

    return act(sub)


# ---------------------------------------------------------------------------
# fragment grammars

FRAGMENTS = ("M", "W", "D", "B", "C", "F", "A", "U")


def _flatten(phi, kind):
    if phi.kind != kind:
        return [phi]
    return _flatten(phi.left, kind) + _flatten(phi.right, kind)


_FRAGMENT_CACHE = {}


def _fragment_memo(fn):
    def wrapped(phi, *rest):
        key = (fn.__name__, phi, rest)
        out = _FRAGMENT_CACHE.get(key)
        if out is None:
            out = fn(phi, *rest)
            _FRAGMENT_CACHE[key] = out
        return out
    return wrapped


def in_fragment(phi, fragment, p):
    """Membership of phi (NNF, consistently named) in the fragment grammar
    for the letter p."""
    if fragment not in FRAGMENTS:
        raise ValueError(f"unknown fragment {fragment!r}")
    if not is_nnf(phi):
        raise FormulaError("fragment membership is defined on NNF formulas")
    if fragment == "M":
        return all(not (f.kind == NPROP and f.name == p) for f in subformulas(phi))
    if fragment == "U":
        return all(f.kind != DIA for f in subformulas(phi))
    if fragment == "B":
        return _in_b(phi, p, frozenset((p,)))
    check = {"W": _in_w, "D": _in_d, "C": _in_c, "F": _in_f, "A": _in_a}[fragment]
    return check(phi, frozenset((p,)))


@_fragment_memo
def _in_w(phi, P):
    if not (phi._fv & P):
        return True
    k = phi.kind
    if k == PROP:
        return phi.name in P
    if k in (AND, OR):
        return _in_w(phi.left, P) and _in_w(phi.right, P)
    if k == DIA:
        return _in_w(phi.left, P)
    if k in _BINDERS:
        return _in_w(phi.left, P | {phi.name})
    return False


@_fragment_memo
def _in_d(phi, P):
    if not (phi._fv & P):
        return True
    k = phi.kind
    if k == PROP:
        return phi.name in P
    if k in (AND, OR):
        return _in_d(phi.left, P) and _in_d(phi.right, P)
    if k in (DIA, BOX):
        return _in_d(phi.left, P)
    if k == MU:
        return _in_d(phi.left, P | {phi.name})
    return False


@_fragment_memo
def _in_c(phi, P):
    if not (phi._fv & P):
        return True
    k = phi.kind
    if k == PROP:
        return phi.name in P
    if k in (AND, OR):
        return _in_c(phi.left, P) and _in_c(phi.right, P)
    if k == DIA:
        return _in_c(phi.left, P)
    if k == MU:
        return _in_c(phi.left, P | {phi.name})
    return False


@_fragment_memo
def _in_b(phi, p, Q):
    if not (phi._fv & Q):
        return True
    k = phi.kind
    if k == PROP:
        return phi.name in Q
    if k == OR:
        return _in_b(phi.left, p, Q) and _in_b(phi.right, p, Q)
    if k == AND:
        rest = [c for c in _flatten(phi, AND)
                if not (c is prop(p) or not (c._fv & Q))]
        if len(rest) > 1:
            return False
        return all(_in_b(c, p, Q) for c in rest)
    if k == DIA:
        return _in_b(phi.left, p, Q)
    if k in _BINDERS:
        return _in_b(phi.left, p, Q | {phi.name})
    return False


@_fragment_memo
def _in_f(phi, P):
    k = phi.kind
    if k == FF:
        return True
    if k == PROP:
        return phi.name in P
    if k == OR:
        return _in_f(phi.left, P) and _in_f(phi.right, P)
    if k == AND:
        rest = [c for c in _flatten(phi, AND) if c._fv & P]
        if len(rest) > 1:
            return False
        if len(rest) == 1:
            return _in_f(rest[0], P)
        return any(_in_f(c, P) for c in _flatten(phi, AND))
    if k == DIA:
        return _in_f(phi.left, P)
    if k == MU:
        return _in_f(phi.left, P | {phi.name})
    return False


@_fragment_memo
def _in_a(phi, P):
    if not (phi._fv & P):
        return True
    k = phi.kind
    if k == PROP:
        return phi.name in P
    if k == OR:
        return _in_a(phi.left, P) and _in_a(phi.right, P)
    if k == AND:
        rest = [c for c in _flatten(phi, AND) if c._fv & P]
        if len(rest) > 1:
            return False
        return all(_in_a(c, P) for c in rest)
    if k == DIA:
        return _in_a(phi.left, P)
    if k == MU:
        return _in_a(phi.left, P | {phi.name})
    return False


_SIMPLIFY_CACHE = {}


def simplify_units(phi):
    """Unit and idempotence simplification (tt/ff absorption, diamond-ff,
    box-tt, vacuous binders); semantics preserving."""
    out = _SIMPLIFY_CACHE.get(phi)
    if out is not None:
        return out
    k = phi.kind
    if k in (TT, FF, PROP, NPROP):
        out = phi
    elif k == NEG:
        inner = simplify_units(phi.left)
        if inner is Top:
            out = Bot
        elif inner is Bot:
            out = Top
        else:
            out = neg(inner)
    elif k == AND:
        out = _smart_and(simplify_units(phi.left), simplify_units(phi.right))
    elif k == OR:
        out = _smart_or(simplify_units(phi.left), simplify_units(phi.right))
    elif k == DIA:
        out = _smart_dia(simplify_units(phi.left))
    elif k == BOX:
        out = _smart_box(simplify_units(phi.left))
    else:
        out = _smart_binder(k, phi.name, simplify_units(phi.left))
    _SIMPLIFY_CACHE[phi] = out
    return out


def prepare(phi):
    """NNF + consistently named + guarded form, the normal input for
    automata.  Consistent naming (rather than full well-naming) keeps
    shared subterms shared."""
    return guard(ensure_names(to_nnf(phi)))
