"""One-step logic: lattice terms, modal one-step formulas, disjunctive
one-step formulas, one-step models/satisfaction, and the one-step
translations used by the automaton transformations.

Proposition letters are strings; automaton states are arbitrary hashables
(integers in practice).  In a disjunctive formula a literal conjunction pi
is a frozenset of (letter, positive) pairs and a disjunct is (pi, B) with B
a frozenset of states; the empty disjunction denotes bottom.
"""

from __future__ import annotations

from dataclasses import dataclass


class OneStepError(Exception):
    pass


# ---------------------------------------------------------------------------
# lattice terms over states (hash-consed: equality is identity)

LATOM, LTOP, LBOT, LAND, LOR = "atom", "top", "bot", "and", "or"

_LT_INTERN = {}


class LatticeTerm:
    __slots__ = ("kind", "atom", "left", "right", "_atoms", "_hash")

    def __init__(self, kind, atom=None, left=None, right=None):
        self.kind = kind
        self.atom = atom
        self.left = left
        self.right = right
        if kind == LATOM:
            self._atoms = frozenset((atom,))
        elif kind in (LTOP, LBOT):
            self._atoms = frozenset()
        else:
            self._atoms = left._atoms | right._atoms
        self._hash = hash((kind, atom, id(left), id(right)))

    def __hash__(self):
        return self._hash

    def atoms(self):
        return self._atoms

    def __repr__(self):
        return f"LatticeTerm({_term_text(self, 0)!r})"


def _mk_term(kind, atom=None, left=None, right=None):
    key = (kind, atom, id(left), id(right))
    t = _LT_INTERN.get(key)
    if t is None:
        t = LatticeTerm(kind, atom, left, right)
        _LT_INTERN[key] = t
    return t


def latom(a):
    return _mk_term(LATOM, atom=a)


LTop = _mk_term(LTOP)
LBot = _mk_term(LBOT)


def land(s, t):
    return _mk_term(LAND, left=s, right=t)


def lor(s, t):
    return _mk_term(LOR, left=s, right=t)


def lconj(terms):
    terms = list(terms)
    if not terms:
        return LTop
    out = terms[0]
    for t in terms[1:]:
        out = land(out, t)
    return out


def ldisj(terms):
    terms = list(terms)
    if not terms:
        return LBot
    out = terms[0]
    for t in terms[1:]:
        out = lor(out, t)
    return out


_HOLDS_CACHE = {}


def lattice_holds(term, value):
    """Does the state set `value` satisfy the term (atom true iff member)?"""
    k = term.kind
    if k == LATOM:
        return term.atom in value
    if k == LTOP:
        return True
    if k == LBOT:
        return False
    key = (term, value)
    out = _HOLDS_CACHE.get(key)
    if out is None:
        if k == LAND:
            out = (lattice_holds(term.left, value)
                   and lattice_holds(term.right, value))
        else:
            out = (lattice_holds(term.left, value)
                   or lattice_holds(term.right, value))
        _HOLDS_CACHE[key] = out
    return out


_MIN_MODEL_CACHE = {}


def lattice_min_models(term, atoms):
    """Subset-minimal values over `atoms` satisfying the term."""
    key = (term, frozenset(atoms))
    out = _MIN_MODEL_CACHE.get(key)
    if out is not None:
        return out
    atoms = sorted(atoms, key=repr)
    sats = []
    for mask in range(1 << len(atoms)):
        value = frozenset(a for i, a in enumerate(atoms) if mask >> i & 1)
        if lattice_holds(term, value):
            sats.append(value)
    out = [v for v in sats if not any(w < v for w in sats)]
    _MIN_MODEL_CACHE[key] = out
    return out


# ---------------------------------------------------------------------------
# one-step formulas (hash-consed: equality is identity)

OTOP, OBOT, OPOS, ONEG, OAND, OOR, ODIA, OBOX = (
    "top", "bot", "plit", "nlit", "and", "or", "dia", "box")

_OSF_INTERN = {}


class OneStepFormula:
    __slots__ = ("kind", "name", "term", "left", "right",
                 "_states", "_letters", "_hash")

    def __init__(self, kind, name=None, term=None, left=None, right=None):
        self.kind = kind
        self.name = name
        self.term = term
        self.left = left
        self.right = right
        states = frozenset()
        letters = frozenset()
        if kind in (OPOS, ONEG):
            letters = frozenset((name,))
        elif kind in (ODIA, OBOX):
            states = term.atoms()
        elif kind in (OAND, OOR):
            states = left._states | right._states
            letters = left._letters | right._letters
        self._states = states
        self._letters = letters
        self._hash = hash((kind, name, id(term), id(left), id(right)))

    def __hash__(self):
        return self._hash

    def state_atoms(self):
        return self._states

    def letters(self):
        return self._letters

    def __repr__(self):
        return f"OneStepFormula({_osf_text(self, 0)!r})"


def _mk_osf(kind, name=None, term=None, left=None, right=None):
    key = (kind, name, id(term), id(left), id(right))
    f = _OSF_INTERN.get(key)
    if f is None:
        f = OneStepFormula(kind, name, term, left, right)
        _OSF_INTERN[key] = f
    return f


OTop = _mk_osf(OTOP)
OBot = _mk_osf(OBOT)


def oplit(p):
    return _mk_osf(OPOS, name=p)


def onlit(p):
    return _mk_osf(ONEG, name=p)


def oand(a, b):
    return _mk_osf(OAND, left=a, right=b)


def oor(a, b):
    return _mk_osf(OOR, left=a, right=b)


def odia(term):
    return _mk_osf(ODIA, term=term)


def obox(term):
    return _mk_osf(OBOX, term=term)


def oconj(parts):
    parts = list(parts)
    if not parts:
        return OTop
    out = parts[0]
    for x in parts[1:]:
        out = oand(out, x)
    return out


def odisj(parts):
    parts = list(parts)
    if not parts:
        return OBot
    out = parts[0]
    for x in parts[1:]:
        out = oor(out, x)
    return out


def nabla(states):
    """Cover modality over a set of states: AND of diamonds plus box of the
    disjunction; nabla of the empty set is box-bottom."""
    states = sorted(states, key=repr)
    parts = [odia(latom(b)) for b in states]
    parts.append(obox(ldisj([latom(b) for b in states])))
    return oconj(parts)


# ---------------------------------------------------------------------------
# one-step models and satisfaction

@dataclass(frozen=True)
class OneStepModel:
    letters: frozenset
    carrier: tuple
    marking: object  # mapping carrier element -> frozenset of states

    def value(self, term):
        return [t for t in self.carrier if lattice_holds(term, self.marking[t])]


def sat1(model, alpha):
    """One-step satisfaction: diamonds need a witness, boxes need totality."""
    if isinstance(alpha, DisjunctiveOneStep):
        alpha = alpha.to_onestep()
    k = alpha.kind
    if k == OTOP:
        return True
    if k == OBOT:
        return False
    if k == OPOS:
        return alpha.name in model.letters
    if k == ONEG:
        return alpha.name not in model.letters
    if k == OAND:
        return sat1(model, alpha.left) and sat1(model, alpha.right)
    if k == OOR:
        return sat1(model, alpha.left) or sat1(model, alpha.right)
    if k == ODIA:
        return any(lattice_holds(alpha.term, model.marking[t]) for t in model.carrier)
    if k == OBOX:
        return all(lattice_holds(alpha.term, model.marking[t]) for t in model.carrier)
    raise OneStepError(f"unknown one-step formula kind {k!r}")


# ---------------------------------------------------------------------------
# disjunctive one-step formulas: tuples of (pi, B) disjuncts

def literal(p, positive=True):
    return (p, positive)


def pi_consistent(pi):
    pos = {p for (p, s) in pi if s}
    negs = {p for (p, s) in pi if not s}
    return not (pos & negs)


def pi_holds(pi, letters):
    return all((p in letters) == s for (p, s) in pi)


def pi_to_onestep(pi):
    return oconj([oplit(p) if s else onlit(p) for (p, s) in sorted(pi)])


class DisjunctiveOneStep:
    """Disjunction of pi-and-nabla disjuncts; empty means bottom."""

    __slots__ = ("disjuncts",)

    def __init__(self, disjuncts):
        canon = sorted({(frozenset(pi), frozenset(b)) for (pi, b) in disjuncts},
                       key=lambda d: (sorted(d[0]), sorted(d[1], key=repr)))
        self.disjuncts = tuple(canon)

    def __eq__(self, other):
        return (isinstance(other, DisjunctiveOneStep)
                and self.disjuncts == other.disjuncts)

    def __hash__(self):
        return hash(self.disjuncts)

    def __repr__(self):
        return f"DisjunctiveOneStep({list(self.disjuncts)!r})"

    def state_atoms(self):
        out = frozenset()
        for (_, b) in self.disjuncts:
            out |= b
        return out

    def letters(self):
        out = frozenset()
        for (pi, _) in self.disjuncts:
            out |= {p for (p, _s) in pi}
        return out

    def to_onestep(self):
        return odisj([oconj([pi_to_onestep(pi), nabla(b)])
                      for (pi, b) in self.disjuncts])

    def map_states(self, h):
        return DisjunctiveOneStep(
            [(pi, frozenset(h(x) for x in b)) for (pi, b) in self.disjuncts])


def dbot():
    return DisjunctiveOneStep([])


# ---------------------------------------------------------------------------
# substitutions on one-step formulas

def subst_bot(alpha, p):
    """Substitute bottom for the letter p; the input must be positive in p."""
    if isinstance(alpha, DisjunctiveOneStep):
        out = []
        for (pi, b) in alpha.disjuncts:
            if (p, False) in pi:
                raise OneStepError(f"negative occurrence of {p!r}")
            if (p, True) in pi:
                continue  # the disjunct collapses to bottom
            out.append((pi, b))
        return DisjunctiveOneStep(out)
    k = alpha.kind
    if k == OPOS:
        return OBot if alpha.name == p else alpha
    if k == ONEG:
        if alpha.name == p:
            raise OneStepError(f"negative occurrence of {p!r}")
        return alpha
    if k == OAND:
        return oand(subst_bot(alpha.left, p), subst_bot(alpha.right, p))
    if k == OOR:
        return oor(subst_bot(alpha.left, p), subst_bot(alpha.right, p))
    return alpha


def rename_states(alpha, h):
    """Homomorphic renaming of state atoms; h maps states to states."""
    if isinstance(alpha, DisjunctiveOneStep):
        return alpha.map_states(h)

    def rt(term):
        k = term.kind
        if k == LATOM:
            return latom(h(term.atom))
        if k in (LTOP, LBOT):
            return term
        if k == LAND:
            return land(rt(term.left), rt(term.right))
        return lor(rt(term.left), rt(term.right))

    k = alpha.kind
    if k in (ODIA, OBOX):
        return _mk_osf(k, term=rt(alpha.term))
    if k in (OAND, OOR):
        return _mk_osf(k, left=rename_states(alpha.left, h),
                       right=rename_states(alpha.right, h))
    return alpha


# ---------------------------------------------------------------------------
# the fragment translations on disjunctive formulas

def translate_M(delta, p):
    """Replace the literal not-p by top in every disjunct."""
    return DisjunctiveOneStep(
        [(frozenset(l for l in pi if l != (p, False)), b)
         for (pi, b) in delta.disjuncts])


def _covers(b):
    """All pairs (B1, B2) with B1 union B2 = b."""
    items = sorted(b, key=repr)
    for mask1 in range(1 << len(items)):
        b1 = frozenset(x for i, x in enumerate(items) if mask1 >> i & 1)
        for mask2 in range(1 << len(items)):
            b2 = frozenset(x for i, x in enumerate(items) if mask2 >> i & 1)
            if b1 | b2 == b:
                yield b1, b2


def translate_W(delta, bot):
    """Finite-width translation: split each cover into tracked diamonds and
    a bottom-copy cover; bot maps states to their bottom-copy."""
    parts = []
    for (pi, b) in delta.disjuncts:
        lits = pi_to_onestep(pi)
        seen = set()
        for (b1, b2) in _covers(b):
            if (b1, b2) in seen:
                continue
            seen.add((b1, b2))
            conjs = [lits]
            conjs.extend(odia(latom(x)) for x in sorted(b1, key=repr))
            conjs.append(nabla([bot(x) for x in b2]))
            parts.append(oconj(conjs))
    return odisj(parts)


def translate_B(delta, bot):
    """Single-branch translation: keep at most one tracked diamond."""
    parts = []
    for (pi, b) in delta.disjuncts:
        lits = pi_to_onestep(pi)
        parts.append(oand(lits, nabla([bot(x) for x in b])))
        for x in sorted(b, key=repr):
            for b2 in _unions_to(b, x):
                parts.append(oconj([lits, odia(latom(x)),
                                    nabla([bot(y) for y in b2])]))
    return odisj(parts)


def _subsets(s):
    items = sorted(s, key=repr)
    for mask in range(1 << len(items)):
        yield frozenset(x for i, x in enumerate(items) if mask >> i & 1)


def _unions_to(b, x):
    """All B2 with {x} union B2 = b."""
    rest = b - {x}
    out = []
    for extra in _subsets(frozenset((x,))):
        out.append(rest | extra)
    return sorted(set(out), key=lambda s: sorted(s, key=repr))


def translate_F(delta, p, bot):
    """Full-additivity translation (input positive in p)."""
    parts = []
    for (pi, b) in delta.disjuncts:
        if (p, False) in pi:
            raise OneStepError(f"negative occurrence of {p!r}")
        lits = pi_to_onestep(pi)
        if (p, True) in pi:
            parts.append(oand(lits, nabla([bot(x) for x in b])))
        elif not b:
            continue  # bottom disjunct
        else:
            for x in sorted(b, key=repr):
                for b2 in _unions_to(b, x):
                    parts.append(oconj([lits, odia(latom(x)),
                                        nabla([bot(y) for y in b2])]))
    return odisj(parts)


def translate_A(delta, p, bot):
    """Complete-additivity translation: like the full-additivity one but a
    disjunct may also give up the search and move entirely to the bottom
    copy (no normality requirement)."""
    parts = []
    for (pi, b) in delta.disjuncts:
        if (p, False) in pi:
            raise OneStepError(f"negative occurrence of {p!r}")
        lits = pi_to_onestep(pi)
        if (p, True) in pi:
            parts.append(oand(lits, nabla([bot(x) for x in b])))
        else:
            parts.append(oand(lits, nabla([bot(x) for x in b])))
            for x in sorted(b, key=repr):
                for b2 in _unions_to(b, x):
                    parts.append(oconj([lits, odia(latom(x)),
                                        nabla([bot(y) for y in b2])]))
    return odisj(parts)


def translate_U(delta):
    """Universal translation: drop the diamond half of every cover."""
    parts = []
    for (pi, b) in delta.disjuncts:
        lits = pi_to_onestep(pi)
        parts.append(oand(lits, obox(ldisj([latom(x) for x in sorted(b, key=repr)]))))
    return odisj(parts)


# ---------------------------------------------------------------------------
# one-step disjunctive normal form over macro-states

def dnf_one_step(alpha, states=None):
    """Equivalent disjunctive formula whose states are subsets of the input
    alphabet: a one-step model (Y, S, m) satisfies alpha iff the macro-model
    marking each t with the singleton {m(t) intersected with the atoms}
    satisfies the output.

    Enumerates all (letter pattern, family of marking values) rows; intended
    for small alphabets only.
    """
    if _unguarded_states(alpha):
        raise OneStepError("dnf needs a guarded one-step formula")
    atoms = sorted(alpha.state_atoms() if states is None else states, key=repr)
    letters = sorted(alpha.letters())
    values = [frozenset(v) for v in _subsets(frozenset(atoms))]
    out = []
    for ymask in range(1 << len(letters)):
        y = frozenset(p for i, p in enumerate(letters) if ymask >> i & 1)
        pi = frozenset((p, p in y) for p in letters)
        for family in _subsets(frozenset(values)):
            model = OneStepModel(y, tuple(range(len(family))),
                                 dict(enumerate(sorted(family, key=repr))))
            if sat1(model, alpha):
                out.append((pi, frozenset(family)))
    return DisjunctiveOneStep(out)


def _unguarded_states(alpha):
    if isinstance(alpha, DisjunctiveOneStep):
        return False
    return False  # states only occur inside modal terms by construction


# ---------------------------------------------------------------------------
# one-step grammar membership

CLASSES = ("W", "D", "B", "F", "A", "final")


def in_onestep_class(alpha, cls, initial, final, p):
    """Syntactic membership in the one-step grammar of an automaton class,
    given the bipartition of the state alphabet."""
    if isinstance(alpha, DisjunctiveOneStep):
        alpha = alpha.to_onestep()
    if cls not in CLASSES:
        raise ValueError(f"unknown one-step class {cls!r}")
    initial = frozenset(initial)
    final = frozenset(final)
    if cls == "final":
        return _is_final(alpha, final, p)
    check = {"W": _os_w, "D": _os_d, "B": _os_b, "F": _os_f, "A": _os_a}[cls]
    return check(alpha, initial, final, p)


def _is_final(alpha, final, p):
    """Member of the one-step language over Prop minus p and final states."""
    if p in alpha.letters():
        return False
    return alpha.state_atoms() <= final


def _os_w(alpha, initial, final, p):
    if _is_final(alpha, final, p):
        return True
    k = alpha.kind
    if k == OPOS:
        return alpha.name == p
    if k in (OAND, OOR):
        return (_os_w(alpha.left, initial, final, p)
                and _os_w(alpha.right, initial, final, p))
    if k == ODIA:
        return alpha.term.atoms() <= initial
    return False


def _os_d(alpha, initial, final, p):
    if _is_final(alpha, final, p):
        return True
    k = alpha.kind
    if k == OPOS:
        return alpha.name == p
    if k in (OAND, OOR):
        return (_os_d(alpha.left, initial, final, p)
                and _os_d(alpha.right, initial, final, p))
    if k in (ODIA, OBOX):
        return alpha.term.atoms() <= initial and p not in alpha.letters()
    return False


def _flat(alpha, kind):
    if alpha.kind != kind:
        return [alpha]
    return _flat(alpha.left, kind) + _flat(alpha.right, kind)


def _os_b(alpha, initial, final, p):
    if _is_final(alpha, final, p):
        return True
    k = alpha.kind
    if k == OPOS:
        return alpha.name == p
    if k == OOR:
        return (_os_b(alpha.left, initial, final, p)
                and _os_b(alpha.right, initial, final, p))
    if k == OAND:
        rest = [c for c in _flat(alpha, OAND)
                if not (c == oplit(p) or _is_final(c, final, p))]
        if len(rest) > 1:
            return False
        return all(_os_b(c, initial, final, p) for c in rest)
    if k == ODIA:
        t = alpha.term
        return t.kind == LATOM and t.atom in initial
    return False


def _os_f(alpha, initial, final, p):
    k = alpha.kind
    if k == OBOT:
        return True
    if k == OPOS:
        return alpha.name == p
    if k == OOR:
        return (_os_f(alpha.left, initial, final, p)
                and _os_f(alpha.right, initial, final, p))
    if k == OAND:
        rest = [c for c in _flat(alpha, OAND) if not _is_final(c, final, p)]
        if len(rest) > 1:
            return False
        if len(rest) == 1:
            return _os_f(rest[0], initial, final, p)
        return any(_os_f(c, initial, final, p) for c in _flat(alpha, OAND))
    if k == ODIA:
        t = alpha.term
        return t.kind == LATOM and t.atom in initial
    return False


def _os_a(alpha, initial, final, p):
    if _is_final(alpha, final, p):
        return True
    k = alpha.kind
    if k == OBOT:
        return True
    if k == OPOS:
        return alpha.name == p
    if k == OOR:
        return (_os_a(alpha.left, initial, final, p)
                and _os_a(alpha.right, initial, final, p))
    if k == OAND:
        rest = [c for c in _flat(alpha, OAND) if not _is_final(c, final, p)]
        if len(rest) > 1:
            return False
        return all(_os_a(c, initial, final, p) for c in rest)
    if k == ODIA:
        t = alpha.term
        return t.kind == LATOM and t.atom in initial
    return False


# ---------------------------------------------------------------------------
# printing and parsing (used by the automaton dump format)

def onestep_to_text(alpha):
    if isinstance(alpha, DisjunctiveOneStep):
        if not alpha.disjuncts:
            return "ff"
        parts = []
        for (pi, b) in alpha.disjuncts:
            lits = [("" if s else "!") + p for (p, s) in sorted(pi)]
            lits.append("nabla{" + ",".join(_atom_text(x) for x in sorted(b, key=repr)) + "}")
            parts.append(" & ".join(lits))
        return " | ".join(f"({x})" if " | " in x else x for x in parts)
    return _osf_text(alpha, 0)


def _atom_text(a):
    return str(a)


def _term_text(term, ctx):
    k = term.kind
    if k == LATOM:
        return _atom_text(term.atom)
    if k == LTOP:
        return "tt"
    if k == LBOT:
        return "ff"
    op = " & " if k == LAND else " | "
    mine = 2 if k == LAND else 1
    s = _term_text(term.left, mine) + op + _term_text(term.right, mine + 1)
    return f"({s})" if ctx > mine else s


def _osf_text(alpha, ctx):
    k = alpha.kind
    if k == OTOP:
        return "tt"
    if k == OBOT:
        return "ff"
    if k == OPOS:
        return alpha.name
    if k == ONEG:
        return "!" + alpha.name
    if k == ODIA:
        return "<>(" + _term_text(alpha.term, 0) + ")"
    if k == OBOX:
        return "[](" + _term_text(alpha.term, 0) + ")"
    op = " & " if k == OAND else " | "
    mine = 2 if k == OAND else 1
    s = _osf_text(alpha.left, mine) + op + _osf_text(alpha.right, mine + 1)
    return f"({s})" if ctx > mine else s


def onestep_from_text(text, state_names):
    """Parse the dump syntax back; numeric tokens are states, identifiers
    are proposition letters, nabla{...} is expanded by its definition."""
    toks = _os_tokens(text)
    parser = _OsParser(toks, frozenset(state_names))
    alpha = parser.formula()
    parser.expect("eof")
    return alpha


def _os_tokens(text):
    toks = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c in " \t":
            i += 1
        elif text.startswith("<>", i):
            toks.append(("dia", i)); i += 2
        elif text.startswith("[]", i):
            toks.append(("box", i)); i += 2
        elif c in "!&|(){},":
            toks.append((c, i)); i += 1
        elif c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(("num", text[i:j], i)); i = j
        elif c.isalpha():
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(("word", text[i:j], i)); i = j
        else:
            raise OneStepError(f"bad character {c!r} in one-step formula")
    toks.append(("eof",))
    return toks


class _OsParser:
    def __init__(self, toks, states):
        self.toks = toks
        self.states = states
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
            raise OneStepError(f"expected {kind!r} in one-step formula")
        return t

    def formula(self):
        lhs = self.conjunct()
        while self.peek() == "|":
            self.next()
            lhs = oor(lhs, self.conjunct())
        return lhs

    def conjunct(self):
        lhs = self.unary()
        while self.peek() == "&":
            self.next()
            lhs = oand(lhs, self.unary())
        return lhs

    def unary(self):
        k = self.peek()
        if k == "!":
            self.next()
            t = self.next()
            if t[0] != "word":
                raise OneStepError("negation applies to letters only")
            return onlit(t[1])
        if k in ("dia", "box"):
            self.next()
            self.expect("(")
            term = self.term()
            self.expect(")")
            return odia(term) if k == "dia" else obox(term)
        if k == "word" and self.toks[self.i][1] == "nabla":
            self.next()
            self.expect("{")
            states = []
            if self.peek() != "}":
                while True:
                    t = self.next()
                    if t[0] == "num":
                        states.append(int(t[1]))
                    elif t[0] == "word":
                        states.append(t[1])
                    else:
                        raise OneStepError("bad nabla member")
                    if self.peek() == ",":
                        self.next()
                    else:
                        break
            self.expect("}")
            return nabla(states)
        return self.atomic()

    def atomic(self):
        t = self.next()
        if t[0] == "(":
            f = self.formula()
            self.expect(")")
            return f
        if t[0] == "word":
            if t[1] == "tt":
                return OTop
            if t[1] == "ff":
                return OBot
            return oplit(t[1])
        if t[0] == "num":
            raise OneStepError("bare state atom outside a modality")
        raise OneStepError("bad one-step formula")

    def term(self):
        lhs = self.term_conj()
        while self.peek() == "|":
            self.next()
            lhs = lor(lhs, self.term_conj())
        return lhs

    def term_conj(self):
        lhs = self.term_atom()
        while self.peek() == "&":
            self.next()
            lhs = land(lhs, self.term_atom())
        return lhs

    def term_atom(self):
        t = self.next()
        if t[0] == "(":
            f = self.term()
            self.expect(")")
            return f
        if t[0] == "num":
            return latom(int(t[1]))
        if t[0] == "word":
            if t[1] == "tt":
                return LTop
            if t[1] == "ff":
                return LBot
            return latom(t[1])
        raise OneStepError("bad lattice term")
