"""Satisfiability, validity, equivalence, the fragment translations and the
decision procedures for the seven semantic properties (plus preservation
under substructures).
"""

from __future__ import annotations

from . import automata as A
from . import onestep as O
from . import parity as P
from . import syntax as S
from .parity import EXISTS, FORALL

PROPERTIES = (
    "Monotone", "FiniteWidth", "FiniteDepth", "SingleBranch",
    "Continuous", "FullyAdditive", "CompletelyAdditive",
    "PreservedUnderSubstructures",
)

PROPERTY_FRAGMENT = {
    "Monotone": "M",
    "FiniteWidth": "W",
    "FiniteDepth": "D",
    "SingleBranch": "B",
    "Continuous": "C",
    "FullyAdditive": "F",
    "CompletelyAdditive": "A",
    "PreservedUnderSubstructures": "U",
}

_disj_cache = {}
_sat_cache = {}
_pipeline_cache = {}
_translation_cache = {}
_known_automaton = {}
_complement_cache = {}


def clear_caches():
    _disj_cache.clear()
    _sat_cache.clear()
    _pipeline_cache.clear()
    _translation_cache.clear()
    _known_automaton.clear()
    _complement_cache.clear()


def _disjunctive(xi):
    out = _disj_cache.get(xi)
    if out is None:
        out = A.simulate(A.from_formula(xi))
        _disj_cache[xi] = out
    return out


def sat(xi):
    """Satisfiability via the emptiness game of the equivalent disjunctive
    automaton: Exists picks consistent disjuncts, Forall picks cover
    members; Exists wins from the initial state iff some pointed model
    satisfies the formula."""
    xi = S.prepare(S.to_nnf(xi))
    out = _sat_cache.get(xi)
    if out is None:
        out = _sat_game(_disjunctive(xi))
        _sat_cache[xi] = out
    return out


def _sat_game(init):
    aut = init.automaton
    owner = []
    prio = []
    succ = []
    ids = {}

    def pos(key, own, pr):
        pid = ids.get(key)
        if pid is None:
            pid = len(owner)
            ids[key] = pid
            owner.append(own)
            prio.append(pr)
            succ.append([])
        return pid

    for a in aut.states:
        pos(("s", a), EXISTS, aut.priority[a])
    for a in aut.states:
        spid = ids[("s", a)]
        for (pi, b) in aut.transitions[a].disjuncts:
            if not O.pi_consistent(pi):
                continue
            dpid = pos(("d", a, pi, b), FORALL, 0)
            succ[spid].append(dpid)
            for x in sorted(b):
                succ[dpid].append(ids[("s", x)])
    game = P.ParityGame(owner, prio, succ)
    solution = P.solve(game)
    return ids[("s", init.initial)] in solution.win_ex


def valid(xi):
    return not sat(S.negate(S.to_nnf(xi)))


def equiv(xi, psi):
    """Semantic equivalence, via a quick hunt for a small separating model
    followed by an automaton-level language equivalence check."""
    xi = S.to_nnf(xi)
    psi = S.to_nnf(psi)
    if xi is psi:
        return True
    if separating_model(xi, psi) is not None:
        return False
    return A.automata_equiv(_automaton_for(xi), _automaton_for(psi),
                            _complement_cache)


def _automaton_for(xi):
    """An initialized modal automaton equivalent to the formula; formulas
    produced by translate_fragment reuse their pipeline automaton."""
    known = _known_automaton.get(xi)
    if known is not None:
        return known
    return _disjunctive(S.prepare(xi))


def separating_model(xi, psi, bound=3):
    """A pointed model on which the formulas disagree, if one exists within
    the exhaustive small-model bound; None otherwise."""
    from . import models as M
    letters = sorted(xi._fv | psi._fv)
    if len(letters) > 2:
        bound = min(bound, 2)
    if len(letters) > 4:
        return None
    a = S.ensure_names(xi)
    b = S.ensure_names(psi)
    for m in M.enumerate_models(bound, letters):
        if (m.point in M.eval_naive(a, m)) != (m.point in M.eval_naive(b, m)):
            return m
    return None


def pipeline(xi, stage, p="p"):
    xi = S.to_nnf(xi)
    key = (xi, stage, p)
    out = _pipeline_cache.get(key)
    if out is None:
        out = A.pipeline(xi, stage, p)
        _pipeline_cache[key] = out
    return out


def translate_fragment(xi, fragment, p="p"):
    """The effective companion formula in the fragment: equivalence with it
    decides the corresponding semantic property."""
    if fragment not in S.FRAGMENTS:
        raise ValueError(f"unknown fragment {fragment!r}")
    xi = S.to_nnf(xi)
    key = (xi, fragment, p)
    out = _translation_cache.get(key)
    if out is None:
        staged = pipeline(xi, fragment, p)
        out = A.to_formula(staged)
        _translation_cache[key] = out
        # the translation is the pipeline automaton rendered as a formula;
        # remember the automaton so later equivalence checks reuse it
        _known_automaton.setdefault(out, staged)
    return out


def decide_property(xi, prop, p="p", continuous_mode="translation"):
    """Decide a semantic property of xi with respect to the letter p.

    Continuity supports two modes that must agree: "translation" compares
    against the continuous fragment translation, "conjunction" combines the
    monotone, finite-width and finite-depth decisions.
    """
    if prop not in PROPERTIES:
        raise ValueError(f"unknown property {prop!r}")
    if prop == "Continuous" and continuous_mode == "conjunction":
        return (decide_property(xi, "Monotone", p)
                and decide_property(xi, "FiniteWidth", p)
                and decide_property(xi, "FiniteDepth", p))
    fragment = PROPERTY_FRAGMENT[prop]
    xi = S.to_nnf(xi)
    # the paper's shortcut: the formula has the property iff its disjunctive
    # automaton is equivalent to the transformed automaton
    if separating_model(xi, translate_fragment(xi, fragment, p)) is not None:
        return False
    return A.automata_equiv(pipeline(xi, "disj", p), pipeline(xi, fragment, p),
                            _complement_cache)
