"""Brute-force semantic ground truth on small finite models: literal checks
of the property definitions that make sense on finite models, plus the
cross-validation harness.

Finite-model caveat: finite width, finite depth, single branch and
continuity are trivially true on finite models (the whole state space
witnesses them), so there is deliberately no semantic oracle for those
four; they are validated through fragment membership and equivalence
checks instead.  Asking for one raises UnsupportedPropertyError.
"""

from __future__ import annotations

from . import decide as D
from . import games as G
from . import models as M
from . import syntax as S


class UnsupportedPropertyError(Exception):
    """Raised for properties whose definition is vacuous on finite models."""


SEMANTIC_ORACLES = ("Monotone", "FullyAdditive", "CompletelyAdditive")
_VACUOUS_ON_FINITE = ("FiniteWidth", "FiniteDepth", "SingleBranch", "Continuous")


def check_monotone_on(xi, p, model, state):
    """All pairs U subset of U': truth at state survives enlarging V(p)."""
    xi = S.ensure_names(S.to_nnf(xi))
    blocks = sorted(_subsets(range(model.n)), key=sorted)
    truth = {}
    for u in blocks:
        truth[u] = state in M.eval_naive(xi, M.set_p(model, p, u))
    for u in blocks:
        for v in blocks:
            if u <= v and truth[u] and not truth[v]:
                return False
    return True


def check_fully_additive_on(xi, p, model, state):
    """Truth iff truth with p restricted to a singleton inside V(p)."""
    xi = S.ensure_names(S.to_nnf(xi))
    lhs = state in M.eval_naive(xi, model)
    vp = sorted(model.valuation.get(p, frozenset()))
    rhs = any(state in M.eval_naive(xi, M.restrict_p(model, p, {u}))
              for u in vp)
    return lhs == rhs


def check_completely_additive_on(xi, p, model, state):
    """Truth iff truth with p restricted to some singleton of the model."""
    xi = S.ensure_names(S.to_nnf(xi))
    lhs = state in M.eval_naive(xi, model)
    rhs = any(state in M.eval_naive(xi, M.restrict_p(model, p, {u}))
              for u in range(model.n))
    return lhs == rhs


def check_normal_on(xi, p, model, state):
    """Falsity once p is interpreted as the empty set."""
    xi = S.ensure_names(S.to_nnf(xi))
    return state not in M.eval_naive(xi, M.set_p(model, p, frozenset()))


def check_property_on(xi, prop, p, model, state):
    if prop in _VACUOUS_ON_FINITE:
        raise UnsupportedPropertyError(
            f"{prop} is trivially true on finite models; no semantic oracle")
    checks = {
        "Monotone": check_monotone_on,
        "FullyAdditive": check_fully_additive_on,
        "CompletelyAdditive": check_completely_additive_on,
    }
    if prop not in checks:
        raise ValueError(f"unknown property {prop!r}")
    return checks[prop](xi, p, model, state)


def _subsets(items):
    items = list(items)
    for mask in range(1 << len(items)):
        yield frozenset(x for i, x in enumerate(items) if mask >> i & 1)


# ---------------------------------------------------------------------------
# cross-validation report

class CheckResult:
    __slots__ = ("name", "formula", "model", "passed", "detail")

    def __init__(self, name, formula, model, passed, detail=""):
        self.name = name
        self.formula = formula
        self.model = model
        self.passed = passed
        self.detail = detail

    def line(self):
        verdict = "PASS" if self.passed else "FAIL"
        model = M.model_to_json(self.model) if self.model is not None else "-"
        extra = f" {self.detail}" if self.detail else ""
        return (f"CHECK {self.name} formula={S.to_string(self.formula)!r} "
                f"model={model} verdict={verdict}{extra}")


def _minimize_counterexample(bad, candidates):
    """Re-run a failing predicate on lexicographically earlier models."""
    for m in candidates:
        if bad(m):
            return m
    return None


def cross_validate(corpus, max_states=2, letters=("p", "q"), p="p",
                   decide_fn=None, translate_fn=None):
    """Run the oracle-versus-procedure consistency checks over a corpus of
    formulas and all pointed models up to the bound.  Returns a sorted list
    of CheckResult entries; failures carry a witnessing model.

    decide_fn/translate_fn default to the decision procedures and exist so
    tests can inject mutants.
    """
    decide_fn = decide_fn or D.decide_property
    translate_fn = translate_fn or D.translate_fragment
    results = []
    pool = list(M.enumerate_models(max_states, letters))

    for xi in corpus:
        nf = S.ensure_names(S.to_nnf(xi))

        def bad_nnf(m):
            return M.eval_naive(nf, m) != M.eval_naive(S.ensure_names(xi), m)

        witness = _minimize_counterexample(bad_nnf, pool)
        results.append(CheckResult("nnf-semantics", xi, witness, witness is None))

        def bad_mc(m):
            return (m.point in M.eval_naive(nf, m)) != G.model_check(nf, m, m.point)

        witness = _minimize_counterexample(bad_mc, pool)
        results.append(CheckResult("game-vs-naive", xi, witness, witness is None))

    for xi in corpus:
        nf = S.ensure_names(S.to_nnf(xi))
        for prop in SEMANTIC_ORACLES:
            try:
                verdict = decide_fn(xi, prop, p)
            except Exception as e:  # report, never crash the harness
                results.append(CheckResult(f"decide-{prop}", xi, None, False,
                                           detail=f"error={type(e).__name__}"))
                continue
            if not verdict:
                continue
            # necessary condition: the semantic oracle finds no counterexample

            def bad_sem(m):
                return not check_property_on(nf, prop, p, m, m.point)

            witness = _minimize_counterexample(bad_sem, pool)
            results.append(CheckResult(f"oracle-{prop}", xi, witness,
                                        witness is None))
    return results


def report_lines(results):
    return [r.line() for r in sorted(results, key=lambda r: (r.name, S.to_string(r.formula)))]
