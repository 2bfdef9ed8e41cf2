"""Command-line front end: parsing, model checking, satisfiability,
equivalence, property decisions, fragment translation, automaton dumps and
the oracle harness.

Exit codes: 0 affirmative/success, 1 negative verdict, 2 usage or parse
error, 3 resource guard tripped.
"""

from __future__ import annotations

import argparse
import sys

from . import automata as A
from . import decide as D
from . import games as G
from . import models as M
from . import oracle as ORC
from . import syntax as S

EXIT_YES = 0
EXIT_NO = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3

PROPERTY_NAMES = {
    "monotone": "Monotone",
    "width": "FiniteWidth",
    "finite-width": "FiniteWidth",
    "depth": "FiniteDepth",
    "finite-depth": "FiniteDepth",
    "branch": "SingleBranch",
    "single-branch": "SingleBranch",
    "continuous": "Continuous",
    "continuity": "Continuous",
    "fully-additive": "FullyAdditive",
    "completely-additive": "CompletelyAdditive",
    "substructures": "PreservedUnderSubstructures",
}


def _parser():
    top = argparse.ArgumentParser(prog="mucalc",
                                  description="modal mu-calculus toolkit")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="echo the canonical form of a formula")
    p.add_argument("formula")

    p = sub.add_parser("nnf", help="print the negation normal form")
    p.add_argument("formula")

    p = sub.add_parser("mc", help="model check a formula at the model's point")
    p.add_argument("--model", required=True, help="model JSON file")
    p.add_argument("--state", type=int, default=None)
    p.add_argument("formula")

    p = sub.add_parser("sat", help="satisfiability")
    p.add_argument("formula")

    p = sub.add_parser("equiv", help="semantic equivalence of two formulas")
    p.add_argument("formula")
    p.add_argument("formula2")

    p = sub.add_parser("decide", help="decide a semantic property")
    p.add_argument("--property", required=True,
                   choices=sorted(PROPERTY_NAMES))
    p.add_argument("--letter", default="p")
    p.add_argument("formula")

    p = sub.add_parser("translate", help="fragment companion formula")
    p.add_argument("--fragment", required=True, choices=list(S.FRAGMENTS))
    p.add_argument("--letter", default="p")
    p.add_argument("formula")

    p = sub.add_parser("automaton", help="dump a pipeline stage")
    p.add_argument("--stage", required=True, choices=list(A.PIPELINE_STAGES))
    p.add_argument("--letter", default="p")
    p.add_argument("formula")

    p = sub.add_parser("oracle", help="cross-validation report")
    p.add_argument("--corpus", required=True,
                   help="file with one formula per line (# comments allowed)")
    p.add_argument("--max-states", type=int, default=2)
    p.add_argument("--letter", default="p")
    return top


def main(argv=None):
    try:
        args = _parser().parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else 0
    try:
        return _dispatch(args)
    except (S.ParseError, S.NegativeBoundVariable) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except A.ResourceLimitError as e:
        print(f"resource limit: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except (M.ModelError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


def _dispatch(args):
    if args.command == "parse":
        print(S.to_string(S.parse(args.formula)))
        return EXIT_YES
    if args.command == "nnf":
        print(S.to_string(S.to_nnf(S.parse(args.formula))))
        return EXIT_YES
    if args.command == "mc":
        with open(args.model) as fh:
            model = M.model_from_json(fh.read())
        state = args.state if args.state is not None else model.point
        if state is None:
            print("error: no state given and the model has no point",
                  file=sys.stderr)
            return EXIT_USAGE
        verdict = G.model_check(S.parse(args.formula), model, state)
        print("true" if verdict else "false")
        return EXIT_YES if verdict else EXIT_NO
    if args.command == "sat":
        verdict = D.sat(S.parse(args.formula))
        print("sat" if verdict else "unsat")
        return EXIT_YES if verdict else EXIT_NO
    if args.command == "equiv":
        verdict = D.equiv(S.parse(args.formula), S.parse(args.formula2))
        print("yes" if verdict else "no")
        return EXIT_YES if verdict else EXIT_NO
    if args.command == "decide":
        prop = PROPERTY_NAMES[args.property]
        verdict = D.decide_property(S.parse(args.formula), prop, args.letter)
        print("yes" if verdict else "no")
        return EXIT_YES if verdict else EXIT_NO
    if args.command == "translate":
        out = D.translate_fragment(S.parse(args.formula), args.fragment,
                                   args.letter)
        print(S.to_string(out))
        return EXIT_YES
    if args.command == "automaton":
        init = D.pipeline(S.to_nnf(S.parse(args.formula)), args.stage,
                          args.letter)
        print(A.automaton_to_text(init))
        return EXIT_YES
    if args.command == "oracle":
        corpus = []
        with open(args.corpus) as fh:
            for line in fh:
                line = line.strip()
                if line and not line.startswith("#"):
                    corpus.append(S.parse(line))
        letters = sorted({args.letter}
                         | {x for f in corpus for x in S.free_vars(f)})
        results = ORC.cross_validate(corpus, max_states=args.max_states,
                                     letters=letters, p=args.letter)
        for line in ORC.report_lines(results):
            print(line)
        return EXIT_YES if all(r.passed for r in results) else EXIT_NO
    raise ValueError(f"unknown command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
