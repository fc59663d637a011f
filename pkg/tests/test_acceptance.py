"""Acceptance suite: one criterion per test, one pass/fail line each.

Criterion 6 is implemented faithfully and is expected to fail: on finite
models that pass every frame condition the targeted implication is provably
valid (the no-forget condition around successor cycles forces knowledge to
commute with the successor), so no witness can exist.  The search runs and
the assertion records the gap honestly rather than weakening the criterion.
"""

import time

from conftest import record_acceptance as announce

from kxstit import formula as F
from kxstit.axioms import SuitePolicy, derived_theorem_suite, soundness_suite
from kxstit.checker import (check_refinement, eval_formula, expost_interim_gap_search,
                            extension, valid_on_model)
from kxstit.gen import GenParams, random_formula, random_model
from kxstit.model import KripkeModel, validate_frame
from kxstit.transform import (actualize, check_bounded_morphism,
                              truth_preservation, unravel, validate_window)


JUDGMENTS_A = [
    ("m2_h4", "~d_L & ~d_B", True),
    ("m9_h4", "d", True),
    ("m4_h9", "[Ags] X s", True),
    ("m1_h2", "X(~d_L & ~d_B)", True),
    ("m1_h10", "X [luther] X d_L", True),
    ("m4_h11", "Y [Ags] X d", False),
    ("m3_h7", "Y <> X [luther] X d_L", True),
    ("m4_h10", "[luther] X d_L", True),
    ("m4_h10", "[] ~K{luther} [luther] X d_L", True),
    ("m4_h10", "K{luther} [luther] X d_L", False),
    ("m4_h10", "[] K{luther} [] X Y f_B", False),
    ("m4_h10", "[] K{luther} <> K{luther} [luther] X s", False),
    ("m11_h6", "~K{luther} Y [benji] X d_B", True),
    ("m4_h10", "X K{luther} Y [Ags] X (d_L | d_B)", True),
    ("m4_h10", "X K{benji} Y [Ags] X (d_L | d_B)", True),
    # own-action knowledge mid-game
    ("m2_h2", "K{luther}[luther]X r_L | K{luther}[luther]X ~r_L", True),
    ("m5_h16", "K{luther}[luther]X r_L | K{luther}[luther]X ~r_L", True),
    # the defused branch: nobody knew the detonator was secured, everybody
    # realizes it after disclosure
    ("m4_h9", "~K{luther} Y [ethan] X f_B", True),
    ("m4_h9", "~K{benji} Y [ethan] X f_B", True),
    ("m4_h9", "X K{luther} Y [Ags] X (Y Y [ethan] X f_B)", True),
    ("m4_h9", "X K{benji} Y [Ags] X (Y Y [ethan] X f_B)", True),
]

JUDGMENTS_B = [
    ("m4_h10", "K{luther} [luther] X d_L", True),
    ("m4_h10", "[] K{luther} <> K{luther} [luther] X d_L", True),
    ("m4_h10", "[] K{luther} [] X Y f_B", True),
    ("m4_h10", "~X K{benji} Y [Ags] X Y [luther] X d_L", True),
    ("m4_h10", "X K{benji} Y [Ags] X (d_L | d_B)", True),
]


def test_criterion_1_figure1_regression(fig1a, fig1b):
    start = time.monotonic()
    failures = []
    for model, tag, judgments in ((fig1a, "a", JUDGMENTS_A), (fig1b, "b", JUDGMENTS_B)):
        for world, text, expect in judgments:
            got = eval_formula(model, world, F.parse(text))
            if got != expect:
                failures.append((tag, world, text, got, expect))
    elapsed = time.monotonic() - start
    ok = not failures and elapsed < 1.0
    announce(1, ok, f"figure-1 regression: {len(JUDGMENTS_A) + len(JUDGMENTS_B)} judgments, "
                    f"{len(failures)} wrong, {elapsed:.2f}s (budget 1s)")
    assert not failures, failures
    assert elapsed < 1.0


def test_criterion_2_soundness_suite(grid200):
    start = time.monotonic()
    report = soundness_suite(grid200, SuitePolicy(seed=17, fills_per_schema=10,
                                                  ia_max_agents=3),
                             n_bounds=[2] * len(grid200))
    elapsed = time.monotonic() - start
    ok = report.ok and elapsed < 60.0
    announce(2, ok, f"soundness: 200 models, {report.instances_checked} instances, "
                    f"{len(report.violations)} violations, {elapsed:.1f}s (budget 60s)")
    assert report.ok, report.lines()[:10]
    assert elapsed < 60.0


def test_criterion_3_derived_theorems(grid200):
    report = derived_theorem_suite(grid200, SuitePolicy(seed=23, fills_per_schema=10),
                                   n_bounds=[2] * len(grid200))
    announce(3, report.ok, f"derived theorems: {report.instances_checked} instances, "
                           f"{len(report.violations)} violations")
    assert report.ok, report.lines()[:10]


def test_criterion_4_refinement(grid200, fig1a, fig1b):
    bad = []
    for i, m in enumerate(grid200):
        samples = [random_formula(40_000 + 7 * i + j, 2, sorted(m.valuation),
                                  list(m.agents), reach=(1, 1)) for j in range(3)]
        rep = check_refinement(m, samples=samples)
        bad.extend(rep.counterexamples)
    # compiled scenario models: twenty boolean-fragment formulas per agent
    props = sorted(fig1a.valuation)
    samples = [F.Atom(p) for p in props]
    samples += [random_formula(50_000 + j, 2, props, ["luther"], reach=(0, 0))
                for j in range(20 - len(samples))]
    for m in (fig1a, fig1b):
        rep = check_refinement(m, agents=list(m.agents), samples=samples)
        bad.extend(rep.counterexamples)
    announce(4, not bad, f"refinement implications: {len(bad)} counterexamples "
                         f"(200 generated + both scenario models)")
    assert not bad, bad[:5]


def test_criterion_5_footnote_equivalences(grid200):
    bad = []
    for i, m in enumerate(grid200):
        a = m.agents[i % len(m.agents)]
        b = m.agents[(i + 1) % len(m.agents)]
        for j in range(3):
            phi = random_formula(60_000 + 5 * i + j, 2, sorted(m.valuation),
                                 list(m.agents), reach=(1, 0))
            ante = F.Box(F.Knows(a, F.Box(F.Next(phi))))
            ante2 = F.Box(F.Knows(a, F.Next(phi)))
            kh = F.Box(F.Knows(a, F.Diamond(F.Knows(a, F.Stit(a, F.Next(phi))))))
            kh2 = F.Diamond(F.Knows(a, F.Stit(a, F.Next(phi))))
            duijf = F.Implies(
                F.Knows(a, F.Stit(a, F.Next(F.Yesterday(F.Stit(b, F.Next(phi)))))),
                F.Box(F.Next(phi)))
            for name, f in (("ante<->", F.And(F.Implies(ante, ante2), F.Implies(ante2, ante))),
                            ("kh<->", F.And(F.Implies(kh, kh2), F.Implies(kh2, kh))),
                            ("know-other", duijf)):
                ok, witness = valid_on_model(m, f)
                if not ok:
                    bad.append((i, name, witness))
    announce(5, not bad, f"footnote equivalences and cross-agent settledness: "
                         f"{len(bad)} counterexamples over 200 models")
    assert not bad, bad[:5]


def test_criterion_6_nonvalidity_witness():
    """Spec'd witness search.  Expected (and documented) to fail: the finite
    frame class validates the implication, so the search exhausts without a
    witness; see the module docstring and the decisions ledger.
    """
    found = expost_interim_gap_search(seed_count=120, max_worlds=6)
    announce(6, found is not None,
             "non-validity witness search over <=6-world valid models: "
             + ("witness found" if found else
                "no witness exists (implication is valid on finite frame-valid models)"))
    assert found is not None, (
        "no frame-valid finite model can falsify the implication: the no-forget "
        "condition around successor cycles forces epistemic/successor commutation, "
        "making it valid; recorded as a specification defect in the decisions ledger")
    m, world, phi = found
    lhs = F.Next(F.Knows(m.agents[0], F.Yesterday(F.StitAgs(F.Next(F.Yesterday(
        F.Stit(m.agents[0], F.Next(phi))))))))
    assert eval_formula(m, world, lhs)


def test_finite_frame_validity_replacing_criterion_6(grid200):
    """The true finite-model fact behind criterion 6: the implication holds
    on every frame-valid model (documented divergence; the infinite tree
    semantics does falsify it, but no finite invertible-successor model
    can).
    """
    for i, m in enumerate(grid200[:60]):
        a = m.agents[i % len(m.agents)]
        phi = random_formula(70_000 + i, 2, sorted(m.valuation), list(m.agents), reach=(1, 1))
        lhs = F.Next(F.Knows(a, F.Yesterday(F.StitAgs(F.Next(F.Yesterday(
            F.Stit(a, F.Next(phi))))))))
        rhs = F.Knows(a, F.Stit(a, F.Next(phi)))
        ok, witness = valid_on_model(m, F.Implies(lhs, rhs))
        assert ok, (i, witness)


def test_criterion_7_transformations(grid50, super_additive_fixture):
    start = time.monotonic()
    bad = []
    mismatches = 0
    compared = 0
    for i, m in enumerate(grid50):
        win, proj = unravel(m, m.worlds[0], 2)
        frame = validate_window(win, "actual", 2)
        if not frame.ok:
            bad.append((i, "frame", [c.condition for c in frame.failed()]))
            continue
        morphism = check_bounded_morphism(proj, win, m)
        if not morphism.ok:
            bad.append((i, "morphism", morphism.counterexamples[:2]))
            continue
        formulas = [random_formula(80_000 + 9 * i + j, 3, sorted(m.valuation),
                                   list(m.agents), reach=(1, 1)) for j in range(5)]
        rep = truth_preservation(win, m, proj, formulas)
        compared += rep.compared
        mismatches += len(rep.mismatches)

    fx = super_additive_fixture
    win, proj = unravel(fx, "a", 2, require_valid=False)
    mat, mproj = actualize(win, n=2)
    additivity = next(c for c in validate_window(mat, "actual", 2).checks
                      if c.condition == "ADDITIVITY")
    if not additivity.passed:
        bad.append(("fixture", "additivity", additivity.explanation))
    if not check_bounded_morphism(mproj, mat, win).ok:
        bad.append(("fixture", "morphism", None))
    comp = {w: proj[mproj[w]] for w in mat.worlds}
    fx_formulas = [F.parse(t) for t in ["p", "~p", "X p", "Y p", "p & X ~p", "p -> Y p"]]
    rep = truth_preservation(mat, fx, comp, fx_formulas, margin=1)
    compared += rep.compared
    mismatches += len(rep.mismatches)

    elapsed = time.monotonic() - start
    ok = not bad and mismatches == 0 and elapsed < 120.0
    announce(7, ok, f"transformations: 50 unravelings + fixture actualization, "
                    f"{compared} truth comparisons, {mismatches} mismatches, "
                    f"{len(bad)} structural failures, {elapsed:.1f}s (budget 120s)")
    assert not bad, bad
    assert mismatches == 0
    assert elapsed < 120.0


def test_criterion_8_oracle_equivalence():
    triples = 0
    seed = 0
    while triples < 1000:
        m = random_model(GenParams(seed=90_000 + seed, agent_count=1 + seed % 3,
                                   box_class_count=1 + seed % 3))
        for j in range(2):
            f = random_formula(95_000 + 2 * seed + j, 3, sorted(m.valuation),
                               list(m.agents), reach=(2, 2), include_sugar=True)
            ext = extension(m, f)
            for w in m.worlds:
                assert eval_formula(m, w, f) == (w in ext)
                triples += 1
        seed += 1
    announce(8, True, f"oracle equivalence: {triples} (model, world, formula) "
                      f"triples, exact agreement")
    assert triples >= 1000
