"""Semantic evaluation over Kripke structures and knowledge-stage analysis.

Two independent evaluation paths are kept on purpose: ``eval_formula`` walks
the formula top-down per the satisfaction clauses, while ``extension``
computes truth sets bottom-up over the subformula table.  Each acts as the
oracle for the other in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import formula as F
from .errors import UnknownAgent, UnknownWorld
from .model import validate_frame


def _check_world(m, w):
    if w not in m._box_of:
        raise UnknownWorld(f"unknown world {w!r}")


def _check_agent(m, a):
    if a not in m.choice:
        raise UnknownAgent(f"unknown agent {a!r}")


def _pred(m, w):
    if m.pred is None:
        raise UnknownWorld("temporal relation is not invertible; Y undefined")
    return m.pred[w]


def eval_formula(m, w, f):
    """Truth of ``f`` at world ``w`` (top-down recursion).

    Total on structurally well-formed models whether or not they pass frame
    validation; macros are expanded up front, sugar is evaluated by its own
    clause.
    """
    _check_world(m, w)
    return _eval(m, w, F.expand_macros(f))


def _eval(m, w, f):
    if isinstance(f, F.Atom):
        return m.holds(f.name, w)
    if isinstance(f, F.Not):
        return not _eval(m, w, f.child)
    if isinstance(f, F.And):
        return _eval(m, w, f.left) and _eval(m, w, f.right)
    if isinstance(f, F.Or):
        return _eval(m, w, f.left) or _eval(m, w, f.right)
    if isinstance(f, F.Implies):
        return (not _eval(m, w, f.left)) or _eval(m, w, f.right)
    if isinstance(f, F.Box):
        return all(_eval(m, v, f.child) for v in m.box_cell(w))
    if isinstance(f, F.Diamond):
        return any(_eval(m, v, f.child) for v in m.box_cell(w))
    if isinstance(f, F.Next):
        return _eval(m, m.succ[w], f.child)
    if isinstance(f, F.Yesterday):
        return _eval(m, _pred(m, w), f.child)
    if isinstance(f, F.Stit):
        _check_agent(m, f.agent)
        return all(_eval(m, v, f.child) for v in m.choice_cell(f.agent, w))
    if isinstance(f, F.StitAgs):
        return all(_eval(m, v, f.child) for v in m.ags_cell(w))
    if isinstance(f, F.Knows):
        _check_agent(m, f.agent)
        return all(_eval(m, v, f.child) for v in m.epi_cell(f.agent, w))
    if isinstance(f, F.CommonKnows):
        return all(_eval(m, v, f.child) for v in m.common_cell(w))
    raise TypeError(f"cannot evaluate {f!r}")


def extension(m, f):
    """Set of worlds satisfying ``f``, computed bottom-up over subformulas.

    Internally works on bitmasks indexed by the model's canonical world
    order, one pass per subformula.
    """
    f = F.expand_macros(f)
    idx = {w: i for i, w in enumerate(m.worlds)}
    full = (1 << len(m.worlds)) - 1

    def cells_mask(cells):
        return [sum(1 << idx[w] for w in cell) for cell in cells]

    box_masks = cells_mask(m.r_box)
    ags_masks = cells_mask(m.choice_ags)
    choice_masks = {a: cells_mask(m.choice[a]) for a in m.agents}
    epi_masks = {a: cells_mask(m.epistemic[a]) for a in m.agents}

    def quantify(masks, child):
        out = 0
        for cm in masks:
            if cm & child == cm:
                out |= cm
        return out

    table = {}
    for g in F.subformulas(f):
        if isinstance(g, F.Atom):
            v = m.valuation.get(g.name, frozenset())
            table[g] = sum(1 << idx[w] for w in v)
        elif isinstance(g, F.Not):
            table[g] = full & ~table[g.child]
        elif isinstance(g, F.And):
            table[g] = table[g.left] & table[g.right]
        elif isinstance(g, F.Or):
            table[g] = table[g.left] | table[g.right]
        elif isinstance(g, F.Implies):
            table[g] = (full & ~table[g.left]) | table[g.right]
        elif isinstance(g, F.Box):
            table[g] = quantify(box_masks, table[g.child])
        elif isinstance(g, F.Diamond):
            child = table[g.child]
            table[g] = full & ~quantify(box_masks, full & ~child)
        elif isinstance(g, F.Next):
            child = table[g.child]
            table[g] = sum(1 << idx[w] for w in m.worlds if child >> idx[m.succ[w]] & 1)
        elif isinstance(g, F.Yesterday):
            child = table[g.child]
            table[g] = sum(1 << idx[w] for w in m.worlds if child >> idx[_pred(m, w)] & 1)
        elif isinstance(g, F.Stit):
            _check_agent(m, g.agent)
            table[g] = quantify(choice_masks[g.agent], table[g.child])
        elif isinstance(g, F.StitAgs):
            table[g] = quantify(ags_masks, table[g.child])
        elif isinstance(g, F.Knows):
            _check_agent(m, g.agent)
            table[g] = quantify(epi_masks[g.agent], table[g.child])
        elif isinstance(g, F.CommonKnows):
            child = table[g.child]
            out = 0
            for w in m.worlds:
                cell = m.common_cell(w)
                cm = sum(1 << idx[v] for v in cell)
                if cm & child == cm:
                    out |= 1 << idx[w]
            table[g] = out
        else:
            raise TypeError(f"cannot evaluate {g!r}")
    mask = table[f]
    return {w for w in m.worlds if mask >> idx[w] & 1}


def valid_on_model(m, f):
    """(True, None) when ``f`` holds at every world, else (False, least
    world where it fails) in the canonical world order.
    """
    ext = extension(m, f)
    for w in m.worlds:
        if w not in ext:
            return False, w
    return True, None


# ---------------------------------------------------------------------------
# knowledge stages

@dataclass
class KnowledgeReport:
    agent: str
    world: str
    target: F.Formula
    ex_ante: bool
    ex_interim: bool
    ex_post: bool
    know_how: bool
    does: bool
    expanded: dict = field(default_factory=dict)
    frame_warnings: list = field(default_factory=list)

    @property
    def knowingly_does(self):
        return self.ex_interim

    def lines(self):
        out = [f"knowledge report: agent={self.agent} world={self.world} target={F.to_text(self.target)}"]
        for name in ("does", "ex_ante", "ex_interim", "ex_post", "know_how"):
            shown = self.expanded.get(name, "")
            out.append(f"  {name:<10} {str(getattr(self, name)).lower():<5}  {shown}")
        out.append(f"  knowingly_does {str(self.knowingly_does).lower()}")
        for w in self.frame_warnings:
            out.append(f"  warning: {w}")
        return out


def knowledge_report(m, w, agent, target, frame_mode="actual", frame_n=None):
    """Evaluate the four knowledge-stage notions (plus plain doing) for
    ``agent`` about ``target`` at ``w``.  Expanded formulas are included
    verbatim in the report; a warning is attached when the model fails frame
    validation.
    """
    _check_agent(m, agent)
    _check_world(m, w)
    stages = {
        "does": F.Stit(agent, F.Next(target)),
        "ex_ante": F.expand_macros(F.Macro("ExAnte", agent, target)),
        "ex_interim": F.expand_macros(F.Macro("ExInterim", agent, target)),
        "ex_post": F.expand_macros(F.Macro("ExPost", agent, target)),
        "know_how": F.expand_macros(F.Macro("Kh", agent, target)),
    }
    flags = {name: eval_formula(m, w, g) for name, g in stages.items()}
    warnings = []
    n = frame_n if frame_n is not None else max(len(m.choice_ags), 1)
    report = validate_frame(m, frame_mode, n)
    if not report.ok:
        bad = ", ".join(c.condition for c in report.failed())
        warnings.append(f"model fails frame conditions: {bad}; stage implications may not hold")
    return KnowledgeReport(
        agent=agent, world=w, target=target,
        ex_ante=flags["ex_ante"], ex_interim=flags["ex_interim"],
        ex_post=flags["ex_post"], know_how=flags["know_how"], does=flags["does"],
        expanded={k: F.to_text(v) for k, v in stages.items()},
        frame_warnings=warnings,
    )


@dataclass
class RefinementReport:
    checked: int
    counterexamples: list  # (agent, formula text, implication name, witness world)

    @property
    def ok(self):
        return not self.counterexamples


def expost_interim_gap_search(seed_count=200, max_worlds=6, fills_per_model=6):
    """Seeded search for a frame-valid model with a world where an agent
    knows after disclosure that it brought something about without having
    known it while acting: X K_a Y [Ags] X Y [a] X phi true but
    K_a [a] X phi false.

    Returns (model, world, formula) for the first hit, else None.

    No hit can exist on finite models passing every frame condition: with an
    invertible successor, iterating the no-forget condition around the
    successor cycles forces every epistemic relation to commute with the
    successor, so the knowledge and next-moment operators commute, the
    inverse axioms cancel the X/Y pairs, and the left-hand side quantifies
    over a superset (coalition cells are reflexive) of the right-hand side's
    worlds.  The search is kept as the executable record of that fact.
    """
    from .gen import GenParams, random_formula, random_model
    from .model import validate_frame
    import random as _random

    rng = _random.Random(99)
    for seed in range(seed_count):
        for agent_count in (1, 2):
            for classes in (1, 2, 3):
                params = GenParams(seed=seed, agent_count=agent_count,
                                   box_class_count=classes,
                                   epistemic_coarseness=rng.random(),
                                   max_class_size=2)
                m = random_model(params)
                if len(m.worlds) > max_worlds:
                    continue
                if not validate_frame(m, "actual", 2).ok:
                    continue
                for a in m.agents:
                    for k in range(fills_per_model):
                        phi = random_formula(rng.randrange(1 << 30), 2,
                                             sorted(m.valuation), list(m.agents),
                                             reach=(1, 1))
                        lhs = F.Next(F.Knows(a, F.Yesterday(
                            F.StitAgs(F.Next(F.Yesterday(F.Stit(a, F.Next(phi))))))))
                        rhs = F.Knows(a, F.Stit(a, F.Next(phi)))
                        gap = F.And(lhs, F.Not(rhs))
                        ext = extension(m, gap)
                        if ext:
                            return m, min(ext), phi
    return None


def check_refinement(m, agents=None, samples=None):
    """Validate the two knowledge-stage refinement implications
    (before-choice knowledge entails knowingly-doing entails
    after-disclosure knowledge) for each agent over sample formulas.
    """
    agents = list(agents) if agents is not None else list(m.agents)
    if samples is None:
        samples = [F.Atom(p) for p in sorted(m.valuation)] or [F.Atom("p")]
    counterexamples = []
    checked = 0
    for a in agents:
        _check_agent(m, a)
        for phi in samples:
            ante = F.expand_macros(F.Macro("ExAnte", a, phi))
            interim = F.expand_macros(F.Macro("ExInterim", a, phi))
            post = F.expand_macros(F.Macro("ExPost", a, phi))
            for name, impl in (("ex_ante->ex_interim", F.Implies(ante, interim)),
                               ("ex_interim->ex_post", F.Implies(interim, post))):
                checked += 1
                ok, witness = valid_on_model(m, impl)
                if not ok:
                    counterexamples.append((a, F.to_text(phi), name, witness))
    return RefinementReport(checked, counterexamples)
