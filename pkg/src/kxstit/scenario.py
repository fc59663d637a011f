"""Branching discrete-time scenarios (finite moment trees) and their
compilation to Kripke structures.

A scenario is a finite tree of moments; histories are root-to-leaf paths and
evaluation points are situations (moment, history).  Compilation turns each
situation into a world and completes the temporal successor into a bijection
by closing every history into a cycle through two synthetic stutter worlds:

    pre_h -> <root,h> -> ... -> <leaf,h> -> post_h -> pre_h

Stutter worlds freeze the valuation of the situation they extend.  All
pre-root stutters form a single settledness class with trivial choices, each
post-leaf stutter is its own class, and stutter epistemic cells mirror the
pattern of the adjacent real layer without ever linking to real worlds.  This
confines the unavoidable wrap-around failures of the temporal frame
conditions to stutter-world pairs.
"""

from __future__ import annotations

from .errors import BDTInvariantViolation, SchemaError
from .model import FORMAT_VERSION, KripkeModel

import json


class BDTScenario:
    """Finite tree of moments with per-moment choice partitions over the
    histories through each moment, an epistemic partition on situations, and
    a situation valuation.

    Histories are derived: leaves are enumerated in the order induced by the
    ``moments`` list (depth-first), and history ``i`` is the root-to-leaf path
    of the ``i``-th leaf.  Situations are written ``"<moment>_<history>"``.
    """

    def __init__(self, agents, moments, parent, choice_at, epistemic_sit,
                 valuation_sit, history_names=None):
        self.agents = tuple(agents)
        self.moments = tuple(moments)
        if len(set(self.moments)) != len(self.moments) or not self.moments:
            raise SchemaError("moments must be distinct and non-empty")
        self.parent = dict(parent)
        roots = [m for m in self.moments if m not in self.parent]
        if len(roots) != 1:
            raise SchemaError(f"scenario must have exactly one root, got {roots}")
        self.root = roots[0]
        for child, par in self.parent.items():
            if child not in self.moments or par not in self.moments:
                raise SchemaError(f"parent map references unknown moment {child} -> {par}")

        children = {m: [] for m in self.moments}
        for m in self.moments:
            if m != self.root:
                children[self.parent[m]].append(m)
        # keep child order as given by the moments list
        order = {m: i for i, m in enumerate(self.moments)}
        for m in children:
            children[m].sort(key=order.__getitem__)
        self.children = children

        # cycle check
        for m in self.moments:
            seen, cur = set(), m
            while cur in self.parent:
                if cur in seen:
                    raise SchemaError(f"parent map has a cycle through {cur}")
                seen.add(cur)
                cur = self.parent[cur]

        leaves = [m for m in self.moments if not children[m]]
        self.histories = []
        self.history_moments = {}
        names = history_names or [f"h{i + 1}" for i in range(len(leaves))]
        if len(names) != len(leaves):
            raise SchemaError("history_names length must match leaf count")
        for name, leaf in zip(names, leaves):
            path = [leaf]
            while path[-1] in self.parent:
                path.append(self.parent[path[-1]])
            self.histories.append(name)
            self.history_moments[name] = tuple(reversed(path))

        self.moment_histories = {m: tuple(h for h in self.histories
                                           if m in self.history_moments[h])
                                 for m in self.moments}

        self.choice_at = {}
        for a in self.agents:
            table = choice_at.get(a, {})
            self.choice_at[a] = {}
            for m in self.moments:
                cells = table.get(m)
                hs = set(self.moment_histories[m])
                if cells is None:
                    cells = [sorted(hs)]
                norm = [frozenset(c) for c in cells]
                if sorted(h for c in norm for h in c) != sorted(hs) or \
                        sum(len(c) for c in norm) != len(hs):
                    raise SchemaError(f"choice_at[{a}][{m}] is not a partition of the histories through {m}")
                self.choice_at[a][m] = tuple(sorted(norm, key=min))

        self.epistemic_sit = {}
        all_sits = {self.sit(m, h) for h in self.histories for m in self.history_moments[h]}
        for a in self.agents:
            cells = epistemic_sit.get(a)
            if cells is None:
                norm = [frozenset([s]) for s in sorted(all_sits)]
            else:
                norm = [frozenset(c) for c in cells]
                covered = [s for c in norm for s in c]
                if sorted(covered) != sorted(all_sits):
                    raise SchemaError(f"epistemic_sit[{a}] is not a partition of the situations")
            self.epistemic_sit[a] = tuple(sorted(norm, key=min))

        self.valuation_sit = {p: frozenset(sits) for p, sits in valuation_sit.items()}
        for p, sits in self.valuation_sit.items():
            bad = sits - all_sits
            if bad:
                raise SchemaError(f"valuation_sit[{p}] references unknown situations {sorted(bad)}")
        self.situations = frozenset(all_sits)

    @staticmethod
    def sit(moment, history):
        return f"{moment}_{history}"

    def next_moment(self, m, h):
        path = self.history_moments[h]
        i = path.index(m)
        return path[i + 1] if i + 1 < len(path) else None

    def prev_moment(self, m, h):
        path = self.history_moments[h]
        i = path.index(m)
        return path[i - 1] if i > 0 else None

    def choice_cell(self, agent, m, h):
        for cell in self.choice_at[agent][m]:
            if h in cell:
                return cell
        raise SchemaError(f"history {h} missing from choice_at[{agent}][{m}]")

    # -- invariants ---------------------------------------------------------
    def check_invariants(self):
        """Raise BDTInvariantViolation on the first failed tree-frame
        condition: no choice between undivided histories, independence of
        agency, and the no-forget condition on the situation relation.
        """
        # undivided histories: h, h' sharing a moment strictly after m lie in
        # the same cell of every agent's partition at m
        for m in self.moments:
            for child in self.children[m]:
                hs = self.moment_histories[child]
                for a in self.agents:
                    first = self.choice_cell(a, m, hs[0])
                    if any(h not in first for h in hs):
                        raise BDTInvariantViolation(
                            "no_choice_between_undivided_histories",
                            list(hs), f"histories through {child} split at {m} for {a}")

        # independence of agency: every selection of one cell per agent meets
        for m in self.moments:
            hs = set(self.moment_histories[m])
            sel = [None] * len(self.agents)

            def walk(i, current):
                if not current:
                    raise BDTInvariantViolation(
                        "independence_of_agency",
                        [m], f"empty selection {[min(c) for c in sel[:i]]} at {m}")
                if i == len(self.agents):
                    return
                for cell in self.choice_at[self.agents[i]][m]:
                    sel[i] = cell
                    walk(i + 1, current & cell)

            walk(0, hs)

        # no forget: related successors force related predecessors, whenever
        # both predecessors exist in the finite tree
        pred_sit = {}
        for h in self.histories:
            path = self.history_moments[h]
            for i, m in enumerate(path):
                if i > 0:
                    pred_sit[self.sit(m, h)] = self.sit(path[i - 1], h)
        for a in self.agents:
            cell_of = {}
            for i, cell in enumerate(self.epistemic_sit[a]):
                for s in cell:
                    cell_of[s] = i
            for cell in self.epistemic_sit[a]:
                withpred = [s for s in sorted(cell) if s in pred_sit]
                for s in withpred[1:]:
                    if cell_of[pred_sit[s]] != cell_of[pred_sit[withpred[0]]]:
                        raise BDTInvariantViolation(
                            "no_forget", [withpred[0], s],
                            f"predecessors not epistemically related for {a}")

    # -- serialization ------------------------------------------------------
    def to_doc(self):
        return {
            "format_version": FORMAT_VERSION,
            "agents": sorted(self.agents),
            "moments": list(self.moments),
            "parent": {m: self.parent[m] for m in sorted(self.parent)},
            "history_names": list(self.histories),
            "choice_at": {a: {m: sorted((sorted(c) for c in self.choice_at[a][m]), key=lambda c: c[0])
                              for m in self.moments} for a in sorted(self.agents)},
            "epistemic_sit": {a: sorted((sorted(c) for c in self.epistemic_sit[a]), key=lambda c: c[0])
                              for a in sorted(self.agents)},
            "valuation_sit": {p: sorted(s) for p, s in sorted(self.valuation_sit.items())},
        }

    def dumps(self):
        return json.dumps(self.to_doc(), indent=2, sort_keys=True) + "\n"


def load_scenario(document):
    if isinstance(document, str):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as e:
            raise SchemaError(f"not valid JSON: {e}") from None
    else:
        doc = document
    if not isinstance(doc, dict):
        raise SchemaError("scenario document must be an object")
    if doc.get("format_version") != FORMAT_VERSION:
        raise SchemaError(f"unsupported format_version {doc.get('format_version')!r}")
    for key in ("agents", "moments", "parent", "choice_at", "epistemic_sit", "valuation_sit"):
        if key not in doc:
            raise SchemaError(f"missing field {key!r}")
    return BDTScenario(doc["agents"], doc["moments"], doc["parent"], doc["choice_at"],
                       doc["epistemic_sit"], doc["valuation_sit"], doc.get("history_names"))


# ---------------------------------------------------------------------------
# compilation

def bdt_to_kripke(scenario):
    """Compile a scenario to a Kripke structure (situations as worlds plus
    per-history stutter completion).  Raises BDTInvariantViolation when the
    scenario breaks a tree-frame condition.
    """
    s = scenario
    s.check_invariants()

    pre = {h: f"pre_{h}" for h in s.histories}
    post = {h: f"post_{h}" for h in s.histories}
    worlds = sorted(s.situations) + sorted(pre.values()) + sorted(post.values())

    succ = {}
    for h in s.histories:
        path = s.history_moments[h]
        succ[pre[h]] = s.sit(path[0], h)
        for i in range(len(path) - 1):
            succ[s.sit(path[i], h)] = s.sit(path[i + 1], h)
        succ[s.sit(path[-1], h)] = post[h]
        succ[post[h]] = pre[h]

    r_box = [ [s.sit(m, h) for h in s.moment_histories[m]] for m in s.moments ]
    r_box.append(sorted(pre.values()))
    r_box.extend([p] for p in sorted(post.values()))

    choice = {}
    for a in s.agents:
        cells = []
        for m in s.moments:
            for cell in s.choice_at[a][m]:
                cells.append([s.sit(m, h) for h in cell])
        cells.append(sorted(pre.values()))
        cells.extend([p] for p in sorted(post.values()))
        choice[a] = cells

    epistemic = {}
    for a in s.agents:
        cells = [sorted(c) for c in s.epistemic_sit[a]]
        # stutter layers mirror the adjacent real layer, never linking to it
        root_cells = {}
        leaf_cells = {}
        for i, cell in enumerate(s.epistemic_sit[a]):
            for h in s.histories:
                path = s.history_moments[h]
                if s.sit(path[0], h) in cell:
                    root_cells.setdefault(i, []).append(pre[h])
                if s.sit(path[-1], h) in cell:
                    leaf_cells.setdefault(i, []).append(post[h])
        cells.extend(sorted(v) for v in root_cells.values())
        cells.extend(sorted(v) for v in leaf_cells.values())
        epistemic[a] = cells

    valuation = {}
    for p, sits in s.valuation_sit.items():
        ws = set(sits)
        for h in s.histories:
            path = s.history_moments[h]
            if s.sit(path[0], h) in sits:
                ws.add(pre[h])
            if s.sit(path[-1], h) in sits:
                ws.add(post[h])
        valuation[p] = ws

    return KripkeModel(s.agents, worlds, r_box, succ, choice, epistemic,
                       choice_ags=None, valuation=valuation)


# ---------------------------------------------------------------------------
# the bomb-squad scenario

def figure1_scenario(case="a"):
    """Three agents defuse two linked bombs.

    ethan moves first (which fail-safe detonators he secures), then luther
    and benji simultaneously cut a red or green wire on their bombs.  Atoms:
    d_L / d_B (bomb L / B detonates), d (both), s (defused), r_L (red wire of
    L cut), f_B (fail-safe of B active).

    Case "a": luther knows only his own wire choice mid-game.  Case "b":
    luther additionally knows which detonators were secured, so his epistemic
    cells separate the mid-game moments (and, forced by no-forget, the
    outcome moments).
    """
    if case not in ("a", "b"):
        raise ValueError("case must be 'a' or 'b'")
    agents = ("benji", "ethan", "luther")
    moments = [f"m{i}" for i in range(1, 22)]
    parent = {}
    for i in range(2, 6):
        parent[f"m{i}"] = "m1"
    for i in range(6, 22):
        parent[f"m{i}"] = f"m{2 + (i - 6) // 4}"

    hs = [f"h{i}" for i in range(1, 17)]
    mid = {h: f"m{2 + i // 4}" for i, h in enumerate(hs)}
    leaf = {h: f"m{6 + i}" for i, h in enumerate(hs)}

    # wire choices per history within each mid-game moment block, matching
    # the outcome table: index 0: (G_L,R_B) 1: (R_L,R_B) 2: (R_L,G_B) 3: (G_L,G_B)
    red_l = {h for i, h in enumerate(hs) if i % 4 in (1, 2)}
    red_b = {h for i, h in enumerate(hs) if i % 4 in (0, 1)}

    choice_at = {a: {} for a in agents}
    choice_at["ethan"]["m1"] = [hs[0:4], hs[4:8], hs[8:12], hs[12:16]]
    for m in ("m2", "m3", "m4", "m5"):
        block = [h for h in hs if mid[h] == m]
        choice_at["luther"][m] = [[h for h in block if h in red_l],
                                  [h for h in block if h not in red_l]]
        choice_at["benji"][m] = [[h for h in block if h in red_b],
                                 [h for h in block if h not in red_b]]

    # outcomes: which bombs go off on each history
    outcome = {
        "h1": "d_L", "h2": "s", "h3": "d_B", "h4": "d",
        "h5": "d", "h6": "d_B", "h7": "s", "h8": "d_L",
        "h9": "s", "h10": "d_L", "h11": "d", "h12": "d_B",
        "h13": "d", "h14": "d", "h15": "d", "h16": "d",
    }

    sit = BDTScenario.sit
    val = {"d_L": set(), "d_B": set(), "d": set(), "s": set(), "r_L": set(), "f_B": set()}
    for h in hs:
        out = outcome[h]
        target = val[out] if out != "d" else None
        lw = sit(leaf[h], h)
        if out == "d":
            val["d_L"].add(lw)
            val["d_B"].add(lw)
            val["d"].add(lw)
        else:
            target.add(lw)
        if h in red_l:
            val["r_L"].add(lw)
    for h in hs[0:4] + hs[8:12]:  # fail-safe of B active after D_{L+B} or D_B
        val["f_B"].add(sit(mid[h], h))
        val["f_B"].add(sit(leaf[h], h))

    # epistemic structure
    epi = {}
    mid_sits = lambda pred: [sit(mid[h], h) for h in hs if pred(h)]
    root_sits = [sit("m1", h) for h in hs]

    # luther: at m1 nothing is known beyond the setting; mid-game he knows his
    # wire; at the outcome he knows both wire cuts and whether the bombs blew,
    # but not which bomb
    profile_groups = {}
    for h in hs:
        if outcome[h] == "s":
            profile_groups[("s", h)] = [h]
        else:
            key = (h in red_l, h in red_b)
            profile_groups.setdefault(key, []).append(h)
    luther_cells = [root_sits]
    if case == "a":
        luther_cells.append(mid_sits(lambda h: h in red_l))
        luther_cells.append(mid_sits(lambda h: h not in red_l))
        for group in profile_groups.values():
            luther_cells.append([sit(leaf[h], h) for h in group])
    else:
        for m in ("m2", "m3", "m4", "m5"):
            luther_cells.append([sit(m, h) for h in hs if mid[h] == m and h in red_l])
            luther_cells.append([sit(m, h) for h in hs if mid[h] == m and h not in red_l])
        # no-forget forces the outcome cells to separate by moment as well
        for group in profile_groups.values():
            for h in group:
                luther_cells.append([sit(leaf[h], h)])
    epi["luther"] = luther_cells

    benji_cells = [root_sits,
                   mid_sits(lambda h: h in red_b),
                   mid_sits(lambda h: h not in red_b)]
    for group in profile_groups.values():
        benji_cells.append([sit(leaf[h], h) for h in group])
    epi["benji"] = benji_cells

    epi["ethan"] = None  # finest partition: identity

    valuation = {p: sorted(ws) for p, ws in val.items() if ws}
    return BDTScenario(agents, moments, parent, choice_at, epi, valuation, history_names=hs)
