"""Constructive, seed-deterministic generators of frame-valid models and of
random formulas.

Finite models with an invertible successor are rigid: settledness classes
form cycles of equal-sized classes, the successor maps each class bijectively
onto the next, and the temporal frame conditions force every choice partition
to be the trivial one on its class (any finer cell would break the
choice-next commutation conditions).  The generator therefore emits cycle
models with trivial choice structure, random valuations, and epistemic
partitions built as successor-invariant closures of random seed pairs,
coarsened only while the class-matching (uniformity) condition survives.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import formula as F
from .errors import UnsatisfiableParams
from .model import KripkeModel, validate_frame


@dataclass(frozen=True)
class GenParams:
    seed: int = 0
    agent_count: int = 2
    n_bound: int = 2
    box_class_count: int = 2
    cycle_structure: tuple = None  # partition of class indices into cycles
    epistemic_coarseness: float = 0.5
    props: tuple = ("p", "q", "r")
    max_class_size: int = 3

    def validate(self):
        if self.agent_count < 1:
            raise UnsatisfiableParams("agent_count must be >= 1")
        if self.n_bound < 1:
            raise UnsatisfiableParams("n_bound must be >= 1")
        if self.box_class_count < 1:
            raise UnsatisfiableParams("box_class_count must be >= 1")
        if not 0.0 <= self.epistemic_coarseness <= 1.0:
            raise UnsatisfiableParams("epistemic_coarseness must be in [0, 1]")
        if self.max_class_size < 1:
            raise UnsatisfiableParams("max_class_size must be >= 1")
        if self.cycle_structure is not None:
            flat = [i for cyc in self.cycle_structure for i in cyc]
            if sorted(flat) != list(range(self.box_class_count)):
                raise UnsatisfiableParams("cycle_structure must partition the class indices")


def random_model(params):
    """Generate a model that passes every frame condition by construction
    (mode=actual, bound params.n_bound); identical seeds give identical
    serialized models.
    """
    params.validate()
    rng = random.Random(params.seed)

    if params.cycle_structure is not None:
        cycles = [list(c) for c in params.cycle_structure]
    else:
        indices = list(range(params.box_class_count))
        cycles = []
        while indices:
            take = rng.randint(1, len(indices))
            cycles.append(indices[:take])
            indices = indices[take:]

    # equal class size along each cycle (forced by the class-to-class
    # bijection), chosen per cycle
    size_of = {}
    for cyc in cycles:
        size = rng.randint(1, params.max_class_size)
        for ci in cyc:
            size_of[ci] = size

    worlds = []
    class_worlds = {}
    for ci in range(params.box_class_count):
        ws = [f"w{ci}_{k}" for k in range(size_of[ci])]
        class_worlds[ci] = ws
        worlds.extend(ws)

    succ = {}
    for cyc in cycles:
        for pos, ci in enumerate(cyc):
            nxt = cyc[(pos + 1) % len(cyc)]
            perm = list(range(size_of[ci]))
            rng.shuffle(perm)
            for k, t in enumerate(perm):
                succ[class_worlds[ci][k]] = class_worlds[nxt][t]

    agents = [f"a{i}" for i in range(params.agent_count)]
    r_box = [class_worlds[ci] for ci in range(params.box_class_count)]
    choice = {a: [list(c) for c in r_box] for a in agents}

    epistemic = {a: _random_epistemic(rng, worlds, succ, r_box, params.epistemic_coarseness)
                 for a in agents}

    valuation = {}
    for p in params.props:
        valuation[p] = {w for w in worlds if rng.random() < 0.5}

    m = KripkeModel(agents, worlds, r_box, succ, choice, epistemic,
                    choice_ags=None, valuation=valuation)
    report = validate_frame(m, "actual", params.n_bound)
    if not report.ok:
        raise UnsatisfiableParams(
            f"generator produced an invalid model (bug): {[c.condition for c in report.failed()]}")
    return m


def _random_epistemic(rng, worlds, succ, r_box, coarseness):
    """Successor-invariant equivalence built by merging random seed pairs and
    closing each merge under the successor orbit; a merge is kept only if the
    uniformity condition (epistemic links extend across whole settledness
    classes) still holds, with fallback to the identity partition.
    """
    parent = {w: w for w in worlds}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union_orbit(u, v):
        # close (u, v) under the successor permutation on pairs
        start = (u, v)
        cur = start
        while True:
            a, b = cur
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
            cur = (succ[a], succ[b])
            if cur == start:
                break

    def snapshot():
        groups = {}
        for w in worlds:
            groups.setdefault(find(w), set()).add(w)
        return [frozenset(g) for g in groups.values()]

    box_of = {}
    for i, cell in enumerate(r_box):
        for w in cell:
            box_of[w] = i

    def uniform_ok(cells):
        for cell in cells:
            boxes = {box_of[w] for w in cell}
            for b in boxes:
                # every world in box b must reach every box linked from b
                for target in boxes:
                    for v in r_box[b]:
                        vc = next(c for c in cells if v in c)
                        if not any(box_of[u] == target for u in vc):
                            return False
        return True

    attempts = max(0, int(round(coarseness * len(worlds))))
    for _ in range(attempts):
        u, v = rng.choice(worlds), rng.choice(worlds)
        if find(u) == find(v):
            continue
        backup = dict(parent)
        union_orbit(u, v)
        if not uniform_ok(snapshot()):
            parent.clear()
            parent.update(backup)
    return [sorted(c) for c in snapshot()]


def random_formula(seed, max_depth, props, agents, reach=(1, 1), include_sugar=False):
    """Seed-deterministic random formula in the primitive base (optionally
    with | -> <> sugar) whose temporal reach stays within ``reach``.
    """
    rng = random.Random(seed)
    fwd, bwd = reach

    def build(depth, offset):
        ops = ["atom"]
        if depth > 0:
            ops += ["not", "and", "box", "stit", "knows", "stit_ags"]
            if include_sugar:
                ops += ["or", "implies", "diamond"]
            if offset + 1 <= fwd:
                ops.append("next")
            if offset - 1 >= -bwd:
                ops.append("yesterday")
        op = rng.choice(ops)
        if op == "atom":
            return F.Atom(rng.choice(props))
        if op == "not":
            return F.Not(build(depth - 1, offset))
        if op == "and":
            return F.And(build(depth - 1, offset), build(depth - 1, offset))
        if op == "or":
            return F.Or(build(depth - 1, offset), build(depth - 1, offset))
        if op == "implies":
            return F.Implies(build(depth - 1, offset), build(depth - 1, offset))
        if op == "box":
            return F.Box(build(depth - 1, offset))
        if op == "diamond":
            return F.Diamond(build(depth - 1, offset))
        if op == "next":
            return F.Next(build(depth - 1, offset + 1))
        if op == "yesterday":
            return F.Yesterday(build(depth - 1, offset - 1))
        if op == "stit":
            return F.Stit(rng.choice(agents), build(depth - 1, offset))
        if op == "stit_ags":
            return F.StitAgs(build(depth - 1, offset))
        if op == "knows":
            return F.Knows(rng.choice(agents), build(depth - 1, offset))
        raise AssertionError(op)

    return build(max_depth, 0)


def model_grid(count, base_seed=0, agent_counts=(1, 2, 3), class_counts=(1, 2, 3),
               n_bound=2, props=("p", "q", "r")):
    """Deterministic family of generated models cycling over a small
    parameter grid; used by the validity suites.
    """
    models = []
    for i in range(count):
        params = GenParams(
            seed=base_seed + i,
            agent_count=agent_counts[i % len(agent_counts)],
            n_bound=n_bound,
            box_class_count=class_counts[(i // len(agent_counts)) % len(class_counts)],
            epistemic_coarseness=(i % 5) / 4.0,
            props=props,
        )
        models.append(random_model(params))
    return models
