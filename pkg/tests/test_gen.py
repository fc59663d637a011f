import pytest

from kxstit import formula as F
from kxstit.errors import UnsatisfiableParams
from kxstit.gen import GenParams, model_grid, random_formula, random_model
from kxstit.model import validate_frame


def test_forced_one_world_model():
    m = random_model(GenParams(seed=4, agent_count=1, n_bound=1,
                               box_class_count=1, max_class_size=1))
    assert len(m.worlds) == 1 and m.succ[m.worlds[0]] == m.worlds[0]
    assert validate_frame(m, "actual", 1).ok


def test_same_seed_same_model():
    a = random_model(GenParams(seed=42, agent_count=2, box_class_count=3))
    b = random_model(GenParams(seed=42, agent_count=2, box_class_count=3))
    assert a.dumps() == b.dumps()
    c = random_model(GenParams(seed=43, agent_count=2, box_class_count=3))
    assert c.dumps() != a.dumps()


def test_grid_all_valid():
    models = model_grid(60, base_seed=900)
    assert all(validate_frame(m, "actual", 2).ok for m in models)


def test_grid_coverage_includes_multicycle_and_coarse_knowledge():
    models = model_grid(60, base_seed=900)
    multicycle = False
    coarse = False
    for m in models:
        classes = {min(m.box_cell(w)) for w in m.worlds}
        starts = set()
        for w in m.worlds:
            cur, seen = w, set()
            while cur not in seen:
                seen.add(cur)
                cur = m.succ[cur]
            starts.add(frozenset(seen))
        if len(starts) > 1:
            multicycle = True
        if any(any(len(c) > 1 for c in m.epistemic[a]) for a in m.agents):
            coarse = True
        del classes
    assert multicycle and coarse


def test_cycle_structure_respected():
    params = GenParams(seed=1, box_class_count=3, cycle_structure=((0, 1), (2,)))
    m = random_model(params)
    assert validate_frame(m, "actual", 2).ok
    with pytest.raises(UnsatisfiableParams):
        GenParams(seed=1, box_class_count=3, cycle_structure=((0, 1),)).validate()


def test_unsatisfiable_params():
    for bad in (GenParams(agent_count=0), GenParams(n_bound=0),
                GenParams(box_class_count=0), GenParams(epistemic_coarseness=2.0)):
        with pytest.raises(UnsatisfiableParams):
            bad.validate()


def test_random_formula_reach_zero_has_no_temporal_operators():
    for seed in range(80):
        f = random_formula(seed, 4, ["p", "q"], ["a"], reach=(0, 0))
        assert not any(isinstance(g, (F.Next, F.Yesterday)) for g in F.subformulas(f))


def test_random_formula_deterministic_and_reach_bounded():
    assert random_formula(5, 3, ["p"], ["a"]) == random_formula(5, 3, ["p"], ["a"])
    for seed in range(300):
        f = random_formula(seed, 4, ["p", "q"], ["a", "b"], reach=(2, 1))
        dp = F.depth_profile(f)
        assert dp.forward_reach <= 2 and dp.backward_reach <= 1
