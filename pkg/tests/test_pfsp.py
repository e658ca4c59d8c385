import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import all_makespans, random_matrix, simulate_makespan
from rlga_pfsp.pfsp import (
    Instance,
    InvalidPermutation,
    ParseError,
    makespan,
    parse_taillard,
    random_permutation,
    serialize_taillard,
    validate_permutation,
)
from rlga_pfsp.taillard import generate, parse_selector, select_instances, ta20_5

BLOCK_20_5 = """number of jobs, number of machines, initial seed, upper bound and lower bound :
          20           5   873654221        1278        1232
processing times :
""" + "\n".join(" ".join(str((i * 7 + j) % 50 + 1) for j in range(20)) for i in range(5)) + "\n"


def test_parse_header_and_shape():
    [inst] = parse_taillard(BLOCK_20_5, stem="tai20_5")
    assert (inst.n_jobs, inst.n_machines) == (20, 5)
    assert inst.upper_bound == 1278 and inst.lower_bound == 1232
    assert inst.id == "tai20_5_1"
    assert inst.proc_times[1][0] == 8


def test_parse_minimal_block():
    [inst] = parse_taillard("1 1\n7\n")
    assert inst.proc_times == ((7,),)
    assert inst.upper_bound is None and inst.lower_bound is None


def test_parse_two_blocks():
    insts = parse_taillard(BLOCK_20_5 + BLOCK_20_5, stem="f")
    assert [i.id for i in insts] == ["f_1", "f_2"]


@pytest.mark.parametrize("text, line", [
    ("2 x\n1 2\n", 1),
    ("2 2\n1 2\n3\n", 3),
    ("2 2\n1 2\n3 -4\n", 3),
    ("2 2\n1 2\n", 1),
])
def test_parse_errors_name_line(text, line):
    with pytest.raises(ParseError) as exc:
        parse_taillard(text)
    assert exc.value.line == line
    assert f"line {line}" in str(exc.value)


def test_bundled_ta001_matches_published_rows():
    inst = ta20_5(1)
    assert inst.proc_times[0][:5] == (54, 83, 15, 71, 77)
    assert inst.proc_times[4][-3:] == (18, 68, 28)
    assert (inst.upper_bound, inst.lower_bound) == (1278, 1232)
    assert generate(873654221, 20, 5).proc_times == inst.proc_times


def test_selector():
    assert parse_selector("tai20_5.txt:1,7") == ("tai20_5.txt", [1, 7])
    assert parse_selector("tai20_5.txt") == ("tai20_5.txt", None)
    ids = [i.id for i in select_instances("tai20_5.txt:1,7")]
    assert ids == ["tai20_5_1", "tai20_5_7"]
    with pytest.raises(ValueError):
        select_instances("tai20_5.txt:11")


def test_roundtrip_serialize():
    rng = np.random.default_rng(3)
    insts = [Instance(f"x_{k}", random_matrix(rng, 6, 3, 0, 99), 500, 400, seed=k + 1)
             for k in range(3)]
    back = parse_taillard(serialize_taillard(insts), stem="x")
    assert [b.proc_times for b in back] == [i.proc_times for i in insts]
    assert [b.lower_bound for b in back] == [400] * 3


def test_instance_invariants():
    with pytest.raises(ValueError):
        Instance("bad", ((1, 2), (3,)))
    with pytest.raises(ValueError):
        Instance("bad", ((1, -2),))
    with pytest.raises(ValueError):
        Instance("bad", ((1,),), upper_bound=3, lower_bound=5)
    Instance("zero", ((0, 5), (3, 0)))


def test_makespan_examples(tiny):
    assert makespan(Instance("chain", ((2,), (3,), (4,))), [0]) == 9
    assert makespan(tiny, [0, 1]) == 9
    assert makespan(tiny, [1, 0]) == 8
    # oracle agrees with the hand values
    assert simulate_makespan(tiny.proc_times, (0, 1)) == 9
    assert simulate_makespan(tiny.proc_times, (1, 0)) == 8


def test_makespan_rejects_invalid(tiny):
    with pytest.raises(InvalidPermutation):
        makespan(tiny, [0, 0])


def test_validate_permutation():
    inst = Instance("three", ((1, 1, 1),))
    assert validate_permutation(inst, [0, 1, 2]) == []
    assert any("duplicate" in v for v in validate_permutation(inst, [0, 0, 2]))
    assert any("length" in v for v in validate_permutation(inst, [0, 1]))
    assert any("out of range" in v for v in validate_permutation(inst, [0, 1, 3]))


def test_random_permutation_basics():
    assert random_permutation(1, np.random.default_rng(0)) == (0,)
    a = random_permutation(5, np.random.default_rng(9))
    b = random_permutation(5, np.random.default_rng(9))
    assert a == b
    with pytest.raises(ValueError):
        random_permutation(0, np.random.default_rng(0))


def test_random_permutation_uniform():
    rng = np.random.default_rng(2024)
    counts = {}
    for _ in range(6000):
        p = random_permutation(3, rng)
        counts[p] = counts.get(p, 0) + 1
    assert len(counts) == 6
    for c in counts.values():
        assert abs(c / 6000 - 1 / 6) <= 0.03


matrices = st.integers(1, 5).flatmap(
    lambda n: st.lists(st.lists(st.integers(0, 30), min_size=n, max_size=n), min_size=1, max_size=4)
)


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_makespan_matches_simulation_and_bounds(p):
    inst = Instance("h", p)
    arr = inst.as_array()
    for perm, ref in all_makespans(inst.proc_times).items():
        c = makespan(inst, perm)
        assert c == ref
        assert c >= arr.sum(axis=1).max()
        assert c >= arr.sum(axis=0).max()


def test_identical_jobs_swap_invariant():
    inst = Instance("twins", ((4, 7, 4), (2, 1, 2), (5, 3, 5)))
    assert makespan(inst, [0, 1, 2]) == makespan(inst, [2, 1, 0])
