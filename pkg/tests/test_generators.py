import pytest

from linematch.algorithms import run
from linematch.core import validate_instance
from linematch.generators import KINDS, BadParams, generate_instance


@pytest.mark.parametrize("kind", KINDS)
def test_generated_instances_are_strict_and_reproducible(kind):
    for n in (2, 5, 33):
        inst = generate_instance(kind, n, 4)
        assert inst.n == n and len(inst.requests) == n
        validate_instance(inst, strict=True)
        assert inst == generate_instance(kind, n, 4)


def test_seeds_differ():
    assert generate_instance("uniform", 20, 1) != generate_instance("uniform", 20, 2)


def test_geometric_gaps():
    s = generate_instance("geometric", 6, 0).servers
    assert [b - a for a, b in zip(s, s[1:])] == [1, 2, 4, 8, 16]
    assert s[-1] - s[0] == 2 ** 5 - 1


def test_harmonic_adversary_hurts_greedy_not_opt():
    ratios = []
    for n in (8, 12, 16):
        tr = run(generate_instance("harmonic_adversary", n, 0), "greedy")
        assert tr.opt == 2
        ratios.append(tr.ratio)
    assert ratios[0] < ratios[1] < ratios[2] and ratios[2] > 1000


def test_bad_params():
    with pytest.raises(BadParams):
        generate_instance("zigzag", 4)
    with pytest.raises(BadParams):
        generate_instance("uniform", 1)
