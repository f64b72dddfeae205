from fractions import Fraction

from linematch.randomness import RandomSource, ScriptedSource, enumerate_branches


def test_streams_are_reproducible_and_children_differ():
    a = [RandomSource(5).choose((0.5, 0.5)) for _ in range(1)]
    draws = lambda src: [src.choose((0.3, 0.3, 0.4)) for _ in range(50)]
    assert draws(RandomSource(5)) == draws(RandomSource(5))
    assert draws(RandomSource(5).child(3)) == draws(RandomSource(5, (3,)))
    assert draws(RandomSource(5).child(3)) != draws(RandomSource(5).child(4))
    assert a[0] in (0, 1)


def test_forced_choice_consumes_nothing():
    src = RandomSource(1)
    ref = RandomSource(1)
    assert src.choose((0, 1)) == 1
    assert src.choose((1, 0)) == 0
    assert src.choose((0.5, 0.5)) == ref.choose((0.5, 0.5))


def test_enumeration_is_exact():
    def fn(src):
        first = src.choose((Fraction(1, 3), Fraction(2, 3)))
        if first == 0:
            return "a"
        return "b" if src.choose((Fraction(1, 4), Fraction(3, 4))) == 0 else "c"

    assert enumerate_branches(fn) == {"a": Fraction(1, 3), "b": Fraction(1, 6), "c": Fraction(1, 2)}


def test_scripted_source_replays():
    src = ScriptedSource((1, 0))
    assert src.choose((0.5, 0.5)) == 1
    assert src.choose((0.5, 0.5)) == 0
    assert src.child(9) is src
