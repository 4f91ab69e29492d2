import os
import sys
from fractions import Fraction

from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from ergolab.space import CirclePoint, ShiftPoint  # noqa: E402


def words(A=2, min_size=0, max_size=5):
    return st.lists(st.integers(0, A - 1), min_size=min_size, max_size=max_size).map(tuple)


def shift_points(A=2, max_pre=5, max_per=4):
    return st.builds(ShiftPoint, words(A, 0, max_pre), words(A, 1, max_per))


def fractions_01(max_den=64):
    return st.builds(lambda d, n: Fraction(n % d, d), st.integers(1, max_den), st.integers(0, 10 ** 6))


def circle_points(max_den=64):
    return fractions_01(max_den).map(CirclePoint)


def random_plan(rng, sft, delta, n_segments):
    """Random M_delta-spaced specification over admissible eventually periodic points."""
    from ergolab.specification import SpecificationPlan, modulus_sft

    M = modulus_sft(sft, delta).M
    segs, pos = [], rng.randint(0, 4)
    for _ in range(n_segments):
        while True:
            pre = [rng.randrange(sft.A) for _ in range(rng.randint(0, 3))]
            per = [rng.randrange(sft.A) for _ in range(rng.randint(1, 3))]
            x = ShiftPoint(pre, per)
            if sft.point_admissible(x):
                break
        length = rng.randint(0, 6)
        segs.append((pos, pos + length, x))
        pos += length + M + rng.randint(0, 3)
    return SpecificationPlan(segs)


ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
