import pytest
from hypothesis import given
from hypothesis import strategies as st

from apsq.errors import SpecError
from apsq.gridspec import Task, parse_gridspec

BASE = "task=Delta\na=0..10\nd=1..3\nN=1..4\n"


def test_parse_and_values():
    g = parse_gridspec(BASE + "N.step=linear 2\nfilter=admissible_paper\nfilter=thm1_case!=Case1\n# comment\n")
    assert g.task is Task.DELTA
    assert g.axis_values("a") == list(range(11))
    assert g.axis_values("N") == [1, 3]
    assert [f.canonical() for f in g.filters] == ["admissible_paper", "thm1_case!=Case1"]


def test_geometric_step():
    g = parse_gridspec("task=Delta\na=1..1000\na.step=geometric 10\nd=1\nN=5,1,3\n")
    assert g.axis_values("a") == [1, 10, 100, 1000]
    assert g.axis_values("N") == [1, 3, 5]
    g = parse_gridspec("task=Delta\na=1..10\na.step=geometric 1.1\nd=1\nN=1\n")
    assert g.axis_values("a") == list(range(1, 11))  # ratio too small to skip: always advance


@given(st.integers(1, 10**6), st.integers(0, 10**6), st.sampled_from(["1.5", "2", "7/3", "10"]))
def test_geometric_axis_is_increasing_and_bounded(lo, extra, r):
    g = parse_gridspec(f"task=Delta\na={lo}..{lo + extra}\na.step=geometric {r}\nd=1\nN=1\n")
    vals = g.axis_values("a")
    assert vals[0] == lo and vals[-1] <= lo + extra
    assert all(x < y for x, y in zip(vals, vals[1:]))


def test_hash_is_canonical():
    g1 = parse_gridspec(BASE)
    g2 = parse_gridspec("N=1..4\nd=1..3\n  a = 0..10  \ntask=Delta\nepsilon=0.05\n")
    assert g1.grid_hash() == g2.grid_hash()
    assert g1.grid_hash() != parse_gridspec(BASE.replace("0..10", "0..11")).grid_hash()
    assert g1.with_task(Task.RATIO_THM1).task is Task.RATIO_THM1


@pytest.mark.parametrize(
    "text,path",
    [
        ("a=1\n", "task"),
        ("task=Nope\n", "task"),
        ("task=Delta\nd=1\nN=1\n", "a"),
        ("task=Delta\na=5..1\nd=1\nN=1\n", "a"),
        ("task=Delta\na=x\nd=1\nN=1\n", "a"),
        ("task=Delta\na=1..5\na.step=geometric 1\nd=1\nN=1\n", "a.step"),
        ("task=Delta\na=1..5\na.step=linear 0\nd=1\nN=1\n", "a.step"),
        ("task=Delta\na=1..5\na.step=cubic 2\nd=1\nN=1\n", "a.step"),
        ("task=Delta\na=0..5\na.step=geometric 2\nd=1\nN=1\n", "a.lo"),
        ("task=Delta\na=1\nd=0..2\nN=1\n", "d.lo"),
        ("task=Delta\na=1\nd=1\nN=1\nfilter=bogus\n", "filter[0]"),
        ("task=Delta\na=1\nd=1\nN=1\nfilter=thm1_case=Case9\n", "filter[0]"),
        ("task=Delta\na=1\nd=1\nN=1\nwhatever=3\n", "whatever"),
        ("task=Delta\na=1\na=2\nd=1\nN=1\n", "a"),
        ("task=Delta\na=1\nd=1\nN=1\nepsilon=abc\n", "epsilon"),
        ("task=SalieScan\nq=3\na=1\nH=1\nK=1\nfilter=admissible_paper\n", "filter"),
        ("task=HuxleyScan\na=1\nd=1\nN=1\ncurve=ellipse\n", "curve"),
        ("garbage line\n", "line 1"),
    ],
)
def test_errors_carry_field_path(text, path):
    with pytest.raises(SpecError) as exc:
        parse_gridspec(text)
    assert exc.value.path == path
