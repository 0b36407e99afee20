import pytest

from symdefect.tables import (
    TABLE1_REFERENCE,
    TABLE2_REFERENCE,
    default_subset_count,
    ks_row,
    table1,
    table1_cell,
    table2,
    table2_cell,
    table3,
)


def test_reference_tables_shape():
    assert TABLE1_REFERENCE[(2, 8)] == 21 and TABLE1_REFERENCE[(4, 9)] == 32
    assert TABLE1_REFERENCE[(3, 6)] == "<>" and TABLE1_REFERENCE[(4, 6)] == "?"
    assert TABLE2_REFERENCE[10] == 576


@pytest.mark.parametrize("m, d", [(2, 2), (3, 2), (2, 3), (4, 3), (2, 4), (3, 4), (4, 4), (5, 4), (2, 6), (2, 8), (2, 9)])
def test_table1_cells(m, d):
    c = table1_cell(m, d)
    assert c.status == "match", c


def test_table1_subset_dependence_d9():
    c = table1_cell(3, 9)
    assert c.computed == 20
    assert "0x" in c.detail and "20x" in c.detail


def test_table1_skips_unknown():
    c = table1_cell(4, 6)
    assert c.status == "skipped" and c.computed is None


def test_table1_prime_columns():
    res = table1(dims=(5, 7))
    assert res.ok and all(c.computed == 0 for c in res.cells)


def test_subset_budget():
    assert default_subset_count(9, 4) == 24
    assert default_subset_count(9, 10) == 1


@pytest.mark.slow
def test_table2_default_range():
    res = table2()
    assert res.ok
    done = [c for c in res.cells if c.status == "match"]
    assert [c.computed for c in done] == [0, 4, 21, 36, 112, 120, 273]
    assert {c.key for c in res.cells if c.status == "long-running"} == {"k=9", "k=10"}


@pytest.mark.long_running
@pytest.mark.parametrize("k", [9, 10])
def test_table2_long(k):
    assert table2_cell(k).status == "match"


def test_table3():
    res = table3()
    assert res.ok
    assert [c.computed for c in res.cells if c.key.endswith(":Delta")] == [12, 7, 2]


def test_table3_flags_bookkeeping_for_first_row():
    row = ks_row("yu-oh-13")
    assert row.flags and "78/66" in row.flags[0]
    assert not ks_row("cabello-18").flags
    assert row.free_parameters == 0
