from __future__ import annotations

from hypothesis import given
from hypothesis import strategies as st

from dml.unionfind import UnionFind, quotient

from oracles import closure_partition


def test_singletons_until_joined():
    uf = UnionFind("abc")
    assert uf.classes() == [["a"], ["b"], ["c"]]
    uf.union("a", "c")
    assert uf.classes() == [["a", "c"], ["b"]]
    assert uf.find("c") == uf.find("a")
    assert "b" in uf and "z" not in uf


def test_union_is_idempotent():
    uf = UnionFind([1, 2])
    uf.union(1, 2)
    uf.union(2, 1)
    uf.union(1, 1)
    assert uf.classes() == [[1, 2]]


def test_quotient_tags_sides():
    classes = quotient(["m0", "m1"], ["m0", "m2"], [("m0", "m0")])
    assert classes == [[(1, "m0"), (2, "m0")], [(1, "m1")], [(2, "m2")]]


def test_quotient_of_empty_sides():
    assert quotient([], [], []) == []


@given(
    st.integers(0, 6),
    st.integers(0, 6),
    st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5)), max_size=10),
)
def test_quotient_matches_transitive_closure(n1, n2, pairs):
    left, right = list(range(n1)), list(range(n2))
    glue = [(a, b) for a, b in pairs if a < n1 and b < n2]
    got = {frozenset(c) for c in quotient(left, right, glue)}
    assert got == closure_partition(left, right, glue)
