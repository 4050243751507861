"""Hypothesis strategies for small instances."""

from hypothesis import strategies as st

from cspath.graph import ProblemInstance, build_graph


@st.composite
def small_instances(draw, max_n: int = 9, max_val: int = 5, max_budget: int = 25):
    n = draw(st.integers(2, max_n))
    pairs = draw(
        st.sets(
            st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
            .filter(lambda p: p[0] < p[1]),
            min_size=1, max_size=3 * n,
        )
    )
    edges = [(u, v, draw(st.integers(1, max_val)), draw(st.integers(1, max_val))) for u, v in sorted(pairs)]
    verts = draw(st.permutations(range(n)))
    k = draw(st.integers(1, n - 1))
    a = draw(st.integers(1, k))
    b = draw(st.integers(1, n - k))
    sources, targets = verts[:a], verts[k:k + b]
    M = draw(st.integers(1, max_budget))
    return ProblemInstance(build_graph(n, edges), sources, targets, M)
