"""Smoke test for the Python bindings: build with `maturin develop` or
`pip install --no-build-isolation ./crates/py`, then run this file."""

import cutwidth


def main():
    k4 = cutwidth.Graph(4, [(u, v) for u in range(4) for v in range(u + 1, 4)])
    k, order = k4.cutwidth()
    assert k == 4 and k4.width(order) == 4
    assert k4.decide(3) is None
    assert k4.oracle_cutwidth()[0] == 4

    path = cutwidth.Graph.parse("p cw 5 4\ne 1 2\ne 2 3\ne 3 4\ne 4 5\n")
    assert path.decide(1) is not None
    tau = path.compress([0, 2, 4, 1, 3], 1)
    assert tau is not None and path.width(tau) == 1
    assert path.is_linked(path.make_linked(tau))
    assert path.reduce(1)["outcome"] == "reduced"
    assert cutwidth.Graph.parse(path.render()).canonical_code() == path.canonical_code()

    doubled = cutwidth.Graph(2, [(0, 1, 2)])
    assert doubled.is_obstruction(1)
    assert doubled.dcw(1)[0] == 1
    assert cutwidth.Graph(2, [(0, 1)]).immerses_in(doubled, False)

    obs = cutwidth.search_obstructions(0, 3)
    assert [g.edges for g in obs] == [[(0, 1, 1)]]
    assert cutwidth.obstruction_size_bound(0) == "22265110462466"

    try:
        cutwidth.Graph(2, [(0, 0)])
    except ValueError:
        pass
    else:
        raise AssertionError("loop edge accepted")
    print("python smoke test passed")


if __name__ == "__main__":
    main()
