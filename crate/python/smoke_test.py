"""Smoke test for the Python bindings.

Build and install first:  pip install -e crates/py --no-build-isolation
"""

import blockset


def main():
    assert blockset.qbin(4, 2, 3) == 130
    assert blockset.n_q(4, 2, 3) == blockset.n_q_oracle(4, 2, 3) == 37
    assert blockset.qbin(40, 20, 7) > 2**64

    t = blockset.tetrahedron(3, 3)
    assert len(t) == 9 and t.kind == "projective"
    assert t.is_strong_blocking(1)["holds"]
    lifted = t.lift()
    assert lifted.is_affine_blocking(2)["holds"]
    assert lifted.projectivize() == t
    assert blockset.PointSet.parse(t.dumps()) == t

    line = blockset.PointSet(3, 3, [[1, 0, 0], [0, 1, 0], [1, 1, 0]], kind="projective")
    verdict = line.is_strong_blocking(1)
    assert not verdict["holds"] and verdict["outcome"] == "fails"

    tetracode = blockset.LinearCode(3, [[1, 0, 1, 1], [0, 1, 1, 2]])
    assert (tetracode.n, tetracode.k, tetracode.min_distance()) == (4, 2, 3)
    assert tetracode.is_minimal()["holds"]
    assert tetracode.is_trifferent()["holds"]
    assert tetracode.blocking_set().is_affine_blocking(2)["holds"]
    assert not blockset.LinearCode(5, [[1, 0, 1, 1], [0, 1, 1, 2]]).is_perfect_hash(5)["holds"]

    cert = blockset.solve_bprime(3)
    assert cert["optimum"] == 9 and cert["verified"]

    steps = {row["n"]: row["t_l_min"] for row in blockset.tl_table(18)}
    assert (steps[1], steps[4], steps[9], steps[14], steps[18]) == (3, 9, 27, 81, 81)

    assert blockset.compute_cq(3)["c_q"] > 1.1375
    report = blockset.bounds(3, 5, 2)
    assert not report["violations"]

    s, info = blockset.random_blocking_set(3, 5, 2, seed=7)
    assert info["verified"] and s.is_affine_blocking(2)["holds"]

    pts = blockset.PointSet(3, 3, [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]], kind="projective")
    edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    union, info = blockset.graph_construction(pts, edges)
    assert info["condition"] and info["verified"]
    assert blockset.vertex_integrity(4, [(0, 1), (1, 2), (2, 3)]) == (3, [0, 2])

    try:
        blockset.compute_cq(6)
    except blockset.BlocksetError as e:
        assert "prime power" in str(e)
    else:
        raise AssertionError("expected BlocksetError")

    print("python smoke test passed")


if __name__ == "__main__":
    main()
