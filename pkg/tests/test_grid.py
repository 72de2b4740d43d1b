import numpy as np
import pytest

from parabolic2d import (build_grid, embed, lex_index, new_field, restrict,
                         to_interior_grid, validate_field)


def test_build_grid_paper_mesh():
    g = build_grid(500, 500, 8, 8)
    assert g.hx == pytest.approx(62.5) and g.hy == pytest.approx(62.5)
    assert g.hx * g.Mx == pytest.approx(g.X, abs=1e-12)
    assert g.n_interior == 49


def test_build_grid_smallest():
    g = build_grid(1, 1, 2, 2)
    assert g.n_interior == 1
    XX, YY = g.interior_mesh()
    assert XX.ravel()[0] == pytest.approx(0.5)
    assert YY.ravel()[0] == pytest.approx(0.5)


def test_build_grid_anisotropic_counts():
    g = build_grid(500, 250, 10, 5)
    assert g.hx == pytest.approx(50.0) and g.hy == pytest.approx(50.0)


@pytest.mark.parametrize("X,Y,Mx,My", [(0, 1, 4, 4), (1, -1, 4, 4),
                                       (1, 1, 1, 4), (1, 1, 4, 0)])
def test_build_grid_rejects(X, Y, Mx, My):
    with pytest.raises(ValueError):
        build_grid(X, Y, Mx, My)


def test_lex_index_values():
    assert lex_index(1, 1, 8) == 0
    assert lex_index(7, 1, 8) == 6
    assert lex_index(2, 3, 9) == 17


def test_lex_index_rejects_out_of_range():
    with pytest.raises(ValueError):
        lex_index(0, 1, 8)
    with pytest.raises(ValueError):
        lex_index(8, 1, 8)
    with pytest.raises(ValueError):
        lex_index(3, 0, 8)


def test_lex_index_bijection_exhaustive():
    for Mx in range(2, 17):
        for My in range(2, 17):
            seen = set()
            for j in range(1, My):
                for i in range(1, Mx):
                    k = lex_index(i, j, Mx)
                    assert 0 <= k < (Mx - 1) * (My - 1)
                    seen.add(k)
            assert len(seen) == (Mx - 1) * (My - 1)


def test_restrict_identity():
    g = build_grid(1, 1, 6, 6)
    rng = np.random.default_rng(0)
    u = rng.standard_normal((3, g.n_interior))
    assert np.array_equal(restrict(u, g, g), u)


def test_restrict_picks_every_other_node():
    gc = build_grid(1, 1, 3, 3)
    gf = build_grid(1, 1, 6, 6)
    u = np.arange(gf.n_interior, dtype=float)[None, :]
    r = restrict(u, gf, gc)
    u2 = to_interior_grid(u, gf)[0]
    r2 = to_interior_grid(r, gc)[0]
    for j in range(1, 3):
        for i in range(1, 3):
            assert r2[j - 1, i - 1] == u2[2 * j - 1, 2 * i - 1]


def test_restrict_preserves_linear_field():
    gc = build_grid(2, 2, 4, 4)
    gf = build_grid(2, 2, 12, 12)
    Xf, Yf = gf.interior_mesh()
    Xc, Yc = gc.interior_mesh()
    u = (Xf + Yf).ravel()[None, :]
    r = restrict(u, gf, gc)
    assert np.allclose(r, (Xc + Yc).ravel()[None, :], rtol=0, atol=1e-14)


def test_restrict_rejects_non_nested():
    with pytest.raises(ValueError):
        restrict(np.zeros((1, 4 * 6)), build_grid(1, 1, 5, 7), build_grid(1, 1, 3, 3))
    with pytest.raises(ValueError):
        restrict(np.zeros((1, 25)), build_grid(1, 1, 6, 6), build_grid(2, 1, 3, 3))


def test_restrict_embed_roundtrip():
    gc = build_grid(3, 1, 4, 5)
    gf = build_grid(3, 1, 8, 10)
    rng = np.random.default_rng(7)
    u = rng.standard_normal((2, gc.n_interior))
    assert np.array_equal(restrict(embed(u, gc, gf), gf, gc), u)


def test_validate_field_rejects_nonfinite():
    g = build_grid(1, 1, 4, 4)
    u = new_field(2, g)
    u[0, 3] = np.nan
    with pytest.raises(ValueError):
        validate_field(u, g)
    with pytest.raises(ValueError):
        validate_field(np.zeros((2, 5)), g)
