import numpy as np
from hypothesis import given, settings

import oracles
from conftest import mask_pairs, masks
from imgql.kernels import near
from pipeline import apply_stdlib


def test_interior_examples(tmp_path):
    assert apply_stdlib(tmp_path, "interior", np.ones((4, 5), bool)).all()
    dot = np.zeros((5, 5), bool)
    dot[2, 2] = True
    assert not apply_stdlib(tmp_path, "interior", dot).any()


def test_touch_self(tmp_path, rng):
    a = rng.random((10, 10)) < 0.4
    np.testing.assert_array_equal(apply_stdlib(tmp_path, "touch", a, a), a)


def test_grow_examples(tmp_path, rng):
    a = rng.random((10, 10)) < 0.3
    empty = np.zeros_like(a)
    np.testing.assert_array_equal(apply_stdlib(tmp_path, "grow", a, empty), a)
    assert not apply_stdlib(tmp_path, "grow", empty, a).any()


def test_grow_blob_in_region(tmp_path):
    b = np.zeros((12, 12), bool)
    b[2:9, 2:9] = True
    b[11, 11] = True  # isolated region away from a
    a = np.zeros_like(b)
    a[5, 5] = True
    out = apply_stdlib(tmp_path, "grow", a, b)
    expected = b.copy()
    expected[11, 11] = False
    np.testing.assert_array_equal(out, expected)


def test_surrounded_ring(tmp_path):
    b = np.zeros((9, 9), bool)
    b[1:8, 1] = b[1:8, 7] = b[1, 1:8] = b[7, 1:8] = True
    a = np.zeros_like(b)
    a[2:7, 2:7] = True
    a[0, 0] = True  # outside the ring: escapes
    out = apply_stdlib(tmp_path, "surrounded", a, b)
    assert out[2:7, 2:7].all() and not out[0, 0]
    b[4, 7] = False  # open the ring
    assert not apply_stdlib(tmp_path, "surrounded", a, b).any()


def test_surrounded_empty(tmp_path, rng):
    b = rng.random((6, 6)) < 0.5
    assert not apply_stdlib(tmp_path, "surrounded", np.zeros_like(b), b).any()


@settings(max_examples=25)
@given(masks())
def test_interior_laws(tmp_path_factory, a):
    out = apply_stdlib(tmp_path_factory.mktemp("i"), "interior", a)
    assert out.tolist() == oracles.interior(a)
    assert (out <= a).all() and (a <= near(a)).all()


@settings(max_examples=25)
@given(mask_pairs())
def test_grow_and_surrounded_laws(tmp_path_factory, ab):
    a, b = ab
    tmp = tmp_path_factory.mktemp("g")
    g = apply_stdlib(tmp, "grow", a, b)
    assert (g >= a).all() and (g <= (a | b)).all()
    assert g.tolist() == oracles.grow(a, b)
    s = apply_stdlib(tmp, "surrounded", a, b)
    assert (s <= a).all()
    assert s.tolist() == oracles.surrounded(a, b)
