import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp
from PIL import Image

from imgql.errors import EvalError
from imgql.image import NULL_LABEL, ImageBuffer, PixelKind, Value, load_png, pack, save_png, unpack


def test_load_16bit_verbatim(tmp_path):
    a = np.array([[62258, 0], [65535, 1]], dtype=np.uint16)
    Image.fromarray(a).save(tmp_path / "a.png")
    v = load_png(tmp_path / "a.png")
    assert v.kind is PixelKind.U16
    np.testing.assert_array_equal(v.array, a)


def test_load_8bit_widened(tmp_path):
    Image.fromarray(np.array([[0, 128, 255]], dtype=np.uint8)).save(tmp_path / "a.png")
    assert load_png(tmp_path / "a.png").array.tolist() == [[0, 32896, 65535]]


def test_load_8bit_128_roundtrip(tmp_path):
    Image.fromarray(np.array([[128]], dtype=np.uint8)).save(tmp_path / "a.png")
    v = load_png(tmp_path / "a.png")
    assert v.array[0, 0] == 128 * 257
    save_png(tmp_path / "b.png", v)
    assert load_png(tmp_path / "b.png").array[0, 0] == 32896


def test_load_colour_takes_first_channel(tmp_path):
    rgb = np.zeros((2, 2, 3), dtype=np.uint8)
    rgb[..., 0] = [[1, 2], [3, 4]]
    rgb[..., 1] = 200
    Image.fromarray(rgb).save(tmp_path / "c.png")
    assert load_png(tmp_path / "c.png").array.tolist() == [[257, 514], [771, 1028]]


def test_load_rejects_1bit(tmp_path):
    Image.fromarray(np.ones((2, 2), dtype=bool)).save(tmp_path / "b.png")
    with pytest.raises(EvalError, match="bit depth"):
        load_png(tmp_path / "b.png")


def test_load_missing_or_garbage(tmp_path):
    with pytest.raises(EvalError):
        load_png(tmp_path / "missing.png")
    (tmp_path / "junk.png").write_bytes(b"not a png")
    with pytest.raises(EvalError):
        load_png(tmp_path / "junk.png")


def test_save_bool(tmp_path):
    save_png(tmp_path / "f.png", Value.of_image(np.zeros((2, 2), dtype=bool)))
    im = Image.open(tmp_path / "f.png")
    assert np.array(im).tolist() == [[0, 0], [0, 0]]
    mask = np.array([[True, False]])
    save_png(tmp_path / "t.png", Value.of_image(mask))
    assert load_png(tmp_path / "t.png").array.tolist() == [[65535, 0]]


def test_save_labels_rgb(tmp_path):
    labels = np.array([[NULL_LABEL, 1], [1, 3]], dtype=np.int64)
    save_png(tmp_path / "l.png", Value.of_image(labels, PixelKind.LABEL))
    rgb = np.array(Image.open(tmp_path / "l.png"))
    assert rgb.shape == (2, 2, 3) and rgb.dtype == np.uint8
    assert rgb[0, 0].tolist() == [0, 0, 0]
    assert rgb[0, 1].tolist() == rgb[1, 0].tolist()
    assert rgb[0, 1].tolist() != rgb[1, 1].tolist()
    assert rgb[0, 1].max() > 0


def test_save_number_is_error(tmp_path):
    with pytest.raises(EvalError, match="print"):
        save_png(tmp_path / "n.png", Value.of_number(3))


def test_save_unwritable(tmp_path):
    with pytest.raises(EvalError):
        save_png(tmp_path / "no" / "dir" / "x.png", Value.of_image(np.zeros((1, 1), bool)))


@given(hnp.arrays(np.uint16, st.tuples(st.integers(1, 12), st.integers(1, 12))))
def test_u16_roundtrip(tmp_path_factory, a):
    path = tmp_path_factory.mktemp("rt") / "a.png"
    save_png(path, Value.of_image(a))
    np.testing.assert_array_equal(load_png(path).array, a)


def test_buffer_invariants():
    with pytest.raises(ValueError):
        ImageBuffer(np.zeros((0, 3), dtype=bool), PixelKind.BOOL)
    with pytest.raises(ValueError):
        ImageBuffer(np.zeros((2, 2), dtype=np.int32), PixelKind.U16)
    with pytest.raises(ValueError):
        ImageBuffer(np.array([[4]], dtype=np.int64), PixelKind.LABEL)
    buf = ImageBuffer(np.zeros((2, 3), dtype=bool), PixelKind.BOOL)
    assert (buf.width, buf.height) == (3, 2)
    assert not buf.data.flags.writeable


def test_pack_order_is_lexicographic():
    w = 7
    coords = [(r, c) for r in range(5) for c in range(w)]
    packed = [int(pack(r, c, w)) for r, c in coords]
    assert sorted(packed) == packed
    assert pack(0, 1, w) < pack(1, 0, w)
    rows, cols = unpack(np.array([NULL_LABEL, pack(2, 3, w)]), w)
    assert rows.tolist() == [-1, 2] and cols.tolist() == [-1, 3]


def test_wrapping_does_not_freeze_caller_array():
    a = np.zeros((2, 2), dtype=bool)
    v = Value.of_image(a)
    a[0, 0] = True
    assert not v.array.flags.writeable
