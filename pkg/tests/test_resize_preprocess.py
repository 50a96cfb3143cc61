"""Bilinear resize and the four-variant preprocess/normalize contracts."""
import numpy as np
import pytest

from oilspot.imageproc import (
    ClaheConfig, PreprocessVariant, normalize, preprocess, resize_bilinear,
)
from oilspot import rng as rngmod


def test_resize_identity_is_bit_exact_copy():
    g = rngmod.stream(1, 52)
    img = g.integers(0, 256, size=(13, 17, 3)).astype(np.uint8)
    out = resize_bilinear(img, 13, 17)
    assert np.array_equal(out, img)
    assert out is not img


def test_resize_2x2_to_1x1_rounded_average():
    img = np.asarray([[[10], [20]], [[30], [41]]], dtype=np.uint8)
    out = resize_bilinear(img, 1, 1)
    # (10+20+30+41)/4 = 25.25 -> 25
    assert out[0, 0, 0] == 25
    img2 = np.asarray([[[1], [2]], [[3], [4]]], dtype=np.uint8)
    assert resize_bilinear(img2, 1, 1)[0, 0, 0] == 3  # 2.5 rounds half up


@pytest.mark.parametrize("size", [(1, 1), (3, 5), (16, 16), (7, 2)])
def test_resize_constant_stays_constant(size):
    img = np.full((6, 9, 3), 117, dtype=np.uint8)
    out = resize_bilinear(img, *size)
    assert out.shape == (*size, 3)
    assert np.all(out == 117)


def test_resize_upsample_shape():
    img = np.zeros((4, 4, 1), dtype=np.uint8)
    assert resize_bilinear(img, 9, 13).shape == (9, 13, 1)


def test_variant_parse_and_channels():
    assert PreprocessVariant.parse("clahe-gray") is PreprocessVariant.CLAHE_THEN_GRAY
    assert PreprocessVariant.ORIGINAL.output_channels == 3
    assert PreprocessVariant.CLAHE.output_channels == 3
    assert PreprocessVariant.GRAY_THEN_CLAHE.output_channels == 1
    assert PreprocessVariant.CLAHE_THEN_GRAY.output_channels == 1
    with pytest.raises(ValueError, match="variant"):
        PreprocessVariant.parse("sepia")


def test_preprocess_original_is_copy():
    g = rngmod.stream(2, 52)
    img = g.integers(0, 256, size=(16, 16, 3)).astype(np.uint8)
    out = preprocess(img, PreprocessVariant.ORIGINAL)
    assert np.array_equal(out, img) and out is not img


def test_preprocess_channel_contracts():
    g = rngmod.stream(3, 52)
    img = g.integers(0, 256, size=(16, 16, 3)).astype(np.uint8)
    cfg = ClaheConfig(2, 2, 2.0)
    assert preprocess(img, PreprocessVariant.CLAHE, cfg).shape == (16, 16, 3)
    assert preprocess(img, PreprocessVariant.GRAY_THEN_CLAHE, cfg).shape == (16, 16, 1)
    assert preprocess(img, PreprocessVariant.CLAHE_THEN_GRAY, cfg).shape == (16, 16, 1)


def test_normalize_values_and_layout():
    img = np.zeros((2, 3, 3), dtype=np.uint8)
    img[0, 0] = (255, 0, 128)
    t = normalize(img)
    assert t.shape == (3, 2, 3) and t.dtype == np.float32
    assert t[0, 0, 0] == np.float32(1.0)
    assert t[1, 0, 0] == np.float32(0.0)
    assert t[2, 0, 0] == np.float32(128 / 255)
    assert float(t.min()) >= 0.0 and float(t.max()) <= 1.0
