import os

os.environ.setdefault('DEFCHAR_ENV', 'testing')
os.environ.setdefault('LOG_LEVEL', 'WARNING')

import numpy as np
import pytest

from defchar_retrieval.dataset import synthetic_records, write_synthetic_dataset
from defchar_retrieval.features import register_extractor
from defchar_retrieval.imaging import crop_pattern, encode_png

BLUE = (0, 0, 255)
RED = (255, 0, 0)

# plain 3-wide vectors for store and retrieval tests
register_extractor(
    'mean_colour',
    lambda record, siblings, side, settings: record.crop.reshape(-1, 3).mean(axis=0),
    display_name='Mean colour',
)


def solid_image(height, width, colour):
    img = np.zeros((height, width, 3), dtype=np.uint8)
    img[...] = colour
    return img


def random_masks(count, seed=0):
    """Speckled masks of random side and fill, thin 8-connected chains included."""
    rng = np.random.default_rng(seed)
    for _ in range(count):
        side = int(rng.integers(6, 40))
        fill = rng.uniform(0.05, 0.6)
        mask = rng.random((side, side)) < fill
        if mask.any():
            yield mask


def square_on_field(side=20, square=6, origin=(7, 7), inside=RED, outside=BLUE):
    """Image with a filled square and the matching mask; origin is (x, y)."""
    img = solid_image(side, side, outside)
    mask = np.zeros((side, side), dtype=bool)
    x, y = origin
    mask[y:y + square, x:x + square] = True
    img[mask] = inside
    return img, mask


@pytest.fixture
def red_square_record():
    img, mask = square_on_field()
    return crop_pattern(img, mask, 1, 'field.png#0', 'field.png', padding_ratio=0.1)


@pytest.fixture
def small_records():
    return synthetic_records((5, 4, 3), image_side=48, seed=7)


@pytest.fixture
def synthetic_dataset(tmp_path):
    return write_synthetic_dataset(tmp_path / 'data', (4, 3, 3), image_side=48, seed=3, name='tiny')


@pytest.fixture
def write_png(tmp_path):
    def _write(name, array):
        path = tmp_path / name
        path.write_bytes(encode_png(array))
        return path
    return _write
