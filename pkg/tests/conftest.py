import numpy as np
import pytest

from gravicam import pano


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def lat_encoded_panorama(height: int = 512) -> pano.EquirectFrame:
    """Channel 0 is the latitude in degrees; channels 1/2 are sin/cos of
    the longitude (seam-free encoding). Bilinear sampling of channel 0 is
    exact because latitude is linear in the row coordinate."""
    width = 2 * height
    lat = (0.5 - (np.arange(height) + 0.5) / height) * 180.0
    lon = ((np.arange(width) + 0.5) / width - 0.5) * 360.0
    lat_g, lon_g = np.meshgrid(lat, lon, indexing="ij")
    data = np.stack(
        [lat_g, np.sin(np.radians(lon_g)), np.cos(np.radians(lon_g))], axis=-1
    ).astype(np.float32)
    return pano.EquirectFrame(data)


def smooth_panorama(height: int = 256, seed: int = 0) -> pano.EquirectFrame:
    """Low-frequency random panorama, wrap-continuous in longitude."""
    rng = np.random.default_rng(seed)
    width = 2 * height
    lat = np.radians((0.5 - (np.arange(height) + 0.5) / height) * 180.0)
    lon = np.radians(((np.arange(width) + 0.5) / width - 0.5) * 360.0)
    lat_g, lon_g = np.meshgrid(lat, lon, indexing="ij")
    data = np.zeros((height, width, 3), dtype=np.float32)
    for c in range(3):
        for k in range(1, 4):
            a, b, ph = rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0, 2 * np.pi)
            data[..., c] += a * np.sin(k * lon_g + ph) * np.cos(lat_g) + b * np.sin(k * lat_g)
    data -= data.min()
    data /= data.max()
    return pano.EquirectFrame(data)
