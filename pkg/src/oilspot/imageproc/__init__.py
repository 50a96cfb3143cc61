from .image import ensure_image, to_u8, round_half_up
from .color import rgb_to_hsv, hsv_to_rgb, to_gray
from .clahe import ClaheConfig, clahe_channel, clahe_color, clip_redistribute
from .resize import resize_bilinear
from .preprocess import PreprocessVariant, preprocess, normalize
from .pnm import read_pnm, write_pnm
from .png import read_png

__all__ = [
    "ensure_image", "to_u8", "round_half_up",
    "rgb_to_hsv", "hsv_to_rgb", "to_gray",
    "ClaheConfig", "clahe_channel", "clahe_color", "clip_redistribute",
    "resize_bilinear",
    "PreprocessVariant", "preprocess", "normalize",
    "read_pnm", "write_pnm", "read_png",
]


def load_image(path) -> "np.ndarray":
    """Read a P5/P6 or PNG image by file magic."""
    with open(path, "rb") as f:
        head = f.read(8)
    if head[:2] in (b"P5", b"P6"):
        return read_pnm(path)
    if head == b"\x89PNG\r\n\x1a\n":
        return read_png(path)
    raise ValueError(f"unsupported image format in {path}")
