"""Grayscale image preprocessing: conversion, median denoising, linear
normalization and region-of-interest cropping.

All intensities are float64 in [0, 1]. Every function returns a new image.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage

from .errors import EmptyRoi, InvalidInput, IoError

LUMA_WEIGHTS = (0.299, 0.587, 0.114)
DEFAULT_MEDIAN_RADIUS = 1
DEFAULT_ROI_THRESHOLD = 0.1
IMAGE_SUFFIXES = (".png", ".pgm")


@dataclass(frozen=True, eq=False)
class GrayImage:
    """2-D grid of intensities in [0, 1], stored as ``data[row, col]``."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.float64, copy=True)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InvalidInput(f"GrayImage needs a non-empty 2-D array, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)) or arr.min() < 0.0 or arr.max() > 1.0:
            raise InvalidInput("GrayImage intensities must lie in [0, 1]")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.data, other.data))

    def __repr__(self):
        return f"GrayImage({self.width}x{self.height})"


@dataclass(frozen=True)
class RoiSpec:
    """How to crop the region of interest.

    ``mode="explicit"`` uses ``rect=(x0, y0, w, h)``; ``mode="auto"`` keeps the
    bounding box of the largest 4-connected component with intensity >= threshold.
    """

    mode: str = "auto"
    rect: tuple[int, int, int, int] | None = None
    threshold: float = DEFAULT_ROI_THRESHOLD

    def __post_init__(self):
        if self.mode == "auto":
            if not 0.0 < self.threshold < 1.0:
                raise InvalidInput(f"auto ROI threshold must be in (0, 1), got {self.threshold}")
        elif self.mode == "explicit":
            if self.rect is None or len(self.rect) != 4:
                raise InvalidInput("explicit ROI needs rect=(x0, y0, w, h)")
            x0, y0, w, h = (int(v) for v in self.rect)
            if w < 1 or h < 1 or x0 < 0 or y0 < 0:
                raise InvalidInput(f"invalid ROI rectangle {self.rect}")
            object.__setattr__(self, "rect", (x0, y0, w, h))
        else:
            raise InvalidInput(f"unknown ROI mode {self.mode!r}")

    @classmethod
    def parse(cls, text: str) -> RoiSpec:
        """Parse ``auto:<threshold>`` or ``rect:x0,y0,w,h``."""
        kind, _, arg = text.partition(":")
        try:
            if kind == "auto":
                return cls("auto", threshold=float(arg) if arg else DEFAULT_ROI_THRESHOLD)
            if kind == "rect":
                parts = tuple(int(p) for p in arg.split(","))
                return cls("explicit", rect=parts)
        except ValueError as exc:
            raise InvalidInput(f"cannot parse ROI spec {text!r}: {exc}") from None
        raise InvalidInput(f"ROI spec must be 'auto:<t>' or 'rect:x0,y0,w,h', got {text!r}")

    def to_text(self) -> str:
        if self.mode == "auto":
            return f"auto:{self.threshold}"
        return "rect:" + ",".join(str(v) for v in self.rect)


def to_grayscale(image) -> GrayImage:
    """Convert a raster (H×W, H×W×3 or H×W×4) to a GrayImage.

    Integer rasters are scaled by their dtype maximum; float rasters must
    already be in [0, 1]. Colour input is weighted 0.299R + 0.587G + 0.114B
    (any alpha channel is dropped).
    """
    if isinstance(image, GrayImage):
        return image
    arr = np.asarray(image)
    if arr.size == 0:
        raise InvalidInput("empty image")
    if np.issubdtype(arr.dtype, np.integer):
        arr = arr.astype(np.float64) / float(np.iinfo(arr.dtype).max)
    elif arr.dtype == np.bool_:
        arr = arr.astype(np.float64)
    else:
        arr = arr.astype(np.float64)
    if arr.ndim == 3:
        if arr.shape[2] == 1:
            arr = arr[:, :, 0]
        elif arr.shape[2] in (3, 4):
            r, g, b = arr[:, :, 0], arr[:, :, 1], arr[:, :, 2]
            arr = LUMA_WEIGHTS[0] * r + LUMA_WEIGHTS[1] * g + LUMA_WEIGHTS[2] * b
            # weights sum to 1 only up to rounding
            arr = np.clip(arr, 0.0, 1.0)
        else:
            raise InvalidInput(f"unsupported channel count {arr.shape[2]}")
    elif arr.ndim != 2:
        raise InvalidInput(f"expected a 2-D or 3-D raster, got {arr.ndim}-D")
    return GrayImage(arr)


def median_filter(img: GrayImage, radius: int = DEFAULT_MEDIAN_RADIUS) -> GrayImage:
    """Median over the (2*radius+1)^2 neighbourhood, edges replicated."""
    if int(radius) != radius or radius < 1:
        raise InvalidInput(f"median radius must be an integer >= 1, got {radius}")
    size = 2 * int(radius) + 1
    out = ndimage.median_filter(img.data, size=size, mode="nearest")
    return GrayImage(out)


def normalize_linear(img: GrayImage) -> GrayImage:
    """Affine map of [min, max] onto [0, 1]; a constant image maps to zeros."""
    lo = img.data.min()
    hi = img.data.max()
    if hi == lo:
        return GrayImage(np.zeros_like(img.data))
    out = (img.data - lo) / (hi - lo)
    # guard the top end against rounding above 1
    return GrayImage(np.clip(out, 0.0, 1.0))


def extract_roi(img: GrayImage, spec: RoiSpec) -> GrayImage:
    if spec.mode == "explicit":
        x0, y0, w, h = spec.rect
        if x0 + w > img.width or y0 + h > img.height:
            raise InvalidInput(
                f"ROI rectangle {spec.rect} exceeds image bounds {img.width}x{img.height}"
            )
        return GrayImage(img.data[y0:y0 + h, x0:x0 + w])

    mask = img.data >= spec.threshold
    # default structuring element in 2-D is the 4-connected cross
    labels, count = ndimage.label(mask)
    if count == 0:
        raise EmptyRoi(f"no pixel reaches threshold {spec.threshold}")
    sizes = np.bincount(labels.ravel())[1:]
    # ties go to the component found first in raster order
    largest = int(np.argmax(sizes)) + 1
    rows, cols = ndimage.find_objects(labels)[largest - 1]
    return GrayImage(img.data[rows, cols])


def preprocess(image, median_radius: int = DEFAULT_MEDIAN_RADIUS,
               roi: RoiSpec | None = None) -> GrayImage:
    """Grayscale -> median filter -> linear normalization -> ROI crop."""
    img = to_grayscale(image)
    img = median_filter(img, median_radius)
    img = normalize_linear(img)
    if roi is not None:
        img = extract_roi(img, roi)
    return img


def resize_nearest(img: GrayImage, height: int, width: int) -> GrayImage:
    """Nearest-neighbour resample to ``height`` x ``width``."""
    if height < 1 or width < 1:
        raise InvalidInput("target size must be positive")
    if (height, width) == img.shape:
        return img
    rows = np.minimum((np.arange(height) * img.height) // height, img.height - 1)
    cols = np.minimum((np.arange(width) * img.width) // width, img.width - 1)
    return GrayImage(img.data[np.ix_(rows, cols)])


def read_image(path) -> GrayImage:
    from PIL import Image, UnidentifiedImageError

    try:
        with Image.open(path) as im:
            if im.mode in ("I;16", "I;16B", "I;16L", "I"):
                arr = np.asarray(im, dtype=np.uint16)
            elif im.mode in ("L", "RGB", "RGBA"):
                arr = np.asarray(im)
            else:
                arr = np.asarray(im.convert("RGB"))
    except (OSError, UnidentifiedImageError) as exc:
        raise IoError(f"cannot read image {path}: {exc}") from exc
    return to_grayscale(arr)


def write_pgm(img: GrayImage, path) -> None:
    """Write an 8-bit binary PGM (values rounded to the nearest of 256 levels)."""
    pixels = np.rint(img.data * 255.0).astype(np.uint8)
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(pixels.tobytes())
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def list_images(directory) -> list[Path]:
    directory = Path(directory)
    if not directory.is_dir():
        raise IoError(f"not a directory: {directory}")
    return sorted(p for p in directory.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
