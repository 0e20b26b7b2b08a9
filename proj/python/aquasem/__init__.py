"""Resilience toolkit for caption-based image transmission.

Thin Python surface over the C++ core: text channel corruption, bit error
bounds, image metrics (PSNR/SSIM/clip score), the offline mock pipeline, and
single-trial execution. The ``aquasem`` CLI exposes the full sweep runner.
"""

from ._core import (
    ImageBuffer,
    ProtocolError,
    TransportError,
    __version__,
    ber_bounds,
    builtin_control_image,
    clip_score,
    corrupt,
    default_grid_ratios,
    load_image,
    mix_channel_seed,
    mock_caption,
    mock_embed,
    mock_generate,
    mse,
    png_supported,
    psnr,
    resize_bilinear,
    run_mock_trial,
    sanitize,
    save_image,
    split_words,
    ssim,
    to_gray,
)

__all__ = [
    "ImageBuffer",
    "ProtocolError",
    "TransportError",
    "__version__",
    "ber_bounds",
    "builtin_control_image",
    "clip_score",
    "corrupt",
    "default_grid_ratios",
    "load_image",
    "mix_channel_seed",
    "mock_caption",
    "mock_embed",
    "mock_generate",
    "mse",
    "png_supported",
    "psnr",
    "resize_bilinear",
    "run_mock_trial",
    "sanitize",
    "save_image",
    "split_words",
    "ssim",
    "to_gray",
]
