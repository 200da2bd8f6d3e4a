"""Time the sliding-window feature kernel: compiled extension vs numpy fallback.

    python benchmarks/bench_window_features.py [--size 32] [--images 20] [--repeat 3]

Also checks that both backends return bit-identical arrays.
"""
import argparse
import json
import time

import numpy as np

from smc import _backend
from smc.views import WindowConfig, quantize
from smc.imaging import GrayImage


def bench(backend, images, config, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for img in images:
            q = quantize(img, config.levels)
            _backend.window_features(q.data, img.data, config.size, config.stride,
                                     config.levels, config.offsets, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best / len(images)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--size", type=int, default=32)
    ap.add_argument("--images", type=int, default=20)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    images = [GrayImage(rng.random((args.size, args.size))) for _ in range(args.images)]
    config = WindowConfig()
    result = {"image_size": args.size, "images": args.images, "backends": sorted(_backend.BACKENDS)}
    for name in sorted(_backend.BACKENDS):
        result[f"{name}_ms_per_image"] = 1e3 * bench(name, images, config, args.repeat)
    if "compiled" in _backend.BACKENDS:
        result["speedup"] = result["python_ms_per_image"] / result["compiled_ms_per_image"]
        img = images[0]
        q = quantize(img, config.levels).data
        outs = [_backend.window_features(q, img.data, config.size, config.stride, config.levels,
                                         config.offsets, backend=b) for b in ("python", "compiled")]
        result["bit_identical"] = bool(np.array_equal(outs[0], outs[1]))
    print(json.dumps(result, indent=1))


if __name__ == "__main__":
    main()
