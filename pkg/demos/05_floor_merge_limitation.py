#!/usr/bin/env python3
"""Reproduce a known failure: feet and floor merge into one region.

A person stands on a floor whose depth ramps away one millimeter per
row, meeting the body depth exactly at the feet. Every step along the
floor is within the growth threshold, so the fill walks off the body
and swallows the whole floor. Separating them takes plane fitting,
which this toolkit deliberately does not do.
"""

import os

import depthseg as ds

OUT = os.path.join(os.path.dirname(__file__), "output", "05")
os.makedirs(OUT, exist_ok=True)

spec = ds.load_spec(os.path.join(os.path.dirname(__file__), "specs", "ramp_floor.json"))
frame, oracle = ds.gen_scene(spec)
ds.save_depth_frame(frame, os.path.join(OUT, "scene.pgm"))

hist = ds.build_histogram(frame)
roi = ds.extract_roi(frame, ds.DepthInterval(int(hist.values[0]), int(hist.values[-1])))
seed = ds.find_seed(oracle.blob_masks[0], frame)
threshold = ds.adaptive_threshold(hist, seed.depth)
print(f"seed on the body at ({seed.x}, {seed.y}), {seed.depth} mm; threshold {threshold} mm")

region = ds.grow_region(frame, roi, seed, threshold)
ds.save_mask(region.mask, os.path.join(OUT, "grown.pgm"))

body = oracle.blob_masks[0].bits
floor = ~body & (frame.data > 0)
body_cov = (region.mask.bits & body).sum() / body.sum()
floor_cov = (region.mask.bits & floor).sum() / floor.sum()
print(f"grown region covers {body_cov:.0%} of the body and {floor_cov:.0%} of the floor")
print("the floor should not be in the region; contiguous depth makes it inseparable here")
print(f"wrote scene and grown mask to {OUT}")
