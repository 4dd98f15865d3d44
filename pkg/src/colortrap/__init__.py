"""Raster CMYK color trapping with lookup tables."""

from .categorize import ToleranceParams, label_window
from .corpus_gen import PageRecipe, generate
from .edge_oracle import EdgeType, OracleConfig, classify, prescreen
from .lut_engine import LutSet, build_luts, load_luts_file, save_luts_file
from .misreg_sim import PlaneShift, RegionMap, measure_artifacts, shift_plane
from .raster_io import CmykPixel, RasterPage, load_page, save_page
from .trapper import DensityWeights, TrapReport, run_algorithm

__all__ = [
    "CmykPixel", "DensityWeights", "EdgeType", "LutSet", "OracleConfig", "PageRecipe",
    "PlaneShift", "RasterPage", "RegionMap", "ToleranceParams", "TrapReport",
    "build_luts", "classify", "generate", "label_window", "load_luts_file", "load_page",
    "measure_artifacts", "prescreen", "run_algorithm", "save_luts_file", "save_page",
    "shift_plane",
]
