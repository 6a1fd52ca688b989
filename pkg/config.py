"""
Configuration File for the Half-Translation Surface Workbench
Location: config.py

Central configuration for paths, tolerances, budgets, and output settings.
"""

import os
from pathlib import Path

# ============= PROJECT PATHS =============

# Base directory (project root)
BASE_DIR = Path(__file__).parent

# Data directories
DATA_DIR = BASE_DIR / "data"
LOGS_DIR = Path(os.environ.get("HTS_LOGS_DIR", BASE_DIR / "logs"))
OUTPUT_DIR = BASE_DIR / "sample_outputs"

# Data files
CORPUS_FILE = DATA_DIR / "corpus.csv"
SQUARE_TORUS_FILE = DATA_DIR / "square_torus.hts"
OCTAGON_FILE = DATA_DIR / "octagon.hts"
CYLINDER_FILE = DATA_DIR / "cylinder_c2.hts"


# ============= NUMERICAL TOLERANCES =============

TOLERANCE_CONFIG = {
    "exact": 1e-9,          # lengths and angles of polygon data
    "energy": 1e-8,         # Dirichlet energy comparisons
    "area_relative": 1e-12,
    "verdict_slack": 1e-8,  # inequality verdicts (divergence, monotonicity)
    "point_on_edge": 1e-9,
}


# ============= MODULE SETTINGS =============

# Geodesics
GEODESIC_CONFIG = {
    "default_budget": 12,       # unfoldings across original polygon edges
    "prong_cap": 20,            # cone-point branching limit
    "tie_tolerance": 1e-9,      # equal-length candidates resolved by chain order
    "oracle_resolution": 200,   # mesh spacing = diameter / this
    "max_windows": 200000,      # hard stop for a single visibility sweep
}

# Foliations and extremal length
FOLIATION_CONFIG = {
    "height_move_budget": 200,
    "compatibility_tolerance": 1e-9,
}

MODULUS_CONFIG = {
    "grid_divisions": 256,  # grid_h = diameter / this
    "relative_tolerance": 0.02,
}

# Quasiconformal maps
QC_CONFIG = {
    "push_point_ring_size": 24,
    "inner_ring_fraction": 0.25,
    "matrix_tolerance": 1e-9,
}

# Surgery
SURGERY_CONFIG = {
    "extension_search_tolerance": 1e-12,
    "flow_sample_points": 100,
}

# Blob regions
BLOB_CONFIG = {
    "quadrature_resolution": 512,
    "grunsky_samples": 10000,
    "sector_scan_angles": 720,
    "outer_height_samples": 64,
    "exclusion_tolerance": 0.02,
    "quadrature_tolerance": 0.01,  # relative, against -pi Re(c v)
    "koebe_rim_tolerance": 1e-12,
}

# Semi-smooth sets
SEMISMOOTH_CONFIG = {
    "separation_fraction": 0.1,   # delta_sep = diameter * this
    "pinch_fraction": 0.01,       # epsilon_pinch = diameter * this
    "chart_samples": 33,
    "cone_match_tolerance": 1e-9,
    "hausdorff_densify": 0.05,    # segment fraction, only for small inputs
    "densify_vertex_limit": 600,
    "curve_samples": 256,
    "base_partitions": 64,        # partition count grows by this per curve
    "uniform_tolerance": 1e-3,    # sup-error a converging sequence must reach
}


# ============= SYSTEM SETTINGS =============

# Logging
LOGGING_CONFIG = {
    "enabled": True,
    "log_to_file": False,
    "log_to_console": True,
    "log_level": "WARNING",  # DEBUG, INFO, WARNING, ERROR
    "max_log_size_mb": 10,
    "log_format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
}

# Command line and report output
CLI_CONFIG = {
    "default_seed": 20240229,
    "json_significant_digits": 17,
    "svg_precision": 6,      # decimals, i.e. 1e-6
    "svg_scale": 200.0,      # pixels per flat unit
    "exit_codes": {
        "pass": 0,
        "verdict_fail": 1,
        "precondition": 2,
        "io": 3,
    },
}

# Surface file format
SURFACE_FORMAT = {
    "surface_suffix": ".hts",
    "planar_set_suffix": ".poly",
    "curve_suffix": ".curve",
    "comment_prefix": "#",
}


# ============= HELPER FUNCTIONS =============

def get_data_file_path(filename: str) -> Path:
    """Get full path for a data file."""
    return DATA_DIR / filename


def ensure_directories_exist():
    """Ensure all required directories exist."""
    for directory in [DATA_DIR, LOGS_DIR]:
        directory.mkdir(exist_ok=True, parents=True)


def validate_configuration():
    """Validate configuration settings."""
    errors = []

    for file_path in [CORPUS_FILE, SQUARE_TORUS_FILE, OCTAGON_FILE, CYLINDER_FILE]:
        if not file_path.exists():
            errors.append(f"Missing corpus file: {file_path}")

    if GEODESIC_CONFIG["default_budget"] < 1:
        errors.append("Geodesic budget must be at least 1")

    if not 0 < MODULUS_CONFIG["relative_tolerance"] < 1:
        errors.append("Invalid modulus tolerance")

    if errors:
        print("⚠️ Configuration Warnings:")
        for error in errors:
            print(f"  - {error}")
        return False

    return True


def get_config_summary() -> dict:
    """Get summary of current configuration."""
    return {
        "project_root": str(BASE_DIR),
        "data_directory": str(DATA_DIR),
        "logs_directory": str(LOGS_DIR),
        "exact_tolerance": TOLERANCE_CONFIG["exact"],
        "geodesic_budget": GEODESIC_CONFIG["default_budget"],
        "default_seed": CLI_CONFIG["default_seed"],
    }


if __name__ == "__main__":
    print("=" * 60)
    print("CONFIGURATION SUMMARY")
    print("=" * 60)
    for key, value in get_config_summary().items():
        print(f"   {key}: {value}")
    print(f"\n   Valid: {validate_configuration()}")
