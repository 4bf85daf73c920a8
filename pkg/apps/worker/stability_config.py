"""Numeric defaults for the stability engine"""

STABILITY_CONFIG = {
    "roots": {
        "tolerance": 1e-12,
        "fine_tolerance": 1e-15,
        "max_iterations": 400,
        "lemma8_lower_endpoint": 1e-16,
    },
    "kernels": {
        "sinc_series_cutoff": 1e-4,
        "normalization_quad_points": 4096,
        "normalization_decay_lengths": 40.0,
        "min_tail_exponent": 12.0,
        "min_quad_points": 64,
        "positivity_min_samples": 100,
    },
    "linearization": {
        "degeneracy_tolerance": 1e-12,
    },
    "criteria": {
        "marginal_tolerance": 1e-12,
    },
    "oracle": {
        "negativity_tolerance": 1e-9,
        "coarse_points_1d": 2048,
        "coarse_points_2d": 512,
        "min_coarse_points": 512,
        "refine_iterations": 60,
        "candidates": 5,
        "witness_points": 4096,
        "ball_fraction": 0.5,
    },
    "simulation": {
        "min_grid_points": 64,
        "grid_points_1d": 128,
        "grid_points_2d": 64,
        "dt_factor": 0.25,
        "blowup_factor": 1e3,
        "max_amplitude_ratio": 1e-3,
        "default_amplitude_ratio": 1e-4,
        "box_decay_lengths": 12.0,
        "box_window_widths": 6.0,
        "box_wavelengths": 2.0,
        "growth_window": (2.0, 10.0),
        "decay_window": (0.5, 0.1),
        "growth_horizon_factor": 30.0,
        "decay_horizon": 10.0,
        "max_steps": 200000,
    },
    "cli": {
        "schema_version": "1",
        "float_format": "%.17g",
    },
}
