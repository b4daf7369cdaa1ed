"""Spatial compressive sensing toolkit for MIMO radar direction finding."""
from .geometry import (ArrayConfig, AngleGrid, ConfigurationError, ElementPositions, PointMass,
                       Discrete, Uniform, canonical_grid, nyquist_array, sample_positions,
                       steering_rx, steering_tx, steering_virtual)
from .model import (MeasurementMatrix, Scene, SnapshotData, build_matrix, observe,
                    sigma_from_snr, synthesize_scene, waveform_roundtrip_check)

__version__ = "0.1.0"
