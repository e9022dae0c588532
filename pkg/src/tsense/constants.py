"""Physical constants and default sensor/material records."""

SPEED_OF_LIGHT = 2.99792458e8  # m/s
VACUUM_PERMITTIVITY = 8.8541878128e-12  # F/m

# Pure-water Debye defaults at 25 degC (NaCl-solution literature values).
WATER_EPS_STATIC_25C = 78.36
WATER_EPS_INF_25C = 5.2
WATER_TAU_25C = 8.27e-12  # s

# Sensor substrate: Rogers RT5880 laminate.
SUBSTRATE_EPS_R = 2.2
SUBSTRATE_LOSS_TANGENT = 0.009
SUBSTRATE_HEIGHT = 0.79e-3  # m
SUBSTRATE_COPPER_THICKNESS = 0.018e-3  # m, metadata only

# Operational band of the sensor.
BAND_LOW_HZ = 670e6
BAND_HIGH_HZ = 730e6

# Default sampling cadence of the resonance tracker.
SAMPLE_PERIOD_S = 0.110

# Concentration ladder used for the default calibration grid (mol/L).
CONCENTRATION_LADDER = (
    3.125e-3, 6.25e-3, 1.25e-2, 2.5e-2, 5e-2, 1e-1, 2.5e-1, 5e-1,
)
