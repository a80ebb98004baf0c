# utils/__init__.py - Initialize the utils package

# Import the helpers used across the physics modules
from utils.errors import (QednpError, UnitError, DomainError, DegenerateInput, ConfigError,
                          PlotError, NumericError, StepSizeError, FitError, ModelError)
from utils.units import DEFAULT_UNITS, UnitContext, FrequencyGrid, convert, parse_quantity
from utils.numerics import principal_value_integral
from utils.data_loader import load_decay_curve, load_tabulated_ldos, write_csv_atomic
