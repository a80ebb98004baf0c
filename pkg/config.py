# config.py - Process-level settings for qednp
import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Run Configuration
OUTPUT_DIR = os.getenv("QEDNP_OUTPUT_DIR", "results")
PLOT_FORMAT = os.getenv("QEDNP_PLOT_FORMAT", "png")

# Logging Configuration
LOG_LEVEL = os.getenv("QEDNP_LOG_LEVEL", "INFO").upper()
LOG_FILE = os.getenv("QEDNP_LOG_FILE", "qednp.log")

# Numerical Configuration
KERNEL_RTOL = float(os.getenv("QEDNP_KERNEL_RTOL", "1e-8"))
KERNEL_MAX_PANELS = int(os.getenv("QEDNP_KERNEL_MAX_PANELS", "65536"))
WEAK_COUPLING_FACTOR = float(os.getenv("QEDNP_WEAK_COUPLING_FACTOR", "0.1"))
PHONON_VALIDITY_FACTOR = float(os.getenv("QEDNP_PHONON_VALIDITY_FACTOR", "5"))
RHO_TAIL_CUTOFF = float(os.getenv("QEDNP_RHO_TAIL_CUTOFF", "1e-10"))
FIT_MAX_NFEV = int(os.getenv("QEDNP_FIT_MAX_NFEV", "2000"))

# Material Configuration - bulk GaAs LA phonons
GAAS_SOUND_SPEED = float(os.getenv("QEDNP_GAAS_SOUND_SPEED", "5110"))  # m/s
GAAS_MASS_DENSITY = float(os.getenv("QEDNP_GAAS_MASS_DENSITY", "5370"))  # kg/m^3
GAAS_D_E = float(os.getenv("QEDNP_GAAS_D_E", "-14.6"))  # eV
GAAS_D_G = float(os.getenv("QEDNP_GAAS_D_G", "-4.8"))  # eV
QD_SIGMA = float(os.getenv("QEDNP_QD_SIGMA", "1.37"))  # nm, electron and hole envelope width
