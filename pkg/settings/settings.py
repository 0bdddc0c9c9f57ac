"""
Global settings and configuration for the DNLS Birkhoff normal-form toolkit
"""
import os
from datetime import datetime
from decouple import config
from typing import Optional

# Initialize timestamp
ON_INITIALIZE_TIME = datetime.now()

# Environment Configuration
ENVIRONMENT = config("ENVIRONMENT_TYPE", default="LOCAL", cast=str)
APP_NAME = config("APP_NAME", default="DNLS_BIRKHOFF", cast=str)
VERSION = config("VERSION", default="v1.0.0", cast=str)

# Logging
LOG_LEVEL = config("LOG_LEVEL", default="INFO", cast=str)
LOG_TIMEZONE = config("LOG_TIMEZONE", default="US/Pacific", cast=str)
LOG_DIR = config("LOG_DIR", default="logs", cast=str)
LOG_TO_FILE = config("LOG_TO_FILE", default=True, cast=bool)

# Polynomial arithmetic
# a merged coefficient is dropped when |sum| <= rtol * sum(|contributions|)
CANCELLATION_RTOL = config("CANCELLATION_RTOL", default=1e-13, cast=float)

# Normal form
HOMOLOGICAL_RTOL = config("HOMOLOGICAL_RTOL", default=1e-12, cast=float)
SMALL_DIVISOR_FLOOR = config("SMALL_DIVISOR_FLOOR", default=1e-300, cast=float)
RESIDUAL_EXIT_TOL = config("RESIDUAL_EXIT_TOL", default=1e-10, cast=float)

# Spectrum
ENUMERATION_BUDGET = config("ENUMERATION_BUDGET", default=2_000_000, cast=int)

# Dynamics
FIXED_POINT_TOL = config("FIXED_POINT_TOL", default=1e-14, cast=float)
FIXED_POINT_MAX_ITERS = config("FIXED_POINT_MAX_ITERS", default=50, cast=int)
MAX_DT_HALVINGS = config("MAX_DT_HALVINGS", default=4, cast=int)
FLOW_STEP = config("FLOW_STEP", default=1e-3, cast=float)
FLOW_ESCAPE_FACTOR = config("FLOW_ESCAPE_FACTOR", default=2.0, cast=float)

# Runtime State
WORKER_THREADS: Optional[int] = config("WORKER_THREADS", default=os.cpu_count() or 1, cast=int)
