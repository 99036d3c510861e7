""" Configuration for values that may be system or study dependent.

Supply a settings.ini file in the working directory to override values. The
format of the file will have the following sections

[PATHS]
RUN_DIR = /path/to/run/directories
LOG_INI_PATH = /path/to/logging.ini
LOG_PATH = /path/to/repday.log

[SOLVER]
ENUM_LIMIT = 16
JOBS = 1
LP_TOLERANCE = 1e-9

[CHECKS]
REL_TOL = 1e-6
ABS_FLOOR = 1e-6
"""
import configparser
from pathlib import Path

config_file = configparser.ConfigParser()
config_file.read('settings.ini')

# The directory under which run directories are created when --out is not
# given.
RUN_DIR = config_file.get("PATHS", "RUN_DIR", fallback="./runs")

# Fetch the path of the logging.ini file shipped inside the package.
logging_ini_path = str(Path(__file__).resolve().parent / "logging.ini")

LOGGING_INI_PATH = config_file.get("PATHS", "LOG_INI_PATH", fallback=logging_ini_path)
# Log file for every command, outside the run directories.
LOG_PATH = config_file.get("PATHS", "LOG_PATH", fallback="./repday.log")

# Largest number of candidate assets for which all 2^n investment decisions
# are enumerated.
ENUM_LIMIT = config_file.getint("SOLVER", "ENUM_LIMIT", fallback=16)
# Worker processes used to evaluate independent days.
JOBS = config_file.getint("SOLVER", "JOBS", fallback=1)
# Primal and dual feasibility tolerance handed to HiGHS.
LP_TOLERANCE = config_file.getfloat("SOLVER", "LP_TOLERANCE", fallback=1e-9)
# Seconds; 0 means no limit.
LP_TIME_LIMIT = config_file.getfloat("SOLVER", "LP_TIME_LIMIT", fallback=0.0)

# Tolerances for invariant and bound checks, relative to the full-scale
# total cost, with an absolute floor for near-zero normalizers.
REL_TOL = config_file.getfloat("CHECKS", "REL_TOL", fallback=1e-6)
ABS_FLOOR = config_file.getfloat("CHECKS", "ABS_FLOOR", fallback=1e-6)
# Tolerance for results that should agree exactly up to float noise.
EXACT_TOL = config_file.getfloat("CHECKS", "EXACT_TOL", fallback=1e-9)
# Residual allowed in power balance and flow limits, in MW.
MW_TOL = config_file.getfloat("CHECKS", "MW_TOL", fallback=1e-6)

HOURS_PER_DAY = 24

ENCODING = "utf8"
