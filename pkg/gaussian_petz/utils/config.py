# gaussian_petz/utils/config.py
import os


class Colors:
    """ANSI codes keyed by log level, plus extra hues for search workers."""
    INFO = '\033[94m'
    SUCCESS = '\033[92m'
    WARNING = '\033[93m'
    ERROR = '\033[91m'
    BOLD = '\033[1m'
    CYAN = '\033[96m'
    MAGENTA = '\033[95m'
    ENDC = '\033[0m'


# Worker prefixes rotate through these.
WORKER_COLORS = [Colors.INFO, Colors.CYAN, Colors.SUCCESS, Colors.MAGENTA]

# Numerical tolerances (double precision, condition numbers up to ~1e3).
SYMMETRY_TOL = 1e-10
UNCERTAINTY_TOL = 1e-9
FAITHFUL_TOL = 1e-7
CP_TOL = 1e-9
REVERSAL_TOL = 1e-10
VERIFY_TOL = 1e-10
LIE_PROJECTION_TOL = 1e-9

# Dense oracle
DENSE_FLOOR = 1e-14
DENSE_NEGATIVE_TOL = 1e-8
DENSE_FLOOR_WEIGHT_TOL = 1e-8
FOCK_TAIL_WARNING = 1e-6
NOISE_QUADRATURE_POINTS = 21

# Quadrature over p(t)
QUAD_TAIL_LIMIT = 1e-4
DEFAULT_QUAD_POINTS = 201
DEFAULT_QUAD_RANGE = 5.0
BOUND_SLACK_TOL = 1e-6

# Search
COUNTEREXAMPLE_THRESHOLD = -1e-6
DEFAULT_TOP_K = 10
DEFAULT_SEED = 42
DEFAULT_SAMPLES = 100000
# 'process' or 'thread'
SEARCH_EXECUTOR = 'process'

# CLI defaults
DEFAULT_CUTOFF = 40
DEFAULT_GRID = 8
DEFAULT_ORACLE_TOL = 1e-3
MAX_ORACLE_CUTOFF = 60
MAX_ORACLE_CUTOFF_TWO_MODE = 12

DB_PATH = 'gaussian_petz.db'

THREADS_ENV = 'GAUSS_PETZ_THREADS'


def thread_count(requested=None):
    """
    Number of search workers.
    Args:
        requested (int, optional): Explicit request from the command line.
    Returns:
        int: requested if given, else the GAUSS_PETZ_THREADS cap, else 1.
    """
    if requested is not None:
        return max(1, int(requested))
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw.strip() == '':
        return 1
    try:
        value = int(raw)
    except ValueError:
        from gaussian_petz.utils.logging_utils import log_manager
        log_manager(f"Ignoring {THREADS_ENV}={raw!r}: not an integer", level="WARNING", prefix="[CONFIG] ")
        return 1
    if value < 1:
        from gaussian_petz.utils.logging_utils import log_manager
        log_manager(f"Ignoring {THREADS_ENV}={raw!r}: must be positive", level="WARNING", prefix="[CONFIG] ")
        return 1
    return value
