# Columns whose marginal mass is below this are treated as unreachable
MASS_THRESHOLD = 1e-300
# Maximum number of lattice points held by one convolution table
POINT_BUDGET = 10 ** 7
NORMALIZATION_TOL = 1e-12
MODE_TOL = 1e-12
DEFAULT_BIN_WIDTH = 0.1
MC_BLOCK_SIZE = 65536
SCHEMA_VERSION = 1
FLOAT_FORMAT = "{:.17g}"
