"""
defaults.py
Default values for model priors, samplers, grids and experiments.
"""

# ===== FIELD =====

FIELD_TAU = 1.0  # magnitude of the latent field after standardization
FIELD_NU = 1.5  # Matérn smoothness implied by the 1-D SPDE
EXTENSION_LENGTH_SCALES = 4.0  # default extension: 4 exp(mu_ell) per side

# ===== PRIORS =====

MU_ELL = 0.0
TAU_ELL = 1.0
LOG_LAMBDA_MEAN = 0.0
LOG_LAMBDA_VAR = 3.0
LOG_SIGMA2_MEAN = 0.0
LOG_SIGMA2_VAR = 10.0

# Two-sided 95% Gaussian quantile range used to elicit (mu_ell, tau_ell)
ELICITATION_WIDTH = 3.92

# SE hyperprior Cholesky jitter, relative to tau_ell^2
SE_JITTER_START = 1e-10
SE_JITTER_MAX = 1e-6
SE_CACHE_SIZE = 32

# ===== SAMPLERS =====

ITERATIONS = 10000
BURNIN_FRACTION = 0.2
THIN = 1
ADAPT_BATCH_SIZE = 50
ADAPT_TARGET_ACCEPT = 0.44
ADAPT_MAX_STEP = 0.05
SCALE_MIN = 1e-6
SCALE_MAX = 1e3
INITIAL_SCALE = 0.5  # log sigma2 and log lambda random walks
SITE_INITIAL_SCALE = 0.1  # MWG per-site proposal s.d.
CREDIBLE_LEVEL = 0.95

# Stationary baseline run length
STAT_ITERATIONS = 100000
STAT_BURNIN_FRACTION = 0.2

# ===== EXPERIMENTS =====

EXP1_M = 81
EXP1_NOISE_VAR = 0.01
EXP1_DOMAIN = (0.0, 10.0)
# grid size -> extension nodes per side
EXP1_GRIDS = {85: 2, 169: 4, 253: 6}

DAMPED_SINE_M = 350
DAMPED_SINE_NOISE_VAR = 0.04
DAMPED_SINE_DOMAIN = (0.0, 8.0)
DAMPED_SINE_EXTENSION = 40

BUMPS_M = 512
BUMPS_SNR = 5.0
BUMPS_DOMAIN = (0.0, 1.0)
BUMPS_EXTENSION = 30
BUMPS_LOCATIONS = (0.1, 0.13, 0.15, 0.23, 0.25, 0.4, 0.44, 0.65, 0.76, 0.78, 0.81)
BUMPS_HEIGHTS = (4.0, 5.0, 3.0, 4.0, 5.0, 4.2, 2.1, 4.3, 3.1, 5.1, 4.2)
BUMPS_WIDTHS = (0.005, 0.005, 0.006, 0.01, 0.01, 0.03, 0.01, 0.01, 0.005, 0.008, 0.005)

ADDITIVE_N = 143
ADDITIVE_NOISE_VAR = 0.06
ADDITIVE_DOMAIN = (0.0, 10.0)
ADDITIVE_EXTENSION = 4
SURFACE_DRAWS = 200  # full 2-D surfaces stored per chain for bands and coverage

EXPERIMENTS = ("exp1", "damped_sine", "bumps", "additive2d")
