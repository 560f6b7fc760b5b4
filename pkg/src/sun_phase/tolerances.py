"""Global numerical tolerances.

Three tiers: construction checks on exactly representable structure,
algebraic identities that only accumulate rounding error, and
comparisons limited by central-difference truncation.
"""

ATOL_CONSTRUCTION = 1e-12  # Hermiticity, tracelessness, normalization of inputs
ATOL_IDENTITY = 1e-10      # unitarity of exponentials, completeness identity
ATOL_FRAME = 1e-8          # frame extraction, metric cross-checks
ATOL_FD_MATCH = 1e-6       # analytic vs central-difference agreement

FD_STEP = 1e-5             # central-difference step (coordinates are O(1) angles)

P_MIN = 1e-12              # below this the phase of an amplitude is undefined
P_GRAD = 1e-8              # below this the gradient formulas are ill-conditioned

CHART_MARGIN = 1e-3        # margin kept from chart-singular loci
