"""Physical constants (SI, exact 2019 redefinition values)."""

PLANCK = 6.626070150e-34  # J s
SPEED_OF_LIGHT = 299792458.0  # m / s
