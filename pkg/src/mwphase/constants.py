"""Physical constants used across the package (SI units)."""
import math

#: Magnetic flux quantum h / 2e in webers.
PHI0 = 2.067833848e-15

TWO_PI = 2.0 * math.pi
