"""Shared fixtures and frozen reference values for the test suite."""

from hypothesis import HealthCheck, settings

# bigint-heavy cases have wildly varying step times; wall-clock deadlines
# would make them flaky
settings.register_profile(
    "default",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

# first 100 decimals of pi, for oracle comparisons
PI_100 = (
    "3."
    "1415926535897932384626433832795028841971"
    "6939937510582097494459230781640628620899"
    "86280348253421170679"
)
