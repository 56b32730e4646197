import hypothesis

# property tests share the integrators' process; wall-clock deadlines only flake
hypothesis.settings.register_profile(
    "slow_ok",
    deadline=None,
    suppress_health_check=[hypothesis.HealthCheck.too_slow],
)
hypothesis.settings.load_profile("slow_ok")
