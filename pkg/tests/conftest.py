from hypothesis import settings

# reproducible property tests: the same examples on every run
settings.register_profile("repo", derandomize=True, deadline=None)
settings.load_profile("repo")
