from hypothesis import settings

# deterministic CI: identical examples on every run
settings.register_profile("det", derandomize=True, max_examples=200)
settings.load_profile("det")
