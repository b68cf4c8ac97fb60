DEFAULT_BUDGET = 10_000
BUDGET_ENV = "GAL_BUDGET"
DEFAULT_SEED = 20250211
FAMILY_PARAM = "g"
LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"
