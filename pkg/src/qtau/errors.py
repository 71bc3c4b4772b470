class UsageError(ValueError):
    """Invalid arguments or violated preconditions (CLI exit code 2)."""
