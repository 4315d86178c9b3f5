class ConfigError(ValueError):
    """Raised for invalid simulation or CLI configuration."""
