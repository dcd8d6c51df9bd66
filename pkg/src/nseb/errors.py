"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid configuration (bad value, unknown key, inconsistent grid)."""


class SnapshotFormatError(RuntimeError):
    """Snapshot file failed a structural check (magic, version, size, ...)."""

    def __init__(self, check: str, message: str):
        super().__init__(f"{check}: {message}")
        self.check = check


class NumericalAbort(RuntimeError):
    """Integration produced non-finite values (CFL violation or blow-up)."""
