class CotypeError(ValueError):
    """Base class for input errors (bad systems, programs, session files)."""

    def __init__(self, message: str = "", location: tuple[int, int] | None = None):
        super().__init__(message)
        self.location = location

    def __str__(self):
        msg = super().__str__()
        if self.location:
            return f"line {self.location[0]}, column {self.location[1]}: {msg}"
        return msg
