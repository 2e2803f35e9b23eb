class CPMMError(ValueError):
    """Base class for every error raised by this package."""


# pool mechanics

class EmptyPool(CPMMError):
    pass


class NegativeAmount(CPMMError):
    pass


class InsufficientLiquidity(CPMMError):
    pass


class ExceedsSupply(CPMMError):
    pass


# frontier analytics

class DomainError(CPMMError):
    pass


class FrontierUndefined(CPMMError):
    pass


class InvariantShrunk(CPMMError):
    pass


# event ingestion

class ParseError(CPMMError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class OrderError(CPMMError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class ReplayError(CPMMError):
    def __init__(self, index: int, message: str):
        super().__init__(f"event #{index}: {message}")
        self.index = index
