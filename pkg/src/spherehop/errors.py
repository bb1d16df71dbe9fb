"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of a function (pole, |x| > 1, ...)."""


class BasisMismatchError(ValueError):
    """A series is expanded in the wrong Gegenbauer basis for an operator."""


class ChainError(BasisMismatchError):
    """An operator chain has incompatible adjacent links.

    Attributes
    ----------
    index : int
        Zero-based position of the offending link in the chain.
    """

    def __init__(self, index, message):
        super().__init__(f"link {index}: {message}")
        self.index = index
