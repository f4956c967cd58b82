"""Exception types raised by the package."""


class InvalidParameterError(ValueError):
    """A parameter is outside its allowed domain."""


class DimensionError(ValueError):
    """Vector or matrix shapes do not agree."""


class EmptyInputError(ValueError):
    """An operation received an empty dataset or list."""


class TrainingDivergedError(RuntimeError):
    """The network loss became non-finite during training."""

    def __init__(self, epoch):
        super().__init__(f"training diverged: non-finite loss at epoch {epoch}")
        self.epoch = epoch
