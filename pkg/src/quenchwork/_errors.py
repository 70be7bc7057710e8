class NumericalError(RuntimeError):
    """A numerical routine failed (non-convergence, singular input, ...)."""


class ConfigError(ValueError):
    """Invalid experiment configuration.

    ``path`` is the dotted location of the offending field, e.g.
    ``"sampling.n_samples"``.
    """

    def __init__(self, path, message):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}")
