class QBDLibError(Exception):
    pass


class ParameterError(QBDLibError, ValueError):
    pass


class ConfigError(QBDLibError, ValueError):
    pass


class DimensionError(QBDLibError, ValueError):
    pass


class UnstableModelError(QBDLibError):

    def __init__(self, message, rho=None):
        super(UnstableModelError, self).__init__(message)
        self.rho = rho


class SingularMatrixError(QBDLibError):

    def __init__(self, message, pivot=None):
        super(SingularMatrixError, self).__init__(message)
        self.pivot = pivot


class RankDeficiencyError(SingularMatrixError):
    pass


class NonConvergenceError(QBDLibError):

    def __init__(self, message, iterations=None, residual=None, iterate=None):
        super(NonConvergenceError, self).__init__(message)
        self.iterations = iterations
        self.residual = residual
        self.iterate = iterate


class CapacityError(QBDLibError):
    pass


class UnsupportedFeatureError(QBDLibError):
    pass
