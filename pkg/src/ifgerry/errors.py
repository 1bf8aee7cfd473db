"""Exception hierarchy shared across the package."""


class IFGerryError(Exception):
    """Base class for every error raised by ifgerry."""


class InputError(IFGerryError, ValueError):
    """Malformed or contract-violating input."""


class MissingScore(InputError):
    def __init__(self, id_):
        super().__init__(f"no score for individual {id_!r}")
        self.id = id_


class UnknownId(InputError):
    def __init__(self, id_):
        super().__init__(f"score given for unknown individual {id_!r}")
        self.id = id_


class NonFiniteScore(InputError):
    def __init__(self, id_, value=None):
        super().__init__(f"non-finite score {value!r} for individual {id_!r}")
        self.id = id_


class DuplicateId(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class MissingUid(InputError):
    pass


class NonFiniteInput(InputError):
    pass


class InvalidDomain(InputError):
    pass


class InvalidTransform(InputError):
    pass


class InvalidMetric(InputError):
    pass


class MissingIndividual(InputError):
    def __init__(self, id_):
        super().__init__(f"predictor has no distribution for {id_!r}")
        self.id = id_


class OutcomeSetMismatch(InputError):
    pass


class UniverseMismatch(InputError):
    pass


class InvalidDistribution(InputError):
    pass


class UnknownFamily(InputError):
    pass


class NoAdmissibleCandidate(IFGerryError):
    pass


class InvalidConfig(InputError):
    pass


class UnknownPreset(InputError):
    pass
