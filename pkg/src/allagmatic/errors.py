"""Exception hierarchy shared by every model built on the metamodel."""


class MetamodelError(ValueError):
    """Base class for invalid structures, operations or parameters."""


class NonSquareMilieu(MetamodelError):
    pass


class ArityMismatch(MetamodelError):
    pass


class LengthMismatch(MetamodelError):
    pass


class IncompleteParameters(MetamodelError):
    pass


class StateDomainError(MetamodelError):
    """A state value lies outside the declared state domain."""


class NonBinaryState(StateDomainError):
    pass


class IndexOutOfRange(MetamodelError, IndexError):
    pass


class OutOfRange(MetamodelError):
    pass


class InvalidCharacter(MetamodelError):
    pass


class EmptyState(MetamodelError):
    pass
