"""Exception hierarchy shared by all modules."""


class GWSDError(Exception):
    """Base class for every error raised by this package."""


class SchemaError(GWSDError, ValueError):
    pass


class AttrError(GWSDError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class ValuationError(GWSDError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class CompletenessError(GWSDError, ValueError):
    pass


class RangeError(GWSDError, ValueError):
    pass


class BudgetError(GWSDError, RuntimeError):
    pass


class CapacityError(GWSDError, ValueError):
    pass


class FragmentError(GWSDError, ValueError):
    pass


class LevelError(GWSDError, ValueError):
    pass


class InstanceError(GWSDError, ValueError):
    pass


class CapError(GWSDError, ValueError):
    pass


class ParseError(GWSDError, ValueError):
    def __init__(self, message, line=None, column=None):
        self.message = message
        self.line = line
        self.column = column
        where = f" at line {line}, column {column}" if line is not None else ""
        super().__init__(f"{message}{where}")
