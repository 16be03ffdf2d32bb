class DpColorError(Exception):
    pass


class FormulaDomainError(DpColorError, ValueError):
    """A closed form was evaluated outside its validity range, or an exact
    division it relies on did not divide."""


class BudgetExceeded(DpColorError):
    def __init__(self, required_covers, required_units, budget):
        self.required_covers = required_covers
        self.required_units = required_units
        self.budget = budget
        super().__init__(
            f"search needs {required_covers} covers ({required_units} units), "
            f"budget is {budget} units"
        )


class CertificationError(DpColorError):
    """A construction's brute-force count disagreed with its advertised value."""


class ParseError(DpColorError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
