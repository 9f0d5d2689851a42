class ShrinkerError(Exception):
    pass


class BKSyntaxError(ShrinkerError):
    def __init__(self, message, line, column):
        super().__init__(f'{message} (line {line}, column {column})')
        self.line = line
        self.column = column


class TypeConflictError(ShrinkerError):
    pass


class UnknownPredicateError(ShrinkerError):
    pass


class EmptyDomainError(ShrinkerError):
    pass


class EnumerationLimitError(ShrinkerError):
    pass
