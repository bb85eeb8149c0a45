from cokb.errors import CokError, ContractError


class QueryError(CokError):
    pass


class ParseError(QueryError):
    """Query text could not be turned into a query value.

    `start`/`end` are character offsets into the source text."""

    def __init__(self, message, start=0, end=0):
        super(ParseError, self).__init__(message)
        self.start = start
        self.end = end


class EmptyQuery(ParseError):
    pass


class Unparseable(ParseError):
    pass


class HoleCountError(ParseError):
    pass


class UnresolvedTerm(QueryError):
    pass


class MissingBinding(QueryError):

    def __init__(self, label):
        super(MissingBinding, self).__init__(
            "no binding for mention '%s'" % label)
        self.label = label


class TermError(ContractError):
    pass
