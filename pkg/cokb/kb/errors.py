from cokb.errors import CokError


class KBError(CokError):
    pass


class Transport(KBError):
    pass


class EndpointError(KBError):

    def __init__(self, status, message):
        super(EndpointError, self).__init__(
            "endpoint answered %s: %s" % (status, message))
        self.status = status
        self.message = message


class UnresolvedQuery(KBError):
    pass


class FixtureError(KBError):
    pass
