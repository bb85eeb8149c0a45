from cokb.errors import CokError, ContractError


class LLMError(CokError):
    pass


class TemplateError(LLMError):
    pass


class UnknownTemplate(TemplateError):
    pass


class MissingSlot(TemplateError):

    def __init__(self, slot):
        super(MissingSlot, self).__init__("missing value for slot '%s'" % slot)
        self.slot = slot


class RequestError(ContractError):
    pass


class Transport(LLMError):
    pass


class RateLimited(Transport):
    pass


class FixtureMiss(LLMError):

    def __init__(self, key):
        super(FixtureMiss, self).__init__(
            "no recorded response for request %s" % key)
        self.key = key
