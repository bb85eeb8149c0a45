from cokb.errors import CokError, ContractError


class ContrastiveError(CokError):
    pass


class InapplicableOp(ContrastiveError):
    pass


class CannotCorrupt(ContrastiveError):
    pass


class TemplateSlotMissing(ContrastiveError):

    def __init__(self, slots):
        super(TemplateSlotMissing, self).__init__(
            "template lacks slot(s): %s" % ', '.join(slots))
        self.slots = tuple(slots)


class InvalidCorrectQuery(ContractError):
    pass


class LengthMismatch(ContractError):
    pass


class PositiveLogprob(ContractError):
    pass
