"""Exception hierarchy shared by every layer of the package."""


class DtlError(Exception):
    """Base class for all errors raised by this package."""


class InvalidKey(DtlError):
    pass


class RangeViolation(DtlError):
    pass


class TreeFull(DtlError):
    pass


class DecodeFailure(DtlError):
    """Ciphertext does not decrypt to a plaintext inside the configured range."""


class EncodingError(DtlError):
    """Canonical byte encoding could not be parsed."""


class RelationMismatch(DtlError):
    pass


class UnsatisfiedRelation(DtlError):
    """The prover was handed a witness that does not satisfy the relation."""


class ModeMismatch(DtlError):
    pass


class MalformedMessage(DtlError):
    pass


class DuplicateAccount(DtlError):
    pass


class ContractError(DtlError):
    """Raised inside a contract call; the ledger rolls the call back."""


class AmountMismatch(ContractError):
    pass


class StaleRoot(ContractError):
    pass


class DoubleRedeem(ContractError):
    pass


class InvalidProof(ContractError):
    pass


class UnknownAccount(ContractError):
    pass


class UnknownCandidate(ContractError):
    pass


class WrongStage(ContractError):
    pass


class Unauthorized(ContractError):
    pass


class InsufficientFunds(ContractError):
    pass


class UnknownTarget(ContractError):
    pass
