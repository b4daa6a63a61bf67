"""Stable rejection codes shared by the contract, node, CLI, and harness.

Every rejection anywhere in the system is a MarketError subclass; the class
name doubles as the wire-level error code, so the set of codes is closed by
construction (see ERROR_CODES).
"""

from __future__ import annotations


class MarketError(Exception):
    """A rejected message. ``code`` is the stable machine-readable name."""

    def __init__(self, detail: str = ""):
        super().__init__(detail or self.__class__.__name__)
        self.detail = detail

    @property
    def code(self) -> str:
        return self.__class__.__name__


# --- ledger ---

class DuplicateAddress(MarketError):
    pass


class UnknownAddress(MarketError):
    pass


class InsufficientFunds(MarketError):
    pass


class ZeroAdvance(MarketError):
    pass


# --- contract: items and orders ---

class FundsNotExpected(MarketError):
    pass


class InvalidPrice(MarketError):
    pass


class NotSeller(MarketError):
    pass


class ItemLocked(MarketError):
    pass


class UnknownItem(MarketError):
    pass


class ItemUnavailable(MarketError):
    pass


class SelfDeal(MarketError):
    pass


class WrongDeposit(MarketError):
    pass


class WrongState(MarketError):
    pass


class ConflictOfInterest(MarketError):
    pass


class DuplicateBid(MarketError):
    pass


class InvalidBid(MarketError):
    pass


class NotBuyer(MarketError):
    pass


class NoSuchBid(MarketError):
    pass


class NotParty(MarketError):
    pass


class AlreadyUploaded(MarketError):
    pass


class NotChosenShipper(MarketError):
    pass


class NothingToConfirm(MarketError):
    pass


class InvalidRating(MarketError):
    pass


class AlreadyReviewed(MarketError):
    pass


class UnknownOrder(MarketError):
    pass


# --- sealed envelopes ---

class UnsupportedScheme(MarketError):
    pass


class MalformedKey(MarketError):
    pass


class DecryptionFailure(MarketError):
    pass


class SchemeMismatch(MarketError):
    pass


# --- node and tooling ---

class MalformedMessage(MarketError):
    pass


class CorruptLog(MarketError):
    pass


class FaucetDisabled(MarketError):
    pass


class ParseError(MarketError):
    pass


class StepRejected(MarketError):
    pass


class ExpectationFailed(MarketError):
    pass


ERROR_CODES = frozenset(cls.__name__ for cls in MarketError.__subclasses__())
