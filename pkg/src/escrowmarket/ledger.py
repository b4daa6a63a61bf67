"""Token accounting substrate: balances, transfers, logical time, gas.

Amounts are plain non-negative ints in the smallest denomination; every
escrow split in the contract is additive, so no rounding ever occurs.
Minting happens only through create_account/credit, which lets callers
assert conservation: the sum of all balances always equals total_minted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DuplicateAddress, InsufficientFunds, UnknownAddress, ZeroAdvance


def check_amount(value, what: str = "amount") -> int:
    """Reject anything that is not a non-negative int (bools included)."""
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise ValueError(f"{what} must be a non-negative integer, got {value!r}")
    return value


@dataclass
class Ledger:
    """Account balances plus a logical tick clock and a flat gas fee."""

    gas_fee: int = 1
    fee_sink: str = "fee_sink"
    accounts: dict[str, int] = field(default_factory=dict)
    clock: int = 0
    total_minted: int = 0

    def __post_init__(self):
        check_amount(self.gas_fee, "gas_fee")
        # the sink must always exist so gas has somewhere to land
        self.accounts.setdefault(self.fee_sink, 0)

    def has_account(self, addr: str) -> bool:
        return addr in self.accounts

    def create_account(self, addr: str, initial: int) -> None:
        if not isinstance(addr, str) or not addr or not addr.isprintable():
            raise ValueError(f"bad address: {addr!r}")
        check_amount(initial, "initial balance")
        if addr in self.accounts:
            raise DuplicateAddress(addr)
        self.accounts[addr] = initial
        self.total_minted += initial

    def credit(self, addr: str, amount: int) -> None:
        """Faucet path: create the account if missing, then mint into it."""
        check_amount(amount)
        if addr not in self.accounts:
            self.create_account(addr, amount)
        else:
            self.accounts[addr] += amount
            self.total_minted += amount

    def balance(self, addr: str) -> int:
        if addr not in self.accounts:
            raise UnknownAddress(addr)
        return self.accounts[addr]

    def transfer(self, src: str, dst: str, amount: int) -> None:
        check_amount(amount)
        if src not in self.accounts:
            raise UnknownAddress(src)
        if dst not in self.accounts:
            raise UnknownAddress(dst)
        if self.accounts[src] < amount:
            raise InsufficientFunds(f"{src} has {self.accounts[src]}, needs {amount}")
        self.accounts[src] -= amount
        self.accounts[dst] += amount

    def charge_gas(self, actor: str) -> None:
        self.transfer(actor, self.fee_sink, self.gas_fee)

    def advance_clock(self, dt: int) -> None:
        if isinstance(dt, bool) or not isinstance(dt, int) or dt < 1:
            raise ZeroAdvance(f"dt must be >= 1, got {dt!r}")
        self.clock += dt

    def total_balance(self) -> int:
        return sum(self.accounts.values())

    def snapshot(self) -> dict:
        """Canonical serializable view (amounts as decimal strings)."""
        return {
            "accounts": {a: str(b) for a, b in sorted(self.accounts.items())},
            "clock": self.clock,
            "gas_fee": str(self.gas_fee),
            "fee_sink": self.fee_sink,
            "total_minted": str(self.total_minted),
        }
