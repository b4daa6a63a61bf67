"""The marketplace state machine: listings, orders, bids, escrow, reviews.

Market.execute applies one execute message under the fixed pipeline: charge
gas, validate everything, then move funds and mutate state. Handlers raise
before their first mutation, so a rejected message leaves the state untouched
except for the gas charge (rejections deliberately still cost gas - pranks
and brushing must not be free).

Fund flows per message:

    buy            buyer -> SC: v_item
    bid_order      shipper -> SC: v_item + v_time
    choose_bid     buyer -> SC: 2*v_ship; SC -> each losing shipper: v_item + v_time
    discard_order  SC -> buyer: v_item + 2*v_ship; SC -> shipper: v_item + v_time
    confirm (buyer at Delivered, the settlement)
                   SC -> buyer: v_ship; SC -> shipper: v_ship + v_item;
                   SC -> seller: v_item; SC -> shipper v_time if on time,
                   else SC -> buyer v_time
    item_loss_broken
                   SC -> buyer: v_item + 2*v_ship; SC -> shipper: v_time;
                   SC -> seller: v_item
    return_confirm SC -> buyer: v_item; SC -> shipper: 2*v_ship + the held
                   deposit v_item + v_time

Each flow drains the order's escrow to exactly zero on a terminal state.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from . import sealedbox
from .errors import (
    AlreadyReviewed,
    AlreadyUploaded,
    ConflictOfInterest,
    DuplicateBid,
    FundsNotExpected,
    InsufficientFunds,
    InvalidBid,
    InvalidPrice,
    InvalidRating,
    ItemLocked,
    ItemUnavailable,
    MalformedMessage,
    NoSuchBid,
    NotBuyer,
    NotChosenShipper,
    NothingToConfirm,
    NotParty,
    NotSeller,
    SelfDeal,
    UnknownAddress,
    UnknownItem,
    UnknownOrder,
    UnsupportedScheme,
    WrongDeposit,
    WrongState,
)
from .ledger import Ledger, check_amount
from .sealedbox import SealedEnvelope, b64encode

CONTRACT_ADDRESS = "contract"


class ItemStatus(str, enum.Enum):
    AVAILABLE = "Available"
    LOCKED = "Locked"
    DELISTED = "Delisted"


class OrderState(str, enum.Enum):
    CREATED = "Created"
    BID_CHOSEN = "BidChosen"
    ADDRESSES_READY = "AddressesReady"
    IN_TRANSIT = "InTransit"
    DELIVERED = "Delivered"
    COMPLETED = "Completed"
    DISCARDED = "Discarded"
    LOSS_BROKEN = "LossBroken"
    RETURNING = "Returning"
    RETURNED = "Returned"


TERMINAL_STATES = frozenset({
    OrderState.COMPLETED,
    OrderState.DISCARDED,
    OrderState.LOSS_BROKEN,
    OrderState.RETURNED,
})

REVIEWABLE_STATES = frozenset({OrderState.COMPLETED, OrderState.RETURNED})

EXECUTE_TYPES = frozenset({
    "post_item", "reset_price", "buy", "bid_order", "choose_bid",
    "upload_address", "discard_order", "confirm", "item_loss_broken",
    "item_unsatisfied", "return_confirm", "submit_review",
})


@dataclass
class Bid:
    shipper: str
    v_ship: int
    v_time: int
    promised_delivery: int
    public_key: bytes
    scheme_id: str
    deposit_held: bool = True

    def to_wire(self) -> dict:
        return {
            "shipper": self.shipper,
            "v_ship": str(self.v_ship),
            "v_time": str(self.v_time),
            "promised_delivery": self.promised_delivery,
            "public_key": b64encode(self.public_key),
            "scheme_id": self.scheme_id,
            "deposit_held": self.deposit_held,
        }


@dataclass
class Review:
    rating: int
    text: str
    author: str

    def to_wire(self) -> dict:
        return {"rating": self.rating, "text": self.text, "author": self.author}


@dataclass
class ItemListing:
    item_id: int
    seller: str
    title: str
    description: str
    price: int
    seller_obscured_address: str
    status: ItemStatus = ItemStatus.AVAILABLE

    def to_wire(self) -> dict:
        return {
            "item_id": self.item_id,
            "seller": self.seller,
            "title": self.title,
            "description": self.description,
            "price": str(self.price),
            "seller_obscured_address": self.seller_obscured_address,
            "status": self.status.value,
        }


@dataclass
class Order:
    order_id: int
    item_id: int
    buyer: str
    buyer_obscured_address: str
    created_tick: int
    state: OrderState = OrderState.CREATED
    bids: list[Bid] = field(default_factory=list)
    chosen: int | None = None
    encrypted_buyer_address: SealedEnvelope | None = None
    encrypted_seller_address: SealedEnvelope | None = None
    seller_confirmed_shipped: bool = False
    shipper_confirmed_shipped: bool = False
    shipper_confirmed_delivered: bool = False
    buyer_confirmed_received: bool = False
    shipped_tick: int | None = None
    delivered_tick: int | None = None
    escrow: int = 0
    review: Review | None = None

    def chosen_bid(self) -> Bid:
        assert self.chosen is not None
        return self.bids[self.chosen]

    def is_terminal(self) -> bool:
        return self.state in TERMINAL_STATES

    def delivered_on_time(self) -> bool | None:
        if self.shipped_tick is None or self.delivered_tick is None:
            return None
        return self.delivered_tick - self.shipped_tick <= self.chosen_bid().promised_delivery

    def summary_wire(self, seller_obscured: str) -> dict:
        return {
            "order_id": self.order_id,
            "item_id": self.item_id,
            "buyer": self.buyer,
            "state": self.state.value,
            "created_tick": self.created_tick,
            "bid_count": len(self.bids),
            "chosen_shipper": None if self.chosen is None else self.chosen_bid().shipper,
            "buyer_obscured_address": self.buyer_obscured_address,
            "seller_obscured_address": seller_obscured,
        }

    def detail_wire(self) -> dict:
        return {
            "order_id": self.order_id,
            "item_id": self.item_id,
            "buyer": self.buyer,
            "buyer_obscured_address": self.buyer_obscured_address,
            "state": self.state.value,
            "bids": [b.to_wire() for b in self.bids],
            "chosen": self.chosen,
            "has_buyer_envelope": self.encrypted_buyer_address is not None,
            "has_seller_envelope": self.encrypted_seller_address is not None,
            "seller_confirmed_shipped": self.seller_confirmed_shipped,
            "shipper_confirmed_shipped": self.shipper_confirmed_shipped,
            "shipper_confirmed_delivered": self.shipper_confirmed_delivered,
            "buyer_confirmed_received": self.buyer_confirmed_received,
            "created_tick": self.created_tick,
            "shipped_tick": self.shipped_tick,
            "delivered_tick": self.delivered_tick,
            "escrow": str(self.escrow),
            "review": None if self.review is None else self.review.to_wire(),
        }


@dataclass
class Transfer:
    src: str
    dst: str
    amount: int

    def to_wire(self) -> dict:
        return {"from": self.src, "to": self.dst, "amount": str(self.amount)}


@dataclass
class Event:
    name: str
    attributes: dict[str, str]

    def to_wire(self) -> dict:
        return {"name": self.name, "attributes": dict(self.attributes)}


@dataclass
class ExecuteReceipt:
    events: list[Event] = field(default_factory=list)
    transfers: list[Transfer] = field(default_factory=list)

    def to_wire(self) -> dict:
        return {
            "events": [e.to_wire() for e in self.events],
            "transfers": [t.to_wire() for t in self.transfers],
        }

    def attr(self, name: str) -> str | None:
        """First occurrence of an event attribute, for pulling out new ids."""
        for event in self.events:
            if name in event.attributes:
                return event.attributes[name]
        return None


class Market:
    """Single-writer marketplace state. Callers serialize all mutations."""

    def __init__(self, gas_fee: int = 1, fee_sink: str = "fee_sink",
                 contract_address: str = CONTRACT_ADDRESS):
        self.ledger = Ledger(gas_fee=gas_fee, fee_sink=fee_sink)
        self.contract_address = contract_address
        self.ledger.create_account(contract_address, 0)
        self.listings: dict[int, ItemListing] = {}
        self.orders: dict[int, Order] = {}
        self._next_item_id = 1
        self._next_order_id = 1

    # --- plumbing ------------------------------------------------------

    @property
    def clock(self) -> int:
        return self.ledger.clock

    @property
    def gas_fee(self) -> int:
        return self.ledger.gas_fee

    def advance_clock(self, dt: int) -> None:
        self.ledger.advance_clock(dt)

    def faucet(self, addr: str, amount: int) -> None:
        if not isinstance(addr, str) or not addr or not addr.isprintable():
            raise MalformedMessage(f"bad address {addr!r}")
        self.ledger.credit(addr, amount)

    def escrow_total(self) -> int:
        return sum(o.escrow for o in self.orders.values())

    def execute(self, sender: str, attached: int, msg: dict) -> ExecuteReceipt:
        """Apply one execute message; raises MarketError on rejection.

        On rejection the only state change is the gas charge (and if the
        sender cannot even cover gas, no change at all).
        """
        check_amount(attached, "attached")
        mtype = msg.get("type")
        if mtype not in EXECUTE_TYPES:
            raise MalformedMessage(f"not an execute message: {mtype!r}")
        handler = getattr(self, f"_{mtype}")
        if not self.ledger.has_account(sender):
            raise UnknownAddress(sender)
        if self.ledger.balance(sender) < self.gas_fee:
            raise InsufficientFunds(f"{sender} cannot cover gas")
        receipt = ExecuteReceipt()
        self.ledger.charge_gas(sender)
        if self.gas_fee:
            receipt.transfers.append(
                Transfer(sender, self.ledger.fee_sink, self.gas_fee))
        # sender must actually hold what the message claims to attach
        if self.ledger.balance(sender) < attached:
            raise InsufficientFunds(
                f"{sender} declared {attached} attached but cannot cover it")
        handler(sender, attached, msg, receipt)
        return receipt

    def _pay(self, src: str, dst: str, amount: int, receipt: ExecuteReceipt) -> None:
        if amount == 0:
            return
        self.ledger.transfer(src, dst, amount)
        receipt.transfers.append(Transfer(src, dst, amount))

    def _deposit(self, order: Order, src: str, amount: int,
                 receipt: ExecuteReceipt) -> None:
        self._pay(src, self.contract_address, amount, receipt)
        order.escrow += amount

    def _payout(self, order: Order, dst: str, amount: int,
                receipt: ExecuteReceipt) -> None:
        assert order.escrow >= amount, "escrow underflow"
        self._pay(self.contract_address, dst, amount, receipt)
        order.escrow -= amount

    def _item(self, item_id) -> ItemListing:
        item = self.listings.get(item_id)
        if item is None:
            raise UnknownItem(f"item {item_id}")
        return item

    def _order(self, order_id) -> Order:
        order = self.orders.get(order_id)
        if order is None:
            raise UnknownOrder(f"order {order_id}")
        return order

    @staticmethod
    def _require_no_funds(attached: int) -> None:
        if attached != 0:
            raise FundsNotExpected(f"attached {attached}, expected 0")

    # --- execute handlers ----------------------------------------------

    def _post_item(self, sender, attached, msg, receipt):
        self._require_no_funds(attached)
        price = msg["price"]
        if price < 1:
            raise InvalidPrice(f"price {price} < 1")
        item = ItemListing(
            item_id=self._next_item_id,
            seller=sender,
            title=msg["title"],
            description=msg["description"],
            price=price,
            seller_obscured_address=msg["obscured_address"],
        )
        self._next_item_id += 1
        self.listings[item.item_id] = item
        receipt.events.append(Event("item_posted", {
            "item_id": str(item.item_id), "seller": sender}))

    def _reset_price(self, sender, attached, msg, receipt):
        self._require_no_funds(attached)
        item = self._item(msg["item_id"])
        if item.seller != sender:
            raise NotSeller(f"{sender} did not post item {item.item_id}")
        if item.status != ItemStatus.AVAILABLE:
            raise ItemLocked(f"item {item.item_id} is {item.status.value}")
        if msg["new_price"] < 1:
            raise InvalidPrice(f"price {msg['new_price']} < 1")
        item.price = msg["new_price"]
        receipt.events.append(Event("price_reset", {
            "item_id": str(item.item_id), "new_price": str(item.price)}))

    def _buy(self, sender, attached, msg, receipt):
        item = self._item(msg["item_id"])
        if item.status != ItemStatus.AVAILABLE:
            raise ItemUnavailable(f"item {item.item_id} is {item.status.value}")
        if sender == item.seller:
            raise SelfDeal("sellers cannot buy their own items")
        if attached != item.price:
            raise WrongDeposit(f"attached {attached}, price is {item.price}")
        order = Order(
            order_id=self._next_order_id,
            item_id=item.item_id,
            buyer=sender,
            buyer_obscured_address=msg["buyer_obscured_address"],
            created_tick=self.clock,
        )
        self._next_order_id += 1
        self.orders[order.order_id] = order
        item.status = ItemStatus.LOCKED
        self._deposit(order, sender, attached, receipt)
        receipt.events.append(Event("order_created", {
            "order_id": str(order.order_id),
            "item_id": str(item.item_id),
            "buyer": sender,
        }))

    def _bid_order(self, sender, attached, msg, receipt):
        order = self._order(msg["order_id"])
        item = self.listings[order.item_id]
        if order.state != OrderState.CREATED:
            raise WrongState(f"order is {order.state.value}, bids need Created")
        if sender in (order.buyer, item.seller):
            raise ConflictOfInterest("buyer and seller cannot bid")
        if any(b.shipper == sender for b in order.bids):
            raise DuplicateBid(f"{sender} already bid on order {order.order_id}")
        v_ship, v_time = msg["v_ship"], msg["v_time"]
        promised = msg["promised_delivery"]
        if v_ship < 1:
            raise InvalidBid(f"v_ship {v_ship} < 1")
        if promised < 1:
            raise InvalidBid(f"promised_delivery {promised} < 1")
        if not sealedbox.is_supported(msg["scheme_id"]):
            raise UnsupportedScheme(msg["scheme_id"])
        required = item.price + v_time
        if attached != required:
            raise WrongDeposit(f"attached {attached}, bid deposit is {required}")
        bid = Bid(
            shipper=sender,
            v_ship=v_ship,
            v_time=v_time,
            promised_delivery=promised,
            public_key=msg["public_key"],
            scheme_id=msg["scheme_id"],
        )
        order.bids.append(bid)
        self._deposit(order, sender, attached, receipt)
        receipt.events.append(Event("bid_placed", {
            "order_id": str(order.order_id),
            "bid_index": str(len(order.bids) - 1),
            "shipper": sender,
        }))

    def _choose_bid(self, sender, attached, msg, receipt):
        order = self._order(msg["order_id"])
        item = self.listings[order.item_id]
        if sender != order.buyer:
            raise NotBuyer(f"{sender} is not the buyer")
        if order.state != OrderState.CREATED:
            raise WrongState(f"order is {order.state.value}")
        index = msg["bid_index"]
        if not 0 <= index < len(order.bids):
            raise NoSuchBid(f"bid {index} of {len(order.bids)}")
        chosen = order.bids[index]
        if attached != 2 * chosen.v_ship:
            raise WrongDeposit(
                f"attached {attached}, choosing this bid needs {2 * chosen.v_ship}")
        self._deposit(order, sender, attached, receipt)
        order.chosen = index
        order.state = OrderState.BID_CHOSEN
        receipt.events.append(Event("bid_chosen", {
            "order_id": str(order.order_id),
            "bid_index": str(index),
            "shipper": chosen.shipper,
        }))
        for i, bid in enumerate(order.bids):
            if i == index:
                continue
            refund = item.price + bid.v_time
            self._payout(order, bid.shipper, refund, receipt)
            bid.deposit_held = False
            receipt.events.append(Event("bid_refunded", {
                "order_id": str(order.order_id),
                "bid_index": str(i),
                "shipper": bid.shipper,
            }))

    def _upload_address(self, sender, attached, msg, receipt):
        self._require_no_funds(attached)
        order = self._order(msg["order_id"])
        item = self.listings[order.item_id]
        if order.state not in (OrderState.BID_CHOSEN, OrderState.ADDRESSES_READY):
            raise WrongState(f"order is {order.state.value}")
        if sender == order.buyer:
            slot = "encrypted_buyer_address"
            party = "buyer"
        elif sender == item.seller:
            slot = "encrypted_seller_address"
            party = "seller"
        else:
            raise NotParty("only the buyer and the seller upload addresses")
        if getattr(order, slot) is not None:
            raise AlreadyUploaded(f"{party} address already uploaded")
        setattr(order, slot, msg["envelope"])
        receipt.events.append(Event("address_uploaded", {
            "order_id": str(order.order_id), "party": party}))
        if (order.encrypted_buyer_address is not None
                and order.encrypted_seller_address is not None):
            order.state = OrderState.ADDRESSES_READY
            receipt.events.append(Event("addresses_ready", {
                "order_id": str(order.order_id)}))

    def _discard_order(self, sender, attached, msg, receipt):
        self._require_no_funds(attached)
        order = self._order(msg["order_id"])
        if order.state != OrderState.ADDRESSES_READY:
            raise WrongState(f"order is {order.state.value}")
        chosen = order.chosen_bid()
        if sender != chosen.shipper:
            raise NotChosenShipper(f"{sender} is not the chosen shipper")
        item = self.listings[order.item_id]
        self._payout(order, order.buyer, item.price + 2 * chosen.v_ship, receipt)
        self._payout(order, chosen.shipper, item.price + chosen.v_time, receipt)
        chosen.deposit_held = False
        order.state = OrderState.DISCARDED
        item.status = ItemStatus.AVAILABLE
        receipt.events.append(Event("order_discarded", {
            "order_id": str(order.order_id)}))

    def _confirm(self, sender, attached, msg, receipt):
        self._require_no_funds(attached)
        order = self._order(msg["order_id"])
        item = self.listings[order.item_id]
        state = order.state
        chosen = None if order.chosen is None else order.chosen_bid()

        if state == OrderState.ADDRESSES_READY and sender == item.seller:
            if order.seller_confirmed_shipped:
                raise NothingToConfirm("seller already confirmed shipping")
            order.seller_confirmed_shipped = True
            receipt.events.append(Event("shipment_confirmed", {
                "order_id": str(order.order_id), "party": "seller"}))
        elif (state == OrderState.ADDRESSES_READY and chosen is not None
                and sender == chosen.shipper):
            if order.shipper_confirmed_shipped:
                raise NothingToConfirm("shipper already confirmed shipping")
            order.shipper_confirmed_shipped = True
            receipt.events.append(Event("shipment_confirmed", {
                "order_id": str(order.order_id), "party": "shipper"}))
        elif (state == OrderState.IN_TRANSIT and chosen is not None
                and sender == chosen.shipper):
            order.shipper_confirmed_delivered = True
            order.state = OrderState.DELIVERED
            order.delivered_tick = self.clock
            receipt.events.append(Event("delivered", {
                "order_id": str(order.order_id), "tick": str(self.clock)}))
            return
        elif state == OrderState.DELIVERED and sender == order.buyer:
            self._settle(order, item, receipt)
            return
        else:
            raise NothingToConfirm(
                f"{sender} has nothing to confirm while order is {state.value}")

        if order.seller_confirmed_shipped and order.shipper_confirmed_shipped:
            order.state = OrderState.IN_TRANSIT
            order.shipped_tick = self.clock
            receipt.events.append(Event("in_transit", {
                "order_id": str(order.order_id), "tick": str(self.clock)}))

    def _settle(self, order: Order, item: ItemListing, receipt: ExecuteReceipt):
        """Buyer confirmed receipt: release every escrow leg of the order."""
        chosen = order.chosen_bid()
        order.buyer_confirmed_received = True
        on_time = order.delivered_tick - order.shipped_tick <= chosen.promised_delivery
        self._payout(order, order.buyer, chosen.v_ship, receipt)
        self._payout(order, chosen.shipper, chosen.v_ship + item.price, receipt)
        self._payout(order, item.seller, item.price, receipt)
        if on_time:
            self._payout(order, chosen.shipper, chosen.v_time, receipt)
        else:
            self._payout(order, order.buyer, chosen.v_time, receipt)
        chosen.deposit_held = False
        order.state = OrderState.COMPLETED
        item.status = ItemStatus.DELISTED
        receipt.events.append(Event("order_completed", {
            "order_id": str(order.order_id),
            "on_time": "true" if on_time else "false",
        }))

    def _item_loss_broken(self, sender, attached, msg, receipt):
        self._require_no_funds(attached)
        order = self._order(msg["order_id"])
        if order.state not in (OrderState.IN_TRANSIT, OrderState.DELIVERED):
            raise WrongState(f"order is {order.state.value}")
        chosen = order.chosen_bid()
        if sender not in (order.buyer, chosen.shipper):
            raise NotParty("only the buyer or the chosen shipper may declare loss")
        item = self.listings[order.item_id]
        self._payout(order, order.buyer, item.price + 2 * chosen.v_ship, receipt)
        self._payout(order, chosen.shipper, chosen.v_time, receipt)
        self._payout(order, item.seller, item.price, receipt)
        chosen.deposit_held = False
        order.state = OrderState.LOSS_BROKEN
        item.status = ItemStatus.DELISTED
        receipt.events.append(Event("order_loss_broken", {
            "order_id": str(order.order_id)}))

    def _item_unsatisfied(self, sender, attached, msg, receipt):
        self._require_no_funds(attached)
        order = self._order(msg["order_id"])
        if sender != order.buyer:
            raise NotBuyer(f"{sender} is not the buyer")
        if order.state != OrderState.DELIVERED:
            raise WrongState(f"order is {order.state.value}")
        order.state = OrderState.RETURNING
        receipt.events.append(Event("return_requested", {
            "order_id": str(order.order_id)}))

    def _return_confirm(self, sender, attached, msg, receipt):
        self._require_no_funds(attached)
        order = self._order(msg["order_id"])
        item = self.listings[order.item_id]
        if sender != item.seller:
            raise NotSeller(f"{sender} did not post item {item.item_id}")
        if order.state != OrderState.RETURNING:
            raise WrongState(f"order is {order.state.value}")
        chosen = order.chosen_bid()
        self._payout(order, order.buyer, item.price, receipt)
        # the return fee plus the shipper's own held deposit
        self._payout(order, chosen.shipper,
                     2 * chosen.v_ship + item.price + chosen.v_time, receipt)
        chosen.deposit_held = False
        order.state = OrderState.RETURNED
        item.status = ItemStatus.AVAILABLE
        receipt.events.append(Event("order_returned", {
            "order_id": str(order.order_id)}))

    def _submit_review(self, sender, attached, msg, receipt):
        self._require_no_funds(attached)
        order = self._order(msg["order_id"])
        if sender != order.buyer:
            raise NotBuyer(f"{sender} is not the buyer")
        if order.state not in REVIEWABLE_STATES:
            raise WrongState(f"order is {order.state.value}")
        if order.review is not None:
            raise AlreadyReviewed(f"order {order.order_id} already reviewed")
        rating = msg["rating"]
        if not 1 <= rating <= 5:
            raise InvalidRating(f"rating {rating} outside [1, 5]")
        order.review = Review(rating=rating, text=msg["text"], author=sender)
        receipt.events.append(Event("review_submitted", {
            "order_id": str(order.order_id), "rating": str(rating)}))

    # --- queries (read-only, never charge gas) --------------------------

    def get_goods(self) -> list[dict]:
        return [self.listings[i].to_wire() for i in sorted(self.listings)]

    def get_orders(self) -> list[dict]:
        out = []
        for oid in sorted(self.orders):
            order = self.orders[oid]
            seller_obscured = self.listings[order.item_id].seller_obscured_address
            out.append(order.summary_wire(seller_obscured))
        return out

    def get_order_detail(self, order_id: int) -> dict:
        return self._order(order_id).detail_wire()

    def get_addresses(self, order_id: int) -> dict:
        order = self._order(order_id)
        item = self.listings[order.item_id]
        return {
            "order_id": order.order_id,
            "buyer_obscured_address": order.buyer_obscured_address,
            "seller_obscured_address": item.seller_obscured_address,
            "buyer_envelope": (None if order.encrypted_buyer_address is None
                               else order.encrypted_buyer_address.to_wire()),
            "seller_envelope": (None if order.encrypted_seller_address is None
                                else order.encrypted_seller_address.to_wire()),
        }

    def get_balance(self, addr: str) -> int:
        return self.ledger.balance(addr)

    def get_stats(self, addr: str) -> dict:
        """On-chain reputation counters, ratios as exact (num, den) pairs."""
        perfect = completed = total_chosen = 0
        satisfied = total_sold = 0
        for order in self.orders.values():
            if order.chosen is not None and order.chosen_bid().shipper == addr:
                total_chosen += 1
                if order.state == OrderState.COMPLETED:
                    completed += 1
                    if order.delivered_on_time():
                        perfect += 1
            if self.listings[order.item_id].seller == addr and order.is_terminal():
                total_sold += 1
                if order.state == OrderState.COMPLETED:
                    satisfied += 1
        return {
            "address": addr,
            "as_shipper": {
                "completed": completed,
                "total_chosen": total_chosen,
                "perfect_ratio": [perfect, total_chosen],
            },
            "as_seller": {
                "satisfied": satisfied,
                "total_sold": total_sold,
                "satisfied_ratio": [satisfied, total_sold],
            },
        }

    # --- canonical snapshot ---------------------------------------------

    def snapshot(self) -> dict:
        """Everything that determines future behavior, in canonical form."""
        orders = []
        for oid in sorted(self.orders):
            order = self.orders[oid]
            wire = order.detail_wire()
            wire["buyer_envelope"] = (
                None if order.encrypted_buyer_address is None
                else order.encrypted_buyer_address.to_wire())
            wire["seller_envelope"] = (
                None if order.encrypted_seller_address is None
                else order.encrypted_seller_address.to_wire())
            orders.append(wire)
        return {
            "ledger": self.ledger.snapshot(),
            "contract_address": self.contract_address,
            "listings": [self.listings[i].to_wire() for i in sorted(self.listings)],
            "orders": orders,
            "next_item_id": self._next_item_id,
            "next_order_id": self._next_order_id,
        }
