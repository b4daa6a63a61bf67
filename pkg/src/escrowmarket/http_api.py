"""HTTP wire API in front of a node.

POST /v1/execute            {sender, msg, funds}  -> receipt or rejection
GET  /v1/query/goods|orders|order/{id}|addresses/{id}|balance/{addr}|stats/{addr}
GET  /v1/state_hash
POST /v1/admin/tick         {dt}
POST /v1/admin/faucet       {addr, amount}

Amounts are decimal strings in both directions. Rejections carry a stable
code from the closed error enumeration; unknown entities on the query side
come back as 404 with the same shape.
"""

from __future__ import annotations

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .errors import MarketError, UnknownAddress, UnknownItem, UnknownOrder
from .node import Node

_NOT_FOUND = (UnknownOrder, UnknownAddress, UnknownItem)


class ExecuteBody(BaseModel):
    sender: str
    msg: dict
    funds: str | int = "0"


class TickBody(BaseModel):
    dt: int


class FaucetBody(BaseModel):
    addr: str
    amount: str | int


def _rejection(exc: MarketError, status: int = 400) -> JSONResponse:
    return JSONResponse(
        {"status": "rejected", "code": exc.code, "detail": exc.detail},
        status_code=status,
    )


def create_app(node: Node) -> FastAPI:
    app = FastAPI(title="escrowmarket node", docs_url=None, redoc_url=None)
    # the browser client may be served from any origin at desk scale
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])

    @app.post("/v1/execute")
    def execute(body: ExecuteBody):
        try:
            outcome = node.handle_execute(body.sender, body.funds, body.msg)
        except MarketError as exc:
            return _rejection(exc)
        if outcome["status"] == "rejected":
            return JSONResponse(outcome, status_code=400)
        return outcome

    def _query(kind: str, arg=None):
        try:
            return node.handle_query(kind, arg)
        except MarketError as exc:
            return _rejection(exc, 404 if isinstance(exc, _NOT_FOUND) else 400)

    @app.get("/v1/query/goods")
    def goods():
        return _query("goods")

    @app.get("/v1/query/orders")
    def orders():
        return _query("orders")

    @app.get("/v1/query/order/{order_id}")
    def order_detail(order_id: int):
        return _query("order", order_id)

    @app.get("/v1/query/addresses/{order_id}")
    def addresses(order_id: int):
        return _query("addresses", order_id)

    @app.get("/v1/query/balance/{addr}")
    def balance(addr: str):
        return _query("balance", addr)

    @app.get("/v1/query/stats/{addr}")
    def stats(addr: str):
        return _query("stats", addr)

    @app.get("/v1/state_hash")
    def state_hash():
        return {"state_hash": node.state_hash()}

    @app.post("/v1/admin/tick")
    def admin_tick(body: TickBody):
        outcome = node.admin_tick(body.dt)
        if outcome["status"] == "rejected":
            return JSONResponse(outcome, status_code=400)
        return outcome

    @app.post("/v1/admin/faucet")
    def admin_faucet(body: FaucetBody):
        try:
            outcome = node.admin_faucet(body.addr, body.amount)
        except MarketError as exc:
            return _rejection(exc)
        if outcome["status"] == "rejected":
            return JSONResponse(outcome, status_code=400)
        return outcome

    return app
