"""Deterministic multi-actor simulator and the append-only run log.

A scenario is a TOML script: a seed, optional parameter overrides, enum
tables, and an ordered action list.  Every actor draws randomness from its
own generator seeded from (scenario seed, actor name), so a (script, seed)
pair always produces byte-identical logs.  Each executed action appends one
log record carrying the public transcript, state digests before and after,
and a running record-chain digest; ``replay`` re-verifies the chain.
"""

from __future__ import annotations

import hashlib
import json
import random
import sys
from dataclasses import dataclass, field

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import engine
from .campaign import (
    Campaign,
    check_association,
    check_credential_uniqueness,
    open_campaign,
)
from .claims import Claim, EnumTable
from .errors import LogError, ProtocolError, ScriptError, UnsatisfiedRelation
from .fields import fe_to_hex
from .hashing import Site, h1
from .issuer import IssuerLedger
from .nizk import canonical_json
from .params import ProtocolParams
from .relations import association_nullifier
from .vdr import RegistryState
from .wallet import AssociationRecord, Wallet

LOG_FORMAT = "credveil-log/1"

ACTION_TYPES = (
    "keygen", "publish", "issue", "present", "register", "associate",
    "append", "aggregate", "refresh-randomness", "refresh-key", "revoke",
    "refresh-revocation", "open-campaign", "present-campaign", "block",
)


def load_script(path) -> dict:
    try:
        with open(path, "rb") as handle:
            script = tomllib.load(handle)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ScriptError(f"cannot load scenario: {exc}") from exc
    if not isinstance(script.get("action"), list):
        raise ScriptError("scenario must define an [[action]] list")
    return script


@dataclass
class Actor:
    name: str
    rng: random.Random
    wallet: Wallet


@dataclass
class CredentialEntry:
    cred: object
    u_rv: int
    holder: str
    holder_id: int


class Simulation:
    """Executes scenario actions against one shared VDR."""

    def __init__(self, params: ProtocolParams, seed: int):
        self.params = params
        self.seed = seed
        self.vdr = RegistryState(params)
        self.actors: dict[str, Actor] = {}
        self.idents: dict[tuple[str, str], int] = {}   # (actor, name) -> id
        self.ledgers: dict[int, IssuerLedger] = {}      # issuer ident -> ledger
        self.creds: dict[str, CredentialEntry] = {}
        self.assocs: dict[str, tuple[str, AssociationRecord]] = {}
        self.campaigns: dict[str, tuple[str, Campaign]] = {}
        self.enums: dict[str, EnumTable] = {}

    # --- bookkeeping ----------------------------------------------------------

    def actor(self, name: str) -> Actor:
        if name not in self.actors:
            rng = random.Random(f"{self.seed}:{name}")
            self.actors[name] = Actor(name=name, rng=rng,
                                      wallet=Wallet(self.params, rng))
        return self.actors[name]

    def ident(self, actor: str, name: str) -> int:
        try:
            return self.idents[(actor, name)]
        except KeyError:
            raise ScriptError(f"unknown identifier {actor}:{name}") from None

    def _cred(self, name: str) -> CredentialEntry:
        try:
            return self.creds[name]
        except KeyError:
            raise ScriptError(f"unknown credential {name!r}") from None

    def _assoc(self, name: str) -> tuple[str, AssociationRecord]:
        try:
            return self.assocs[name]
        except KeyError:
            raise ScriptError(f"unknown association {name!r}") from None

    def _campaign(self, name: str) -> tuple[str, Campaign]:
        try:
            return self.campaigns[name]
        except KeyError:
            raise ScriptError(f"unknown campaign {name!r}") from None

    def _ledger(self, issuer_ident: int) -> IssuerLedger:
        if issuer_ident not in self.ledgers:
            self.ledgers[issuer_ident] = IssuerLedger(self.params, issuer_ident)
        return self.ledgers[issuer_ident]

    def _claims(self, specs) -> list:
        claims = []
        for spec in specs:
            kind = spec["kind"]
            value = spec["value"]
            if kind == "enum":
                table = self.enums.get(spec.get("table", ""))
                if table is None:
                    raise ScriptError(f"unknown enum table in claim {spec!r}")
                value = table.code(value)
            claims.append(Claim.of(self.params, spec["key"], kind, value))
        return claims

    def _predicate_obj(self, spec) -> dict:
        op = spec.get("op")
        if op in ("and", "or"):
            return {"op": op, "left": self._predicate_obj(spec["left"]),
                    "right": self._predicate_obj(spec["right"])}
        if op in ("in", "not-in"):
            table = self.enums.get(spec.get("table", ""))
            if table is None:
                raise ScriptError(f"unknown enum table in predicate {spec!r}")
            return {"op": op, "codes": [table.code(v) for v in spec["values"]]}
        return {"op": op, "constant": spec["constant"]}

    # --- state digest -----------------------------------------------------------

    def state_digest(self) -> str:
        inputs = [self.vdr.state_digest()]
        for ident in sorted(self.ledgers):
            inputs.append(self.ledgers[ident].state_digest())
        for name in sorted(self.campaigns):
            inputs.append(self.campaigns[name][1].state_digest(self.params))
        return fe_to_hex(self.params, h1(self.params, inputs, Site.STATE))

    def stats(self) -> dict:
        return {
            "vdr": self.vdr.stats(),
            "issuers": {
                fe_to_hex(self.params, ident): ledger.stats()
                for ident, ledger in sorted(self.ledgers.items())
            },
            "campaigns": {
                name: camp.stats()
                for name, (_, camp) in sorted(self.campaigns.items())
            },
        }

    # --- action execution ---------------------------------------------------------

    def execute(self, action: dict) -> dict:
        """Run one action, returning its public transcript.  Protocol
        rejections raise; script malformations raise ScriptError."""
        kind = action.get("type")
        if kind not in ACTION_TYPES:
            raise ScriptError(f"unknown action type {kind!r}")
        handler = getattr(self, "_do_" + kind.replace("-", "_"))
        try:
            return handler(action)
        except KeyError as exc:
            raise ScriptError(f"action {kind!r} missing field {exc}") from exc

    def _do_keygen(self, a) -> dict:
        actor = self.actor(a["actor"])
        key = (a["actor"], a["id"])
        if key in self.idents:
            raise ScriptError(f"identifier name {key} reused")
        self.idents[key] = actor.wallet.create_identity()
        return {}

    def _do_publish(self, a) -> dict:
        actor = self.actor(a["actor"])
        ident = self.ident(a["actor"], a["id"])
        root = actor.wallet.publish(self.vdr, ident)
        pk = actor.wallet.keypair(ident).pk
        return {"id": ident, "pk": [pk % self.params.prime,
                                    pk // self.params.prime], "r_id": root}

    def _do_issue(self, a) -> dict:
        issuer = self.actor(a["actor"])
        issuer_ident = self.ident(a["actor"], a["issuer_id"])
        holder_ident = self.ident(a["holder"], a["holder_id"])
        if a["cred"] in self.creds:
            raise ScriptError(f"credential name {a['cred']!r} reused")
        ledger = self._ledger(issuer_ident)
        cred, u_rv = engine.issue_credential(
            self.params,
            issuer.wallet.keypair(issuer_ident),
            issuer_ident,
            holder_ident,
            self._claims(a["claims"]),
            ledger,
            issuer.rng,
        )
        self.creds[a["cred"]] = CredentialEntry(
            cred=cred, u_rv=u_rv, holder=a["holder"], holder_id=holder_ident
        )
        return {"h_rv": ledger.tree.leaves[-1], "r_rv": ledger.tree.root}

    def _present_bundle(self, a, campaign=None):
        entry = self._cred(a["cred"])
        holder = self.actor(entry.holder)
        verifier = self.actor(a["verifier"])
        ledger = self._ledger(entry.cred.issuer_id)
        challenge = verifier.rng.randrange(self.params.prime)
        bundle = engine.present(
            self.params,
            entry.cred,
            entry.u_rv,
            entry.holder_id,
            holder.wallet.keypair(entry.holder_id),
            a["claim"],
            self._predicate_obj(a["predicate"]),
            self.vdr,
            ledger,
            holder.rng,
            challenge=challenge,
            mask_signature=bool(a.get("mask_signature", False)),
            campaign=campaign,
        )
        accepted = engine.verify_presentation(
            self.params, bundle, self.vdr, ledger, challenge=challenge
        )
        return bundle, accepted, ledger

    def _do_present(self, a) -> dict:
        bundle, accepted, _ = self._present_bundle(a)
        if not accepted:
            raise UnsatisfiedRelation("presentation rejected")
        return bundle.transcript()

    def _do_register(self, a) -> dict:
        actor = self.actor(a["actor"])
        ident = self.ident(a["actor"], a["id"])
        proof = actor.wallet.register(self.vdr, ident)
        return dict(proof.statement)

    def _do_associate(self, a) -> dict:
        actor = self.actor(a["actor"])
        if a["assoc"] in self.assocs:
            raise ScriptError(f"association name {a['assoc']!r} reused")
        idents = [self.ident(a["actor"], name) for name in a["ids"]]
        record = actor.wallet.associate(self.vdr, idents)
        self.assocs[a["assoc"]] = (a["actor"], record)
        return {"id_a": record.id_a, "r_a": self.vdr.association_tree.root}

    def _do_append(self, a) -> dict:
        owner, record = self._assoc(a["assoc"])
        actor = self.actor(owner)
        ident = self.ident(owner, a["id"])
        new_record = actor.wallet.append(self.vdr, record, ident)
        self.assocs[a["assoc"]] = (owner, new_record)
        return {"id_a": new_record.id_a, "r_a": self.vdr.association_tree.root}

    def _do_aggregate(self, a) -> dict:
        owner1, rec1 = self._assoc(a["first"])
        owner2, rec2 = self._assoc(a["second"])
        if owner1 != owner2:
            raise ScriptError("aggregation requires one owner")
        if a["assoc"] in self.assocs:
            raise ScriptError(f"association name {a['assoc']!r} reused")
        actor = self.actor(owner1)
        new_record = actor.wallet.aggregate(self.vdr, rec1, rec2)
        self.assocs[a["assoc"]] = (owner1, new_record)
        del self.assocs[a["first"]], self.assocs[a["second"]]
        return {"id_a": new_record.id_a, "r_a": self.vdr.association_tree.root}

    def _do_refresh_randomness(self, a) -> dict:
        owner, record = self._assoc(a["assoc"])
        actor = self.actor(owner)
        new_record = actor.wallet.refresh_randomness(self.vdr, record)
        self.assocs[a["assoc"]] = (owner, new_record)
        return {"id_a": new_record.id_a, "r_a": self.vdr.association_tree.root}

    def _do_refresh_key(self, a) -> dict:
        owner, record = self._assoc(a["assoc"])
        actor = self.actor(owner)
        ident = self.ident(owner, a["id"])
        kp = actor.wallet.refresh_key(self.vdr, record, ident)
        return {"id": ident, "pk_new": [kp.pk % self.params.prime,
                                        kp.pk // self.params.prime],
                "r_id": self.vdr.identity_tree.root}

    def _do_revoke(self, a) -> dict:
        entry = self._cred(a["cred"])
        ledger = self._ledger(entry.cred.issuer_id)
        acting = self.ident(a["actor"], a["issuer_id"])
        ledger.revoke(acting, entry.cred.digest(self.params), entry.u_rv)
        return {"n_rv_count": len(ledger.nullifiers)}

    def _do_refresh_revocation(self, a) -> dict:
        entry = self._cred(a["cred"])
        holder = self.actor(entry.holder)
        ledger = self._ledger(entry.cred.issuer_id)
        entry.u_rv = engine.refresh_revocation_nullifier(
            self.params, entry.cred, entry.u_rv, ledger, holder.rng
        )
        return {"r_rv": ledger.tree.root, "h_rv_new": ledger.tree.leaves[-1]}

    def _do_open_campaign(self, a) -> dict:
        verifier = self.actor(a["actor"])
        if a["campaign"] in self.campaigns:
            raise ScriptError(f"campaign name {a['campaign']!r} reused")
        verifier_ident = self.ident(a["actor"], a["verifier_id"])
        camp = open_campaign(self.params, verifier_ident, verifier.rng)
        self.campaigns[a["campaign"]] = (a["actor"], camp)
        return {"id_eps": camp.id_eps}

    def _do_present_campaign(self, a) -> dict:
        verifier_name, camp = self._campaign(a["campaign"])
        a = dict(a, verifier=verifier_name)
        bundle, accepted, _ = self._present_bundle(a, campaign=camp)
        if not accepted:
            raise UnsatisfiedRelation("presentation rejected")
        check_credential_uniqueness(self.params, camp, bundle.pi_s)
        transcript = bundle.transcript()
        if "assoc" in a:
            owner, record = self._assoc(a["assoc"])
            holder = self.actor(owner)
            ident = self.ident(owner, a["id"])
            proof = holder.wallet.present_association(
                self.vdr, record, ident, camp
            )
            try:
                check_association(self.params, camp, self.vdr, proof)
            except ProtocolError:
                # one action is one transaction: undo the n_s consumption
                camp.consumed_n_s.discard(bundle.pi_s.statement["n_s"])
                raise
            transcript["pi_pre"] = dict(proof.statement)
        return transcript

    def _do_block(self, a) -> dict:
        _, record = self._assoc(a["assoc"])
        n_a = association_nullifier(self.params, record.ids, record.u_a)
        self.vdr.block_associated_identifier(
            n_a, evidence=a.get("evidence", "").encode(),
            confirmed=bool(a.get("confirmed", False)),
        )
        return {"n_a": n_a}


# --- run / log / replay ------------------------------------------------------


def _record_digest(event: dict, prev: str) -> str:
    body = canonical_json(event) + prev
    return hashlib.blake2b(body.encode(), digest_size=32).hexdigest()


def run_scenario(script: dict, seed: int | None = None, log_path=None) -> dict:
    """Execute a parsed scenario.  Returns the run report; optionally writes
    the line-delimited log."""
    seed = script.get("seed", 0) if seed is None else seed
    overrides = script.get("params", {})
    params = ProtocolParams(**overrides) if overrides else ProtocolParams()
    sim = Simulation(params, seed)
    for name, labels in script.get("enums", {}).items():
        sim.enums[name] = EnumTable(name, tuple(labels))

    header = {"format": LOG_FORMAT, "params": params.describe(), "seed": seed}
    lines = [canonical_json(header)]
    prev = _record_digest(header, "")
    outcomes = []
    ok = True
    first_divergence = None

    for seq, action in enumerate(script["action"]):
        expect = action.get("expect", "accept")
        digest_before = sim.state_digest()
        try:
            transcript = sim.execute(
                {k: v for k, v in action.items() if k != "expect"}
            )
            outcome = "accept"
        except ScriptError:
            raise
        except ProtocolError as exc:
            outcome = exc.code
            transcript = {}
        event = {
            "seq": seq,
            "actor": action.get("actor", ""),
            "action": action["type"],
            "outcome": outcome,
            "expect": expect,
            "transcript": transcript,
            "digest_before": digest_before,
            "digest_after": sim.state_digest(),
            "stats": sim.stats(),
        }
        prev = _record_digest(event, prev)
        event["record"] = prev
        lines.append(canonical_json(event))
        outcomes.append({"seq": seq, "action": action["type"],
                         "outcome": outcome, "expect": expect})
        if outcome != expect:
            ok = False
            first_divergence = seq
            break

    if log_path is not None:
        with open(log_path, "w") as handle:
            handle.write("\n".join(lines) + "\n")
    return {
        "ok": ok,
        "first_divergence": first_divergence,
        "outcomes": outcomes,
        "final_digest": sim.state_digest(),
        "stats": sim.stats(),
    }


def read_log(path) -> tuple[dict, list]:
    try:
        with open(path) as handle:
            raw = [line for line in handle.read().splitlines() if line]
        parsed = [json.loads(line) for line in raw]
    except (OSError, json.JSONDecodeError) as exc:
        raise LogError(f"corrupt log: {exc}") from exc
    if not parsed or parsed[0].get("format") != LOG_FORMAT:
        raise LogError("missing or unknown log header")
    return parsed[0], parsed[1:]


def replay(path) -> dict:
    """Verify the record chain of a run log.  A clean but shortened log is
    reported as a consistent prefix."""
    header, events = read_log(path)
    prev = _record_digest(header, "")
    for position, event in enumerate(events):
        body = {k: v for k, v in event.items() if k != "record"}
        if event.get("seq") != position:
            return {"consistent": False, "first_divergence": position,
                    "events": len(events)}
        prev = _record_digest(body, prev)
        if event.get("record") != prev:
            return {"consistent": False, "first_divergence": position,
                    "events": len(events)}
    return {"consistent": True, "first_divergence": None,
            "events": len(events)}
