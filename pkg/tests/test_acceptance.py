"""Acceptance suite: one test (and one printed pass/fail line) per criterion.

Run with ``pytest tests/test_acceptance.py -v -s``.
"""

import copy
import pathlib
import random
import time

import pytest

from credveil.campaign import (
    check_association,
    check_credential_uniqueness,
    open_campaign,
)
from credveil.claims import Claim, EnumTable
from credveil.engine import (
    PresentationBundle,
    issue_credential,
    present,
    refresh_revocation_nullifier,
    verify_presentation,
)
from credveil.errors import ProtocolError, UnsatisfiedRelation
from credveil.harness import load_script, run_scenario
from credveil.hashing import h2, zero_hashes
from credveil.issuer import IssuerLedger
from credveil.merkle import MerkleTree
from credveil.nizk import Proof
from credveil.params import ProtocolParams
from credveil.relations import proof_to_obj, revocation_leaf, revocation_nullifier
from credveil.vdr import RegistryState
from credveil.wallet import Wallet

P = ProtocolParams(tree_depth=8)
SCENARIOS = pathlib.Path(__file__).resolve().parent.parent / "scenarios"

BLOOD = EnumTable("blood", ("A", "B", "AB", "O"))
GRADES = EnumTable("grades", ("A", "B", "C", "D", "F"))


def build_world(seed, params=P):
    rng = random.Random(seed)
    vdr = RegistryState(params)
    wallet = Wallet(params, rng)
    issuer_id = wallet.create_identity()
    wallet.publish(vdr, issuer_id)
    ledger = IssuerLedger(params, issuer_id)
    holder_id = wallet.create_identity()
    wallet.publish(vdr, holder_id)
    cred, u_rv = issue_credential(
        params, wallet.keypair(issuer_id), issuer_id, holder_id,
        [Claim.of(params, "age", "int", 25),
         Claim.of(params, "grade", "enum", GRADES.code("B")),
         Claim.of(params, "blood", "enum", BLOOD.code("O"))],
        ledger, rng)
    return dict(params=params, rng=rng, vdr=vdr, wallet=wallet,
                issuer_id=issuer_id, ledger=ledger, holder_id=holder_id,
                cred=cred, u_rv=u_rv)


def make_present(w, claim_key, phi, challenge=1, **kwargs):
    return present(w["params"], w["cred"], w["u_rv"], w["holder_id"],
                   w["wallet"].keypair(w["holder_id"]), claim_key, phi,
                   w["vdr"], w["ledger"], w["rng"], challenge=challenge,
                   **kwargs)


def system_digest(w):
    return (w["vdr"].state_digest(), w["ledger"].state_digest())


def test_criterion_1_reference_scenarios_under_one_second():
    """Age threshold, grade membership, and blood-type exclusion each run
    end to end (issue, present, verify) in under one second."""
    cases = [
        ("age", {"op": ">=", "constant": 18}),
        ("age", {"op": "<", "constant": 120}),
        ("grade", {"op": "in",
                   "codes": [GRADES.code(g) for g in ("A", "B", "C")]}),
        ("blood", {"op": "not-in", "codes": [BLOOD.code("AB")]}),
    ]
    for i, (claim_key, phi) in enumerate(cases):
        start = time.perf_counter()
        w = build_world(1000 + i)
        bundle = make_present(w, claim_key, phi)
        assert verify_presentation(P, bundle, w["vdr"], w["ledger"],
                                   challenge=1)
        elapsed = time.perf_counter() - start
        assert elapsed < 1.0, (claim_key, phi, elapsed)
    print("criterion 1 PASS: reference predicate scenarios verify "
          "end to end in under one second each")


def int_paths(obj, prefix=()):
    if isinstance(obj, bool):
        return []
    if isinstance(obj, int):
        return [prefix]
    if isinstance(obj, dict):
        return [p for k, v in obj.items() for p in int_paths(v, prefix + (k,))]
    if isinstance(obj, list):
        return [p for i, v in enumerate(obj) for p in int_paths(v, prefix + (i,))]
    return []


def test_criterion_2_adversarial_battery():
    """At least 500 adversarial submissions: every one is rejected and every
    stateful rejection leaves the state digests unchanged."""
    rng = random.Random(2024)
    rejected = attempted = 0

    def attempt(w, thunk):
        nonlocal rejected, attempted
        attempted += 1
        before = system_digest(w)
        try:
            outcome = thunk()
        except ProtocolError:
            rejected += 1
        else:
            if outcome is False:
                rejected += 1
        assert system_digest(w) == before

    w = build_world(2)
    phi = {"op": ">=", "constant": 18}

    # 200 single-slot statement mutations across the three core proofs
    for trial in range(200):
        bundle = make_present(w, "age", phi, challenge=trial)
        name = ("pi_c", "pi_id", "pi_rv")[trial % 3]
        proof = getattr(bundle, name)
        mutated = copy.deepcopy(dict(proof.statement))
        paths = int_paths(mutated)
        path = paths[rng.randrange(len(paths))]
        target = mutated
        for step in path[:-1]:
            target = target[step]
        target[path[-1]] = (target[path[-1]] + 1 + rng.randrange(1 << 64)) % P.prime
        forged = Proof(relation=proof.relation, statement=mutated,
                       payload=proof.payload)
        broken = PresentationBundle(**{**{"pi_c": bundle.pi_c,
                                          "pi_id": bundle.pi_id,
                                          "pi_rv": bundle.pi_rv}, name: forged})
        attempt(w, lambda: verify_presentation(
            P, broken, w["vdr"], w["ledger"], challenge=trial))

    # 100 corrupted payloads
    for trial in range(100):
        bundle = make_present(w, "age", phi, challenge=10_000 + trial)
        cut = rng.randrange(len(bundle.pi_c.payload) - 1)
        forged = Proof(relation=bundle.pi_c.relation,
                       statement=bundle.pi_c.statement,
                       payload=bundle.pi_c.payload[:cut])
        broken = PresentationBundle(pi_c=forged, pi_id=bundle.pi_id,
                                    pi_rv=bundle.pi_rv)
        attempt(w, lambda: verify_presentation(
            P, broken, w["vdr"], w["ledger"], challenge=10_000 + trial))

    # 60 replayed bundles under the wrong challenge
    for trial in range(60):
        bundle = make_present(w, "age", phi, challenge=trial)
        attempt(w, lambda: verify_presentation(
            P, bundle, w["vdr"], w["ledger"], challenge=trial + 1_000_000))

    # 50 forged registrations (blinded leaf swapped after proving)
    for trial in range(50):
        ident = w["wallet"].create_identity()
        w["wallet"].publish(w["vdr"], ident)
        proof = w["wallet"].register(w["vdr"], ident)
        forged = Proof(relation=proof.relation,
                       statement=dict(proof.statement,
                                      h_id=rng.randrange(P.prime)),
                       payload=proof.payload)
        attempt(w, lambda: w["vdr"].register_identifier(forged))

    # 40 stale presentations: roots rolled beyond the acceptance window
    narrow = build_world(3, ProtocolParams(tree_depth=8, root_window=2))
    stale = [make_present(narrow, "age", phi, challenge=t) for t in range(40)]
    for _ in range(3):
        ident = narrow["wallet"].create_identity()
        narrow["wallet"].publish(narrow["vdr"], ident)
        issue_credential(narrow["params"], narrow["wallet"].keypair(narrow["issuer_id"]),
                         narrow["issuer_id"], ident,
                         [Claim.of(narrow["params"], "x", "int", 1)],
                         narrow["ledger"], narrow["rng"])
    for t, bundle in enumerate(stale):
        attempt(narrow, lambda: verify_presentation(
            narrow["params"], bundle, narrow["vdr"], narrow["ledger"],
            challenge=t))

    # 20 replayed revocation-state refreshes
    for trial in range(20):
        holder = w["wallet"].create_identity()
        w["wallet"].publish(w["vdr"], holder)
        cred, u_rv = issue_credential(
            P, w["wallet"].keypair(w["issuer_id"]), w["issuer_id"], holder,
            [Claim.of(P, "n", "int", trial)], w["ledger"], w["rng"])
        u_new = rng.randrange(P.prime)
        h_rv = revocation_leaf(P, cred.digest(P), u_rv)
        from credveil.nizk import prove, setup
        from credveil.relations import REGISTRY
        proof = prove(P, REGISTRY, setup(REGISTRY, "REL_NULLIFIER_UPDATE"), {
            "r_rv": w["ledger"].tree.root,
            "n_rv": revocation_nullifier(P, cred.digest(P), u_rv),
            "h_rv_new": revocation_leaf(P, cred.digest(P), u_new),
            "n_rv_new": revocation_nullifier(P, cred.digest(P), u_new),
        }, {
            "cred": cred.record(P), "u_rv": u_rv, "u_rv_new": u_new,
            "h_rv": h_rv,
            "rho_rv": proof_to_obj(w["ledger"].revocation_proof(h_rv)),
        })
        w["ledger"].accept_nullifier_refresh(proof)
        attempt(w, lambda: w["ledger"].accept_nullifier_refresh(proof))

    # 20 double associations of the same registered identifier
    for trial in range(20):
        ident = w["wallet"].create_identity()
        w["wallet"].publish(w["vdr"], ident)
        w["wallet"].register(w["vdr"], ident)
        w["wallet"].associate(w["vdr"], [ident])
        attempt(w, lambda: w["wallet"].associate(w["vdr"], [ident]))

    # 20 campaign double participations (credential and association kinds)
    camp = open_campaign(P, w["issuer_id"], rng)
    for trial in range(10):
        holder = w["wallet"].create_identity()
        w["wallet"].publish(w["vdr"], holder)
        cred, u_rv = issue_credential(
            P, w["wallet"].keypair(w["issuer_id"]), w["issuer_id"], holder,
            [Claim.of(P, "m", "int", trial)], w["ledger"], w["rng"])
        bundle = present(P, cred, u_rv, holder, w["wallet"].keypair(holder),
                         "m", {"op": ">=", "constant": 0}, w["vdr"],
                         w["ledger"], w["rng"], challenge=trial, campaign=camp)
        check_credential_uniqueness(P, camp, bundle.pi_s)
        again = present(P, cred, u_rv, holder, w["wallet"].keypair(holder),
                        "m", {"op": ">=", "constant": 0}, w["vdr"],
                        w["ledger"], w["rng"], challenge=trial, campaign=camp)
        attempt(w, lambda: check_credential_uniqueness(P, camp, again.pi_s))
    for trial in range(10):
        members = [w["wallet"].create_identity() for _ in range(2)]
        for i in members:
            w["wallet"].publish(w["vdr"], i)
            w["wallet"].register(w["vdr"], i)
        rec = w["wallet"].associate(w["vdr"], members)
        first = w["wallet"].present_association(w["vdr"], rec, members[0], camp)
        check_association(P, camp, w["vdr"], first)
        second = w["wallet"].present_association(w["vdr"], rec, members[1], camp)
        attempt(w, lambda: check_association(P, camp, w["vdr"], second))

    assert attempted >= 500
    assert rejected == attempted
    print(f"criterion 2 PASS: {attempted} adversarial submissions, "
          f"{rejected} rejected (100%), state digests unchanged on rejection")


def test_criterion_3_frontier_matches_rebuild():
    """Incremental frontier roots equal full-rebuild roots for every prefix
    of 1000 random appends."""
    depth = 10
    zeros = zero_hashes(P, depth)

    def rebuild_root(leaves, level):
        # independent oracle: recursive rebuild, pruning empty subtrees
        if not leaves:
            return zeros[level]
        if level == 0:
            return leaves[0]
        half = 1 << (level - 1)
        return h2(P, rebuild_root(leaves[:half], level - 1),
                  rebuild_root(leaves[half:], level - 1))

    rng = random.Random(33)
    tree = MerkleTree(P, depth=depth)
    leaves = []
    for _ in range(1000):
        leaf = rng.randrange(P.prime)
        leaves.append(leaf)
        root = tree.append(leaf)
        assert root == rebuild_root(leaves, depth)
    print("criterion 3 PASS: frontier roots equal full-rebuild roots for "
          "all 1000 append prefixes")


def test_criterion_4_sybil_gate():
    """One participation per associated identifier set per campaign; a
    distinct campaign admits the same set again."""
    report = run_scenario(load_script(SCENARIOS / "double_spend.toml"))
    assert report["ok"], report["outcomes"]
    outcomes = [o["outcome"] for o in report["outcomes"]]
    assert "DuplicateNullifier" in outcomes
    assert outcomes[-1] == "accept"  # the second campaign accepts the set
    print("criterion 4 PASS: duplicate campaign participation rejected via "
          "the association nullifier; distinct campaigns unaffected")


def test_criterion_5_key_recovery():
    """A key refresh through the covering association invalidates the old
    key's presentations and enables new ones; refreshing an identifier
    outside the association is rejected."""
    report = run_scenario(load_script(SCENARIOS / "key_recovery.toml"))
    assert report["ok"], report["outcomes"]

    w = build_world(5)
    wallet, vdr = w["wallet"], w["vdr"]
    wallet.register(vdr, w["holder_id"])
    rec = wallet.associate(vdr, [w["holder_id"]])
    phi = {"op": ">=", "constant": 18}
    old_bundle = make_present(w, "age", phi)
    wallet.refresh_key(vdr, rec, w["holder_id"])
    with pytest.raises(ProtocolError):
        verify_presentation(P, old_bundle, vdr, w["ledger"], challenge=1)
    fresh = make_present(w, "age", phi)
    assert verify_presentation(P, fresh, vdr, w["ledger"], challenge=1)
    outsider = wallet.create_identity()
    wallet.publish(vdr, outsider)
    with pytest.raises(UnsatisfiedRelation):
        wallet.refresh_key(vdr, rec, outsider)
    print("criterion 5 PASS: key refresh recovers the identifier, kills old "
          "presentations, and is gated on association membership")


def test_criterion_6_revocation_and_refresh():
    """Revocation blocks presentation; the revocation-state refresh is
    accepted exactly once per state."""
    report = run_scenario(load_script(SCENARIOS / "revocation.toml"))
    assert report["ok"], report["outcomes"]

    w = build_world(6)
    phi = {"op": ">=", "constant": 18}
    u_new = refresh_revocation_nullifier(P, w["cred"], w["u_rv"],
                                         w["ledger"], w["rng"])
    with pytest.raises(ProtocolError):  # old state consumed
        refresh_revocation_nullifier(P, w["cred"], w["u_rv"],
                                     w["ledger"], w["rng"])
    w["u_rv"] = u_new
    bundle = make_present(w, "age", phi)
    assert verify_presentation(P, bundle, w["vdr"], w["ledger"], challenge=1)
    w["ledger"].revoke(w["issuer_id"], w["cred"].digest(P), u_new)
    with pytest.raises(ProtocolError):
        verify_presentation(P, bundle, w["vdr"], w["ledger"], challenge=1)
    print("criterion 6 PASS: revoked credentials stop verifying; nullifier "
          "refresh is one-time per revocation state")


def test_criterion_7_transcript_unlinkability():
    """100 pairs of presentations of the same credential share zero
    non-constant public values."""
    w = build_world(7)
    phi = {"op": ">=", "constant": 18}
    constant_slots = {"id_i", "pk_i", "sigma", "phi", "r_id", "r_rv", "n_rv"}

    def fresh_values(bundle):
        out = set()
        for stmt in bundle.transcript().values():
            for slot, value in stmt.items():
                if slot in constant_slots:
                    continue
                for path in int_paths({slot: value}):
                    target = {slot: value}
                    for step in path:
                        target = target[step]
                    out.add(target)
        return out

    shared = 0
    for pair in range(100):
        a = fresh_values(make_present(w, "age", phi, challenge=2 * pair))
        b = fresh_values(make_present(w, "age", phi, challenge=2 * pair + 1))
        shared += len((a & b) - {2 * pair, 2 * pair + 1})
    assert shared == 0
    print("criterion 7 PASS: 100 presentation pairs share zero non-constant "
          "public values")


def test_criterion_8_deterministic_replay(tmp_path):
    """Every shipped scenario produces byte-identical logs across runs."""
    scenarios = sorted(SCENARIOS.glob("*.toml"))
    assert len(scenarios) >= 5
    for path in scenarios:
        script = load_script(path)
        a = tmp_path / (path.stem + ".a.jsonl")
        b = tmp_path / (path.stem + ".b.jsonl")
        run_scenario(script, log_path=a)
        run_scenario(script, log_path=b)
        assert a.read_bytes() == b.read_bytes(), path.stem
    print(f"criterion 8 PASS: {len(scenarios)} scenarios produce "
          "byte-identical logs across repeated runs")
