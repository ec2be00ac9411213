"""Command-line surface.

Exit codes: 0 success, 1 expectation divergence or inconsistent replay,
2 usage error (click's default for bad invocations).
"""

from __future__ import annotations

import json
import random
import sys

import click

from .credential import load_credential
from .errors import ProtocolError
from .fields import fe_to_hex
from .harness import load_script, read_log, replay as replay_log, run_scenario
from .params import DEFAULT_PARAMS
from .primitives import keygen as make_keypair, pk_limbs


@click.group()
def main() -> None:
    """Privacy-preserving credential protocol simulator."""


@main.group()
def scenario() -> None:
    """Run and replay scenario scripts."""


@scenario.command("run")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--seed", type=int, default=None, help="Override the script seed.")
@click.option("--log", "log_path", type=click.Path(dir_okay=False),
              help="Write the run log to this path.")
def scenario_run(file, seed, log_path) -> None:
    """Execute a scenario script and report per-action outcomes."""
    try:
        report = run_scenario(load_script(file), seed=seed, log_path=log_path)
    except ProtocolError as exc:
        raise click.ClickException(f"{exc.code}: {exc}")
    for entry in report["outcomes"]:
        marker = "ok" if entry["outcome"] == entry["expect"] else "DIVERGED"
        click.echo(f"[{entry['seq']:3d}] {entry['action']:<20} "
                   f"outcome={entry['outcome']:<20} "
                   f"expect={entry['expect']:<20} {marker}")
    click.echo(f"final state digest: {report['final_digest']}")
    if not report["ok"]:
        click.echo(f"first divergence at action {report['first_divergence']}")
        sys.exit(1)


@scenario.command("replay")
@click.argument("log", type=click.Path(exists=True, dir_okay=False))
def scenario_replay(log) -> None:
    """Verify the record chain of a previously written run log."""
    try:
        verdict = replay_log(log)
    except ProtocolError as exc:
        raise click.ClickException(f"{exc.code}: {exc}")
    if verdict["consistent"]:
        click.echo(f"consistent ({verdict['events']} events)")
    else:
        click.echo(f"inconsistent at sequence {verdict['first_divergence']} "
                   f"({verdict['events']} events)")
        sys.exit(1)


@main.group()
def ledger() -> None:
    """Inspect run logs."""


@ledger.command("inspect")
@click.argument("log", type=click.Path(exists=True, dir_okay=False))
@click.option("--at", "at_seq", type=int, default=None,
              help="Show only the event with this sequence number.")
def ledger_inspect(log, at_seq) -> None:
    """Pretty-print the log header and events."""
    try:
        header, events = read_log(log)
    except ProtocolError as exc:
        raise click.ClickException(f"{exc.code}: {exc}")
    if at_seq is None:
        click.echo(json.dumps(header, indent=2, sort_keys=True))
        for event in events:
            click.echo(f"[{event['seq']:3d}] actor={event['actor']:<12} "
                       f"action={event['action']:<20} outcome={event['outcome']}")
    else:
        for event in events:
            if event.get("seq") == at_seq:
                click.echo(json.dumps(event, indent=2, sort_keys=True))
                return
        raise click.ClickException(f"no event with sequence {at_seq}")


@main.command()
@click.option("--seed", type=int, default=None, help="Deterministic key seed.")
def keygen(seed) -> None:
    """Generate a key pair and print it as hex field elements."""
    rng = random.Random(seed)
    kp = make_keypair(DEFAULT_PARAMS, rng)
    lo, hi = pk_limbs(DEFAULT_PARAMS, kp.pk)
    click.echo(json.dumps({
        "sk": fe_to_hex(DEFAULT_PARAMS, kp.sk),
        "pk": [fe_to_hex(DEFAULT_PARAMS, lo), fe_to_hex(DEFAULT_PARAMS, hi)],
    }, indent=2, sort_keys=True))


@main.group()
def cred() -> None:
    """Credential file utilities."""


@cred.command("show")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
def cred_show(file) -> None:
    """Display a credential file with its canonical digest."""
    try:
        credential, u_rv = load_credential(DEFAULT_PARAMS, file)
    except ProtocolError as exc:
        raise click.ClickException(f"{exc.code}: {exc}")
    click.echo(f"issuer_id: {fe_to_hex(DEFAULT_PARAMS, credential.issuer_id)}")
    click.echo(f"holder_id: {fe_to_hex(DEFAULT_PARAMS, credential.holder_id)}")
    for claim in credential.claims:
        click.echo(f"claim {claim.key} ({claim.kind}): "
                   f"{fe_to_hex(DEFAULT_PARAMS, claim.value)}")
    click.echo(f"digest: {fe_to_hex(DEFAULT_PARAMS, credential.digest(DEFAULT_PARAMS))}")
    if u_rv is not None:
        click.echo(f"u_rv: {fe_to_hex(DEFAULT_PARAMS, u_rv)}")


@main.group()
def vdr() -> None:
    """Registry statistics."""


@vdr.command("stats")
@click.argument("log", type=click.Path(exists=True, dir_okay=False))
@click.option("--at", "at_seq", type=int, default=None,
              help="Report stats as of this sequence number.")
def vdr_stats(log, at_seq) -> None:
    """Report tree sizes and bucket cardinalities recorded in a run log."""
    try:
        header, events = read_log(log)
    except ProtocolError as exc:
        raise click.ClickException(f"{exc.code}: {exc}")
    if not events:
        raise click.ClickException("log contains no events")
    if at_seq is None:
        event = events[-1]
    else:
        matches = [e for e in events if e.get("seq") == at_seq]
        if not matches:
            raise click.ClickException(f"no event with sequence {at_seq}")
        event = matches[0]
    click.echo(json.dumps(event["stats"], indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
