"""Command-line interface for attesting filesystem trees.

Exit code contract: 0 = valid, 1 = cryptographically invalid, 2 = malformed
input or arguments, 3 = I/O failure. Verification commands work with public
material only; private keys are needed only where new signatures are
created (attest/include under the signature schemes).
"""

from __future__ import annotations

import functools
import os
import sys
from pathlib import Path, PurePath
from typing import Sequence

import click

from . import accumulator, aggsig, envelope, integrated, manager, merkle
from .encoding import Reader, be64, int_from_bytes, int_to_fixed, lp
from .errors import (
    AttestationError,
    ConfigurationError,
    CorruptProof,
    DomainMismatch,
    IdConflict,
    InvalidComponent,
    InvalidParameter,
    Malformed,
    NotAMember,
    NotAProof,
    NotFound,
    UnsupportedVersion,
)
from .hashing import Component, build_component_set, digest_component
from .manager import DomainMaterial, Scheme

EXIT_VALID = 0
EXIT_INVALID = 1
EXIT_MALFORMED = 2
EXIT_IO = 3

WITNESS_MAGIC = b"CATW"
WITNESS_VERSION = 1

_SCHEMES = {
    "merkle": Scheme.MERKLE,
    "acc": Scheme.ACCUMULATOR,
    "sig": Scheme.AGGSIG,
    "integrated": Scheme.INTEGRATED,
}

_scheme_option = click.option(
    "--scheme",
    type=click.Choice(sorted(_SCHEMES)),
    default="merkle",
    show_default=True,
    help="Proof backend to use.",
)


def _handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except NotAMember as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_INVALID)
        except (
            NotAProof,
            UnsupportedVersion,
            Malformed,
            CorruptProof,
            DomainMismatch,
            InvalidParameter,
            InvalidComponent,
            ConfigurationError,
            IdConflict,
            NotFound,
        ) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_MALFORMED)
        except AttestationError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_MALFORMED)
        except OSError as exc:
            target = getattr(exc, "filename", None) or ""
            click.echo(f"i/o error: {exc.strerror or exc} {target}".rstrip(), err=True)
            sys.exit(EXIT_IO)

    return wrapper


@click.group()
def main() -> None:
    """Composable attestation over files and directories."""


# ---------------------------------------------------------------------------
# component ingestion
# ---------------------------------------------------------------------------


def _collect_dir(base: Path, prefix: str = "") -> list[Component]:
    components = []
    for current, dirnames, filenames in os.walk(base):
        for name in sorted(dirnames):
            if (Path(current) / name).is_symlink():
                click.echo(f"warning: skipping symlink {Path(current) / name}", err=True)
                dirnames.remove(name)
        dirnames.sort()
        for name in sorted(filenames):
            full = Path(current) / name
            if full.is_symlink():
                click.echo(f"warning: skipping symlink {full}", err=True)
                continue
            if not full.is_file():
                continue
            rel = full.relative_to(base).as_posix()
            components.append(Component(prefix + rel, full.read_bytes()))
    return components


def collect_components(paths: Sequence[str]) -> list[Component]:
    """Ingest files and directories into components.

    Directories are walked recursively with ids relative to the directory
    argument; plain files keep their (POSIX-normalized) path as id. Symlinks
    are skipped with a warning; hidden files are included.
    """
    components: list[Component] = []
    for raw in paths:
        path = Path(raw)
        if path.is_symlink():
            click.echo(f"warning: skipping symlink {raw}", err=True)
            continue
        if path.is_dir():
            components.extend(_collect_dir(path))
        elif path.is_file():
            components.append(Component(PurePath(raw).as_posix(), path.read_bytes()))
        else:
            raise FileNotFoundError(2, "no such file or directory", raw)
    return components


# ---------------------------------------------------------------------------
# domain material
# ---------------------------------------------------------------------------


def _load_params(path: str | None) -> accumulator.AccumulatorParams | None:
    if path is None:
        return None
    return accumulator.deserialize_params(Path(path).read_bytes())


def _load_signing_key(path: str | None) -> aggsig.SigningKey | None:
    if path is None:
        return None
    key = aggsig.load_key(Path(path).read_bytes())
    if not isinstance(key, aggsig.SigningKey):
        raise ConfigurationError(f"{path} holds a public key; a private key is required")
    return key


def _load_verify_key(path: str | None) -> aggsig.VerifyKey | None:
    if path is None:
        return None
    key = aggsig.load_key(Path(path).read_bytes())
    if isinstance(key, aggsig.SigningKey):
        return key.public()
    return key


def _material(
    params: str | None = None, key: str | None = None, pubkey: str | None = None
) -> DomainMaterial:
    return DomainMaterial(
        acc_params=_load_params(params),
        signing_key=_load_signing_key(key),
        verify_key=_load_verify_key(pubkey),
    )


def _load_proof(path: str) -> envelope.Proof:
    return envelope.deserialize_proof(Path(path).read_bytes())


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


@main.command()
@click.option("--seed", default=None, help="Setup seed (CATT_SEED overrides).")
@click.option("--bits", type=int, default=2048, show_default=True, help="Modulus size.")
@click.option("--out-dir", required=True, help="Existing directory for the output files.")
@_handle_errors
def setup(seed: str | None, bits: int, out_dir: str) -> None:
    """Generate accumulator parameters and a signing key pair from a seed."""
    effective = os.environ.get("CATT_SEED") or seed
    if effective is None:
        raise click.UsageError("provide --seed or set CATT_SEED")
    target = Path(out_dir)
    if not target.is_dir():
        raise FileNotFoundError(2, "output directory does not exist", out_dir)
    seed_bytes = effective.encode("utf-8")
    params = accumulator.setup(seed_bytes, bits)
    key = aggsig.keygen(seed_bytes, bits)
    (target / "accumulator.params").write_bytes(accumulator.serialize_params(params))
    (target / "signing.key").write_bytes(aggsig.serialize_signing_key(key))
    (target / "signing.pub").write_bytes(aggsig.serialize_verify_key(key))
    click.echo(f"wrote {target / 'accumulator.params'}")
    click.echo(f"wrote {target / 'signing.key'}")
    click.echo(f"wrote {target / 'signing.pub'}")


@main.command()
@click.argument("paths", nargs=-1, required=True)
@_scheme_option
@click.option("--params", default=None, help="Accumulator parameter file.")
@click.option("--key", default=None, help="Private signing key file.")
@click.option("--out", required=True, help="Proof output path.")
@_handle_errors
def attest(paths: tuple[str, ...], scheme: str, params: str | None, key: str | None, out: str) -> None:
    """Attest files and directory trees into a single proof."""
    selected = _SCHEMES[scheme]
    material = _material(params=params, key=key)
    manager.require_material(selected, material, mutating=True)
    members = build_component_set(collect_components(paths))
    proof = manager.attest_set(selected, material, members)
    Path(out).write_bytes(envelope.serialize_proof(proof))
    click.echo(f"attested {len(members)} components -> {out}")


@main.command()
@click.argument("proof_file")
@click.argument("paths", nargs=-1, required=True)
@click.option("--params", default=None, help="Accumulator parameter file.")
@click.option("--pubkey", default=None, help="Public verification key file.")
@_handle_errors
def verify(proof_file: str, paths: tuple[str, ...], params: str | None, pubkey: str | None) -> None:
    """Verify a proof against the current contents of the given paths."""
    proof = _load_proof(proof_file)
    scheme = Scheme(envelope.scheme_of(proof))
    material = _material(params=params, pubkey=pubkey)
    manager.require_material(scheme, material, mutating=False)
    members = build_component_set(collect_components(paths))
    if scheme is Scheme.INTEGRATED:
        report = integrated.verify(proof, members, material.acc_params, material.verifier())
        click.echo(
            "layers: merkle=%s accumulator=%s signature=%s"
            % tuple("ok" if ok else "FAIL" for ok in
                    (report.merkle_ok, report.accumulator_ok, report.signature_ok))
        )
        ok = report.overall
    else:
        ok = manager.verify_proof(scheme, material, proof, members)
    click.echo("valid" if ok else "invalid")
    sys.exit(EXIT_VALID if ok else EXIT_INVALID)


@main.command()
@click.argument("proof_file")
@click.argument("new_path")
@click.option("--params", default=None, help="Accumulator parameter file.")
@click.option("--key", default=None, help="Private signing key file.")
@click.option("--out", default=None, help="Updated proof output path.")
@click.option("--in-place", is_flag=True, help="Overwrite the input proof file.")
@_handle_errors
def include(
    proof_file: str,
    new_path: str,
    params: str | None,
    key: str | None,
    out: str | None,
    in_place: bool,
) -> None:
    """Fold one new file into an existing proof without re-reading the rest."""
    if (out is None) == (not in_place):
        raise click.UsageError("provide exactly one of --out or --in-place")
    path = Path(new_path)
    if path.is_symlink() or not path.is_file():
        raise FileNotFoundError(2, "not a regular file", new_path)
    component = Component(PurePath(new_path).as_posix(), path.read_bytes())
    proof = _load_proof(proof_file)
    scheme = Scheme(envelope.scheme_of(proof))
    material = _material(params=params, key=key)
    manager.require_material(scheme, material, mutating=True)
    updated = manager.include_proof_digest(
        scheme, material, proof, digest_component(component), component.id
    )
    destination = proof_file if in_place else out
    Path(destination).write_bytes(envelope.serialize_proof(updated))
    click.echo(f"included {component.id} -> {destination}")


@main.command()
@click.argument("proof_a")
@click.argument("proof_b")
@click.option("--params", default=None, help="Accumulator parameter file.")
@click.option("--pubkey", default=None, help="Public verification key file.")
@click.option("--out", required=True, help="Composed proof output path.")
@_handle_errors
def compose(proof_a: str, proof_b: str, params: str | None, pubkey: str | None, out: str) -> None:
    """Compose two proofs of the same scheme into one over the union."""
    first = _load_proof(proof_a)
    second = _load_proof(proof_b)
    scheme_a, scheme_b = envelope.scheme_of(first), envelope.scheme_of(second)
    if scheme_a != scheme_b:
        raise DomainMismatch(
            f"cannot compose {envelope.SCHEME_NAMES[scheme_a]} with {envelope.SCHEME_NAMES[scheme_b]}"
        )
    scheme = Scheme(scheme_a)
    if scheme is Scheme.INTEGRATED:
        raise DomainMismatch("integrated proofs cannot be composed without the signing key")
    material = _material(params=params, pubkey=pubkey)
    manager.require_material(scheme, material, mutating=False)
    if scheme is Scheme.MERKLE:
        composed: envelope.Proof = merkle.compose(first, second)
    elif scheme is Scheme.ACCUMULATOR:
        composed = accumulator.compose(first, second, material.acc_params)
    else:
        composed = aggsig.compose(first, second, material.verifier())
    Path(out).write_bytes(envelope.serialize_proof(composed))
    click.echo(f"composed -> {out}")


def _serialize_witness(scheme: Scheme, body: bytes) -> bytes:
    return WITNESS_MAGIC + bytes([WITNESS_VERSION, scheme]) + body


def _deserialize_witness(data: bytes) -> tuple[Scheme, Reader]:
    if data[:4] != WITNESS_MAGIC:
        raise Malformed("not a witness file")
    reader = Reader(data[4:], "witness")
    version = reader.byte()
    if version != WITNESS_VERSION:
        raise Malformed(f"unsupported witness version {version}")
    try:
        scheme = Scheme(reader.byte())
    except ValueError as exc:
        raise Malformed(str(exc)) from exc
    return scheme, reader


@main.command()
@click.argument("proof_file")
@click.argument("component_path")
@click.option("--params", default=None, help="Accumulator parameter file.")
@click.option("--out", required=True, help="Witness output path.")
@_handle_errors
def witness(proof_file: str, component_path: str, params: str | None, out: str) -> None:
    """Generate a membership witness (inclusion path or accumulator witness)."""
    proof = _load_proof(proof_file)
    scheme = Scheme(envelope.scheme_of(proof))
    digest = digest_component(_read_single_component(component_path))
    if scheme is Scheme.MERKLE:
        path = merkle.inclusion_path(proof, digest)
        body = bytearray(be64(path.leaf_index) + be64(len(path.siblings)))
        for step in path.siblings:
            body += bytes([step.side]) + step.digest
        payload = _serialize_witness(scheme, bytes(body))
    elif scheme is Scheme.ACCUMULATOR:
        material = _material(params=params)
        if material.acc_params is None:
            raise ConfigurationError("accumulator witnesses need --params")
        wit = accumulator.witness(proof, material.acc_params, digest)
        payload = _serialize_witness(
            scheme, digest + lp(int_to_fixed(wit.witness, wit.value_width))
        )
    elif scheme is Scheme.AGGSIG:
        sig = proof.signature_for(digest)
        if sig is None:
            raise NotAMember("component is not covered by this proof")
        payload = _serialize_witness(scheme, digest + lp(int_to_fixed(sig, proof.width)))
    else:
        raise ConfigurationError("integrated proofs carry no per-component witnesses")
    Path(out).write_bytes(payload)
    click.echo(f"witness -> {out}")


@main.command("check-witness")
@click.argument("proof_file")
@click.argument("witness_file")
@click.argument("component_path")
@click.option("--params", default=None, help="Accumulator parameter file.")
@click.option("--pubkey", default=None, help="Public verification key file.")
@_handle_errors
def check_witness(
    proof_file: str,
    witness_file: str,
    component_path: str,
    params: str | None,
    pubkey: str | None,
) -> None:
    """Check a witness file against a proof and a component file."""
    proof = _load_proof(proof_file)
    scheme = Scheme(envelope.scheme_of(proof))
    digest = digest_component(_read_single_component(component_path))
    wit_scheme, reader = _deserialize_witness(Path(witness_file).read_bytes())
    if wit_scheme != scheme:
        raise DomainMismatch("witness scheme does not match proof scheme")
    if scheme is Scheme.MERKLE:
        leaf_index = reader.u64()
        steps = []
        for _ in range(reader.u64()):
            side = merkle.Side(reader.byte())
            steps.append(merkle.PathStep(reader.take(32), side))
        reader.expect_end()
        path = merkle.MerkleInclusionPath(leaf_index, tuple(steps))
        ok = merkle.verify_inclusion(proof.root, digest, path)
    elif scheme is Scheme.ACCUMULATOR:
        material = _material(params=params)
        if material.acc_params is None:
            raise ConfigurationError("accumulator witnesses need --params")
        member = reader.take(32)
        value = int_from_bytes(reader.lp())
        reader.expect_end()
        wit = accumulator.MembershipWitness(value, member, material.acc_params.value_width)
        ok = member == digest and accumulator.verify_inclusion(proof, wit, material.acc_params)
    elif scheme is Scheme.AGGSIG:
        key = _load_verify_key(pubkey)
        if key is None:
            raise ConfigurationError("signature witnesses need --pubkey")
        member = reader.take(32)
        sig = int_from_bytes(reader.lp())
        reader.expect_end()
        ok = (
            member == digest
            and proof.key_digest == aggsig.key_digest(key)
            and pow(sig, key.public_exponent, key.modulus) == aggsig.fdh(digest, key.modulus)
        )
    else:
        raise ConfigurationError("integrated proofs carry no per-component witnesses")
    click.echo("witness valid" if ok else "witness invalid")
    sys.exit(EXIT_VALID if ok else EXIT_INVALID)


def _read_single_component(path_str: str) -> Component:
    path = Path(path_str)
    if path.is_symlink() or not path.is_file():
        raise FileNotFoundError(2, "not a regular file", path_str)
    return Component(PurePath(path_str).as_posix(), path.read_bytes())


_DEMO_DOMAINS = ("env", "hw", "model", "lib")


@main.command("demo-llm")
@click.argument("fixture_dir")
@_scheme_option
@click.option("--params", default=None, help="Accumulator parameter file.")
@click.option("--key", default=None, help="Private signing key file.")
@click.option("--out", default=None, help="Write the composed proof here.")
@click.option("--baseline", default=None, help="Verify this prior proof against the tree.")
@_handle_errors
def demo_llm(
    fixture_dir: str,
    scheme: str,
    params: str | None,
    key: str | None,
    out: str | None,
    baseline: str | None,
) -> None:
    """Attest the env/hw/model/lib domains of a model directory separately,
    compose them, and emit a unified trust report."""
    selected = _SCHEMES[scheme]
    material = _material(params=params, key=key)
    base = Path(fixture_dir)
    sessions = []
    for domain in _DEMO_DOMAINS:
        sub = base / domain
        if not sub.is_dir():
            raise Malformed(f"fixture is missing the {domain}/ subdirectory")
        components = _collect_dir(sub, prefix=f"{domain}/")
        sessions.append(manager.create_session(selected, components, material))
    combined = sessions[0]
    for session in sessions[1:]:
        combined = manager.compose_sessions(combined, session)
    if baseline is not None:
        prior = _load_proof(baseline)
        if envelope.scheme_of(prior) != selected:
            raise DomainMismatch("baseline proof scheme does not match --scheme")
        report = manager.build_report(
            selected, material, combined.component_set(), prior, revision=combined.revision
        )
    else:
        report = combined.report()
    click.echo(report.render())
    if out is not None:
        Path(out).write_bytes(report.proof_bytes)
        click.echo(f"proof -> {out}")
    sys.exit(EXIT_VALID if report.overall_valid else EXIT_INVALID)


if __name__ == "__main__":
    main()
