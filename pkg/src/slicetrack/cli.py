"""Command-line interface: batch evaluation, one-shot segmentation, mesh
conversion, demo data, and the HTTP service."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .backends import BackendRegistry, SessionConfig, VolumeResolver, default_registry, wire_backend
from .core import BoundingBox2D, BoxPrompt, MaskPrompt, Prompt, rle_from_json, tumor_extent
from .harness import (
    build_report,
    evaluate_manifest,
    write_phantom_dataset,
    write_records_csv,
    write_report_json,
)
from .ingest import load_manifest, load_nifti
from .mesh import extract_surface, write_obj, write_stl_binary
from .propagation import ALL_STRATEGIES, Strategy, build_plan, run_interactive, run_propagation

STRATEGY_NAMES = [s.value for s in ALL_STRATEGIES]


def _parse_params(pairs: tuple[str, ...]) -> dict:
    params = {}
    for pair in pairs:
        if "=" not in pair:
            raise click.BadParameter(f"expected key=value, got {pair!r}", param_hint="--param")
        key, raw = pair.split("=", 1)
        try:
            value: object = int(raw)
        except ValueError:
            try:
                value = float(raw)
            except ValueError:
                value = raw
        params[key] = value
    return params


def _registry_with(backend_id: str, backend_cmd: str | None) -> BackendRegistry:
    registry = default_registry()
    if backend_cmd:
        registry.register(wire_backend(backend_id, backend_cmd.split()))
    return registry


def prompt_from_json(obj: dict, dims: tuple[int, int, int]) -> Prompt:
    d, h, w = dims
    kind = obj.get("kind")
    z = int(obj.get("z", -1))
    if not 0 <= z < d:
        raise ValueError(f"prompt slice {z} outside [0, {d})")
    if kind == "box":
        box = BoundingBox2D(
            x_min=int(obj["x_min"]), y_min=int(obj["y_min"]),
            x_max=int(obj["x_max"]), y_max=int(obj["y_max"]), z=z,
        )
        box.validate_for(dims)
        return BoxPrompt(box)
    if kind == "mask":
        mask = rle_from_json(obj["rle"])
        if mask.dims != (h, w):
            raise ValueError(f"prompt mask dims {mask.dims} do not match slices {(h, w)}")
        return MaskPrompt(z=z, mask=mask)
    raise ValueError(f"unknown prompt kind {kind!r}")


@click.group()
def main():
    """Single-prompt 3D tumor segmentation: propagate, score, visualize."""


@main.command("eval")
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--backend", "backend_id", default="gt-oracle", show_default=True)
@click.option("--strategies", default="all", show_default=True,
              help="'all' or comma-separated strategy names")
@click.option("--prompt", "prompt_kind", type=click.Choice(["box", "mask"]), default="box",
              show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--param", "params", multiple=True, help="backend param key=value, repeatable")
@click.option("--pad", type=int, default=0, show_default=True,
              help="pad derived box prompts by this many voxels")
@click.option("--center-rule", type=click.Choice(["midpoint", "max_area"]), default="midpoint",
              show_default=True)
@click.option("--bin-width", type=float, default=0.05, show_default=True)
@click.option("--backend-cmd", default=None,
              help="command line for an external wire-protocol adapter")
def eval_cmd(manifest_path, backend_id, strategies, prompt_kind, seed, out_path,
             params, pad, center_rule, bin_width, backend_cmd):
    """Evaluate every manifest patient with the chosen strategies."""
    manifest = load_manifest(manifest_path)
    if strategies == "all":
        chosen = ALL_STRATEGIES
    else:
        try:
            chosen = tuple(Strategy(name.strip()) for name in strategies.split(","))
        except ValueError as exc:
            raise click.BadParameter(str(exc), param_hint="--strategies") from exc
    outcome = evaluate_manifest(
        manifest,
        backend_id=backend_id,
        strategies=chosen,
        prompt_kind=prompt_kind,
        seed=seed,
        user_params=_parse_params(params),
        registry=_registry_with(backend_id, backend_cmd),
        center_rule=center_rule,
        pad=pad,
        on_patient=lambda pid: click.echo(f"evaluating {pid}", err=True),
    )
    report = build_report(outcome, bin_width=bin_width)
    out = Path(out_path)
    write_report_json(report, out)
    write_records_csv(outcome.records, out.with_suffix(".csv"))
    click.echo(f"wrote {out} ({len(outcome.records)} records, {len(outcome.errors)} errors)")
    for err in outcome.errors:
        click.echo(f"error: {err.patient_id}: {err.message}", err=True)
    if outcome.errors:
        sys.exit(1)


@main.command("segment")
@click.option("--volume", "volume_path", required=True, type=click.Path(exists=True))
@click.option("--prompt-file", required=True, type=click.Path(exists=True))
@click.option("--strategy", required=True,
              type=click.Choice(STRATEGY_NAMES + ["interactive"]))
@click.option("--backend", "backend_id", default="threshold-oracle", show_default=True)
@click.option("--gt", "gt_path", default=None, type=click.Path(exists=True),
              help="ground-truth mask; required for extent-based strategies")
@click.option("--out-mask", required=True, type=click.Path())
@click.option("--out-mesh", default=None, type=click.Path())
@click.option("--param", "params", multiple=True)
@click.option("--stop-after-empty", type=int, default=2, show_default=True)
@click.option("--backend-cmd", default=None)
def segment_cmd(volume_path, prompt_file, strategy, backend_id, gt_path,
                out_mask, out_mesh, params, stop_after_empty, backend_cmd):
    """Segment one volume from a prompt file and save the mask (and mesh)."""
    from .ingest import save_nifti

    volume = load_nifti(volume_path)
    prompt = prompt_from_json(json.loads(Path(prompt_file).read_text()), volume.dims)
    registry = _registry_with(backend_id, backend_cmd)
    user_params = _parse_params(params)

    plan = None
    if strategy != "interactive":
        if not gt_path:
            raise click.UsageError("--gt is required for extent-based strategies")
        extent = tumor_extent(load_nifti(gt_path, mask=True))
        plan = build_plan(Strategy(strategy), extent.z_first, extent.z_last,
                          z_center=extent.z_center)
        if prompt.z != plan.seed_z:
            raise click.UsageError(
                f"prompt slice {prompt.z} does not match the {strategy} seed {plan.seed_z}"
            )

    resolver = VolumeResolver()
    resolver.register_volume("volume", volume, path=str(volume_path))
    if gt_path:
        gt = load_nifti(gt_path, mask=True)
        resolver.register_mask("gt", gt, path=str(gt_path))
        schema = registry.get(backend_id).params_schema
        if "gt_ref" in schema:
            user_params.setdefault("gt_ref", "gt")
        elif not schema:
            user_params.setdefault("gt_path", str(gt_path))

    session = registry.open_session(
        SessionConfig(backend_id=backend_id, volume_ref="volume", params=user_params), resolver
    )
    try:
        if plan is None:
            mask, trace = run_interactive(
                session, prompt, stop_after_empty=stop_after_empty, spacing=volume.spacing
            )
        else:
            mask, trace = run_propagation(plan, session, prompt, spacing=volume.spacing)
    finally:
        session.close()

    save_nifti(mask, out_mask, gzip_out=str(out_mask).endswith(".gz"))
    click.echo(f"wrote {out_mask} ({mask.foreground_count()} voxels, {len(trace)} steps)")
    if out_mesh:
        write_obj(extract_surface(mask), out_mesh)
        click.echo(f"wrote {out_mesh}")


@main.command("mesh")
@click.option("--mask", "mask_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
def mesh_cmd(mask_path, out_path):
    """Convert a binary mask to a surface mesh (.obj or .stl by extension)."""
    mask = load_nifti(mask_path, mask=True)
    mesh = extract_surface(mask)
    if str(out_path).endswith(".stl"):
        write_stl_binary(mesh, out_path)
    else:
        write_obj(mesh, out_path)
    click.echo(f"wrote {out_path} ({mesh.n_vertices} vertices, {mesh.n_triangles} triangles)")


@main.command("serve")
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--data-dir", required=True, type=click.Path())
@click.option("--backends-file", default=None, type=click.Path(exists=True),
              help="JSON list of {backend_id, command} wire adapters to register")
@click.option("--ui-dir", default="frontend/dist", show_default=True,
              help="static UI directory; skipped when absent")
def serve_cmd(port, host, data_dir, backends_file, ui_dir):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    registry = default_registry()
    if backends_file:
        for entry in json.loads(Path(backends_file).read_text()):
            registry.register(wire_backend(entry["backend_id"], list(entry["command"])))
    app = create_app(data_dir, registry=registry, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port)


@main.command("demo-data")
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--count", type=int, default=3, show_default=True)
@click.option("--seed", type=int, default=7, show_default=True)
def demo_data_cmd(out_dir, count, seed):
    """Generate synthetic phantom volumes plus a manifest for trying things out."""
    manifest_path = write_phantom_dataset(out_dir, count=count, seed=seed)
    click.echo(f"wrote {manifest_path}")


if __name__ == "__main__":
    main()
