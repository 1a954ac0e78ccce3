"""Command-line entry points: mine a design space, run the HTTP service,
export a session's assessment, and score outputs against ground truth."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import assessment as assess
from . import evalharness
from .design_space import load_default_space, load_design_space, save_design_space
from .engine import EngineConfig
from .miner import ExternalAnnotator, MiningConfig, RuleBasedAnnotator, load_documents, mine
from .provider import ProviderConfig
from .service import ServiceConfig, SessionStore


@click.group()
def main() -> None:
    """Interactive privacy-design elicitation toolkit."""


@main.command("mine")
@click.option("--docs", "docs_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--seed", "seed_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--annotator", type=click.Choice(["stub", "external"]), default="stub")
@click.option("--max-iters", type=int, default=10, show_default=True)
@click.option("--report", "report_path", type=click.Path(dir_okay=False), default=None,
              help="Where to write the mining report (default: <out>.report.json).")
@click.option("--provider-config", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Provider settings JSON for the external annotator.")
def mine_cmd(docs_dir, seed_path, out_path, annotator, max_iters, report_path, provider_config):
    """Expand a seed design space from a directory of documents."""
    seed = load_design_space(seed_path)
    docs = load_documents(docs_dir)
    if annotator == "stub":
        backend = RuleBasedAnnotator(vocabulary=seed.label_vocabulary)
    else:
        cfg = ProviderConfig(**json.load(open(provider_config))) if provider_config else ProviderConfig(backend="external")
        backend = ExternalAnnotator(cfg, seed.label_vocabulary)
    space, report = mine(docs, seed, backend, MiningConfig(max_iterations=max_iters))
    save_design_space(space, out_path)
    report.save(report_path or f"{out_path}.report.json")
    click.echo(
        f"mined {len(docs)} documents: {len(space.definitions)} decision types, "
        f"{space.total_practices} practices, "
        f"{'saturated' if report.saturated else 'iteration cap hit'} "
        f"after {len(report.iterations)} iteration(s)"
    )


@main.command("export")
@click.option("--session", "session_path", required=True, type=click.Path(exists=True, dir_okay=False),
              help="Path to a session input log (<id>.log).")
@click.option("--format", "fmt", type=click.Choice(["csv", "xlsx"]), default="csv", show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--space", "space_path", type=click.Path(exists=True, dir_okay=False), default=None)
def export_cmd(session_path, fmt, out_path, space_path):
    """Replay a recorded session and write its assessment worksheet."""
    space = load_design_space(space_path) if space_path else load_default_space()
    path = Path(session_path)
    store = SessionStore(path.parent, space, ProviderConfig(), EngineConfig())
    holder = store.get(path.stem)
    if holder.rows is None:
        from . import engine as eng

        eng.begin_assessment(holder.session)
        holder.rows = assess.build_assessment(holder.session)
    data = assess.export_worksheet(holder.rows, fmt)
    Path(out_path).write_bytes(data)
    click.echo(f"wrote {len(holder.rows)} row(s) to {out_path}")


@main.command("serve")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
def serve_cmd(config_path):
    """Run the HTTP service."""
    from .service import serve

    config = ServiceConfig.from_file(config_path) if config_path else ServiceConfig()
    serve(config)


@main.command("eval")
@click.option("--output", "output_path", required=True, type=click.Path(exists=True, dir_okay=False),
              help="Decision file produced from a session.")
@click.option("--truth", "truth_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--report", "report_path", type=click.Path(dir_okay=False), default=None)
@click.option("--aliases", "alias_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="JSON object mapping output keys to truth keys.")
def eval_cmd(output_path, truth_path, report_path, alias_path):
    """Score an output decision set against ground truth."""
    truth = evalharness.load_ground_truth(truth_path)
    output = evalharness.load_output_decisions(output_path)
    aliases = json.load(open(alias_path)) if alias_path else {}
    decision = evalharness.decision_coverage(output, truth, aliases)
    choice = evalharness.choice_coverage(output, truth, aliases)
    table, machine = evalharness.report(decision, choice)
    click.echo(table)
    if report_path:
        with open(report_path, "w", encoding="utf-8") as fp:
            json.dump(machine, fp, indent=2)
            fp.write("\n")


if __name__ == "__main__":
    sys.exit(main())
