#!/usr/bin/env python3
"""Run the full offline experiment on the shipped corpus and print the report.

Equivalent to:

    pref2constraint run --out <dir>/run.jsonl
    pref2constraint eval --outputs <dir>/run.jsonl

but kept as a single script for quick experimentation.  Pass an output
directory to keep the artifacts; otherwise a temporary directory is used.
"""

from __future__ import annotations

import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from pref2constraint.dataset import load_pilot_corpus, pilot_corpus_path  # noqa: E402
from pref2constraint.llm import MockBackend, RunManifest, run_experiment  # noqa: E402
from pref2constraint.metrics import evaluate_run, render_table  # noqa: E402

MOCK_FIXTURES = (
    Path(__file__).resolve().parents[1]
    / "src"
    / "pref2constraint"
    / "resources"
    / "mock"
    / "mock_responses.json"
)


def run(out_dir: Path) -> None:
    records = load_pilot_corpus()
    manifest = RunManifest.create(
        dataset_path=pilot_corpus_path(),
        template_id="it",
        shot_labels=("0s", "1s", "fs"),
        model_id="mock-model",
        seed=0,
    )
    outputs = out_dir / "run.jsonl"
    summary = run_experiment(
        manifest, records, MockBackend.from_file(MOCK_FIXTURES), outputs
    )
    print(
        f"completed {summary.completed}, skipped {summary.skipped}, "
        f"failed {len(summary.failures)} -> {outputs}",
        file=sys.stderr,
    )
    print(render_table(evaluate_run(outputs, records)))


def main() -> None:
    if len(sys.argv) > 1:
        out_dir = Path(sys.argv[1])
        out_dir.mkdir(parents=True, exist_ok=True)
        run(out_dir)
    else:
        with tempfile.TemporaryDirectory() as tmp:
            run(Path(tmp))


if __name__ == "__main__":
    main()
