"""Command line entry points: validate, split, run, report, summarize."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import pipeline, splits, summarizer
from .cohort import load_cohort


def cmd_validate(args):
    dataset = load_cohort(args.manifest)
    time, event = dataset.outcome_arrays()
    print(f"patients: {len(dataset.patients)}")
    print(f"events:   {int(event.sum())} ({event.mean():.1%})")
    for name in sorted(dataset.modalities):
        mod = dataset.modalities[name]
        print(f"modality {name}: kind={mod.kind} dim={mod.dim}")
    return 0


def cmd_split(args):
    dataset = load_cohort(args.manifest)
    plan = splits.stratified_kfold(dataset, k=args.k, seed=args.seed)
    splits.save_plan(plan, args.out)
    print(f"wrote {args.out} ({len(plan.assignment)} patients, k={plan.k})")
    return 0


def cmd_run(args):
    with open(args.config, encoding="utf-8") as fh:
        raw = json.load(fh)
    config = pipeline.ExperimentConfig.from_dict(raw)
    dataset = load_cohort(raw["manifest"])
    if raw.get("splits"):
        plan = splits.load_plan(raw["splits"], seed=config.seed)
    else:
        plan = splits.stratified_kfold(dataset, k=config.k, seed=config.seed)
    out_dir = raw.get("out_dir", "results")
    table = pipeline.run_experiment(config, dataset, plan, out_dir=out_dir)
    print(f"wrote {out_dir}/metrics.csv ({len(table)} rows)")
    return 0


def cmd_report(args):
    agg = pipeline.write_report(args.out)
    print(agg.to_string(index=False))
    return 0


def cmd_summarize(args):
    endpoint = args.endpoint or os.environ.get("SURVFUSE_LLM_ENDPOINT")
    if not endpoint:
        print("error: no endpoint (use --endpoint or SURVFUSE_LLM_ENDPOINT)", file=sys.stderr)
        return 2
    token = args.token or os.environ.get("SURVFUSE_LLM_TOKEN")
    model = args.model or os.environ.get("SURVFUSE_LLM_MODEL", "")
    reports = summarizer.read_reports_jsonl(args.input)
    params = summarizer.DecodingParams(seed=args.seed)
    successes, failures = summarizer.summarize_batch(
        reports, endpoint, token=token, model=model, params=params,
        max_in_flight=args.max_in_flight,
    )
    summarizer.write_summaries_jsonl(successes, failures, args.out_dir)
    print(f"summarized {len(successes)}/{len(reports)} reports ({len(failures)} failures)")
    return 0 if not failures else 1


def main(argv=None):
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = argparse.ArgumentParser(prog="survfuse")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="load a cohort manifest and report its contents")
    p.add_argument("manifest")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("split", help="build a stratified k-fold split plan")
    p.add_argument("--manifest", required=True)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="splits.csv")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("run", help="run the cross-validated fusion experiment")
    p.add_argument("--config", required=True, help="experiment JSON config")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("report", help="aggregate metrics.csv into cross-fold means")
    p.add_argument("--out", required=True, help="directory holding metrics.csv")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("summarize", help="batch-summarize pathology reports via an LLM endpoint")
    p.add_argument("--input", required=True, help="reports.jsonl")
    p.add_argument("--out-dir", default="summaries")
    p.add_argument("--endpoint", default=None)
    p.add_argument("--token", default=None)
    p.add_argument("--model", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-in-flight", type=int, default=4)
    p.set_defaults(func=cmd_summarize)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
