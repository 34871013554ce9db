"""Benchmark harness: a JSON suite of cells in, one CSV row per instance run out.

Suite format::

    {"seed": 7, "cells": [
        {"domain": "hanoi", "size": 3, "mode": "macro", "width": 7, "filter": "consistent"},
        {"domain": "blocksworld", "size": 4, "mode": "baseline", "width": 10,
         "filter": "consistent", "instances": 5}
    ]}

Blocksworld cells draw `instances` random instances with seeds seed, seed+1, ...
CSV columns are the fields of BenchRecord, in declaration order.
"""

import csv
import io
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, Field

from macroforge.planner.domains.blocksworld import random_blocksworld
from macroforge.planner.domains.filters import state_filter_for
from macroforge.planner.domains.hanoi import HanoiConfig, gen_hanoi
from macroforge.planner.models.instance import PlanningInstance
from macroforge.planner.models.plan import BenchRecord
from macroforge.planner.solver.expansion import plan_length
from macroforge.planner.solver.solve import baseline_reach, solve_mph
from macroforge.planner.utils.logging_config import configure_logging
from macroforge.planner.utils.serialization import load_document
from macroforge.planner.utils.settings import DEFAULT_BALL_CAP, EngineSettings

logger = logging.getLogger(__name__)

BENCH_COLUMNS = list(BenchRecord.model_fields)


class BenchCell(BaseModel):
    domain: Literal["blocksworld", "hanoi"]
    size: int = Field(ge=1, description="Blocks or disks")
    mode: Literal["macro", "baseline"] = "macro"
    width: int = Field(ge=1)
    filter: Literal["none", "consistent"] = "consistent"
    instances: int = Field(default=1, ge=1, description="Random draws (blocksworld only)")
    ball_cap: int = Field(default=DEFAULT_BALL_CAP, gt=0)


class BenchSuite(BaseModel):
    seed: int = 0
    cells: list[BenchCell] = Field(default_factory=list)


def cell_instances(cell: BenchCell, seed: int) -> list[PlanningInstance]:
    if cell.domain == "hanoi":
        return [gen_hanoi(HanoiConfig(ndisks=cell.size))]
    return [random_blocksworld(cell.size, seed + j) for j in range(cell.instances)]


def run_instance(instance: PlanningInstance, cell: BenchCell) -> BenchRecord:
    run = solve_mph if cell.mode == "macro" else baseline_reach
    started = time.perf_counter()
    outcome = run(
        instance,
        cell.width,
        state_filter_for(instance, cell.filter),
        EngineSettings(ball_cap=cell.ball_cap),
    )
    wall_ms = (time.perf_counter() - started) * 1000
    iterations = outcome.iterations
    return BenchRecord(
        instance=instance.name,
        mode=cell.mode,
        width=cell.width,
        filter=cell.filter,
        ball_size=max((it.states for it in iterations), default=0),
        edges=max((it.edges for it in iterations), default=0),
        label_changes=sum(it.label_changes for it in iterations),
        outcome=outcome.status,
        expanded_length=plan_length(outcome.plan.top, outcome.plan) if outcome.solved else None,
        wall_ms=round(wall_ms, 3),
    )


def run_cell(cell: BenchCell, seed: int) -> list[BenchRecord]:
    records = []
    for instance in cell_instances(cell, seed):
        record = run_instance(instance, cell)
        logger.info(
            f"{record.instance} {record.mode} k={record.width}: {record.outcome} "
            f"({record.wall_ms:.0f} ms)"
        )
        records.append(record)
    return records


def write_records(records: list[BenchRecord]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=BENCH_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for record in records:
        writer.writerow(record.model_dump())
    return buffer.getvalue()


def run_suite(data: str, out: str, jobs: int = 1) -> int:
    """Run every cell of the suite and write the CSV; rows follow cell order."""
    suite = load_document(data, BenchSuite)
    logger.info(f"Bench suite: {len(suite.cells)} cells, seed {suite.seed}, {jobs} jobs")
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs, initializer=configure_logging) as pool:
            per_cell = list(pool.map(run_cell, suite.cells, [suite.seed] * len(suite.cells)))
    else:
        per_cell = [run_cell(cell, suite.seed) for cell in suite.cells]
    text = write_records([record for records in per_cell for record in records])
    if out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")
        logger.info(f"Wrote {out}")
    return 0
