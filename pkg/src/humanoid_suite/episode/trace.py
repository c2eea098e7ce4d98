"""Line-delimited episode traces for the CLI and oracle diffing."""

import json


def header_record(**config) -> dict:
    return {"header": config}


def step_record(step: int, stage: int, breakdown, status, sparse: float) -> dict:
    return {
        "step": step,
        "stage": stage,
        "terms": {k: float(v) for k, v in breakdown.terms.items()},
        "dense": float(breakdown.dense),
        "sparse": float(sparse),
        "total": float(breakdown.total),
        "terminated": bool(status.terminated),
        "reason": status.reason,
    }


class TraceWriter:
    def __init__(self, path):
        self._fh = open(path, "w", encoding="utf-8")

    def write(self, record: dict) -> None:
        self._fh.write(json.dumps(record, sort_keys=True) + "\n")

    def close(self) -> None:
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_trace(path):
    with open(path, "r", encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]
