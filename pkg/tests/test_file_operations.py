import json
import os

import numpy as np
import pandas as pd
import pytest

from utils.data.file_operations import OutputBundle, atomic_write, read_json


def test_bundle_writes_csv_and_json(tmp_path):
    with OutputBundle(str(tmp_path / "out")) as bundle:
        csv_path = bundle.write_csv("trace.csv", pd.DataFrame({"a": [0.1, 1.0 / 3.0]}))
        json_path = bundle.write_json("report.json", {"ess": np.float64(12.5), "bad": float("nan"), "v": np.arange(3)})

    frame = pd.read_csv(csv_path)
    # full precision survives the text round
    assert frame["a"].iloc[1] == 1.0 / 3.0
    payload = read_json(json_path)
    assert payload == {"ess": 12.5, "bad": None, "v": [0, 1, 2]}
    assert not any(name.endswith(".tmp") for name in os.listdir(tmp_path / "out"))


def test_bundle_discards_everything_on_error(tmp_path):
    out = tmp_path / "out"
    with pytest.raises(RuntimeError):
        with OutputBundle(str(out)) as bundle:
            bundle.write_json("report.json", {"a": 1})
            child = bundle.sub_bundle("chain_1")
            child.write_csv("trace.csv", pd.DataFrame({"a": [1.0]}))
            raise RuntimeError("chain failed")
    assert not (out / "report.json").exists()
    assert not (out / "chain_1" / "trace.csv").exists()


def test_atomic_write_leaves_no_temporary_file_on_failure(tmp_path):
    target = tmp_path / "file.txt"

    def failing(path):
        with open(path, "w") as f:
            f.write("partial")
        raise OSError("disk full")

    with pytest.raises(OSError):
        atomic_write(str(target), failing)
    assert not target.exists()
    assert not (tmp_path / "file.txt.tmp").exists()


def test_read_json_missing_file(tmp_path):
    assert read_json(str(tmp_path / "absent.json")) is None
    (tmp_path / "x.json").write_text(json.dumps({"k": 1}))
    assert read_json(str(tmp_path / "x.json")) == {"k": 1}
