# scenarios/dataset.py
"""
Scenario dataset files: a JSON header line with the format version,
then one JSON record per scenario.
"""
import json
import os
from dataclasses import asdict, fields

from errors import DatasetParseError, FormatVersionError
from scenarios.generator import ScenarioSpec, VehicleSpec
from simulation.params import RoadConfig
from simulation.vehicles import VehicleKind

DATASET_FORMAT = "dqjl-scenarios"
DATASET_VERSION = 1

_VEHICLE_FIELDS = [f.name for f in fields(VehicleSpec)]
_ROAD_FIELDS = {f.name for f in fields(RoadConfig)}


def _spec_to_record(spec):
    return {
        "seed": spec.seed,
        "n_real": spec.n_real,
        "penetration": spec.penetration,
        "road": asdict(spec.road),
        # positional rows keep the file compact
        "vehicles": [
            [vs.x0, vs.lane0, vs.length, vs.b_star, vs.kind.name, vs.t_r]
            for vs in spec.vehicles
        ],
    }


def _record_to_spec(record):
    road = record["road"]
    if set(road) != _ROAD_FIELDS:
        raise ValueError(f"road fields {sorted(road)} do not match {sorted(_ROAD_FIELDS)}")
    vehicles = []
    for row in record["vehicles"]:
        if len(row) != len(_VEHICLE_FIELDS):
            raise ValueError(f"vehicle row has {len(row)} fields, expected {len(_VEHICLE_FIELDS)}")
        x0, lane0, length, b_star, kind, t_r = row
        vehicles.append(VehicleSpec(x0=float(x0), lane0=int(lane0), length=float(length),
                                    b_star=float(b_star), kind=VehicleKind[kind], t_r=float(t_r)))
    spec = ScenarioSpec(seed=int(record["seed"]), n_real=int(record["n_real"]),
                        penetration=float(record["penetration"]), vehicles=tuple(vehicles),
                        road=RoadConfig(**road))
    if spec.n_real != len(spec.vehicles):
        raise ValueError(f"n_real = {spec.n_real} but {len(spec.vehicles)} vehicles listed")
    return spec


def save_dataset(specs, path):
    """Write specs to path; returns the number of records written"""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    count = 0
    with open(path, "w", encoding="utf-8") as f:
        f.write(json.dumps({"format": DATASET_FORMAT, "version": DATASET_VERSION}) + "\n")
        for spec in specs:
            f.write(json.dumps(_spec_to_record(spec)) + "\n")
            count += 1
    return count


def load_dataset(path):
    """Read a dataset written by save_dataset"""
    with open(path, "r", encoding="utf-8") as f:
        lines = f.read().splitlines()

    if not lines:
        raise DatasetParseError("missing header", line_number=1)
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as e:
        raise DatasetParseError(f"unreadable header: {e}", line_number=1) from e
    if not isinstance(header, dict) or header.get("format") != DATASET_FORMAT:
        raise DatasetParseError(f"not a {DATASET_FORMAT} file", line_number=1)
    if header.get("version") != DATASET_VERSION:
        raise FormatVersionError(
            f"dataset version {header.get('version')!r} in {path}, expected {DATASET_VERSION}"
        )

    specs = []
    for line_number, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        record_index = len(specs)
        try:
            specs.append(_record_to_spec(json.loads(line)))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
            raise DatasetParseError(str(e) or type(e).__name__, line_number=line_number,
                                    record_index=record_index) from e
    return specs
