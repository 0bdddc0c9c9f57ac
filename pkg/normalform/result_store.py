"""
Directory codec for NormalFormResult
"""
import glob
import os
import re
from typing import Any, Dict, Optional

from helper.artifacts import make_header, read_csv, read_json, write_csv, write_json
from logs.logger import normalform_logger
from normalform.birkhoff import NormalFormDiagnostics, NormalFormParams, NormalFormResult
from polynomial.serialization import read_polynomial, write_polynomial
from spectrum.potential import FrequencyVector

PARTS = {"Z": "Z.jsonl", "R_N": "RN.jsonl", "R_T": "RT.jsonl"}
_GENERATOR = re.compile(r"S_(\d+)\.jsonl$")


def write_result(directory: str, result: NormalFormResult, header: Optional[Dict[str, Any]] = None) -> str:
    """
    Write Z/RN/RT, one S_{r} file per stage, diagnostics.json, frequencies.csv and params.json

    Args:
        directory: Output directory (created if missing)
        result: Result of birkhoff_iterate
        header: Shared header (None builds one from the params)

    Returns:
        The directory
    """
    os.makedirs(directory, exist_ok=True)
    header = header or make_header(result.params.model_dump())
    for name, filename in PARTS.items():
        write_polynomial(os.path.join(directory, filename), getattr(result, name), dict(header, part=name))
    for stage, S in enumerate(result.generators):
        write_polynomial(os.path.join(directory, f"S_{stage}.jsonl"), S, dict(header, part=f"S_{stage}"))
    write_json(os.path.join(directory, "diagnostics.json"), result.diagnostics.model_dump(mode="json"), header)
    write_json(os.path.join(directory, "params.json"), {"params": result.params.model_dump(mode="json")}, header)
    rows = sorted(result.omega.omega.items())
    write_csv(os.path.join(directory, "frequencies.csv"), ["j", "omega"], rows,
              dict(header, theta=result.omega.theta))
    normalform_logger.info(f"Normal form written to {directory} ({len(result.generators)} generators)")
    return directory


def read_result(directory: str) -> NormalFormResult:
    """Inverse of write_result"""
    if not os.path.isdir(directory):
        raise FileNotFoundError(f"no normal-form directory at {directory}")
    parts = {name: read_polynomial(os.path.join(directory, filename))[0] for name, filename in PARTS.items()}
    stages = []
    for path in glob.glob(os.path.join(directory, "S_*.jsonl")):
        match = _GENERATOR.search(path)
        if match:
            stages.append((int(match.group(1)), path))
    generators = [read_polynomial(path)[0] for _, path in sorted(stages)]
    diagnostics_doc = read_json(os.path.join(directory, "diagnostics.json"))
    diagnostics_doc.pop("header", None)
    params_doc = read_json(os.path.join(directory, "params.json"))
    freq_header, _, rows = read_csv(os.path.join(directory, "frequencies.csv"))
    omega = FrequencyVector.from_mapping(int(freq_header["theta"]), {int(j): float(w) for j, w in rows})
    return NormalFormResult(
        omega=omega,
        params=NormalFormParams(**params_doc["params"]),
        Z=parts["Z"], R_N=parts["R_N"], R_T=parts["R_T"],
        generators=generators,
        diagnostics=NormalFormDiagnostics(**diagnostics_doc),
    )
