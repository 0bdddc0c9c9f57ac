"""
Directory codec for built Hamiltonians
"""
import os
from typing import Any, Dict

from frontend.hamiltonian import BuildReport, Hamiltonian
from helper.artifacts import read_csv, read_json, write_csv, write_json
from logs.logger import system_logger
from polynomial.serialization import read_polynomial, write_polynomial
from spectrum.potential import FrequencyVector, Potential


def write_hamiltonian(directory: str, H: Hamiltonian, header: Dict[str, Any]) -> str:
    """P.jsonl, frequencies.csv and hamiltonian.json (potential and build report)"""
    os.makedirs(directory, exist_ok=True)
    write_polynomial(os.path.join(directory, "P.jsonl"), H.P, dict(header, part="P"))
    write_csv(os.path.join(directory, "frequencies.csv"), ["j", "omega"], sorted(H.omega.omega.items()),
              dict(header, theta=H.theta))
    payload = {
        "theta": H.theta,
        "potential": None if H.potential is None else H.potential.model_dump(mode="json"),
        "report": H.report.model_dump(mode="json"),
    }
    write_json(os.path.join(directory, "hamiltonian.json"), payload, header)
    system_logger.info(f"Hamiltonian written to {directory} ({len(H.P)} terms)")
    return directory


def read_hamiltonian(directory: str) -> Hamiltonian:
    if not os.path.isdir(directory):
        raise FileNotFoundError(f"no Hamiltonian directory at {directory}")
    P, _ = read_polynomial(os.path.join(directory, "P.jsonl"))
    freq_header, _, rows = read_csv(os.path.join(directory, "frequencies.csv"))
    omega = FrequencyVector.from_mapping(int(freq_header["theta"]), {int(j): float(w) for j, w in rows})
    doc = read_json(os.path.join(directory, "hamiltonian.json"))
    potential = None if doc.get("potential") is None else Potential(**doc["potential"])
    return Hamiltonian(int(doc["theta"]), P.lattice, omega, P, potential, BuildReport(**doc["report"]))
