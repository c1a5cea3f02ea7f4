"""Reading and writing study-pair datasets, scale conversions, bundled fixtures."""

from __future__ import annotations

import csv
import hashlib
import math
import os
from collections import OrderedDict
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from replitool.models import DomainError, Scale, StudyPair, StudyResult

COLUMNS = ("project", "paper_id", "experiment_id", "effect_id", "role", "internal_rep",
           "estimate", "se", "n", "scale", "reported_p", "is_null_result")
KEY_COLUMNS = COLUMNS[:4]
DATA_DIR_ENV = "REPLITOOL_DATA_DIR"

# sha256 of the bundled fixture files; regenerate with scripts/reconstruct_fixtures.py
FIXTURE_CHECKSUMS = {
    "rpcb.csv": "c38d579d637e05ea51e4b42bfa911bacef00f2ae72d4d3d9c9a279c0a0e3fed9",
    "rpp_eprp.csv": "1e037f03035579410304444eb3acfd575dd19153ddffe27a0db8b0121d244e68",
}

# Pair ids of the studies discussed by name.
NAMED_PAIRS = {
    "Goetz2011": "RPCB/goetz2011/1/1",
    "Dawson2011": "RPCB/dawson2011/1/1",
    "Lin2012_1_1": "RPCB/48/1/1",
    "Lin2012_2_1": "RPCB/48/2/1",
    "Lin2012_2_2": "RPCB/48/2/2",
    "Eastwick2008": "RPP/eastwick2008/1/1",
    "Ranganath2008": "RPP/ranganath2008/1/1",
    "Reynolds2008": "RPP/reynolds2008/1/1",
    "McCann2005": "EPRP/mccann2005/1/1",
}

LOGOR_TO_SMD = math.sqrt(3.0) / math.pi


class ParseError(DomainError):
    def __init__(self, message: str, row: int | None = None, field: str | None = None):
        where = []
        if row is not None:
            where.append(f"row {row}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.row = row
        self.field = field


class FixtureIntegrityError(DomainError):
    pass


# -- conversions ---------------------------------------------------------------

def convert_logor_to_smd(value: float) -> float:
    """SMD = (sqrt(3)/pi) * log OR; linear, so it applies to estimates, ses and margins."""
    if not math.isfinite(value):
        raise DomainError("conversion requires a finite value")
    return value * LOGOR_TO_SMD


def convert_smd_to_logor(value: float) -> float:
    if not math.isfinite(value):
        raise DomainError("conversion requires a finite value")
    return value / LOGOR_TO_SMD


def fisher_z(r: float) -> float:
    if not (-1.0 < r < 1.0):
        raise DomainError(f"Fisher z needs |r| < 1, got {r!r}")
    return math.atanh(r)


def inverse_fisher_z(z: float) -> float:
    if not math.isfinite(z):
        raise DomainError("inverse Fisher z requires a finite value")
    return math.tanh(z)


_LINEAR = {(Scale.LOG_OR, Scale.SMD): LOGOR_TO_SMD, (Scale.SMD, Scale.LOG_OR): 1.0 / LOGOR_TO_SMD}


def convert_study(study: StudyResult, to: Scale | str) -> StudyResult:
    to = Scale.parse(to)
    if study.scale == to:
        return study
    try:
        factor = _LINEAR[(study.scale, to)]
    except KeyError:
        raise DomainError(f"no conversion from {study.scale.value} to {to.value}") from None
    return StudyResult(study.estimate * factor, study.se * factor, study.n, to,
                       study.reported_p, study.is_null_result)


# -- fixtures ------------------------------------------------------------------

def data_dir() -> Path:
    override = os.environ.get(DATA_DIR_ENV)
    if override:
        return Path(override)
    return Path(str(resources.files("replitool") / "fixtures"))


def sha256_file(path: str | os.PathLike) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def resolve_dataset(name: str | os.PathLike) -> Path:
    """A path that exists is used as is; otherwise a fixture name ("rpcb" or
    "rpcb.csv") is looked up in :func:`data_dir`."""
    path = Path(name)
    if path.exists():
        return path
    fname = path.name if path.suffix else f"{path.name}.csv"
    candidate = data_dir() / fname
    if candidate.exists():
        return candidate
    raise DomainError(f"dataset {str(name)!r} not found (also looked in {data_dir()})")


def is_fixture(path: Path) -> bool:
    path = Path(path)
    if path.name not in FIXTURE_CHECKSUMS:
        return False
    try:
        return path.resolve().parent == data_dir().resolve()
    except OSError:
        return False


def verify_fixture(path: Path) -> str:
    digest = sha256_file(path)
    expected = FIXTURE_CHECKSUMS[Path(path).name]
    if digest != expected:
        raise FixtureIntegrityError(
            f"fixture {Path(path).name} checksum mismatch (expected {expected[:12]}..., "
            f"got {digest[:12]}...); pass --no-verify to load it anyway")
    return digest


def load_fixture(name: str, verify: bool = True) -> list[StudyPair]:
    return load_studies(resolve_dataset(name), verify=verify)


# -- CSV -------------------------------------------------------------------------

def _parse_float(text: str, row: int, name: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"not a number: {text!r}", row, name) from None
    if not math.isfinite(value):
        raise ParseError(f"not finite: {text!r}", row, name)
    return value


def _parse_int(text: str, row: int, name: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"not an integer: {text!r}", row, name) from None


def _parse_bool(text: str, row: int, name: str) -> bool | None:
    key = text.strip().lower()
    if key == "":
        return None
    if key in ("true", "t", "1", "yes", "y"):
        return True
    if key in ("false", "f", "0", "no", "n"):
        return False
    raise ParseError(f"not a boolean: {text!r}", row, name)


def _row_to_study(rec: dict, row: int) -> StudyResult:
    get = lambda k: (rec.get(k) or "").strip()
    estimate = _parse_float(get("estimate"), row, "estimate")
    se = _parse_float(get("se"), row, "se")
    if se <= 0:
        raise ParseError(f"se must be positive, got {se!r}", row, "se")
    n = _parse_int(get("n"), row, "n") if get("n") else None
    if n is not None and n < 1:
        raise ParseError(f"n must be >= 1, got {n}", row, "n")
    try:
        scale = Scale.parse(get("scale"))
    except DomainError as exc:
        raise ParseError(str(exc), row, "scale") from None
    reported_p = _parse_float(get("reported_p"), row, "reported_p") if get("reported_p") else None
    if reported_p is not None and not (0.0 <= reported_p <= 1.0):
        raise ParseError(f"p-value outside [0, 1]: {reported_p!r}", row, "reported_p")
    return StudyResult(estimate, se, n, scale, reported_p,
                       _parse_bool(get("is_null_result"), row, "is_null_result"))


def read_rows(path: str | os.PathLike, delimiter: str = ","):
    """Parse and validate rows; returns {key: {"original": ..., "replications": {rep: ...}}}."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh, delimiter=delimiter)
        if reader.fieldnames is None:
            raise ParseError("no rows")
        header = [h.strip() for h in reader.fieldnames]
        missing = [c for c in COLUMNS if c not in header]
        if missing:
            raise ParseError(f"missing columns: {', '.join(missing)}", 1)
        groups: OrderedDict[tuple, dict] = OrderedDict()
        seen = {}
        count = 0
        for i, raw in enumerate(reader, start=2):
            rec = {(k or "").strip(): v for k, v in raw.items()}
            if None in raw:
                raise ParseError("too many fields", i)
            count += 1
            key = tuple((rec[c] or "").strip() for c in KEY_COLUMNS)
            for c, v in zip(KEY_COLUMNS, key):
                if not v:
                    raise ParseError("identifier is empty", i, c)
                if "/" in v:
                    raise ParseError("identifier must not contain '/'", i, c)
            role = (rec["role"] or "").strip().lower()
            if role not in ("original", "replication"):
                raise ParseError(f"role must be 'original' or 'replication', got {rec['role']!r}", i, "role")
            rep = _parse_int((rec["internal_rep"] or "").strip() or "1", i, "internal_rep")
            if rep < 1:
                raise ParseError(f"internal_rep must be >= 1, got {rep}", i, "internal_rep")
            full_key = key + (role, rep)
            if full_key in seen:
                raise ParseError(f"duplicate key (same as row {seen[full_key]})", i)
            seen[full_key] = i
            study = _row_to_study(rec, i)
            group = groups.setdefault(key, {"original": None, "replications": {}, "rows": []})
            group["rows"].append(i)
            if role == "original":
                if group["original"] is not None:
                    raise ParseError("more than one original row for this effect", i, "role")
                group["original"] = study
            else:
                group["replications"][rep] = study
    if count == 0:
        raise ParseError("no rows")
    return groups


def load_studies(path: str | os.PathLike, delimiter: str = ",",
                 verify: bool | None = None) -> list[StudyPair]:
    """Load a dataset into study pairs, keeping internal replications separate.

    ``verify=None`` checks the checksum only for bundled fixtures; ``False``
    skips the check.
    """
    path = Path(path)
    if not path.exists():
        raise DomainError(f"no such file: {path}")
    if verify is not False and is_fixture(path):
        verify_fixture(path)
    groups = read_rows(path, delimiter)
    pairs = []
    for key, group in groups.items():
        first_row = group["rows"][0]
        pair_id = "/".join(key)
        if group["original"] is None:
            raise ParseError(f"replication rows for {pair_id} have no original row", first_row, "role")
        if not group["replications"]:
            raise ParseError(f"original {pair_id} has no replication rows", first_row, "role")
        reps = tuple(group["replications"][k] for k in sorted(group["replications"]))
        try:
            pairs.append(StudyPair(pair_id, group["original"], reps))
        except DomainError as exc:
            raise ParseError(str(exc), first_row, "scale") from None
    return pairs


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def study_rows(pairs: Iterable[StudyPair]) -> list[dict]:
    rows = []
    for pair in pairs:
        parts = pair.id.split("/")
        if len(parts) != 4:
            raise DomainError(f"pair id {pair.id!r} is not of the form project/paper/experiment/effect")
        members = [("original", 1, pair.original)]
        members += [("replication", k, s) for k, s in enumerate(pair.replications, start=1)]
        for role, rep, s in members:
            rows.append(dict(zip(COLUMNS, (*parts, role, rep, s.estimate, s.se, s.n, s.scale.value,
                                           s.reported_p, s.is_null_result))))
    return rows


def write_studies(pairs: Sequence[StudyPair], path: str | os.PathLike, delimiter: str = ",") -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        writer.writerow(COLUMNS)
        for row in study_rows(pairs):
            writer.writerow([_fmt(row[c]) for c in COLUMNS])
