"""Lookup of possible semisimple linear parts against the golden table.

The table transcribes the classification of semisimple groups that can be
the semisimple part of the Zariski closure of a low-dimensional affine
group acting properly discontinuously, together with the mechanism that
excludes each case.  The file is the source of truth: lookups reproduce
its rows verbatim.
"""

from dataclasses import dataclass
from importlib import resources

from .errors import UnknownDescriptor


@dataclass(frozen=True)
class ClassificationEntry:
    descriptor: str
    dim: int
    verdict: str
    tag: str
    mechanism: str
    notes: str
    raw: str


def _normalize(descriptor):
    return descriptor.replace(" ", "").replace("×", "x").upper()


def _load_table():
    text = resources.files("affinecert").joinpath("data/classification.txt").read_text()
    listed = []
    excluded = []
    for line in text.splitlines():
        line = line.rstrip()
        if not line or line.startswith("#") or line.startswith("schema"):
            continue
        kind, _, rest = line.partition(" ")
        fields = [f.strip() for f in rest.split("|")]
        entry = ClassificationEntry(
            descriptor=fields[0], dim=int(fields[1]), verdict=fields[2],
            tag=fields[3], mechanism=fields[4],
            notes=fields[5] if len(fields) > 5 else "", raw=line)
        (listed if kind == "listed" else excluded).append(entry)
    return listed, excluded


_LISTED, _EXCLUDED = _load_table()


def listed_entries():
    """All (group, dimension) rows listed as possible linear parts."""
    return list(_LISTED)


def classification_lookup(dim, descriptor):
    """Verdict for a semisimple-part descriptor at the given dimension.

    Returns the matching golden-table entry; descriptors present in the
    table but not at this dimension give a NotInTables verdict, and unknown
    descriptors raise.
    """
    if dim > 6:
        raise UnknownDescriptor(f"the classification covers dimensions up to 6, got {dim}")
    key = _normalize(descriptor)
    known = False
    for entry in _LISTED + _EXCLUDED:
        if _normalize(entry.descriptor) == key:
            known = True
            if entry.dim == dim:
                return entry
    if not known:
        raise UnknownDescriptor(f"no classification entry for '{descriptor}'")
    return ClassificationEntry(descriptor=descriptor, dim=dim,
                               verdict="NotInTables", tag="", mechanism="",
                               notes="group known, dimension not listed", raw="")
