"""Dataset records, fine-tuning export and corpus statistics."""

from __future__ import annotations

import json
import logging
from collections import Counter
from collections.abc import Iterable
from dataclasses import dataclass

from ..spice import Netlist, NetlistStats, netlist_stats, parse_netlist, serialize_netlist

log = logging.getLogger(__name__)

FINETUNE_SYSTEM_PROMPT = (
    "You are an expert analog designer. Given a description of an analog circuit, "
    "write the corresponding SPICE netlist."
)

STAT_FIELDS = ("components", "nodes", "mosfets", "lines")


class SerializationError(ValueError):
    pass


@dataclass(frozen=True)
class DatasetRecord:
    id: str
    image_ref: str
    caption: str
    description: str
    netlist: Netlist
    stats: NetlistStats

    @classmethod
    def build(cls, id: str, netlist: Netlist | str, description: str, caption: str = "", image_ref: str = "") -> DatasetRecord:
        if isinstance(netlist, str):
            netlist = parse_netlist(netlist)
        return cls(str(id), image_ref, caption, description, netlist, netlist_stats(netlist))

    @classmethod
    def from_json(cls, obj: dict) -> DatasetRecord:
        return cls.build(
            obj["id"], obj["netlist"], obj.get("description", ""),
            obj.get("caption", ""), obj.get("image_ref", ""),
        )

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "image_ref": self.image_ref,
            "caption": self.caption,
            "description": self.description,
            "netlist": serialize_netlist(self.netlist),
            "stats": self.stats.as_dict(),
        }


def finetune_line(record: DatasetRecord) -> str:
    if record.stats != netlist_stats(record.netlist):
        raise SerializationError(f"record {record.id}: stats do not match its netlist")
    if not record.description.strip():
        raise SerializationError(f"record {record.id}: empty description")
    if not record.netlist.components:
        raise SerializationError(f"record {record.id}: netlist has no components")
    messages = [
        {"role": "system", "content": FINETUNE_SYSTEM_PROMPT},
        {"role": "user", "content": record.description},
        {"role": "assistant", "content": serialize_netlist(record.netlist)},
    ]
    return json.dumps({"messages": messages}, ensure_ascii=False)


def export_finetune_records(
    records: Iterable[DatasetRecord],
    skipped: list[tuple[str, str]] | None = None,
) -> bytes:
    """Chat-format JSONL, one record per line, in input order.

    Records that fail validation are left out and reported as ``(id, reason)``
    in ``skipped`` when given, otherwise logged.
    """
    lines = []
    for rec in records:
        try:
            lines.append(finetune_line(rec))
        except SerializationError as exc:
            if skipped is not None:
                skipped.append((rec.id, str(exc)))
            else:
                log.warning("skipping record: %s", exc)
    return "".join(f"{line}\n" for line in lines).encode("utf-8")


def histograms(stats: Iterable[NetlistStats]) -> dict[str, Counter]:
    hist: dict[str, Counter] = {name: Counter() for name in STAT_FIELDS}
    for s in stats:
        for name, value in s.as_dict().items():
            hist[name][value] += 1
    return hist


def histogram_csv(counts: Counter, name: str) -> str:
    rows = [f"{name},count"] + [f"{value},{counts[value]}" for value in sorted(counts)]
    return "\n".join(rows) + "\n"
