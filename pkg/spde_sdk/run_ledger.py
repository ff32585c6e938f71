"""
Run Ledger Module

Records what each run produced and how to reproduce it. An entry holds the
configuration fingerprint, the output it wrote and free-form metadata (the
full configuration and code version). Entry ids are content hashes, so an
identical rerun produces an identical entry.

Author: graded-spde-sdk developers
"""

import hashlib
import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from . import __version__
from .errors import ReportError, ValidationError

logger = logging.getLogger(__name__)


@dataclass
class LedgerEntry:
    """An entry in the run ledger."""
    entry_type: str = ""  # e.g. "spatial_convergence", "temporal_convergence", "solve", "diagnostic"
    fingerprint: str = ""
    content: str = ""  # path of the written output
    code_version: str = __version__
    parent_entry_id: Optional[str] = None
    metadata: Dict[str, Any] = field(default_factory=dict)
    id: str = ""

    def __post_init__(self):
        if not self.id:
            self.id = self.content_hash()

    def content_hash(self) -> str:
        payload = {
            "entry_type": self.entry_type,
            "fingerprint": self.fingerprint,
            "content": self.content,
            "code_version": self.code_version,
            "parent_entry_id": self.parent_entry_id,
            "metadata": self.metadata,
        }
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:16]

    def to_dict(self) -> Dict:
        """Convert to dictionary."""
        return {
            "id": self.id,
            "entry_type": self.entry_type,
            "fingerprint": self.fingerprint,
            "content": self.content,
            "code_version": self.code_version,
            "parent_entry_id": self.parent_entry_id,
            "metadata": self.metadata,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data: Dict) -> "LedgerEntry":
        try:
            return cls(
                entry_type=data["entry_type"],
                fingerprint=data["fingerprint"],
                content=data["content"],
                code_version=data.get("code_version", __version__),
                parent_entry_id=data.get("parent_entry_id"),
                metadata=data.get("metadata", {}),
                id=data.get("id", ""),
            )
        except KeyError as exc:
            raise ValidationError(f"Ledger entry lacks field {exc}.", key=str(exc))


class RunLedger:
    """
    Ordered collection of run entries, persisted as JSON lines.
    """

    def __init__(self, location: Optional[str] = None):
        self.location = location
        self.entries: List[LedgerEntry] = []

    def add_entry(self, entry_type: str, fingerprint: str, content: str,
                  parent_entry_id: Optional[str] = None, metadata: Optional[Dict] = None) -> LedgerEntry:
        """Add a new entry to the ledger."""
        entry = LedgerEntry(
            entry_type=entry_type,
            fingerprint=fingerprint,
            content=content,
            parent_entry_id=parent_entry_id,
            metadata=metadata or {},
        )
        self.entries.append(entry)
        logger.debug("Ledger entry %s (%s) -> %s", entry.id, entry_type, content)
        return entry

    def get_entries_by_fingerprint(self, fingerprint: str) -> List[LedgerEntry]:
        """Retrieve all entries of one configuration."""
        return [e for e in self.entries if e.fingerprint == fingerprint]

    def get_entries_by_type(self, entry_type: str) -> List[LedgerEntry]:
        """Retrieve all entries of a specific type."""
        return [e for e in self.entries if e.entry_type == entry_type]

    def get_all_entries(self) -> List[LedgerEntry]:
        return self.entries

    def save(self, path: Optional[str] = None) -> None:
        """Write all entries as JSON lines."""
        path = path or self.location
        if not path:
            raise ValidationError("Ledger has no location to save to.")
        try:
            with open(path, "w", encoding="utf-8") as fh:
                for entry in self.entries:
                    fh.write(json.dumps(entry.to_dict(), sort_keys=True) + "\n")
        except OSError as exc:
            raise ReportError(f"Cannot write ledger ({exc.strerror})", path)

    @classmethod
    def load(cls, path: str) -> "RunLedger":
        """Read a ledger written by ``save``; a missing file gives an empty ledger."""
        ledger = cls(location=path)
        try:
            with open(path, "r", encoding="utf-8") as fh:
                lines = fh.readlines()
        except FileNotFoundError:
            return ledger
        except OSError as exc:
            raise ReportError(f"Cannot read ledger ({exc.strerror})", path)
        for lineno, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
            except json.JSONDecodeError:
                raise ValidationError(f"{path}:{lineno}: ledger line is not JSON.", index=lineno)
            ledger.entries.append(LedgerEntry.from_dict(data))
        return ledger
